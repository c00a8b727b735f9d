// Copyright 2026 The gstamp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Location stamp: anchor selection, the binary map codec, and the recipient
// side (anchor matching and trilateration of the sender).
//
// Binary format v1, all integers little-endian:
//
//   offset  size  field
//   0       4     magic "MIAB"
//   4       1     version (1)
//   5       2     k, unsigned
//   7       8     epoch_jyear, IEEE-754 binary64
//   15      16*k  anchors: mv_q i16, feh_q i16, x/y/z i32 parsecs
//   15+16k  4     CRC-32 (IEEE) of every preceding byte

#ifndef GSTAMP_STAMP_HPP_
#define GSTAMP_STAMP_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gstamp/catalog.hpp"
#include "gstamp/frames.hpp"
#include "gstamp/vec3.hpp"

namespace gstamp {

inline constexpr double kMagnitudeQuantum = 0.25;    // mag
inline constexpr double kMetallicityQuantum = 0.1;   // dex
inline constexpr std::uint8_t kStampVersion = 1;
inline constexpr std::size_t kStampHeaderBytes = 15;
inline constexpr std::size_t kStampAnchorBytes = 16;
inline constexpr std::size_t kStampTrailerBytes = 4;

struct AnchorSignature {
  std::int16_t mv_q = 0;
  std::int16_t feh_q = 0;

  static AnchorSignature quantize(double mv_abs, double feh_dex);
  double mv_abs() const { return mv_q * kMagnitudeQuantum; }
  double feh_dex() const { return feh_q * kMetallicityQuantum; }
  /// Equal within one quantum on both axes.
  bool compatible(const AnchorSignature& other) const;

  friend bool operator==(const AnchorSignature&, const AnchorSignature&) = default;
};

struct MapAnchor {
  AnchorSignature signature;
  Vec3 pos_rel;  // kpc, galactocentric axes, relative to the sender
  friend bool operator==(const MapAnchor&, const MapAnchor&) = default;
};

struct LocationMap {
  double epoch_jyear = 2016.0;
  std::vector<MapAnchor> anchors;

  std::size_t k() const noexcept { return anchors.size(); }
  friend bool operator==(const LocationMap&, const LocationMap&) = default;
};

inline constexpr std::size_t kMinAnchors = 4;
inline constexpr double kMinAnchorSeparationKpc = 0.5;

/// Throws InvariantViolation (k < 4, non-finite values) or DegenerateGeometry
/// (two anchors within 0.5 kpc).
void check_location_map(const LocationMap& map);

struct StampQuantization {
  double position_pc = 1.0;
};

/// Rounds each position to the nearest multiple of the quantum.
Vec3 quantize_position(const Vec3& pos_kpc, const StampQuantization& quant = {});

std::vector<std::uint8_t> encode_stamp(const LocationMap& map, const StampQuantization& quant = {});

/// Throws Truncated, BadMagic, UnsupportedVersion, ChecksumFail, or the
/// check_location_map errors.
LocationMap decode_stamp(std::span<const std::uint8_t> bytes);

/// Human-readable form used by `stamp decode` / `stamp encode --dump`.
std::string dump_stamp(const LocationMap& map);
LocationMap parse_stamp_dump(std::string_view text);

/// Greedy brightest-first choice: ascending mv_abs (ties by name), skipping
/// candidates closer than min_sep_kpc to a chosen anchor and, when
/// min_speed_kms > 0, clusters slower than that. Throws BadK unless
/// 4 <= k <= |cat|, TooFewCandidates when fewer than k survive.
std::vector<std::size_t> select_anchors(const Catalog& cat, const FrameParams& fp, std::size_t k,
                                        double min_sep_kpc, double min_speed_kms = 0.0);

/// Sender-relative anchor positions (sender = the Sun) and quantized
/// signatures. Throws DegenerateGeometry for collinear or crowded anchors.
LocationMap build_location_map(const Catalog& cat, const FrameParams& fp, std::span<const std::size_t> anchors,
                               const StampQuantization& quant = {});

struct Correspondence {
  /// (map anchor index, catalog record index), in map anchor order.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  double rms_residual_kpc = 0.0;
};

struct MatchOptions {
  double tol_kpc = 1.0;
  /// Relative gap the best hypothesis must keep over the runner-up.
  double ambiguity_ratio = 1.1;
  std::size_t node_budget = 20'000'000;
};

/// Matches map anchors to catalog records through signature compatibility and
/// pairwise-distance consistency. Exhaustive over compatible candidates,
/// pruning any partial assignment with a pair residual above tol_kpc. Throws
/// NoMatch when nothing survives, MatchAmbiguous when the runner-up residual
/// is within ambiguity_ratio of the best.
Correspondence match_anchors(const LocationMap& map, const Catalog& cat, const FrameParams& fp,
                             const MatchOptions& options = {});

struct SenderFit {
  Vec3 position;  // galactocentric, kpc
  double rms_residual_kpc = 0.0;
  std::size_t iterations = 0;
  std::vector<double> cost_history;  // sum of squared range residuals per iterate
};

/// Gauss-Newton trilateration of the sender from the matched anchors' catalog
/// positions and the map's sender-anchor distances. Starts at the anchor
/// centroid; step halving keeps the cost non-increasing. Throws Degenerate for
/// coplanar anchors or fewer than 4 pairs, NoConvergence after 100 iterations.
SenderFit locate_sender(const Correspondence& corr, const LocationMap& map, const Catalog& cat,
                        const FrameParams& fp);

}  // namespace gstamp

#endif  // GSTAMP_STAMP_HPP_
