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

// Time stamp: the dt = dd / v resolution model, catalog propagation, and
// recovery of the elapsed time from the drift of a location map.

#ifndef GSTAMP_EPOCH_HPP_
#define GSTAMP_EPOCH_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gstamp/catalog.hpp"
#include "gstamp/dynamics.hpp"
#include "gstamp/frames.hpp"
#include "gstamp/stamp.hpp"

namespace gstamp {

/// Years for a displacement dd_kpc at v_kms. Throws ZeroVelocity for v <= 0,
/// InvariantViolation for negative or non-finite dd.
double time_resolution(double dd_kpc, double v_kms);

struct ResolutionCurve {
  std::vector<double> dd_kpc;
  std::vector<double> v_kms;
  std::vector<std::vector<double>> dt_yr;  // [dd index][v index]

  friend bool operator==(const ResolutionCurve&, const ResolutionCurve&) = default;
};

struct ResolutionGrid {
  std::vector<double> dd_kpc{0.05, 0.1, 0.25, 0.5};
  double v_min_kms = 50.0;
  double v_max_kms = 600.0;
  std::size_t v_points = 56;

  friend bool operator==(const ResolutionGrid&, const ResolutionGrid&) = default;
};

/// Throws EmptyGrid when there are no dd cases or no v points,
/// InvariantViolation unless dd is positive and strictly increasing and
/// 0 < v_min < v_max (v_min alone when v_points == 1).
ResolutionCurve resolution_curves(const ResolutionGrid& grid);

/// Header "dd_kpc,v_kms,dt_yr", one row per cell (dd-major); `comments`
/// become leading "# " lines.
std::string write_resolution_csv(const ResolutionCurve& curve, const std::vector<std::string>& comments = {});

/// Inverse of write_resolution_csv. Throws ParseError, MissingColumn,
/// BadNumber.
ResolutionCurve parse_resolution_csv(std::string_view text);

enum class PropagationMode { Linear, Orbit };

PropagationMode parse_propagation_mode(std::string_view name);
std::string_view propagation_mode_name(PropagationMode mode);

struct OrbitSettings {
  PotentialParams potential;
  double step_myr = 0.1;
  Scheme scheme = Scheme::Leapfrog;
};

/// Moves every cluster by dt_myr (negative runs backwards) and regenerates
/// its observables; epoch advances by dt. Linear mode uses pos + vel * dt,
/// orbit mode integrates in the potential.
Catalog propagate_catalog(const Catalog& cat, const FrameParams& fp, double dt_myr, PropagationMode mode,
                          const OrbitSettings& orbit = {});

struct RecoverOptions {
  double window_lo_myr = -10.0;
  double window_hi_myr = 10.0;
  std::size_t scan_samples = 64;
  double tolerance_myr = 1e-3;
  PropagationMode mode = PropagationMode::Linear;
  OrbitSettings orbit;
  MatchOptions match;
};

struct EpochEstimate {
  double dt_myr = 0.0;
  double residual_kpc = 0.0;
  double bound_myr = 0.0;
  Correspondence correspondence;
  std::vector<double> scan_dt_myr;
  std::vector<double> scan_residual_kpc;
};

/// Fit residual: rms distance between the map's anchor geometry and the
/// matched clusters moved back by dt_myr, after removing the best common
/// translation (the sender position is unknown).
double drift_residual(const LocationMap& map, const Correspondence& corr, const Catalog& cat_now,
                      const FrameParams& fp, double dt_myr, const RecoverOptions& options = {});

/// Matches the map against cat_now (failures become MatchFailed), scans the
/// window at scan_samples points, then narrows the best bracket by
/// golden-section search to tolerance_myr. Throws WindowTooNarrow when the
/// coarse minimum sits on a window edge.
EpochEstimate recover_epoch(const LocationMap& map, const Catalog& cat_now, const FrameParams& fp,
                            const RecoverOptions& options = {});

/// Same search with a known correspondence.
EpochEstimate recover_epoch(const LocationMap& map, const Correspondence& corr, const Catalog& cat_now,
                            const FrameParams& fp, const RecoverOptions& options = {});

/// max over anchors of time_resolution(dist_err, galactocentric speed), years.
double epoch_error_bound(const Catalog& cat, const FrameParams& fp, std::span<const std::size_t> anchors);

}  // namespace gstamp

#endif  // GSTAMP_EPOCH_HPP_
