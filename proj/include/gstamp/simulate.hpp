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

// End-to-end trial: the Sun stamps a map from a catalog, the clusters drift
// for dt, a recipient with noisy distances matches the map, recovers the
// elapsed time and trilaterates the sender.

#ifndef GSTAMP_SIMULATE_HPP_
#define GSTAMP_SIMULATE_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gstamp/catalog.hpp"
#include "gstamp/config.hpp"
#include "gstamp/error.hpp"
#include "gstamp/vec3.hpp"

namespace gstamp {

struct SimulateOptions {
  double dt_myr = 0.5;
  /// Gaussian sigma added to every recipient-side distance, kpc. When
  /// positive it also becomes each record's dist_err_kpc.
  double noise_kpc = 0.0;
  std::uint64_t seed = 1;
  /// How the clusters drift between stamping and reception.
  PropagationMode drift = PropagationMode::Linear;
};

struct SimulateResult {
  std::vector<std::string> anchor_names;
  std::size_t stamp_bytes = 0;
  double dt_true_myr = 0.0;

  /// Set when matching or recovery threw; the fields below stay default.
  std::optional<ErrorCode> failure;

  bool correspondence_correct = false;
  double match_rms_kpc = 0.0;
  double dt_est_myr = 0.0;
  double dt_error_myr = 0.0;
  double bound_myr = 0.0;
  bool epoch_within_bound = false;
  Vec3 sender_true;
  Vec3 sender_est;
  double position_error_kpc = 0.0;
  double locate_rms_kpc = 0.0;
};

/// Deterministic in (catalog, config, options). Selection, stamping and
/// configuration errors propagate as exceptions; matching and recovery errors
/// are recorded in `failure`.
SimulateResult run_simulation(const Catalog& cat0, const Config& cfg, const SimulateOptions& options);

/// key = value report preceded by the standard comment header.
std::string format_simulation(const SimulateResult& result, const Config& cfg, const SimulateOptions& options);

/// "gstamp <version> <command>", config hash, seed and the effective config.
std::vector<std::string> output_header(const std::string& command, const Config& cfg, std::uint64_t seed);

std::string tool_version();

}  // namespace gstamp

#endif  // GSTAMP_SIMULATE_HPP_
