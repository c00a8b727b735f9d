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

// Plain-text run configuration:
//
//   # comment
//   [frame]
//   r0_kpc = 8.3
//
// Every key belongs to a section; unknown sections or keys are rejected.

#ifndef GSTAMP_CONFIG_HPP_
#define GSTAMP_CONFIG_HPP_

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gstamp/dynamics.hpp"
#include "gstamp/epoch.hpp"
#include "gstamp/frames.hpp"
#include "gstamp/stamp.hpp"

namespace gstamp {

struct IntegratorSettings {
  double dt_myr = 0.1;
  double t_end_myr = 1000.0;
  Scheme scheme = Scheme::Leapfrog;
  friend bool operator==(const IntegratorSettings&, const IntegratorSettings&) = default;
};

struct StampSettings {
  std::size_t k = 16;
  double min_sep_kpc = 1.0;
  double min_speed_kms = 300.0;
  double match_tol_kpc = 1.0;
  double ambiguity_ratio = 1.1;
  double position_quantum_pc = 1.0;
  friend bool operator==(const StampSettings&, const StampSettings&) = default;
};

struct EpochSettings {
  double window_lo_myr = -10.0;
  double window_hi_myr = 10.0;
  std::size_t scan_samples = 64;
  double tolerance_myr = 1e-3;
  PropagationMode mode = PropagationMode::Linear;
  ResolutionGrid grid;
  friend bool operator==(const EpochSettings&, const EpochSettings&) = default;
};

struct Config {
  FrameParams frame;
  PotentialParams potential;
  IntegratorSettings integrator;
  StampSettings stamp;
  EpochSettings epoch;
  friend bool operator==(const Config&, const Config&) = default;

  OrbitSettings orbit() const { return {potential, integrator.dt_myr, integrator.scheme}; }
  MatchOptions match() const;
  StampQuantization quantization() const { return {stamp.position_quantum_pc}; }
  RecoverOptions recover() const;
};

/// Throws ParseError (with the line number), UnknownKey, or
/// InvariantViolation from the owning module's checks.
Config parse_config(std::string_view text);
Config load_config(const std::filesystem::path& path);

/// Runs every module check on an assembled config.
void check_config(const Config& cfg);

/// "section.key = value" lines covering every setting, in a fixed order.
std::vector<std::string> describe_config(const Config& cfg);

/// Text accepted by parse_config that reproduces `cfg`.
std::string render_config(const Config& cfg);

/// SHA-256 of the describe_config lines.
std::string config_hash(const Config& cfg);

}  // namespace gstamp

#endif  // GSTAMP_CONFIG_HPP_
