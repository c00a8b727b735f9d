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

// Three-component analytic Milky Way potential, fixed-step orbit integration
// and the cluster speed distribution.

#ifndef GSTAMP_DYNAMICS_HPP_
#define GSTAMP_DYNAMICS_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "gstamp/catalog.hpp"
#include "gstamp/frames.hpp"
#include "gstamp/vec3.hpp"

namespace gstamp {

/// Spherical Plummer term: -GM / sqrt(r^2 + b^2).
struct PlummerBulge {
  double gm = 4.8e4;  // kpc (km/s)^2
  double softening_kpc = 0.277;
  friend bool operator==(const PlummerBulge&, const PlummerBulge&) = default;
};

/// Miyamoto-Nagai disk: -GM / sqrt(R^2 + (a + sqrt(z^2 + b^2))^2).
struct MiyamotoNagaiDisk {
  double gm = 3.47e5;  // kpc (km/s)^2
  double a_kpc = 3.7;
  double b_kpc = 0.20;
  friend bool operator==(const MiyamotoNagaiDisk&, const MiyamotoNagaiDisk&) = default;
};

/// Logarithmic halo: 0.5 v^2 ln((r^2 + c^2) / r_ref^2), r_ref = kHaloZeroRadiusKpc.
/// Unbounded as r grows; zero at r^2 + c^2 = r_ref^2.
struct LogarithmicHalo {
  double v_halo_kms = 200.0;
  double core_kpc = 8.0;
  friend bool operator==(const LogarithmicHalo&, const LogarithmicHalo&) = default;
};

inline constexpr double kHaloZeroRadiusKpc = 200.0;

struct PotentialParams {
  PlummerBulge bulge;
  MiyamotoNagaiDisk disk;
  LogarithmicHalo halo;
  /// Calibration target for circular_velocity(r0).
  double vcirc_target_kms = 240.0;
  friend bool operator==(const PotentialParams&, const PotentialParams&) = default;
};

/// Throws InvariantViolation unless every scale is positive and
/// |circular_velocity(r0) - target| <= 5 km/s.
void check_potential(const PotentialParams& pp, double r0_kpc);

std::vector<std::string> describe_potential(const PotentialParams& pp);

/// Specific potential energy, (km/s)^2.
double potential_value(const Vec3& pos, const PotentialParams& pp);

/// -grad(potential), km/s per Myr.
Vec3 acceleration(const Vec3& pos, const PotentialParams& pp);

/// sqrt(R dPhi/dR) in the plane z = 0, km/s. Throws BadRadius for r <= 0.
double circular_velocity(double r_kpc, const PotentialParams& pp);

double specific_energy(const PhaseState& st, const PotentialParams& pp);

enum class Scheme { Leapfrog, Rk4 };

Scheme parse_scheme(std::string_view name);
std::string_view scheme_name(Scheme scheme);

struct Trajectory {
  std::vector<double> times_myr;
  std::vector<PhaseState> states;
  std::vector<double> energy_kms2;

  std::size_t size() const noexcept { return times_myr.size(); }
  /// |E_end - E_0| / |E_0|.
  double relative_energy_drift() const;
  /// max_t |E_t - E_0| / |E_0|.
  double max_relative_energy_error() const;
};

/// Fixed-step integration from t = 0 to t_end_myr, one sample per step
/// (including t = 0). A final partial step lands exactly on t_end when it is
/// not a multiple of dt. Throws InvariantViolation for dt <= 0 or t_end < dt,
/// NonFinite(step) when the state diverges.
Trajectory integrate_orbit(const PhaseState& start, const PotentialParams& pp, double dt_myr, double t_end_myr,
                           Scheme scheme);

/// Same integration, returning only the final state.
PhaseState advance_orbit(const PhaseState& start, const PotentialParams& pp, double dt_myr, double t_end_myr,
                         Scheme scheme);

struct VelocityHistogram {
  std::vector<double> edges_kms;               // bins + 1 uniform edges over [0, v_max]
  std::vector<std::size_t> total_counts;       // |galactocentric velocity|
  std::vector<std::size_t> tangential_counts;  // component across the line of sight
  std::vector<double> speeds_kms;              // per record, catalog order
  std::vector<double> tangential_kms;
};

/// Histogram of galactocentric speeds. Values at or above v_max land in the
/// last bin so the counts always sum to the record count. Throws EmptyCatalog.
VelocityHistogram velocity_distribution(const Catalog& cat, const FrameParams& fp, std::size_t bins,
                                        double v_max_kms = 1000.0);

}  // namespace gstamp

#endif  // GSTAMP_DYNAMICS_HPP_
