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

// Equatorial <-> Galactic <-> galactocentric Cartesian transforms.
//
// Galactocentric frame: right-handed, origin at the Galactic centre, Sun at
// (-r0, 0, zsun), +y along Galactic rotation at the Sun, +z toward the north
// Galactic pole. Positions in kpc, velocities in km/s.

#ifndef GSTAMP_FRAMES_HPP_
#define GSTAMP_FRAMES_HPP_

#include <array>
#include <string>
#include <vector>

#include "gstamp/catalog.hpp"
#include "gstamp/vec3.hpp"

namespace gstamp {

struct FrameParams {
  double r0_kpc = 8.3;
  double zsun_kpc = 0.02;
  Vec3 vsun_kms{11.1, 250.0, 7.3};
  double ngp_ra_deg = 192.85948;
  double ngp_dec_deg = 27.12825;
  double lncp_deg = 122.93192;

  friend bool operator==(const FrameParams&, const FrameParams&) = default;
};

/// Throws InvariantViolation when r0 <= 0, |zsun| >= 0.2 or a value is not
/// finite.
void check_frame(const FrameParams& fp);

/// "key = value" lines describing the active constants, for CSV headers.
std::vector<std::string> describe_frame(const FrameParams& fp);

struct PhaseState {
  Vec3 pos;  // kpc
  Vec3 vel;  // km/s
};

struct Galactic {
  double l_deg = 0.0;
  double b_deg = 0.0;
};

struct Equatorial {
  double ra_deg = 0.0;
  double dec_deg = 0.0;
};

/// Rotation taking equatorial unit vectors to Galactic ones.
struct FrameRotation {
  std::array<Vec3, 3> rows;  // Galactic x, y, z axes expressed in equatorial coordinates

  static FrameRotation from(const FrameParams& fp);
  Vec3 to_galactic(const Vec3& eq) const;
  Vec3 to_equatorial(const Vec3& gal) const;
};

Galactic equatorial_to_galactic(double ra_deg, double dec_deg, const FrameParams& fp);
Equatorial galactic_to_equatorial(double l_deg, double b_deg, const FrameParams& fp);

Vec3 sun_position(const FrameParams& fp);

PhaseState to_galactocentric(const ClusterRecord& rec, const FrameParams& fp);

/// Observables of a galactocentric state as seen from the Sun. The name,
/// distance error, magnitude and metallicity are copied from `base`.
/// Throws DegenerateDirection when the state sits on the Sun.
ClusterRecord from_galactocentric(const PhaseState& st, const FrameParams& fp, const ClusterRecord& base = {});

/// Galactocentric states of every record, in catalog order.
std::vector<PhaseState> galactocentric_states(const Catalog& cat, const FrameParams& fp);

}  // namespace gstamp

#endif  // GSTAMP_FRAMES_HPP_
