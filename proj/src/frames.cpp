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

#include "gstamp/frames.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gstamp/error.hpp"
#include "gstamp/textio.hpp"
#include "gstamp/units.hpp"

namespace gstamp {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

Vec3 unit_vector(double lon_deg, double lat_deg) {
  const double lon = lon_deg * kDeg;
  const double lat = lat_deg * kDeg;
  return {std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat)};
}

double wrap_degrees(double deg) {
  double w = std::fmod(deg, 360.0);
  if (w < 0.0) w += 360.0;
  if (w >= 360.0) w = 0.0;
  return w;
}

void to_angles(const Vec3& u, double& lon_deg, double& lat_deg) {
  lat_deg = std::atan2(u.z, std::hypot(u.x, u.y)) / kDeg;
  lon_deg = wrap_degrees(std::atan2(u.y, u.x) / kDeg);
}

// Local east (increasing longitude) and north unit vectors at (lon, lat).
void local_basis(double lon_deg, double lat_deg, Vec3& east, Vec3& north) {
  const double lon = lon_deg * kDeg;
  const double lat = lat_deg * kDeg;
  east = {-std::sin(lon), std::cos(lon), 0.0};
  north = {-std::sin(lat) * std::cos(lon), -std::sin(lat) * std::sin(lon), std::cos(lat)};
}

}  // namespace

void check_frame(const FrameParams& fp) {
  const double values[] = {fp.r0_kpc, fp.zsun_kpc, fp.vsun_kms.x, fp.vsun_kms.y, fp.vsun_kms.z,
                           fp.ngp_ra_deg, fp.ngp_dec_deg, fp.lncp_deg};
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvariantViolation, "frame parameter is not finite");
  }
  if (fp.r0_kpc <= 0.0) throw Error(ErrorCode::InvariantViolation, "r0_kpc must be positive");
  if (std::abs(fp.zsun_kpc) >= 0.2) throw Error(ErrorCode::InvariantViolation, "|zsun_kpc| must be below 0.2");
  if (fp.ngp_dec_deg < -90.0 || fp.ngp_dec_deg > 90.0) {
    throw Error(ErrorCode::InvariantViolation, "ngp_dec_deg outside [-90, 90]");
  }
}

std::vector<std::string> describe_frame(const FrameParams& fp) {
  return {
      "frame.r0_kpc = " + format_double(fp.r0_kpc),
      "frame.zsun_kpc = " + format_double(fp.zsun_kpc),
      "frame.vsun_kms = " + format_double(fp.vsun_kms.x) + " " + format_double(fp.vsun_kms.y) + " " +
          format_double(fp.vsun_kms.z),
      "frame.ngp_ra_deg = " + format_double(fp.ngp_ra_deg),
      "frame.ngp_dec_deg = " + format_double(fp.ngp_dec_deg),
      "frame.lncp_deg = " + format_double(fp.lncp_deg),
  };
}

FrameRotation FrameRotation::from(const FrameParams& fp) {
  // Galactic z is the NGP. The NCP projects onto the Galactic plane along
  // longitude lncp, which pins the in-plane axes.
  const Vec3 z = unit_vector(fp.ngp_ra_deg, fp.ngp_dec_deg);
  const Vec3 ncp{0.0, 0.0, 1.0};
  Vec3 toward_ncp = ncp - dot(ncp, z) * z;
  toward_ncp *= 1.0 / norm(toward_ncp);
  const Vec3 ahead = cross(z, toward_ncp);
  const double c = std::cos(fp.lncp_deg * kDeg);
  const double s = std::sin(fp.lncp_deg * kDeg);
  const Vec3 x = c * toward_ncp - s * ahead;
  const Vec3 y = s * toward_ncp + c * ahead;
  return FrameRotation{{x, y, z}};
}

Vec3 FrameRotation::to_galactic(const Vec3& eq) const {
  return {dot(rows[0], eq), dot(rows[1], eq), dot(rows[2], eq)};
}

Vec3 FrameRotation::to_equatorial(const Vec3& gal) const {
  return rows[0] * gal.x + rows[1] * gal.y + rows[2] * gal.z;
}

Galactic equatorial_to_galactic(double ra_deg, double dec_deg, const FrameParams& fp) {
  const Vec3 g = FrameRotation::from(fp).to_galactic(unit_vector(ra_deg, dec_deg));
  Galactic out;
  to_angles(g, out.l_deg, out.b_deg);
  return out;
}

Equatorial galactic_to_equatorial(double l_deg, double b_deg, const FrameParams& fp) {
  const Vec3 e = FrameRotation::from(fp).to_equatorial(unit_vector(l_deg, b_deg));
  Equatorial out;
  to_angles(e, out.ra_deg, out.dec_deg);
  return out;
}

Vec3 sun_position(const FrameParams& fp) { return {-fp.r0_kpc, 0.0, fp.zsun_kpc}; }

namespace {

PhaseState to_galactocentric(const ClusterRecord& rec, const FrameParams& fp, const FrameRotation& rot) {
  const Vec3 u = unit_vector(rec.ra_deg, rec.dec_deg);
  Vec3 east, north;
  local_basis(rec.ra_deg, rec.dec_deg, east, north);
  const double kd = units::kTangentialVelocityFactor * rec.dist_kpc;
  const Vec3 v_eq = rec.rv_kms * u + kd * rec.pmra_masyr * east + kd * rec.pmdec_masyr * north;
  return {rot.to_galactic(rec.dist_kpc * u) + sun_position(fp), rot.to_galactic(v_eq) + fp.vsun_kms};
}

}  // namespace

PhaseState to_galactocentric(const ClusterRecord& rec, const FrameParams& fp) {
  return to_galactocentric(rec, fp, FrameRotation::from(fp));
}

ClusterRecord from_galactocentric(const PhaseState& st, const FrameParams& fp, const ClusterRecord& base) {
  const Vec3 rel = st.pos - sun_position(fp);
  const double dist = norm(rel);
  if (!(dist >= 1e-9)) throw Error(ErrorCode::DegenerateDirection, "state coincides with the Sun");
  const FrameRotation rot = FrameRotation::from(fp);
  const Vec3 u = rot.to_equatorial(rel * (1.0 / dist));
  const Vec3 v_eq = rot.to_equatorial(st.vel - fp.vsun_kms);

  ClusterRecord rec = base;
  to_angles(u, rec.ra_deg, rec.dec_deg);
  Vec3 east, north;
  local_basis(rec.ra_deg, rec.dec_deg, east, north);
  const double kd = units::kTangentialVelocityFactor * dist;
  rec.dist_kpc = dist;
  rec.rv_kms = dot(v_eq, u);
  rec.pmra_masyr = dot(v_eq, east) / kd;
  rec.pmdec_masyr = dot(v_eq, north) / kd;
  return rec;
}

std::vector<PhaseState> galactocentric_states(const Catalog& cat, const FrameParams& fp) {
  const FrameRotation rot = FrameRotation::from(fp);
  std::vector<PhaseState> out;
  out.reserve(cat.records.size());
  for (const auto& rec : cat.records) out.push_back(to_galactocentric(rec, fp, rot));
  return out;
}

}  // namespace gstamp
