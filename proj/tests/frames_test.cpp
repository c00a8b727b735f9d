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

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "gstamp/catalog.hpp"
#include "gstamp/frames.hpp"
#include "gstamp/rng.hpp"
#include "support.hpp"

namespace gstamp {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Angle between two sky positions, degrees.
double separation_deg(double lon1, double lat1, double lon2, double lat2) {
  const double a1 = lon1 * kDeg, b1 = lat1 * kDeg, a2 = lon2 * kDeg, b2 = lat2 * kDeg;
  const double x = std::cos(b1) * std::cos(b2) * std::sin(a1 - a2);
  const double y = std::cos(b2) * std::sin(b1) - std::sin(b2) * std::cos(b1) * std::cos(a1 - a2);
  const double z = std::sin(b1) * std::sin(b2) + std::cos(b1) * std::cos(b2) * std::cos(a1 - a2);
  return std::atan2(std::hypot(x, y), z) / kDeg;
}

// Textbook spherical-trigonometry conversion, written independently of the
// rotation-matrix implementation.
Galactic oracle_galactic(double ra, double dec, const FrameParams& fp) {
  const double a = ra * kDeg, d = dec * kDeg;
  const double ag = fp.ngp_ra_deg * kDeg, dg = fp.ngp_dec_deg * kDeg;
  const double sin_b = std::sin(d) * std::sin(dg) + std::cos(d) * std::cos(dg) * std::cos(a - ag);
  const double y = std::cos(d) * std::sin(a - ag);
  const double x = std::sin(d) * std::cos(dg) - std::cos(d) * std::sin(dg) * std::cos(a - ag);
  double l = fp.lncp_deg - std::atan2(y, x) / kDeg;
  l = std::fmod(l + 720.0, 360.0);
  return {l, std::asin(sin_b) / kDeg};
}

double max_abs(const Vec3& v) { return std::max({std::abs(v.x), std::abs(v.y), std::abs(v.z)}); }

TEST_CASE("north galactic pole") {
  const FrameParams fp;
  const Galactic g = equatorial_to_galactic(fp.ngp_ra_deg, fp.ngp_dec_deg, fp);
  CHECK(g.b_deg == doctest::Approx(90.0).epsilon(1e-12));
  const Equatorial e = galactic_to_equatorial(0.0, 90.0, fp);
  CHECK(separation_deg(e.ra_deg, e.dec_deg, fp.ngp_ra_deg, fp.ngp_dec_deg) < 1e-9);
}

TEST_CASE("galactic centre direction") {
  const FrameParams fp;
  const Galactic g = equatorial_to_galactic(266.4050, -28.9362, fp);
  CHECK(separation_deg(g.l_deg, g.b_deg, 0.0, 0.0) < 0.01);
  const Galactic o = oracle_galactic(266.4050, -28.9362, fp);
  CHECK(separation_deg(g.l_deg, g.b_deg, o.l_deg, o.b_deg) < 1e-9);

  const Equatorial e = galactic_to_equatorial(g.l_deg, g.b_deg, fp);
  CHECK(separation_deg(e.ra_deg, e.dec_deg, 266.4050, -28.9362) < 1e-9);
}

TEST_CASE("rotation agrees with the spherical-trig oracle") {
  const FrameParams fp;
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const double ra = rng.uniform(0.0, 360.0);
    const double dec = std::asin(rng.uniform(-1.0, 1.0)) / kDeg;
    const Galactic g = equatorial_to_galactic(ra, dec, fp);
    const Galactic o = oracle_galactic(ra, dec, fp);
    CHECK(separation_deg(g.l_deg, g.b_deg, o.l_deg, o.b_deg) < 1e-9);
  }
}

TEST_CASE("round trip of 1000 random directions") {
  const FrameParams fp;
  Rng rng(5);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double ra = rng.uniform(0.0, 360.0);
    const double dec = std::asin(rng.uniform(-1.0, 1.0)) / kDeg;
    const Galactic g = equatorial_to_galactic(ra, dec, fp);
    CHECK(g.l_deg >= 0.0);
    CHECK(g.l_deg < 360.0);
    const Equatorial e = galactic_to_equatorial(g.l_deg, g.b_deg, fp);
    CHECK(e.ra_deg >= 0.0);
    CHECK(e.ra_deg < 360.0);
    worst = std::max(worst, separation_deg(e.ra_deg, e.dec_deg, ra, dec));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("frame is right-handed with the Sun on -x") {
  const FrameParams fp;
  const FrameRotation rot = FrameRotation::from(fp);
  CHECK(max_abs(cross(rot.rows[0], rot.rows[1]) - rot.rows[2]) < 1e-14);
  for (const auto& row : rot.rows) CHECK(norm(row) == doctest::Approx(1.0).epsilon(1e-14));

  CHECK(sun_position(fp).x == -fp.r0_kpc);
  CHECK(sun_position(fp).z == fp.zsun_kpc);

  // A cluster 8.3 kpc toward l = 0 sits near the centre; l = 90 points along +y.
  const Equatorial gc = galactic_to_equatorial(0.0, 0.0, fp);
  ClusterRecord rec;
  rec.ra_deg = gc.ra_deg;
  rec.dec_deg = gc.dec_deg;
  rec.dist_kpc = fp.r0_kpc;
  CHECK(max_abs(to_galactocentric(rec, fp).pos - Vec3{0.0, 0.0, fp.zsun_kpc}) < 1e-9);

  const Equatorial ahead = galactic_to_equatorial(90.0, 0.0, fp);
  rec.ra_deg = ahead.ra_deg;
  rec.dec_deg = ahead.dec_deg;
  rec.dist_kpc = 1.0;
  CHECK(max_abs(to_galactocentric(rec, fp).pos - Vec3{-fp.r0_kpc, 1.0, fp.zsun_kpc}) < 1e-9);
}

TEST_CASE("rotation preserves norms") {
  const FrameRotation rot = FrameRotation::from(FrameParams{});
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const Vec3 v{rng.uniform(-100, 100), rng.uniform(-100, 100), rng.uniform(-100, 100)};
    CHECK(norm(rot.to_galactic(v)) == doctest::Approx(norm(v)).epsilon(1e-12));
    CHECK(norm(rot.to_equatorial(v)) == doctest::Approx(norm(v)).epsilon(1e-12));
  }
}

TEST_CASE("near-zero distance lands on the Sun") {
  const FrameParams fp;
  ClusterRecord rec;
  rec.ra_deg = 123.0;
  rec.dec_deg = 45.0;
  rec.dist_kpc = 1e-12;
  rec.pmra_masyr = 0.0;
  rec.pmdec_masyr = 0.0;
  rec.rv_kms = 0.0;
  const PhaseState st = to_galactocentric(rec, fp);
  CHECK(max_abs(st.pos - sun_position(fp)) < 1e-11);
  CHECK(max_abs(st.vel - fp.vsun_kms) < 1e-12);
}

TEST_CASE("1 mas/yr at 1 kpc is 4.74047 km/s") {
  // 1 AU per Julian year, computed from the defining constants.
  const double k_oracle = 1.495978707e8 / (365.25 * 86400.0);
  CHECK(k_oracle == doctest::Approx(4.74047).epsilon(1e-6));
  const FrameParams fp;
  ClusterRecord rec;
  rec.ra_deg = 40.0;
  rec.dec_deg = -10.0;
  rec.dist_kpc = 1.0;
  rec.pmra_masyr = 1.0;
  rec.pmdec_masyr = 0.0;
  rec.rv_kms = 0.0;
  CHECK(norm(to_galactocentric(rec, fp).vel - fp.vsun_kms) == doctest::Approx(k_oracle).epsilon(1e-12));
  rec.pmra_masyr = 0.0;
  rec.pmdec_masyr = 1.0;
  CHECK(norm(to_galactocentric(rec, fp).vel - fp.vsun_kms) == doctest::Approx(k_oracle).epsilon(1e-12));
}

TEST_CASE("velocity transform is affine") {
  const FrameParams fp;
  const Catalog cat = synth_catalog(9, 20);
  for (ClusterRecord rec : cat.records) {
    const Vec3 v1 = to_galactocentric(rec, fp).vel - fp.vsun_kms;
    rec.pmra_masyr *= 2.0;
    rec.pmdec_masyr *= 2.0;
    rec.rv_kms *= 2.0;
    const Vec3 v2 = to_galactocentric(rec, fp).vel - fp.vsun_kms;
    CHECK(max_abs(v2 - v1 * 2.0) < 1e-10 * norm(v1));
  }
}

TEST_CASE("reference snapshot states are finite and slower than 1000 km/s") {
  const auto states = galactocentric_states(load_reference_snapshot(), FrameParams{});
  REQUIRE(states.size() == 164);
  for (const auto& st : states) {
    CHECK(is_finite(st.pos));
    CHECK(is_finite(st.vel));
    CHECK(norm(st.vel) < 1000.0);
  }
}

TEST_CASE("from_galactocentric inverts to_galactocentric") {
  const FrameParams fp;
  const Catalog cat = load_reference_snapshot();
  double worst = 0.0;
  for (const auto& rec : cat.records) {
    const PhaseState st = to_galactocentric(rec, fp);
    const ClusterRecord back = from_galactocentric(st, fp, rec);
    const PhaseState again = to_galactocentric(back, fp);
    worst = std::max(worst, norm(again.pos - st.pos) / norm(st.pos));
    worst = std::max(worst, norm(again.vel - st.vel) / norm(st.vel));
    CHECK(back.name == rec.name);
    CHECK(back.mv_abs == rec.mv_abs);
    CHECK(back.dist_kpc == doctest::Approx(rec.dist_kpc).epsilon(1e-12));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("state at the Sun has no direction") {
  const FrameParams fp;
  CHECK(testing::error_of([&] { from_galactocentric({sun_position(fp), {}}, fp); }) == ErrorCode::DegenerateDirection);
}

TEST_CASE("radial velocity of a resting cluster is the solar reflex") {
  const FrameParams fp;
  // 10 kpc from the Sun along +x, at rest: the line of sight is +x, so
  // rv = (-vsun) . x_hat.
  const PhaseState st{sun_position(fp) + Vec3{10.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
  const ClusterRecord rec = from_galactocentric(st, fp);
  CHECK(rec.rv_kms == doctest::Approx(-fp.vsun_kms.x).epsilon(1e-12));
  CHECK(rec.dist_kpc == doctest::Approx(10.0).epsilon(1e-14));
  const Galactic g = equatorial_to_galactic(rec.ra_deg, rec.dec_deg, fp);
  CHECK(separation_deg(g.l_deg, g.b_deg, 0.0, 0.0) < 1e-9);
}

TEST_CASE("check_frame") {
  FrameParams fp;
  CHECK_NOTHROW(check_frame(fp));
  fp.r0_kpc = -1.0;
  CHECK(testing::error_of([&] { check_frame(fp); }) == ErrorCode::InvariantViolation);
  fp = {};
  fp.zsun_kpc = 0.3;
  CHECK(testing::error_of([&] { check_frame(fp); }) == ErrorCode::InvariantViolation);
  fp = {};
  fp.vsun_kms.y = std::nan("");
  CHECK(testing::error_of([&] { check_frame(fp); }) == ErrorCode::InvariantViolation);
}

}  // namespace
}  // namespace gstamp
