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
#include "gstamp/dynamics.hpp"
#include "gstamp/rng.hpp"
#include "support.hpp"

namespace gstamp {
namespace {

using testing::error_of;

// 1 km/s in kpc/Myr from the defining constants.
constexpr double kKmsToKpcMyr = 365.25 * 86400.0 * 1e6 / 3.0856775814913673e16;

// Second, independent transcription of the three potential terms.
double oracle_potential(double x, double y, double z, const PotentialParams& pp) {
  const double r2 = x * x + y * y + z * z;
  const double bulge = -pp.bulge.gm / std::sqrt(r2 + std::pow(pp.bulge.softening_kpc, 2));
  const double zs = pp.disk.a_kpc + std::sqrt(z * z + std::pow(pp.disk.b_kpc, 2));
  const double disk = -pp.disk.gm / std::sqrt(x * x + y * y + zs * zs);
  const double halo =
      std::pow(pp.halo.v_halo_kms, 2) / 2.0 * std::log((r2 + std::pow(pp.halo.core_kpc, 2)) / (200.0 * 200.0));
  return bulge + disk + halo;
}

PotentialParams bulge_only() {
  PotentialParams pp;
  pp.disk.gm = 0.0;
  pp.halo.v_halo_kms = 0.0;
  return pp;
}

TEST_CASE("potential closed forms") {
  const PotentialParams pp;
  CHECK(std::isfinite(potential_value({0, 0, 0}, pp)));

  const PotentialParams b = bulge_only();
  const double s = b.bulge.softening_kpc;
  CHECK(potential_value({s, 0, 0}, b) == doctest::Approx(-b.bulge.gm / (s * std::sqrt(2.0))).epsilon(1e-14));
  CHECK(potential_value({0, 0, s}, b) == doctest::Approx(-b.bulge.gm / (s * std::sqrt(2.0))).epsilon(1e-14));

  CHECK(potential_value({-8.3, 0, 0}, pp) == doctest::Approx(oracle_potential(-8.3, 0, 0, pp)).epsilon(1e-14));
  CHECK(potential_value({3, -4, 1.5}, pp) == doctest::Approx(oracle_potential(3, -4, 1.5, pp)).epsilon(1e-14));
}

TEST_CASE("acceleration matches finite differences of the potential") {
  const PotentialParams pp;
  const double h = 1e-4;
  Rng rng(2024);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Vec3 p{rng.uniform(-30, 30), rng.uniform(-30, 30), rng.uniform(-10, 10)};
    auto phi = [&](const Vec3& q) { return oracle_potential(q.x, q.y, q.z, pp); };
    const Vec3 grad{(phi(p + Vec3{h, 0, 0}) - phi(p - Vec3{h, 0, 0})) / (2 * h),
                    (phi(p + Vec3{0, h, 0}) - phi(p - Vec3{0, h, 0})) / (2 * h),
                    (phi(p + Vec3{0, 0, h}) - phi(p - Vec3{0, 0, h})) / (2 * h)};
    const Vec3 expected = grad * -kKmsToKpcMyr;
    worst = std::max(worst, norm(acceleration(p, pp) - expected) / norm(expected));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("acceleration symmetry and sign") {
  const PotentialParams pp;
  const Vec3 a0 = acceleration({0, 0, 0}, pp);
  CHECK(a0.x == 0.0);
  CHECK(a0.y == 0.0);
  CHECK(a0.z == 0.0);
  const Vec3 a = acceleration({-50, 0, 0}, pp);
  CHECK(a.x > 0.0);
  CHECK(std::abs(a.y) < 1e-15);
  CHECK(std::abs(a.z) < 1e-15);
}

TEST_CASE("circular velocity") {
  const PotentialParams pp;
  CHECK(circular_velocity(8.3, pp) == doctest::Approx(240.0).epsilon(5.0 / 240.0));
  CHECK_NOTHROW(check_potential(pp, 8.3));

  PotentialParams halo = pp;
  halo.bulge.gm = 0.0;
  halo.disk.gm = 0.0;
  CHECK(circular_velocity(1e5, halo) == doctest::Approx(halo.halo.v_halo_kms).epsilon(1e-6));

  CHECK(error_of([&] { circular_velocity(0.0, pp); }) == ErrorCode::BadRadius);
  CHECK(error_of([&] { circular_velocity(-1.0, pp); }) == ErrorCode::BadRadius);
}

TEST_CASE("check_potential rejects an uncalibrated model") {
  PotentialParams pp;
  pp.halo.v_halo_kms = 100.0;
  CHECK(error_of([&] { check_potential(pp, 8.3); }) == ErrorCode::InvariantViolation);
  pp = {};
  pp.disk.b_kpc = 0.0;
  CHECK(error_of([&] { check_potential(pp, 8.3); }) == ErrorCode::InvariantViolation);
}

TEST_CASE("circular orbit keeps its radius") {
  const PotentialParams pp;
  const double r = 8.3;
  const double vc = circular_velocity(r, pp);
  const double period = 2.0 * std::numbers::pi * r / (vc * kKmsToKpcMyr);
  const Trajectory t = integrate_orbit({{r, 0, 0}, {0, vc, 0}}, pp, 0.1, 10.0 * period, Scheme::Leapfrog);
  double worst = 0.0;
  for (const auto& st : t.states) worst = std::max(worst, std::abs(norm(st.pos) - r) / r);
  CHECK(worst < 1e-3);
  CHECK(t.relative_energy_drift() < 1e-6);
}

TEST_CASE("rest at the centre is a fixed point") {
  for (Scheme s : {Scheme::Leapfrog, Scheme::Rk4}) {
    const PhaseState end = advance_orbit({{0, 0, 0}, {0, 0, 0}}, PotentialParams{}, 0.1, 100.0, s);
    CHECK(norm(end.pos) == 0.0);
    CHECK(norm(end.vel) == 0.0);
  }
}

TEST_CASE("leapfrog and rk4 agree on an eccentric orbit") {
  const PotentialParams pp;
  const PhaseState start{{12.0, 0.0, 1.0}, {0.0, 140.0, 40.0}};
  const PhaseState a = advance_orbit(start, pp, 0.01, 1000.0, Scheme::Leapfrog);
  const PhaseState b = advance_orbit(start, pp, 0.01, 1000.0, Scheme::Rk4);
  CHECK(norm(a.pos - b.pos) < 0.05);
}

TEST_CASE("leapfrog is time reversible") {
  const PotentialParams pp;
  const PhaseState start{{-8.0, 3.0, 2.0}, {50.0, 180.0, -60.0}};
  const PhaseState mid = advance_orbit(start, pp, 0.1, 200.0, Scheme::Leapfrog);
  PhaseState back = advance_orbit({mid.pos, mid.vel * -1.0}, pp, 0.1, 200.0, Scheme::Leapfrog);
  CHECK(norm(back.pos - start.pos) < 1e-6);
  CHECK(norm(back.vel * -1.0 - start.vel) < 1e-6);
}

TEST_CASE("trajectory sampling") {
  const PotentialParams pp;
  const Trajectory t = integrate_orbit({{10, 0, 0}, {0, 200, 0}}, pp, 0.1, 0.25, Scheme::Rk4);
  REQUIRE(t.size() == 4);
  CHECK(t.times_myr[0] == 0.0);
  CHECK(t.times_myr[2] == doctest::Approx(0.2));
  CHECK(t.times_myr[3] == 0.25);
  CHECK(t.states.size() == t.energy_kms2.size());
  for (std::size_t i = 1; i < t.size(); ++i) CHECK(t.times_myr[i] > t.times_myr[i - 1]);

  const Trajectory whole = integrate_orbit({{10, 0, 0}, {0, 200, 0}}, pp, 0.1, 100.0, Scheme::Leapfrog);
  CHECK(whole.size() == 1001);
  CHECK(whole.times_myr.back() == 100.0);
}

TEST_CASE("integration errors") {
  const PotentialParams pp;
  const PhaseState st{{10, 0, 0}, {0, 200, 0}};
  CHECK(error_of([&] { integrate_orbit(st, pp, 0.0, 1.0, Scheme::Leapfrog); }) == ErrorCode::InvariantViolation);
  CHECK(error_of([&] { integrate_orbit(st, pp, 1.0, 0.5, Scheme::Leapfrog); }) == ErrorCode::InvariantViolation);
  const PhaseState bad{{std::nan(""), 0, 0}, {0, 0, 0}};
  CHECK(error_of([&] { integrate_orbit(bad, pp, 0.1, 1.0, Scheme::Leapfrog); }) == ErrorCode::NonFinite);
  CHECK(parse_scheme("rk4") == Scheme::Rk4);
  CHECK(error_of([] { parse_scheme("euler"); }) == ErrorCode::InvariantViolation);
}

TEST_CASE("velocity distribution") {
  const FrameParams fp;
  SUBCASE("single record") {
    Catalog cat = synth_catalog(1, 1);
    const VelocityHistogram h = velocity_distribution(cat, fp, 20);
    std::size_t nonzero = 0, total = 0;
    for (auto c : h.total_counts) {
      nonzero += c > 0;
      total += c;
    }
    CHECK(nonzero == 1);
    CHECK(total == 1);
  }
  SUBCASE("reference snapshot") {
    const VelocityHistogram h = velocity_distribution(load_reference_snapshot(), fp, 20, 1000.0);
    REQUIRE(h.edges_kms.size() == 21);
    CHECK(h.edges_kms.front() == 0.0);
    CHECK(h.edges_kms.back() == 1000.0);
    for (std::size_t i = 1; i < h.edges_kms.size(); ++i) {
      CHECK(h.edges_kms[i] - h.edges_kms[i - 1] == doctest::Approx(50.0));
    }
    std::size_t total = 0, tangential = 0;
    for (auto c : h.total_counts) total += c;
    for (auto c : h.tangential_counts) tangential += c;
    CHECK(total == 164);
    CHECK(tangential == 164);
    for (std::size_t i = 0; i < h.speeds_kms.size(); ++i) CHECK(h.tangential_kms[i] <= h.speeds_kms[i] + 1e-9);
  }
  SUBCASE("identical velocities fall in one bin") {
    // Every cluster moving with the Sun has galactocentric speed |vsun|.
    Catalog cat = synth_catalog(4, 30);
    for (auto& rec : cat.records) {
      rec.pmra_masyr = rec.pmdec_masyr = rec.rv_kms = 0.0;
    }
    const VelocityHistogram h = velocity_distribution(cat, fp, 20);
    const auto bin = static_cast<std::size_t>(norm(fp.vsun_kms) / 50.0);
    CHECK(h.total_counts[bin] == 30);
  }
  SUBCASE("empty catalog") {
    CHECK(error_of([&] { velocity_distribution(Catalog{}, fp, 20); }) == ErrorCode::EmptyCatalog);
  }
}

}  // namespace
}  // namespace gstamp
