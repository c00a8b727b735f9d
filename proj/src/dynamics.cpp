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

#include "gstamp/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "gstamp/error.hpp"
#include "gstamp/textio.hpp"
#include "gstamp/units.hpp"

namespace gstamp {

namespace {

constexpr double kKpcPerMyr = units::kKpcPerMyrPerKms;

// grad(potential) in (km/s)^2 per kpc.
Vec3 gradient(const Vec3& p, const PotentialParams& pp) {
  const double r2 = dot(p, p);
  const double big_r2 = p.x * p.x + p.y * p.y;

  const double sb2 = r2 + pp.bulge.softening_kpc * pp.bulge.softening_kpc;
  const double gb = pp.bulge.gm / (sb2 * std::sqrt(sb2));

  const double zb = std::sqrt(p.z * p.z + pp.disk.b_kpc * pp.disk.b_kpc);
  const double az = pp.disk.a_kpc + zb;
  const double sd2 = big_r2 + az * az;
  const double gd = pp.disk.gm / (sd2 * std::sqrt(sd2));

  const double gh = pp.halo.v_halo_kms * pp.halo.v_halo_kms / (r2 + pp.halo.core_kpc * pp.halo.core_kpc);

  const double radial = gb + gh;
  return {(radial + gd) * p.x, (radial + gd) * p.y, radial * p.z + gd * p.z * az / zb};
}

}  // namespace

void check_potential(const PotentialParams& pp, double r0_kpc) {
  const double scales[] = {pp.bulge.gm,         pp.bulge.softening_kpc, pp.disk.gm,        pp.disk.a_kpc,
                           pp.disk.b_kpc,       pp.halo.v_halo_kms,     pp.halo.core_kpc, pp.vcirc_target_kms};
  for (double s : scales) {
    if (!std::isfinite(s) || s <= 0.0) throw Error(ErrorCode::InvariantViolation, "potential scales must be positive");
  }
  const double vc = circular_velocity(r0_kpc, pp);
  if (std::abs(vc - pp.vcirc_target_kms) > 5.0) {
    throw Error(ErrorCode::InvariantViolation, "circular velocity at r0 is " + format_fixed(vc, 2) +
                                                   " km/s, more than 5 km/s from the target " +
                                                   format_double(pp.vcirc_target_kms));
  }
}

std::vector<std::string> describe_potential(const PotentialParams& pp) {
  return {
      "potential.bulge_gm = " + format_double(pp.bulge.gm),
      "potential.bulge_softening_kpc = " + format_double(pp.bulge.softening_kpc),
      "potential.disk_gm = " + format_double(pp.disk.gm),
      "potential.disk_a_kpc = " + format_double(pp.disk.a_kpc),
      "potential.disk_b_kpc = " + format_double(pp.disk.b_kpc),
      "potential.halo_v_kms = " + format_double(pp.halo.v_halo_kms),
      "potential.halo_core_kpc = " + format_double(pp.halo.core_kpc),
      "potential.vcirc_target_kms = " + format_double(pp.vcirc_target_kms),
  };
}

double potential_value(const Vec3& p, const PotentialParams& pp) {
  const double r2 = dot(p, p);
  const double bulge = -pp.bulge.gm / std::sqrt(r2 + pp.bulge.softening_kpc * pp.bulge.softening_kpc);
  const double az = pp.disk.a_kpc + std::sqrt(p.z * p.z + pp.disk.b_kpc * pp.disk.b_kpc);
  const double disk = -pp.disk.gm / std::sqrt(p.x * p.x + p.y * p.y + az * az);
  const double halo = 0.5 * pp.halo.v_halo_kms * pp.halo.v_halo_kms *
                      std::log((r2 + pp.halo.core_kpc * pp.halo.core_kpc) / (kHaloZeroRadiusKpc * kHaloZeroRadiusKpc));
  return bulge + disk + halo;
}

Vec3 acceleration(const Vec3& pos, const PotentialParams& pp) { return gradient(pos, pp) * -kKpcPerMyr; }

double circular_velocity(double r_kpc, const PotentialParams& pp) {
  if (!(r_kpc > 0.0)) throw Error(ErrorCode::BadRadius, "r = " + format_double(r_kpc));
  const Vec3 g = gradient({r_kpc, 0.0, 0.0}, pp);
  return std::sqrt(r_kpc * std::abs(g.x));
}

double specific_energy(const PhaseState& st, const PotentialParams& pp) {
  return 0.5 * dot(st.vel, st.vel) + potential_value(st.pos, pp);
}

Scheme parse_scheme(std::string_view name) {
  if (name == "leapfrog") return Scheme::Leapfrog;
  if (name == "rk4") return Scheme::Rk4;
  throw Error(ErrorCode::InvariantViolation, "unknown integrator scheme '" + std::string(name) + "'");
}

std::string_view scheme_name(Scheme scheme) { return scheme == Scheme::Leapfrog ? "leapfrog" : "rk4"; }

double Trajectory::relative_energy_drift() const {
  if (energy_kms2.empty()) return 0.0;
  return std::abs(energy_kms2.back() - energy_kms2.front()) / std::abs(energy_kms2.front());
}

double Trajectory::max_relative_energy_error() const {
  double worst = 0.0;
  for (double e : energy_kms2) worst = std::max(worst, std::abs(e - energy_kms2.front()));
  return energy_kms2.empty() ? 0.0 : worst / std::abs(energy_kms2.front());
}

namespace {

// Kick-drift-kick leapfrog; `accel` holds a(x) on entry and exit.
void leapfrog_step(PhaseState& s, Vec3& accel, double h, const PotentialParams& pp) {
  s.vel += accel * (0.5 * h);
  s.pos += s.vel * (h * kKpcPerMyr);
  accel = acceleration(s.pos, pp);
  s.vel += accel * (0.5 * h);
}

void rk4_step(PhaseState& s, double h, const PotentialParams& pp) {
  auto deriv = [&](const PhaseState& x) { return PhaseState{x.vel * kKpcPerMyr, acceleration(x.pos, pp)}; };
  auto shifted = [](const PhaseState& x, const PhaseState& d, double f) {
    return PhaseState{x.pos + d.pos * f, x.vel + d.vel * f};
  };
  const PhaseState k1 = deriv(s);
  const PhaseState k2 = deriv(shifted(s, k1, 0.5 * h));
  const PhaseState k3 = deriv(shifted(s, k2, 0.5 * h));
  const PhaseState k4 = deriv(shifted(s, k3, h));
  s.pos += (k1.pos + 2.0 * k2.pos + 2.0 * k3.pos + k4.pos) * (h / 6.0);
  s.vel += (k1.vel + 2.0 * k2.vel + 2.0 * k3.vel + k4.vel) * (h / 6.0);
}

template <typename Visit>
void integrate(const PhaseState& start, const PotentialParams& pp, double dt, double t_end, Scheme scheme,
               Visit&& visit) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::InvariantViolation, "dt_myr must be positive");
  if (!(t_end >= dt) || !std::isfinite(t_end)) throw Error(ErrorCode::InvariantViolation, "t_end_myr must be >= dt_myr");
  const double ratio = t_end / dt;
  auto steps = static_cast<std::size_t>(std::llround(ratio));
  if (std::abs(ratio - static_cast<double>(steps)) > 1e-9 * ratio) steps = static_cast<std::size_t>(std::ceil(ratio));

  PhaseState s = start;
  Vec3 accel = acceleration(s.pos, pp);
  visit(0.0, s);
  for (std::size_t i = 1; i <= steps; ++i) {
    const double t_prev = static_cast<double>(i - 1) * dt;
    const double t = i == steps ? t_end : static_cast<double>(i) * dt;
    const double h = t - t_prev;
    if (scheme == Scheme::Leapfrog) {
      leapfrog_step(s, accel, h, pp);
    } else {
      rk4_step(s, h, pp);
    }
    if (!is_finite(s.pos) || !is_finite(s.vel)) throw Error(ErrorCode::NonFinite, "step " + std::to_string(i));
    visit(t, s);
  }
}

}  // namespace

Trajectory integrate_orbit(const PhaseState& start, const PotentialParams& pp, double dt_myr, double t_end_myr,
                           Scheme scheme) {
  Trajectory traj;
  integrate(start, pp, dt_myr, t_end_myr, scheme, [&](double t, const PhaseState& s) {
    traj.times_myr.push_back(t);
    traj.states.push_back(s);
    traj.energy_kms2.push_back(specific_energy(s, pp));
  });
  return traj;
}

PhaseState advance_orbit(const PhaseState& start, const PotentialParams& pp, double dt_myr, double t_end_myr,
                         Scheme scheme) {
  PhaseState last = start;
  integrate(start, pp, dt_myr, t_end_myr, scheme, [&](double, const PhaseState& s) { last = s; });
  return last;
}

VelocityHistogram velocity_distribution(const Catalog& cat, const FrameParams& fp, std::size_t bins,
                                        double v_max_kms) {
  if (cat.records.empty()) throw Error(ErrorCode::EmptyCatalog, "velocity distribution needs records");
  if (bins == 0 || !(v_max_kms > 0.0)) throw Error(ErrorCode::InvariantViolation, "bins and v_max must be positive");

  VelocityHistogram h;
  h.edges_kms.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) h.edges_kms[i] = v_max_kms * static_cast<double>(i) / static_cast<double>(bins);
  h.total_counts.assign(bins, 0);
  h.tangential_counts.assign(bins, 0);

  auto bin_of = [&](double v) {
    const auto b = static_cast<std::size_t>(std::floor(v / v_max_kms * static_cast<double>(bins)));
    return std::min(b, bins - 1);
  };

  const Vec3 sun = sun_position(fp);
  for (const PhaseState& st : galactocentric_states(cat, fp)) {
    const double speed = norm(st.vel);
    Vec3 los = st.pos - sun;
    los *= 1.0 / norm(los);
    const double tangential = norm(st.vel - los * dot(st.vel, los));
    h.speeds_kms.push_back(speed);
    h.tangential_kms.push_back(tangential);
    ++h.total_counts[bin_of(speed)];
    ++h.tangential_counts[bin_of(tangential)];
  }
  return h;
}

}  // namespace gstamp
