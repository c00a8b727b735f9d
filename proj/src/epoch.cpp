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

#include "gstamp/epoch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gstamp/error.hpp"
#include "gstamp/textio.hpp"
#include "gstamp/units.hpp"

namespace gstamp {

double time_resolution(double dd_kpc, double v_kms) {
  if (!(v_kms > 0.0)) throw Error(ErrorCode::ZeroVelocity, "v = " + format_double(v_kms) + " km/s");
  if (!(dd_kpc >= 0.0) || !std::isfinite(dd_kpc)) {
    throw Error(ErrorCode::InvariantViolation, "dd = " + format_double(dd_kpc) + " kpc");
  }
  return dd_kpc / v_kms * units::kYearsPerKpcPerKms;
}

ResolutionCurve resolution_curves(const ResolutionGrid& grid) {
  if (grid.dd_kpc.empty() || grid.v_points == 0) throw Error(ErrorCode::EmptyGrid, "");
  for (std::size_t i = 0; i < grid.dd_kpc.size(); ++i) {
    if (!(grid.dd_kpc[i] > 0.0) || !std::isfinite(grid.dd_kpc[i]) || (i > 0 && grid.dd_kpc[i] <= grid.dd_kpc[i - 1])) {
      throw Error(ErrorCode::InvariantViolation, "dd cases must be positive and strictly increasing");
    }
  }
  if (!(grid.v_min_kms > 0.0) || !std::isfinite(grid.v_max_kms) ||
      (grid.v_points > 1 && !(grid.v_max_kms > grid.v_min_kms))) {
    throw Error(ErrorCode::InvariantViolation, "velocity range must satisfy 0 < v_min < v_max");
  }

  ResolutionCurve c;
  c.dd_kpc = grid.dd_kpc;
  for (std::size_t j = 0; j < grid.v_points; ++j) {
    const double frac = grid.v_points == 1 ? 0.0 : static_cast<double>(j) / static_cast<double>(grid.v_points - 1);
    c.v_kms.push_back(grid.v_min_kms + (grid.v_max_kms - grid.v_min_kms) * frac);
  }
  for (double dd : c.dd_kpc) {
    std::vector<double> row;
    for (double v : c.v_kms) row.push_back(time_resolution(dd, v));
    c.dt_yr.push_back(std::move(row));
  }
  return c;
}

std::string write_resolution_csv(const ResolutionCurve& curve, const std::vector<std::string>& comments) {
  std::string out;
  for (const auto& c : comments) out += "# " + c + "\n";
  out += "dd_kpc,v_kms,dt_yr\n";
  for (std::size_t i = 0; i < curve.dd_kpc.size(); ++i) {
    for (std::size_t j = 0; j < curve.v_kms.size(); ++j) {
      out += format_double(curve.dd_kpc[i]) + "," + format_double(curve.v_kms[j]) + "," +
             format_double(curve.dt_yr[i][j]) + "\n";
    }
  }
  return out;
}

ResolutionCurve parse_resolution_csv(std::string_view text) {
  ResolutionCurve c;
  bool header = false;
  std::size_t line_no = 0;
  for (auto raw : split_lines(text)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto cells = split(line, ',');
    if (!header) {
      const char* expected[] = {"dd_kpc", "v_kms", "dt_yr"};
      for (std::size_t i = 0; i < 3; ++i) {
        if (cells.size() <= i || trim(cells[i]) != expected[i]) throw Error(ErrorCode::MissingColumn, expected[i]);
      }
      header = true;
      continue;
    }
    if (cells.size() != 3) throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected 3 fields");
    double v[3];
    for (std::size_t i = 0; i < 3; ++i) {
      auto parsed = parse_double(cells[i]);
      if (!parsed) throw Error(ErrorCode::BadNumber, "line " + std::to_string(line_no) + ": '" + std::string(cells[i]) + "'");
      v[i] = *parsed;
    }
    if (c.dd_kpc.empty() || c.dd_kpc.back() != v[0]) {
      c.dd_kpc.push_back(v[0]);
      c.dt_yr.emplace_back();
    }
    auto& row = c.dt_yr.back();
    if (c.dt_yr.size() == 1) {
      c.v_kms.push_back(v[1]);
    } else if (row.size() >= c.v_kms.size() || c.v_kms[row.size()] != v[1]) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": grid is not rectangular");
    }
    row.push_back(v[2]);
  }
  if (!header) throw Error(ErrorCode::MissingColumn, "dd_kpc");
  for (const auto& row : c.dt_yr) {
    if (row.size() != c.v_kms.size()) throw Error(ErrorCode::ParseError, "grid is not rectangular");
  }
  return c;
}

PropagationMode parse_propagation_mode(std::string_view name) {
  if (name == "linear") return PropagationMode::Linear;
  if (name == "orbit") return PropagationMode::Orbit;
  throw Error(ErrorCode::InvariantViolation, "unknown propagation mode '" + std::string(name) + "'");
}

std::string_view propagation_mode_name(PropagationMode mode) {
  return mode == PropagationMode::Linear ? "linear" : "orbit";
}

namespace {

PhaseState move(const PhaseState& st, double dt_myr, PropagationMode mode, const OrbitSettings& orbit) {
  if (dt_myr == 0.0) return st;
  if (mode == PropagationMode::Linear) return {st.pos + st.vel * (dt_myr * units::kKpcPerMyrPerKms), st.vel};
  // Backwards in time is forwards with the velocity reversed.
  const double span = std::abs(dt_myr);
  const double sign = dt_myr < 0.0 ? -1.0 : 1.0;
  PhaseState end = advance_orbit({st.pos, st.vel * sign}, orbit.potential, std::min(orbit.step_myr, span), span,
                                 orbit.scheme);
  end.vel *= sign;
  return end;
}

}  // namespace

Catalog propagate_catalog(const Catalog& cat, const FrameParams& fp, double dt_myr, PropagationMode mode,
                          const OrbitSettings& orbit) {
  if (!std::isfinite(dt_myr)) throw Error(ErrorCode::NonFinite, "dt_myr");
  Catalog out = cat;
  out.epoch_jyear = cat.epoch_jyear + dt_myr * 1e6;
  const auto states = galactocentric_states(cat, fp);
  for (std::size_t i = 0; i < cat.size(); ++i) {
    const PhaseState moved = move(states[i], dt_myr, mode, orbit);
    if (!is_finite(moved.pos) || !is_finite(moved.vel)) throw Error(ErrorCode::NonFinite, cat.records[i].name);
    out.records[i] = from_galactocentric(moved, fp, cat.records[i]);
  }
  return out;
}

namespace {

struct DriftProblem {
  std::vector<Vec3> map_pos;
  std::vector<PhaseState> now;
};

DriftProblem drift_problem(const LocationMap& map, const Correspondence& corr, const Catalog& cat_now,
                           const FrameParams& fp) {
  DriftProblem p;
  for (const auto& [a, r] : corr.pairs) {
    if (a >= map.k() || r >= cat_now.size()) {
      throw Error(ErrorCode::InvariantViolation, "correspondence index out of range");
    }
    p.map_pos.push_back(map.anchors[a].pos_rel);
    p.now.push_back(to_galactocentric(cat_now.records[r], fp));
  }
  if (p.map_pos.empty()) throw Error(ErrorCode::MatchFailed, "empty correspondence");
  return p;
}

double residual(const DriftProblem& p, double dt_myr, const RecoverOptions& options) {
  const std::size_t n = p.map_pos.size();
  std::vector<Vec3> diff(n);
  Vec3 mean;
  for (std::size_t i = 0; i < n; ++i) {
    diff[i] = move(p.now[i], -dt_myr, options.mode, options.orbit).pos - p.map_pos[i];
    mean += diff[i];
  }
  mean *= 1.0 / static_cast<double>(n);
  double sum = 0.0;
  for (const auto& d : diff) sum += dot(d - mean, d - mean);
  return std::sqrt(sum / static_cast<double>(n));
}

void check_recover_options(const RecoverOptions& o) {
  if (!std::isfinite(o.window_lo_myr) || !std::isfinite(o.window_hi_myr) || !(o.window_hi_myr > o.window_lo_myr)) {
    throw Error(ErrorCode::InvariantViolation, "search window must satisfy lo < hi");
  }
  if (o.scan_samples < 3) throw Error(ErrorCode::InvariantViolation, "scan needs at least 3 samples");
  if (!(o.tolerance_myr > 0.0)) throw Error(ErrorCode::InvariantViolation, "tolerance must be positive");
}

}  // namespace

double drift_residual(const LocationMap& map, const Correspondence& corr, const Catalog& cat_now,
                      const FrameParams& fp, double dt_myr, const RecoverOptions& options) {
  return residual(drift_problem(map, corr, cat_now, fp), dt_myr, options);
}

EpochEstimate recover_epoch(const LocationMap& map, const Correspondence& corr, const Catalog& cat_now,
                            const FrameParams& fp, const RecoverOptions& options) {
  check_recover_options(options);
  const DriftProblem p = drift_problem(map, corr, cat_now, fp);
  auto f = [&](double t) { return residual(p, t, options); };

  EpochEstimate est;
  est.correspondence = corr;
  const std::size_t n = options.scan_samples;
  const double width = options.window_hi_myr - options.window_lo_myr;
  std::size_t best = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double t = options.window_lo_myr + width * static_cast<double>(j) / static_cast<double>(n - 1);
    est.scan_dt_myr.push_back(t);
    est.scan_residual_kpc.push_back(f(t));
    if (est.scan_residual_kpc[j] < est.scan_residual_kpc[best]) best = j;
  }
  if (best == 0 || best == n - 1) {
    throw Error(ErrorCode::WindowTooNarrow, "coarse minimum at " + format_double(est.scan_dt_myr[best]) + " Myr");
  }

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = est.scan_dt_myr[best - 1];
  double b = est.scan_dt_myr[best + 1];
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > options.tolerance_myr) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  est.dt_myr = 0.5 * (a + b);
  est.residual_kpc = f(est.dt_myr);

  std::vector<std::size_t> records;
  for (const auto& pr : corr.pairs) records.push_back(pr.second);
  est.bound_myr = epoch_error_bound(cat_now, fp, records) / 1e6;
  return est;
}

EpochEstimate recover_epoch(const LocationMap& map, const Catalog& cat_now, const FrameParams& fp,
                            const RecoverOptions& options) {
  check_recover_options(options);
  Correspondence corr;
  try {
    corr = match_anchors(map, cat_now, fp, options.match);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::MatchAmbiguous && e.code() != ErrorCode::NoMatch) throw;
    throw Error(ErrorCode::MatchFailed, e.what());
  }
  return recover_epoch(map, corr, cat_now, fp, options);
}

double epoch_error_bound(const Catalog& cat, const FrameParams& fp, std::span<const std::size_t> anchors) {
  double worst = 0.0;
  for (std::size_t idx : anchors) {
    if (idx >= cat.size()) throw Error(ErrorCode::InvariantViolation, "anchor index out of range");
    const double speed = norm(to_galactocentric(cat.records[idx], fp).vel);
    worst = std::max(worst, time_resolution(cat.records[idx].dist_err_kpc, speed));
  }
  return worst;
}

}  // namespace gstamp
