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

#include "gstamp/config.hpp"

#include <cmath>
#include <functional>
#include <set>

#include "gstamp/error.hpp"
#include "gstamp/textio.hpp"

namespace gstamp {

namespace {

// Setters report a malformed value by returning false.
struct KeySpec {
  std::string_view section;
  std::string_view key;
  std::function<bool(Config&, std::string_view)> set;
  std::function<std::string(const Config&)> get;
};

template <typename Field>
KeySpec number(std::string_view section, std::string_view key, Field field) {
  return {section, key,
          [field](Config& c, std::string_view v) {
            auto d = parse_double(v);
            if (!d) return false;
            field(c) = *d;
            return true;
          },
          [field](const Config& c) { return format_double(field(c)); }};
}

template <typename Field>
KeySpec count(std::string_view section, std::string_view key, Field field) {
  return {section, key,
          [field](Config& c, std::string_view v) {
            auto n = parse_int(v);
            if (!n || *n < 0) return false;
            field(c) = static_cast<std::size_t>(*n);
            return true;
          },
          [field](const Config& c) { return std::to_string(field(c)); }};
}

std::string join_numbers(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? " " : "") + format_double(values[i]);
  return out;
}

bool parse_numbers(std::string_view text, std::vector<double>& out) {
  out.clear();
  for (auto tok : split_whitespace(text)) {
    auto d = parse_double(tok);
    if (!d) return false;
    out.push_back(*d);
  }
  return true;
}

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = {
      number("frame", "r0_kpc", [](auto& c) -> auto& { return c.frame.r0_kpc; }),
      number("frame", "zsun_kpc", [](auto& c) -> auto& { return c.frame.zsun_kpc; }),
      {"frame", "vsun_kms",
       [](Config& c, std::string_view v) {
         std::vector<double> xs;
         if (!parse_numbers(v, xs) || xs.size() != 3) return false;
         c.frame.vsun_kms = {xs[0], xs[1], xs[2]};
         return true;
       },
       [](const Config& c) {
         return join_numbers({c.frame.vsun_kms.x, c.frame.vsun_kms.y, c.frame.vsun_kms.z});
       }},
      number("frame", "ngp_ra_deg", [](auto& c) -> auto& { return c.frame.ngp_ra_deg; }),
      number("frame", "ngp_dec_deg", [](auto& c) -> auto& { return c.frame.ngp_dec_deg; }),
      number("frame", "lncp_deg", [](auto& c) -> auto& { return c.frame.lncp_deg; }),

      number("potential", "bulge_gm", [](auto& c) -> auto& { return c.potential.bulge.gm; }),
      number("potential", "bulge_softening_kpc", [](auto& c) -> auto& { return c.potential.bulge.softening_kpc; }),
      number("potential", "disk_gm", [](auto& c) -> auto& { return c.potential.disk.gm; }),
      number("potential", "disk_a_kpc", [](auto& c) -> auto& { return c.potential.disk.a_kpc; }),
      number("potential", "disk_b_kpc", [](auto& c) -> auto& { return c.potential.disk.b_kpc; }),
      number("potential", "halo_v_kms", [](auto& c) -> auto& { return c.potential.halo.v_halo_kms; }),
      number("potential", "halo_core_kpc", [](auto& c) -> auto& { return c.potential.halo.core_kpc; }),
      number("potential", "vcirc_target_kms", [](auto& c) -> auto& { return c.potential.vcirc_target_kms; }),

      number("integrator", "dt_myr", [](auto& c) -> auto& { return c.integrator.dt_myr; }),
      number("integrator", "t_end_myr", [](auto& c) -> auto& { return c.integrator.t_end_myr; }),
      {"integrator", "scheme",
       [](Config& c, std::string_view v) {
         c.integrator.scheme = parse_scheme(v);
         return true;
       },
       [](const Config& c) { return std::string(scheme_name(c.integrator.scheme)); }},

      count("stamp", "k", [](auto& c) -> auto& { return c.stamp.k; }),
      number("stamp", "min_sep_kpc", [](auto& c) -> auto& { return c.stamp.min_sep_kpc; }),
      number("stamp", "min_speed_kms", [](auto& c) -> auto& { return c.stamp.min_speed_kms; }),
      number("stamp", "match_tol_kpc", [](auto& c) -> auto& { return c.stamp.match_tol_kpc; }),
      number("stamp", "ambiguity_ratio", [](auto& c) -> auto& { return c.stamp.ambiguity_ratio; }),
      number("stamp", "position_quantum_pc", [](auto& c) -> auto& { return c.stamp.position_quantum_pc; }),

      number("epoch", "window_lo_myr", [](auto& c) -> auto& { return c.epoch.window_lo_myr; }),
      number("epoch", "window_hi_myr", [](auto& c) -> auto& { return c.epoch.window_hi_myr; }),
      count("epoch", "scan_samples", [](auto& c) -> auto& { return c.epoch.scan_samples; }),
      number("epoch", "tolerance_myr", [](auto& c) -> auto& { return c.epoch.tolerance_myr; }),
      {"epoch", "mode",
       [](Config& c, std::string_view v) {
         c.epoch.mode = parse_propagation_mode(v);
         return true;
       },
       [](const Config& c) { return std::string(propagation_mode_name(c.epoch.mode)); }},
      {"epoch", "dd_cases_kpc", [](Config& c, std::string_view v) { return parse_numbers(v, c.epoch.grid.dd_kpc); },
       [](const Config& c) { return join_numbers(c.epoch.grid.dd_kpc); }},
      number("epoch", "v_min_kms", [](auto& c) -> auto& { return c.epoch.grid.v_min_kms; }),
      number("epoch", "v_max_kms", [](auto& c) -> auto& { return c.epoch.grid.v_max_kms; }),
      count("epoch", "v_points", [](auto& c) -> auto& { return c.epoch.grid.v_points; }),
  };
  return table;
}

}  // namespace

MatchOptions Config::match() const {
  MatchOptions m;
  m.tol_kpc = stamp.match_tol_kpc;
  m.ambiguity_ratio = stamp.ambiguity_ratio;
  return m;
}

RecoverOptions Config::recover() const {
  RecoverOptions r;
  r.window_lo_myr = epoch.window_lo_myr;
  r.window_hi_myr = epoch.window_hi_myr;
  r.scan_samples = epoch.scan_samples;
  r.tolerance_myr = epoch.tolerance_myr;
  r.mode = epoch.mode;
  r.orbit = orbit();
  r.match = match();
  return r;
}

void check_config(const Config& cfg) {
  check_frame(cfg.frame);
  check_potential(cfg.potential, cfg.frame.r0_kpc);
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::InvariantViolation, what);
  };
  require(cfg.integrator.dt_myr > 0.0 && std::isfinite(cfg.integrator.dt_myr), "integrator.dt_myr must be positive");
  require(cfg.integrator.t_end_myr >= cfg.integrator.dt_myr && std::isfinite(cfg.integrator.t_end_myr),
          "integrator.t_end_myr must be >= dt_myr");
  require(cfg.stamp.k >= kMinAnchors, "stamp.k must be at least 4");
  require(cfg.stamp.min_sep_kpc >= 0.0, "stamp.min_sep_kpc must be non-negative");
  require(cfg.stamp.min_speed_kms >= 0.0, "stamp.min_speed_kms must be non-negative");
  require(cfg.stamp.match_tol_kpc > 0.0, "stamp.match_tol_kpc must be positive");
  require(cfg.stamp.ambiguity_ratio >= 1.0, "stamp.ambiguity_ratio must be >= 1");
  require(cfg.stamp.position_quantum_pc > 0.0, "stamp.position_quantum_pc must be positive");
  require(cfg.epoch.window_hi_myr > cfg.epoch.window_lo_myr, "epoch window must satisfy lo < hi");
  require(cfg.epoch.scan_samples >= 3, "epoch.scan_samples must be at least 3");
  require(cfg.epoch.tolerance_myr > 0.0, "epoch.tolerance_myr must be positive");
  resolution_curves(cfg.epoch.grid);
}

Config parse_config(std::string_view text) {
  Config cfg;
  std::string section;
  std::set<std::string> seen;
  std::set<std::string_view> sections;
  for (const auto& spec : key_table()) sections.insert(spec.section);

  std::size_t line_no = 0;
  for (auto raw : split_lines(text)) {
    ++line_no;
    auto fail = [&](const std::string& why) {
      return Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + why);
    };
    auto line = trim(raw);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw fail("unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!sections.count(section)) throw Error(ErrorCode::UnknownKey, "section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw fail("expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw fail("empty key");
    if (section.empty()) throw fail("key '" + key + "' outside any section");

    const KeySpec* spec = nullptr;
    for (const auto& s : key_table()) {
      if (s.section == section && s.key == key) spec = &s;
    }
    if (!spec) throw Error(ErrorCode::UnknownKey, section + "." + key);
    if (!seen.insert(section + "." + key).second) throw fail("duplicate key " + section + "." + key);
    if (!spec->set(cfg, value)) throw fail("bad value for " + section + "." + key);
  }
  check_config(cfg);
  return cfg;
}

Config load_config(const std::filesystem::path& path) { return parse_config(read_file(path)); }

std::vector<std::string> describe_config(const Config& cfg) {
  std::vector<std::string> out;
  for (const auto& s : key_table()) out.push_back(std::string(s.section) + "." + std::string(s.key) + " = " + s.get(cfg));
  return out;
}

std::string render_config(const Config& cfg) {
  std::string out;
  std::string_view section;
  for (const auto& s : key_table()) {
    if (s.section != section) {
      if (!section.empty()) out += "\n";
      section = s.section;
      out += "[" + std::string(section) + "]\n";
    }
    out += std::string(s.key) + " = " + s.get(cfg) + "\n";
  }
  return out;
}

std::string config_hash(const Config& cfg) {
  std::string text;
  for (const auto& line : describe_config(cfg)) text += line + "\n";
  return sha256_hex(text);
}

}  // namespace gstamp
