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

#include "gstamp/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <iostream>
#include <optional>

#include "gstamp/catalog.hpp"
#include "gstamp/config.hpp"
#include "gstamp/dynamics.hpp"
#include "gstamp/epoch.hpp"
#include "gstamp/error.hpp"
#include "gstamp/simulate.hpp"
#include "gstamp/stamp.hpp"
#include "gstamp/textio.hpp"
#include "gstamp/units.hpp"

namespace gstamp {

namespace {

double parse_quantity(std::string_view text, std::initializer_list<std::pair<std::string_view, double>> units,
                      const char* what) {
  const auto t = trim(text);
  std::size_t split_at = t.size();
  while (split_at > 0 && std::isalpha(static_cast<unsigned char>(t[split_at - 1]))) --split_at;
  const auto unit = t.substr(split_at);
  const auto value = parse_double(t.substr(0, split_at));
  if (!value) throw Error(ErrorCode::ParseError, std::string("bad ") + what + " '" + std::string(text) + "'");
  for (const auto& [name, scale] : units) {
    if (unit == name) return *value * scale;
  }
  throw Error(ErrorCode::ParseError, std::string("unknown ") + what + " unit '" + std::string(unit) + "'");
}

struct Globals {
  std::string config_path;
  std::uint64_t seed = 1;
  bool offline = false;
  std::string out_path;
  std::string catalog_path;
};

class Session {
 public:
  Session(const Globals& g, std::ostream& out) : g_(g), out_(out) {
    cfg_ = g.config_path.empty() ? Config{} : load_config(g.config_path);
  }

  const Config& cfg() const { return cfg_; }

  Catalog catalog() const {
    return g_.catalog_path.empty() ? load_reference_snapshot() : load_catalog_file(g_.catalog_path);
  }

  std::string header(const std::string& command) const {
    std::string text;
    for (const auto& line : output_header(command, cfg_, g_.seed)) text += "# " + line + "\n";
    return text;
  }

  void emit(const std::string& text) const {
    if (g_.out_path.empty()) {
      out_ << text;
    } else {
      write_file(g_.out_path, text);
    }
  }

 private:
  const Globals& g_;
  std::ostream& out_;
  Config cfg_;
};

std::string kv(const std::string& key, const std::string& value) { return key + " = " + value + "\n"; }

std::string fixed(double v) { return format_fixed(v, 6); }

std::string triple(const Vec3& v) { return fixed(v.x) + " " + fixed(v.y) + " " + fixed(v.z); }

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  const std::string raw = read_file(path);
  return {raw.begin(), raw.end()};
}

std::string pair_lines(const Correspondence& corr, const Catalog& cat) {
  std::string text = "anchor,record,name\n";
  for (const auto& [a, r] : corr.pairs) {
    text += std::to_string(a) + "," + std::to_string(r) + "," + cat.records[r].name + "\n";
  }
  return text;
}

}  // namespace

double parse_duration_myr(std::string_view text) {
  return parse_quantity(text, {{"", 1.0}, {"Myr", 1.0}, {"Gyr", 1e3}, {"kyr", 1e-3}, {"yr", 1e-6}}, "duration");
}

double parse_length_kpc(std::string_view text) {
  return parse_quantity(text, {{"", 1.0}, {"kpc", 1.0}, {"pc", 1e-3}}, "length");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Globular-cluster location and time stamps", "gstamp"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config_path, "Run configuration file");
  app.add_option("--seed", g.seed, "Seed for every random draw");
  app.add_flag("--offline", g.offline, "Never touch the network");

  std::function<void(Session&)> action;
  auto add_out = [&](CLI::App* sub) { sub->add_option("--out", g.out_path, "Output file (default stdout)"); };
  auto add_catalog = [&](CLI::App* sub) {
    sub->add_option("--catalog", g.catalog_path, "Canonical catalog CSV (default: bundled snapshot)");
  };

  // ingest
  std::string convert_path, url, cache_dir = ".gstamp-cache";
  std::size_t synth_n = 0;
  bool upstream = false;
  double epoch_jyear = 2016.0;
  auto* ingest = app.add_subcommand("ingest", "Fetch, convert or synthesize a catalog and validate it");
  add_out(ingest);
  add_catalog(ingest);
  auto* convert_opt = ingest->add_option("--convert", convert_path, "Upstream whitespace table to convert");
  auto* url_opt = ingest->add_option("--url", url, "Download (or reuse the cached copy of) a catalog");
  auto* synth_opt = ingest->add_option("--synth", synth_n, "Synthetic catalog with N records");
  ingest->add_option("--cache", cache_dir, "Download cache directory (GSTAMP_CACHE overrides)");
  ingest->add_flag("--upstream", upstream, "Downloaded file is an upstream table, not canonical CSV");
  ingest->add_option("--epoch", epoch_jyear, "Epoch of converted or downloaded data, Julian year");
  convert_opt->excludes(url_opt)->excludes(synth_opt);
  url_opt->excludes(synth_opt);
  ingest->callback([&] {
    action = [&](Session& s) {
      Catalog cat;
      if (!convert_path.empty()) {
        cat = parse_catalog(convert_upstream_table(read_file(convert_path)), epoch_jyear);
        cat.provenance = convert_path;
      } else if (!url.empty()) {
        FetchOptions fo;
        fo.offline = g.offline;
        std::string text = fetch_snapshot(url, cache_dir, fo);
        if (upstream) text = convert_upstream_table(text);
        cat = parse_catalog(text, epoch_jyear);
        cat.provenance = url;
      } else if (synth_n > 0) {
        cat = synth_catalog(g.seed, synth_n);
      } else {
        cat = s.catalog();
      }
      const ValidationReport report = validate(cat);
      if (report.errors() > 0) {
        const auto& first = *std::find_if(report.issues.begin(), report.issues.end(), [](const ValidationIssue& i) {
          return i.severity == ValidationIssue::Severity::Error;
        });
        throw Error(ErrorCode::InvariantViolation, first.name + ": " + first.detail);
      }
      std::vector<std::string> comments = output_header("ingest", s.cfg(), g.seed);
      comments.push_back("epoch_jyear = " + format_double(cat.epoch_jyear));
      comments.push_back("provenance = " + cat.provenance);
      comments.push_back("records = " + std::to_string(cat.size()));
      comments.push_back("warnings = " + std::to_string(report.warnings()));
      for (const auto& issue : report.issues) {
        comments.push_back("warning: row " + std::to_string(issue.index + 1) + " " + issue.name + ": " + issue.detail);
      }
      s.emit(serialize_catalog(cat, comments));
    };
  });

  // velocities
  std::size_t bins = 20;
  double v_max = 1000.0;
  auto* velocities = app.add_subcommand("velocities", "Histogram of galactocentric cluster speeds");
  add_out(velocities);
  add_catalog(velocities);
  velocities->add_option("--bins", bins, "Number of bins")->check(CLI::PositiveNumber);
  velocities->add_option("--vmax", v_max, "Upper histogram edge, km/s")->check(CLI::PositiveNumber);
  velocities->callback([&] {
    action = [&](Session& s) {
      const Catalog cat = s.catalog();
      const VelocityHistogram h = velocity_distribution(cat, s.cfg().frame, bins, v_max);
      std::size_t finite = 0;
      double fastest = 0.0;
      for (double v : h.speeds_kms) {
        if (std::isfinite(v)) ++finite;
        fastest = std::max(fastest, v);
      }
      std::string text = s.header("velocities");
      text += "# records = " + std::to_string(cat.size()) + "\n";
      text += "# finite_speeds = " + std::to_string(finite) + "\n";
      text += "# max_speed_kms = " + fixed(fastest) + "\n";
      text += "bin_lo_kms,bin_hi_kms,total_count,tangential_count\n";
      for (std::size_t i = 0; i < bins; ++i) {
        text += format_double(h.edges_kms[i]) + "," + format_double(h.edges_kms[i + 1]) + "," +
                std::to_string(h.total_counts[i]) + "," + std::to_string(h.tangential_counts[i]) + "\n";
      }
      s.emit(text);
    };
  });

  // resolution
  auto* resolution = app.add_subcommand("resolution", "Time resolution dt = dd / v over the configured grid");
  add_out(resolution);
  resolution->callback([&] {
    action = [&](Session& s) {
      std::vector<std::string> comments = output_header("resolution", s.cfg(), g.seed);
      comments.push_back("U = " + format_double(units::kYearsPerKpcPerKms) + " yr per (kpc per km/s)");
      s.emit(write_resolution_csv(resolution_curves(s.cfg().epoch.grid), comments));
    };
  });

  // orbit
  std::string cluster;
  std::optional<double> t_end, step;
  std::string scheme;
  std::size_t every = 10;
  auto* orbit = app.add_subcommand("orbit", "Integrate one cluster's orbit");
  add_out(orbit);
  add_catalog(orbit);
  orbit->add_option("--cluster", cluster, "Cluster name")->required();
  orbit->add_option("--t-end", t_end, "Duration, Myr (default: integrator.t_end_myr)");
  orbit->add_option("--dt", step, "Step, Myr (default: integrator.dt_myr)");
  orbit->add_option("--scheme", scheme, "leapfrog or rk4 (default: integrator.scheme)");
  orbit->add_option("--every", every, "Write every Nth sample")->check(CLI::PositiveNumber);
  orbit->callback([&] {
    action = [&](Session& s) {
      const Catalog cat = s.catalog();
      const auto it = std::find_if(cat.records.begin(), cat.records.end(),
                                   [&](const ClusterRecord& r) { return r.name == cluster; });
      if (it == cat.records.end()) throw Error(ErrorCode::UnknownCluster, cluster);
      const auto& integ = s.cfg().integrator;
      const Scheme sch = scheme.empty() ? integ.scheme : parse_scheme(scheme);
      const Trajectory traj = integrate_orbit(to_galactocentric(*it, s.cfg().frame), s.cfg().potential,
                                              step.value_or(integ.dt_myr), t_end.value_or(integ.t_end_myr), sch);
      std::string text = s.header("orbit");
      text += "# cluster = " + cluster + "\n";
      text += "# scheme = " + std::string(scheme_name(sch)) + "\n";
      text += "# relative_energy_drift = " + format_double(traj.relative_energy_drift()) + "\n";
      text += "# max_relative_energy_error = " + format_double(traj.max_relative_energy_error()) + "\n";
      text += "t_myr,x_kpc,y_kpc,z_kpc,vx_kms,vy_kms,vz_kms,energy_kms2\n";
      for (std::size_t i = 0; i < traj.size(); ++i) {
        if (i % every != 0 && i + 1 != traj.size()) continue;
        const auto& st = traj.states[i];
        text += format_fixed(traj.times_myr[i], 4) + "," + fixed(st.pos.x) + "," + fixed(st.pos.y) + "," +
                fixed(st.pos.z) + "," + fixed(st.vel.x) + "," + fixed(st.vel.y) + "," + fixed(st.vel.z) + "," +
                format_double(traj.energy_kms2[i]) + "\n";
      }
      s.emit(text);
    };
  });

  // stamp encode | decode
  auto* stamp = app.add_subcommand("stamp", "Location stamp files");
  stamp->require_subcommand(1);
  std::string dump_path, stamp_path;
  std::optional<std::size_t> k;
  auto* encode = stamp->add_subcommand("encode", "Write a binary stamp from a catalog or a text dump");
  add_out(encode);
  add_catalog(encode);
  encode->add_option("--from-dump", dump_path, "Human-readable dump to encode");
  encode->add_option("--k", k, "Anchor count (default: stamp.k)");
  encode->callback([&] {
    action = [&](Session& s) {
      if (g.out_path.empty()) throw CLI::RequiredError("--out");
      const auto& st = s.cfg().stamp;
      LocationMap map;
      if (!dump_path.empty()) {
        map = parse_stamp_dump(read_file(dump_path));
      } else {
        const Catalog cat = s.catalog();
        const auto anchors = select_anchors(cat, s.cfg().frame, k.value_or(st.k), st.min_sep_kpc, st.min_speed_kms);
        map = build_location_map(cat, s.cfg().frame, anchors, s.cfg().quantization());
      }
      const auto bytes = encode_stamp(map, s.cfg().quantization());
      s.emit(std::string(bytes.begin(), bytes.end()));
    };
  });
  auto* decode = stamp->add_subcommand("decode", "Print a binary stamp as text");
  add_out(decode);
  decode->add_option("stamp", stamp_path, "Stamp file")->required();
  decode->callback([&] {
    action = [&](Session& s) { s.emit(s.header("stamp decode") + dump_stamp(decode_stamp(read_bytes(stamp_path)))); };
  });

  // locate
  double locate_dt = 0.0;
  auto* locate = app.add_subcommand("locate", "Match a stamp against a catalog and trilaterate the sender");
  add_out(locate);
  add_catalog(locate);
  locate->add_option("--stamp", stamp_path, "Stamp file")->required();
  locate->add_option_function<std::string>(
      "--elapsed", [&](const std::string& v) { locate_dt = parse_duration_myr(v); },
      "Time since the stamp's epoch; the catalog is moved back by it first (default 0)");
  locate->callback([&] {
    action = [&](Session& s) {
      const auto& fp = s.cfg().frame;
      const LocationMap map = decode_stamp(read_bytes(stamp_path));
      Catalog cat = s.catalog();
      if (locate_dt != 0.0) cat = propagate_catalog(cat, fp, -locate_dt, s.cfg().epoch.mode, s.cfg().orbit());
      const Correspondence corr = match_anchors(map, cat, fp, s.cfg().match());
      const SenderFit fit = locate_sender(corr, map, cat, fp);
      std::string text = s.header("locate");
      text += kv("elapsed_myr", fixed(locate_dt));
      text += kv("match_rms_kpc", fixed(corr.rms_residual_kpc));
      text += kv("sender_kpc", triple(fit.position));
      text += kv("offset_from_sun_kpc", fixed(norm(fit.position - sun_position(fp))));
      text += kv("rms_residual_kpc", fixed(fit.rms_residual_kpc));
      text += kv("iterations", std::to_string(fit.iterations));
      text += pair_lines(corr, cat);
      s.emit(text);
    };
  });

  // epoch recover
  auto* epoch = app.add_subcommand("epoch", "Time-stamp operations");
  epoch->require_subcommand(1);
  std::string mode;
  auto* recover = epoch->add_subcommand("recover", "Estimate the time elapsed since a stamp was made");
  add_out(recover);
  add_catalog(recover);
  recover->add_option("--stamp", stamp_path, "Stamp file")->required();
  recover->add_option("--mode", mode, "linear or orbit (default: epoch.mode)");
  recover->callback([&] {
    action = [&](Session& s) {
      RecoverOptions ro = s.cfg().recover();
      if (!mode.empty()) ro.mode = parse_propagation_mode(mode);
      const LocationMap map = decode_stamp(read_bytes(stamp_path));
      const Catalog cat = s.catalog();
      const EpochEstimate est = recover_epoch(map, cat, s.cfg().frame, ro);
      std::string text = s.header("epoch recover");
      text += kv("mode", std::string(propagation_mode_name(ro.mode)));
      text += kv("dt_myr", format_fixed(est.dt_myr, 4));
      text += kv("residual_kpc", fixed(est.residual_kpc));
      text += kv("bound_myr", fixed(est.bound_myr));
      text += kv("match_rms_kpc", fixed(est.correspondence.rms_residual_kpc));
      text += pair_lines(est.correspondence, cat);
      s.emit(text);
    };
  });

  // simulate
  SimulateOptions sim;
  sim.dt_myr = 0.5;
  std::string drift;
  auto* simulate = app.add_subcommand("simulate", "Stamp, drift and recover in one seeded run");
  add_out(simulate);
  add_catalog(simulate);
  simulate->add_option_function<std::string>(
      "--dt", [&](const std::string& v) { sim.dt_myr = parse_duration_myr(v); }, "Elapsed time, e.g. 0.5Myr");
  simulate->add_option_function<std::string>(
      "--noise", [&](const std::string& v) { sim.noise_kpc = parse_length_kpc(v); },
      "Recipient distance noise sigma, e.g. 0.1kpc (default 0)");
  simulate->add_option("--drift", drift, "linear or orbit drift between stamp and reception (default linear)");
  simulate->callback([&] {
    action = [&](Session& s) {
      sim.seed = g.seed;
      if (!drift.empty()) sim.drift = parse_propagation_mode(drift);
      const SimulateResult r = run_simulation(s.catalog(), s.cfg(), sim);
      s.emit(format_simulation(r, s.cfg(), sim));
      if (r.failure) {
        throw Error(*r.failure, "recovery failed; report written");
      }
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << tool_version() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "gstamp: usage: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    // Option callbacks (unit parsing) run during parse.
    err << "gstamp: usage: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (!g.offline) g.offline = offline_from_env();
    Session session(g, out);
    action(session);
  } catch (const CLI::ParseError& e) {
    err << "gstamp: usage: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "gstamp: " << e.what() << "\n";
    return is_numerical(e.code()) ? kExitNumerical : kExitData;
  } catch (const std::exception& e) {
    err << "gstamp: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace gstamp
