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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "gstamp/catalog.hpp"
#include "gstamp/cli.hpp"
#include "gstamp/config.hpp"
#include "gstamp/epoch.hpp"
#include "gstamp/error.hpp"
#include "gstamp/simulate.hpp"
#include "gstamp/stamp.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace gstamp {
namespace {

py::tuple vec(const Vec3& v) { return py::make_tuple(v.x, v.y, v.z); }

py::list pairs(const Correspondence& corr) {
  py::list out;
  for (const auto& [a, r] : corr.pairs) out.append(py::make_tuple(a, r));
  return out;
}

py::dict curves(const ResolutionCurve& c) {
  return py::dict("dd_kpc"_a = c.dd_kpc, "v_kms"_a = c.v_kms, "dt_yr"_a = c.dt_yr);
}

}  // namespace
}  // namespace gstamp

PYBIND11_MODULE(_gstamp, m) {
  using namespace gstamp;
  m.doc() = "Globular-cluster location and time stamps";
  m.attr("__version__") = GSTAMP_VERSION;

  static py::exception<Error> error(m, "GstampError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::class_<Config>(m, "Config")
      .def(py::init<>())
      .def_static("parse", &parse_config, "text"_a)
      .def_static("load", [](const std::string& path) { return load_config(path); }, "path"_a)
      .def("render", &render_config)
      .def("describe", &describe_config)
      .def("hash", &config_hash)
      .def("__eq__", [](const Config& a, const Config& b) { return a == b; });

  py::class_<Catalog>(m, "Catalog")
      .def_readonly("epoch_jyear", &Catalog::epoch_jyear)
      .def("__len__", &Catalog::size)
      .def_property_readonly("names",
                             [](const Catalog& c) {
                               std::vector<std::string> names;
                               for (const auto& r : c.records) names.push_back(r.name);
                               return names;
                             })
      .def("to_csv", [](const Catalog& c) { return serialize_catalog(c); });

  m.def("load_reference_snapshot", &load_reference_snapshot);
  m.def("load_catalog", [](const std::string& path) { return load_catalog_file(path); }, "path"_a);
  m.def("parse_catalog", &parse_catalog, "text"_a, "epoch_jyear"_a = 2016.0);
  m.def("synth_catalog", &synth_catalog, "seed"_a, "n"_a);
  m.def(
      "propagate_catalog",
      [](const Catalog& cat, double dt_myr, const std::string& mode, const Config& cfg) {
        return propagate_catalog(cat, cfg.frame, dt_myr, parse_propagation_mode(mode), cfg.orbit());
      },
      "catalog"_a, "dt_myr"_a, "mode"_a = "linear", "config"_a = Config{});

  m.def("time_resolution", &time_resolution, "dd_kpc"_a, "v_kms"_a);
  m.def(
      "resolution_curves",
      [](std::vector<double> dd, double v_min, double v_max, std::size_t n) {
        return curves(resolution_curves({std::move(dd), v_min, v_max, n}));
      },
      "dd_kpc"_a = ResolutionGrid{}.dd_kpc, "v_min_kms"_a = 50.0, "v_max_kms"_a = 600.0, "v_points"_a = 56);

  py::class_<LocationMap>(m, "LocationMap")
      .def_readonly("epoch_jyear", &LocationMap::epoch_jyear)
      .def_property_readonly("k", &LocationMap::k)
      .def_property_readonly("positions_kpc",
                             [](const LocationMap& map) {
                               py::list out;
                               for (const auto& a : map.anchors) out.append(vec(a.pos_rel));
                               return out;
                             })
      .def("dump", &dump_stamp)
      .def_static("parse_dump", &parse_stamp_dump, "text"_a)
      .def("__eq__", [](const LocationMap& a, const LocationMap& b) { return a == b; });

  m.def(
      "select_anchors",
      [](const Catalog& cat, std::size_t k, double min_sep_kpc, double min_speed_kms, const Config& cfg) {
        return select_anchors(cat, cfg.frame, k, min_sep_kpc, min_speed_kms);
      },
      "catalog"_a, "k"_a = 16, "min_sep_kpc"_a = 1.0, "min_speed_kms"_a = 0.0, "config"_a = Config{});
  m.def(
      "build_location_map",
      [](const Catalog& cat, const std::vector<std::size_t>& anchors, const Config& cfg) {
        return build_location_map(cat, cfg.frame, anchors, cfg.quantization());
      },
      "catalog"_a, "anchors"_a, "config"_a = Config{});
  m.def(
      "encode_stamp",
      [](const LocationMap& map, const Config& cfg) {
        const auto bytes = encode_stamp(map, cfg.quantization());
        return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
      },
      "map"_a, "config"_a = Config{});
  m.def(
      "decode_stamp",
      [](const py::bytes& data) {
        const std::string raw = data;
        const std::vector<std::uint8_t> bytes(raw.begin(), raw.end());
        return decode_stamp(bytes);
      },
      "data"_a);

  m.def(
      "match_anchors",
      [](const LocationMap& map, const Catalog& cat, const Config& cfg) {
        const Correspondence c = match_anchors(map, cat, cfg.frame, cfg.match());
        return py::dict("pairs"_a = pairs(c), "rms_residual_kpc"_a = c.rms_residual_kpc);
      },
      "map"_a, "catalog"_a, "config"_a = Config{});
  m.def(
      "locate_sender",
      [](const LocationMap& map, const Catalog& cat, const Config& cfg) {
        const Correspondence c = match_anchors(map, cat, cfg.frame, cfg.match());
        const SenderFit fit = locate_sender(c, map, cat, cfg.frame);
        return py::dict("position_kpc"_a = vec(fit.position), "rms_residual_kpc"_a = fit.rms_residual_kpc,
                        "iterations"_a = fit.iterations, "pairs"_a = pairs(c));
      },
      "map"_a, "catalog"_a, "config"_a = Config{});
  m.def(
      "recover_epoch",
      [](const LocationMap& map, const Catalog& cat, const Config& cfg) {
        const EpochEstimate e = recover_epoch(map, cat, cfg.frame, cfg.recover());
        return py::dict("dt_myr"_a = e.dt_myr, "residual_kpc"_a = e.residual_kpc, "bound_myr"_a = e.bound_myr,
                        "pairs"_a = pairs(e.correspondence), "scan_dt_myr"_a = e.scan_dt_myr,
                        "scan_residual_kpc"_a = e.scan_residual_kpc);
      },
      "map"_a, "catalog"_a, "config"_a = Config{});

  m.def(
      "simulate",
      [](double dt_myr, double noise_kpc, std::uint64_t seed, const std::string& drift, const Config& cfg) {
        SimulateOptions o;
        o.dt_myr = dt_myr;
        o.noise_kpc = noise_kpc;
        o.seed = seed;
        o.drift = parse_propagation_mode(drift);
        const SimulateResult r = run_simulation(load_reference_snapshot(), cfg, o);
        py::dict d("anchors"_a = r.anchor_names, "stamp_bytes"_a = r.stamp_bytes, "dt_true_myr"_a = r.dt_true_myr,
                   "status"_a = r.failure ? std::string(error_name(*r.failure)) : std::string("ok"),
                   "correspondence_correct"_a = r.correspondence_correct, "dt_est_myr"_a = r.dt_est_myr,
                   "dt_error_myr"_a = r.dt_error_myr, "bound_myr"_a = r.bound_myr,
                   "epoch_within_bound"_a = r.epoch_within_bound, "sender_true_kpc"_a = vec(r.sender_true),
                   "sender_est_kpc"_a = vec(r.sender_est), "position_error_kpc"_a = r.position_error_kpc);
        d["report"] = format_simulation(r, cfg, o);
        return d;
      },
      "dt_myr"_a = 0.5, "noise_kpc"_a = 0.0, "seed"_a = 1, "drift"_a = "linear", "config"_a = Config{});

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "gstamp");
        std::ostringstream out, err;
        const int code = run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      "args"_a, "Runs the command-line tool in process; returns (exit_code, stdout, stderr).");
}
