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

#include "gstamp/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "gstamp/epoch.hpp"
#include "gstamp/error.hpp"
#include "gstamp/rng.hpp"
#include "gstamp/stamp.hpp"
#include "gstamp/textio.hpp"

#ifndef GSTAMP_VERSION
#define GSTAMP_VERSION "0.0.0"
#endif

namespace gstamp {

namespace {

// Noisy distances never reach the observer.
constexpr double kMinNoisyDistanceKpc = 0.05;

std::string fixed(double v) { return format_fixed(v, 6); }

std::string triple(const Vec3& v) { return fixed(v.x) + " " + fixed(v.y) + " " + fixed(v.z); }

}  // namespace

std::string tool_version() { return GSTAMP_VERSION; }

std::vector<std::string> output_header(const std::string& command, const Config& cfg, std::uint64_t seed) {
  std::vector<std::string> out = {
      "gstamp " + tool_version() + " " + command,
      "config_sha256 = " + config_hash(cfg),
      "seed = " + std::to_string(seed),
  };
  for (auto& line : describe_config(cfg)) out.push_back(std::move(line));
  return out;
}

SimulateResult run_simulation(const Catalog& cat0, const Config& cfg, const SimulateOptions& options) {
  if (!std::isfinite(options.dt_myr)) throw Error(ErrorCode::InvariantViolation, "dt must be finite");
  if (!(options.noise_kpc >= 0.0) || !std::isfinite(options.noise_kpc)) {
    throw Error(ErrorCode::InvariantViolation, "noise must be non-negative");
  }
  const FrameParams& fp = cfg.frame;
  SimulateResult res;
  res.dt_true_myr = options.dt_myr;
  res.sender_true = sun_position(fp);

  // Sender side.
  const auto anchors = select_anchors(cat0, fp, cfg.stamp.k, cfg.stamp.min_sep_kpc, cfg.stamp.min_speed_kms);
  for (std::size_t idx : anchors) res.anchor_names.push_back(cat0.records[idx].name);
  const auto bytes = encode_stamp(build_location_map(cat0, fp, anchors, cfg.quantization()), cfg.quantization());
  res.stamp_bytes = bytes.size();

  // Recipient side: decoded map, drifted catalog with noisy distances in
  // shuffled order.
  const LocationMap map = decode_stamp(bytes);
  const Catalog drifted = propagate_catalog(cat0, fp, options.dt_myr, options.drift, cfg.orbit());
  Rng rng(options.seed);
  Catalog noisy = drifted;
  if (options.noise_kpc > 0.0) {
    for (auto& rec : noisy.records) {
      rec.dist_kpc = std::max(kMinNoisyDistanceKpc, rec.dist_kpc + rng.normal(0.0, options.noise_kpc));
      rec.dist_err_kpc = options.noise_kpc;
    }
  }
  Catalog cat_now = noisy;
  const auto perm = rng.permutation(noisy.size());
  for (std::size_t i = 0; i < perm.size(); ++i) cat_now.records[i] = noisy.records[perm[i]];

  const RecoverOptions recover = cfg.recover();
  try {
    const EpochEstimate est = recover_epoch(map, cat_now, fp, recover);
    res.correspondence_correct = true;
    for (const auto& [a, r] : est.correspondence.pairs) {
      if (cat_now.records[r].name != res.anchor_names[a]) res.correspondence_correct = false;
    }
    res.match_rms_kpc = est.correspondence.rms_residual_kpc;
    res.dt_est_myr = est.dt_myr;
    res.dt_error_myr = est.dt_myr - options.dt_myr;
    res.bound_myr = est.bound_myr;
    res.epoch_within_bound = std::abs(res.dt_error_myr) <= res.bound_myr;

    const Catalog back = propagate_catalog(cat_now, fp, -est.dt_myr, recover.mode, recover.orbit);
    const SenderFit fit = locate_sender(est.correspondence, map, back, fp);
    res.sender_est = fit.position;
    res.position_error_kpc = norm(fit.position - res.sender_true);
    res.locate_rms_kpc = fit.rms_residual_kpc;
  } catch (const Error& e) {
    res.failure = e.code();
  }
  return res;
}

std::string format_simulation(const SimulateResult& r, const Config& cfg, const SimulateOptions& options) {
  std::string out;
  for (const auto& line : output_header("simulate", cfg, options.seed)) out += "# " + line + "\n";
  auto kv = [&](const std::string& key, const std::string& value) { out += key + " = " + value + "\n"; };
  kv("dt_true_myr", fixed(r.dt_true_myr));
  kv("noise_kpc", fixed(options.noise_kpc));
  kv("drift_mode", std::string(propagation_mode_name(options.drift)));
  kv("k", std::to_string(r.anchor_names.size()));
  std::string names;
  for (std::size_t i = 0; i < r.anchor_names.size(); ++i) names += (i ? ";" : "") + r.anchor_names[i];
  kv("anchors", names);
  kv("stamp_bytes", std::to_string(r.stamp_bytes));
  kv("status", r.failure ? "failed " + std::string(error_name(*r.failure)) : "ok");
  if (r.failure) return out;
  kv("correspondence_correct", r.correspondence_correct ? "true" : "false");
  kv("match_rms_kpc", fixed(r.match_rms_kpc));
  kv("dt_est_myr", format_fixed(r.dt_est_myr, 3));
  kv("dt_error_myr", fixed(r.dt_error_myr));
  kv("bound_myr", fixed(r.bound_myr));
  kv("epoch_within_bound", r.epoch_within_bound ? "true" : "false");
  kv("sender_true_kpc", triple(r.sender_true));
  kv("sender_est_kpc", triple(r.sender_est));
  kv("position_error_kpc", fixed(r.position_error_kpc));
  kv("locate_rms_kpc", fixed(r.locate_rms_kpc));
  return out;
}

}  // namespace gstamp
