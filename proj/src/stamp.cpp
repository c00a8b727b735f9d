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

#include "gstamp/stamp.hpp"

#include <zlib.h>

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <set>

#include "gstamp/error.hpp"
#include "gstamp/textio.hpp"
#include "gstamp/units.hpp"

namespace gstamp {

namespace {

constexpr std::uint8_t kMagic[4] = {0x4D, 0x49, 0x41, 0x42};  // "MIAB"

std::int16_t to_i16(double value, const char* what) {
  const double r = std::round(value);
  if (!(r >= std::numeric_limits<std::int16_t>::min() && r <= std::numeric_limits<std::int16_t>::max())) {
    throw Error(ErrorCode::InvariantViolation, std::string(what) + " does not fit in 16 bits");
  }
  return static_cast<std::int16_t>(r);
}

std::int32_t to_i32(double value, const char* what) {
  const double r = std::round(value);
  if (!(r >= std::numeric_limits<std::int32_t>::min() && r <= std::numeric_limits<std::int32_t>::max())) {
    throw Error(ErrorCode::InvariantViolation, std::string(what) + " does not fit in 32 bits");
  }
  return static_cast<std::int32_t>(r);
}

void put_u8(std::vector<std::uint8_t>& out, std::uint8_t v) { out.push_back(v); }

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<std::uint8_t>((v >> shift) & 0xFF));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int shift = 0; shift < 64; shift += 8) out.push_back(static_cast<std::uint8_t>((v >> shift) & 0xFF));
}

std::uint16_t get_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[at + static_cast<std::size_t>(i)];
  return v;
}

std::uint64_t get_u64(std::span<const std::uint8_t> b, std::size_t at) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[at + static_cast<std::size_t>(i)];
  return v;
}

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, bytes.data(), static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

std::int32_t position_pc(double kpc, double quantum_pc) {
  const double steps = std::round(kpc * units::kPcPerKpc / quantum_pc);
  return to_i32(steps * quantum_pc, "anchor position");
}

// Eigenvalues (ascending) of the scatter matrix of the points about their
// centroid.
Eigen::Vector3d scatter_eigenvalues(const std::vector<Vec3>& pts) {
  Vec3 c;
  for (const auto& p : pts) c += p;
  c *= 1.0 / static_cast<double>(pts.size());
  Eigen::Matrix3d s = Eigen::Matrix3d::Zero();
  for (const auto& p : pts) {
    const Eigen::Vector3d d(p.x - c.x, p.y - c.y, p.z - c.z);
    s += d * d.transpose();
  }
  return Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(s, Eigen::EigenvaluesOnly).eigenvalues();
}

}  // namespace

AnchorSignature AnchorSignature::quantize(double mv_abs, double feh_dex) {
  return {to_i16(mv_abs / kMagnitudeQuantum, "mv_q"), to_i16(feh_dex / kMetallicityQuantum, "feh_q")};
}

bool AnchorSignature::compatible(const AnchorSignature& other) const {
  return std::abs(mv_q - other.mv_q) <= 1 && std::abs(feh_q - other.feh_q) <= 1;
}

void check_location_map(const LocationMap& map) {
  if (!std::isfinite(map.epoch_jyear)) throw Error(ErrorCode::InvariantViolation, "epoch is not finite");
  if (map.k() < kMinAnchors) {
    throw Error(ErrorCode::InvariantViolation, "map needs at least 4 anchors, has " + std::to_string(map.k()));
  }
  for (const auto& a : map.anchors) {
    if (!is_finite(a.pos_rel)) throw Error(ErrorCode::InvariantViolation, "anchor position is not finite");
  }
  for (std::size_t i = 0; i < map.k(); ++i) {
    for (std::size_t j = i + 1; j < map.k(); ++j) {
      if (norm(map.anchors[i].pos_rel - map.anchors[j].pos_rel) <= kMinAnchorSeparationKpc) {
        throw Error(ErrorCode::DegenerateGeometry,
                    "anchors " + std::to_string(i) + " and " + std::to_string(j) + " are within 0.5 kpc");
      }
    }
  }
}

Vec3 quantize_position(const Vec3& pos, const StampQuantization& quant) {
  const double q = quant.position_pc;
  auto one = [&](double kpc) { return static_cast<double>(position_pc(kpc, q)) / units::kPcPerKpc; };
  return {one(pos.x), one(pos.y), one(pos.z)};
}

std::vector<std::uint8_t> encode_stamp(const LocationMap& map, const StampQuantization& quant) {
  if (!(quant.position_pc > 0.0)) throw Error(ErrorCode::InvariantViolation, "position quantum must be positive");
  check_location_map(map);
  if (map.k() > std::numeric_limits<std::uint16_t>::max()) {
    throw Error(ErrorCode::InvariantViolation, "too many anchors for a v1 stamp");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kStampHeaderBytes + kStampAnchorBytes * map.k() + kStampTrailerBytes);
  for (std::uint8_t m : kMagic) put_u8(out, m);
  put_u8(out, kStampVersion);
  put_u16(out, static_cast<std::uint16_t>(map.k()));
  put_u64(out, std::bit_cast<std::uint64_t>(map.epoch_jyear));
  for (const auto& a : map.anchors) {
    put_u16(out, static_cast<std::uint16_t>(a.signature.mv_q));
    put_u16(out, static_cast<std::uint16_t>(a.signature.feh_q));
    put_u32(out, static_cast<std::uint32_t>(position_pc(a.pos_rel.x, quant.position_pc)));
    put_u32(out, static_cast<std::uint32_t>(position_pc(a.pos_rel.y, quant.position_pc)));
    put_u32(out, static_cast<std::uint32_t>(position_pc(a.pos_rel.z, quant.position_pc)));
  }
  put_u32(out, crc32_of(out));
  return out;
}

LocationMap decode_stamp(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw Error(ErrorCode::Truncated, "stamp shorter than its magic");
  if (!std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) throw Error(ErrorCode::BadMagic, "");
  if (bytes.size() < kStampHeaderBytes) throw Error(ErrorCode::Truncated, "incomplete header");
  if (bytes[4] != kStampVersion) {
    throw Error(ErrorCode::UnsupportedVersion, "version " + std::to_string(bytes[4]));
  }
  const std::size_t k = get_u16(bytes, 5);
  const std::size_t expected = kStampHeaderBytes + kStampAnchorBytes * k + kStampTrailerBytes;
  if (bytes.size() < expected) {
    throw Error(ErrorCode::Truncated, std::to_string(bytes.size()) + " of " + std::to_string(expected) + " bytes");
  }
  if (bytes.size() > expected) {
    throw Error(ErrorCode::Truncated, "length mismatch: " + std::to_string(bytes.size() - expected) + " trailing bytes");
  }
  const std::size_t body = expected - kStampTrailerBytes;
  if (crc32_of(bytes.first(body)) != get_u32(bytes, body)) throw Error(ErrorCode::ChecksumFail, "");

  LocationMap map;
  map.epoch_jyear = std::bit_cast<double>(get_u64(bytes, 7));
  map.anchors.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t at = kStampHeaderBytes + kStampAnchorBytes * i;
    MapAnchor a;
    a.signature.mv_q = static_cast<std::int16_t>(get_u16(bytes, at));
    a.signature.feh_q = static_cast<std::int16_t>(get_u16(bytes, at + 2));
    auto coord = [&](std::size_t off) {
      return static_cast<double>(static_cast<std::int32_t>(get_u32(bytes, at + off))) / units::kPcPerKpc;
    };
    a.pos_rel = {coord(4), coord(8), coord(12)};
    map.anchors.push_back(a);
  }
  check_location_map(map);
  return map;
}

std::string dump_stamp(const LocationMap& map) {
  std::string out = "# gstamp location map v1\n";
  out += "epoch_jyear = " + format_double(map.epoch_jyear) + "\n";
  out += "k = " + std::to_string(map.k()) + "\n";
  out += "anchor,mv_q,feh_q,mv_abs,feh_dex,x_pc,y_pc,z_pc,dist_kpc\n";
  for (std::size_t i = 0; i < map.k(); ++i) {
    const auto& a = map.anchors[i];
    out += std::to_string(i) + "," + std::to_string(a.signature.mv_q) + "," + std::to_string(a.signature.feh_q) + "," +
           format_fixed(a.signature.mv_abs(), 2) + "," + format_fixed(a.signature.feh_dex(), 1) + "," +
           std::to_string(position_pc(a.pos_rel.x, 1.0)) + "," + std::to_string(position_pc(a.pos_rel.y, 1.0)) + "," +
           std::to_string(position_pc(a.pos_rel.z, 1.0)) + "," + format_fixed(norm(a.pos_rel), 3) + "\n";
  }
  return out;
}

LocationMap parse_stamp_dump(std::string_view text) {
  LocationMap map;
  std::optional<std::size_t> k;
  bool in_table = false;
  std::size_t line_no = 0;
  for (auto raw : split_lines(text)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto fail = [&](const std::string& why) {
      return Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + why);
    };
    if (!in_table) {
      if (line.rfind("anchor,", 0) == 0) {
        in_table = true;
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) throw fail("expected key = value");
      const auto key = trim(line.substr(0, eq));
      const auto value = trim(line.substr(eq + 1));
      if (key == "epoch_jyear") {
        auto v = parse_double(value);
        if (!v) throw fail("bad epoch");
        map.epoch_jyear = *v;
      } else if (key == "k") {
        auto v = parse_int(value);
        if (!v || *v < 0) throw fail("bad k");
        k = static_cast<std::size_t>(*v);
      } else {
        throw fail("unknown key '" + std::string(key) + "'");
      }
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != 9) throw fail("expected 9 fields");
    auto integer = [&](std::size_t i) {
      auto v = parse_int(cells[i]);
      if (!v) throw fail("bad integer '" + std::string(cells[i]) + "'");
      return *v;
    };
    MapAnchor a;
    a.signature.mv_q = static_cast<std::int16_t>(integer(1));
    a.signature.feh_q = static_cast<std::int16_t>(integer(2));
    a.pos_rel = {static_cast<double>(integer(5)) / units::kPcPerKpc, static_cast<double>(integer(6)) / units::kPcPerKpc,
                 static_cast<double>(integer(7)) / units::kPcPerKpc};
    map.anchors.push_back(a);
  }
  if (k && *k != map.k()) {
    throw Error(ErrorCode::ParseError, "k = " + std::to_string(*k) + " but " + std::to_string(map.k()) + " anchors listed");
  }
  check_location_map(map);
  return map;
}

std::vector<std::size_t> select_anchors(const Catalog& cat, const FrameParams& fp, std::size_t k, double min_sep_kpc,
                                        double min_speed_kms) {
  if (k < kMinAnchors || k > cat.size()) {
    throw Error(ErrorCode::BadK, "k = " + std::to_string(k) + " with " + std::to_string(cat.size()) + " records");
  }
  const auto states = galactocentric_states(cat, fp);
  std::vector<std::size_t> order(cat.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ra = cat.records[a];
    const auto& rb = cat.records[b];
    if (ra.mv_abs != rb.mv_abs) return ra.mv_abs < rb.mv_abs;
    return ra.name < rb.name;
  });

  std::vector<std::size_t> chosen;
  for (std::size_t idx : order) {
    if (min_speed_kms > 0.0 && norm(states[idx].vel) < min_speed_kms) continue;
    const bool crowded = std::any_of(chosen.begin(), chosen.end(), [&](std::size_t c) {
      return norm(states[idx].pos - states[c].pos) < min_sep_kpc;
    });
    if (crowded) continue;
    chosen.push_back(idx);
    if (chosen.size() == k) return chosen;
  }
  throw Error(ErrorCode::TooFewCandidates,
              std::to_string(chosen.size()) + " of " + std::to_string(k) + " anchors satisfy the constraints");
}

LocationMap build_location_map(const Catalog& cat, const FrameParams& fp, std::span<const std::size_t> anchors,
                               const StampQuantization& quant) {
  if (anchors.size() < kMinAnchors) throw Error(ErrorCode::BadK, "need at least 4 anchors");
  std::set<std::size_t> unique(anchors.begin(), anchors.end());
  if (unique.size() != anchors.size()) throw Error(ErrorCode::InvariantViolation, "duplicate anchor index");
  if (*unique.rbegin() >= cat.size()) throw Error(ErrorCode::InvariantViolation, "anchor index out of range");

  const Vec3 sun = sun_position(fp);
  LocationMap map;
  map.epoch_jyear = cat.epoch_jyear;
  std::vector<Vec3> positions;
  for (std::size_t idx : anchors) {
    const auto& rec = cat.records[idx];
    const PhaseState st = to_galactocentric(rec, fp);
    positions.push_back(st.pos);
    map.anchors.push_back({AnchorSignature::quantize(rec.mv_abs, rec.feh_dex), quantize_position(st.pos - sun, quant)});
  }
  const Eigen::Vector3d ev = scatter_eigenvalues(positions);
  if (ev(1) <= 1e-10 * ev(2)) throw Error(ErrorCode::DegenerateGeometry, "anchors are collinear");
  check_location_map(map);
  return map;
}

namespace {

struct Hypothesis {
  double sumsq = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> records;  // per map anchor

  bool better_than(const Hypothesis& o) const {
    if (sumsq != o.sumsq) return sumsq < o.sumsq;
    return records < o.records;
  }
};

class AnchorMatcher {
 public:
  AnchorMatcher(const LocationMap& map, const Catalog& cat, const FrameParams& fp, const MatchOptions& opt)
      : map_(map), opt_(opt), k_(map.k()) {
    for (const auto& st : galactocentric_states(cat, fp)) positions_.push_back(st.pos);
    candidates_.resize(k_);
    for (std::size_t a = 0; a < k_; ++a) {
      for (std::size_t r = 0; r < cat.size(); ++r) {
        const auto sig = AnchorSignature::quantize(cat.records[r].mv_abs, cat.records[r].feh_dex);
        if (sig.compatible(map.anchors[a].signature)) candidates_[a].push_back(r);
      }
      if (candidates_[a].empty()) {
        throw Error(ErrorCode::NoMatch, "no catalog record carries the signature of anchor " + std::to_string(a));
      }
    }
    order_.resize(k_);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) { return candidates_[a].size() < candidates_[b].size(); });
    map_dist_.assign(k_ * k_, 0.0);
    for (std::size_t i = 0; i < k_; ++i) {
      for (std::size_t j = 0; j < k_; ++j) map_dist_[i * k_ + j] = norm(map.anchors[i].pos_rel - map.anchors[j].pos_rel);
    }
    used_.assign(cat.size(), false);
    current_.records.assign(k_, 0);
  }

  void run() { descend(0, 0.0); }

  const Hypothesis& best() const { return best_; }
  const Hypothesis& second() const { return second_; }
  std::size_t pairs() const { return k_ * (k_ - 1) / 2; }

 private:
  void descend(std::size_t depth, double sumsq) {
    if (++nodes_ > opt_.node_budget) throw Error(ErrorCode::MatchAmbiguous, "search budget exhausted");
    if (depth == k_) {
      current_.sumsq = sumsq;
      offer(current_);
      return;
    }
    const std::size_t a = order_[depth];
    for (std::size_t r : candidates_[a]) {
      if (used_[r]) continue;
      double local = 0.0;
      bool ok = true;
      for (std::size_t p = 0; p < depth; ++p) {
        const std::size_t b = order_[p];
        const double res = map_dist_[a * k_ + b] - norm(positions_[r] - positions_[current_.records[b]]);
        if (std::abs(res) > opt_.tol_kpc) {
          ok = false;
          break;
        }
        local += res * res;
      }
      if (!ok || sumsq + local > second_.sumsq) continue;
      used_[r] = true;
      current_.records[a] = r;
      descend(depth + 1, sumsq + local);
      used_[r] = false;
    }
  }

  void offer(const Hypothesis& h) {
    if (h.better_than(best_)) {
      second_ = std::move(best_);
      best_ = h;
    } else if (h.better_than(second_)) {
      second_ = h;
    }
  }

  const LocationMap& map_;
  const MatchOptions& opt_;
  std::size_t k_;
  std::vector<Vec3> positions_;
  std::vector<std::vector<std::size_t>> candidates_;
  std::vector<std::size_t> order_;
  std::vector<double> map_dist_;
  std::vector<bool> used_;
  Hypothesis current_;
  Hypothesis best_;
  Hypothesis second_;
  std::size_t nodes_ = 0;
};

}  // namespace

Correspondence match_anchors(const LocationMap& map, const Catalog& cat, const FrameParams& fp,
                             const MatchOptions& options) {
  check_location_map(map);
  if (cat.size() < map.k()) throw Error(ErrorCode::NoMatch, "catalog smaller than the map");
  AnchorMatcher matcher(map, cat, fp, options);
  matcher.run();
  if (!std::isfinite(matcher.best().sumsq)) throw Error(ErrorCode::NoMatch, "no consistent assignment");

  const double pairs = static_cast<double>(matcher.pairs());
  const double best_rms = std::sqrt(matcher.best().sumsq / pairs);
  if (std::isfinite(matcher.second().sumsq)) {
    const double second_rms = std::sqrt(matcher.second().sumsq / pairs);
    if (second_rms <= options.ambiguity_ratio * best_rms) {
      throw Error(ErrorCode::MatchAmbiguous, "best rms " + format_fixed(best_rms, 4) + " kpc, runner-up " +
                                                 format_fixed(second_rms, 4) + " kpc");
    }
  }
  Correspondence corr;
  corr.rms_residual_kpc = best_rms;
  for (std::size_t a = 0; a < map.k(); ++a) corr.pairs.emplace_back(a, matcher.best().records[a]);
  return corr;
}

SenderFit locate_sender(const Correspondence& corr, const LocationMap& map, const Catalog& cat,
                        const FrameParams& fp) {
  constexpr std::size_t kMaxIterations = 100;
  constexpr double kStepTolKpc = 1e-6;

  if (corr.pairs.size() < kMinAnchors) throw Error(ErrorCode::Degenerate, "need at least 4 matched anchors");
  std::vector<Vec3> anchors;
  std::vector<double> ranges;
  for (const auto& [a, r] : corr.pairs) {
    if (a >= map.k() || r >= cat.size()) throw Error(ErrorCode::InvariantViolation, "correspondence index out of range");
    anchors.push_back(to_galactocentric(cat.records[r], fp).pos);
    ranges.push_back(norm(map.anchors[a].pos_rel));
  }
  const Eigen::Vector3d ev = scatter_eigenvalues(anchors);
  if (ev(0) <= 1e-9 * ev(2)) throw Error(ErrorCode::Degenerate, "anchors are coplanar");

  auto cost = [&](const Vec3& s) {
    double c = 0.0;
    for (std::size_t i = 0; i < anchors.size(); ++i) {
      const double res = norm(anchors[i] - s) - ranges[i];
      c += res * res;
    }
    return c;
  };

  SenderFit fit;
  Vec3 s;
  for (const auto& x : anchors) s += x;
  s *= 1.0 / static_cast<double>(anchors.size());
  double c = cost(s);
  fit.cost_history.push_back(c);

  for (std::size_t it = 1; it <= kMaxIterations; ++it) {
    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < anchors.size(); ++i) {
      const Vec3 d = anchors[i] - s;
      const double len = norm(d);
      if (len < 1e-12) throw Error(ErrorCode::Degenerate, "iterate coincides with an anchor");
      const Eigen::Vector3d j(-d.x / len, -d.y / len, -d.z / len);
      jtj += j * j.transpose();
      jtr += j * (len - ranges[i]);
    }
    const Eigen::Vector3d jev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(jtj, Eigen::EigenvaluesOnly).eigenvalues();
    if (jev(0) <= 1e-12 * jev(2)) throw Error(ErrorCode::Degenerate, "rank-deficient normal equations");
    const Eigen::Vector3d delta = jtj.ldlt().solve(-jtr);
    Vec3 step{delta(0), delta(1), delta(2)};

    double next = cost(s + step);
    while (next > c && norm(step) >= kStepTolKpc) {
      step *= 0.5;
      next = cost(s + step);
    }
    fit.iterations = it;
    if (next <= c) {
      s += step;
      c = next;
    }
    fit.cost_history.push_back(c);
    if (norm(step) < kStepTolKpc) {
      fit.position = s;
      fit.rms_residual_kpc = std::sqrt(c / static_cast<double>(anchors.size()));
      return fit;
    }
  }
  throw Error(ErrorCode::NoConvergence, "Gauss-Newton did not converge in 100 iterations");
}

}  // namespace gstamp
