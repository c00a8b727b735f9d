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

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>

#include "doctest.h"
#include "gstamp/catalog.hpp"
#include "gstamp/rng.hpp"
#include "gstamp/stamp.hpp"
#include "support.hpp"

namespace gstamp {
namespace {

using testing::error_of;

// Frozen from the first selection run over the bundled snapshot
// (k = 16, min_sep = 1 kpc, no speed cut).
const std::vector<std::string> kGoldenAnchors = {
    "NGC5139", "NGC6441", "NGC6715", "NGC6388", "NGC104",  "NGC2808", "NGC2419", "NGC6440",
    "NGC6266", "NGC7078", "NGC6273", "NGC6402", "NGC7089", "NGC6356", "NGC5272", "NGC5904",
};
const std::vector<std::size_t> kGoldenIndices = {41, 88, 112, 82, 25, 31, 30, 87, 65, 125, 66, 85, 126, 78, 42, 49};

// Bitwise CRC-32 (IEEE 802.3, reflected polynomial 0xEDB88320).
std::uint32_t crc32_oracle(const std::vector<std::uint8_t>& bytes) {
  std::uint32_t crc = 0xFFFFFFFFu;
  for (std::uint8_t b : bytes) {
    crc ^= b;
    for (int i = 0; i < 8; ++i) crc = (crc >> 1) ^ (0xEDB88320u & (0u - (crc & 1u)));
  }
  return ~crc;
}

void push_le(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

// A record observed from the default Sun at galactocentric position `pos`.
ClusterRecord record_at(const std::string& name, const Vec3& pos, double mv, double feh,
                        const Vec3& vel = {0, 220, 0}) {
  ClusterRecord base;
  base.name = name;
  base.mv_abs = mv;
  base.feh_dex = feh;
  base.dist_err_kpc = 0.1;
  return from_galactocentric({pos, vel}, FrameParams{}, base);
}

// Four anchors at tetrahedron vertices (integer parsecs) around the Sun.
Catalog tetrahedron_catalog() {
  const Vec3 sun = sun_position(FrameParams{});
  const std::array<Vec3, 4> offsets = {Vec3{5.0, 5.0, 5.0}, Vec3{5.0, -5.0, -5.0}, Vec3{-5.0, 5.0, -5.0},
                                       Vec3{-5.0, -5.0, 5.0}};
  Catalog cat;
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    cat.records.push_back(
        record_at("T" + std::to_string(i), sun + offsets[i], -9.0 + static_cast<double>(i), -1.0 - 0.5 * i));
  }
  return cat;
}

LocationMap random_map(Rng& rng) {
  LocationMap map;
  map.epoch_jyear = rng.uniform(1900.0, 3000.0);
  const std::size_t k = 4 + rng.index(29);
  while (map.anchors.size() < k) {
    MapAnchor a;
    a.signature = AnchorSignature::quantize(rng.uniform(-15.0, 0.0), rng.uniform(-3.5, 0.5));
    a.pos_rel = {rng.uniform(-80.0, 80.0), rng.uniform(-80.0, 80.0), rng.uniform(-80.0, 80.0)};
    const bool crowded = std::any_of(map.anchors.begin(), map.anchors.end(), [&](const MapAnchor& b) {
      return norm(b.pos_rel - a.pos_rel) <= 0.6;
    });
    if (!crowded) map.anchors.push_back(a);
  }
  return map;
}

TEST_CASE("signature quantization error is at most half a quantum") {
  Rng rng(8);
  for (int i = 0; i < 2000; ++i) {
    const double mv = rng.uniform(-15.0, 0.0);
    const double feh = rng.uniform(-3.5, 0.5);
    const AnchorSignature s = AnchorSignature::quantize(mv, feh);
    CHECK(std::abs(s.mv_abs() - mv) <= 0.125 + 1e-12);
    CHECK(std::abs(s.feh_dex() - feh) <= 0.05 + 1e-12);
  }
  const AnchorSignature a{-36, -12};
  CHECK(a.compatible({-35, -13}));
  CHECK_FALSE(a.compatible({-34, -12}));
  CHECK_FALSE(a.compatible({-36, -10}));
}

TEST_CASE("select_anchors") {
  const FrameParams fp;
  SUBCASE("brightest cluster goes first") {
    Catalog cat = synth_catalog(12, 40);
    double brightest = 0.0;
    for (const auto& r : cat.records) brightest = std::min(brightest, r.mv_abs);
    cat.records[17].mv_abs = std::max(-15.0, brightest - 5.0);
    CHECK(select_anchors(cat, fp, 6, 1.0).front() == 17);
  }
  SUBCASE("ties broken by name") {
    Catalog cat = synth_catalog(12, 10);
    for (auto& r : cat.records) r.mv_abs = -8.0;
    const auto picks = select_anchors(cat, fp, 4, 0.0);
    CHECK(picks == std::vector<std::size_t>{0, 1, 2, 3});
  }
  SUBCASE("bad k") {
    const Catalog cat = synth_catalog(12, 10);
    CHECK(error_of([&] { select_anchors(cat, fp, 3, 1.0); }) == ErrorCode::BadK);
    CHECK(error_of([&] { select_anchors(cat, fp, 11, 1.0); }) == ErrorCode::BadK);
  }
  SUBCASE("separation leaves too few") {
    const Catalog cat = synth_catalog(12, 10);
    CHECK(error_of([&] { select_anchors(cat, fp, 5, 500.0); }) == ErrorCode::TooFewCandidates);
  }
  SUBCASE("chosen anchors respect the separation and speed cut") {
    const Catalog cat = load_reference_snapshot();
    const auto picks = select_anchors(cat, fp, 16, 1.0, 300.0);
    const auto states = galactocentric_states(cat, fp);
    for (std::size_t i = 0; i < picks.size(); ++i) {
      CHECK(norm(states[picks[i]].vel) >= 300.0);
      for (std::size_t j = i + 1; j < picks.size(); ++j) {
        CHECK(norm(states[picks[i]].pos - states[picks[j]].pos) >= 1.0);
      }
    }
  }
  SUBCASE("golden fixture on the reference snapshot") {
    const Catalog cat = load_reference_snapshot();
    const auto picks = select_anchors(cat, fp, 16, 1.0);
    CHECK(picks == kGoldenIndices);
    std::vector<std::string> names;
    for (auto i : picks) names.push_back(cat.records[i].name);
    CHECK(names == kGoldenAnchors);
  }
}

TEST_CASE("build_location_map") {
  const FrameParams fp;
  SUBCASE("tetrahedron around the Sun") {
    const Catalog cat = tetrahedron_catalog();
    const std::vector<std::size_t> idx = {0, 1, 2, 3};
    const LocationMap map = build_location_map(cat, fp, idx);
    REQUIRE(map.k() == 4);
    CHECK(map.epoch_jyear == cat.epoch_jyear);
    CHECK(norm(map.anchors[0].pos_rel - Vec3{5, 5, 5}) <= 0.0005 * std::sqrt(3.0));
    CHECK(norm(map.anchors[3].pos_rel - Vec3{-5, -5, 5}) <= 0.0005 * std::sqrt(3.0));
    CHECK(map.anchors[1].signature == AnchorSignature::quantize(-8.0, -1.5));
  }
  SUBCASE("collinear anchors") {
    const Vec3 sun = sun_position(fp);
    Catalog cat;
    for (int i = 0; i < 5; ++i) cat.records.push_back(record_at("L" + std::to_string(i), sun + Vec3{2.0 + i, 0, 0}, -8, -1));
    const std::vector<std::size_t> idx = {0, 1, 2, 3, 4};
    CHECK(error_of([&] { build_location_map(cat, fp, idx); }) == ErrorCode::DegenerateGeometry);
  }
  SUBCASE("crowded anchors") {
    const Vec3 sun = sun_position(fp);
    Catalog cat = tetrahedron_catalog();
    cat.records.push_back(record_at("near", sun + Vec3{5.2, 5.0, 5.0}, -8, -1));
    const std::vector<std::size_t> idx = {0, 1, 2, 3, 4};
    CHECK(error_of([&] { build_location_map(cat, fp, idx); }) == ErrorCode::DegenerateGeometry);
  }
  SUBCASE("too few anchors") {
    const std::vector<std::size_t> idx = {0, 1, 2};
    CHECK(error_of([&] { build_location_map(tetrahedron_catalog(), fp, idx); }) == ErrorCode::BadK);
  }
  SUBCASE("golden anchors") {
    const Catalog cat = load_reference_snapshot();
    const LocationMap map = build_location_map(cat, fp, kGoldenIndices);
    CHECK(map.k() == 16);
    CHECK(map.epoch_jyear == cat.epoch_jyear);
    const Vec3 sun = sun_position(fp);
    for (std::size_t i = 0; i < map.k(); ++i) {
      const Vec3 truth = to_galactocentric(cat.records[kGoldenIndices[i]], fp).pos - sun;
      CHECK(norm(map.anchors[i].pos_rel - truth) <= 0.0005 * std::sqrt(3.0));
    }
  }
}

TEST_CASE("encoded bytes match a hand-assembled stamp") {
  LocationMap map;
  map.epoch_jyear = 2016.5;
  map.anchors = {{{-36, -12}, {1.234, -5.0, 0.0}},
                 {{-30, -5}, {-10.0, 2.5, 3.0}},
                 {{-20, 3}, {0.0, 0.0, 7.777}},
                 {{0, -35}, {20.0, -20.0, -20.0}}};
  std::vector<std::uint8_t> expected = {'M', 'I', 'A', 'B', 1};
  push_le(expected, 4, 2);
  std::uint64_t epoch_bits;
  std::memcpy(&epoch_bits, &map.epoch_jyear, 8);
  push_le(expected, epoch_bits, 8);
  const std::int32_t pcs[4][3] = {{1234, -5000, 0}, {-10000, 2500, 3000}, {0, 0, 7777}, {20000, -20000, -20000}};
  for (std::size_t i = 0; i < 4; ++i) {
    push_le(expected, static_cast<std::uint16_t>(map.anchors[i].signature.mv_q), 2);
    push_le(expected, static_cast<std::uint16_t>(map.anchors[i].signature.feh_q), 2);
    for (int c = 0; c < 3; ++c) push_le(expected, static_cast<std::uint32_t>(pcs[i][c]), 4);
  }
  push_le(expected, crc32_oracle(expected), 4);

  const auto bytes = encode_stamp(map);
  CHECK(bytes.size() == 15 + 16 * 4 + 4);
  CHECK(bytes == expected);
  CHECK(decode_stamp(bytes) == map);
}

TEST_CASE("decode errors") {
  const LocationMap map = build_location_map(tetrahedron_catalog(), FrameParams{}, std::vector<std::size_t>{0, 1, 2, 3});
  const auto good = encode_stamp(map);

  CHECK(error_of([] { decode_stamp({}); }) == ErrorCode::Truncated);
  CHECK(error_of([&] { decode_stamp(std::span(good).first(3)); }) == ErrorCode::Truncated);
  CHECK(error_of([&] { decode_stamp(std::span(good).first(10)); }) == ErrorCode::Truncated);
  CHECK(error_of([&] { decode_stamp(std::span(good).first(good.size() - 1)); }) == ErrorCode::Truncated);

  auto longer = good;
  longer.push_back(0);
  CHECK(error_of([&] { decode_stamp(longer); }) == ErrorCode::Truncated);

  auto magic = good;
  magic[0] = 'X';
  CHECK(error_of([&] { decode_stamp(magic); }) == ErrorCode::BadMagic);

  auto version = good;
  version[4] = 2;
  CHECK(error_of([&] { decode_stamp(version); }) == ErrorCode::UnsupportedVersion);

  auto checksum = good;
  checksum.back() ^= 0x01;
  CHECK(error_of([&] { decode_stamp(checksum); }) == ErrorCode::ChecksumFail);

  auto payload = good;
  payload[20] ^= 0x40;
  CHECK(error_of([&] { decode_stamp(payload); }) == ErrorCode::ChecksumFail);
}

TEST_CASE("encode rejects invalid maps") {
  LocationMap map;
  map.anchors = {{{}, {1, 0, 0}}, {{}, {0, 1, 0}}, {{}, {0, 0, 1}}};
  CHECK(error_of([&] { encode_stamp(map); }) == ErrorCode::InvariantViolation);
  map.anchors.push_back({{}, {1.2, 0, 0}});
  CHECK(error_of([&] { encode_stamp(map); }) == ErrorCode::DegenerateGeometry);
}

TEST_CASE("codec round trip over random maps") {
  Rng rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    const LocationMap map = random_map(rng);
    const auto bytes = encode_stamp(map);
    const LocationMap back = decode_stamp(bytes);
    REQUIRE(back.k() == map.k());
    CHECK(back.epoch_jyear == map.epoch_jyear);
    double worst = 0.0;
    for (std::size_t i = 0; i < map.k(); ++i) {
      CHECK(back.anchors[i].signature == map.anchors[i].signature);
      const Vec3 d = back.anchors[i].pos_rel - map.anchors[i].pos_rel;
      worst = std::max({worst, std::abs(d.x), std::abs(d.y), std::abs(d.z)});
    }
    CHECK(worst <= 0.0005 + 1e-12);
    CHECK(encode_stamp(back) == bytes);
  }
}

TEST_CASE("coarser position quantum") {
  Rng rng(5);
  const LocationMap map = random_map(rng);
  const StampQuantization q{10.0};
  const LocationMap back = decode_stamp(encode_stamp(map, q));
  for (std::size_t i = 0; i < map.k(); ++i) {
    const Vec3 d = back.anchors[i].pos_rel - map.anchors[i].pos_rel;
    CHECK(std::max({std::abs(d.x), std::abs(d.y), std::abs(d.z)}) <= 0.005 + 1e-12);
    CHECK(std::fmod(std::round(back.anchors[i].pos_rel.x * 1000.0), 10.0) == 0.0);
  }
}

TEST_CASE("text dump round trip") {
  Rng rng(17);
  const LocationMap map = decode_stamp(encode_stamp(random_map(rng)));
  const std::string text = dump_stamp(map);
  CHECK(parse_stamp_dump(text) == map);
  CHECK(encode_stamp(parse_stamp_dump(text)) == encode_stamp(map));
  CHECK(error_of([] { parse_stamp_dump("k = 5\nanchor,mv_q\n0,1\n"); }) == ErrorCode::ParseError);
}

TEST_CASE("match_anchors") {
  const FrameParams fp;
  const Catalog cat = load_reference_snapshot();
  const LocationMap map = decode_stamp(encode_stamp(build_location_map(cat, fp, kGoldenIndices)));

  SUBCASE("same catalog gives the identity") {
    const Correspondence corr = match_anchors(map, cat, fp);
    REQUIRE(corr.pairs.size() == 16);
    for (std::size_t a = 0; a < 16; ++a) {
      CHECK(corr.pairs[a].first == a);
      CHECK(corr.pairs[a].second == kGoldenIndices[a]);
    }
    CHECK(corr.rms_residual_kpc < 0.002);
  }

  SUBCASE("permuted rows give the inverse permutation") {
    Rng rng(21);
    for (int trial = 0; trial < 5; ++trial) {
      const auto perm = rng.permutation(cat.size());
      Catalog shuffled = cat;
      std::vector<std::size_t> where(cat.size());
      for (std::size_t i = 0; i < perm.size(); ++i) {
        shuffled.records[i] = cat.records[perm[i]];
        where[perm[i]] = i;
      }
      const Correspondence corr = match_anchors(map, shuffled, fp);
      for (std::size_t a = 0; a < 16; ++a) CHECK(corr.pairs[a].second == where[kGoldenIndices[a]]);
    }
  }

  SUBCASE("distance noise of 0.1 kpc") {
    const double sigma = 0.1;
    int good = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      Rng rng(seed);
      Catalog noisy = cat;
      for (auto& r : noisy.records) r.dist_kpc = std::max(0.05, r.dist_kpc + rng.normal(0.0, sigma));
      try {
        const Correspondence corr = match_anchors(map, noisy, fp);
        bool right = corr.rms_residual_kpc <= 3.0 * sigma;
        for (std::size_t a = 0; a < 16; ++a) right = right && corr.pairs[a].second == kGoldenIndices[a];
        good += right;
      } catch (const Error&) {
      }
    }
    CHECK(good >= 95);
  }

  SUBCASE("a duplicated anchor is ambiguous") {
    Catalog twin = cat;
    ClusterRecord copy = cat.records[kGoldenIndices[3]];
    copy.name = "TWIN";
    twin.records.push_back(copy);
    CHECK(error_of([&] { match_anchors(map, twin, fp); }) == ErrorCode::MatchAmbiguous);
  }

  SUBCASE("no consistent assignment") {
    Catalog far = cat;
    for (auto& r : far.records) r.dist_kpc *= 3.0;
    CHECK(error_of([&] { match_anchors(map, far, fp); }) == ErrorCode::NoMatch);

    LocationMap odd = map;
    odd.anchors[0].signature = {40, 40};
    CHECK(error_of([&] { match_anchors(odd, cat, fp); }) == ErrorCode::NoMatch);
  }
}

TEST_CASE("locate_sender") {
  const FrameParams fp;
  const Vec3 sun = sun_position(fp);

  SUBCASE("noiseless tetrahedron") {
    const Catalog cat = tetrahedron_catalog();
    const LocationMap map = build_location_map(cat, fp, std::vector<std::size_t>{0, 1, 2, 3});
    Correspondence corr;
    for (std::size_t i = 0; i < 4; ++i) corr.pairs.emplace_back(i, i);
    const SenderFit fit = locate_sender(corr, map, cat, fp);
    CHECK(norm(fit.position - sun) < 1e-6);
    CHECK(fit.iterations <= 100);
    for (std::size_t i = 1; i < fit.cost_history.size(); ++i) CHECK(fit.cost_history[i] <= fit.cost_history[i - 1]);
  }

  SUBCASE("coplanar anchors") {
    Catalog cat;
    const std::array<Vec3, 5> offsets = {Vec3{5, 0, 0}, Vec3{0, 5, 0}, Vec3{-5, 0, 0}, Vec3{0, -5, 0}, Vec3{3, 3, 0}};
    for (std::size_t i = 0; i < offsets.size(); ++i) {
      cat.records.push_back(record_at("P" + std::to_string(i), sun + offsets[i] + Vec3{0, 0, 2}, -8, -1));
    }
    const LocationMap map = build_location_map(cat, fp, std::vector<std::size_t>{0, 1, 2, 3, 4});
    Correspondence corr;
    for (std::size_t i = 0; i < 5; ++i) corr.pairs.emplace_back(i, i);
    CHECK(error_of([&] { locate_sender(corr, map, cat, fp); }) == ErrorCode::Degenerate);
    corr.pairs.resize(3);
    CHECK(error_of([&] { locate_sender(corr, map, cat, fp); }) == ErrorCode::Degenerate);
  }

  SUBCASE("distance noise of 0.1 kpc, k = 16") {
    const Catalog cat = load_reference_snapshot();
    const LocationMap map = build_location_map(cat, fp, kGoldenIndices);
    Correspondence corr;
    for (std::size_t a = 0; a < 16; ++a) corr.pairs.emplace_back(a, kGoldenIndices[a]);
    std::vector<double> errors;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      Rng rng(seed);
      Catalog noisy = cat;
      for (auto& r : noisy.records) r.dist_kpc = std::max(0.05, r.dist_kpc + rng.normal(0.0, 0.1));
      const SenderFit fit = locate_sender(corr, map, noisy, fp);
      for (std::size_t i = 1; i < fit.cost_history.size(); ++i) CHECK(fit.cost_history[i] <= fit.cost_history[i - 1]);
      errors.push_back(norm(fit.position - sun));
    }
    std::nth_element(errors.begin(), errors.begin() + 50, errors.end());
    CHECK(errors[50] < 0.2);
  }
}

}  // namespace
}  // namespace gstamp
