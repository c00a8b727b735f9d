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

#include "gstamp/catalog.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <numbers>
#include <set>

#include "gstamp/error.hpp"
#include "gstamp/rng.hpp"
#include "gstamp/textio.hpp"
#include "gstamp/units.hpp"

#ifndef GSTAMP_DATA_DIR
#define GSTAMP_DATA_DIR "data"
#endif

namespace gstamp {

namespace {

using Field = double ClusterRecord::*;

struct NumericColumn {
  const char* name;
  Field field;
};

constexpr std::array<NumericColumn, 9> kNumericColumns{{
    {"ra_deg", &ClusterRecord::ra_deg},
    {"dec_deg", &ClusterRecord::dec_deg},
    {"dist_kpc", &ClusterRecord::dist_kpc},
    {"dist_err_kpc", &ClusterRecord::dist_err_kpc},
    {"pmra_masyr", &ClusterRecord::pmra_masyr},
    {"pmdec_masyr", &ClusterRecord::pmdec_masyr},
    {"rv_kms", &ClusterRecord::rv_kms},
    {"mv_abs", &ClusterRecord::mv_abs},
    {"feh_dex", &ClusterRecord::feh_dex},
}};

std::string row_label(std::size_t row) { return "row " + std::to_string(row); }

bool is_comment_or_blank(std::string_view line) {
  const auto t = trim(line);
  return t.empty() || t.front() == '#';
}

}  // namespace

const std::vector<std::string>& catalog_columns() {
  static const std::vector<std::string> columns = [] {
    std::vector<std::string> c{"name"};
    for (const auto& col : kNumericColumns) c.emplace_back(col.name);
    return c;
  }();
  return columns;
}

std::optional<std::string> record_invariant_violation(const ClusterRecord& rec) {
  if (rec.name.empty()) return "empty name";
  if (rec.name.find_first_of(",\n\r#") != std::string::npos) return "name contains a reserved character";
  for (const auto& col : kNumericColumns) {
    if (!std::isfinite(rec.*col.field)) return std::string(col.name) + " is not finite";
  }
  if (rec.ra_deg < 0.0 || rec.ra_deg >= 360.0) return "ra_deg outside [0, 360)";
  if (rec.dec_deg < -90.0 || rec.dec_deg > 90.0) return "dec_deg outside [-90, 90]";
  if (rec.dist_kpc <= 0.0) return "dist_kpc must be positive";
  if (rec.dist_err_kpc < 0.0) return "dist_err_kpc must be non-negative";
  if (rec.mv_abs < -15.0 || rec.mv_abs > 0.0) return "mv_abs outside [-15, 0]";
  if (rec.feh_dex < -3.5 || rec.feh_dex > 0.5) return "feh_dex outside [-3.5, 0.5]";
  return std::nullopt;
}

void check_catalog(const Catalog& cat) {
  if (cat.records.empty()) throw Error(ErrorCode::EmptyCatalog, "catalog has no records");
  std::set<std::string_view> seen;
  for (std::size_t i = 0; i < cat.records.size(); ++i) {
    const auto& rec = cat.records[i];
    if (auto v = record_invariant_violation(rec)) {
      throw Error(ErrorCode::InvariantViolation, row_label(i + 1) + " (" + rec.name + "): " + *v);
    }
    if (!seen.insert(rec.name).second) throw Error(ErrorCode::DuplicateName, rec.name);
  }
}

Catalog parse_catalog(std::string_view text, double epoch_jyear) {
  const auto lines = split_lines(text);
  std::size_t li = 0;
  while (li < lines.size() && is_comment_or_blank(lines[li])) ++li;
  if (li == lines.size()) throw Error(ErrorCode::MissingColumn, "name");

  std::map<std::string, std::size_t, std::less<>> header;
  const auto header_cells = split(lines[li], ',');
  for (std::size_t c = 0; c < header_cells.size(); ++c) {
    header.emplace(std::string(trim(header_cells[c])), c);
  }
  std::vector<std::size_t> index;
  for (const auto& name : catalog_columns()) {
    auto it = header.find(name);
    if (it == header.end()) throw Error(ErrorCode::MissingColumn, name);
    index.push_back(it->second);
  }
  ++li;

  Catalog cat;
  cat.epoch_jyear = epoch_jyear;
  std::set<std::string, std::less<>> names;
  std::size_t row = 0;
  for (; li < lines.size(); ++li) {
    if (is_comment_or_blank(lines[li])) continue;
    ++row;
    const auto cells = split(lines[li], ',');
    auto cell = [&](std::size_t col) -> std::string_view {
      const std::size_t at = index[col];
      if (at >= cells.size()) {
        throw Error(ErrorCode::BadNumber, row_label(row) + ", column " + catalog_columns()[col] + ": missing field");
      }
      return trim(cells[at]);
    };
    ClusterRecord rec;
    rec.name = std::string(cell(0));
    for (std::size_t c = 0; c < kNumericColumns.size(); ++c) {
      const auto raw = cell(c + 1);
      const auto value = parse_double(raw);
      if (!value || !std::isfinite(*value)) {
        throw Error(ErrorCode::BadNumber, row_label(row) + ", column " + kNumericColumns[c].name + ": '" +
                                              std::string(raw) + "'");
      }
      rec.*kNumericColumns[c].field = *value;
    }
    if (auto v = record_invariant_violation(rec)) {
      throw Error(ErrorCode::InvariantViolation, row_label(row) + " (" + rec.name + "): " + *v);
    }
    if (!names.insert(rec.name).second) throw Error(ErrorCode::DuplicateName, rec.name);
    cat.records.push_back(std::move(rec));
  }
  if (cat.records.empty()) throw Error(ErrorCode::EmptyCatalog, "no data rows");
  return cat;
}

std::string serialize_catalog(const Catalog& cat, const std::vector<std::string>& comments) {
  std::string out;
  for (const auto& c : comments) {
    out += "# ";
    out += c;
    out += '\n';
  }
  const auto& cols = catalog_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out += ',';
    out += cols[i];
  }
  out += '\n';
  for (const auto& rec : cat.records) {
    out += rec.name;
    for (const auto& col : kNumericColumns) {
      out += ',';
      out += format_double(rec.*col.field);
    }
    out += '\n';
  }
  return out;
}

Catalog load_catalog_file(const std::filesystem::path& path, double default_epoch) {
  const std::string text = read_file(path);
  double epoch = default_epoch;
  std::string provenance = path.filename().string();
  for (auto line : split_lines(text)) {
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() != '#') break;
    line.remove_prefix(1);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) continue;
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key == "epoch_jyear") {
      const auto parsed = parse_double(value);
      if (!parsed) throw Error(ErrorCode::BadNumber, "epoch_jyear comment: '" + std::string(value) + "'");
      epoch = *parsed;
    }
  }
  Catalog cat = parse_catalog(text, epoch);
  cat.provenance = std::move(provenance);
  return cat;
}

std::filesystem::path reference_snapshot_path() {
  if (const char* dir = std::getenv("GSTAMP_DATA")) {
    return std::filesystem::path(dir) / "reference_snapshot.csv";
  }
  return std::filesystem::path(GSTAMP_DATA_DIR) / "reference_snapshot.csv";
}

Catalog load_reference_snapshot() {
  Catalog cat = load_catalog_file(reference_snapshot_path());
  cat.provenance = "reference snapshot (Vasiliev & Baumgardt 2021 kinematics)";
  return cat;
}

std::size_t ValidationReport::count(ValidationIssue::Severity s) const {
  return static_cast<std::size_t>(
      std::count_if(issues.begin(), issues.end(), [s](const ValidationIssue& i) { return i.severity == s; }));
}

ValidationReport validate(const Catalog& cat) {
  using Severity = ValidationIssue::Severity;
  ValidationReport report;
  auto add = [&](Severity s, std::size_t i, std::string detail) {
    report.issues.push_back({s, i, cat.records[i].name, std::move(detail)});
  };
  if (cat.records.empty()) {
    report.issues.push_back({Severity::Error, 0, "", "catalog has no records"});
    return report;
  }
  std::set<std::string_view> seen;
  for (std::size_t i = 0; i < cat.records.size(); ++i) {
    const auto& rec = cat.records[i];
    if (auto v = record_invariant_violation(rec)) add(Severity::Error, i, *v);
    if (!seen.insert(rec.name).second) add(Severity::Error, i, "duplicate name");
    if (rec.dist_err_kpc > rec.dist_kpc) add(Severity::Warning, i, "distance error exceeds distance");
    if (rec.dist_err_kpc == 0.0) add(Severity::Warning, i, "zero distance error");
    const double vt = units::kTangentialVelocityFactor * rec.dist_kpc * std::hypot(rec.pmra_masyr, rec.pmdec_masyr);
    if (vt > 1000.0) add(Severity::Warning, i, "tangential speed above 1000 km/s");
    if (std::abs(rec.rv_kms) > 1000.0) add(Severity::Warning, i, "radial velocity above 1000 km/s");
  }
  return report;
}

Catalog synth_catalog(std::uint64_t seed, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::BadCount, "n must be at least 1");
  Rng rng(seed);
  Catalog cat;
  cat.epoch_jyear = 2016.0;
  cat.provenance = "synthetic seed=" + std::to_string(seed) + " n=" + std::to_string(n);
  cat.records.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    ClusterRecord rec;
    char name[32];
    std::snprintf(name, sizeof name, "SYN-%04zu", i + 1);
    rec.name = name;
    rec.ra_deg = rng.uniform(0.0, 360.0);
    rec.dec_deg = std::asin(rng.uniform(-1.0, 1.0)) * 180.0 / std::numbers::pi;
    rec.dist_kpc = rng.uniform(1.0, 40.0);
    rec.dist_err_kpc = rec.dist_kpc * rng.uniform(0.01, 0.05);
    // Heliocentric velocity components up to 250 km/s each, |v| <= ~433 km/s.
    const double vt_ra = rng.uniform(-250.0, 250.0);
    const double vt_dec = rng.uniform(-250.0, 250.0);
    rec.pmra_masyr = vt_ra / (units::kTangentialVelocityFactor * rec.dist_kpc);
    rec.pmdec_masyr = vt_dec / (units::kTangentialVelocityFactor * rec.dist_kpc);
    rec.rv_kms = rng.uniform(-250.0, 250.0);
    rec.mv_abs = std::clamp(rng.normal(-10.0, 2.0), -15.0, 0.0);
    rec.feh_dex = std::clamp(rng.normal(-1.5, 0.6), -3.5, 0.5);
    cat.records.push_back(std::move(rec));
  }
  return cat;
}

namespace {

// Upstream column aliases, compared case-insensitively with punctuation
// removed ("[Fe/H]" -> "feh", "<RV>" -> "rv").
const std::map<std::string, std::string, std::less<>>& upstream_aliases() {
  static const std::map<std::string, std::string, std::less<>> aliases{
      {"cluster", "name"},      {"name", "name"},          {"id", "name"},
      {"ra", "ra_deg"},         {"radeg", "ra_deg"},       {"dec", "dec_deg"},
      {"decdeg", "dec_deg"},    {"rsun", "dist_kpc"},      {"dist", "dist_kpc"},
      {"distkpc", "dist_kpc"},  {"ersun", "dist_err_kpc"}, {"rsunerr", "dist_err_kpc"},
      {"disterr", "dist_err_kpc"}, {"disterrkpc", "dist_err_kpc"},
      {"pmra", "pmra_masyr"},   {"mualpha", "pmra_masyr"}, {"mualphacosdelta", "pmra_masyr"},
      {"pmramasyr", "pmra_masyr"}, {"pmdec", "pmdec_masyr"}, {"mudelta", "pmdec_masyr"},
      {"pmdecmasyr", "pmdec_masyr"}, {"rv", "rv_kms"},     {"vlos", "rv_kms"},
      {"rvkms", "rv_kms"},      {"mv", "mv_abs"},          {"mvabs", "mv_abs"},
      {"feh", "feh_dex"},       {"fehdex", "feh_dex"},
  };
  return aliases;
}

std::string alias_key(std::string_view raw) {
  std::string key;
  for (char ch : raw) {
    if ((ch >= 'A' && ch <= 'Z')) key.push_back(static_cast<char>(ch - 'A' + 'a'));
    else if ((ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9')) key.push_back(ch);
  }
  return key;
}

bool is_missing(std::string_view cell) {
  const auto t = trim(cell);
  return t.empty() || t == "-" || t == "--" || t == "nan" || t == "NaN" || t == "NA" || t == "na";
}

}  // namespace

std::string convert_upstream_table(std::string_view text) {
  const auto lines = split_lines(text);
  std::size_t li = 0;
  while (li < lines.size() && is_comment_or_blank(lines[li])) ++li;
  if (li == lines.size()) throw Error(ErrorCode::MissingColumn, "name");

  std::map<std::string, std::size_t, std::less<>> column_of;
  const auto header = split_whitespace(lines[li]);
  for (std::size_t c = 0; c < header.size(); ++c) {
    auto it = upstream_aliases().find(alias_key(header[c]));
    if (it != upstream_aliases().end()) column_of.emplace(it->second, c);
  }
  const std::array<const char*, 7> required{"name",       "ra_deg",      "dec_deg", "dist_kpc",
                                            "pmra_masyr", "pmdec_masyr", "rv_kms"};
  for (const char* r : required) {
    if (!column_of.count(r)) throw Error(ErrorCode::MissingColumn, r);
  }

  Catalog cat;
  const ClusterRecord defaults;
  for (++li; li < lines.size(); ++li) {
    if (is_comment_or_blank(lines[li])) continue;
    const auto cells = split_whitespace(lines[li]);
    auto get = [&](const char* col) -> std::optional<std::string_view> {
      auto it = column_of.find(col);
      if (it == column_of.end() || it->second >= cells.size() || is_missing(cells[it->second])) return std::nullopt;
      return cells[it->second];
    };
    bool complete = true;
    for (const char* r : required) complete = complete && get(r).has_value();
    if (!complete) continue;

    ClusterRecord rec;
    rec.name = std::string(*get("name"));
    for (const auto& col : kNumericColumns) {
      if (auto raw = get(col.name)) {
        auto v = parse_double(*raw);
        if (!v) throw Error(ErrorCode::BadNumber, rec.name + ", column " + col.name + ": '" + std::string(*raw) + "'");
        rec.*col.field = *v;
      } else {
        rec.*col.field = defaults.*col.field;
      }
    }
    cat.records.push_back(std::move(rec));
  }
  return serialize_catalog(cat);
}

}  // namespace gstamp
