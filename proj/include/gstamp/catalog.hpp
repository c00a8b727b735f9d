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

// Globular-cluster catalogs: CSV ingestion, validation, synthetic fixtures
// and the cached download of upstream snapshots.

#ifndef GSTAMP_CATALOG_HPP_
#define GSTAMP_CATALOG_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gstamp {

/// Observables of one globular cluster (J2000 equatorial, heliocentric).
struct ClusterRecord {
  std::string name;
  double ra_deg = 0.0;
  double dec_deg = 0.0;
  double dist_kpc = 1.0;
  double dist_err_kpc = 0.0;
  double pmra_masyr = 0.0;  // includes the cos(dec) factor
  double pmdec_masyr = 0.0;
  double rv_kms = 0.0;
  double mv_abs = -7.0;
  double feh_dex = -1.5;

  friend bool operator==(const ClusterRecord&, const ClusterRecord&) = default;
};

struct Catalog {
  double epoch_jyear = 2016.0;
  std::vector<ClusterRecord> records;
  std::string provenance;

  std::size_t size() const noexcept { return records.size(); }
  friend bool operator==(const Catalog&, const Catalog&) = default;
};

/// Column names in canonical order; also the exact header written by
/// serialize_catalog.
const std::vector<std::string>& catalog_columns();

/// Describes the first violated record invariant, or nullopt when valid.
std::optional<std::string> record_invariant_violation(const ClusterRecord& rec);

/// Throws InvariantViolation / DuplicateName / EmptyCatalog.
void check_catalog(const Catalog& cat);

/// Parses canonical CSV. Lines starting with '#' and blank lines are skipped;
/// header columns may appear in any order. Row numbers in errors are 1-based
/// data rows.
Catalog parse_catalog(std::string_view text, double epoch_jyear);

/// Canonical CSV. Each entry of `comments` becomes one "# ..." line ahead of
/// the header.
std::string serialize_catalog(const Catalog& cat, const std::vector<std::string>& comments = {});

/// Reads a catalog file; "# epoch_jyear = <value>" in the comment block
/// overrides `default_epoch`.
Catalog load_catalog_file(const std::filesystem::path& path, double default_epoch = 2016.0);

std::filesystem::path reference_snapshot_path();
Catalog load_reference_snapshot();

struct ValidationIssue {
  enum class Severity { Warning, Error };
  Severity severity = Severity::Warning;
  std::size_t index = 0;
  std::string name;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool empty() const noexcept { return issues.empty(); }
  std::size_t count(ValidationIssue::Severity s) const;
  std::size_t warnings() const { return count(ValidationIssue::Severity::Warning); }
  std::size_t errors() const { return count(ValidationIssue::Severity::Error); }
};

/// Reports invariant breaches (errors) and suspicious-but-legal values
/// (warnings). Never throws and never modifies `cat`.
ValidationReport validate(const Catalog& cat);

/// Deterministic synthetic catalog: same (seed, n) gives byte-identical
/// serialized output. Throws BadCount for n == 0.
Catalog synth_catalog(std::uint64_t seed, std::size_t n);

/// Converts a whitespace-delimited upstream table (header row first, '#'
/// comments allowed) to canonical CSV. Column names are matched against
/// common aliases (RA, DEC, Rsun, ERsun, PMRA, PMDEC, RV, Mv, FeH...). Rows
/// lacking any kinematic field are dropped; missing Mv/FeH fall back to the
/// record defaults.
std::string convert_upstream_table(std::string_view text);

using Downloader = std::function<std::string(const std::string& url)>;

struct FetchOptions {
  bool offline = false;
  /// Empty means the built-in libcurl client.
  Downloader downloader;
};

/// Cache directory after applying GSTAMP_CACHE.
std::filesystem::path resolve_cache_dir(const std::filesystem::path& fallback);

/// True when GSTAMP_OFFLINE=1.
bool offline_from_env();

/// Returns the cached copy of `url` when its sidecar checksum matches,
/// otherwise downloads it and stores <sha256(url)>.csv plus a .sha256
/// sidecar. Writes are serialized through an advisory lock on
/// <cache_dir>/.lock. Offline mode (option or GSTAMP_OFFLINE=1) never touches
/// the network.
std::string fetch_snapshot(const std::string& url, const std::filesystem::path& cache_dir,
                           const FetchOptions& options = {});

/// Downloads with libcurl; throws NetworkUnavailable on any transfer failure.
std::string curl_download(const std::string& url);

}  // namespace gstamp

#endif  // GSTAMP_CATALOG_HPP_
