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

#ifndef GSTAMP_ERROR_HPP_
#define GSTAMP_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace gstamp {

enum class ErrorCode {
  // catalog
  MissingColumn,
  BadNumber,
  InvariantViolation,
  DuplicateName,
  NetworkUnavailable,
  ChecksumMismatch,
  CacheUnwritable,
  BadCount,
  // frames
  DegenerateDirection,
  // dynamics
  BadRadius,
  NonFinite,
  EmptyCatalog,
  // stamp
  BadK,
  TooFewCandidates,
  DegenerateGeometry,
  BadMagic,
  UnsupportedVersion,
  ChecksumFail,
  Truncated,
  MatchAmbiguous,
  NoMatch,
  Degenerate,
  NoConvergence,
  // epoch
  ZeroVelocity,
  EmptyGrid,
  MatchFailed,
  WindowTooNarrow,
  // config / cli
  ParseError,
  UnknownKey,
  UnknownCluster,
  Io,
};

/// Stable identifier printed in diagnostics, e.g. "Truncated".
std::string_view error_name(ErrorCode code) noexcept;

/// Whether the error reflects a numerical failure (CLI exit 3) rather than
/// bad input data (CLI exit 2).
bool is_numerical(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace gstamp

#endif  // GSTAMP_ERROR_HPP_
