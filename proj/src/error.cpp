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

#include "gstamp/error.hpp"

namespace gstamp {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::BadNumber: return "BadNumber";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::NetworkUnavailable: return "NetworkUnavailable";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::CacheUnwritable: return "CacheUnwritable";
    case ErrorCode::BadCount: return "BadCount";
    case ErrorCode::DegenerateDirection: return "DegenerateDirection";
    case ErrorCode::BadRadius: return "BadRadius";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::EmptyCatalog: return "EmptyCatalog";
    case ErrorCode::BadK: return "BadK";
    case ErrorCode::TooFewCandidates: return "TooFewCandidates";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::ChecksumFail: return "ChecksumFail";
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::MatchAmbiguous: return "MatchAmbiguous";
    case ErrorCode::NoMatch: return "NoMatch";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::ZeroVelocity: return "ZeroVelocity";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::MatchFailed: return "MatchFailed";
    case ErrorCode::WindowTooNarrow: return "WindowTooNarrow";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::UnknownCluster: return "UnknownCluster";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

bool is_numerical(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonFinite:
    case ErrorCode::Degenerate:
    case ErrorCode::NoConvergence:
    case ErrorCode::WindowTooNarrow:
      return true;
    default:
      return false;
  }
}

namespace {

std::string format_what(ErrorCode code, const std::string& detail) {
  std::string out(error_name(code));
  if (!detail.empty()) {
    out += ": ";
    out += detail;
  }
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(format_what(code, detail)), code_(code), detail_(detail) {}

}  // namespace gstamp
