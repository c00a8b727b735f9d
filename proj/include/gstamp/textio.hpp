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

// Locale-independent number formatting and small text utilities shared by the
// CSV writers, the config loader and the CLI.

#ifndef GSTAMP_TEXTIO_HPP_
#define GSTAMP_TEXTIO_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gstamp {

/// Shortest representation that parses back to the same double.
std::string format_double(double value);

/// Fixed notation with `digits` decimals, correctly rounded.
std::string format_fixed(double value, int digits);

/// Strict parse of the whole string (surrounding blanks allowed); nullopt on
/// any trailing garbage, empty input or overflow.
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

std::string_view trim(std::string_view text);
std::vector<std::string_view> split(std::string_view text, char sep);
std::vector<std::string_view> split_whitespace(std::string_view text);

/// Lines without their terminator; a trailing "\r" is stripped.
std::vector<std::string_view> split_lines(std::string_view text);

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace gstamp

#endif  // GSTAMP_TEXTIO_HPP_
