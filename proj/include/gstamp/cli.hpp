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

#ifndef GSTAMP_CLI_HPP_
#define GSTAMP_CLI_HPP_

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace gstamp {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumerical = 3;

/// Runs one command line; args[0] is the program name. Results go to `out`
/// unless --out names a file, diagnostics to `err` as a single line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

/// "0.5Myr", "500kyr", "0.5" (Myr assumed). Throws ParseError.
double parse_duration_myr(std::string_view text);

/// "0.1kpc", "100pc", "0.1" (kpc assumed). Throws ParseError.
double parse_length_kpc(std::string_view text);

}  // namespace gstamp

#endif  // GSTAMP_CLI_HPP_
