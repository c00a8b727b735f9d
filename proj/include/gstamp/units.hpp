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

#ifndef GSTAMP_UNITS_HPP_
#define GSTAMP_UNITS_HPP_

namespace gstamp::units {

inline constexpr double kKmPerKpc = 3.0856775814913673e16;
inline constexpr double kKmPerAu = 1.495978707e8;
inline constexpr double kSecondsPerJulianYear = 3.15576e7;
inline constexpr double kSecondsPerMyr = kSecondsPerJulianYear * 1e6;

/// Tangential speed of 1 mas/yr at 1 kpc, km/s (1 AU per Julian year).
inline constexpr double kTangentialVelocityFactor = kKmPerAu / kSecondsPerJulianYear;

/// 1 km/s expressed in kpc/Myr (~1.02271e-3).
inline constexpr double kKpcPerMyrPerKms = kSecondsPerMyr / kKmPerKpc;

/// Years needed to cover 1 kpc at 1 km/s (~9.77792e8).
inline constexpr double kYearsPerKpcPerKms = kKmPerKpc / kSecondsPerJulianYear;

inline constexpr double kPcPerKpc = 1000.0;

}  // namespace gstamp::units

#endif  // GSTAMP_UNITS_HPP_
