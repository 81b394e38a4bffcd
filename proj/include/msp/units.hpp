// Copyright 2026 The msparallel Authors
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

#pragma once

#include <numbers>

// Internal convention: time in microseconds, frequencies as angular
// frequencies in rad/us. Anything user-facing is in MHz (omega / 2pi).
namespace msp {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kHalfPi = 0.5 * std::numbers::pi;

constexpr double mhz_to_angular(double mhz) { return kTwoPi * mhz; }
constexpr double angular_to_mhz(double omega) { return omega / kTwoPi; }

}  // namespace msp
