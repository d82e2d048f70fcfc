// Copyright 2026 The crgate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <numbers>

namespace crgate {

// Frequencies are ordinary MHz (the "/2pi" values), times are ns.
// angular() is the single place where 2pi enters: it yields rad/ns.
inline constexpr double kRadPerNsPerMHz = 2.0 * std::numbers::pi * 1e-3;

constexpr double angular(double f_mhz) noexcept { return kRadPerNsPerMHz * f_mhz; }
constexpr double ordinary(double w_rad_per_ns) noexcept { return w_rad_per_ns / kRadPerNsPerMHz; }

// Wrap to (-pi, pi].
inline double wrap_angle(double a) noexcept {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::remainder(a, two_pi);
    if (r <= -std::numbers::pi) r += two_pi;
    return r;
}

}  // namespace crgate
