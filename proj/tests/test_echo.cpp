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

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "crgate/echo.hpp"
#include "crgate/errorbudget.hpp"
#include "crgate/semianalytic.hpp"

using namespace crgate;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

System midpoint_system(double delta) {
    DeviceParams p;
    p.delta_ct = delta;
    p.drive_frame = DriveFrame{DriveFrame::Kind::Midpoint};
    return System::build(p);
}

}  // namespace

TEST_CASE("ZX targets") {
    const auto a = extract_angles(zx_target(+1));
    CHECK(a.phi1 == Approx(kPi / 2).epsilon(1e-14));
    CHECK(a.phi0 == Approx(-kPi / 2).epsilon(1e-14));
    const auto b = extract_angles(zx_target(-1));
    CHECK(b.phi1 == Approx(-kPi / 2).epsilon(1e-14));
    CHECK(fidelity(zx_target(1), zx_target(-1)) < 0.5);
}

TEST_CASE("undriven echo is the double flip") {
    const System sys = midpoint_system(130.0);
    const auto ev = run_echo(sys, 0.0, 200.0, 60.0);
    CHECK(ev.unitarity_defect < 1e-12);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(std::abs(ev.M(i, j)) == Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
    CHECK_THROWS_AS(run_echo(sys, 20.0, 100.0, 120.0), Error);
}

TEST_CASE("echo calibration at Delta = 170") {
    const System sys = midpoint_system(170.0);
    for (double eps : {10.0, 20.0, 30.0}) {
        CAPTURE(eps);
        const auto r = calibrate_echo(sys, eps);
        const auto& a = r.gate.angles;
        CHECK(std::abs(std::abs(wrap_angle(a.phi1 - a.phi0)) - kPi) <= 1e-6);
        CHECK(std::abs(a.phi1 + a.phi0) <= 1e-3);
        CHECK(std::abs(a.theta1 - a.theta0) <= 1e-2);
        CHECK(r.zx_sign * a.phi1 > 0.0);
        CHECK(r.gate.f_mu <= r.f_restricted + 1e-12);
        CHECK(r.gate.f_mu == Approx(r.f_restricted).epsilon(1e-4));
        CHECK(r.gate.z_comp == Approx(kPi / 2));
        CHECK(r.gate.x_comp == Approx(-r.zx_sign * kPi / 2));

        // Same semi-analytic starting point as the basic gate.
        const auto b = find_cnot_duration(sys, eps);
        CHECK(r.gate.tau_guess == b.tau_guess);
        CHECK(r.gate.tau_cnot == Approx(b.tau_cnot).epsilon(0.03));
    }
    CHECK_THROWS_AS(calibrate_echo(sys, 0.0), Error);
}

TEST_CASE("two calibrated halves compose into the echo gate") {
    // Additive when the control |0> block is a pure x-rotation; the drive frame
    // resonant with it keeps that block untilted.
    for (double delta : {170.0, 190.0}) {
        DeviceParams p;
        p.delta_ct = delta;
        const System sys = System::build(p);
        for (double eps : {10.0, 30.0}) {
            CAPTURE(delta);
            CAPTURE(eps);
            PulseShape shape;
            const double guess = 0.5 * predict_cnot_duration(sys.params, shape, eps).tau_p;
            EvolveOptions eo;
            eo.columns = Columns::Computational;
            auto half = [&](double tau) { return evolve(sys, shape.make(eps, tau), {}, eo); };
            const auto s = search_conditional_phase(half, guess, kPi / 2, 1e-8, 40);
            const double tau = 2.0 * s.tau;
            const auto a = extract_angles(run_echo(sys, eps, tau, shape.ramp_fraction * tau, eo).M);
            CHECK(std::abs(std::abs(wrap_angle(a.phi1 - a.phi0)) - kPi) <= 1e-3);
        }
    }
}

TEST_CASE("echo leaks more than the basic pulse at Delta = 190") {
    const System sys = midpoint_system(190.0);
    PulseShape shape;
    EvolveOptions eo;
    eo.columns = Columns::Computational;
    for (double eps : {20.0, 40.0, 60.0}) {
        CAPTURE(eps);
        const auto b = find_cnot_duration(sys, eps);
        const double tau = b.tau_cnot;
        const auto e = echo_report(sys, Pulse::echo(eps, tau, shape.ramp_fraction * tau),
                                   run_echo(sys, eps, tau, shape.ramp_fraction * tau, eo));
        const double leak_basic = 1.0 - closest_block_unitary(b.m).fidelity;
        const double leak_echo = 1.0 - closest_block_unitary(e.gate.m).fidelity;
        CHECK(leak_echo >= leak_basic);
    }
}
