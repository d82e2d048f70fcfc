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

// Echo sequence: two sign-flipped half pulses with ideal control flips at
// tau_p/2 and tau_p, compared with ZX_{pi/2}.

#pragma once

#include <Eigen/Dense>

#include "crgate/calibration.hpp"
#include "crgate/model.hpp"
#include "crgate/propagator.hpp"

namespace crgate {

// Flips at tau_p/2 and tau_p; the trailing flip stays in V.
EvolutionResult run_echo(const System& sys, double eps_m, double tau_p, double tau_r,
                         EvolveOptions opt = {}, int steps_per_ramp = 600);

// phi1 = -phi0 = sign * pi/2, theta0 = theta1 = 0.
Eigen::Matrix4cd zx_target(int sign);

struct EchoReport {
    GateReport gate;   // u is the better of the two ZX targets; angles as extracted
    int zx_sign = 1;   // sign of phi1 in the chosen target
    double f_restricted = 0.0;  // F_MU over the full x-rotation class, for comparison
};

// Fidelity against both ZX_{pi/2} signs; the better one is kept.
// x_comp and z_comp hold the fixed conversions to CNOT.
EchoReport echo_report(const System& sys, const Pulse& pulse, const EvolutionResult& ev);

// Shortest echo duration with |phi1 - phi0| = pi. opt.shape.echo is ignored.
EchoReport calibrate_echo(const System& sys, double eps_m, const CalibrationOptions& opt = {});

}  // namespace crgate
