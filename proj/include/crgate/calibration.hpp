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

// Gate angles, fidelity against the control-diagonal x-rotation class and
// the CNOT duration search.

#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>

#include "crgate/model.hpp"
#include "crgate/propagator.hpp"

namespace crgate {

struct GateAngles {
    double phi0 = 0.0;    // (-pi, pi]
    double phi1 = 0.0;    // (-pi, pi]
    double theta0 = 0.0;  // drive frame
    double theta1 = 0.0;
    double theta_diff_lab = 0.0;  // theta1' - theta0', control frame (set by calibration)
};

// Closed-form maximizers of F_MU over the block x-rotation class.
// Throws DegenerateBlock when a 2x2 block is numerically zero.
GateAngles extract_angles(const Eigen::Matrix4cd& m);

// e^{i theta0} |0><0| (x) e^{-i phi0 X/2} + e^{i theta1} |1><1| (x) e^{-i phi1 X/2}
Eigen::Matrix4cd assemble_u_class(double phi0, double phi1, double theta0, double theta1);
Eigen::Matrix2cd x_rotation(double phi);

// (Tr M^dag M + |Tr M^dag U|^2) / 20
double fidelity(const Eigen::Matrix4cd& m, const Eigen::Matrix4cd& u);

struct RestrictedFit {
    GateAngles angles;
    Eigen::Matrix4cd u;
    double f_mu = 0.0;
};

RestrictedFit closest_restricted_unitary(const Eigen::Matrix4cd& m);

struct DecoherenceParams {
    double t1_c = 0.0;  // ns
    double t1_t = 0.0;
    double t2_c = 0.0;
    double t2_t = 0.0;
};

// (tau/T1c + tau/T1t)/5 + 2(tau/T2c + tau/T2t)/5. Infinite times contribute 0.
double decoherence_estimate(double tau, const DecoherenceParams& d);

struct GateReport {
    double eps_m = 0.0;     // MHz
    double tau_cnot = 0.0;  // ns
    double tau_guess = 0.0; // semi-analytic starting point, ns
    GateAngles angles;
    double f_mu = 0.0;
    double x_comp = 0.0;  // -phi0
    double z_comp = 0.0;  // theta0' - theta1' + pi/2, wrapped
    std::optional<double> decoherence;
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    Eigen::Matrix4cd u = Eigen::Matrix4cd::Zero();
    Eigen::MatrixXcd v_comp;  // N x 4: computational columns of V
    int evaluations = 0;  // number of evolutions used by the search

    double infidelity() const noexcept { return 1.0 - f_mu; }
};

struct CalibrationOptions {
    PulseShape shape{};
    double tolerance = 1e-6;  // |(phi1 - phi0) -/+ pi|, rad
    int max_evaluations = 60;
    EvolveOptions evolve{Columns::Computational};
    std::optional<DecoherenceParams> decoherence;
};

struct PhaseSearch {
    double tau = 0.0;
    EvolutionResult ev;
    int evaluations = 0;
};

// Shortest tau with |phi1 - phi0| = target for the family run(tau), starting
// from the estimate guess (where the phase should be near target). Throws NoBracket.
PhaseSearch search_conditional_phase(const std::function<EvolutionResult(double)>& run, double guess,
                                     double target, double tolerance, int max_evaluations);

// Shortest basic-pulse duration with phi1 - phi0 = +-pi, starting from the
// semi-analytic prediction. Throws NoBracket.
GateReport find_cnot_duration(const System& sys, double eps_m, const CalibrationOptions& opt = {});

// Report for a given duration (no search).
GateReport gate_report(const System& sys, const Pulse& pulse, const EvolutionResult& ev);

struct NumericDrives {
    double eps_tilde0 = 0.0;  // MHz
    double eps_tilde1 = 0.0;
};

// eps_tilde_n = (1/2) d phi_n / d tau_p by central difference at fixed
// tau_r and eps_m. Throws UnwrapAmbiguous if a phase step exceeds pi/2.
NumericDrives effective_drives_numeric(const System& sys, double eps_m, double tau_p, double tau_r,
                                       double dtau = 1.0, int steps_per_ramp = 600);

// Least-squares slope of the unwrapped phases over `samples` durations in
// [tau_p - half_window, tau_p + half_window]. Averages out beats from
// population left in a near-resonant level by the ramps.
NumericDrives effective_drives_fit(const System& sys, double eps_m, double tau_p, double tau_r,
                                   double half_window, int samples = 41, int steps_per_ramp = 600);

}  // namespace crgate
