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

#include "crgate/echo.hpp"

#include <array>
#include <numbers>

#include "crgate/semianalytic.hpp"

namespace crgate {

namespace {
constexpr double kPi = std::numbers::pi;
}

EvolutionResult run_echo(const System& sys, double eps_m, double tau_p, double tau_r, EvolveOptions opt,
                         int steps_per_ramp) {
    const Pulse pulse = Pulse::echo(eps_m, tau_p, tau_r, steps_per_ramp);
    const std::array<double, 2> flips{0.5 * tau_p, tau_p};
    return evolve(sys, pulse, flips, opt);
}

Eigen::Matrix4cd zx_target(int sign) {
    const double s = sign >= 0 ? 1.0 : -1.0;
    return assemble_u_class(-s * 0.5 * kPi, s * 0.5 * kPi, 0.0, 0.0);
}

EchoReport echo_report(const System& sys, const Pulse& pulse, const EvolutionResult& ev) {
    EchoReport r;
    GateReport& g = r.gate;
    g.eps_m = pulse.eps_m;
    g.tau_cnot = pulse.tau_p;
    g.m = ev.M;
    g.v_comp = computational_columns(ev, sys.params.n_t);
    const RestrictedFit fit = closest_restricted_unitary(ev.M);
    r.f_restricted = fit.f_mu;
    g.angles = fit.angles;
    // Flips in the middle and at the end cancel the control frame drift.
    g.angles.theta_diff_lab = wrap_angle(fit.angles.theta1 - fit.angles.theta0);

    const double fp = fidelity(ev.M, zx_target(+1));
    const double fm = fidelity(ev.M, zx_target(-1));
    r.zx_sign = fp >= fm ? 1 : -1;
    g.u = zx_target(r.zx_sign);
    g.f_mu = std::max(fp, fm);
    g.x_comp = -r.zx_sign * 0.5 * kPi;  // -phi0 of the target
    g.z_comp = 0.5 * kPi;
    g.evaluations = 1;
    return r;
}

EchoReport calibrate_echo(const System& sys, double eps_m, const CalibrationOptions& opt) {
    if (eps_m == 0.0) throw Error(ErrorKind::ZeroSpeed, "eps_m = 0");
    PulseShape shape = opt.shape;
    shape.echo = true;
    const double guess = predict_cnot_duration(sys.params, shape, eps_m, DriveModel::SemiAnalytic).tau_p;
    auto run = [&](double tau) {
        return run_echo(sys, eps_m, tau, shape.ramp_fraction * tau, opt.evolve, shape.steps_per_ramp);
    };
    PhaseSearch s = search_conditional_phase(run, guess, kPi, opt.tolerance, opt.max_evaluations);
    EchoReport r = echo_report(sys, shape.make(eps_m, s.tau), s.ev);
    r.gate.tau_guess = guess;
    r.gate.evaluations = s.evaluations;
    if (opt.decoherence) r.gate.decoherence = decoherence_estimate(s.tau, *opt.decoherence);
    return r;
}

}  // namespace crgate
