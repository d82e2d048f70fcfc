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

#include "crgate/calibration.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "crgate/semianalytic.hpp"

namespace crgate {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr double kDegenerate = 1e-12;

struct BlockFit {
    double phi = 0.0;
    double theta = 0.0;
};

// Block indices r0, r0+1 of M.
BlockFit fit_block(const Eigen::Matrix4cd& m, int r0) {
    const cd d = m(r0, r0) + m(r0 + 1, r0 + 1);
    const cd o = m(r0, r0 + 1) + m(r0 + 1, r0);
    const cd num = d + o;
    const cd den = d - o;
    if (std::abs(num) < kDegenerate && std::abs(den) < kDegenerate) {
        throw Error(ErrorKind::DegenerateBlock,
                    "control-" + std::to_string(r0 / 2) + " block has vanishing trace terms");
    }
    BlockFit f;
    f.phi = wrap_angle(std::arg(den) - std::arg(num));
    f.theta = std::arg(d * std::cos(0.5 * f.phi) + cd(0.0, 1.0) * o * std::sin(0.5 * f.phi));
    return f;
}

}  // namespace

GateAngles extract_angles(const Eigen::Matrix4cd& m) {
    const BlockFit b0 = fit_block(m, 0);
    const BlockFit b1 = fit_block(m, 2);
    GateAngles a;
    a.phi0 = b0.phi;
    a.phi1 = b1.phi;
    a.theta0 = b0.theta;
    a.theta1 = b1.theta;
    a.theta_diff_lab = b1.theta - b0.theta;
    return a;
}

Eigen::Matrix2cd x_rotation(double phi) {
    const double c = std::cos(0.5 * phi);
    const double s = std::sin(0.5 * phi);
    Eigen::Matrix2cd r;
    r << c, cd(0.0, -s), cd(0.0, -s), c;
    return r;
}

Eigen::Matrix4cd assemble_u_class(double phi0, double phi1, double theta0, double theta1) {
    Eigen::Matrix4cd u = Eigen::Matrix4cd::Zero();
    u.block<2, 2>(0, 0) = std::polar(1.0, theta0) * x_rotation(phi0);
    u.block<2, 2>(2, 2) = std::polar(1.0, theta1) * x_rotation(phi1);
    return u;
}

double fidelity(const Eigen::Matrix4cd& m, const Eigen::Matrix4cd& u) {
    const double mm = m.squaredNorm();
    const double ov = std::norm((m.adjoint() * u).trace());
    return (mm + ov) / 20.0;
}

RestrictedFit closest_restricted_unitary(const Eigen::Matrix4cd& m) {
    RestrictedFit r;
    r.angles = extract_angles(m);
    r.u = assemble_u_class(r.angles.phi0, r.angles.phi1, r.angles.theta0, r.angles.theta1);
    r.f_mu = fidelity(m, r.u);
    return r;
}

double decoherence_estimate(double tau, const DecoherenceParams& d) {
    for (double t : {d.t1_c, d.t1_t, d.t2_c, d.t2_t}) {
        if (!(t > 0.0)) throw Error(ErrorKind::InvalidArgument, "coherence times must be positive");
    }
    if (!(tau >= 0.0)) throw Error(ErrorKind::InvalidArgument, "negative duration");
    return (tau / d.t1_c + tau / d.t1_t) / 5.0 + 2.0 * (tau / d.t2_c + tau / d.t2_t) / 5.0;
}

GateReport gate_report(const System& sys, const Pulse& pulse, const EvolutionResult& ev) {
    GateReport g;
    g.eps_m = pulse.eps_m;
    g.tau_cnot = pulse.tau_p;
    g.m = ev.M;
    g.v_comp = computational_columns(ev, sys.params.n_t);
    const RestrictedFit fit = closest_restricted_unitary(ev.M);
    g.angles = fit.angles;
    g.u = fit.u;
    g.f_mu = fit.f_mu;
    g.angles.theta_diff_lab =
        wrap_angle(fit.angles.theta1 - fit.angles.theta0 + angular(sys.derived().control_t0) * pulse.tau_p);
    g.x_comp = -g.angles.phi0;
    g.z_comp = wrap_angle(-g.angles.theta_diff_lab + 0.5 * kPi);
    g.evaluations = 1;
    return g;
}

PhaseSearch search_conditional_phase(const std::function<EvolutionResult(double)>& run, double guess,
                                     double target, double tolerance, int max_evaluations) {
    if (!(guess > 0.0) || !(target > 0.0) || !(target <= kPi)) {
        throw Error(ErrorKind::InvalidArgument, "search needs guess > 0 and target in (0, pi]");
    }
    int evals = 0;
    struct Sample {
        double tau = 0.0;
        double wrapped = 0.0;  // wrap(phi1 - phi0)
        double d = 0.0;        // unwrapped along the scan
        EvolutionResult ev;
    };
    auto sample = [&](double tau) {
        if (++evals > max_evaluations) {
            throw Error(ErrorKind::NoBracket, "evaluation budget exhausted");
        }
        Sample s;
        s.tau = tau;
        s.ev = run(tau);
        const GateAngles a = extract_angles(s.ev.M);
        s.wrapped = wrap_angle(a.phi1 - a.phi0);
        return s;
    };
    auto follow = [](const Sample& prev, Sample& next) {
        next.d = prev.d + wrap_angle(next.wrapped - prev.wrapped);
    };

    // The conditional phase grows roughly linearly from zero, so at half the
    // predicted duration it is near target/2 and its wrapped value is unambiguous.
    // A large value there means the prediction is far off; scan finely then.
    const double loose = 0.75 * target;
    Sample lo = sample(0.5 * guess);
    lo.d = lo.wrapped;
    double step = 0.5 * guess;
    if (std::abs(lo.d) > loose) {
        step = guess / 8.0;
        lo = sample(step);
        lo.d = lo.wrapped;
        if (std::abs(lo.d) > loose) {
            throw Error(ErrorKind::NoBracket, "conditional phase already large at guess/8");
        }
    }
    const double limit = 4.0 * guess;
    Sample hi;
    for (;;) {
        const double tau = lo.tau + step;
        if (tau > limit * (1.0 + 1e-12)) {
            throw Error(ErrorKind::NoBracket, "no crossing below 4x the semi-analytic guess");
        }
        hi = sample(tau);
        follow(lo, hi);
        if (std::abs(hi.d) >= target) break;
        lo = std::move(hi);
        step = std::min(step, 0.25 * guess);
    }

    // Illinois false position on s*D(tau) - target.
    const double sgn = hi.d > 0 ? 1.0 : -1.0;
    auto f = [&](const Sample& s) { return sgn * s.d - target; };
    double fa = f(lo), fb = f(hi);
    Sample best = std::abs(fa) < std::abs(fb) ? lo : hi;
    int side = 0;
    while (std::abs(f(best)) > tolerance) {
        double tau = (lo.tau * fb - hi.tau * fa) / (fb - fa);
        if (!(tau > lo.tau && tau < hi.tau)) tau = 0.5 * (lo.tau + hi.tau);
        Sample mid = sample(tau);
        follow(lo, mid);
        const double fm = f(mid);
        // Within the bracket the phase must stay between its end values.
        if (fm < f(lo) - 1e-9 || fm > f(hi) + 1e-9) {
            throw Error(ErrorKind::NoBracket, "conditional phase not monotone inside bracket");
        }
        if (std::abs(fm) < std::abs(f(best))) best = mid;
        if (fm < 0.0) {
            lo = std::move(mid);
            fa = fm;
            if (side == -1) fb *= 0.5;
            side = -1;
        } else {
            hi = std::move(mid);
            fb = fm;
            if (side == 1) fa *= 0.5;
            side = 1;
        }
        if (hi.tau - lo.tau < 1e-12 * hi.tau) break;
    }
    return {best.tau, std::move(best.ev), evals};
}

GateReport find_cnot_duration(const System& sys, double eps_m, const CalibrationOptions& opt) {
    if (opt.shape.echo) {
        throw Error(ErrorKind::InvalidArgument, "echo sequences are calibrated by calibrate_echo");
    }
    if (eps_m == 0.0) throw Error(ErrorKind::ZeroSpeed, "eps_m = 0");
    const double guess =
        predict_cnot_duration(sys.params, opt.shape, eps_m, DriveModel::SemiAnalytic).tau_p;
    auto run = [&](double tau) { return evolve(sys, opt.shape.make(eps_m, tau), {}, opt.evolve); };
    PhaseSearch s = search_conditional_phase(run, guess, kPi, opt.tolerance, opt.max_evaluations);

    const Pulse pulse = opt.shape.make(eps_m, s.tau);
    GateReport g = gate_report(sys, pulse, s.ev);
    g.tau_guess = guess;
    g.evaluations = s.evaluations;
    if (opt.decoherence) g.decoherence = decoherence_estimate(g.tau_cnot, *opt.decoherence);
    return g;
}

NumericDrives effective_drives_numeric(const System& sys, double eps_m, double tau_p, double tau_r,
                                       double dtau, int steps_per_ramp) {
    if (!(dtau > 0.0)) throw Error(ErrorKind::InvalidArgument, "dtau must be positive");
    const double taus[2] = {tau_p - dtau, tau_p + dtau};
    const auto ev = evolve_durations(sys, eps_m, tau_r, taus, steps_per_ramp);
    const GateAngles a = extract_angles(ev[0].M);
    const GateAngles b = extract_angles(ev[1].M);
    const double d0 = wrap_angle(b.phi0 - a.phi0);
    const double d1 = wrap_angle(b.phi1 - a.phi1);
    if (std::abs(d0) > 0.5 * kPi || std::abs(d1) > 0.5 * kPi) {
        throw Error(ErrorKind::UnwrapAmbiguous, "phase step above pi/2; reduce dtau");
    }
    NumericDrives r;
    r.eps_tilde0 = ordinary(d0 / (4.0 * dtau));
    r.eps_tilde1 = ordinary(d1 / (4.0 * dtau));
    return r;
}

NumericDrives effective_drives_fit(const System& sys, double eps_m, double tau_p, double tau_r,
                                   double half_window, int samples, int steps_per_ramp) {
    if (samples < 3 || !(half_window > 0.0) || half_window >= tau_p) {
        throw Error(ErrorKind::InvalidArgument, "need >= 3 samples and 0 < half_window < tau_p");
    }
    std::vector<double> taus(samples);
    for (int k = 0; k < samples; ++k) taus[k] = tau_p - half_window + 2.0 * half_window * k / (samples - 1);
    const auto ev = evolve_durations(sys, eps_m, tau_r, taus, steps_per_ramp);
    std::vector<double> p0(samples), p1(samples);
    for (int k = 0; k < samples; ++k) {
        const GateAngles a = extract_angles(ev[k].M);
        p0[k] = a.phi0;
        p1[k] = a.phi1;
        if (k == 0) continue;
        const double d0 = wrap_angle(p0[k] - p0[k - 1]);
        const double d1 = wrap_angle(p1[k] - p1[k - 1]);
        if (std::abs(d0) > 0.5 * kPi || std::abs(d1) > 0.5 * kPi) {
            throw Error(ErrorKind::UnwrapAmbiguous, "phase step above pi/2; use more samples");
        }
        p0[k] = p0[k - 1] + d0;
        p1[k] = p1[k - 1] + d1;
    }
    const double tm = 0.5 * (taus.front() + taus.back());
    double sxx = 0.0, s0 = 0.0, s1 = 0.0;
    for (int k = 0; k < samples; ++k) {
        const double dt = taus[k] - tm;
        sxx += dt * dt;
        s0 += dt * p0[k];
        s1 += dt * p1[k];
    }
    NumericDrives r;
    r.eps_tilde0 = ordinary(s0 / sxx / 2.0);
    r.eps_tilde1 = ordinary(s1 / sxx / 2.0);
    return r;
}

}  // namespace crgate
