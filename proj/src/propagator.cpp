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

#include "crgate/propagator.hpp"

#include <algorithm>
#include <cmath>

namespace crgate {

MagnusStepper::MagnusStepper(Eigen::VectorXd energies, Eigen::MatrixXd drive)
    : energies_(std::move(energies)), drive_(std::move(drive)) {
    const Eigen::Index n = energies_.size();
    if (drive_.rows() != n || drive_.cols() != n) {
        throw Error(ErrorKind::InvalidArgument, "drive operator dimension mismatch");
    }
    comm_.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) comm_(i, j) = (energies_(i) - energies_(j)) * drive_(i, j);
    }
    drive_norm_ = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(drive_, Eigen::EigenvaluesOnly)
                      .eigenvalues()
                      .cwiseAbs()
                      .maxCoeff();
}

void MagnusStepper::apply_exp(const Eigen::MatrixXd& s, const Eigen::MatrixXd* k,
                              Eigen::MatrixXcd& v) {
    if (k == nullptr) {
        rsolver_.compute(s, Eigen::ComputeEigenvectors);
        const auto& u = rsolver_.eigenvectors();
        const auto& lam = rsolver_.eigenvalues();
        tmp_.noalias() = u.transpose() * v;
        for (Eigen::Index i = 0; i < lam.size(); ++i) tmp_.row(i) *= std::polar(1.0, -lam(i));
        v.noalias() = u * tmp_;
        return;
    }
    a_.resize(s.rows(), s.cols());
    a_.real() = s;
    a_.imag() = *k;
    csolver_.compute(a_, Eigen::ComputeEigenvectors);
    const auto& u = csolver_.eigenvectors();
    const auto& lam = csolver_.eigenvalues();
    tmp_.noalias() = u.adjoint() * v;
    for (Eigen::Index i = 0; i < lam.size(); ++i) tmp_.row(i) *= std::polar(1.0, -lam(i));
    v.noalias() = u * tmp_;
}

void MagnusStepper::hold(double h, double eps, Eigen::MatrixXcd& v) {
    s_ = (h * eps) * drive_;
    s_.diagonal() += h * energies_;
    apply_exp(s_, nullptr, v);
}

void MagnusStepper::step4(double h, double eps_a, double eps_b, Eigen::MatrixXcd& v) {
    // i*Omega = h (E + eps_bar D) - i (sqrt(3) h^2 / 12) (eps_a - eps_b) [E, D]
    if (eps_a == eps_b) return hold(h, eps_a, v);
    const double k = std::sqrt(3.0) * h * h / 12.0 * (eps_a - eps_b);
    s_ = (0.5 * h * (eps_a + eps_b)) * drive_;
    s_.diagonal() += h * energies_;
    k_ = -k * comm_;
    apply_exp(s_, &k_, v);
}

void MagnusStepper::step6(double h, double e1, double e2, double e3, Eigen::MatrixXcd& v) {
    // Sixth-order Magnus with alpha1 = h A(mid), alpha2 = (sqrt15/3) h (A3 - A1),
    // alpha3 = (10/3) h (A3 - 2 A2 + A1), A = -iH:
    //   Omega = alpha1 + alpha3/12 + [-20 alpha1 - alpha3 + C1, alpha2 + C2] / 240,
    //   C1 = [alpha1, alpha2], C2 = -[alpha1, 2 alpha3 + C1] / 60.
    // With a1 = h(E + e2 D), s2 = (sqrt15/3) h (e3 - e1), s3 = (10/3) h (e3 - 2e2 + e1),
    // G = [a1, C], P = 20 a1 + s3 D, Q = s2 D + (s2 h / 60) G, R = (s3 h / 30) C:
    //   i*Omega = a1 + s3 D / 12 - ([P, R] + s2 h [C, Q]) / 240 + i [P, Q] / 240.
    if (e1 == e2 && e2 == e3) return hold(h, e2, v);
    const double s2 = std::sqrt(15.0) / 3.0 * h * (e3 - e1);
    const double s3 = 10.0 / 3.0 * h * (e3 - 2.0 * e2 + e1);

    a1_ = (h * e2) * drive_;
    a1_.diagonal() += h * energies_;
    // [sym, antisym] = X + X^T with X = sym * antisym
    tmp_r_.noalias() = a1_ * comm_;
    g_ = tmp_r_ + tmp_r_.transpose();
    p_ = 20.0 * a1_ + s3 * drive_;
    q_ = s2 * drive_ + (s2 * h / 60.0) * g_;

    s_ = a1_ + (s3 / 12.0) * drive_;
    tmp_r_.noalias() = p_ * comm_;  // [P, R] = (s3 h / 30) (P C + (P C)^T)
    s_ -= (s3 * h / 30.0 / 240.0) * (tmp_r_ + tmp_r_.transpose());
    tmp_r_.noalias() = comm_ * q_;  // [C, Q] = C Q + (C Q)^T
    s_ -= (s2 * h / 240.0) * (tmp_r_ + tmp_r_.transpose());
    tmp_r_.noalias() = p_ * q_;     // [P, Q] = P Q - (P Q)^T
    k_ = (tmp_r_ - tmp_r_.transpose()) / 240.0;
    apply_exp(s_, &k_, v);
}

std::complex<double> EvolutionResult::amplitude(int f, int i, int n_t) const {
    if (columns == Columns::Computational) return V(f, i);
    return V(f, computational_indices(n_t)[i]);
}

Eigen::MatrixXcd computational_columns(const EvolutionResult& ev, int n_t) {
    if (ev.columns == Columns::Computational) return ev.V;
    Eigen::MatrixXcd c(ev.V.rows(), 4);
    const auto comp = computational_indices(n_t);
    for (int j = 0; j < 4; ++j) c.col(j) = ev.V.col(comp[j]);
    return c;
}

void apply_control_flip(Eigen::MatrixXcd& v, int n_t) {
    for (int m = 0; m < n_t; ++m) v.row(m).swap(v.row(n_t + m));
}

namespace {

struct Piece {
    double a = 0.0;
    double b = 0.0;
    double dt = 0.0;       // target step; 0 means constant amplitude
    double level = 0.0;    // amplitude on constant pieces, MHz
};

}  // namespace

EvolutionResult evolve(const System& sys, const Pulse& pulse, std::span<const double> flip_times,
                       EvolveOptions opt) {
    const int n = sys.basis.dim();
    const int nt = sys.params.n_t;
    const auto comp = computational_indices(nt);

    Eigen::VectorXd energies = sys.basis.eigvals.unaryExpr([](double e) { return angular(e); });
    MagnusStepper stepper(std::move(energies), sys.drive);

    std::vector<double> flips(flip_times.begin(), flip_times.end());
    std::sort(flips.begin(), flips.end());
    for (double t : flips) {
        if (t < 0.0 || t > pulse.tau_p) {
            throw Error(ErrorKind::InvalidArgument, "flip time outside [0, tau_p]");
        }
    }

    // Ramps are stepped; flat tops are constant and get one exact exponential.
    std::vector<Piece> pieces;
    for (const auto& s : pulse.segments) {
        const double dt = s.ramp / pulse.steps_per_ramp;
        const double top_a = s.start + s.ramp;
        const double top_b = s.end - s.ramp;
        pieces.push_back({s.start, top_a, dt, 0.0});
        if (top_b > top_a) pieces.push_back({top_a, top_b, 0.0, s.sign * pulse.eps_m});
        pieces.push_back({std::max(top_a, top_b), s.end, dt, 0.0});
    }

    if (opt.magnus_order != 4 && opt.magnus_order != 6) {
        throw Error(ErrorKind::InvalidArgument, "magnus_order must be 4 or 6");
    }
    const double max_amp = angular(std::abs(pulse.eps_m));
    if (!pieces.empty()) {
        const double dt = pieces.front().dt;
        if (dt * max_amp * stepper.drive_norm() > opt.max_step_phase) {
            throw Error(ErrorKind::StepTooCoarse,
                        "per-step drive phase " +
                            std::to_string(dt * max_amp * stepper.drive_norm()) + " rad");
        }
    }

    EvolutionResult r;
    r.columns = opt.columns;
    if (opt.columns == Columns::All) {
        r.V = Eigen::MatrixXcd::Identity(n, n);
    } else {
        r.V = Eigen::MatrixXcd::Zero(n, 4);
        for (int i = 0; i < 4; ++i) r.V(comp[i], i) = 1.0;
    }

    std::size_t next_flip = 0;
    auto flips_upto = [&](double t) {
        while (next_flip < flips.size() && flips[next_flip] <= t) {
            apply_control_flip(r.V, nt);
            ++next_flip;
        }
    };
    flips_upto(0.0);

    auto run = [&](double a, double b, const Piece& pc) {
        if (b <= a) return;
        if (pc.dt == 0.0) {
            stepper.hold(b - a, angular(pc.level), r.V);
            ++r.step_count;
            return;
        }
        const long steps = std::max(1L, static_cast<long>(std::ceil((b - a) / pc.dt - 1e-9)));
        const double h = (b - a) / steps;
        auto amp = [&](double t) { return angular(pulse.envelope(std::min(t, pulse.tau_p))); };
        for (long k = 0; k < steps; ++k) {
            const double t = a + k * h;
            if (opt.magnus_order == 4) {
                stepper.step4(h, amp(t + kGauss2[0] * h), amp(t + kGauss2[1] * h), r.V);
            } else {
                stepper.step6(h, amp(t + kGauss3[0] * h), amp(t + kGauss3[1] * h),
                              amp(t + kGauss3[2] * h), r.V);
            }
        }
        r.step_count += steps;
    };

    for (const auto& pc : pieces) {
        double a = pc.a;
        while (next_flip < flips.size() && flips[next_flip] < pc.b) {
            const double t = std::max(flips[next_flip], a);
            run(a, t, pc);
            flips_upto(t);
            a = t;
        }
        run(a, pc.b, pc);
    }
    flips_upto(pulse.tau_p);

    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) r.M(i, j) = r.amplitude(comp[i], j, nt);
    }
    const Eigen::MatrixXcd g = r.V.adjoint() * r.V;
    r.unitarity_defect = (g - Eigen::MatrixXcd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
    return r;
}

std::vector<EvolutionResult> evolve_durations(const System& sys, double eps_m, double tau_r,
                                              std::span<const double> tau_ps, int steps_per_ramp,
                                              EvolveOptions opt) {
    if (tau_ps.empty()) return {};
    const double longest = *std::max_element(tau_ps.begin(), tau_ps.end());
    const Pulse shape = Pulse::basic(eps_m, longest, tau_r, steps_per_ramp);
    for (double t : tau_ps) Pulse::basic(eps_m, t, tau_r, steps_per_ramp);  // validates

    const int n = sys.basis.dim();
    const int nt = sys.params.n_t;
    const auto comp = computational_indices(nt);
    Eigen::VectorXd energies = sys.basis.eigvals.unaryExpr([](double e) { return angular(e); });
    MagnusStepper stepper(std::move(energies), sys.drive);
    const double dt = tau_r / steps_per_ramp;
    if (dt * angular(std::abs(eps_m)) * stepper.drive_norm() > opt.max_step_phase) {
        throw Error(ErrorKind::StepTooCoarse, "per-step drive phase too large");
    }

    // Ramp-down starts at t0 = longest - tau_r; the Hamiltonian only depends
    // on the envelope, so the same propagator serves every duration.
    auto ramp = [&](double t0, Eigen::MatrixXcd& v) {
        auto amp = [&](double t) { return angular(shape.envelope(std::min(t, longest))); };
        for (int k = 0; k < steps_per_ramp; ++k) {
            const double t = t0 + k * dt;
            if (opt.magnus_order == 4) {
                stepper.step4(dt, amp(t + kGauss2[0] * dt), amp(t + kGauss2[1] * dt), v);
            } else {
                stepper.step6(dt, amp(t + kGauss3[0] * dt), amp(t + kGauss3[1] * dt),
                              amp(t + kGauss3[2] * dt), v);
            }
        }
    };
    Eigen::MatrixXcd up = Eigen::MatrixXcd::Zero(n, 4);
    for (int i = 0; i < 4; ++i) up(comp[i], i) = 1.0;
    ramp(0.0, up);
    Eigen::MatrixXcd down = Eigen::MatrixXcd::Identity(n, n);
    ramp(longest - tau_r, down);

    std::vector<EvolutionResult> out;
    out.reserve(tau_ps.size());
    for (double t : tau_ps) {
        EvolutionResult r;
        r.columns = Columns::Computational;
        r.V = up;
        const double flat = t - 2.0 * tau_r;
        if (flat > 0.0) stepper.hold(flat, angular(eps_m), r.V);
        r.V = down * r.V;
        r.step_count = 2L * steps_per_ramp + (flat > 0.0 ? 1 : 0);
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) r.M(i, j) = r.V(comp[i], j);
        }
        const Eigen::MatrixXcd g = r.V.adjoint() * r.V;
        r.unitarity_defect = (g - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff();
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace crgate
