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

// Time evolution over a pulse in the dressed eigenbasis with Gauss-Legendre
// Magnus integrators (two points, order 4; three points, order 6).

#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "crgate/model.hpp"

namespace crgate {

// Magnus steps for H(t) = diag(E) + eps(t) D with energies and amplitudes
// in rad/ns. Because the static part is diagonal, every commutator reduces
// to products of E, D and C = [E, D], and i*Omega = S + iK with S real
// symmetric and K real antisymmetric.
class MagnusStepper {
public:
    MagnusStepper(Eigen::VectorXd energies, Eigen::MatrixXd drive);

    // Two Gauss points (order 4), amplitudes at kGauss2.
    void step4(double h, double eps_a, double eps_b, Eigen::MatrixXcd& v);
    // Three Gauss points (order 6), amplitudes at kGauss3.
    void step6(double h, double eps_1, double eps_2, double eps_3, Eigen::MatrixXcd& v);
    // Exact exponential for a constant amplitude.
    void hold(double h, double eps, Eigen::MatrixXcd& v);

    int dim() const noexcept { return static_cast<int>(energies_.size()); }
    double drive_norm() const noexcept { return drive_norm_; }  // spectral norm of D

private:
    // v <- exp(-i (S + iK)) v
    void apply_exp(const Eigen::MatrixXd& s, const Eigen::MatrixXd* k, Eigen::MatrixXcd& v);

    Eigen::VectorXd energies_;
    Eigen::MatrixXd drive_;
    Eigen::MatrixXd comm_;  // [E, D]
    double drive_norm_ = 0.0;
    Eigen::MatrixXd s_, k_, a1_, g_, p_, q_, tmp_r_;
    Eigen::MatrixXcd a_;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> csolver_;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> rsolver_;
    Eigen::MatrixXcd tmp_;
};

// Gauss-Legendre nodes on [0, 1].
inline constexpr double kGauss2[2] = {0.5 - 0.28867513459481288225, 0.5 + 0.28867513459481288225};
inline constexpr double kGauss3[3] = {0.5 - 0.38729833462074168852, 0.5,
                                      0.5 + 0.38729833462074168852};

enum class Columns {
    All,            // full N x N evolution
    Computational,  // only the four computational input states
};

struct EvolveOptions {
    Columns columns = Columns::All;
    int magnus_order = 6;  // 4 or 6
    // Largest allowed per-step drive phase h*|eps|*||D||, rad.
    double max_step_phase = 0.5;
};

struct EvolutionResult {
    // Dressed basis. With Columns::Computational only the four columns of
    // the computational inputs are stored (in |00>,|01>,|10>,|11> order).
    Eigen::MatrixXcd V;
    Eigen::Matrix4cd M;  // rows/cols |00>, |01>, |10>, |11>
    long step_count = 0;
    double unitarity_defect = 0.0;  // max |V^dag V - I| over the stored columns
    Columns columns = Columns::All;

    // Amplitude <f|V|i> for computational input i in 0..3 and any final f.
    std::complex<double> amplitude(int f, int i, int n_t) const;
};

// Ideal instantaneous pi rotation of the control: swaps the dressed states
// |0,m> and |1,m> for every m. Applied after evolving up to each time.
EvolutionResult evolve(const System& sys, const Pulse& pulse,
                       std::span<const double> flip_times = {}, EvolveOptions opt = {});

// Basic pulses that share eps_m and tau_r and differ only in tau_p. The two
// ramps are integrated once; each flat top is one exact exponential. Results
// use Columns::Computational.
std::vector<EvolutionResult> evolve_durations(const System& sys, double eps_m, double tau_r,
                                              std::span<const double> tau_ps,
                                              int steps_per_ramp = 600, EvolveOptions opt = {});

// N x 4 matrix of the computational columns whichever were stored.
Eigen::MatrixXcd computational_columns(const EvolutionResult& ev, int n_t);

// Applies the control flip to the rows of v (dressed basis).
void apply_control_flip(Eigen::MatrixXcd& v, int n_t);

}  // namespace crgate
