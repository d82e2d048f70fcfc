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

// Splitting 1 - F_MU into leakage and imperfect target rotations, leakage
// channels, and closed-form estimates of both.

#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "crgate/calibration.hpp"
#include "crgate/model.hpp"
#include "crgate/propagator.hpp"

namespace crgate {

struct BlockUnitaryFit {
    Eigen::Matrix4cd m_tilde = Eigen::Matrix4cd::Zero();
    Eigen::Matrix2cd u0 = Eigen::Matrix2cd::Identity();  // control |0> block
    Eigen::Matrix2cd u1 = Eigen::Matrix2cd::Identity();
    double fidelity = 0.0;
    double min_singular = 0.0;  // smallest top singular value of the two blocks
};

// Closest control-diagonal unitary via per-block polar factors. Never throws;
// for a vanishing block the factor is not unique and an arbitrary one is used.
BlockUnitaryFit closest_block_unitary(const Eigen::Matrix4cd& m);

struct UnitaryFit {
    Eigen::Matrix4cd m_prime = Eigen::Matrix4cd::Zero();
    double fidelity = 0.0;
};

// Closest 4x4 unitary (polar factor); fidelity through the nuclear norm.
UnitaryFit closest_unitary(const Eigen::Matrix4cd& m);

struct Channel {
    BareIndex from;       // computational input label
    BareIndex to;         // final dressed label
    double probability;   // |V_fi|^2 / 4
};

struct LeakageReport {
    std::vector<Channel> channels;  // sorted by probability, descending
    double p_out = 0.0;             // averaged leakage out of the subspace
    double p_comp = 0.0;            // averaged control |0> <-> |1> transitions
    std::vector<double> column_norms;  // sum_f |V_fi|^2 per input

    double combined() const noexcept { return p_out + 0.8 * p_comp; }
    // Sum over channels whose initial/final pair matches.
    double sum_of(const std::vector<std::pair<BareIndex, BareIndex>>& pairs) const;
};

// v_comp: N x 4 computational columns of V in the dressed basis.
LeakageReport channel_leakage(const Eigen::MatrixXcd& v_comp, int n_c, int n_t, double threshold = 1e-8);
LeakageReport channel_leakage(const EvolutionResult& ev, int n_c, int n_t, double threshold = 1e-8);

struct BudgetReport {
    double f_mu = 0.0;
    double f_mmtilde = 0.0;
    double f_mtilde_u = 0.0;
    double f_mmtildeprime = 0.0;
    double f_mtildeprime_mtilde = 0.0;
    double additivity_defect = 0.0;  // |(1-F_MU) - (1-F_MM~) - (1-F_M~U)|
    double df_u_c0 = 0.0;            // 4/5 - (2/5)|Tr(U~0 U0^dag)|
    double df_u_c1 = 0.0;
    std::optional<LeakageReport> leakage;

    double infid_total() const noexcept { return 1.0 - f_mu; }
    double infid_leak() const noexcept { return 1.0 - f_mmtilde; }
    double infid_unitary() const noexcept { return 1.0 - f_mtilde_u; }
};

// Throws RankDeficientBlock when a control block of M vanishes.
BudgetReport decompose(const Eigen::Matrix4cd& m, const Eigen::Matrix4cd& u, const GateAngles& a);
BudgetReport decompose(const GateReport& g);
// Also fills leakage from the stored columns of V.
BudgetReport decompose(const GateReport& g, int n_c, int n_t, double threshold = 1e-8);

// Front-ramp |0> -> |2> leakage, 2 pi^4 eps^4 / (Delta^2 (eta_c - 2 Delta)^6 tau_r^4),
// frequencies in rad/ns. Throws PoleSingularity at eta_c = 2 Delta or Delta = 0.
double ramp_leakage_estimate(const DeviceParams& p, double eps_m, double tau_r);

// (2/5) sin^2(phi1/2) w^2 / ((25/40)(2 eps1)^2 + w^2); eps1 and w in the same units.
double tilted_axis_formula(double phi1, double eps_tilde1, double omega_zz);

enum class TiltModel {
    FirstOrder,    // phi1 = pi (eta_c + Delta) / (2 eta_c), first-order eps_tilde_1
    SemiAnalytic,  // phi1 and eps_tilde_1 from the semi-analytic drives
    Quadrature,    // tilted Bloch rotation integrated over the pulse
};

// Imperfect-unitary infidelity for control |1> detuned by omega_zz (MHz).
double tilted_axis_estimate(const DeviceParams& p, double eps_m, double omega_zz, TiltModel model,
                            const PulseShape& shape = {});

}  // namespace crgate
