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

#include "crgate/errorbudget.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "crgate/semianalytic.hpp"

namespace crgate {

namespace {

using cd = std::complex<double>;
constexpr double kRankTol = 1e-12;

struct Polar2 {
    Eigen::Matrix2cd u;
    double nuclear = 0.0;
    double top = 0.0;
};

Polar2 polar2(const Eigen::Matrix2cd& a) {
    Eigen::JacobiSVD<Eigen::Matrix2cd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Polar2 r;
    r.u = svd.matrixU() * svd.matrixV().adjoint();
    r.nuclear = svd.singularValues().sum();
    r.top = svd.singularValues()(0);
    return r;
}

bool in_subspace(int n, int m) { return n < 2 && m < 2; }

}  // namespace

BlockUnitaryFit closest_block_unitary(const Eigen::Matrix4cd& m) {
    // Tr(A^dag W V^dag) = sum of singular values, already real and positive,
    // so the two block phases are aligned without further work.
    const Polar2 a = polar2(m.block<2, 2>(0, 0));
    const Polar2 b = polar2(m.block<2, 2>(2, 2));
    BlockUnitaryFit r;
    r.u0 = a.u;
    r.u1 = b.u;
    r.m_tilde.block<2, 2>(0, 0) = a.u;
    r.m_tilde.block<2, 2>(2, 2) = b.u;
    const double s = a.nuclear + b.nuclear;
    r.fidelity = (m.squaredNorm() + s * s) / 20.0;
    r.min_singular = std::min(a.top, b.top);
    return r;
}

UnitaryFit closest_unitary(const Eigen::Matrix4cd& m) {
    Eigen::JacobiSVD<Eigen::Matrix4cd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    UnitaryFit r;
    r.m_prime = svd.matrixU() * svd.matrixV().adjoint();
    const double s = svd.singularValues().sum();
    r.fidelity = (m.squaredNorm() + s * s) / 20.0;
    return r;
}

double LeakageReport::sum_of(const std::vector<std::pair<BareIndex, BareIndex>>& pairs) const {
    double s = 0.0;
    for (const auto& c : channels) {
        for (const auto& [f, t] : pairs) {
            if (c.from.n == f.n && c.from.m == f.m && c.to.n == t.n && c.to.m == t.m) s += c.probability;
        }
    }
    return s;
}

LeakageReport channel_leakage(const Eigen::MatrixXcd& v, int n_c, int n_t, double threshold) {
    LeakageReport r;
    const int dim = n_c * n_t;
    if (v.rows() != dim || v.cols() != 4) {
        throw Error(ErrorKind::InvalidArgument, "expected N x 4 computational columns");
    }
    const auto comp = computational_indices(n_t);
    for (int i = 0; i < 4; ++i) {
        const BareIndex from = BareIndex::from_flat(comp[i], n_t);
        double norm = 0.0;
        for (int f = 0; f < dim; ++f) {
            const double prob = std::norm(v(f, i));
            norm += prob;
            const BareIndex to = BareIndex::from_flat(f, n_t);
            const bool inside = in_subspace(to.n, to.m);
            if (inside && to.n == from.n) continue;  // target rotation, not leakage
            const double q = prob / 4.0;
            (inside ? r.p_comp : r.p_out) += q;
            if (q > threshold) r.channels.push_back({from, to, q});
        }
        r.column_norms.push_back(norm);
    }
    std::stable_sort(r.channels.begin(), r.channels.end(),
                     [](const Channel& a, const Channel& b) { return a.probability > b.probability; });
    return r;
}

LeakageReport channel_leakage(const EvolutionResult& ev, int n_c, int n_t, double threshold) {
    return channel_leakage(computational_columns(ev, n_t), n_c, n_t, threshold);
}

BudgetReport decompose(const Eigen::Matrix4cd& m, const Eigen::Matrix4cd& u, const GateAngles& a) {
    const BlockUnitaryFit bf = closest_block_unitary(m);
    if (bf.min_singular < kRankTol) {
        throw Error(ErrorKind::RankDeficientBlock, "a control block of M vanishes");
    }
    const UnitaryFit uf = closest_unitary(m);
    BudgetReport r;
    r.f_mu = fidelity(m, u);
    r.f_mmtilde = bf.fidelity;
    r.f_mtilde_u = fidelity(bf.m_tilde, u);
    r.f_mmtildeprime = uf.fidelity;
    r.f_mtildeprime_mtilde = fidelity(uf.m_prime, bf.m_tilde);
    r.additivity_defect =
        std::abs((1.0 - r.f_mu) - (1.0 - r.f_mmtilde) - (1.0 - r.f_mtilde_u));
    r.df_u_c0 = 0.8 - 0.4 * std::abs((bf.u0 * x_rotation(a.phi0).adjoint()).trace());
    r.df_u_c1 = 0.8 - 0.4 * std::abs((bf.u1 * x_rotation(a.phi1).adjoint()).trace());
    return r;
}

BudgetReport decompose(const GateReport& g) { return decompose(g.m, g.u, g.angles); }

BudgetReport decompose(const GateReport& g, int n_c, int n_t, double threshold) {
    BudgetReport r = decompose(g);
    if (g.v_comp.rows() == n_c * n_t) r.leakage = channel_leakage(g.v_comp, n_c, n_t, threshold);
    return r;
}

double ramp_leakage_estimate(const DeviceParams& p, double eps_m, double tau_r) {
    const double d = angular(p.delta_ct);
    const double gap = angular(p.eta_c - 2.0 * p.delta_ct);
    if (d == 0.0 || gap == 0.0) {
        throw Error(ErrorKind::PoleSingularity, "ramp leakage estimate at eta_c = 2 Delta or Delta = 0");
    }
    if (!(tau_r > 0.0)) throw Error(ErrorKind::InvalidArgument, "tau_r must be positive");
    const double e = angular(eps_m);
    const double pi4 = std::pow(std::numbers::pi, 4);
    return 2.0 * pi4 * std::pow(e, 4) / (d * d * std::pow(gap, 6) * std::pow(tau_r, 4));
}

double tilted_axis_formula(double phi1, double eps_tilde1, double omega_zz) {
    const double w2 = omega_zz * omega_zz;
    if (w2 == 0.0) return 0.0;
    const double s = std::sin(0.5 * phi1);
    const double r = 2.0 * eps_tilde1;
    return 0.4 * s * s * w2 / (25.0 / 40.0 * r * r + w2);
}

double tilted_axis_estimate(const DeviceParams& p, double eps_m, double omega_zz, TiltModel model,
                            const PulseShape& shape) {
    switch (model) {
        case TiltModel::FirstOrder: {
            const double phi1 = std::numbers::pi * (p.eta_c + p.delta_ct) / (2.0 * p.eta_c);
            return tilted_axis_formula(phi1, first_order_drives(p, eps_m).eps_tilde[1], omega_zz);
        }
        case TiltModel::SemiAnalytic: {
            const auto pr = predict_cnot_duration(p, shape, eps_m);
            return tilted_axis_formula(pr.phi1, effective_drives(p, eps_m).eps_tilde[1], omega_zz);
        }
        case TiltModel::Quadrature:
            break;
    }
    // H(t) = eps_tilde_1(eps(t)) X - (omega_zz / 2) Z on the target, piecewise
    // constant over a fine grid; compared with the best x-rotation, whose
    // overlap is 2 sqrt(a0^2 + ax^2) for U = a0 I - i(ax X + ay Y + az Z).
    const auto pr = predict_cnot_duration(p, shape, eps_m);
    const Pulse pulse = shape.make(eps_m, pr.tau_p);
    constexpr int kSteps = 2000;
    std::vector<double> amps(kSteps);
    const double h = pr.tau_p / kSteps;
    for (int k = 0; k < kSteps; ++k) amps[k] = std::abs(pulse.envelope((k + 0.5) * h));
    const auto drives = effective_drives_many(p, amps);
    const double wz = -0.5 * angular(omega_zz);
    Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
    for (int k = 0; k < kSteps; ++k) {
        const double sign = pulse.envelope((k + 0.5) * h) < 0.0 ? -1.0 : 1.0;
        const double wx = sign * angular(drives[k].eps_tilde[1]);
        const double w = std::hypot(wx, wz);
        Eigen::Matrix2cd step = Eigen::Matrix2cd::Identity();
        if (w > 0.0) {
            const double c = std::cos(w * h), s = std::sin(w * h) / w;
            step << cd(c, -s * wz), cd(0.0, -s * wx), cd(0.0, -s * wx), cd(c, s * wz);
        }
        u = step * u;
    }
    const cd a0 = 0.5 * u.trace();
    const cd ax = cd(0.0, 0.5) * (u(0, 1) + u(1, 0));  // u01 = -i ax - ay
    const double overlap = 2.0 * std::sqrt(std::norm(a0) + std::norm(ax));
    return 0.8 - 0.4 * overlap;
}

}  // namespace crgate
