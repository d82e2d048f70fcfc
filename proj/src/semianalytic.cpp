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

#include "crgate/semianalytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace crgate {

namespace {

constexpr int kGridPoints = 200;
constexpr double kGridStart = 1e-4;  // in units of eta_c
constexpr double kOverlapMin = 0.5;
constexpr int kMaxRefine = 40;
constexpr int kQuadraturePoints = 512;

// Follows the labeled eigenvectors of the driven control transmon as the
// amplitude moves away from zero.
class Continuation {
public:
    Continuation(const DeviceParams& p, double delta) : nc_(p.n_c), bare_(p.n_c) {
        for (int n = 0; n < nc_; ++n) bare_(n) = control_energy(p, n, delta);
        vecs_ = Eigen::MatrixXd::Identity(nc_, nc_);
        energies_ = bare_;
    }

    double eps() const noexcept { return eps_; }
    const Eigen::MatrixXd& vecs() const noexcept { return vecs_; }
    const Eigen::VectorXd& energies() const noexcept { return energies_; }

    // Advance to eps, halving the step when the overlap match is unclear.
    void advance(double eps) {
        int depth = 0;
        while (eps_ != eps) {
            double next = eps;
            for (int i = 0; i < depth; ++i) next = 0.5 * (eps_ + next);
            if (try_step(next)) {
                depth = std::max(0, depth - 1);
            } else if (++depth > kMaxRefine) {
                throw Error(ErrorKind::ContinuationLost,
                            "overlap below 0.5 near eps = " + std::to_string(eps_) + " MHz");
            }
        }
    }

private:
    bool try_step(double eps) {
        Eigen::MatrixXd h = bare_.asDiagonal();
        for (int k = 1; k < nc_; ++k) h(k, k - 1) = h(k - 1, k) = eps * std::sqrt(double(k));
        solver_.compute(h);
        const Eigen::MatrixXd& raw = solver_.eigenvectors();
        const Eigen::MatrixXd ov = vecs_.transpose() * raw;
        Eigen::MatrixXd next(nc_, nc_);
        Eigen::VectorXd e(nc_);
        std::vector<bool> taken(nc_, false);
        for (int n = 0; n < nc_; ++n) {
            Eigen::Index col = 0;
            const double best = ov.row(n).cwiseAbs2().maxCoeff(&col);
            if (best < kOverlapMin || taken[col]) return false;
            taken[col] = true;
            next.col(n) = ov(n, col) < 0.0 ? Eigen::VectorXd(-raw.col(col)) : raw.col(col);
            e(n) = solver_.eigenvalues()(col);
        }
        vecs_ = std::move(next);
        energies_ = std::move(e);
        eps_ = eps;
        return true;
    }

    int nc_;
    Eigen::VectorXd bare_;
    Eigen::MatrixXd vecs_;
    Eigen::VectorXd energies_;
    double eps_ = 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver_;
};

EffectiveDrives drives_from(const DeviceParams& p, double eps, const Eigen::MatrixXd& c,
                            const Eigen::VectorXd& energies) {
    EffectiveDrives r;
    r.eps = eps;
    r.eps_tilde.assign(p.n_c, 0.0);
    for (int n = 0; n < p.n_c; ++n) {
        double acc = 0.0;
        for (int k = 1; k < p.n_c; ++k) acc += std::sqrt(double(k)) * c(k, n) * c(k - 1, n);
        r.eps_tilde[n] = p.g * acc;
    }
    r.speed = r.eps_tilde[1] - r.eps_tilde[0];
    r.energies.assign(energies.data(), energies.data() + energies.size());
    return r;
}

// Geometric grid from kGridStart*eta_c to top, merged with the targets.
std::vector<double> continuation_grid(const DeviceParams& p, std::vector<double> targets) {
    const double top = targets.empty() ? 0.0 : *std::max_element(targets.begin(), targets.end());
    const double lo = kGridStart * p.eta_c;
    if (top > lo) {
        const double ratio = std::pow(top / lo, 1.0 / (kGridPoints - 1));
        double x = lo;
        for (int i = 0; i < kGridPoints - 1; ++i, x *= ratio) targets.push_back(x);
    }
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    return targets;
}

void check_pole(double d, const char* what) {
    if (d == 0.0 || !std::isfinite(1.0 / d)) {
        throw Error(ErrorKind::PoleSingularity, what);
    }
}

}  // namespace

std::vector<ControlDressedState> dressed_control_states(const DeviceParams& p, double eps,
                                                        double delta) {
    p.validate();
    Continuation cont(p, delta);
    const double a = std::abs(eps);
    for (double x : continuation_grid(p, {a})) cont.advance(x);
    // H(-eps) = P H(eps) P with P = diag((-1)^k); labels carry over.
    std::vector<ControlDressedState> out(p.n_c);
    for (int n = 0; n < p.n_c; ++n) {
        out[n].n = n;
        out[n].coeffs = cont.vecs().col(n);
        if (eps < 0.0) {
            for (int k = 1; k < p.n_c; k += 2) out[n].coeffs(k) = -out[n].coeffs(k);
            if (n % 2 == 1) out[n].coeffs = -out[n].coeffs;  // keep c_n > 0
        }
        out[n].energy = cont.energies()(n);
    }
    return out;
}

EffectiveDrives effective_drives(const DeviceParams& p, double eps, double delta) {
    const double e[1] = {eps};
    return std::move(effective_drives_many(p, e, delta).front());
}

std::vector<EffectiveDrives> effective_drives_many(const DeviceParams& p,
                                                   std::span<const double> eps, double delta) {
    p.validate();
    std::vector<EffectiveDrives> out(eps.size());
    std::vector<double> mags;
    mags.reserve(eps.size());
    for (double e : eps) {
        if (!std::isfinite(e)) throw Error(ErrorKind::InvalidArgument, "non-finite eps");
        mags.push_back(std::abs(e));
    }
    std::vector<std::size_t> order(eps.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return mags[a] < mags[b]; });

    Continuation cont(p, delta);
    std::size_t next = 0;
    for (double x : continuation_grid(p, mags)) {
        cont.advance(x);
        while (next < order.size() && mags[order[next]] == x) {
            const std::size_t i = order[next++];
            EffectiveDrives r = drives_from(p, x, cont.vecs(), cont.energies());
            // Odd in eps: every eps_tilde flips sign, energies are even.
            if (eps[i] < 0.0) {
                r.eps = eps[i];
                for (double& v : r.eps_tilde) v = -v;
                r.speed = -r.speed;
            }
            out[i] = std::move(r);
        }
    }
    return out;
}

EffectiveDrives first_order_drives(const DeviceParams& p, double eps) {
    const double d = p.delta_ct;
    const double eta = p.eta_c;
    EffectiveDrives r;
    r.eps = eps;
    r.eps_tilde.resize(p.n_c);
    for (int n = 0; n < p.n_c; ++n) {
        const double den = (d - (n - 1) * eta) * (d - n * eta);
        check_pole(den, "first-order drive at a level resonance");
        r.eps_tilde[n] = -p.g * (d + eta) * eps / den;
    }
    check_pole(d * (eta - d), "first-order speed at Delta = 0 or eta_c");
    r.speed = 2.0 * p.g * eta * eps / (d * (eta - d));
    return r;
}

double first_order_speed_20(const DeviceParams& p, double eps) {
    const double d = p.delta_ct;
    const double eta = p.eta_c;
    const double den = d * (eta - d) * (2.0 * eta - d);
    check_pole(den, "first-order eps_tilde_2 - eps_tilde_0 at a level resonance");
    return 2.0 * p.g * eta * (eta - 2.0 * d) * eps / den;
}

std::pair<double, double> third_order_drives(const DeviceParams& p, double eps) {
    const double d = p.delta_ct;
    const double eta = p.eta_c;
    const double e1 = d, e2 = 2.0 * d - eta, e21 = d - eta, e31 = 2.0 * d - 3.0 * eta;
    for (double x : {e1, e2, e21, e31}) check_pole(x, "third-order drive denominator");
    const double g = p.g;
    const double s = eps * eps;
    const double t0 = -g * (eps / e1) * (1.0 - 2.0 * s / (e1 * e1) + 4.0 * s / (e1 * e2));
    const double e10 = e1;
    const double t1 =
        -(2.0 * eps * g / e21) *
            (1.0 + 6.0 * s / (e21 * e31) + s / (e10 * e21) - 4.0 * s / (e21 * e21) -
             s / (e10 * e10)) +
        (eps * g / e10) *
            (1.0 - 2.0 * s / (e10 * e10) + 2.0 * s / (e10 * e21) - 2.0 * s / (e21 * e21));
    return {t0, t1};
}

std::pair<double, double> dressed_energy_third_order(const DeviceParams& p, double eps) {
    const double d = p.delta_ct;
    const double eta = p.eta_c;
    const double e1 = d, e2 = 2.0 * d - eta, e21 = d - eta, e31 = 2.0 * d - 3.0 * eta;
    const double e01 = -d;
    for (double x : {e1, e2, e21, e31}) check_pole(x, "third-order energy denominator");
    const double s = eps * eps;
    const double en0 = -s / e1 * (1.0 + 2.0 * s / (e1 * e2) - s / (e1 * e1));
    const double en1 = e1 - s / e01 * (1.0 - s / (e01 * e01) - 2.0 * s / (e21 * e01)) -
                       2.0 * s / e21 *
                           (1.0 + 3.0 * s / (e21 * e31) - 2.0 * s / (e21 * e21) -
                            s / (e01 * e21));
    return {en0, en1};
}

std::vector<SpeedPoint> speed_curve(const DeviceParams& p, std::span<const double> eps_over_eta) {
    std::vector<double> eps(eps_over_eta.size());
    std::transform(eps_over_eta.begin(), eps_over_eta.end(), eps.begin(),
                   [&](double x) { return x * p.eta_c; });
    const auto drives = effective_drives_many(p, eps);
    std::vector<SpeedPoint> out(eps.size());
    for (std::size_t i = 0; i < eps.size(); ++i) {
        out[i] = {eps_over_eta[i], p.g != 0.0 ? drives[i].speed / p.g : 0.0};
    }
    return out;
}

SpeedMaximum maximize_speed(const DeviceParams& p, double eps_cap_over_eta) {
    if (!(eps_cap_over_eta > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "eps cap must be positive");
    }
    if (p.g == 0.0) throw Error(ErrorKind::ZeroSpeed, "g = 0");
    // Work with g = 1, eta_c = 1 so the result is dimensionless directly.
    DeviceParams q = p;
    q.g = 1.0;
    q.eta_c = 1.0;
    q.delta_ct = p.delta_ct / p.eta_c;

    constexpr int kScan = 400;
    std::vector<double> xs(kScan);
    for (int i = 0; i < kScan; ++i) xs[i] = eps_cap_over_eta * (i + 1) / kScan;
    const auto curve = speed_curve(q, xs);
    int best = 0;
    for (int i = 1; i < kScan; ++i) {
        if (std::abs(curve[i].speed_over_g) > std::abs(curve[best].speed_over_g)) best = i;
    }

    SpeedMaximum r;
    r.delta_over_eta = q.delta_ct;
    if (best == kScan - 1) {
        r.interior = false;
        r.eps_opt_over_eta = xs[best];
        r.speed_max_over_g = curve[best].speed_over_g;
        return r;
    }

    auto f = [&](double x) { return std::abs(effective_drives(q, x).speed); };
    double a = best == 0 ? 0.0 : xs[best - 1];
    double b = xs[best + 1];
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > 1e-12 * std::max(1.0, b)) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    r.eps_opt_over_eta = 0.5 * (a + b);
    r.speed_max_over_g = effective_drives(q, r.eps_opt_over_eta).speed;
    return r;
}

DurationPrediction predict_cnot_duration(const DeviceParams& p, const PulseShape& shape,
                                         double eps_m, DriveModel model, double omega_zz) {
    // Midpoint nodes of the normalized shape. The echo halves are the basic
    // shape compressed twice; the second half's sign flip is undone by the
    // control flip, so only |s| enters.
    std::vector<double> amps(kQuadraturePoints);
    for (int i = 0; i < kQuadraturePoints; ++i) {
        const double u = (i + 0.5) / kQuadraturePoints;
        // An echo is two scaled copies of the basic envelope, so the integrals agree.
        const double s = normalized_shape(u, shape.ramp_fraction);
        amps[i] = eps_m * s;
    }

    std::vector<double> t0(amps.size()), t1(amps.size()), split(amps.size());
    // Zero-drive splitting in the same control-only model, so theta_rep -> 0 as eps_m -> 0.
    const double bare_split = p.delta_ct;
    switch (model) {
        case DriveModel::SemiAnalytic: {
            const auto drives = effective_drives_many(p, amps);
            for (std::size_t i = 0; i < amps.size(); ++i) {
                t0[i] = drives[i].eps_tilde[0];
                t1[i] = drives[i].eps_tilde[1];
                split[i] = drives[i].energies[1] - drives[i].energies[0];
            }
            break;
        }
        case DriveModel::FirstOrder:
            for (std::size_t i = 0; i < amps.size(); ++i) {
                const auto r = first_order_drives(p, amps[i]);
                t0[i] = r.eps_tilde[0];
                t1[i] = r.eps_tilde[1];
                const double s = amps[i] * amps[i];
                const double d = p.delta_ct;
                // Leading-order Stark shifts of |0> and |1>.
                split[i] = d + 2.0 * s / d - 2.0 * s / (d - p.eta_c);
            }
            break;
        case DriveModel::ThirdOrder:
            for (std::size_t i = 0; i < amps.size(); ++i) {
                std::tie(t0[i], t1[i]) = third_order_drives(p, amps[i]);
                const auto [en0, en1] = dressed_energy_third_order(p, amps[i]);
                split[i] = en1 - en0;
            }
            break;
    }

    double i_speed = 0.0, i_t0 = 0.0, i_t1 = 0.0, i_rep = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        i_speed += 2.0 * (t1[i] - t0[i]);
        i_t0 += 2.0 * t0[i];
        i_t1 += 2.0 * t1[i];
        i_rep += split[i] - bare_split;
    }
    const double w = 1.0 / kQuadraturePoints;
    i_speed *= w;
    i_t0 *= w;
    i_t1 *= w;
    i_rep *= w;

    if (i_speed == 0.0 || !std::isfinite(i_speed)) {
        throw Error(ErrorKind::ZeroSpeed, "shape-averaged speed vanishes");
    }
    DurationPrediction r;
    r.tau_p = std::numbers::pi / std::abs(angular(i_speed));
    r.phi0 = angular(i_t0) * r.tau_p;
    r.phi1 = angular(i_t1) * r.tau_p;
    r.theta_rep = wrap_angle(angular(i_rep) * r.tau_p);
    r.theta_zz = 0.5 * angular(omega_zz) * r.tau_p;
    return r;
}

}  // namespace crgate
