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

#include "crgate/model.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace crgate {

namespace {

constexpr double kLabelThreshold = 0.5;

// Bare Hamiltonians in MHz. Callers convert with angular().
Eigen::MatrixXd static_hamiltonian_mhz(const DeviceParams& p, double delta) {
    const int nt = p.n_t;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(p.dim(), p.dim());
    for (int n = 0; n < p.n_c; ++n) {
        for (int m = 0; m < nt; ++m) {
            const int k = BareIndex{n, m}.flat(nt);
            h(k, k) = control_energy(p, n, delta) + target_energy(p, m, delta);
            // g sqrt(nm) |n, m-1><n-1, m| + h.c.
            if (n > 0 && m > 0) {
                const int a = BareIndex{n, m - 1}.flat(nt);
                const int b = BareIndex{n - 1, m}.flat(nt);
                const double v = p.g * std::sqrt(static_cast<double>(n * m));
                h(a, b) += v;
                h(b, a) += v;
            }
        }
    }
    return h;
}

Eigen::MatrixXd drive_operator(const DeviceParams& p) {
    const int nt = p.n_t;
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(p.dim(), p.dim());
    for (int n = 0; n < p.n_c; ++n) {
        for (int m = 0; m < nt; ++m) {
            const int k = BareIndex{n, m}.flat(nt);
            if (n > 0) {
                const int j = BareIndex{n - 1, m}.flat(nt);
                d(k, j) = d(j, k) = std::sqrt(static_cast<double>(n));
            }
            if (m > 0 && p.c_ct != 0.0) {
                const int j = BareIndex{n, m - 1}.flat(nt);
                d(k, j) = d(j, k) = p.c_ct * std::sqrt(static_cast<double>(m));
            }
        }
    }
    return d;
}

}  // namespace

DriveFrame DriveFrame::parse(const std::string& text) {
    if (text == "resonant_c0" || text == "ResonantC0") return resonant_c0();
    if (text == "resonant_c1" || text == "ResonantC1") return resonant_c1();
    if (text == "midpoint" || text == "Midpoint") return midpoint();
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) {
        throw Error(ErrorKind::InvalidArgument, "unknown drive_frame '" + text + "'");
    }
    return explicit_delta(v);
}

std::string DriveFrame::to_string() const {
    switch (kind) {
        case Kind::ResonantC0: return "resonant_c0";
        case Kind::ResonantC1: return "resonant_c1";
        case Kind::Midpoint: return "midpoint";
        case Kind::Explicit: {
            std::ostringstream os;
            os.precision(12);
            os << delta_mhz;
            return os.str();
        }
    }
    return "resonant_c0";
}

void DeviceParams::validate() const {
    if (!(eta_c > 0.0) || !(eta_t > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "anharmonicities must be positive");
    }
    if (n_c < 3 || n_t < 3) {
        throw Error(ErrorKind::InvalidArgument, "need at least 3 levels per transmon");
    }
    if (!std::isfinite(delta_ct) || !std::isfinite(g) || !std::isfinite(c_ct)) {
        throw Error(ErrorKind::InvalidArgument, "non-finite device parameter");
    }
}

std::array<int, 4> computational_indices(int n_t) noexcept {
    return {0, 1, n_t, n_t + 1};
}

double control_energy(const DeviceParams& p, int n, double delta) noexcept {
    return n * (p.delta_ct + delta) - 0.5 * n * (n - 1) * p.eta_c;
}

double target_energy(const DeviceParams& p, int m, double delta) noexcept {
    return m * delta - 0.5 * m * (m - 1) * p.eta_t;
}

Eigen::MatrixXd build_static_hamiltonian(const DeviceParams& p, double delta) {
    p.validate();
    return kRadPerNsPerMHz * static_hamiltonian_mhz(p, delta);
}

Eigen::MatrixXd build_drive_hamiltonian(const DeviceParams& p, double eps) {
    p.validate();
    return angular(eps) * drive_operator(p);
}

DressedBasis diagonalize_static(const DeviceParams& p, double delta) {
    p.validate();
    const int dim = p.dim();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(static_hamiltonian_mhz(p, delta));
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::LabelingAmbiguous, "eigensolver failed");
    }
    const Eigen::MatrixXd& raw = solver.eigenvectors();

    DressedBasis b;
    b.n_c = p.n_c;
    b.n_t = p.n_t;
    b.delta = delta;
    b.eigvecs.resize(dim, dim);
    b.eigvals.resize(dim);
    b.label_of.assign(dim, -1);
    std::vector<bool> taken(dim, false);
    for (int k = 0; k < dim; ++k) {
        Eigen::Index col = 0;
        const double best = raw.row(k).cwiseAbs2().maxCoeff(&col);
        if (best <= kLabelThreshold || taken[col]) {
            const auto [n, m] = BareIndex::from_flat(k, p.n_t);
            throw Error(ErrorKind::LabelingAmbiguous,
                        "bare state |" + std::to_string(n) + "," + std::to_string(m) +
                            "> has max overlap " + std::to_string(best));
        }
        taken[col] = true;
        b.label_of[k] = static_cast<int>(col);
        const double sign = raw(k, col) < 0.0 ? -1.0 : 1.0;
        b.eigvecs.col(k) = sign * raw.col(col);
        b.eigvals(k) = solver.eigenvalues()(col);
    }

    auto& d = b.derived;
    d.target_c0 = b.energy(0, 1) - b.energy(0, 0);
    d.target_c1 = b.energy(1, 1) - b.energy(1, 0);
    d.control_t0 = b.energy(1, 0) - b.energy(0, 0);
    d.control_t1 = b.energy(1, 1) - b.energy(0, 1);
    d.zz = b.energy(1, 1) + b.energy(0, 0) - b.energy(0, 1) - b.energy(1, 0);
    return b;
}

double resolve_drive_frame(const DeviceParams& p, const DressedBasis& lab) {
    // In the delta = 0 frame omega_d = omega_t, so target_cX = omega_t^{cX} - omega_t.
    const double shift_c0 = lab.target_shift_c0();
    const double shift_c1 = lab.target_shift_c1();
    switch (p.drive_frame.kind) {
        case DriveFrame::Kind::ResonantC0: return -shift_c0;
        case DriveFrame::Kind::ResonantC1: return -shift_c1;
        case DriveFrame::Kind::Midpoint: return -0.5 * (shift_c0 + shift_c1);
        case DriveFrame::Kind::Explicit: return p.drive_frame.delta_mhz;
    }
    return 0.0;
}

double zz_approx(const DeviceParams& p) {
    const double a = p.delta_ct + p.eta_t;
    const double b = p.delta_ct - p.eta_c;
    if (a == 0.0 || b == 0.0) {
        throw Error(ErrorKind::PoleSingularity, "zz_approx at Delta = eta_c or Delta = -eta_t");
    }
    const double g2 = p.g * p.g;
    return 2.0 * g2 / a - 2.0 * g2 / b;
}

System System::build(const DeviceParams& p) {
    System s;
    s.params = p;
    DressedBasis lab = diagonalize_static(p, 0.0);
    s.delta = resolve_drive_frame(p, lab);
    s.basis = s.delta == 0.0 ? std::move(lab) : diagonalize_static(p, s.delta);
    s.drive = s.basis.eigvecs.transpose() * drive_operator(p) * s.basis.eigvecs;
    return s;
}

// ---------------------------------------------------------------------------
// Pulse

namespace {

void check_segment(double len, double ramp) {
    if (!(len > 0.0) || !(ramp > 0.0) || ramp > 0.5 * len * (1.0 + 1e-12)) {
        throw Error(ErrorKind::InvalidArgument, "pulse needs 0 < ramp <= segment/2");
    }
}

}  // namespace

Pulse Pulse::basic(double eps_m, double tau_p, double tau_r, int steps_per_ramp) {
    check_segment(tau_p, tau_r);
    if (steps_per_ramp < 1) throw Error(ErrorKind::InvalidArgument, "steps_per_ramp < 1");
    Pulse p;
    p.eps_m = eps_m;
    p.tau_p = tau_p;
    p.tau_r = tau_r;
    p.steps_per_ramp = steps_per_ramp;
    p.segments = {{0.0, tau_p, tau_r, +1}};
    return p;
}

Pulse Pulse::echo(double eps_m, double tau_p, double tau_r, int steps_per_ramp) {
    check_segment(0.5 * tau_p, 0.5 * tau_r);
    if (steps_per_ramp < 1) throw Error(ErrorKind::InvalidArgument, "steps_per_ramp < 1");
    Pulse p;
    p.eps_m = eps_m;
    p.tau_p = tau_p;
    p.tau_r = tau_r;
    p.steps_per_ramp = steps_per_ramp;
    const double half = 0.5 * tau_p;
    p.segments = {{0.0, half, 0.5 * tau_r, +1}, {half, tau_p, 0.5 * tau_r, -1}};
    return p;
}

double normalized_shape(double u, double ramp_fraction) noexcept {
    if (ramp_fraction <= 0.0) return (u >= 0.0 && u <= 1.0) ? 1.0 : 0.0;
    const double pi = std::numbers::pi;
    if (u < ramp_fraction) return 0.5 * (1.0 - std::cos(pi * u / ramp_fraction));
    if (u > 1.0 - ramp_fraction) return 0.5 * (1.0 - std::cos(pi * (1.0 - u) / ramp_fraction));
    return 1.0;
}

double Pulse::envelope(double t) const {
    if (t < 0.0 || t > tau_p) {
        throw Error(ErrorKind::InvalidArgument, "envelope time outside [0, tau_p]");
    }
    for (const auto& s : segments) {
        if (t >= s.start && t <= s.end) {
            const double len = s.end - s.start;
            return s.sign * eps_m * normalized_shape((t - s.start) / len, s.ramp / len);
        }
    }
    return 0.0;
}

double Pulse::integral() const {
    double acc = 0.0;
    for (const auto& s : segments) acc += s.sign * eps_m * ((s.end - s.start) - s.ramp);
    return acc;
}

double Pulse::square_integral() const {
    // Each raised-cosine ramp contributes 3/8 of its length.
    double acc = 0.0;
    for (const auto& s : segments) acc += eps_m * eps_m * ((s.end - s.start) - 1.25 * s.ramp);
    return acc;
}

// ---------------------------------------------------------------------------
// Config

namespace {

ModelConfig from_json(const nlohmann::json& j) {
    ModelConfig c;
    auto& d = c.device;
    d.delta_ct = j.value("delta_ct_mhz", d.delta_ct);
    d.eta_c = j.value("eta_c_mhz", d.eta_c);
    d.eta_t = j.value("eta_t_mhz", d.eta_t);
    d.g = j.value("g_mhz", d.g);
    d.c_ct = j.value("c_ct", d.c_ct);
    d.n_c = j.value("n_c", d.n_c);
    d.n_t = j.value("n_t", d.n_t);
    if (j.contains("drive_frame")) {
        const auto& f = j.at("drive_frame");
        d.drive_frame = f.is_number() ? DriveFrame::explicit_delta(f.get<double>())
                                      : DriveFrame::parse(f.get<std::string>());
    }
    c.eps_m = j.value("eps_m_mhz", c.eps_m);
    c.tau_r_frac = j.value("tau_r_frac", c.tau_r_frac);
    c.steps_per_ramp = j.value("steps_per_ramp", c.steps_per_ramp);
    d.validate();
    if (!(c.tau_r_frac > 0.0 && c.tau_r_frac <= 0.5)) {
        throw Error(ErrorKind::InvalidArgument, "tau_r_frac must lie in (0, 0.5]");
    }
    return c;
}

}  // namespace

ModelConfig parse_config(const std::string& json_text) {
    try {
        return from_json(nlohmann::json::parse(json_text));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidArgument, std::string("config: ") + e.what());
    }
}

ModelConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string dump_config(const ModelConfig& c) {
    nlohmann::json j;
    j["delta_ct_mhz"] = c.device.delta_ct;
    j["eta_c_mhz"] = c.device.eta_c;
    j["eta_t_mhz"] = c.device.eta_t;
    j["g_mhz"] = c.device.g;
    j["c_ct"] = c.device.c_ct;
    j["n_c"] = c.device.n_c;
    j["n_t"] = c.device.n_t;
    if (c.device.drive_frame.kind == DriveFrame::Kind::Explicit) {
        j["drive_frame"] = c.device.drive_frame.delta_mhz;
    } else {
        j["drive_frame"] = c.device.drive_frame.to_string();
    }
    j["eps_m_mhz"] = c.eps_m;
    j["tau_r_frac"] = c.tau_r_frac;
    j["steps_per_ramp"] = c.steps_per_ramp;
    return j.dump(2);
}

}  // namespace crgate
