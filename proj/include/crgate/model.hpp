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

// Two coupled Duffing transmons in the frame rotating at the drive
// frequency: static Hamiltonian, drive term, dressed eigenbasis and the
// cosine-ramp pulse envelope.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "crgate/errors.hpp"
#include "crgate/units.hpp"

namespace crgate {

struct DriveFrame {
    enum class Kind { ResonantC0, ResonantC1, Midpoint, Explicit };

    Kind kind = Kind::ResonantC0;
    double delta_mhz = 0.0;  // used only for Explicit

    static DriveFrame resonant_c0() { return {Kind::ResonantC0, 0.0}; }
    static DriveFrame resonant_c1() { return {Kind::ResonantC1, 0.0}; }
    static DriveFrame midpoint() { return {Kind::Midpoint, 0.0}; }
    static DriveFrame explicit_delta(double d) { return {Kind::Explicit, d}; }

    // Accepts "resonant_c0", "resonant_c1", "midpoint" or a number (MHz).
    static DriveFrame parse(const std::string& text);
    std::string to_string() const;

    friend bool operator==(const DriveFrame&, const DriveFrame&) = default;
};

struct DeviceParams {
    double delta_ct = 130.0;  // omega_c - omega_t, MHz
    double eta_c = 300.0;     // MHz, > 0
    double eta_t = 300.0;     // MHz, > 0
    double g = 3.0;           // MHz
    double c_ct = 0.0;        // real crosstalk coefficient
    int n_c = 7;
    int n_t = 5;
    DriveFrame drive_frame{};

    int dim() const noexcept { return n_c * n_t; }

    // Throws Error(InvalidArgument) on violated invariants.
    void validate() const;

    friend bool operator==(const DeviceParams&, const DeviceParams&) = default;
};

// Control-major flat ordering of |n, m>.
struct BareIndex {
    int n = 0;
    int m = 0;

    int flat(int n_t) const noexcept { return n * n_t + m; }
    static BareIndex from_flat(int k, int n_t) noexcept { return {k / n_t, k % n_t}; }
};

// Computational states |00>, |01>, |10>, |11> as flat indices.
std::array<int, 4> computational_indices(int n_t) noexcept;

// Transition frequencies of the dressed system, measured in the drive
// rotating frame (laboratory frequency minus omega_d), MHz. zz is frame
// independent.
struct DerivedFrequencies {
    double target_c0 = 0.0;   // omega_t^{c0} - omega_d
    double target_c1 = 0.0;   // omega_t^{c1} - omega_d
    double control_t0 = 0.0;  // omega_c^{t0} - omega_d
    double control_t1 = 0.0;  // omega_c^{t1} - omega_d
    double zz = 0.0;
};

// Eigen-decomposition of H_qb + H_g. Columns are reordered so that
// column k is the dressed state adiabatically labeled by bare flat index k.
struct DressedBasis {
    int n_c = 0;
    int n_t = 0;
    double delta = 0.0;         // drive-frame offset this basis was built at, MHz
    Eigen::MatrixXd eigvecs;    // real orthogonal (the static Hamiltonian is real)
    Eigen::VectorXd eigvals;    // MHz, rotating frame
    std::vector<int> label_of;  // bare flat index -> column of the raw solver output
    DerivedFrequencies derived;

    int dim() const noexcept { return n_c * n_t; }
    double energy(int n, int m) const { return eigvals(BareIndex{n, m}.flat(n_t)); }

    // omega_t^{cX} - omega_t, independent of the rotating frame.
    double target_shift_c0() const noexcept { return derived.target_c0 - delta; }
    double target_shift_c1() const noexcept { return derived.target_c1 - delta; }
};

// Bare-basis matrices in angular units (rad/ns). delta is the resolved
// omega_t - omega_d in MHz.
Eigen::MatrixXd build_static_hamiltonian(const DeviceParams& p, double delta);

// Drive plus crosstalk term for a real amplitude eps (MHz), rad/ns.
Eigen::MatrixXd build_drive_hamiltonian(const DeviceParams& p, double eps);

// Bare control-ladder energy E_n^(c) in MHz.
double control_energy(const DeviceParams& p, int n, double delta) noexcept;
double target_energy(const DeviceParams& p, int m, double delta) noexcept;

// Throws LabelingAmbiguous when some bare state has max |overlap|^2 <= 0.5.
DressedBasis diagonalize_static(const DeviceParams& p, double delta = 0.0);

// omega_t - omega_d for the requested frame, from a basis built at delta = 0.
double resolve_drive_frame(const DeviceParams& p, const DressedBasis& lab_basis);

// 2g^2/(Delta+eta_t) - 2g^2/(Delta-eta_c), MHz.
double zz_approx(const DeviceParams& p);

// Resolved two-transmon system ready for propagation.
struct System {
    DeviceParams params;
    double delta = 0.0;       // MHz
    DressedBasis basis;
    Eigen::MatrixXd drive;    // H_eps / eps in the dressed basis (dimensionless)

    static System build(const DeviceParams& p);

    const DerivedFrequencies& derived() const noexcept { return basis.derived; }
};

struct PulseSegment {
    double start = 0.0;  // ns
    double end = 0.0;    // ns
    double ramp = 0.0;   // ns, each of the two ramps inside this segment
    int sign = 1;
};

// Piecewise envelope made of raised-cosine ramps around a flat top.
struct Pulse {
    double eps_m = 0.0;    // MHz
    double tau_p = 0.0;    // ns
    double tau_r = 0.0;    // ns, total front-ramp time
    std::vector<PulseSegment> segments;
    int steps_per_ramp = 600;

    static Pulse basic(double eps_m, double tau_p, double tau_r, int steps_per_ramp = 600);
    // Two half-length sign-flipped copies, each with ramps of tau_r/2.
    static Pulse echo(double eps_m, double tau_p, double tau_r, int steps_per_ramp = 600);

    double envelope(double t) const;  // MHz
    double integral() const;          // MHz*ns, analytic
    double square_integral() const;   // MHz^2*ns, analytic
};

// Shape template: fixes the ramp fraction tau_r/tau_p and the gate type.
struct PulseShape {
    double ramp_fraction = 0.3;
    bool echo = false;
    int steps_per_ramp = 600;

    Pulse make(double eps_m, double tau_p) const {
        return echo ? Pulse::echo(eps_m, tau_p, ramp_fraction * tau_p, steps_per_ramp)
                    : Pulse::basic(eps_m, tau_p, ramp_fraction * tau_p, steps_per_ramp);
    }
};

// Normalized single-ramp-pair shape s(u), u in [0, 1], peak 1.
double normalized_shape(double u, double ramp_fraction) noexcept;

struct ModelConfig {
    DeviceParams device;
    double eps_m = 40.0;        // MHz
    double tau_r_frac = 0.3;
    int steps_per_ramp = 600;
};

ModelConfig load_config(const std::filesystem::path& path);
ModelConfig parse_config(const std::string& json_text);
std::string dump_config(const ModelConfig& cfg);

}  // namespace crgate
