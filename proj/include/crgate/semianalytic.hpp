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

// Effective target drives from the driven single-transmon eigenproblem,
// plus the closed-form first- and third-order expressions.
//
// Everything here works at omega_d = omega_t (delta = 0), so results depend
// on the device only through g, Delta/eta_c and eps/eta_c.

#pragma once

#include <Eigen/Dense>

#include <span>
#include <utility>
#include <vector>

#include "crgate/model.hpp"

namespace crgate {

struct ControlDressedState {
    int n = 0;
    Eigen::VectorXd coeffs;  // c_k^(n); real because eps is real
    double energy = 0.0;     // MHz
};

struct EffectiveDrives {
    double eps = 0.0;                 // MHz
    std::vector<double> eps_tilde;    // MHz, one per control level
    double speed = 0.0;               // eps_tilde[1] - eps_tilde[0]
    std::vector<double> energies;     // dressed control energies, MHz (empty for closed forms)
};

// Eigenstates of the driven control transmon (n_c levels, bare energies
// E_n^(c) at offset delta), labeled by adiabatic continuation from eps = 0.
// Throws ContinuationLost.
std::vector<ControlDressedState> dressed_control_states(const DeviceParams& p, double eps,
                                                        double delta = 0.0);

EffectiveDrives effective_drives(const DeviceParams& p, double eps, double delta = 0.0);

// Same as effective_drives for many amplitudes, sharing one continuation
// sweep per sign. Output order follows the input.
std::vector<EffectiveDrives> effective_drives_many(const DeviceParams& p,
                                                   std::span<const double> eps,
                                                   double delta = 0.0);

// Lowest-order perturbation theory. Throws PoleSingularity.
EffectiveDrives first_order_drives(const DeviceParams& p, double eps);
double first_order_speed_20(const DeviceParams& p, double eps);  // eps_tilde_2 - eps_tilde_0

// (eps_tilde_0, eps_tilde_1) accurate to eps^3.
std::pair<double, double> third_order_drives(const DeviceParams& p, double eps);

// (E_|0>eps, E_|1>eps) accurate to eps^4.
std::pair<double, double> dressed_energy_third_order(const DeviceParams& p, double eps);

struct SpeedPoint {
    double eps_over_eta = 0.0;
    double speed_over_g = 0.0;
};

std::vector<SpeedPoint> speed_curve(const DeviceParams& p, std::span<const double> eps_over_eta);

struct SpeedMaximum {
    double delta_over_eta = 0.0;
    double speed_max_over_g = 0.0;  // signed extremum
    double eps_opt_over_eta = 0.0;
    bool interior = true;           // false: extremum sits at the cap
};

SpeedMaximum maximize_speed(const DeviceParams& p, double eps_cap_over_eta = 1.0);

enum class DriveModel { SemiAnalytic, FirstOrder, ThirdOrder };

struct DurationPrediction {
    double tau_p = 0.0;      // ns
    double phi0 = 0.0;       // rad, tau_p * int 2 eps_tilde_0
    double phi1 = 0.0;       // rad
    double theta_rep = 0.0;  // rad, drive-induced control Stark phase
    double theta_zz = 0.0;   // rad, omega_zz tau_p / 2
};

// Solves tau_p * int_0^1 2[eps_tilde_1 - eps_tilde_0](eps_m s(u)) du = pi
// with a 512-point midpoint rule. ramp_fraction = 0 gives a rectangle.
// omega_zz is only used for theta_zz. Throws ZeroSpeed.
DurationPrediction predict_cnot_duration(const DeviceParams& p, const PulseShape& shape,
                                         double eps_m, DriveModel model = DriveModel::SemiAnalytic,
                                         double omega_zz = 0.0);

}  // namespace crgate
