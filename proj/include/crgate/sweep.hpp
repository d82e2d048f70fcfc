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

// Parameter sweeps over calibrated gates and CSV tables.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "crgate/calibration.hpp"
#include "crgate/echo.hpp"
#include "crgate/errorbudget.hpp"
#include "crgate/model.hpp"

namespace crgate {

enum class GateType { Basic, Echo };
enum class SweepAxis { EpsM, DeltaCt, G, TauRFrac, CCt, DriveFrame };
enum class SweepMode { DurationCurve, InfidelityCurve, Parametric, SpeedCurve, Budget };

GateType parse_gate_type(const std::string& s);
SweepAxis parse_axis(const std::string& s);
SweepMode parse_mode(const std::string& s);
std::string to_string(GateType t);
std::string to_string(SweepAxis a);
std::string to_string(SweepMode m);

// 64 log-spaced amplitudes over [1, 100] MHz.
std::vector<double> default_eps_grid();

struct SweepSpec {
    SweepAxis axis = SweepAxis::EpsM;
    std::vector<double> grid;          // numeric axes
    std::vector<std::string> frames;   // drive_frame axis labels
    std::vector<double> eps_grid;      // optional inner eps_m axis for non-eps sweeps
    ModelConfig fixed;
    GateType gate_type = GateType::Basic;
    SweepMode mode = SweepMode::InfidelityCurve;
    int workers = 1;                   // 0: hardware concurrency
    std::filesystem::path output;

    void validate() const;
    std::size_t size() const;
};

// Sweep keys (axis, grid, frames, eps_grid, gate_type, mode, workers, output)
// next to the model config keys in one JSON object.
SweepSpec parse_sweep_spec(const std::string& json_text);
SweepSpec load_sweep_spec(const std::filesystem::path& path);

struct SweepPoint {
    std::string axis_value;  // formatted axis value (frame label or number)
    double value = 0.0;      // numeric axis value; 0 for drive_frame
    double eps_m = 0.0;
    std::string status = "ok";  // "ok" or an error kind
    std::optional<GateReport> gate;
    std::optional<BudgetReport> budget;
    double tau_semianalytic = 0.0;
    double eps_tilde0 = 0.0;  // speed mode
    double eps_tilde1 = 0.0;
    double speed_over_g = 0.0;
};

struct SweepTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> cells;
    std::vector<SweepPoint> points;  // grid order

    std::string to_csv() const;
};

// Grid points run on spec.workers threads; rows come out in grid order and
// failed points carry their error kind in the status column.
SweepTable run_sweep(const SweepSpec& spec);
// Runs and writes spec.output; throws only on I/O failure.
SweepTable run_sweep_to_file(const SweepSpec& spec);

std::string format_number(double x);  // 12 significant digits

struct DurationQuery {
    GateType gate = GateType::Basic;
    double target = 0.01;     // 1 - F_MU
    double ramp_fraction = 0.3;
    int steps_per_ramp = 600;
    double eps_step = 2.0;    // MHz, downward scan step
    double eps_min = 2.0;     // MHz
    int refine_steps = 6;     // bisections between the last failing and first passing amplitude
};

struct DurationSample {
    double eps_m = 0.0;
    double tau = 0.0;
    double infidelity = 0.0;
    std::string status = "ok";
};

struct DurationAt {
    double tau = 0.0;
    double eps_m = 0.0;
    double infidelity = 0.0;
    double eps_start = 0.0;  // speed-maximizing amplitude
    std::vector<DurationSample> scanned;
};

// Scans eps_m down from the speed maximum; shortest duration with 1 - F_MU <= target.
// Throws Unreachable when no amplitude qualifies.
DurationAt duration_for_infidelity(const DeviceParams& p, const DurationQuery& q);

}  // namespace crgate
