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

// Command-line front end: speed, calibrate, sweep, budget, echo, duration-at.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "crgate/calibration.hpp"
#include "crgate/echo.hpp"
#include "crgate/errorbudget.hpp"
#include "crgate/model.hpp"
#include "crgate/semianalytic.hpp"
#include "crgate/sweep.hpp"

using namespace crgate;
using nlohmann::ordered_json;

namespace {

// Model flags named after the config keys; unset flags leave the config alone.
struct ModelFlags {
    std::string config;
    std::optional<double> delta_ct, eta_c, eta_t, g, c_ct, eps_m, tau_r_frac;
    std::optional<int> n_c, n_t, steps_per_ramp;
    std::optional<std::string> drive_frame;

    void attach(CLI::App* app) {
        app->add_option("--config", config, "JSON config file")->check(CLI::ExistingFile);
        app->add_option("--delta_ct_mhz", delta_ct, "control-target detuning, MHz");
        app->add_option("--eta_c_mhz", eta_c, "control anharmonicity, MHz");
        app->add_option("--eta_t_mhz", eta_t, "target anharmonicity, MHz");
        app->add_option("--g_mhz", g, "coupling, MHz");
        app->add_option("--c_ct", c_ct, "microwave crosstalk coefficient");
        app->add_option("--n_c", n_c, "control levels");
        app->add_option("--n_t", n_t, "target levels");
        app->add_option("--drive_frame", drive_frame, "resonant_c0 | resonant_c1 | midpoint | <MHz>");
        app->add_option("--eps_m_mhz", eps_m, "drive amplitude, MHz");
        app->add_option("--tau_r_frac", tau_r_frac, "ramp fraction tau_r/tau_p");
        app->add_option("--steps_per_ramp", steps_per_ramp, "Magnus steps per ramp");
    }

    ModelConfig resolve() const {
        ModelConfig c = config.empty() ? ModelConfig{} : load_config(config);
        auto& d = c.device;
        if (delta_ct) d.delta_ct = *delta_ct;
        if (eta_c) d.eta_c = *eta_c;
        if (eta_t) d.eta_t = *eta_t;
        if (g) d.g = *g;
        if (c_ct) d.c_ct = *c_ct;
        if (n_c) d.n_c = *n_c;
        if (n_t) d.n_t = *n_t;
        if (drive_frame) d.drive_frame = DriveFrame::parse(*drive_frame);
        if (eps_m) c.eps_m = *eps_m;
        if (tau_r_frac) c.tau_r_frac = *tau_r_frac;
        if (steps_per_ramp) c.steps_per_ramp = *steps_per_ramp;
        d.validate();
        if (!(c.tau_r_frac > 0.0 && c.tau_r_frac <= 0.5)) {
            throw Error(ErrorKind::InvalidArgument, "tau_r_frac must lie in (0, 0.5]");
        }
        return c;
    }
};

PulseShape shape_of(const ModelConfig& c) { return {c.tau_r_frac, false, c.steps_per_ramp}; }

ordered_json angles_json(const GateAngles& a) {
    return {{"phi0", a.phi0}, {"phi1", a.phi1}, {"theta0", a.theta0}, {"theta1", a.theta1},
            {"theta_diff_lab", a.theta_diff_lab}};
}

ordered_json gate_json(const GateReport& g) {
    ordered_json j;
    j["eps_m_mhz"] = g.eps_m;
    j["tau_cnot_ns"] = g.tau_cnot;
    j["tau_guess_ns"] = g.tau_guess;
    j["angles"] = angles_json(g.angles);
    j["f_mu"] = g.f_mu;
    j["infidelity"] = g.infidelity();
    j["x_comp"] = g.x_comp;
    j["z_comp"] = g.z_comp;
    if (g.decoherence) j["decoherence_estimate"] = *g.decoherence;
    j["evaluations"] = g.evaluations;
    return j;
}

ordered_json budget_json(const BudgetReport& b, bool channels) {
    ordered_json j;
    j["f_mu"] = b.f_mu;
    j["f_mmtilde"] = b.f_mmtilde;
    j["f_mtilde_u"] = b.f_mtilde_u;
    j["f_mmtildeprime"] = b.f_mmtildeprime;
    j["additivity_defect"] = b.additivity_defect;
    j["infid_total"] = b.infid_total();
    j["infid_leak"] = b.infid_leak();
    j["infid_unitary"] = b.infid_unitary();
    j["df_u_c0"] = b.df_u_c0;
    j["df_u_c1"] = b.df_u_c1;
    if (b.leakage) {
        j["p_leak_out"] = b.leakage->p_out;
        j["p_leak_comp"] = b.leakage->p_comp;
        j["p_leak_combined"] = b.leakage->combined();
        if (channels) {
            ordered_json list = ordered_json::array();
            for (const auto& c : b.leakage->channels) {
                list.push_back({{"from", {c.from.n, c.from.m}}, {"to", {c.to.n, c.to.m}},
                                {"probability", c.probability}});
            }
            j["channels"] = list;
        }
    }
    return j;
}

struct Decoherence {
    std::optional<double> t1_c, t1_t, t2_c, t2_t;

    void attach(CLI::App* app) {
        app->add_option("--t1_c_ns", t1_c, "control T1, ns");
        app->add_option("--t1_t_ns", t1_t, "target T1, ns");
        app->add_option("--t2_c_ns", t2_c, "control T2, ns");
        app->add_option("--t2_t_ns", t2_t, "target T2, ns");
    }

    std::optional<DecoherenceParams> get() const {
        if (!t1_c && !t1_t && !t2_c && !t2_t) return std::nullopt;
        const double inf = INFINITY;
        return DecoherenceParams{t1_c.value_or(inf), t1_t.value_or(inf), t2_c.value_or(inf), t2_t.value_or(inf)};
    }
};

void print(const ordered_json& j) { std::cout << j.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cross-resonance gate simulator"};
    app.require_subcommand(1);

    // speed
    ModelFlags speed_flags;
    std::vector<double> speed_eps;
    std::vector<double> speed_deltas;
    double speed_cap = 1.0;
    auto* speed = app.add_subcommand("speed", "semi-analytic effective drives and CR speed (CSV)");
    speed_flags.attach(speed);
    speed->add_option("--eps", speed_eps, "amplitudes, MHz (default: 64 log-spaced over [1, 100])")->delimiter(',');
    speed->add_option("--maximize", speed_deltas, "detunings (MHz) at which to maximize the speed over eps")
        ->delimiter(',');
    speed->add_option("--cap", speed_cap, "amplitude cap for --maximize, in units of eta_c");

    // calibrate
    ModelFlags cal_flags;
    Decoherence cal_deco;
    auto* calibrate = app.add_subcommand("calibrate", "CNOT duration search at one amplitude (JSON)");
    cal_flags.attach(calibrate);
    cal_deco.attach(calibrate);

    // sweep
    std::string sweep_spec_path, sweep_out;
    std::optional<int> sweep_workers;
    auto* sweep = app.add_subcommand("sweep", "run a sweep spec file (CSV)");
    sweep->add_option("spec", sweep_spec_path, "sweep spec JSON")->required()->check(CLI::ExistingFile);
    sweep->add_option("-o,--output", sweep_out, "CSV path (default: spec output key, else stdout)");
    sweep->add_option("--workers", sweep_workers, "worker threads (0: all cores)");

    // budget
    ModelFlags bud_flags;
    std::optional<double> bud_tau;
    double bud_threshold = 1e-8;
    auto* budget = app.add_subcommand("budget", "error budget and leakage channels at one point (JSON)");
    bud_flags.attach(budget);
    budget->add_option("--tau_p_ns", bud_tau, "fixed duration instead of calibrating");
    budget->add_option("--threshold", bud_threshold, "smallest channel probability reported");

    // echo
    ModelFlags echo_flags;
    std::optional<double> echo_tau;
    auto* echo = app.add_subcommand("echo", "echo sequence against ZX_{pi/2} (JSON)");
    echo_flags.attach(echo);
    echo->add_option("--tau_p_ns", echo_tau, "fixed duration instead of calibrating");

    // duration-at
    ModelFlags dur_flags;
    DurationQuery dur_q;
    std::string dur_gate = "basic";
    auto* dur = app.add_subcommand("duration-at", "shortest CNOT duration at a target infidelity (JSON)");
    dur_flags.attach(dur);
    dur->add_option("--target", dur_q.target, "target 1 - F_MU")->required();
    dur->add_option("--gate", dur_gate, "basic | echo")->check(CLI::IsMember({"basic", "echo"}));
    dur->add_option("--eps_step", dur_q.eps_step, "amplitude scan step, MHz");
    dur->add_option("--eps_min", dur_q.eps_min, "lowest amplitude scanned, MHz");
    dur->add_option("--refine", dur_q.refine_steps, "bisection steps at the crossing");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*speed) {
            const ModelConfig c = speed_flags.resolve();
            if (!speed_deltas.empty()) {
                std::cout << "delta_ct_mhz,delta_over_eta,speed_max_over_g,eps_opt_mhz,interior\n";
                for (double d : speed_deltas) {
                    DeviceParams p = c.device;
                    p.delta_ct = d;
                    const auto m = maximize_speed(p, speed_cap);
                    std::cout << format_number(d) << ',' << format_number(m.delta_over_eta) << ','
                              << format_number(m.speed_max_over_g) << ','
                              << format_number(m.eps_opt_over_eta * p.eta_c) << ',' << (m.interior ? 1 : 0)
                              << '\n';
                }
                return 0;
            }
            SweepSpec s;
            s.fixed = c;
            s.mode = SweepMode::SpeedCurve;
            s.grid = speed_eps.empty() ? default_eps_grid() : speed_eps;
            std::cout << run_sweep(s).to_csv();
            return 0;
        }
        if (*calibrate) {
            const ModelConfig c = cal_flags.resolve();
            CalibrationOptions opt;
            opt.shape = shape_of(c);
            opt.decoherence = cal_deco.get();
            const System sys = System::build(c.device);
            const GateReport g = find_cnot_duration(sys, c.eps_m, opt);
            ordered_json j = gate_json(g);
            j["budget"] = budget_json(decompose(g, c.device.n_c, c.device.n_t), false);
            print(j);
            return 0;
        }
        if (*sweep) {
            SweepSpec s = load_sweep_spec(sweep_spec_path);
            if (sweep_workers) s.workers = *sweep_workers;
            if (!sweep_out.empty()) s.output = sweep_out;
            if (s.output.empty()) {
                std::cout << run_sweep(s).to_csv();
            } else {
                run_sweep_to_file(s);
            }
            return 0;
        }
        if (*budget) {
            const ModelConfig c = bud_flags.resolve();
            const System sys = System::build(c.device);
            GateReport g;
            if (bud_tau) {
                const Pulse pulse = shape_of(c).make(c.eps_m, *bud_tau);
                g = gate_report(sys, pulse, evolve(sys, pulse));
            } else {
                CalibrationOptions opt;
                opt.shape = shape_of(c);
                g = find_cnot_duration(sys, c.eps_m, opt);
            }
            ordered_json j = gate_json(g);
            j["budget"] = budget_json(decompose(g, c.device.n_c, c.device.n_t, bud_threshold), true);
            j["ramp_leakage_estimate"] = ramp_leakage_estimate(c.device, c.eps_m, c.tau_r_frac * g.tau_cnot);
            print(j);
            return 0;
        }
        if (*echo) {
            const ModelConfig c = echo_flags.resolve();
            const System sys = System::build(c.device);
            EchoReport r;
            if (echo_tau) {
                const double tau_r = c.tau_r_frac * *echo_tau;
                r = echo_report(sys, Pulse::echo(c.eps_m, *echo_tau, tau_r, c.steps_per_ramp),
                                run_echo(sys, c.eps_m, *echo_tau, tau_r, {}, c.steps_per_ramp));
            } else {
                CalibrationOptions opt;
                opt.shape = shape_of(c);
                r = calibrate_echo(sys, c.eps_m, opt);
            }
            ordered_json j = gate_json(r.gate);
            j["zx_sign"] = r.zx_sign;
            j["f_restricted"] = r.f_restricted;
            j["budget"] = budget_json(
                [&] {
                    BudgetReport b = decompose(r.gate.m, r.gate.u, extract_angles(r.gate.u));
                    b.leakage = channel_leakage(r.gate.v_comp, c.device.n_c, c.device.n_t);
                    return b;
                }(),
                false);
            print(j);
            return 0;
        }
        if (*dur) {
            const ModelConfig c = dur_flags.resolve();
            dur_q.gate = parse_gate_type(dur_gate);
            dur_q.ramp_fraction = c.tau_r_frac;
            dur_q.steps_per_ramp = c.steps_per_ramp;
            const DurationAt r = duration_for_infidelity(c.device, dur_q);
            ordered_json j;
            j["gate_type"] = dur_gate;
            j["target"] = dur_q.target;
            j["tau_cnot_ns"] = r.tau;
            j["eps_m_mhz"] = r.eps_m;
            j["infidelity"] = r.infidelity;
            j["eps_start_mhz"] = r.eps_start;
            j["calibrations"] = r.scanned.size();
            print(j);
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.kind() == ErrorKind::Unreachable ? 3 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
