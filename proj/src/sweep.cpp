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

#include "crgate/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "crgate/semianalytic.hpp"

namespace crgate {

namespace {

template <typename E, std::size_t N>
E parse_enum(const std::string& s, const std::pair<const char*, E> (&table)[N], const char* what) {
    for (const auto& [name, value] : table) {
        if (s == name) return value;
    }
    throw Error(ErrorKind::InvalidArgument, std::string("unknown ") + what + " '" + s + "'");
}

template <typename E, std::size_t N>
std::string enum_name(E v, const std::pair<const char*, E> (&table)[N]) {
    for (const auto& [name, value] : table) {
        if (v == value) return name;
    }
    return "unknown";
}

constexpr std::pair<const char*, GateType> kGates[] = {{"basic", GateType::Basic}, {"echo", GateType::Echo}};
constexpr std::pair<const char*, SweepAxis> kAxes[] = {
    {"eps_m", SweepAxis::EpsM},         {"delta_ct", SweepAxis::DeltaCt}, {"g", SweepAxis::G},
    {"tau_r_frac", SweepAxis::TauRFrac}, {"c_ct", SweepAxis::CCt},         {"drive_frame", SweepAxis::DriveFrame}};
constexpr std::pair<const char*, SweepMode> kModes[] = {{"duration_curve", SweepMode::DurationCurve},
                                                        {"infidelity_curve", SweepMode::InfidelityCurve},
                                                        {"parametric", SweepMode::Parametric},
                                                        {"speed_curve", SweepMode::SpeedCurve},
                                                        {"budget", SweepMode::Budget}};

std::string axis_column(SweepAxis a) {
    switch (a) {
        case SweepAxis::EpsM: return "eps_m_mhz";
        case SweepAxis::DeltaCt: return "delta_ct_mhz";
        case SweepAxis::G: return "g_mhz";
        case SweepAxis::TauRFrac: return "tau_r_frac";
        case SweepAxis::CCt: return "c_ct";
        case SweepAxis::DriveFrame: return "drive_frame";
    }
    return "value";
}

struct Item {
    std::size_t axis_index = 0;
    double eps_m = 0.0;
};

std::vector<Item> expand(const SweepSpec& spec) {
    std::vector<Item> items;
    const std::size_t n = spec.axis == SweepAxis::DriveFrame ? spec.frames.size() : spec.grid.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (spec.axis == SweepAxis::EpsM) {
            items.push_back({i, spec.grid[i]});
        } else if (spec.eps_grid.empty()) {
            items.push_back({i, spec.fixed.eps_m});
        } else {
            for (double e : spec.eps_grid) items.push_back({i, e});
        }
    }
    return items;
}

bool with_budget(SweepMode m) {
    return m == SweepMode::InfidelityCurve || m == SweepMode::Parametric || m == SweepMode::Budget;
}

GateReport calibrate(const System& sys, double eps_m, GateType type, const PulseShape& shape) {
    CalibrationOptions opt;
    opt.shape = shape;
    opt.shape.echo = false;
    if (type == GateType::Echo) return calibrate_echo(sys, eps_m, opt).gate;
    return find_cnot_duration(sys, eps_m, opt);
}

SweepPoint run_point(const SweepSpec& spec, const Item& item) {
    SweepPoint pt;
    pt.eps_m = item.eps_m;
    DeviceParams p = spec.fixed.device;
    PulseShape shape{spec.fixed.tau_r_frac, false, spec.fixed.steps_per_ramp};
    if (spec.axis == SweepAxis::DriveFrame) {
        pt.axis_value = spec.frames[item.axis_index];
    } else {
        pt.value = spec.grid[item.axis_index];
        pt.axis_value = format_number(pt.value);
    }
    try {
        switch (spec.axis) {
            case SweepAxis::EpsM: break;
            case SweepAxis::DeltaCt: p.delta_ct = pt.value; break;
            case SweepAxis::G: p.g = pt.value; break;
            case SweepAxis::TauRFrac: shape.ramp_fraction = pt.value; break;
            case SweepAxis::CCt: p.c_ct = pt.value; break;
            case SweepAxis::DriveFrame: p.drive_frame = DriveFrame::parse(pt.axis_value); break;
        }
        p.validate();
        if (spec.mode == SweepMode::SpeedCurve) {
            const auto d = effective_drives(p, item.eps_m);
            pt.eps_tilde0 = d.eps_tilde[0];
            pt.eps_tilde1 = d.eps_tilde[1];
            pt.speed_over_g = (d.eps_tilde[1] - d.eps_tilde[0]) / p.g;
            pt.tau_semianalytic = predict_cnot_duration(p, shape, item.eps_m).tau_p;
            return pt;
        }
        const System sys = System::build(p);
        pt.tau_semianalytic = predict_cnot_duration(p, shape, item.eps_m).tau_p;
        GateReport g = calibrate(sys, item.eps_m, spec.gate_type, shape);
        if (with_budget(spec.mode)) {
            BudgetReport b = decompose(g.m, g.u, extract_angles(g.u));
            b.leakage = channel_leakage(g.v_comp, p.n_c, p.n_t);
            pt.budget = std::move(b);
        }
        pt.gate = std::move(g);
    } catch (const Error& e) {
        pt.status = std::string(to_string(e.kind()));
    } catch (const std::exception&) {
        pt.status = "Failed";
    }
    return pt;
}

std::string channel_name(const BareIndex& a, const BareIndex& b) {
    return "ch_" + std::to_string(a.n) + "_" + std::to_string(a.m) + "_to_" + std::to_string(b.n) + "_" +
           std::to_string(b.m);
}

}  // namespace

GateType parse_gate_type(const std::string& s) { return parse_enum(s, kGates, "gate type"); }
SweepAxis parse_axis(const std::string& s) { return parse_enum(s, kAxes, "sweep axis"); }
SweepMode parse_mode(const std::string& s) { return parse_enum(s, kModes, "sweep mode"); }
std::string to_string(GateType t) { return enum_name(t, kGates); }
std::string to_string(SweepAxis a) { return enum_name(a, kAxes); }
std::string to_string(SweepMode m) { return enum_name(m, kModes); }

std::vector<double> default_eps_grid() {
    std::vector<double> g(64);
    for (int k = 0; k < 64; ++k) g[k] = std::pow(10.0, 2.0 * k / 63.0);
    return g;
}

std::string format_number(double x) {
    if (!std::isfinite(x)) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

void SweepSpec::validate() const {
    if (axis == SweepAxis::DriveFrame) {
        if (frames.empty()) throw Error(ErrorKind::InvalidArgument, "drive_frame sweep needs frames");
        for (const auto& f : frames) (void)DriveFrame::parse(f);
    } else if (grid.empty()) {
        throw Error(ErrorKind::InvalidArgument, "empty sweep grid");
    }
    for (double v : grid) {
        if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "non-finite grid value");
        if (axis == SweepAxis::TauRFrac && !(v > 0.0 && v <= 0.5)) {
            throw Error(ErrorKind::InvalidArgument, "tau_r_frac grid values must lie in (0, 0.5]");
        }
    }
    if (workers < 0) throw Error(ErrorKind::InvalidArgument, "workers must be >= 0");
    fixed.device.validate();
}

std::size_t SweepSpec::size() const { return expand(*this).size(); }

SweepSpec parse_sweep_spec(const std::string& json_text) {
    SweepSpec s;
    try {
        const auto j = nlohmann::json::parse(json_text);
        s.fixed = parse_config(json_text);
        if (j.contains("axis")) s.axis = parse_axis(j.at("axis").get<std::string>());
        if (j.contains("grid")) s.grid = j.at("grid").get<std::vector<double>>();
        if (j.contains("frames")) {
            for (const auto& f : j.at("frames")) {
                s.frames.push_back(f.is_number() ? format_number(f.get<double>()) : f.get<std::string>());
            }
        }
        if (j.contains("eps_grid")) s.eps_grid = j.at("eps_grid").get<std::vector<double>>();
        if (j.contains("gate_type")) s.gate_type = parse_gate_type(j.at("gate_type").get<std::string>());
        if (j.contains("mode")) s.mode = parse_mode(j.at("mode").get<std::string>());
        s.workers = j.value("workers", s.workers);
        if (j.contains("output")) s.output = j.at("output").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidArgument, std::string("sweep spec: ") + e.what());
    }
    if (s.axis == SweepAxis::EpsM && s.grid.empty()) s.grid = default_eps_grid();
    s.validate();
    return s;
}

SweepSpec load_sweep_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open sweep spec " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_sweep_spec(ss.str());
}

std::string SweepTable::to_csv() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) out += ',';
            out += v[i];
        }
        out += '\n';
    };
    line(header);
    for (const auto& r : cells) line(r);
    return out;
}

SweepTable run_sweep(const SweepSpec& spec) {
    spec.validate();
    const auto items = expand(spec);
    SweepTable t;
    t.points.resize(items.size());

    unsigned workers = spec.workers > 0 ? static_cast<unsigned>(spec.workers)
                                        : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(items.size()));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t k; (k = next.fetch_add(1)) < items.size();) t.points[k] = run_point(spec, items[k]);
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }

    // Channel columns: the eight largest over the whole sweep, fixed before any row is written.
    std::vector<std::pair<BareIndex, BareIndex>> top;
    if (spec.mode == SweepMode::Budget) {
        std::map<std::pair<int, int>, double> peak;
        const int nt = spec.fixed.device.n_t;
        for (const auto& pt : t.points) {
            if (!pt.budget || !pt.budget->leakage) continue;
            for (const auto& c : pt.budget->leakage->channels) {
                auto& v = peak[{c.from.flat(nt), c.to.flat(nt)}];
                v = std::max(v, c.probability);
            }
        }
        std::vector<std::pair<double, std::pair<int, int>>> ranked;
        for (const auto& [k, v] : peak) ranked.push_back({v, k});
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        for (std::size_t i = 0; i < ranked.size() && i < 8; ++i) {
            top.push_back({BareIndex::from_flat(ranked[i].second.first, nt),
                           BareIndex::from_flat(ranked[i].second.second, nt)});
        }
    }

    auto& h = t.header;
    if (spec.axis != SweepAxis::EpsM) h.push_back(axis_column(spec.axis));
    h.insert(h.end(), {"eps_m_mhz", "gate_type", "status"});
    if (spec.mode == SweepMode::SpeedCurve) {
        h.insert(h.end(), {"eps_tilde0_mhz", "eps_tilde1_mhz", "speed_over_g", "tau_semianalytic_ns"});
    } else {
        h.insert(h.end(), {"tau_cnot_ns", "phi0", "phi1", "x_comp", "z_comp", "infidelity", "theta_diff_lab",
                           "tau_semianalytic_ns", "evaluations"});
    }
    if (with_budget(spec.mode)) {
        h.insert(h.end(), {"infid_total", "infid_leak", "infid_unitary", "df_u_c0", "df_u_c1", "p_leak_out",
                           "p_leak_comp"});
    }
    for (const auto& [a, b] : top) h.push_back(channel_name(a, b));

    const std::string gate = to_string(spec.gate_type);
    for (const auto& pt : t.points) {
        std::vector<std::string> r;
        const bool ok = pt.status == "ok";
        auto num = [&](double x) { r.push_back(ok ? format_number(x) : ""); };
        if (spec.axis != SweepAxis::EpsM) r.push_back(pt.axis_value);
        r.push_back(format_number(pt.eps_m));
        r.push_back(gate);
        r.push_back(pt.status);
        if (spec.mode == SweepMode::SpeedCurve) {
            num(pt.eps_tilde0);
            num(pt.eps_tilde1);
            num(pt.speed_over_g);
            num(pt.tau_semianalytic);
        } else {
            const GateReport g = pt.gate.value_or(GateReport{});
            num(g.tau_cnot);
            num(g.angles.phi0);
            num(g.angles.phi1);
            num(g.x_comp);
            num(g.z_comp);
            num(g.infidelity());
            num(g.angles.theta_diff_lab);
            num(pt.tau_semianalytic);
            r.push_back(ok ? std::to_string(g.evaluations) : "");
        }
        if (with_budget(spec.mode)) {
            const BudgetReport b = pt.budget.value_or(BudgetReport{});
            const LeakageReport lk = b.leakage.value_or(LeakageReport{});
            num(b.infid_total());
            num(b.infid_leak());
            num(b.infid_unitary());
            num(b.df_u_c0);
            num(b.df_u_c1);
            num(lk.p_out);
            num(lk.p_comp);
            for (const auto& pair : top) num(lk.sum_of({pair}));
        }
        t.cells.push_back(std::move(r));
    }
    return t;
}

SweepTable run_sweep_to_file(const SweepSpec& spec) {
    SweepTable t = run_sweep(spec);
    std::ofstream out(spec.output, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + spec.output.string());
    out << t.to_csv();
    if (!out) throw std::runtime_error("write failed for " + spec.output.string());
    return t;
}

DurationAt duration_for_infidelity(const DeviceParams& p, const DurationQuery& q) {
    if (!(q.target > 0.0 && q.target <= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "target infidelity must lie in (0, 1]");
    }
    if (!(q.eps_step > 0.0) || !(q.eps_min > 0.0) || q.refine_steps < 0) {
        throw Error(ErrorKind::InvalidArgument, "bad duration scan settings");
    }
    const System sys = System::build(p);
    const PulseShape shape{q.ramp_fraction, false, q.steps_per_ramp};
    DurationAt r;
    r.eps_start = std::abs(maximize_speed(p).eps_opt_over_eta) * p.eta_c;

    auto sample = [&](double eps) {
        DurationSample s;
        s.eps_m = eps;
        try {
            const GateReport g = calibrate(sys, eps, q.gate, shape);
            s.tau = g.tau_cnot;
            s.infidelity = g.infidelity();
        } catch (const Error& e) {
            s.status = std::string(to_string(e.kind()));
        }
        r.scanned.push_back(s);
        return s;
    };
    auto passes = [&](const DurationSample& s) { return s.status == "ok" && s.infidelity <= q.target; };

    std::optional<DurationSample> best;
    auto consider = [&](const DurationSample& s) {
        if (passes(s) && (!best || s.tau < best->tau)) best = s;
    };
    std::optional<double> prev_eps;  // last amplitude that did not pass
    for (int k = 0;; ++k) {
        const double eps = r.eps_start - k * q.eps_step;
        if (eps < q.eps_min - 1e-9) break;
        // Durations only grow below the speed maximum; stop once even the
        // semi-analytic lower estimate cannot beat the best duration found.
        if (best && 0.97 * predict_cnot_duration(p, shape, eps).tau_p >= best->tau) break;
        const DurationSample s = sample(eps);
        if (!passes(s)) {
            prev_eps = eps;
            continue;
        }
        if (!best && prev_eps) {
            double hi = *prev_eps, lo = eps;
            for (int i = 0; i < q.refine_steps; ++i) {
                const double mid = 0.5 * (lo + hi);
                const DurationSample m = sample(mid);
                consider(m);
                (passes(m) ? lo : hi) = mid;
            }
        }
        consider(s);
    }
    if (!best) {
        throw Error(ErrorKind::Unreachable, "no amplitude reaches infidelity " + format_number(q.target));
    }
    r.tau = best->tau;
    r.eps_m = best->eps_m;
    r.infidelity = best->infidelity;
    return r;
}

}  // namespace crgate
