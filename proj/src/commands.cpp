#include "semiheat/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>

#include "semiheat/analysis.hpp"
#include "semiheat/forms.hpp"
#include "semiheat/galerkin.hpp"
#include "semiheat/stationary.hpp"

namespace semiheat::cli {

using config::ConfigError;
using config::Method;
using config::RunConfig;
using config::method_name;
using config::stepper_name;
using nlohmann::json;

std::string_view check_name(Check c) {
    switch (c) {
        case Check::error: return "error";
        case Check::decay: return "decay";
        case Check::bound: return "bound";
        case Check::contraction: return "contraction";
        case Check::energy: return "energy";
        case Check::hypotheses: return "hypotheses";
    }
    return "?";
}

const std::vector<Check>& all_checks() {
    static const std::vector<Check> all = {Check::error,       Check::decay,  Check::bound,
                                           Check::contraction, Check::energy, Check::hypotheses};
    return all;
}

std::vector<Check> parse_checks(std::string_view list) {
    std::vector<Check> out;
    std::size_t start = 0;
    while (start <= list.size()) {
        const std::size_t comma = std::min(list.find(',', start), list.size());
        std::string_view name = list.substr(start, comma - start);
        while (!name.empty() && name.front() == ' ') name.remove_prefix(1);
        while (!name.empty() && name.back() == ' ') name.remove_suffix(1);
        if (!name.empty()) {
            const auto& all = all_checks();
            const auto it = std::find_if(all.begin(), all.end(), [&](Check c) { return check_name(c) == name; });
            if (it == all.end()) throw ConfigError("--checks", "unknown check \"" + std::string(name) + "\"", start);
            if (std::find(out.begin(), out.end(), *it) == out.end()) out.push_back(*it);
        }
        start = comma + 1;
    }
    if (out.empty()) throw ConfigError("--checks", "no checks requested");
    return out;
}

void apply_overrides(RunConfig& cfg, const Overrides& o) {
    if (o.method) cfg.method = *o.method;
    if (o.nx) cfg.nx = *o.nx;
    if (o.dt) cfg.dt = *o.dt;
    if (o.tmax) {
        if (!(*o.tmax > 0.0)) throw ConfigError("--tmax", "tmax must be positive");
        cfg.spec.T = *o.tmax;
    }
    if (o.stepper) cfg.stepper = *o.stepper;
    if (o.out) cfg.output.csv = *o.out;
    if (o.report) cfg.output.report = *o.report;
    cfg.validate();
}

std::string surface_csv(const Trajectory& traj) {
    std::string s = "x,t,u\n";
    s.reserve(traj.size() * (traj.n_cells() + 1) * 48);
    for (std::size_t n = 0; n < traj.size(); ++n) {
        const std::string t = expr::format_double(traj.times[n]);
        const GridFunction& u = traj.states[n];
        for (std::size_t k = 0; k < u.size(); ++k) {
            s += expr::format_double(u.x(k));
            s += ',';
            s += t;
            s += ',';
            s += expr::format_double(u[k]);
            s += '\n';
        }
    }
    return s;
}

std::string steady_csv(const GridFunction& u) {
    std::string s = "x,u_inf\n";
    for (std::size_t k = 0; k < u.size(); ++k) {
        s += expr::format_double(u.x(k));
        s += ',';
        s += expr::format_double(u[k]);
        s += '\n';
    }
    return s;
}

namespace {

analysis::Solver solver_of(Method m) { return m == Method::fdm ? analysis::Solver::fdm : analysis::Solver::galerkin; }

analysis::Resolution resolution_of(const RunConfig& cfg) { return {cfg.nx, cfg.dt, cfg.stepper}; }

Trajectory run_with(const RunConfig& cfg, std::size_t nx, double dt) {
    if (cfg.method == Method::fdm) {
        fdm::StepperConfig sc;
        sc.dt = dt;
        sc.stepper = cfg.stepper;
        sc.inner_tol = cfg.inner_tol;
        sc.inner_max = cfg.inner_max;
        return fdm::solve(cfg.spec, nx, sc);
    }
    galerkin::StepConfig gc;
    gc.dt = dt;
    gc.inner_tol = cfg.inner_tol;
    gc.inner_max = cfg.inner_max;
    return galerkin::solve(cfg.spec, nx, gc);
}

json resolution_json(const RunConfig& cfg) {
    json j;
    j["method"] = method_name(cfg.method);
    j["nx"] = cfg.nx;
    j["dt"] = cfg.dt;
    j["tmax"] = cfg.spec.T;
    if (cfg.method == Method::fdm) j["stepper"] = stepper_name(cfg.stepper);
    return j;
}

const AsymptoticLimits& require_limits(const RunConfig& cfg, std::string_view what) {
    if (!cfg.limits) throw ConfigError(".asymptotic", "block required by " + std::string(what));
    return *cfg.limits;
}

struct SteadyState {
    GridFunction values;
    double residual = 0.0;
    int iterations = 0;
    std::optional<bool> unique;
    bool picard = false;
};

SteadyState compute_steady(const RunConfig& cfg) {
    const AsymptoticLimits& lim = require_limits(cfg, "the steady state");
    SteadyState s;
    if (cfg.method == Method::fdm) {
        const auto r = fdm::steady_fd(lim, cfg.spec.f, cfg.spec.boundary.h0, cfg.spec.boundary.h1, cfg.nx, cfg.steady_tol);
        s.values = r.values;
        s.residual = r.residual_sup;
        s.iterations = r.newton_iters;
        return s;
    }
    stationary::StationaryProblem prob{lim, cfg.spec.f, cfg.spec.boundary.h0, cfg.spec.boundary.h1, 0.0};
    stationary::NewtonConfig nc;
    nc.tol = cfg.steady_tol;
    const auto r = stationary::solve_stationary(prob, galerkin::FemBasis(cfg.nx), nc);
    s.values = r.values;
    s.residual = r.residual_sup;
    s.iterations = r.newton_iters;
    s.unique = r.uniqueness_guaranteed;
    s.picard = r.picard_used;
    return s;
}

json hypotheses_json(const HypothesisReport& rep) {
    json arr = json::array();
    for (const auto& r : rep.results) {
        json j{{"id", r.id}, {"statement", r.statement}, {"verdict", verdict_name(r.verdict)}, {"detail", r.detail}};
        if (r.witness) j["witness"] = {{"x", r.witness->x}, {"t", r.witness->t}, {"u", r.witness->u}};
        arr.push_back(std::move(j));
    }
    return arr;
}

json status(bool pass) { return pass ? "pass" : "fail"; }

json check_error(const RunConfig& cfg) {
    if (!cfg.exact) throw ConfigError(".exact", "expression required by the error check");
    const Trajectory coarse = run_with(cfg, cfg.nx, cfg.dt);
    const Trajectory fine = run_with(cfg, 2 * cfg.nx, cfg.dt / 4.0);
    const auto rep = analysis::refinement_orders(coarse, fine, *cfg.exact);
    const double worst_coarse = rep.coarse.worst_max_node();
    const double worst_fine = rep.fine.worst_max_node();
    const bool decreasing = worst_fine < worst_coarse && rep.fine.max_node.back() < rep.coarse.max_node.back();
    const bool order_ok = rep.order_max_node >= 0.9 && rep.order_max_node <= 2.1;
    const bool tol_ok = !cfg.verify.error_tol || worst_coarse <= *cfg.verify.error_tol;
    const bool pass = decreasing && order_ok && tol_ok;
    json j{{"pass", pass},
           {"status", status(pass)},
           {"max_node_error", worst_coarse},
           {"final_max_node_error", rep.coarse.max_node.back()},
           {"final_l2_error", rep.coarse.l2.back()},
           {"final_h1_error", rep.coarse.h1.back()},
           {"refined", {{"nx", 2 * cfg.nx}, {"dt", cfg.dt / 4.0}, {"max_node_error", worst_fine}}},
           {"order_max_node", rep.order_max_node},
           {"order_l2", rep.order_l2},
           {"order_range", {0.9, 2.1}}};
    if (cfg.verify.error_tol) j["error_tol"] = *cfg.verify.error_tol;
    return j;
}

json check_decay(const RunConfig& cfg) {
    const AsymptoticLimits& lim = require_limits(cfg, "the decay check");
    const Trajectory traj = run_trajectory(cfg);
    const SteadyState u_inf = compute_steady(cfg);
    json j;
    try {
        const auto fit = analysis::fit_decay(traj, u_inf.values, cfg.verify.decay_window);
        const auto fc = forms::form_constants(cfg.spec);
        const auto v = analysis::decay_verdict(fit, fc.a0, cfg.spec.f.growth().delta, lim.gamma1, cfg.verify.epsilon,
                                               cfg.verify.gamma);
        j = {{"pass", v.consistent},
             {"status", status(v.consistent)},
             {"gamma_hat", fit.gamma_hat},
             {"C_hat", fit.C_hat},
             {"window", {fit.t_a, fit.t_b}},
             {"points", fit.n_points},
             {"r_squared", fit.r_squared},
             {"plateau", fit.plateau},
             {"gamma", v.gamma},
             {"gamma_bound", v.gamma_bound},
             {"epsilon", v.epsilon},
             {"a0", fc.a0},
             {"steady_residual", u_inf.residual},
             {"verdict", v.consistent ? "consistent with the exponential decay estimate"
                                      : "fitted rate below the admissible rate"}};
    } catch (const analysis::AnalysisError& e) {
        j = {{"pass", false}, {"status", "fail"}, {"reason", e.what()}};
    }
    return j;
}

json check_bound(const RunConfig& cfg) {
    const Trajectory traj = run_trajectory(cfg);
    const auto a = analysis::max_bound_audit(traj, cfg.spec);
    json j{{"max_observed", a.max_observed},
           {"witness", {{"x", a.witness_x}, {"t", a.witness_time}}},
           {"verdict", a.verdict},
           {"hypotheses", hypotheses_json(a.hypotheses)}};
    if (!a.hypotheses_satisfied) {
        j["pass"] = true;
        j["status"] = "hypotheses_not_satisfied";
    } else {
        j["pass"] = a.pass;
        j["status"] = status(a.pass);
        j["M_star"] = *a.M_star;
    }
    return j;
}

json check_contraction(const RunConfig& cfg) {
    const auto c = analysis::contraction_audit(cfg.spec, cfg.verify.perturbation, solver_of(cfg.method),
                                               resolution_of(cfg));
    json j{{"pass", c.pass()},
           {"status", status(c.pass())},
           {"perturbation", cfg.verify.perturbation.source()},
           {"delta", c.delta},
           {"initial_norm", c.initial_norm},
           {"final_norm", c.diff_norms.back()},
           {"max_ratio", c.max_ratio},
           {"dissipative", c.dissipative}};
    if (c.witness_time) j["witness_time"] = *c.witness_time;
    return j;
}

json check_energy(const RunConfig& cfg) {
    galerkin::StepConfig gc;
    gc.dt = cfg.dt;
    gc.inner_tol = cfg.inner_tol;
    gc.inner_max = cfg.inner_max;
    const Trajectory traj = galerkin::solve(cfg.spec, cfg.nx, gc);
    const auto e = galerkin::energy_traces(traj, cfg.spec, cfg.spec.f.growth());
    json j{{"pass", e.pass()},
           {"status", status(e.pass())},
           {"method", "galerkin"},
           {"S_pass", e.S_pass},
           {"X_pass", e.X_pass},
           {"S_max", *std::max_element(e.S.begin(), e.S.end())},
           {"S_bound_final", e.S_bound.back()},
           {"X_max", *std::max_element(e.X.begin(), e.X.end())},
           {"X_bound", e.X_bound},
           {"X_slack", e.X_slack},
           {"a0", e.a0},
           {"C_T1", e.C_T1},
           {"C_T2_integral", e.C_T2_integral},
           {"C_T", e.C_T},
           {"Cbar_T1", e.Cbar_T1},
           {"Cbar_T2_integral", e.Cbar_T2_integral}};
    if (e.S_witness) j["S_witness_time"] = e.times[*e.S_witness];
    if (e.X_witness) j["X_witness_time"] = e.times[*e.X_witness];
    return j;
}

json check_hypotheses(const RunConfig& cfg) {
    const auto existence = validate_hypotheses(cfg.spec, cfg.limits, HypothesisFamily::existence);
    const auto bounded = validate_hypotheses(cfg.spec, cfg.limits, HypothesisFamily::boundedness);
    json j{{"pass", !existence.any_violated()},
           {"status", status(!existence.any_violated())},
           {"existence", hypotheses_json(existence)},
           {"boundedness", hypotheses_json(bounded)}};
    if (cfg.limits) j["asymptotic"] = hypotheses_json(validate_hypotheses(cfg.spec, cfg.limits, HypothesisFamily::asymptotic));
    return j;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw std::runtime_error("write to " + path + " failed");
}

std::string default_report_path(const std::string& csv_path) {
    std::filesystem::path p(csv_path);
    p.replace_extension(".report.json");
    return p.string();
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        err << e.what() << '\n';
        return exit_config;
    } catch (const SolverError& e) {
        err << "solver failure: " << e.what() << '\n';
        return exit_solver;
    } catch (const expr::EvalError& e) {
        err << "solver failure: expression evaluation: " << e.what() << '\n';
        return exit_solver;
    } catch (const QuadratureError& e) {
        err << "solver failure: " << e.what() << '\n';
        return exit_solver;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << '\n';
        return exit_solver;
    }
}

/// CSV to its path (or `out`), report to its path, next to the CSV, or `err`.
void emit(const RunConfig& cfg, const CommandResult& r, std::ostream& out, std::ostream& err) {
    const std::string report = r.report.dump(2) + "\n";
    if (cfg.output.csv.empty()) {
        out << r.csv;
    } else {
        write_file(cfg.output.csv, r.csv);
    }
    if (!cfg.output.report.empty()) {
        write_file(cfg.output.report, report);
    } else if (!cfg.output.csv.empty()) {
        write_file(default_report_path(cfg.output.csv), report);
    } else {
        err << report;
    }
}

}  // namespace

Trajectory run_trajectory(const RunConfig& cfg) { return run_with(cfg, cfg.nx, cfg.dt); }

CommandResult solve(const RunConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    const Trajectory traj = run_trajectory(cfg);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CommandResult r;
    r.csv = surface_csv(traj);
    const auto& it = traj.inner_iterations;
    const int total = std::accumulate(it.begin(), it.end(), 0);
    r.report = {{"command", "solve"},
                {"resolution", resolution_json(cfg)},
                {"snapshots", traj.size()},
                {"nodes", traj.n_cells() + 1},
                {"rows", traj.size() * (traj.n_cells() + 1)},
                {"inner_iterations",
                 {{"min", it.empty() ? 0 : *std::min_element(it.begin(), it.end())},
                  {"max", it.empty() ? 0 : *std::max_element(it.begin(), it.end())},
                  {"mean", it.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(it.size())},
                  {"total", total}}},
                {"wall_time_s", wall}};
    return r;
}

CommandResult steady(const RunConfig& cfg) {
    const SteadyState s = compute_steady(cfg);
    CommandResult r;
    r.csv = steady_csv(s.values);
    r.report = {{"command", "steady"},
                {"method", method_name(cfg.method)},
                {"nx", cfg.nx},
                {"residual", s.residual},
                {"tol", cfg.steady_tol},
                {"newton_iterations", s.iterations}};
    if (s.unique) r.report["uniqueness_guaranteed"] = *s.unique;
    if (cfg.method == Method::galerkin) r.report["picard_fallback_used"] = s.picard;
    return r;
}

CommandResult verify(const RunConfig& cfg, const std::vector<Check>& checks) {
    CommandResult r;
    json blocks = json::object();
    bool all = true;
    for (Check c : checks) {
        json j;
        switch (c) {
            case Check::error: j = check_error(cfg); break;
            case Check::decay: j = check_decay(cfg); break;
            case Check::bound: j = check_bound(cfg); break;
            case Check::contraction: j = check_contraction(cfg); break;
            case Check::energy: j = check_energy(cfg); break;
            case Check::hypotheses: j = check_hypotheses(cfg); break;
        }
        all = all && j.at("pass").get<bool>();
        blocks[std::string(check_name(c))] = std::move(j);
    }
    r.report = {{"command", "verify"}, {"resolution", resolution_json(cfg)}, {"pass", all}, {"checks", blocks}};
    r.exit_code = all ? exit_ok : exit_check;
    return r;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const CommandResult r = solve(cfg);
        emit(cfg, r, out, err);
        return r.exit_code;
    });
}

int cmd_steady(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const CommandResult r = steady(cfg);
        emit(cfg, r, out, err);
        return r.exit_code;
    });
}

int cmd_verify(const RunConfig& cfg, const std::vector<Check>& checks, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const CommandResult r = verify(cfg, checks);
        const std::string report = r.report.dump(2) + "\n";
        if (cfg.output.report.empty()) {
            out << report;
        } else {
            write_file(cfg.output.report, report);
        }
        if (r.exit_code == exit_check) {
            for (const auto& [name, block] : r.report.at("checks").items()) {
                if (!block.at("pass").get<bool>()) err << "check failed: " << name << '\n';
            }
        }
        return r.exit_code;
    });
}

}  // namespace semiheat::cli
