#include "semiheat/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "semiheat/forms.hpp"
#include "semiheat/galerkin.hpp"

namespace semiheat::analysis {

double ErrorReport::worst_max_node() const {
    double m = 0.0;
    for (double e : max_node) m = std::max(m, e);
    return m;
}

ErrorReport manufactured_error(const Trajectory& traj, const expr::Expr& exact) {
    ErrorReport r;
    r.times = traj.times;
    for (std::size_t n = 0; n < traj.size(); ++n) {
        const GridFunction& u = traj.states[n];
        const double t = traj.times[n];
        const GridFunction ref = GridFunction::sample(u.n_cells(), [&](double x) { return exact.eval({x, t, 0.0}); });
        const GridFunction e = u - ref;
        r.max_node.push_back(e.max_abs());
        r.l2.push_back(forms::l2_norm(e));
        r.h1.push_back(forms::h1_norm(e));
    }
    return r;
}

double observed_order(double e_coarse, double e_fine) {
    if (!(e_coarse > 0.0) || !(e_fine > 0.0)) throw AnalysisError("observed_order: errors must be positive");
    return std::log2(e_coarse / e_fine);
}

RefinementReport refinement_orders(const Trajectory& coarse, const Trajectory& fine, const expr::Expr& exact) {
    if (std::fabs(coarse.final_time() - fine.final_time()) > 1e-12 * std::max(1.0, coarse.final_time())) {
        throw AnalysisError("refinement_orders: trajectories end at different times");
    }
    if (fine.n_cells() <= coarse.n_cells()) throw AnalysisError("refinement_orders: second trajectory is not finer");
    RefinementReport r;
    r.coarse = manufactured_error(coarse, exact);
    r.fine = manufactured_error(fine, exact);
    r.order_max_node = observed_order(r.coarse.max_node.back(), r.fine.max_node.back());
    r.order_l2 = observed_order(r.coarse.l2.back(), r.fine.l2.back());
    return r;
}

namespace {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

LineFit least_squares(const std::vector<double>& t, const std::vector<double>& y) {
    const double n = static_cast<double>(t.size());
    double mt = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        mt += t[i];
        my += y[i];
    }
    mt /= n;
    my /= n;
    double stt = 0.0;
    double sty = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        stt += (t[i] - mt) * (t[i] - mt);
        sty += (t[i] - mt) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit f;
    f.slope = sty / stt;
    f.intercept = my - f.slope * mt;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double d = y[i] - (f.intercept + f.slope * t[i]);
        ss_res += d * d;
    }
    f.r_squared = (syy > 0.0) ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    return f;
}

}  // namespace

DecayFit fit_decay(const Trajectory& traj, const GridFunction& u_inf, std::optional<DecayWindow> window) {
    if (traj.size() == 0) throw AnalysisError("fit_decay: empty trajectory");
    if (u_inf.size() != traj.states.front().size()) throw AnalysisError("fit_decay: u_inf lives on a different grid");
    DecayWindow w = window.value_or(DecayWindow{0.5 * traj.final_time(), traj.final_time()});
    const double slack = 1e-12 * std::max(1.0, traj.final_time());
    if (!(w.t_a < w.t_b)) throw AnalysisError("fit_decay: window must satisfy t_a < t_b");
    if (w.t_a < traj.times.front() - slack || w.t_b > traj.final_time() + slack) {
        throw AnalysisError("fit_decay: window lies outside the trajectory");
    }
    std::vector<double> ts;
    std::vector<double> ys;
    for (std::size_t n = 0; n < traj.size(); ++n) {
        const double t = traj.times[n];
        if (t < w.t_a - slack || t > w.t_b + slack) continue;
        const double d = forms::l2_norm(traj.states[n] - u_inf);
        if (!(d > 0.0)) {
            std::ostringstream msg;
            msg << "fit_decay: ||u(t) - u_inf|| = 0 at t = " << t << " (already converged)";
            throw AnalysisError(msg.str());
        }
        ts.push_back(t);
        ys.push_back(std::log(d));
    }
    if (ts.size() < 3) throw AnalysisError("fit_decay: window holds fewer than 3 snapshots");
    const LineFit line = least_squares(ts, ys);
    DecayFit fit;
    fit.gamma_hat = -line.slope;
    fit.C_hat = std::exp(line.intercept);
    fit.t_a = ts.front();
    fit.t_b = ts.back();
    fit.r_squared = line.r_squared;
    fit.n_points = ts.size();
    if (ts.size() >= 6) {
        const std::size_t half = ts.size() / 2;
        const LineFit early = least_squares({ts.begin(), ts.begin() + half}, {ys.begin(), ys.begin() + half});
        const LineFit late = least_squares({ts.begin() + half, ts.end()}, {ys.begin() + half, ys.end()});
        fit.plateau = (-early.slope > 0.0) && (-late.slope < 0.5 * -early.slope);
    }
    return fit;
}

DecayVerdict decay_verdict(const DecayFit& fit, double a0, double delta, double gamma1, std::optional<double> epsilon,
                           std::optional<double> gamma) {
    DecayVerdict v;
    v.epsilon = epsilon.value_or((a0 - delta) / 8.0);
    v.gamma_bound = std::min(gamma1, a0 - delta - 4.0 * v.epsilon);
    v.gamma = gamma.value_or(0.5 * v.gamma_bound);
    v.consistent = v.gamma > 0.0 && v.gamma < v.gamma_bound && fit.gamma_hat >= v.gamma;
    return v;
}

BoundAudit max_bound_audit(const Trajectory& traj, const ProblemSpec& spec) {
    BoundAudit a;
    a.hypotheses = validate_hypotheses(spec, std::nullopt, HypothesisFamily::boundedness);
    a.hypotheses_satisfied = a.hypotheses.all_satisfied();
    for (std::size_t n = 0; n < traj.size(); ++n) {
        const GridFunction& u = traj.states[n];
        for (std::size_t k = 0; k < u.size(); ++k) {
            if (std::fabs(u[k]) > a.max_observed) {
                a.max_observed = std::fabs(u[k]);
                a.witness_time = traj.times[n];
                a.witness_x = u.x(k);
            }
        }
    }
    if (!a.hypotheses_satisfied) {
        std::string ids;
        for (const auto& id : a.hypotheses.violated_ids()) ids += (ids.empty() ? "(" : ", (") + id + ")";
        if (ids.empty()) ids = "not checkable";
        a.verdict = "hypotheses not satisfied: " + ids;
        a.pass = false;
        return a;
    }
    double u0_sup = 0.0;
    for (double x : linspace(0.0, 1.0, lattice_points)) u0_sup = std::max(u0_sup, std::fabs(spec.u0_at(x)));
    if (!traj.states.empty()) u0_sup = std::max(u0_sup, traj.states.front().max_abs());
    double g0_sup = 0.0;
    double g1_sup = 0.0;
    std::vector<double> ts = linspace(0.0, spec.T, lattice_points);
    ts.insert(ts.end(), traj.times.begin(), traj.times.end());
    for (double t : ts) {
        g0_sup = std::max(g0_sup, std::fabs(spec.g0_at(t)));
        g1_sup = std::max(g1_sup, std::fabs(spec.g1_at(t)));
    }
    const double M = std::max({u0_sup, g0_sup / spec.boundary.h0, g1_sup / spec.boundary.h1});
    a.M_star = M;
    a.pass = a.max_observed <= M + 1e-9;
    std::ostringstream msg;
    msg << (a.pass ? "bounded by M* = " : "bound exceeded: M* = ") << expr::format_double(M) << ", max |u| = "
        << expr::format_double(a.max_observed);
    a.verdict = msg.str();
    return a;
}

Trajectory run_solver(const ProblemSpec& spec, Solver solver, const Resolution& res) {
    if (solver == Solver::fdm) {
        fdm::StepperConfig cfg;
        cfg.dt = res.dt;
        cfg.stepper = res.stepper;
        return fdm::solve(spec, res.n_cells, cfg);
    }
    galerkin::StepConfig cfg;
    cfg.dt = res.dt;
    return galerkin::solve(spec, res.n_cells, cfg);
}

ContractionAudit contraction_audit(const ProblemSpec& spec, const expr::Expr& perturbation, Solver solver,
                                   const Resolution& res) {
    ProblemSpec perturbed = spec;
    perturbed.u0 = expr::parse("(" + spec.u0.source() + ") + (" + perturbation.source() + ")", roles::u0);

    const Trajectory a = run_solver(spec, solver, res);
    const Trajectory b = run_solver(perturbed, solver, res);
    ContractionAudit c;
    c.delta = spec.f.growth().delta;
    c.times = a.times;
    for (std::size_t n = 0; n < a.size(); ++n) c.diff_norms.push_back(forms::l2_norm(a.states[n] - b.states[n]));
    c.initial_norm = c.diff_norms.front();
    for (std::size_t n = 0; n < a.size(); ++n) {
        const double bound = c.initial_norm * std::exp(c.delta * c.times[n]) * (1.0 + 1e-6);
        if (c.bound_holds && !(c.diff_norms[n] <= bound)) {
            c.bound_holds = false;
            c.witness_time = c.times[n];
        }
        if (c.initial_norm > 0.0) {
            const double ratio = c.diff_norms[n] / c.initial_norm;
            c.ratios.push_back(ratio);
            c.max_ratio = std::max(c.max_ratio, ratio);
            if (ratio > 1.0) c.dissipative = false;
        }
    }
    return c;
}

}  // namespace semiheat::analysis
