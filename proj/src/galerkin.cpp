#include "semiheat/galerkin.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "semiheat/forms.hpp"

namespace semiheat::galerkin {

FemBasis::FemBasis(std::size_t m) : M(m) {
    if (m < 2) throw std::invalid_argument("FemBasis needs M >= 2");
}

double FemBasis::hat(std::size_t j, double x) const {
    const double r = 1.0 - std::fabs(x - node(j)) / h();
    return std::max(r, 0.0);
}

TriDiag assemble_mass(const FemBasis& basis) {
    const std::size_t n = basis.size();
    const double h = basis.h();
    TriDiag mass(n);
    for (std::size_t j = 0; j < n; ++j) mass.diag[j] = 4.0 * h / 6.0;
    mass.diag.front() = 2.0 * h / 6.0;
    mass.diag.back() = 2.0 * h / 6.0;
    std::fill(mass.sub.begin(), mass.sub.end(), h / 6.0);
    std::fill(mass.super.begin(), mass.super.end(), h / 6.0);
    return mass;
}

TriDiag assemble_stiffness(double t, const ProblemSpec& spec, const FemBasis& basis) {
    const std::size_t n = basis.size();
    const double h = basis.h();
    TriDiag K(n);
    for (std::size_t e = 0; e < basis.M; ++e) {
        const double xe = basis.node(e);
        const double mu_int = 0.5 * h * (spec.mu_at(xe + gauss_lo * h, t) + spec.mu_at(xe + gauss_hi * h, t));
        const double k = mu_int / (h * h);
        K.diag[e] += k;
        K.diag[e + 1] += k;
        K.super[e] -= k;
        K.sub[e] -= k;
    }
    K.diag.front() += spec.boundary.h0 * spec.mu_at(0.0, t);
    K.diag.back() += spec.boundary.h1 * spec.mu_at(1.0, t);
    K.validate();
    return K;
}

std::vector<double> assemble_load(double t, const ProblemSpec& spec, const FemBasis& basis, const GridFunction& u_lag) {
    if (u_lag.size() != basis.size()) throw std::invalid_argument("assemble_load: u_lag has the wrong number of nodes");
    const double h = basis.h();
    const bool lagged = !spec.f.is_linear_free();
    const double f_const = lagged ? 0.0 : spec.f_at(0.0);
    std::vector<double> load(basis.size(), 0.0);
    for (std::size_t e = 0; e < basis.M; ++e) {
        const double xe = basis.node(e);
        for (double xi : {gauss_lo, gauss_hi}) {
            const double uq = (1.0 - xi) * u_lag[e] + xi * u_lag[e + 1];
            const double fq = lagged ? spec.f_at(uq) : f_const;
            const double val = 0.5 * h * (spec.f1_at(xe + xi * h, t) - fq);
            load[e] += val * (1.0 - xi);
            load[e + 1] += val * xi;
        }
    }
    load.front() -= spec.mu_at(0.0, t) * spec.g0_at(t);
    load.back() -= spec.mu_at(1.0, t) * spec.g1_at(t);
    return load;
}

void StepConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
    if (!(inner_tol > 0.0)) throw std::invalid_argument("inner_tol must be positive");
    if (inner_max < 1) throw std::invalid_argument("inner_max must be at least 1");
}

Stepping::Stepping(const ProblemSpec& spec, const FemBasis& basis, StepConfig cfg)
    : spec_(spec), basis_(basis), cfg_(cfg), mass_(assemble_mass(basis)) {
    cfg_.validate();
}

StepResult Stepping::step(const GridFunction& state, double t, double dt) {
    if (state.size() != basis_.size()) throw std::invalid_argument("step_imex: state has the wrong number of nodes");
    const double t_new = t + dt;
    TriDiag K;
    if (spec_.mu.time_dependent()) {
        K = assemble_stiffness(t_new, spec_, basis_);
        ++assemblies_;
    } else {
        if (!cached_K_) {
            cached_K_ = assemble_stiffness(t_new, spec_, basis_);
            ++assemblies_;
        }
        K = *cached_K_;
    }
    TriDiag lhs = K.shifted(0.0, dt);
    for (std::size_t i = 0; i < lhs.size(); ++i) lhs.diag[i] += mass_.diag[i];
    for (std::size_t i = 0; i + 1 < lhs.size(); ++i) {
        lhs.sub[i] += mass_.sub[i];
        lhs.super[i] += mass_.super[i];
    }
    const std::vector<double> mc = mass_.apply(state.values());

    const bool lagged = !spec_.f.is_linear_free();
    StepResult result;
    GridFunction lag = state;
    for (int n = 1;; ++n) {
        const std::vector<double> load = assemble_load(t_new, spec_, basis_, lag);
        std::vector<double> rhs(mc.size());
        for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = mc[i] + dt * load[i];
        GridFunction next(thomas_solve(lhs, rhs));
        double res = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i) res = std::max(res, std::fabs(next[i] - lag[i]));
        result.residuals.push_back(res);
        result.inner_count = n;
        lag = std::move(next);
        if (!lagged || res <= cfg_.inner_tol) break;
        if (n >= cfg_.inner_max) {
            std::ostringstream msg;
            msg << "inner lag iteration did not converge in " << cfg_.inner_max << " iterations at t = " << t
                << " (last residual " << res << ")";
            throw NonConvergenceError(msg.str(), res, n);
        }
    }
    result.state = std::move(lag);
    return result;
}

StepResult step_imex(const GridFunction& state, double t, const ProblemSpec& spec, const FemBasis& basis,
                     const StepConfig& cfg) {
    Stepping stepping(spec, basis, cfg);
    return stepping.step(state, t, cfg.dt);
}

Trajectory solve(const ProblemSpec& spec, std::size_t M, const StepConfig& cfg) {
    const FemBasis basis(M);
    Trajectory traj;
    traj.times = time_grid(spec.T, cfg.dt);
    traj.states.reserve(traj.times.size());
    traj.states.push_back(GridFunction::sample(M, [&](double x) { return spec.u0_at(x); }));
    Stepping stepping(spec, basis, cfg);
    for (std::size_t n = 0; n + 1 < traj.times.size(); ++n) {
        const double t = traj.times[n];
        StepResult r = stepping.step(traj.states.back(), t, traj.times[n + 1] - t);
        traj.inner_iterations.push_back(r.inner_count);
        traj.states.push_back(std::move(r.state));
    }
    return traj;
}

// ---------------------------------------------------------------------------
// Energy traces

namespace {

using Gauss20 = boost::math::quadrature::gauss<double, 20>;

double f1_l2_sq(const ProblemSpec& spec, double t) {
    return Gauss20::integrate([&](double x) {
        const double v = spec.f1_at(x, t);
        return v * v;
    }, 0.0, 1.0);
}

/// Cumulative trapezoid integral of samples y over times t.
std::vector<double> cumulative_trapezoid(const std::vector<double>& t, const std::vector<double>& y) {
    std::vector<double> out(t.size(), 0.0);
    for (std::size_t n = 1; n < t.size(); ++n) out[n] = out[n - 1] + 0.5 * (t[n] - t[n - 1]) * (y[n] + y[n - 1]);
    return out;
}

struct CoefficientSups {
    double mu = 0.0;     // sup |mu|
    double mu_c1 = 0.0;  // sup |mu| + sup |mu_x| + sup |mu_t|
    double g0 = 0.0;
    double g1 = 0.0;
};

CoefficientSups coefficient_sups(const ProblemSpec& spec, const std::vector<double>& snapshot_times) {
    CoefficientSups s;
    std::vector<double> ts = linspace(0.0, spec.T, lattice_points);
    ts.insert(ts.end(), snapshot_times.begin(), snapshot_times.end());
    double mu_x = 0.0;
    double mu_t = 0.0;
    const bool dep_x = spec.mu.expr.depends_on(expr::Var::x);
    const bool dep_t = spec.mu.time_dependent();
    for (double t : ts) {
        s.g0 = std::max(s.g0, std::fabs(spec.g0_at(t)));
        s.g1 = std::max(s.g1, std::fabs(spec.g1_at(t)));
    }
    for (double t : linspace(0.0, spec.T, lattice_points)) {
        for (double x : linspace(0.0, 1.0, lattice_points)) {
            s.mu = std::max(s.mu, std::fabs(spec.mu_at(x, t)));
            if (dep_x) mu_x = std::max(mu_x, std::fabs(expr::numeric_partial(spec.mu.expr, expr::Var::x, {x, t, 0.0})));
            if (dep_t) mu_t = std::max(mu_t, std::fabs(expr::numeric_partial(spec.mu.expr, expr::Var::t, {x, t, 0.0})));
        }
    }
    s.mu_c1 = s.mu + mu_x + mu_t;
    return s;
}

}  // namespace

EnergyTrace energy_traces(const Trajectory& traj, const ProblemSpec& spec, const GrowthBounds& bounds) {
    if (traj.size() < 2) throw std::invalid_argument("energy_traces: need at least two snapshots");
    EnergyTrace e;
    const std::size_t n_snap = traj.size();
    const double T = traj.final_time();
    e.times = traj.times;
    const forms::FormConstants fc = forms::form_constants(spec);
    e.a0 = fc.a0;

    std::vector<double> l2(n_snap), h1sq(n_snap), lp(n_snap), f1n(n_snap), f1sq(n_snap);
    for (std::size_t n = 0; n < n_snap; ++n) {
        const GridFunction& u = traj.states[n];
        l2[n] = forms::l2_norm_sq(u);
        h1sq[n] = l2[n] + forms::dx_norm_sq(u);
        lp[n] = forms::lp_norm_p(u, bounds.p);
        f1sq[n] = f1_l2_sq(spec, e.times[n]);
        f1n[n] = std::sqrt(f1sq[n]);
    }
    const std::vector<double> int_h1 = cumulative_trapezoid(e.times, h1sq);
    const std::vector<double> int_lp = cumulative_trapezoid(e.times, lp);
    const std::vector<double> int_f1 = cumulative_trapezoid(e.times, f1n);
    const std::vector<double> int_f1sq = cumulative_trapezoid(e.times, f1sq);

    const CoefficientSups sups = coefficient_sups(spec, e.times);
    const double C0 = l2.front();
    e.C_T1 = C0 + 2.0 * T * bounds.C1prime + int_f1.back() +
             (4.0 / e.a0) * T * sups.mu * sups.mu * (sups.g0 * sups.g0 + sups.g1 * sups.g1);
    e.C_T2_integral = int_f1.back();

    e.S.resize(n_snap);
    e.S_norm = l2;
    e.S_h1_integral.resize(n_snap);
    e.S_lp_integral.resize(n_snap);
    e.S_bound.resize(n_snap);
    for (std::size_t n = 0; n < n_snap; ++n) {
        e.S_h1_integral[n] = e.a0 * int_h1[n];
        e.S_lp_integral[n] = 2.0 * bounds.C1 * int_lp[n];
        e.S[n] = l2[n] + e.S_h1_integral[n] + e.S_lp_integral[n];
        e.S_bound[n] = e.C_T1 * std::exp(int_f1[n]);
        if (e.S_pass && !(e.S[n] <= e.S_bound[n])) {
            e.S_pass = false;
            e.S_witness = n;
        }
    }

    // psi_i(s) = 1 + |g_i'(s)|
    e.psi0.resize(n_snap);
    e.psi1.resize(n_snap);
    for (std::size_t n = 0; n < n_snap; ++n) {
        const expr::Point p{0.0, e.times[n], 0.0};
        e.psi0[n] = 1.0 + std::fabs(expr::numeric_partial(spec.boundary.g0, expr::Var::t, p));
        e.psi1[n] = 1.0 + std::fabs(expr::numeric_partial(spec.boundary.g1, expr::Var::t, p));
    }
    const double int_psi0 = cumulative_trapezoid(e.times, e.psi0).back();
    const double int_psi1 = cumulative_trapezoid(e.times, e.psi1).back();

    const double S_max = *std::max_element(e.S_bound.begin(), e.S_bound.end());
    const double K0 = sups.mu_c1 * ((2.0 + T) * sups.g0 + T);
    const double K1 = sups.mu_c1 * ((2.0 + T) * sups.g1 + T);
    const double mu2 = sups.mu * sups.mu;
    const double pieces[] = {
        2.0 * T * T * spec.f.m0() + 4.0 * T * bounds.C2 * (T * std::sqrt(S_max) + S_max / (2.0 * bounds.p * bounds.C1)),
        2.0 * T * fc.aT * S_max / e.a0,
        T * T * fc.aT_tilde * S_max / e.a0,
        T * T * int_f1sq.back(),
        2.0 * T * T * mu2 * sups.g0 * sups.g0,
        2.0 * T * T * mu2 * sups.g1 * sups.g1,
        2.0 * K0 * K0 * int_psi0,
        2.0 * K1 * K1 * int_psi1,
    };
    e.C_T = *std::max_element(std::begin(pieces), std::end(pieces));
    const double k = 1.0 + 2.0 / e.a0;
    e.Cbar_T1 = k * (6.0 + 8.0 / e.a0) * e.C_T;
    e.Cbar_T2_integral = k * (int_psi0 + int_psi1);
    e.X_bound = e.Cbar_T1 * std::exp(e.Cbar_T2_integral);

    // u' by centred differences, one-sided at the ends.
    std::vector<double> su_sq(n_snap);
    for (std::size_t n = 0; n < n_snap; ++n) {
        const std::size_t lo = (n == 0) ? 0 : n - 1;
        const std::size_t hi = (n + 1 == n_snap) ? n : n + 1;
        const GridFunction du = (1.0 / (e.times[hi] - e.times[lo])) * (traj.states[hi] - traj.states[lo]);
        const double s = e.times[n];
        su_sq[n] = s * s * forms::l2_norm_sq(du);
    }
    const std::vector<double> int_su = cumulative_trapezoid(e.times, su_sq);
    e.X.resize(n_snap);
    for (std::size_t n = 0; n < n_snap; ++n) {
        const double t = e.times[n];
        e.X[n] = t * t * h1sq[n] + int_su[n];
        if (e.X_pass && !(e.X[n] <= e.X_slack * e.X_bound)) {
            e.X_pass = false;
            e.X_witness = n;
        }
    }
    return e;
}

}  // namespace semiheat::galerkin
