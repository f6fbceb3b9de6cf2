#include "semiheat/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace semiheat::stationary {

using galerkin::FemBasis;
using galerkin::gauss_hi;
using galerkin::gauss_lo;

namespace {

double sampled_mu0(const AsymptoticLimits& limits) {
    double lo = limits.mu_inf_at(0.0);
    for (double x : linspace(0.0, 1.0, lattice_points)) lo = std::min(lo, limits.mu_inf_at(x));
    return lo;
}

double sup_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double a : v) m = std::max(m, std::fabs(a));
    return m;
}

double derivative_f(const ScalarNonlinearity& f, double u) {
    return expr::numeric_partial(f.expr(), expr::Var::u, {0.0, 0.0, u}, 1e-6 * (1.0 + std::fabs(u)));
}

bool monotone_shift_holds(const StationaryProblem& prob) {
    const double delta = prob.f.growth().delta;
    if (!(delta < prob.a0())) return false;
    const auto& us = u_samples();
    double prev = prob.f(us[0]) + delta * us[0];
    for (std::size_t i = 1; i < us.size(); ++i) {
        const double cur = prob.f(us[i]) + delta * us[i];
        if (cur < prev - 1e-12 * (1.0 + std::fabs(prev))) return false;
        prev = cur;
    }
    return true;
}

/// F_j = <f(u), w_j> and the Jacobian block sum_q f'(u_q) w_i w_j.
std::vector<double> nonlinear_load(const StationaryProblem& prob, const FemBasis& basis, std::span<const double> c) {
    const double h = basis.h();
    std::vector<double> F(basis.size(), 0.0);
    for (std::size_t e = 0; e < basis.M; ++e) {
        for (double xi : {gauss_lo, gauss_hi}) {
            const double uq = (1.0 - xi) * c[e] + xi * c[e + 1];
            const double val = 0.5 * h * prob.f(uq);
            F[e] += val * (1.0 - xi);
            F[e + 1] += val * xi;
        }
    }
    return F;
}

TriDiag jacobian(const StationaryProblem& prob, const FemBasis& basis, const TriDiag& A, std::span<const double> c) {
    const double h = basis.h();
    TriDiag J = A;
    for (std::size_t e = 0; e < basis.M; ++e) {
        for (double xi : {gauss_lo, gauss_hi}) {
            const double uq = (1.0 - xi) * c[e] + xi * c[e + 1];
            const double w = 0.5 * h * derivative_f(prob.f, uq);
            const double a = 1.0 - xi;
            const double b = xi;
            J.diag[e] += w * a * a;
            J.diag[e + 1] += w * b * b;
            J.super[e] += w * a * b;
            J.sub[e] += w * a * b;
        }
    }
    return J;
}

std::vector<double> defect_of(const StationaryProblem& prob, const FemBasis& basis, const TriDiag& A,
                              const std::vector<double>& L, std::span<const double> c) {
    std::vector<double> r = A.apply(c);
    const std::vector<double> F = nonlinear_load(prob, basis, c);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += F[i] - L[i];
    return r;
}

}  // namespace

void StationaryProblem::validate() const {
    if (!(h0 >= 0.0) || !(h1 >= 0.0) || !(h0 + h1 > 0.0)) {
        throw std::invalid_argument("stationary problem needs h0, h1 >= 0 with h0 + h1 > 0");
    }
    const double lo = sampled_mu0(limits);
    if (!(mu0 > 0.0) || lo < mu0 * (1.0 - 1e-12)) {
        std::ostringstream msg;
        msg << "stationary problem needs mu_inf >= mu0 > 0 (mu0 = " << mu0 << ", sampled min " << lo << ")";
        throw std::invalid_argument(msg.str());
    }
}

TriDiag assemble_a_inf(const FemBasis& basis, const StationaryProblem& prob) {
    const double h = basis.h();
    TriDiag K(basis.size());
    for (std::size_t e = 0; e < basis.M; ++e) {
        const double xe = basis.node(e);
        const double mu_int = 0.5 * h * (prob.limits.mu_inf_at(xe + gauss_lo * h) + prob.limits.mu_inf_at(xe + gauss_hi * h));
        const double k = mu_int / (h * h);
        K.diag[e] += k;
        K.diag[e + 1] += k;
        K.super[e] -= k;
        K.sub[e] -= k;
    }
    K.diag.front() += prob.h0 * prob.limits.mu_inf_at(0.0);
    K.diag.back() += prob.h1 * prob.limits.mu_inf_at(1.0);
    K.validate();
    return K;
}

std::vector<double> assemble_load_inf(const FemBasis& basis, const StationaryProblem& prob) {
    const double h = basis.h();
    std::vector<double> L(basis.size(), 0.0);
    for (std::size_t e = 0; e < basis.M; ++e) {
        const double xe = basis.node(e);
        for (double xi : {gauss_lo, gauss_hi}) {
            const double val = 0.5 * h * prob.limits.f1_inf_at(xe + xi * h);
            L[e] += val * (1.0 - xi);
            L[e + 1] += val * xi;
        }
    }
    L.front() -= prob.limits.mu_inf_at(0.0) * prob.limits.g0_inf;
    L.back() -= prob.limits.mu_inf_at(1.0) * prob.limits.g1_inf;
    return L;
}

std::vector<double> defect(const StationaryProblem& prob, const GridFunction& c, const FemBasis& basis) {
    if (c.size() != basis.size()) throw std::invalid_argument("defect: coefficient vector has the wrong size");
    return defect_of(prob, basis, assemble_a_inf(basis, prob), assemble_load_inf(basis, prob), c.values());
}

double residual(const StationaryProblem& prob, const GridFunction& c, const FemBasis& basis) {
    return sup_norm(defect(prob, c, basis));
}

StationarySolution solve_stationary(const StationaryProblem& prob_in, const FemBasis& basis, const NewtonConfig& cfg,
                                    const std::optional<GridFunction>& initial_guess) {
    StationaryProblem prob = prob_in;
    if (prob.mu0 == 0.0) prob.mu0 = sampled_mu0(prob.limits);
    prob.validate();
    const TriDiag A = assemble_a_inf(basis, prob);
    const std::vector<double> L = assemble_load_inf(basis, prob);

    std::vector<double> c(basis.size(), 0.0);
    if (initial_guess) {
        if (initial_guess->size() != basis.size()) throw std::invalid_argument("initial guess has the wrong size");
        c.assign(initial_guess->values().begin(), initial_guess->values().end());
    }
    std::vector<double> r = defect_of(prob, basis, A, L, c);
    double res = sup_norm(r);

    StationarySolution sol;
    sol.uniqueness_guaranteed = monotone_shift_holds(prob);
    auto finish = [&](int iters) {
        sol.values = GridFunction(c);
        sol.residual_sup = res;
        sol.newton_iters = iters;
        return sol;
    };

    bool stagnated = false;
    int it = 1;
    for (; it <= cfg.max_iters; ++it) {
        if (res <= cfg.tol) return finish(it);
        const TriDiag J = jacobian(prob, basis, A, c);
        std::vector<double> rhs(r.size());
        for (std::size_t i = 0; i < r.size(); ++i) rhs[i] = -r[i];
        const std::vector<double> dc = thomas_solve(J, rhs);
        double lambda = 1.0;
        bool improved = false;
        for (int halving = 0; halving <= cfg.max_halvings; ++halving, lambda *= 0.5) {
            std::vector<double> trial(c.size());
            for (std::size_t i = 0; i < c.size(); ++i) trial[i] = c[i] + lambda * dc[i];
            std::vector<double> rt;
            try {
                rt = defect_of(prob, basis, A, L, trial);
            } catch (const expr::EvalError&) {
                continue;
            }
            const double rt_norm = sup_norm(rt);
            if (rt_norm < res) {
                c = std::move(trial);
                r = std::move(rt);
                res = rt_norm;
                improved = true;
                break;
            }
        }
        if (!improved) {
            stagnated = true;
            break;
        }
    }
    if (stagnated && cfg.picard_fallback) {
        sol.picard_used = true;
        for (int k = 0; k < cfg.max_iters; ++k, ++it) {
            const std::vector<double> F = nonlinear_load(prob, basis, c);
            std::vector<double> rhs(L.size());
            for (std::size_t i = 0; i < L.size(); ++i) rhs[i] = L[i] - F[i];
            c = thomas_solve(A, rhs);
            r = defect_of(prob, basis, A, L, c);
            res = sup_norm(r);
            if (res <= cfg.tol) return finish(it);
        }
    }
    std::ostringstream msg;
    msg << (stagnated ? "stationary Newton stagnated" : "stationary Newton exceeded max_iters") << " (residual " << res
        << ", tol " << cfg.tol << ")";
    throw NonConvergenceError(msg.str(), res, it);
}

}  // namespace semiheat::stationary
