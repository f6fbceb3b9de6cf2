#pragma once

// Stationary limit problem
//   -(mu_inf u_x)_x + f(u) = f1_inf,  u_x(0) = h0 u(0) + g0_inf,  -u_x(1) = h1 u(1) + g1_inf
// in the P1 Galerkin form a_inf(u, v) + <f(u), v> = <f1_inf, v> - mu_inf(0) g0_inf v(0) - mu_inf(1) g1_inf v(1).

#include <optional>
#include <vector>

#include "semiheat/galerkin.hpp"
#include "semiheat/grid.hpp"
#include "semiheat/problem.hpp"
#include "semiheat/tridiag.hpp"

namespace semiheat::stationary {

struct StationaryProblem {
    AsymptoticLimits limits;
    ScalarNonlinearity f;
    double h0 = 0.0;
    double h1 = 0.0;
    double mu0 = 0.0;  // lower bound of mu_inf; sampled when left at 0

    /// Throws std::invalid_argument unless h0 + h1 > 0 and mu_inf >= mu0 > 0 on the sample lattice.
    void validate() const;
    double a0() const { return coercivity_constant(mu0, h0, h1); }
};

struct NewtonConfig {
    double tol = 1e-10;
    int max_iters = 100;
    int max_halvings = 30;
    bool picard_fallback = true;
};

struct StationarySolution {
    GridFunction values;
    double residual_sup = 0.0;
    int newton_iters = 0;
    bool picard_used = false;
    bool uniqueness_guaranteed = false;  // f + delta u nondecreasing with delta < a0
};

TriDiag assemble_a_inf(const galerkin::FemBasis& basis, const StationaryProblem& prob);

/// Right-hand side <f1_inf, w_j> with the boundary forcing at j = 0 and j = M.
std::vector<double> assemble_load_inf(const galerkin::FemBasis& basis, const StationaryProblem& prob);

/// Defect A_inf c + F(c) - L_inf, one entry per basis function.
std::vector<double> defect(const StationaryProblem& prob, const GridFunction& c, const galerkin::FemBasis& basis);

/// Sup over basis functions of |defect|.
double residual(const StationaryProblem& prob, const GridFunction& c, const galerkin::FemBasis& basis);

/// Damped Newton from c = 0 (or the supplied guess), Picard fallback on stagnation.
/// Throws NonConvergenceError when neither reaches cfg.tol.
StationarySolution solve_stationary(const StationaryProblem& prob, const galerkin::FemBasis& basis,
                                    const NewtonConfig& cfg = {},
                                    const std::optional<GridFunction>& initial_guess = std::nullopt);

}  // namespace semiheat::stationary
