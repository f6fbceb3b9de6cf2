#pragma once

// Finite differences with the Robin end values eliminated:
//   u_0 = (u_1 - h g0) / (1 + h h0),   u_N = (u_{N-1} - h g1) / (1 + h h1),
// leaving the interior system u' = A u + b for u_1..u_{N-1}. The nonlinear
// term is lagged and the linear system is stepped either exactly through an
// eigendecomposition of A or by backward Euler.

#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "semiheat/grid.hpp"
#include "semiheat/problem.hpp"
#include "semiheat/tridiag.hpp"

namespace semiheat::fdm {

enum class Stepper { eigen, backward_euler };

struct StepperConfig {
    double dt = 0.02;
    Stepper stepper = Stepper::eigen;
    double inner_tol = 1e-10;
    int inner_max = 50;

    /// Throws std::invalid_argument unless dt > 0, inner_tol > 0, inner_max >= 1.
    void validate() const;
};

struct SemiDiscrete {
    TriDiag A;              // N-1 interior unknowns
    std::vector<double> b;  // boundary forcing + f1 - f(u_lag)
};

/// End values from the eliminated Robin conditions at time t.
std::pair<double, double> eliminate_boundary(double u1, double uNm1, double t, const ProblemSpec& spec, double h);

/// Interior operator only (depends on mu, h0, h1 and t; not on the data).
TriDiag assemble_matrix(const ProblemSpec& spec, std::size_t N, double t);

/// Full semi-discrete system with coefficients and data evaluated at t.
SemiDiscrete assemble(const ProblemSpec& spec, std::size_t N, double t, const GridFunction& u_lag);

/// Spectral factorisation of a symmetrisable tridiagonal A = D^{-1} Q Λ Q^T D.
class EigenPropagator {
public:
    /// Throws SolverError when A cannot be symmetrised or the eigensolver fails.
    explicit EigenPropagator(const TriDiag& A);

    /// Exact solution of u' = A u + b over dt with b constant.
    std::vector<double> advance(std::span<const double> b, std::span<const double> u, double dt) const;

    std::span<const double> eigenvalues() const { return lambda_; }
    std::size_t size() const { return lambda_.size(); }

private:
    std::vector<double> d_;       // symmetrising diagonal
    std::vector<double> lambda_;  // ascending
    std::vector<double> q_;       // column-major eigenvectors
};

/// One linear step of u' = A u + b.
std::vector<double> advance_linear(const TriDiag& A, std::span<const double> b, std::span<const double> u, double dt,
                                   Stepper stepper);

struct StepResult {
    GridFunction state;
    int inner_count = 0;
    std::vector<double> residuals;  // sup-norm change per inner iteration
};

/// Reusable stepping context; caches the eigendecomposition when mu does not depend on t.
class Stepping {
public:
    Stepping(const ProblemSpec& spec, std::size_t N, StepperConfig cfg);

    /// Advances state from t to t + dt with the lagged-nonlinearity inner loop.
    StepResult step(const GridFunction& state, double t, double dt);

    int factorizations() const { return factorizations_; }

private:
    const ProblemSpec& spec_;
    std::size_t N_;
    StepperConfig cfg_;
    std::unique_ptr<EigenPropagator> cached_;
    int factorizations_ = 0;
};

StepResult step_linearized(const GridFunction& state, double t, const ProblemSpec& spec, const StepperConfig& cfg);

Trajectory solve(const ProblemSpec& spec, std::size_t N, const StepperConfig& cfg);

struct SteadyResult {
    GridFunction values;
    double residual_sup = 0.0;
    int newton_iters = 0;
};

/// Damped Newton on -D(mu_inf D u) + f(u) = f1_inf with eliminated Robin ends.
SteadyResult steady_fd(const AsymptoticLimits& limits, const ScalarNonlinearity& f, double h0, double h1, std::size_t N,
                       double tol = 1e-10);

}  // namespace semiheat::fdm
