#pragma once

// P1 Faedo-Galerkin semidiscretisation of the weak form
//   <u', v> + a(t; u, v) + <f(u), v> = <f1, v> - mu(0,t) g0 v(0) - mu(1,t) g1 v(1)
// stepped with M (c+ - c)/dt + K(t+dt) c+ = L(t+dt, u_lag).

#include <cstddef>
#include <optional>
#include <vector>

#include "semiheat/grid.hpp"
#include "semiheat/problem.hpp"
#include "semiheat/tridiag.hpp"

namespace semiheat::galerkin {

/// Hat functions on the uniform nodes x_j = j/M, j = 0..M.
struct FemBasis {
    std::size_t M = 0;

    explicit FemBasis(std::size_t m);
    double h() const { return 1.0 / static_cast<double>(M); }
    double node(std::size_t j) const { return static_cast<double>(j) / static_cast<double>(M); }
    std::size_t size() const { return M + 1; }
    /// Value of w_j at x.
    double hat(std::size_t j, double x) const;
};

/// Two-point Gauss nodes on the reference cell [0, 1] (weights 1/2 each).
inline constexpr double gauss_lo = 0.21132486540518711775;  // (1 - 1/sqrt 3) / 2
inline constexpr double gauss_hi = 0.78867513459481288225;  // (1 + 1/sqrt 3) / 2

TriDiag assemble_mass(const FemBasis& basis);

/// Element integrals of mu by Gauss quadrature plus the Robin scalars at the corners.
TriDiag assemble_stiffness(double t, const ProblemSpec& spec, const FemBasis& basis);

/// <f1(t), w_j> - <f(u_lag), w_j> with the boundary forcing at j = 0 and j = M.
std::vector<double> assemble_load(double t, const ProblemSpec& spec, const FemBasis& basis, const GridFunction& u_lag);

struct StepConfig {
    double dt = 0.01;
    double inner_tol = 1e-10;
    int inner_max = 50;

    void validate() const;
};

struct StepResult {
    GridFunction state;
    int inner_count = 0;
    std::vector<double> residuals;
};

/// Stepping context; keeps K and M + dt K when mu does not depend on t.
class Stepping {
public:
    Stepping(const ProblemSpec& spec, const FemBasis& basis, StepConfig cfg);

    StepResult step(const GridFunction& state, double t, double dt);

    int stiffness_assemblies() const { return assemblies_; }

private:
    const ProblemSpec& spec_;
    FemBasis basis_;
    StepConfig cfg_;
    TriDiag mass_;
    std::optional<TriDiag> cached_K_;
    int assemblies_ = 0;
};

StepResult step_imex(const GridFunction& state, double t, const ProblemSpec& spec, const FemBasis& basis,
                     const StepConfig& cfg);

/// Nodal interpolation of u0, then repeated step_imex on the shared time grid.
Trajectory solve(const ProblemSpec& spec, std::size_t M, const StepConfig& cfg);

struct EnergyTrace {
    std::vector<double> times;
    std::vector<double> S;
    std::vector<double> S_norm;          // ||u(t)||^2
    std::vector<double> S_h1_integral;   // a0 int ||u||_H1^2
    std::vector<double> S_lp_integral;   // 2 C1 int ||u||_p^p
    std::vector<double> S_bound;         // C_T1 exp(int_0^t ||f1||)
    std::vector<double> X;
    std::vector<double> psi0;
    std::vector<double> psi1;

    double a0 = 0.0;
    double C_T1 = 0.0;
    double C_T2_integral = 0.0;  // int_0^T ||f1(s)|| ds
    double C_T = 0.0;            // constant entering Cbar_T1
    double Cbar_T1 = 0.0;
    double Cbar_T2_integral = 0.0;
    double X_bound = 0.0;  // Cbar_T1 exp(Cbar_T2_integral)
    double X_slack = 1.05;

    bool S_pass = true;
    bool X_pass = true;
    std::optional<std::size_t> S_witness;  // first failing snapshot
    std::optional<std::size_t> X_witness;

    bool pass() const { return S_pass && X_pass; }
};

/// Discrete S_m, X_m and their Gronwall bounds; time integrals by the trapezoid rule.
EnergyTrace energy_traces(const Trajectory& traj, const ProblemSpec& spec, const GrowthBounds& bounds);

}  // namespace semiheat::galerkin
