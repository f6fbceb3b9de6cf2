#pragma once

// Post-processing audits over trajectories: errors against a known solution,
// exponential decay towards a steady state, the sup-norm bound by the data and
// the L2 contraction of two runs from nearby initial data.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "semiheat/expr.hpp"
#include "semiheat/fdm.hpp"
#include "semiheat/grid.hpp"
#include "semiheat/problem.hpp"

namespace semiheat::analysis {

class AnalysisError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ErrorReport {
    std::vector<double> times;
    std::vector<double> max_node;
    std::vector<double> l2;
    std::vector<double> h1;

    double worst_max_node() const;
};

/// Errors at every snapshot against exact(x, t) sampled at the nodes.
ErrorReport manufactured_error(const Trajectory& traj, const expr::Expr& exact);

/// log2(e_coarse / e_fine).
double observed_order(double e_coarse, double e_fine);

struct RefinementReport {
    ErrorReport coarse;
    ErrorReport fine;
    double order_max_node = 0.0;  // at the common final time
    double order_l2 = 0.0;
};

/// Throws AnalysisError when the final times differ or the fine grid is not finer.
RefinementReport refinement_orders(const Trajectory& coarse, const Trajectory& fine, const expr::Expr& exact);

struct DecayWindow {
    double t_a = 0.0;
    double t_b = 0.0;
};

struct DecayFit {
    double gamma_hat = 0.0;
    double C_hat = 0.0;
    double t_a = 0.0;
    double t_b = 0.0;
    double r_squared = 0.0;
    std::size_t n_points = 0;
    bool plateau = false;  // late decay much slower than early decay within the window
};

/// Least squares on log ||u(t) - u_inf||; the default window is the latter half of the run.
DecayFit fit_decay(const Trajectory& traj, const GridFunction& u_inf, std::optional<DecayWindow> window = std::nullopt);

struct DecayVerdict {
    double epsilon = 0.0;
    double gamma = 0.0;        // admissible rate checked against
    double gamma_bound = 0.0;  // min{gamma1, a0 - delta - 4 eps}
    bool consistent = false;   // gamma_hat >= gamma
};

/// Defaults: eps = (a0 - delta) / 8, gamma = half the admissible bound.
DecayVerdict decay_verdict(const DecayFit& fit, double a0, double delta, double gamma1,
                           std::optional<double> epsilon = std::nullopt, std::optional<double> gamma = std::nullopt);

struct BoundAudit {
    HypothesisReport hypotheses;
    bool hypotheses_satisfied = false;
    std::optional<double> M_star;
    double max_observed = 0.0;
    double witness_time = 0.0;
    double witness_x = 0.0;
    bool pass = false;
    std::string verdict;
};

BoundAudit max_bound_audit(const Trajectory& traj, const ProblemSpec& spec);

enum class Solver { fdm, galerkin };

struct ContractionAudit {
    std::vector<double> times;
    std::vector<double> diff_norms;
    std::vector<double> ratios;  // diff(t) / diff(0); empty when diff(0) = 0
    double initial_norm = 0.0;
    double delta = 0.0;
    double max_ratio = 0.0;
    bool bound_holds = true;
    bool dissipative = true;  // ratio <= 1 throughout
    std::optional<double> witness_time;

    bool pass() const { return bound_holds; }
};

struct Resolution {
    std::size_t n_cells = 0;
    double dt = 0.0;
    fdm::Stepper stepper = fdm::Stepper::eigen;
};

/// Runs u0 and u0 + perturbation and checks ||diff(t)|| <= ||diff(0)|| e^{delta t} (1 + 1e-6).
ContractionAudit contraction_audit(const ProblemSpec& spec, const expr::Expr& perturbation, Solver solver,
                                   const Resolution& res);

/// Dispatches to fdm::solve or galerkin::solve.
Trajectory run_solver(const ProblemSpec& spec, Solver solver, const Resolution& res);

}  // namespace semiheat::analysis
