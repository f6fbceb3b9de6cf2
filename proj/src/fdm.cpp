#include "semiheat/fdm.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace semiheat::fdm {

void StepperConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
    if (!(inner_tol > 0.0)) throw std::invalid_argument("inner_tol must be positive");
    if (inner_max < 1) throw std::invalid_argument("inner_max must be at least 1");
}

namespace {

void require_cells(std::size_t N) {
    if (N < 3) throw std::invalid_argument("finite differences need N >= 3");
}

double cell_h(std::size_t N) { return 1.0 / static_cast<double>(N); }

double node(std::size_t k, std::size_t N) { return static_cast<double>(k) / static_cast<double>(N); }

double sup_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

double derivative_f(const ScalarNonlinearity& f, double u) {
    return expr::numeric_partial(f.expr(), expr::Var::u, {0.0, 0.0, u}, 1e-6 * (1.0 + std::fabs(u)));
}

}  // namespace

std::pair<double, double> eliminate_boundary(double u1, double uNm1, double t, const ProblemSpec& spec, double h) {
    const double s0 = 1.0 + h * spec.boundary.h0;
    const double s1 = 1.0 + h * spec.boundary.h1;
    if (!(s0 > 0.0) || !(s1 > 0.0)) throw std::invalid_argument("eliminate_boundary: 1 + h*h0 and 1 + h*h1 must be positive");
    return {(u1 - h * spec.g0_at(t)) / s0, (uNm1 - h * spec.g1_at(t)) / s1};
}

TriDiag assemble_matrix(const ProblemSpec& spec, std::size_t N, double t) {
    require_cells(N);
    const double h = cell_h(N);
    const double ih2 = 1.0 / (h * h);
    const std::size_t m = N - 1;
    std::vector<double> mu_half(N);
    for (std::size_t k = 0; k < N; ++k) mu_half[k] = spec.mu_at((static_cast<double>(k) + 0.5) * h, t);

    TriDiag A(m);
    // Unknown i corresponds to node k = i + 1; mu_half[k] sits at x_{k+1/2}.
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t k = i + 1;
        A.diag[i] = -(mu_half[k] + mu_half[k - 1]) * ih2;
        if (i + 1 < m) A.super[i] = mu_half[k] * ih2;
        if (i > 0) A.sub[i - 1] = mu_half[k - 1] * ih2;
    }
    const double h0 = spec.boundary.h0;
    const double h1 = spec.boundary.h1;
    A.diag[0] = -mu_half[1] * ih2 - mu_half[0] * h0 / (h * (1.0 + h * h0));
    A.diag[m - 1] = -mu_half[N - 2] * ih2 - mu_half[N - 1] * h1 / (h * (1.0 + h * h1));
    A.validate();
    return A;
}

namespace {

std::vector<double> assemble_forcing(const ProblemSpec& spec, std::size_t N, double t, const GridFunction& u_lag) {
    if (u_lag.n_cells() != N) throw std::invalid_argument("assemble: u_lag has the wrong number of cells");
    const double h = cell_h(N);
    const std::size_t m = N - 1;
    std::vector<double> b(m);
    const bool lagged = !spec.f.is_linear_free();
    const double f_const = lagged ? 0.0 : spec.f_at(0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t k = i + 1;
        const double fk = lagged ? spec.f_at(u_lag[k]) : f_const;
        b[i] = spec.f1_at(node(k, N), t) - fk;
    }
    const double h0 = spec.boundary.h0;
    const double h1 = spec.boundary.h1;
    b[0] -= spec.mu_at(0.5 * h, t) * spec.g0_at(t) / (h * (1.0 + h * h0));
    b[m - 1] -= spec.mu_at(1.0 - 0.5 * h, t) * spec.g1_at(t) / (h * (1.0 + h * h1));
    return b;
}

}  // namespace

SemiDiscrete assemble(const ProblemSpec& spec, std::size_t N, double t, const GridFunction& u_lag) {
    SemiDiscrete sd;
    sd.A = assemble_matrix(spec, N, t);
    sd.b = assemble_forcing(spec, N, t, u_lag);
    return sd;
}

EigenPropagator::EigenPropagator(const TriDiag& A) {
    const std::size_t m = A.size();
    if (m == 0) throw std::invalid_argument("EigenPropagator: empty matrix");
    d_.assign(m, 1.0);
    Eigen::VectorXd diag(m);
    Eigen::VectorXd off(m > 1 ? m - 1 : 0);
    for (std::size_t i = 0; i < m; ++i) diag(static_cast<Eigen::Index>(i)) = A.diag[i];
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const double p = A.super[i];
        const double s = A.sub[i];
        if (p == 0.0 && s == 0.0) {
            d_[i + 1] = d_[i];
            off(static_cast<Eigen::Index>(i)) = 0.0;
        } else if (p * s > 0.0) {
            d_[i + 1] = d_[i] * std::sqrt(p / s);
            off(static_cast<Eigen::Index>(i)) = std::copysign(std::sqrt(p * s), p);
        } else {
            throw SolverError("eigen stepper: off-diagonal pair " + std::to_string(i) +
                              " has opposite signs, matrix is not symmetrisable");
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) throw SolverError("eigen stepper: symmetric eigensolver did not converge");
    lambda_.resize(m);
    q_.resize(m * m);
    for (std::size_t j = 0; j < m; ++j) {
        lambda_[j] = es.eigenvalues()(static_cast<Eigen::Index>(j));
        for (std::size_t i = 0; i < m; ++i) {
            q_[j * m + i] = es.eigenvectors()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
}

std::vector<double> EigenPropagator::advance(std::span<const double> b, std::span<const double> u, double dt) const {
    const std::size_t m = size();
    if (b.size() != m || u.size() != m) throw std::invalid_argument("EigenPropagator::advance: size mismatch");
    std::vector<double> du(m), db(m);
    for (std::size_t i = 0; i < m; ++i) {
        du[i] = d_[i] * u[i];
        db[i] = d_[i] * b[i];
    }
    std::vector<double> w(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double* qj = &q_[j * m];
        double wj = 0.0;
        double bj = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            wj += qj[i] * du[i];
            bj += qj[i] * db[i];
        }
        const double z = lambda_[j] * dt;
        const double phi = (z == 0.0) ? dt : std::expm1(z) / lambda_[j];
        w[j] = std::exp(z) * wj + phi * bj;
    }
    std::vector<double> out(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        const double* qj = &q_[j * m];
        for (std::size_t i = 0; i < m; ++i) out[i] += qj[i] * w[j];
    }
    for (std::size_t i = 0; i < m; ++i) out[i] /= d_[i];
    return out;
}

namespace {

std::vector<double> backward_euler(const TriDiag& A, std::span<const double> b, std::span<const double> u, double dt) {
    const TriDiag lhs = A.shifted(1.0, -dt);
    std::vector<double> rhs(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) rhs[i] = u[i] + dt * b[i];
    return thomas_solve(lhs, rhs);
}

}  // namespace

std::vector<double> advance_linear(const TriDiag& A, std::span<const double> b, std::span<const double> u, double dt,
                                   Stepper stepper) {
    if (stepper == Stepper::backward_euler) return backward_euler(A, b, u, dt);
    return EigenPropagator(A).advance(b, u, dt);
}

Stepping::Stepping(const ProblemSpec& spec, std::size_t N, StepperConfig cfg) : spec_(spec), N_(N), cfg_(cfg) {
    require_cells(N);
    cfg_.validate();
}

StepResult Stepping::step(const GridFunction& state, double t, double dt) {
    if (state.n_cells() != N_) throw std::invalid_argument("step: state has the wrong number of cells");
    const bool eigen = cfg_.stepper == Stepper::eigen;
    const double t_freeze = eigen ? t + 0.5 * dt : t + dt;
    const double h = cell_h(N_);
    const std::size_t m = N_ - 1;

    TriDiag A;
    const EigenPropagator* prop = nullptr;
    std::unique_ptr<EigenPropagator> local;
    if (eigen) {
        if (spec_.mu.time_dependent()) {
            local = std::make_unique<EigenPropagator>(assemble_matrix(spec_, N_, t_freeze));
            ++factorizations_;
            prop = local.get();
        } else {
            if (!cached_) {
                cached_ = std::make_unique<EigenPropagator>(assemble_matrix(spec_, N_, t_freeze));
                ++factorizations_;
            }
            prop = cached_.get();
        }
    } else {
        A = assemble_matrix(spec_, N_, t_freeze);
    }

    const std::span<const double> u_now = state.values().subspan(1, m);
    const bool lagged = !spec_.f.is_linear_free();
    StepResult result;
    GridFunction lag = state;
    for (int n = 1;; ++n) {
        const std::vector<double> b = assemble_forcing(spec_, N_, t_freeze, lag);
        const std::vector<double> interior = eigen ? prop->advance(b, u_now, dt) : backward_euler(A, b, u_now, dt);
        const auto [u0, uN] = eliminate_boundary(interior.front(), interior.back(), t + dt, spec_, h);
        std::vector<double> full(N_ + 1);
        full[0] = u0;
        std::copy(interior.begin(), interior.end(), full.begin() + 1);
        full[N_] = uN;
        GridFunction next(std::move(full));
        const double res = sup_diff(next.values(), lag.values());
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

StepResult step_linearized(const GridFunction& state, double t, const ProblemSpec& spec, const StepperConfig& cfg) {
    Stepping stepping(spec, state.n_cells(), cfg);
    return stepping.step(state, t, cfg.dt);
}

Trajectory solve(const ProblemSpec& spec, std::size_t N, const StepperConfig& cfg) {
    require_cells(N);
    Trajectory traj;
    traj.times = time_grid(spec.T, cfg.dt);
    traj.states.reserve(traj.times.size());
    traj.states.push_back(GridFunction::sample(N, [&](double x) { return spec.u0_at(x); }));
    Stepping stepping(spec, N, cfg);
    for (std::size_t n = 0; n + 1 < traj.times.size(); ++n) {
        const double t = traj.times[n];
        StepResult r = stepping.step(traj.states.back(), t, traj.times[n + 1] - t);
        traj.inner_iterations.push_back(r.inner_count);
        traj.states.push_back(std::move(r.state));
    }
    return traj;
}

namespace {

ProblemSpec steady_as_spec(const AsymptoticLimits& limits, const ScalarNonlinearity& f, double h0, double h1) {
    ProblemSpec spec;
    spec.mu.expr = limits.mu_inf;
    spec.f = f;
    spec.f1 = limits.f1_inf;
    spec.boundary.h0 = h0;
    spec.boundary.h1 = h1;
    spec.boundary.g0 = expr::Expr::constant(limits.g0_inf);
    spec.boundary.g1 = expr::Expr::constant(limits.g1_inf);
    spec.u0 = expr::Expr::constant(0.0);
    return spec;
}

// F(u) = A u + b_data - f(u), which vanishes at the steady state.
std::vector<double> steady_defect(const TriDiag& A, std::span<const double> b_data, const ScalarNonlinearity& f,
                                  std::span<const double> u) {
    std::vector<double> r = A.apply(u);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += b_data[i] - f(u[i]);
    return r;
}

double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (double a : v) m = std::max(m, std::fabs(a));
    return m;
}

double row_sum_norm(const TriDiag& A) {
    double m = 0.0;
    for (std::size_t i = 0; i < A.size(); ++i) {
        double s = std::fabs(A.diag[i]);
        if (i > 0) s += std::fabs(A.sub[i - 1]);
        if (i + 1 < A.size()) s += std::fabs(A.super[i]);
        m = std::max(m, s);
    }
    return m;
}

}  // namespace

SteadyResult steady_fd(const AsymptoticLimits& limits, const ScalarNonlinearity& f, double h0, double h1, std::size_t N,
                       double tol) {
    require_cells(N);
    if (!(tol > 0.0)) throw std::invalid_argument("steady_fd: tol must be positive");
    const ProblemSpec spec = steady_as_spec(limits, f, h0, h1);
    const std::size_t m = N - 1;
    const TriDiag A = assemble_matrix(spec, N, 0.0);
    // Data part of b: evaluate forcing with a zero lag and add back f(0).
    std::vector<double> b_data = assemble_forcing(spec, N, 0.0, GridFunction::zeros(N));
    const double f0 = f(0.0);
    for (double& v : b_data) v += f0;
    const double normA = row_sum_norm(A);
    constexpr double eps = std::numeric_limits<double>::epsilon();

    std::vector<double> u(m, 0.0);
    std::vector<double> r = steady_defect(A, b_data, f, u);
    double res = sup_norm(r);
    for (int it = 1; it <= 100; ++it) {
        // Attainable floor: rounding in A u dominates for fine grids.
        const double floor = 8.0 * eps * (normA * sup_norm(u) + sup_norm(b_data));
        if (res <= std::max(tol, floor)) {
            auto [u0, uN] = eliminate_boundary(u.front(), u.back(), 0.0, spec, cell_h(N));
            std::vector<double> full(N + 1);
            full[0] = u0;
            std::copy(u.begin(), u.end(), full.begin() + 1);
            full[N] = uN;
            return {GridFunction(std::move(full)), res, it};
        }
        // J = A - diag(f'(u)); Newton solves J du = -F.
        TriDiag J = A;
        for (std::size_t i = 0; i < m; ++i) J.diag[i] -= derivative_f(f, u[i]);
        std::vector<double> rhs(m);
        for (std::size_t i = 0; i < m; ++i) rhs[i] = -r[i];
        const std::vector<double> du = thomas_solve(J, rhs);
        double lambda = 1.0;
        bool improved = false;
        for (int halving = 0; halving <= 30; ++halving, lambda *= 0.5) {
            std::vector<double> trial(m);
            for (std::size_t i = 0; i < m; ++i) trial[i] = u[i] + lambda * du[i];
            std::vector<double> rt;
            try {
                rt = steady_defect(A, b_data, f, trial);
            } catch (const expr::EvalError&) {
                continue;
            }
            const double rt_norm = sup_norm(rt);
            if (rt_norm < res) {
                u = std::move(trial);
                r = std::move(rt);
                res = rt_norm;
                improved = true;
                break;
            }
        }
        if (!improved) {
            std::ostringstream msg;
            msg << "steady Newton stagnated at iteration " << it << " (residual " << res << ")";
            throw NonConvergenceError(msg.str(), res, it);
        }
    }
    std::ostringstream msg;
    msg << "steady Newton exceeded 100 iterations (residual " << res << ")";
    throw NonConvergenceError(msg.str(), res, 100);
}

}  // namespace semiheat::fdm
