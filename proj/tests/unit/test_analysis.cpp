#include <doctest.h>

#include <cmath>

#include "semiheat/analysis.hpp"
#include "support.hpp"

using namespace semiheat;
using namespace semiheat::analysis;

namespace {
Trajectory sampled(std::size_t N, double T, double dt, const std::function<double(double, double)>& u) {
    Trajectory tr;
    for (double t : time_grid(T, dt)) {
        tr.times.push_back(t);
        tr.states.push_back(GridFunction::sample(N, [&](double x) { return u(x, t); }));
    }
    return tr;
}
}  // namespace

TEST_CASE("manufactured error is zero on exact samples") {
    const auto exact = expr::parse("(1+exp(-t))*exp(x)", roles::exact);
    const Trajectory tr = sampled(8, 1.0, 0.1, [](double x, double t) { return (1 + std::exp(-t)) * std::exp(x); });
    const ErrorReport r = manufactured_error(tr, exact);
    CHECK(r.worst_max_node() == 0.0);
    for (double e : r.l2) CHECK(e == 0.0);
    for (double e : r.h1) CHECK(e == 0.0);
}

TEST_CASE("observed order") {
    CHECK(observed_order(0.4, 0.1) == doctest::Approx(2.0));
    CHECK_THROWS_AS(observed_order(0.0, 0.1), AnalysisError);
}

TEST_CASE("refinement preconditions") {
    const auto exact = expr::parse("x", roles::exact);
    const Trajectory a = sampled(4, 1.0, 0.5, [](double x, double) { return x; });
    const Trajectory b = sampled(8, 2.0, 0.5, [](double x, double) { return x; });
    CHECK_THROWS_AS(refinement_orders(a, b, exact), AnalysisError);
    CHECK_THROWS_AS(refinement_orders(a, a, exact), AnalysisError);
}

TEST_CASE("decay fit on a synthetic trajectory") {
    const GridFunction u_inf = GridFunction::sample(10, [](double x) { return std::exp(x); });
    const Trajectory tr = sampled(10, 3.0, 0.01, [](double x, double t) { return std::exp(x) + std::exp(-2 * t) * std::sin(3 * x + 1); });
    const DecayFit fit = fit_decay(tr, u_inf, DecayWindow{0.5, 3.0});
    CHECK(std::fabs(fit.gamma_hat - 2.0) <= 1e-6);
    CHECK(fit.r_squared == doctest::Approx(1.0));
    CHECK_FALSE(fit.plateau);
    CHECK(fit.t_a == doctest::Approx(0.5));
    CHECK(fit.t_b == doctest::Approx(3.0));

    const DecayFit half = fit_decay(tr, u_inf);
    CHECK(half.t_a == doctest::Approx(1.5));
}

TEST_CASE("decay fit errors") {
    const GridFunction u_inf = GridFunction::sample(4, [](double x) { return x; });
    const Trajectory flat = sampled(4, 1.0, 0.1, [](double x, double) { return x; });
    CHECK_THROWS_AS(fit_decay(flat, u_inf), AnalysisError);
    const Trajectory moving = sampled(4, 1.0, 0.1, [](double x, double t) { return x + std::exp(-t); });
    CHECK_THROWS_AS(fit_decay(moving, u_inf, DecayWindow{0.5, 0.55}), AnalysisError);
    CHECK_THROWS_AS(fit_decay(moving, u_inf, DecayWindow{0.5, 2.0}), AnalysisError);
    CHECK_THROWS_AS(fit_decay(moving, u_inf, DecayWindow{0.6, 0.5}), AnalysisError);
    CHECK_THROWS_AS(fit_decay(moving, GridFunction::zeros(6)), AnalysisError);
}

TEST_CASE("plateau detection") {
    const GridFunction u_inf = GridFunction::zeros(4);
    const Trajectory tr = sampled(4, 3.0, 0.05, [](double, double t) { return std::exp(-3 * t) + 1e-2; });
    CHECK(fit_decay(tr, u_inf, DecayWindow{0.0, 3.0}).plateau);
}

TEST_CASE("decay verdict") {
    DecayFit fit;
    fit.gamma_hat = 1.0;
    const DecayVerdict v = decay_verdict(fit, 0.5, 1e-6, 1.0);
    CHECK(v.epsilon == doctest::Approx((0.5 - 1e-6) / 8));
    CHECK(v.gamma_bound == doctest::Approx(0.5 - 1e-6 - 4 * v.epsilon));
    CHECK(v.gamma == doctest::Approx(0.5 * v.gamma_bound));
    CHECK(v.consistent);
    fit.gamma_hat = 0.1;
    CHECK_FALSE(decay_verdict(fit, 0.5, 1e-6, 1.0).consistent);
    fit.gamma_hat = 5.0;
    CHECK_FALSE(decay_verdict(fit, 0.5, 1e-6, 1.0, std::nullopt, 0.3).consistent);
}

TEST_CASE("max bound audit") {
    const auto demo = test::preset("bound-demo");
    const Trajectory tr = run_solver(demo.spec, Solver::fdm, {20, 0.01, fdm::Stepper::eigen});
    const BoundAudit a = max_bound_audit(tr, demo.spec);
    CHECK(a.hypotheses_satisfied);
    REQUIRE(a.M_star);
    CHECK(*a.M_star == doctest::Approx(1.0));
    CHECK(a.max_observed <= 1.0 + 1e-9);
    CHECK(a.pass);

    const auto sec6 = test::preset("paper-sec6");
    const BoundAudit b = max_bound_audit(run_solver(sec6.spec, Solver::fdm, {5, 0.02, fdm::Stepper::eigen}), sec6.spec);
    CHECK_FALSE(b.hypotheses_satisfied);
    CHECK(b.verdict == "hypotheses not satisfied: (H5')");

    const auto zero = test::preset("zero");
    const BoundAudit z = max_bound_audit(run_solver(zero.spec, Solver::fdm, {5, 0.05, fdm::Stepper::eigen}), zero.spec);
    REQUIRE(z.M_star);
    CHECK(*z.M_star == 0.0);
    CHECK(z.max_observed == 0.0);
    CHECK(z.pass);
}

TEST_CASE("contraction audit") {
    const auto sec6 = test::preset("paper-sec6");
    const auto pert = expr::parse("0.1*sin(3.141592653589793*x)", roles::u0);
    const ContractionAudit c = contraction_audit(sec6.spec, pert, Solver::fdm, {5, 0.02, fdm::Stepper::eigen});
    CHECK(c.bound_holds);
    CHECK(c.dissipative);
    CHECK(c.max_ratio <= 1.0);
    CHECK(c.initial_norm == doctest::Approx(0.1 / std::sqrt(2.0)).epsilon(1e-6));

    const ContractionAudit z = contraction_audit(sec6.spec, expr::parse("0", roles::u0), Solver::galerkin, {5, 0.02, fdm::Stepper::eigen});
    for (double d : z.diff_norms) CHECK(d == 0.0);
    CHECK(z.ratios.empty());
    CHECK(z.pass());
}
