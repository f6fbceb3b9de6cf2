#include <doctest.h>

#include <cmath>

#include "semiheat/stationary.hpp"
#include "support.hpp"

using namespace semiheat;
using namespace semiheat::stationary;

namespace {
StationaryProblem sec6() {
    const auto cfg = test::preset("paper-sec6");
    return {*cfg.limits, cfg.spec.f, 2.0, 1.0, 0.0};
}
StationaryProblem zero() {
    const auto cfg = test::preset("zero");
    return {*cfg.limits, cfg.spec.f, 1.0, 1.0, 0.0};
}
}  // namespace

TEST_CASE("a_inf entries") {
    // exact hat integral 1/h plus h0: 2 + 2 = 4 at h = 1/2
    const TriDiag a = assemble_a_inf(galerkin::FemBasis(2), sec6());
    CHECK(a.diag[0] == doctest::Approx(4.0));
    CHECK(a.diag[2] == doctest::Approx(3.0));
    CHECK(a.diag[1] == doctest::Approx(4.0));
    CHECK(a.super[0] == doctest::Approx(-2.0));
    CHECK(a.is_symmetric());
}

TEST_CASE("problem validation") {
    StationaryProblem p = sec6();
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.mu0 = 1.0;
    CHECK_NOTHROW(p.validate());
    p.mu0 = 1.5;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.mu0 = 1.0;
    p.h0 = 0.0;
    p.h1 = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("manufactured steady state") {
    const StationaryProblem p = sec6();
    const galerkin::FemBasis b(160);
    const StationarySolution s = solve_stationary(p, b);
    CHECK(s.residual_sup <= 1e-10);
    CHECK(residual(p, s.values, b) <= 1e-10);
    CHECK(s.uniqueness_guaranteed);
    CHECK_FALSE(s.picard_used);
    CHECK(s.newton_iters <= 8);
    for (std::size_t k = 0; k < s.values.size(); ++k) CHECK(std::fabs(s.values[k] - std::exp(b.node(k))) <= 2e-2);
}

TEST_CASE("second order nodal convergence") {
    const StationaryProblem p = sec6();
    const double frozen[] = {1.99e-4, 4.97e-5, 1.24e-5, 3.10e-6};
    double prev = 0.0;
    int i = 0;
    for (std::size_t M : {20u, 40u, 80u, 160u}) {
        const galerkin::FemBasis b(M);
        const StationarySolution s = solve_stationary(p, b);
        double err = 0.0;
        for (std::size_t k = 0; k < s.values.size(); ++k) err = std::max(err, std::fabs(s.values[k] - std::exp(b.node(k))));
        CHECK(err == doctest::Approx(frozen[i]).epsilon(1e-2));
        if (prev > 0.0) CHECK(std::log2(prev / err) >= 1.8);
        prev = err;
        ++i;
    }
}

TEST_CASE("zero data") {
    const StationaryProblem p = zero();
    const galerkin::FemBasis b(8);
    const StationarySolution s = solve_stationary(p, b);
    CHECK(s.values.max_abs() == 0.0);
    CHECK(s.newton_iters == 1);
    CHECK(residual(p, GridFunction::zeros(8), b) == 0.0);
    std::vector<double> bump(9, 0.0);
    bump[3] = 1.0;
    CHECK(residual(p, GridFunction(bump), b) > 0.0);
}

TEST_CASE("initial guess at the solution converges immediately") {
    const StationaryProblem p = sec6();
    const galerkin::FemBasis b(20);
    const StationarySolution s = solve_stationary(p, b);
    const StationarySolution again = solve_stationary(p, b, NewtonConfig{}, s.values);
    CHECK(again.newton_iters <= 1);
}
