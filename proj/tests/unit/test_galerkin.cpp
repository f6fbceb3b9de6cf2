#include <doctest.h>

#include <cmath>
#include <random>

#include "semiheat/forms.hpp"
#include "semiheat/galerkin.hpp"
#include "support.hpp"

using namespace semiheat;
using namespace semiheat::galerkin;

namespace {
bool cholesky_ok(const TriDiag& a) {
    double prev = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a.diag[i] - (i > 0 ? a.sub[i - 1] * a.sub[i - 1] / prev : 0.0);
        if (!(d > 0.0)) return false;
        prev = d;
    }
    return true;
}

double quad_form(const TriDiag& a, const GridFunction& v) {
    const auto av = a.apply(v.values());
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * av[i];
    return s;
}
}  // namespace

TEST_CASE("basis") {
    const FemBasis b(4);
    CHECK(b.size() == 5);
    CHECK(b.h() == 0.25);
    CHECK(b.hat(1, 0.25) == 1.0);
    CHECK(b.hat(1, 0.375) == doctest::Approx(0.5));
    CHECK(b.hat(1, 0.75) == 0.0);
    CHECK(b.hat(0, 0.0) == 1.0);
    CHECK_THROWS(FemBasis(1));
    CHECK(gauss_lo + gauss_hi == doctest::Approx(1.0));
    CHECK(gauss_hi - gauss_lo == doctest::Approx(1.0 / std::sqrt(3.0)));
}

TEST_CASE("mass matrix") {
    const TriDiag m = assemble_mass(FemBasis(2));
    CHECK(m.diag[0] == doctest::Approx(1.0 / 6.0));
    CHECK(m.diag[1] == doctest::Approx(1.0 / 3.0));
    CHECK(m.diag[2] == doctest::Approx(1.0 / 6.0));
    CHECK(m.super[0] == doctest::Approx(1.0 / 12.0));
    CHECK(m.is_symmetric());
    const FemBasis b(10);
    const TriDiag big = assemble_mass(b);
    const auto sums = big.apply(std::vector<double>(11, 1.0));
    CHECK(sums[0] == doctest::Approx(0.05));
    CHECK(sums[5] == doctest::Approx(0.1));
    CHECK(sums[10] == doctest::Approx(0.05));
    CHECK(cholesky_ok(big));
}

TEST_CASE("stiffness matrix") {
    const auto cfg = test::preset("paper-sec6");
    const FemBasis b(8);
    const TriDiag k = assemble_stiffness(0.0, cfg.spec, b);
    CHECK(k.diag[0] == doctest::Approx(8.0 + 2.0));
    CHECK(k.diag[8] == doctest::Approx(8.0 + 1.0));
    CHECK(k.sub[3] == doctest::Approx(-8.0));
    CHECK(k.diag[4] == doctest::Approx(16.0));
    CHECK(k.super[4] == doctest::Approx(-8.0));
    CHECK(k.is_symmetric());
    CHECK(cholesky_ok(k));
}

TEST_CASE("property: stiffness coercivity") {
    std::mt19937_64 rng(21);
    test::Data d;
    d.mu = "1 + 0.5*x*x + 0.2*sin(t)";
    d.h0 = 2.0;
    d.h1 = 1.0;
    const auto cfg = test::make(d);
    const double a0 = forms::form_constants(cfg.spec).a0;
    for (int i = 0; i < 100; ++i) {
        const std::size_t M = 2 + i % 30;
        const GridFunction v = test::random_grid(rng, M);
        const double t = 0.01 * i;
        const double hv = forms::h1_norm(v);
        CHECK(quad_form(assemble_stiffness(t, cfg.spec, FemBasis(M)), v) >= a0 * hv * hv - 1e-6);
    }
}

TEST_CASE("load vector") {
    test::Data d;
    d.f1 = "1";
    const auto ones = test::make(d);
    const FemBasis b(5);
    const auto l = assemble_load(0.0, ones.spec, b, GridFunction::zeros(5));
    CHECK(l[0] == doctest::Approx(0.1));
    CHECK(l[2] == doctest::Approx(0.2));
    CHECK(l[5] == doctest::Approx(0.1));

    const auto cfg = test::preset("paper-sec6");
    test::Data nog = d;
    nog.f1 = cfg.spec.f1.source();
    const auto no_boundary = test::make(nog);
    const auto full = assemble_load(0.0, cfg.spec, b, GridFunction::zeros(5));
    const auto interior = assemble_load(0.0, no_boundary.spec, b, GridFunction::zeros(5));
    CHECK(full[0] - interior[0] == doctest::Approx(2.0));
    CHECK(full[5] - interior[5] == doctest::Approx(-cfg.spec.g1_at(0.0)));
    CHECK(full[2] == doctest::Approx(interior[2]));

    const GridFunction lag = GridFunction::sample(5, [](double x) { return std::cos(x); });
    CHECK(assemble_load(0.0, ones.spec, b, lag) == l);
}

TEST_CASE("zero problem") {
    const auto zero = test::preset("zero");
    const FemBasis b(6);
    const StepResult r = step_imex(GridFunction::zeros(6), 0.0, zero.spec, b, StepConfig{});
    CHECK(r.state.max_abs() == 0.0);
    StepConfig sc;
    sc.dt = 0.05;
    const Trajectory tr = solve(zero.spec, 6, sc);
    for (const auto& s : tr.states) CHECK(s.max_abs() == 0.0);
    const EnergyTrace e = energy_traces(tr, zero.spec, zero.spec.f.growth());
    for (double s : e.S) CHECK(s == 0.0);
    CHECK(e.pass());
}

TEST_CASE("galerkin accuracy on the manufactured problem") {
    auto cfg = test::preset("paper-sec6");
    cfg.spec.T = 1.0;
    const Trajectory tr = solve(cfg.spec, 40, StepConfig{});
    const GridFunction& u = tr.states.back();
    double err = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) err = std::max(err, std::fabs(u[k] - (1 + std::exp(-1.0)) * std::exp(u.x(k))));
    CHECK(err < 2e-2);
    CHECK(err == doctest::Approx(8.79e-4).epsilon(1e-2));
}

TEST_CASE("stiffness is assembled once for time-independent mu") {
    const auto cfg = test::preset("paper-sec6");
    const FemBasis b(10);
    Stepping s(cfg.spec, b, StepConfig{});
    GridFunction u = GridFunction::sample(10, [](double x) { return 2 * std::exp(x); });
    for (int n = 0; n < 4; ++n) u = s.step(u, 0.01 * n, 0.01).state;
    CHECK(s.stiffness_assemblies() == 1);
}

TEST_CASE("energy traces on the manufactured run") {
    const auto cfg = test::preset("paper-sec6");
    StepConfig sc;
    sc.dt = 0.02;
    const Trajectory tr = solve(cfg.spec, 5, sc);
    const EnergyTrace e = energy_traces(tr, cfg.spec, cfg.spec.f.growth());
    CHECK(e.a0 == doctest::Approx(0.5));
    CHECK(e.S.size() == tr.size());
    CHECK(e.S_pass);
    CHECK(e.X_pass);
    for (std::size_t n = 0; n < e.S.size(); ++n) {
        CHECK(e.S[n] <= e.S_bound[n]);
        CHECK(e.X[n] <= e.X_slack * e.X_bound);
        CHECK(e.S[n] == doctest::Approx(e.S_norm[n] + e.S_h1_integral[n] + e.S_lp_integral[n]));
    }
    for (std::size_t n = 1; n < e.S.size(); ++n) {
        CHECK(e.S_h1_integral[n] >= e.S_h1_integral[n - 1]);
        CHECK(e.S_lp_integral[n] >= e.S_lp_integral[n - 1]);
    }
    CHECK(e.Cbar_T1 == doctest::Approx((1 + 2 / 0.5) * (6 + 8 / 0.5) * e.C_T));
}
