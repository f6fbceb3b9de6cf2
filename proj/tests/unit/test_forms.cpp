#include <doctest.h>

#include <cmath>
#include <random>

#include "semiheat/forms.hpp"
#include "support.hpp"

using namespace semiheat;
using namespace semiheat::forms;

namespace {
GridFunction ones(std::size_t n) { return GridFunction::sample(n, [](double) { return 1.0; }); }
GridFunction ident(std::size_t n) { return GridFunction::sample(n, [](double x) { return x; }); }
constexpr int trials = 100;
}  // namespace

TEST_CASE("norm examples") {
    CHECK(h1_norm(ones(10)) == doctest::Approx(1.0));
    CHECK(i_norm(ones(10), 0) == doctest::Approx(1.0));
    CHECK(i_norm(ones(10), 1) == doctest::Approx(1.0));
    CHECK(std::fabs(h1_norm(ident(100)) * h1_norm(ident(100)) - 4.0 / 3.0) <= 1e-3);
    CHECK(lp_norm_p(ones(7), 2.5) == doctest::Approx(1.0));
    CHECK(l2_norm_sq(ident(1)) == doctest::Approx(0.5));
    CHECK(dx_norm_sq(ident(8)) == doctest::Approx(1.0));
}

TEST_CASE("bilinear form examples") {
    const auto cfg = test::preset("paper-sec6");
    CHECK(bilinear_a(0.0, ones(100), ones(100), cfg.spec) == doctest::Approx(3.0));
    CHECK(std::fabs(bilinear_a(0.0, ident(100), ident(100), cfg.spec) - 2.0) <= 1e-10);
    CHECK(da_dt(0.3, ident(50), ones(50), cfg.spec) == 0.0);

    test::Data d;
    d.mu = "1 + t";
    d.h0 = 1.0;
    d.h1 = 0.0;
    const auto tv = test::make(d);
    CHECK(std::fabs(da_dt(0.5, ident(100), ident(100), tv.spec) - 1.0) <= 1e-6);
    // the h1 mu'(1) u(1) v(1) corner term
    auto both = tv;
    both.spec.boundary.h1 = 1.0;
    CHECK(std::fabs(da_dt(0.5, ident(100), ident(100), both.spec) - 2.0) <= 1e-6);
}

TEST_CASE("form constants") {
    const FormConstants c = form_constants(test::preset("paper-sec6").spec);
    CHECK(c.mu0 == 1.0);
    CHECK(c.a0 == doctest::Approx(0.5));
    CHECK(c.aT == doctest::Approx(7.0));
    CHECK(c.aT_tilde == 0.0);
}

TEST_CASE("embedding example") {
    const EmbeddingReport r = sup_norm_embedding_check(ones(20));
    CHECK(r.max_abs == 1.0);
    CHECK(r.bound_h1 == doctest::Approx(std::sqrt(2.0)));
    CHECK(r.worst_margin >= 0.0);
}

TEST_CASE("property: symmetry and bilinearity") {
    std::mt19937_64 rng(11);
    test::Data d;
    d.mu = "1 + x*x + 0.5*sin(t)";
    d.h0 = 2.0;
    d.h1 = 0.5;
    const auto cfg = test::make(d);
    std::uniform_real_distribution<double> coef(-3.0, 3.0);
    for (int i = 0; i < trials; ++i) {
        const std::size_t n = 4 + i % 37;
        const GridFunction u = test::random_grid(rng, n);
        const GridFunction v = test::random_grid(rng, n);
        const GridFunction w = test::random_grid(rng, n);
        const double t = 0.01 * i;
        const double a = coef(rng);
        const double b = coef(rng);
        const double uv = bilinear_a(t, u, v, cfg.spec);
        CHECK(uv == doctest::Approx(bilinear_a(t, v, u, cfg.spec)).epsilon(1e-12));
        const double lhs = bilinear_a(t, a * u + b * v, w, cfg.spec);
        const double rhs = a * bilinear_a(t, u, w, cfg.spec) + b * bilinear_a(t, v, w, cfg.spec);
        CHECK(std::fabs(lhs - rhs) <= 1e-10 * (1.0 + std::fabs(rhs)));
    }
}

TEST_CASE("property: time derivative bound") {
    std::mt19937_64 rng(15);
    test::Data d;
    d.mu = "2 + sin(3*t)*x";
    d.h0 = 2.0;
    d.h1 = 1.0;
    d.T = 2.0;
    const auto cfg = test::make(d);
    const FormConstants c = form_constants(cfg.spec);
    CHECK(c.aT_tilde > 0.0);
    for (int i = 0; i < trials; ++i) {
        const GridFunction u = test::random_grid(rng, 3 + i % 29);
        const GridFunction v = test::random_grid(rng, 3 + i % 29);
        CHECK(std::fabs(da_dt(0.02 * i, u, v, cfg.spec)) <= c.aT_tilde * h1_norm(u) * h1_norm(v) + 1e-6);
    }
}

TEST_CASE("property: continuity and coercivity") {
    std::mt19937_64 rng(12);
    const auto cfg = test::preset("paper-sec6");
    const FormConstants c = form_constants(cfg.spec);
    for (int i = 0; i < trials; ++i) {
        const std::size_t n = 3 + i % 41;
        const GridFunction u = test::random_grid(rng, n, 2.0);
        const GridFunction v = test::random_grid(rng, n, 2.0);
        CHECK(std::fabs(bilinear_a(0.0, u, v, cfg.spec)) <= c.aT * h1_norm(u) * h1_norm(v) + 1e-12);
        CHECK(bilinear_a(0.0, u, u, cfg.spec) >= c.a0 * h1_norm(u) * h1_norm(u) - 1e-12);
    }
}

TEST_CASE("property: embedding") {
    std::mt19937_64 rng(13);
    for (int i = 0; i < trials; ++i) {
        const GridFunction v = test::random_grid(rng, 2 + i % 50, 5.0);
        const EmbeddingReport r = sup_norm_embedding_check(v);
        CHECK(r.max_abs <= r.bound_h1 + 1e-12);
        CHECK(r.max_abs <= r.bound_0 + 1e-12);
        CHECK(r.max_abs <= r.bound_1 + 1e-12);
        CHECK(r.worst_margin >= 0.0);
    }
}

TEST_CASE("property: norm equivalence") {
    std::mt19937_64 rng(14);
    for (int i = 0; i < trials; ++i) {
        const GridFunction v = test::random_grid(rng, 2 + i % 60, 3.0);
        const double h1 = h1_norm(v) * h1_norm(v);
        for (int side : {0, 1}) {
            const double ni = i_norm(v, side);
            CHECK(ni <= std::sqrt(3.0) * std::sqrt(h1) + 1e-9);
            CHECK(std::sqrt(h1) / std::sqrt(3.0) <= ni + 1e-9);
        }
    }
}
