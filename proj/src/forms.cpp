#include "semiheat/forms.hpp"

#include <algorithm>
#include <stdexcept>

namespace semiheat::forms {

namespace {

double trapezoid(const GridFunction& v, const auto& integrand) {
    const std::size_t n = v.n_cells();
    double interior = 0.0;
    for (std::size_t k = 1; k < n; ++k) interior += integrand(v[k]);
    return v.h() * (interior + 0.5 * (integrand(v[0]) + integrand(v[n])));
}

void require_same_grid(const GridFunction& u, const GridFunction& v) {
    if (u.size() != v.size()) throw std::invalid_argument("bilinear form: u and v live on different grids");
}

/// Shared quadrature of <c u_x, v_x> + h0 c(0) u(0) v(0) + h1 c(1) u(1) v(1).
template <typename Coef>
double weighted_form(const GridFunction& u, const GridFunction& v, const ProblemSpec& spec, const Coef& coef) {
    require_same_grid(u, v);
    const std::size_t n = u.n_cells();
    const double h = u.h();
    double flux = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double du = u[k + 1] - u[k];
        const double dv = v[k + 1] - v[k];
        flux += coef((static_cast<double>(k) + 0.5) * h) * (du * dv);
    }
    flux /= h;
    const double left = spec.boundary.h0 * coef(0.0) * (u[0] * v[0]);
    const double right = spec.boundary.h1 * coef(1.0) * (u[n] * v[n]);
    return flux + left + right;
}

}  // namespace

double l2_norm_sq(const GridFunction& v) {
    return trapezoid(v, [](double a) { return a * a; });
}

double dx_norm_sq(const GridFunction& v) {
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
        const double d = v[k + 1] - v[k];
        s += d * d;
    }
    return s / v.h();
}

double lp_norm_p(const GridFunction& v, double p) {
    return trapezoid(v, [p](double a) { return std::pow(std::fabs(a), p); });
}

double h1_norm(const GridFunction& v) { return std::sqrt(l2_norm_sq(v) + dx_norm_sq(v)); }

double i_norm(const GridFunction& v, int i) {
    if (i != 0 && i != 1) throw std::invalid_argument("i_norm: i must be 0 or 1");
    const double end = (i == 0) ? v.front() : v.back();
    return std::sqrt(end * end + dx_norm_sq(v));
}

double bilinear_a(double t, const GridFunction& u, const GridFunction& v, const ProblemSpec& spec) {
    return weighted_form(u, v, spec, [&](double x) { return spec.mu_at(x, t); });
}

double da_dt(double t, const GridFunction& u, const GridFunction& v, const ProblemSpec& spec) {
    return weighted_form(u, v, spec, [&](double x) {
        return expr::numeric_partial(spec.mu.expr, expr::Var::t, {x, t, 0.0});
    });
}

FormConstants form_constants(const ProblemSpec& spec) {
    FormConstants c;
    c.mu0 = spec.mu.mu0;
    c.a0 = coercivity_constant(c.mu0, spec.boundary.h0, spec.boundary.h1);
    const double factor = 1.0 + 2.0 * spec.boundary.h0 + 2.0 * spec.boundary.h1;
    double sup_mu = 0.0;
    double sup_dmu = 0.0;
    const bool time_dependent = spec.mu.time_dependent();
    for (double t : linspace(0.0, spec.T, lattice_points)) {
        for (double x : linspace(0.0, 1.0, lattice_points)) {
            sup_mu = std::max(sup_mu, spec.mu_at(x, t));
            if (time_dependent) {
                sup_dmu = std::max(sup_dmu, std::fabs(expr::numeric_partial(spec.mu.expr, expr::Var::t, {x, t, 0.0})));
            }
        }
    }
    c.aT = factor * sup_mu;
    c.aT_tilde = factor * sup_dmu;
    return c;
}

EmbeddingReport sup_norm_embedding_check(const GridFunction& v) {
    EmbeddingReport r;
    const double s2 = std::sqrt(2.0);
    r.max_abs = v.max_abs();
    r.bound_h1 = s2 * h1_norm(v);
    r.bound_0 = s2 * i_norm(v, 0);
    r.bound_1 = s2 * i_norm(v, 1);
    r.worst_margin = std::min({r.bound_h1, r.bound_0, r.bound_1}) - r.max_abs;
    return r;
}

}  // namespace semiheat::forms
