#include "semiheat/problem.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace semiheat {

using expr::Point;

QuadratureError::QuadratureError(double achieved, double requested)
    : std::runtime_error("quadrature did not converge: achieved error " + expr::format_double(achieved) +
                         ", requested " + expr::format_double(requested)),
      achieved_(achieved) {}

void GrowthBounds::validate() const {
    if (!(C1 > 0.0)) throw std::invalid_argument("growth bound C1 must be > 0");
    if (!(C1prime >= 0.0)) throw std::invalid_argument("growth bound C1prime must be >= 0");
    if (!(C2 > 0.0)) throw std::invalid_argument("growth bound C2 must be > 0");
    if (!(p > 1.0)) throw std::invalid_argument("growth exponent p must be > 1");
    if (!(delta > 0.0)) throw std::invalid_argument("monotonicity shift delta must be > 0");
}

ScalarNonlinearity::ScalarNonlinearity(expr::Expr f, GrowthBounds growth) : f_(std::move(f)), growth_(growth) {
    growth_.validate();
    lambda0_ = std::pow(growth_.C1prime / growth_.C1, 1.0 / growth_.p);
    if (lambda0_ > 0.0) {
        namespace bq = boost::math::quadrature;
        double err = 0.0;
        auto absf = [this](double y) { return std::fabs((*this)(y)); };
        m0_ = bq::gauss_kronrod<double, 15>::integrate(absf, -lambda0_, lambda0_, 10, 1e-12, &err);
    }
}

// ---------------------------------------------------------------------------
// Sampling

const std::vector<double>& u_samples() {
    static const std::vector<double> samples = [] {
        constexpr int n = 500;
        std::vector<double> mags(n);
        for (int i = 0; i < n; ++i) mags[i] = std::pow(10.0, -3.0 + 6.0 * i / (n - 1));
        std::vector<double> out;
        out.reserve(2 * n + 1);
        for (int i = n - 1; i >= 0; --i) out.push_back(-mags[i]);
        out.push_back(0.0);
        for (int i = 0; i < n; ++i) out.push_back(mags[i]);
        return out;
    }();
    return samples;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = a;
        return out;
    }
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = (i + 1 == n) ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return out;
}

double sample_mu0(const expr::Expr& mu, double T) {
    double lo = std::numeric_limits<double>::infinity();
    for (double t : linspace(0.0, T, lattice_points)) {
        for (double x : linspace(0.0, 1.0, lattice_points)) lo = std::min(lo, mu.eval({x, t, 0.0}));
    }
    return lo;
}

double coercivity_constant(double mu0, double h0, double h1) {
    if (h0 > 0.0) return mu0 * std::min(h0, 0.5);
    return mu0 * std::min(h1, 0.5);
}

// ---------------------------------------------------------------------------
// Potential

namespace {

constexpr double potential_abs_tol = 1e-10;

}  // namespace

double integrate_f(const ScalarNonlinearity& f, double a, double b) {
    if (a == b) return 0.0;
    if (a < 0.0 && b > 0.0) return integrate_f(f, a, 0.0) + integrate_f(f, 0.0, b);
    namespace bq = boost::math::quadrature;
    double err = 0.0;
    double l1 = 0.0;
    double value = 0.0;
    if (a == 0.0 || b == 0.0) {
        // f is typically non-smooth at 0; tanh-sinh handles endpoint singularities.
        static bq::tanh_sinh<double> ts;
        value = ts.integrate([&f](double y) { return f(y); }, a, b, 1e-12, &err, &l1);
    } else {
        value = bq::gauss_kronrod<double, 15>::integrate(f, a, b, 10, 1e-12, &err, &l1);
    }
    // For large |z| the integral itself exceeds 1e10 and an absolute 1e-10 is
    // below double resolution; accept errors at the level of rounding.
    const double allowed = std::max(potential_abs_tol, 64.0 * std::numeric_limits<double>::epsilon() * l1);
    if (!(err <= allowed)) throw QuadratureError(err, allowed);
    return value;
}

double potential(const ScalarNonlinearity& f, double z) { return integrate_f(f, 0.0, z); }

// ---------------------------------------------------------------------------
// Growth audit

const MarginCheck* AuditResult::find(std::string_view name) const {
    for (const auto& c : checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

namespace {

struct MarginTracker {
    MarginCheck check;
    explicit MarginTracker(std::string name) {
        check.name = std::move(name);
        check.worst_margin = std::numeric_limits<double>::infinity();
    }
    // margin = rhs_slack; tolerance scales with the size of the compared terms
    void observe(double at, double margin, double scale) {
        const double tol = 1e-9 * (1.0 + std::fabs(scale));
        const double normalized = margin / (1.0 + std::fabs(scale));
        if (margin < -tol) check.pass = false;
        if (normalized < check.worst_margin) {
            check.worst_margin = normalized;
            check.witness = at;
        }
    }
    void fail_at(double at) {
        check.pass = false;
        check.worst_margin = -std::numeric_limits<double>::infinity();
        check.witness = at;
    }
};

}  // namespace

AuditResult growth_audit(const ScalarNonlinearity& f) {
    const GrowthBounds& g = f.growth();
    const auto& us = u_samples();

    MarginTracker coercive("uf(u) >= C1|u|^p - C1'");
    MarginTracker bounded("|f(u)| <= C2(1+|u|^(p-1))");
    MarginTracker sandwich("-m0 <= fbar(z) <= C2(|z|+|z|^p/p)");

    std::vector<double> fu(us.size(), 0.0);
    for (std::size_t i = 0; i < us.size(); ++i) {
        const double u = us[i];
        try {
            fu[i] = f(u);
        } catch (const expr::EvalError&) {
            coercive.fail_at(u);
            bounded.fail_at(u);
            continue;
        }
        const double au = std::fabs(u);
        const double lhs1 = u * fu[i];
        const double rhs1 = g.C1 * std::pow(au, g.p) - g.C1prime;
        coercive.observe(u, lhs1 - rhs1, std::max(std::fabs(lhs1), std::fabs(rhs1)));
        const double rhs2 = g.C2 * (1.0 + std::pow(au, g.p - 1.0));
        bounded.observe(u, rhs2 - std::fabs(fu[i]), rhs2);
    }

    // f̄ on the sample set, accumulated outward from z = 0 segment by segment.
    const std::size_t zero = us.size() / 2;
    std::vector<double> fbar(us.size(), 0.0);
    try {
        for (std::size_t i = zero + 1; i < us.size(); ++i) fbar[i] = fbar[i - 1] + integrate_f(f, us[i - 1], us[i]);
        for (std::size_t i = zero; i-- > 0;) fbar[i] = fbar[i + 1] - integrate_f(f, us[i], us[i + 1]);
        for (std::size_t i = 0; i < us.size(); ++i) {
            const double z = us[i];
            const double az = std::fabs(z);
            const double upper = g.C2 * (az + std::pow(az, g.p) / g.p);
            const double scale = std::max(upper, std::fabs(fbar[i]));
            sandwich.observe(z, std::min(fbar[i] + f.m0(), upper - fbar[i]), scale);
        }
    } catch (const std::exception&) {
        sandwich.fail_at(std::numeric_limits<double>::quiet_NaN());
    }

    AuditResult out;
    out.checks = {coercive.check, bounded.check, sandwich.check};
    out.pass = coercive.check.pass && bounded.check.pass && sandwich.check.pass;
    return out;
}

// ---------------------------------------------------------------------------
// Hypotheses

std::string_view verdict_name(Verdict v) {
    switch (v) {
        case Verdict::satisfied: return "satisfied";
        case Verdict::violated: return "violated";
        case Verdict::not_checkable: return "not_checkable";
    }
    return "?";
}

bool HypothesisReport::all_satisfied() const {
    return std::all_of(results.begin(), results.end(),
                       [](const HypothesisResult& r) { return r.verdict == Verdict::satisfied; });
}

bool HypothesisReport::any_violated() const {
    return std::any_of(results.begin(), results.end(),
                       [](const HypothesisResult& r) { return r.verdict == Verdict::violated; });
}

std::vector<std::string> HypothesisReport::violated_ids() const {
    std::vector<std::string> ids;
    for (const auto& r : results) {
        if (r.verdict == Verdict::violated) ids.push_back(r.id);
    }
    return ids;
}

const HypothesisResult* HypothesisReport::find(std::string_view id) const {
    for (const auto& r : results) {
        if (r.id == id) return &r;
    }
    return nullptr;
}

namespace {

std::string fmt(double v) { return expr::format_double(v); }

HypothesisResult make(std::string id, std::string statement) {
    HypothesisResult r;
    r.id = std::move(id);
    r.statement = std::move(statement);
    r.detail = "sample-based check";
    return r;
}

void violate(HypothesisResult& r, std::string detail, std::optional<Point> witness = std::nullopt) {
    if (r.verdict == Verdict::violated) return;  // keep the first witness
    r.verdict = Verdict::violated;
    r.detail = std::move(detail);
    r.witness = witness;
}

/// Visits the (x,t) lattice; a visitor returning false stops the sweep.
void for_lattice(double T, const std::function<bool(double, double)>& visit) {
    const auto xs = linspace(0.0, 1.0, lattice_points);
    const auto ts = linspace(0.0, T, lattice_points);
    for (double t : ts) {
        for (double x : xs) {
            if (!visit(x, t)) return;
        }
    }
}

/// Evaluates `e` on the lattice, reporting the first failure or non-finite value.
void require_finite_on_lattice(HypothesisResult& r, const expr::Expr& e, double T, const char* label) {
    for_lattice(T, [&](double x, double t) {
        try {
            const double v = e.eval({x, t, 0.0});
            if (!std::isfinite(v)) {
                violate(r, std::string(label) + " is not finite", Point{x, t, 0.0});
                return false;
            }
        } catch (const expr::EvalError& err) {
            violate(r, std::string(label) + ": " + err.what(), Point{x, t, 0.0});
            return false;
        }
        return true;
    });
}

HypothesisResult check_h1(const ProblemSpec& spec) {
    auto r = make("H1", "h0 >= 0, h1 >= 0, h0 + h1 > 0");
    const double h0 = spec.boundary.h0;
    const double h1 = spec.boundary.h1;
    r.detail = "h0 = " + fmt(h0) + ", h1 = " + fmt(h1) + ", h0 + h1 = " + fmt(h0 + h1);
    if (!(h0 >= 0.0 && h1 >= 0.0 && h0 + h1 > 0.0)) violate(r, r.detail);
    return r;
}

HypothesisResult check_h1_strict(const ProblemSpec& spec) {
    auto r = make("H1'", "h0 > 0 and h1 > 0");
    r.detail = "h0 = " + fmt(spec.boundary.h0) + ", h1 = " + fmt(spec.boundary.h1);
    if (!(spec.boundary.h0 > 0.0 && spec.boundary.h1 > 0.0)) violate(r, r.detail);
    return r;
}

/// Returns sup |u0| over the x lattice, or NaN when u0 cannot be evaluated.
double u0_sup(const ProblemSpec& spec, HypothesisResult& r) {
    double sup = 0.0;
    for (double x : linspace(0.0, 1.0, lattice_points)) {
        try {
            const double v = spec.u0_at(x);
            if (!std::isfinite(v)) {
                violate(r, "u0 is not finite", Point{x, 0.0, 0.0});
                return std::numeric_limits<double>::quiet_NaN();
            }
            sup = std::max(sup, std::fabs(v));
        } catch (const expr::EvalError& err) {
            violate(r, std::string("u0: ") + err.what(), Point{x, 0.0, 0.0});
            return std::numeric_limits<double>::quiet_NaN();
        }
    }
    return sup;
}

HypothesisResult check_h2(const ProblemSpec& spec, bool bounded) {
    auto r = bounded ? make("H2'", "u0 in L^inf") : make("H2", "u0 in L^2");
    const double sup = u0_sup(spec, r);
    if (r.verdict == Verdict::satisfied) r.detail = "sampled sup|u0| = " + fmt(sup);
    return r;
}

HypothesisResult check_h3(const ProblemSpec& spec, bool infinite_horizon) {
    auto r = infinite_horizon ? make("H3''", "g0, g1 in W^{1,1}(R+)") : make("H3", "g0, g1 in W^{1,1}(0,T)");
    for (double t : linspace(0.0, spec.T, lattice_points)) {
        for (const auto* g : {&spec.boundary.g0, &spec.boundary.g1}) {
            const char* label = (g == &spec.boundary.g0) ? "g0" : "g1";
            try {
                const double v = g->eval({0.0, t, 0.0});
                const double dv = expr::numeric_partial(*g, expr::Var::t, {0.0, t, 0.0});
                if (!std::isfinite(v) || !std::isfinite(dv)) {
                    violate(r, std::string(label) + " or its derivative is not finite", Point{0.0, t, 0.0});
                }
            } catch (const expr::EvalError& err) {
                violate(r, std::string(label) + ": " + err.what(), Point{0.0, t, 0.0});
            }
        }
    }
    if (r.verdict == Verdict::satisfied) {
        r.detail = infinite_horizon ? "g and g' finite on sampled [0,T]; decay checked by H6''"
                                    : "g and g' finite on sampled [0,T]";
    }
    return r;
}

HypothesisResult check_h4(const ProblemSpec& spec, bool infinite_horizon) {
    auto r = infinite_horizon ? make("H4''", "mu in C^1([0,1] x R+), mu >= mu0 > 0")
                              : make("H4", "mu in C^1([0,1] x [0,T]), mu >= mu0 > 0");
    const double mu0 = spec.mu.mu0;
    if (!(mu0 > 0.0)) {
        violate(r, "mu0 = " + fmt(mu0) + " is not positive");
        return r;
    }
    double lo = std::numeric_limits<double>::infinity();
    for_lattice(spec.T, [&](double x, double t) {
        try {
            const Point p{x, t, 0.0};
            const double v = spec.mu.expr.eval(p);
            const double dx = expr::numeric_partial(spec.mu.expr, expr::Var::x, p);
            const double dt = expr::numeric_partial(spec.mu.expr, expr::Var::t, p);
            lo = std::min(lo, v);
            if (!std::isfinite(dx) || !std::isfinite(dt)) {
                violate(r, "mu is not C^1", p);
                return false;
            }
            if (v < mu0 * (1.0 - 1e-12)) {
                violate(r, "mu = " + fmt(v) + " < mu0 = " + fmt(mu0), p);
                return false;
            }
        } catch (const expr::EvalError& err) {
            violate(r, std::string("mu: ") + err.what(), Point{x, t, 0.0});
            return false;
        }
        return true;
    });
    if (r.verdict == Verdict::satisfied) r.detail = "sampled min mu = " + fmt(lo) + " >= mu0 = " + fmt(mu0);
    return r;
}

HypothesisResult check_h5(const ProblemSpec& spec) {
    auto r = make("H5", "f1 in L^1(0,T;L^2)");
    require_finite_on_lattice(r, spec.f1, spec.T, "f1");
    return r;
}

HypothesisResult check_h5_nonpositive(const ProblemSpec& spec) {
    auto r = make("H5'", "f1 in L^2(Q_T), f1 <= 0");
    double worst = -std::numeric_limits<double>::infinity();
    Point at{};
    for_lattice(spec.T, [&](double x, double t) {
        try {
            const double v = spec.f1_at(x, t);
            if (!std::isfinite(v)) {
                violate(r, "f1 is not finite", Point{x, t, 0.0});
                return false;
            }
            if (v > worst) {
                worst = v;
                at = Point{x, t, 0.0};
            }
        } catch (const expr::EvalError& err) {
            violate(r, std::string("f1: ") + err.what(), Point{x, t, 0.0});
            return false;
        }
        return true;
    });
    if (r.verdict == Verdict::satisfied) {
        if (worst > 0.0) {
            violate(r, "f1(" + fmt(at.x) + ", " + fmt(at.t) + ") = " + fmt(worst) + " > 0", at);
        } else {
            r.detail = "sampled max f1 = " + fmt(worst);
        }
    }
    return r;
}

HypothesisResult check_h5_bounded(const ProblemSpec& spec) {
    auto r = make("H5''", "f1 in L^inf(0,inf;L^2)");
    require_finite_on_lattice(r, spec.f1, spec.T, "f1");
    if (r.verdict == Verdict::satisfied) r.detail = "f1 finite on sampled [0,1] x [0,T]";
    return r;
}

HypothesisResult check_h6(const ProblemSpec& spec) {
    auto r = make("H6", "uf(u) >= C1|u|^p - C1', |f(u)| <= C2(1+|u|^(p-1))");
    const AuditResult audit = growth_audit(spec.f);
    for (const auto& c : audit.checks) {
        if (!c.pass) violate(r, c.name + " fails (normalized margin " + fmt(c.worst_margin) + ")", Point{0, 0, c.witness});
    }
    return r;
}

HypothesisResult check_h7(const ProblemSpec& spec) {
    auto r = make("H7", "(y-z)(f(y)-f(z)) >= -delta |y-z|^2");
    const double delta = spec.f.growth().delta;
    const auto& us = u_samples();
    std::vector<double> fu(us.size());
    try {
        for (std::size_t i = 0; i < us.size(); ++i) fu[i] = spec.f_at(us[i]);
    } catch (const expr::EvalError& err) {
        violate(r, std::string("f: ") + err.what());
        return r;
    }
    for (std::size_t i = 0; i < us.size(); ++i) {
        for (std::size_t j = i + 1; j < us.size(); ++j) {
            const double dy = us[j] - us[i];
            const double df = fu[j] - fu[i];
            const double lhs = dy * df;
            const double rhs = -delta * dy * dy;
            if (lhs < rhs - 1e-9 * (1.0 + std::fabs(lhs) + std::fabs(rhs))) {
                violate(r, "fails for y = " + fmt(us[j]) + ", z = " + fmt(us[i]), Point{0, 0, us[j]});
                return r;
            }
        }
    }
    r.detail = "all sample pairs satisfy the bound with delta = " + fmt(delta);
    return r;
}

HypothesisResult check_h6_bounded(const ProblemSpec& spec) {
    auto r = make("H6'", "H6, H7 and uf(u) >= 0 for |u| >= ||u0||_inf");
    if (check_h6(spec).verdict == Verdict::violated) violate(r, "H6 is violated");
    if (check_h7(spec).verdict == Verdict::violated) violate(r, "H7 is violated");
    HypothesisResult scratch = make("", "");
    const double sup = u0_sup(spec, scratch);
    if (std::isnan(sup)) {
        violate(r, "u0 cannot be sampled");
        return r;
    }
    for (double u : u_samples()) {
        if (std::fabs(u) < sup) continue;
        try {
            if (u * spec.f_at(u) < 0.0) {
                violate(r, "uf(u) < 0 at u = " + fmt(u), Point{0, 0, u});
                break;
            }
        } catch (const expr::EvalError& err) {
            violate(r, std::string("f: ") + err.what(), Point{0, 0, u});
            break;
        }
    }
    return r;
}

HypothesisResult check_h6_limits(const ProblemSpec& spec, const std::optional<AsymptoticLimits>& limits) {
    auto r = make("H6''", "exponential approach of g0, g1, mu, f1 to their limits");
    if (!limits) {
        r.verdict = Verdict::not_checkable;
        r.detail = "no asymptotic limits supplied";
        return r;
    }
    const auto& lim = *limits;
    const auto ts = linspace(0.0, spec.T, lattice_points);
    const auto xs = linspace(0.0, 1.0, lattice_points);
    const double hx = 1.0 / static_cast<double>(lattice_points - 1);
    try {
        for (double x : xs) {
            const double v = lim.mu_inf_at(x);
            if (!(v >= spec.mu.mu0 * (1.0 - 1e-12)) || !(spec.mu.mu0 > 0.0)) {
                violate(r, "mu_inf = " + fmt(v) + " < mu0", Point{x, 0, 0});
                return r;
            }
        }
        for (double t : ts) {
            const double env = lim.Cexp * std::exp(-lim.gamma1 * t);
            const double slack = 1e-12 * (1.0 + env);
            if (std::fabs(spec.g0_at(t) - lim.g0_inf) > env + slack) {
                violate(r, "(i) |g0(t) - g0_inf| exceeds envelope", Point{0, t, 0});
                return r;
            }
            if (std::fabs(spec.g1_at(t) - lim.g1_inf) > env + slack) {
                violate(r, "(ii) |g1(t) - g1_inf| exceeds envelope", Point{0, t, 0});
                return r;
            }
            double mu_dev = 0.0;
            double f1_sq = 0.0;
            for (std::size_t k = 0; k < xs.size(); ++k) {
                const double x = xs[k];
                mu_dev = std::max(mu_dev, std::fabs(spec.mu_at(x, t) - lim.mu_inf_at(x)));
                const double d = spec.f1_at(x, t) - lim.f1_inf_at(x);
                const double w = (k == 0 || k + 1 == xs.size()) ? 0.5 : 1.0;
                f1_sq += w * hx * d * d;
            }
            if (mu_dev > env + slack) {
                violate(r, "(iii) ||mu(t) - mu_inf||_inf exceeds envelope", Point{0, t, 0});
                return r;
            }
            if (std::sqrt(f1_sq) > env + slack) {
                violate(r, "(iv) ||f1(t) - f1_inf|| exceeds envelope", Point{0, t, 0});
                return r;
            }
        }
    } catch (const expr::EvalError& err) {
        violate(r, err.what());
        return r;
    }
    r.detail = "envelope Cexp e^{-gamma1 t} with Cexp = " + fmt(lim.Cexp) + ", gamma1 = " + fmt(lim.gamma1) +
               " holds on sampled [0,T]";
    return r;
}

HypothesisResult check_h7_limits(const ProblemSpec& spec) {
    auto r = make("H7''", "f(u) + delta u nondecreasing, 0 < delta < a0");
    const double delta = spec.f.growth().delta;
    const double a0 = coercivity_constant(spec.mu.mu0, spec.boundary.h0, spec.boundary.h1);
    if (!(delta < a0)) violate(r, "delta = " + fmt(delta) + " is not below a0 = " + fmt(a0));
    const auto& us = u_samples();
    try {
        double prev = spec.f_at(us[0]) + delta * us[0];
        for (std::size_t i = 1; i < us.size(); ++i) {
            const double cur = spec.f_at(us[i]) + delta * us[i];
            if (cur < prev - 1e-12 * (1.0 + std::fabs(prev))) {
                violate(r, "f(u) + delta u decreases at u = " + fmt(us[i]), Point{0, 0, us[i]});
                break;
            }
            prev = cur;
        }
    } catch (const expr::EvalError& err) {
        violate(r, std::string("f: ") + err.what());
    }
    if (r.verdict == Verdict::satisfied) r.detail = "delta = " + fmt(delta) + " < a0 = " + fmt(a0);
    return r;
}

}  // namespace

HypothesisReport validate_hypotheses(const ProblemSpec& spec, const std::optional<AsymptoticLimits>& limits,
                                     HypothesisFamily family) {
    HypothesisReport report{family, {}};
    auto& out = report.results;
    switch (family) {
        case HypothesisFamily::existence:
            out.push_back(check_h1(spec));
            out.push_back(check_h2(spec, false));
            out.push_back(check_h3(spec, false));
            out.push_back(check_h4(spec, false));
            out.push_back(check_h5(spec));
            out.push_back(check_h6(spec));
            out.push_back(check_h7(spec));
            break;
        case HypothesisFamily::boundedness:
            out.push_back(check_h1_strict(spec));
            out.push_back(check_h2(spec, true));
            out.push_back(check_h3(spec, false));
            out.push_back(check_h4(spec, false));
            out.push_back(check_h5_nonpositive(spec));
            out.push_back(check_h6_bounded(spec));
            break;
        case HypothesisFamily::asymptotic:
            out.push_back(check_h1(spec));
            out.push_back(check_h2(spec, false));
            out.push_back(check_h6(spec));
            out.push_back(check_h3(spec, true));
            out.push_back(check_h4(spec, true));
            out.push_back(check_h5_bounded(spec));
            out.push_back(check_h6_limits(spec, limits));
            out.push_back(check_h7_limits(spec));
            break;
    }
    return report;
}

}  // namespace semiheat
