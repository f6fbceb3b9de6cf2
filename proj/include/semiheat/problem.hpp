#pragma once

// Problem definitions for u_t - (mu u_x)_x + f(u) = f1 on (0,1) x (0,T) with
//   u_x(0,t) = h0 u(0,t) + g0(t),   -u_x(1,t) = h1 u(1,t) + g1(t),
// plus sample-based checking of the standing hypotheses.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "semiheat/expr.hpp"

namespace semiheat {

/// Variables each coefficient may reference.
namespace roles {
inline constexpr expr::VarSet mu{expr::Var::x, expr::Var::t};
inline constexpr expr::VarSet f{expr::Var::u};
inline constexpr expr::VarSet f1{expr::Var::x, expr::Var::t};
inline constexpr expr::VarSet g{expr::Var::t};
inline constexpr expr::VarSet u0{expr::Var::x};
inline constexpr expr::VarSet exact{expr::Var::x, expr::Var::t};
inline constexpr expr::VarSet steady{expr::Var::x};
inline constexpr expr::VarSet constant{};
}  // namespace roles

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(double achieved, double requested);
    double achieved() const { return achieved_; }

private:
    double achieved_;
};

struct GrowthBounds {
    double C1 = 1.0;
    double C1prime = 0.0;
    double C2 = 1.0;
    double p = 2.0;
    double delta = 1e-6;  // monotonicity shift: (y-z)(f(y)-f(z)) >= -delta |y-z|^2

    /// Throws std::invalid_argument unless C1 > 0, C1' >= 0, C2 > 0, p > 1, delta > 0.
    void validate() const;
};

struct CoefficientField {
    expr::Expr expr;
    double mu0 = 0.0;  // lower bound, supplied or sampled

    double operator()(double x, double t) const { return expr.eval({x, t, 0.0}); }
    bool time_dependent() const { return expr.depends_on(expr::Var::t); }
};

/// f(u) together with its growth constants. λ0 and m0 are computed once.
class ScalarNonlinearity {
public:
    ScalarNonlinearity() = default;
    ScalarNonlinearity(expr::Expr f, GrowthBounds growth);

    double operator()(double u) const { return f_.eval({0.0, 0.0, u}); }
    const expr::Expr& expr() const { return f_; }
    const GrowthBounds& growth() const { return growth_; }
    bool is_linear_free() const { return !f_.depends_on(expr::Var::u); }

    double lambda0() const { return lambda0_; }
    double m0() const { return m0_; }

private:
    expr::Expr f_;
    GrowthBounds growth_;
    double lambda0_ = 0.0;
    double m0_ = 0.0;
};

struct BoundaryData {
    double h0 = 0.0;
    double h1 = 0.0;
    expr::Expr g0;
    expr::Expr g1;
};

struct ProblemSpec {
    CoefficientField mu;
    ScalarNonlinearity f;
    expr::Expr f1;
    BoundaryData boundary;
    expr::Expr u0;
    double T = 1.0;

    double mu_at(double x, double t) const { return mu(x, t); }
    double f_at(double u) const { return f(u); }
    double f1_at(double x, double t) const { return f1.eval({x, t, 0.0}); }
    double g0_at(double t) const { return boundary.g0.eval({0.0, t, 0.0}); }
    double g1_at(double t) const { return boundary.g1.eval({0.0, t, 0.0}); }
    double u0_at(double x) const { return u0.eval({x, 0.0, 0.0}); }
};

struct AsymptoticLimits {
    expr::Expr mu_inf;
    expr::Expr f1_inf;
    double g0_inf = 0.0;
    double g1_inf = 0.0;
    double gamma1 = 1.0;
    double Cexp = 1.0;  // constant of the exponential envelopes

    double mu_inf_at(double x) const { return mu_inf.eval({x, 0.0, 0.0}); }
    double f1_inf_at(double x) const { return f1_inf.eval({x, 0.0, 0.0}); }
};

// ---------------------------------------------------------------------------
// Sampling

/// 0 and ±500 log-spaced magnitudes in [1e-3, 1e3], ascending (1001 values).
const std::vector<double>& u_samples();

/// n uniformly spaced points on [a, b], inclusive.
std::vector<double> linspace(double a, double b, std::size_t n);

inline constexpr std::size_t lattice_points = 101;

/// Minimum of mu over the 101 x 101 (x,t) lattice on [0,1] x [0,T].
double sample_mu0(const expr::Expr& mu, double T);

/// a0(mu0, h0, h1): coercivity constant of the bilinear form.
double coercivity_constant(double mu0, double h0, double h1);

// ---------------------------------------------------------------------------
// Hypotheses

enum class HypothesisFamily {
    existence,    // (H1)-(H7)
    boundedness,  // (H1'), (H2'), (H3), (H4), (H5'), (H6')
    asymptotic,   // (H1), (H2), (H6), (H3'')-(H7'')
};

enum class Verdict { satisfied, violated, not_checkable };

std::string_view verdict_name(Verdict v);

struct HypothesisResult {
    std::string id;  // e.g. "H5'"
    std::string statement;
    Verdict verdict = Verdict::satisfied;
    std::string detail;
    std::optional<expr::Point> witness;
};

struct HypothesisReport {
    HypothesisFamily family;
    std::vector<HypothesisResult> results;

    bool all_satisfied() const;
    bool any_violated() const;
    std::vector<std::string> violated_ids() const;
    const HypothesisResult* find(std::string_view id) const;
};

HypothesisReport validate_hypotheses(const ProblemSpec& spec, const std::optional<AsymptoticLimits>& limits,
                                     HypothesisFamily family);

// ---------------------------------------------------------------------------
// Potential and growth audit

/// f̄(z) = ∫_0^z f(y) dy by adaptive Gauss-Kronrod quadrature.
double potential(const ScalarNonlinearity& f, double z);

/// ∫_a^b f(y) dy; the building block of `potential`.
double integrate_f(const ScalarNonlinearity& f, double a, double b);

struct MarginCheck {
    std::string name;
    bool pass = true;
    double worst_margin = 0.0;  // min over samples of (rhs slack); negative means violated
    double witness = 0.0;       // sample attaining the worst margin
};

struct AuditResult {
    bool pass = true;
    std::vector<MarginCheck> checks;

    const MarginCheck* find(std::string_view name) const;
};

/// Checks u f(u) >= C1|u|^p - C1', |f(u)| <= C2(1+|u|^{p-1}) and
/// -m0 <= f̄(z) <= C2(|z| + |z|^p/p) over the u sample set.
AuditResult growth_audit(const ScalarNonlinearity& f);

}  // namespace semiheat
