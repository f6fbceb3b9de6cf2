#pragma once

// Discrete norms, the bilinear form
//   a(t; u, v) = <mu(t) u_x, v_x> + h0 mu(0,t) u(0) v(0) + h1 mu(1,t) u(1) v(1)
// and its continuity/coercivity constants.
//
// L^2 pieces use the composite trapezoid rule; derivative pieces use forward
// differences per cell with mu at the cell midpoint.

#include <cmath>

#include "semiheat/grid.hpp"
#include "semiheat/problem.hpp"

namespace semiheat::forms {

double l2_norm_sq(const GridFunction& v);
double dx_norm_sq(const GridFunction& v);
double lp_norm_p(const GridFunction& v, double p);

inline double l2_norm(const GridFunction& v) { return std::sqrt(l2_norm_sq(v)); }
double h1_norm(const GridFunction& v);
/// ||v||_i = (v(i)^2 + ||v_x||^2)^{1/2}, i in {0, 1}.
double i_norm(const GridFunction& v, int i);

double bilinear_a(double t, const GridFunction& u, const GridFunction& v, const ProblemSpec& spec);
/// ∂a/∂t with mu replaced by its central-difference time derivative.
double da_dt(double t, const GridFunction& u, const GridFunction& v, const ProblemSpec& spec);

struct FormConstants {
    double mu0 = 0.0;
    double a0 = 0.0;        // coercivity
    double aT = 0.0;        // continuity, (1 + 2h0 + 2h1) sup mu
    double aT_tilde = 0.0;  // (1 + 2h0 + 2h1) sup |mu_t|
};

FormConstants form_constants(const ProblemSpec& spec);

struct EmbeddingReport {
    double max_abs = 0.0;
    double bound_h1 = 0.0;  // sqrt(2) ||v||_H1
    double bound_0 = 0.0;   // sqrt(2) ||v||_0
    double bound_1 = 0.0;   // sqrt(2) ||v||_1
    double worst_margin = 0.0;
};

EmbeddingReport sup_norm_embedding_check(const GridFunction& v);

}  // namespace semiheat::forms
