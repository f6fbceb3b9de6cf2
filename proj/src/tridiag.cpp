#include "semiheat/tridiag.hpp"

#include <cmath>

namespace semiheat {

void TriDiag::validate() const {
    const std::size_t m = diag.size();
    const std::size_t off = m > 0 ? m - 1 : 0;
    if (sub.size() != off || super.size() != off) throw std::invalid_argument("TriDiag: inconsistent band lengths");
    for (const auto* band : {&sub, &diag, &super}) {
        for (double v : *band) {
            if (!std::isfinite(v)) throw std::invalid_argument("TriDiag: non-finite entry");
        }
    }
}

std::vector<double> TriDiag::apply(std::span<const double> x) const {
    const std::size_t m = size();
    std::vector<double> y(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double s = diag[i] * x[i];
        if (i > 0) s += sub[i - 1] * x[i - 1];
        if (i + 1 < m) s += super[i] * x[i + 1];
        y[i] = s;
    }
    return y;
}

double TriDiag::at(std::size_t i, std::size_t j) const {
    if (i == j) return diag[i];
    if (j == i + 1) return super[i];
    if (i == j + 1) return sub[j];
    return 0.0;
}

TriDiag TriDiag::shifted(double alpha, double beta) const {
    TriDiag out = *this;
    for (double& v : out.sub) v *= beta;
    for (double& v : out.super) v *= beta;
    for (double& v : out.diag) v = alpha + beta * v;
    return out;
}

std::vector<double> thomas_solve(const TriDiag& a, std::span<const double> rhs) {
    const std::size_t m = a.size();
    if (rhs.size() != m) throw std::invalid_argument("thomas_solve: size mismatch");
    std::vector<double> c(m, 0.0);
    std::vector<double> d(m, 0.0);
    double pivot = a.diag[0];
    if (pivot == 0.0) throw SingularSystemError("thomas_solve: zero pivot in row 0");
    c[0] = m > 1 ? a.super[0] / pivot : 0.0;
    d[0] = rhs[0] / pivot;
    for (std::size_t i = 1; i < m; ++i) {
        pivot = a.diag[i] - a.sub[i - 1] * c[i - 1];
        if (pivot == 0.0 || !std::isfinite(pivot)) {
            throw SingularSystemError("thomas_solve: zero pivot in row " + std::to_string(i));
        }
        c[i] = (i + 1 < m) ? a.super[i] / pivot : 0.0;
        d[i] = (rhs[i] - a.sub[i - 1] * d[i - 1]) / pivot;
    }
    std::vector<double> x(m);
    x[m - 1] = d[m - 1];
    for (std::size_t i = m - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

}  // namespace semiheat
