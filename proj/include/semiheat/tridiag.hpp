#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace semiheat {

/// Base class for numerical failures inside a solve (CLI exit code 3).
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SingularSystemError : public SolverError {
public:
    using SolverError::SolverError;
};

class NonConvergenceError : public SolverError {
public:
    NonConvergenceError(const std::string& what, double last_residual, int iterations)
        : SolverError(what), last_residual_(last_residual), iterations_(iterations) {}
    double last_residual() const { return last_residual_; }
    int iterations() const { return iterations_; }

private:
    double last_residual_;
    int iterations_;
};

/// Tridiagonal matrix: row k is sub[k-1], diag[k], super[k].
struct TriDiag {
    std::vector<double> sub;
    std::vector<double> diag;
    std::vector<double> super;

    TriDiag() = default;
    explicit TriDiag(std::size_t m) : sub(m > 0 ? m - 1 : 0, 0.0), diag(m, 0.0), super(m > 0 ? m - 1 : 0, 0.0) {}

    std::size_t size() const { return diag.size(); }
    bool is_symmetric() const { return sub == super; }

    /// Throws std::invalid_argument on inconsistent lengths or non-finite entries.
    void validate() const;

    std::vector<double> apply(std::span<const double> x) const;
    double at(std::size_t i, std::size_t j) const;

    /// alpha * I + beta * this
    TriDiag shifted(double alpha, double beta) const;
};

/// Thomas algorithm; throws SingularSystemError on a zero pivot.
std::vector<double> thomas_solve(const TriDiag& a, std::span<const double> rhs);

}  // namespace semiheat
