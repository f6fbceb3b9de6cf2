#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace semiheat {

/// Nodal values on the uniform grid x_k = k/N, k = 0..N.
class GridFunction {
public:
    GridFunction() = default;
    /// Throws std::invalid_argument if fewer than two nodes or any value is not finite.
    explicit GridFunction(std::vector<double> values);

    static GridFunction zeros(std::size_t n_cells);
    static GridFunction sample(std::size_t n_cells, const std::function<double(double)>& fn);

    std::size_t n_cells() const { return values_.empty() ? 0 : values_.size() - 1; }
    std::size_t size() const { return values_.size(); }
    double h() const { return 1.0 / static_cast<double>(n_cells()); }
    double x(std::size_t k) const { return static_cast<double>(k) / static_cast<double>(n_cells()); }

    double operator[](std::size_t k) const { return values_[k]; }
    std::span<const double> values() const { return values_; }
    double front() const { return values_.front(); }
    double back() const { return values_.back(); }

    double max_abs() const;

    friend GridFunction operator-(const GridFunction& a, const GridFunction& b);
    friend GridFunction operator+(const GridFunction& a, const GridFunction& b);
    friend GridFunction operator*(double s, const GridFunction& a);

private:
    std::vector<double> values_;
};

/// Sequence of snapshots (t_n, u(t_n)) from a time-dependent solve.
struct Trajectory {
    std::vector<double> times;
    std::vector<GridFunction> states;
    std::vector<int> inner_iterations;  // per step; empty for the initial snapshot

    std::size_t n_cells() const { return states.empty() ? 0 : states.front().n_cells(); }
    std::size_t size() const { return states.size(); }
    double final_time() const { return times.back(); }
};

/// Snapshot times 0, dt, 2dt, ... up to T; a final shorter step lands exactly on T.
std::vector<double> time_grid(double T, double dt);

}  // namespace semiheat
