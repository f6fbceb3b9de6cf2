#include "semiheat/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace semiheat {

GridFunction::GridFunction(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) throw std::invalid_argument("GridFunction needs at least two nodes");
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (!std::isfinite(values_[k])) {
            throw std::invalid_argument("GridFunction value at node " + std::to_string(k) + " is not finite");
        }
    }
}

GridFunction GridFunction::zeros(std::size_t n_cells) { return GridFunction(std::vector<double>(n_cells + 1, 0.0)); }

GridFunction GridFunction::sample(std::size_t n_cells, const std::function<double(double)>& fn) {
    std::vector<double> v(n_cells + 1);
    for (std::size_t k = 0; k <= n_cells; ++k) v[k] = fn(static_cast<double>(k) / static_cast<double>(n_cells));
    return GridFunction(std::move(v));
}

double GridFunction::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::fabs(v));
    return m;
}

namespace {

void require_same(const GridFunction& a, const GridFunction& b) {
    if (a.size() != b.size()) throw std::invalid_argument("grid functions live on different grids");
}

}  // namespace

GridFunction operator-(const GridFunction& a, const GridFunction& b) {
    require_same(a, b);
    std::vector<double> out(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] - b[k];
    return GridFunction(std::move(out));
}

GridFunction operator+(const GridFunction& a, const GridFunction& b) {
    require_same(a, b);
    std::vector<double> out(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] + b[k];
    return GridFunction(std::move(out));
}

GridFunction operator*(double s, const GridFunction& a) {
    std::vector<double> out(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = s * a[k];
    return GridFunction(std::move(out));
}

std::vector<double> time_grid(double T, double dt) {
    if (!(T > 0.0) || !(dt > 0.0)) throw std::invalid_argument("time_grid: T and dt must be positive");
    const double ratio = T / dt;
    auto steps = static_cast<std::size_t>(std::llround(ratio));
    if (std::fabs(ratio - static_cast<double>(steps)) > 1e-9 * std::max(1.0, ratio)) {
        steps = static_cast<std::size_t>(std::ceil(ratio));
    }
    steps = std::max<std::size_t>(steps, 1);
    std::vector<double> times(steps + 1);
    for (std::size_t n = 0; n < steps; ++n) times[n] = static_cast<double>(n) * dt;
    times[steps] = T;
    return times;
}

}  // namespace semiheat
