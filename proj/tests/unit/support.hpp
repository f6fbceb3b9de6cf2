#pragma once

#include <cmath>
#include <random>
#include <string>

#include "semiheat/config.hpp"
#include "semiheat/grid.hpp"

namespace test {

inline semiheat::config::RunConfig preset(const char* name) { return semiheat::config::load_preset(name); }

struct Data {
    std::string mu = "1";
    std::string f = "0";
    std::string f1 = "0";
    std::string g0 = "0";
    std::string g1 = "0";
    std::string u0 = "0";
    double h0 = 1.0;
    double h1 = 1.0;
    double T = 1.0;
    std::string growth = R"({"C1": 1, "C1prime": 0, "C2": 1, "p": 2, "delta": 1e-6})";
};

inline semiheat::config::RunConfig make(const Data& d) {
    auto q = [](const std::string& s) { return "\"" + s + "\""; };
    const std::string text = R"({"problem": {"mu": )" + q(d.mu) + R"(, "f": )" + q(d.f) + R"(, "f1": )" + q(d.f1) +
                             R"(, "g0": )" + q(d.g0) + R"(, "g1": )" + q(d.g1) + R"(, "u0": )" + q(d.u0) +
                             R"(, "h0": )" + semiheat::expr::format_double(d.h0) + R"(, "h1": )" +
                             semiheat::expr::format_double(d.h1) + R"(, "T": )" + semiheat::expr::format_double(d.T) +
                             R"(, "growth": )" + d.growth + "}}";
    return semiheat::config::parse_config_text(text);
}

inline semiheat::GridFunction random_grid(std::mt19937_64& rng, std::size_t n_cells, double scale = 1.0) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    std::vector<double> v(n_cells + 1);
    for (double& x : v) x = dist(rng);
    return semiheat::GridFunction(std::move(v));
}

inline double rel_diff(double a, double b) { return std::fabs(a - b) / std::max(1.0, std::fabs(b)); }

}  // namespace test
