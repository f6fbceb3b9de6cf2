#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "semiheat/commands.hpp"
#include "support.hpp"

using namespace semiheat;
using namespace semiheat::cli;

namespace {
std::vector<std::vector<double>> parse_csv(const std::string& csv, std::string& header) {
    std::istringstream in(csv);
    std::getline(in, header);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}
}  // namespace

TEST_CASE("check names") {
    CHECK(parse_checks("error, decay,energy").size() == 3);
    CHECK(parse_checks("bound,bound").size() == 1);
    CHECK_THROWS_AS(parse_checks("bound,speed"), config::ConfigError);
    CHECK_THROWS_AS(parse_checks(""), config::ConfigError);
    for (Check c : all_checks()) CHECK(parse_checks(check_name(c)).front() == c);
}

TEST_CASE("overrides") {
    auto cfg = test::preset("paper-sec6");
    Overrides o;
    o.nx = 10;
    o.tmax = 1.0;
    o.method = config::Method::galerkin;
    apply_overrides(cfg, o);
    CHECK(cfg.nx == 10);
    CHECK(cfg.spec.T == 1.0);
    CHECK(cfg.method == config::Method::galerkin);
    Overrides bad;
    bad.nx = 1;
    CHECK_THROWS_AS(apply_overrides(cfg, bad), config::ConfigError);
    Overrides neg;
    neg.tmax = -1.0;
    CHECK_THROWS_AS(apply_overrides(cfg, neg), config::ConfigError);
}

TEST_CASE("solve surface csv") {
    const CommandResult r = solve(test::preset("paper-sec6"));
    CHECK(r.exit_code == exit_ok);
    std::string header;
    const auto rows = parse_csv(r.csv, header);
    CHECK(header == "x,t,u");
    CHECK(rows.size() == 906);
    CHECK(r.csv.find('\r') == std::string::npos);
    CHECK(r.csv.back() == '\n');
    CHECK(rows[0] == std::vector<double>{0.0, 0.0, 2.0});
    CHECK(rows[5][0] == 1.0);
    CHECK(rows[6][1] == 0.02);
    CHECK(rows.back()[1] == 3.0);
    CHECK(r.report.at("rows") == 906);
}

TEST_CASE("csv round trip") {
    const auto cfg = test::preset("paper-sec6");
    const Trajectory tr = run_trajectory(cfg);
    std::string header;
    const auto rows = parse_csv(surface_csv(tr), header);
    std::size_t i = 0;
    for (std::size_t n = 0; n < tr.size(); ++n) {
        for (std::size_t k = 0; k < tr.states[n].size(); ++k, ++i) {
            CHECK(rows[i][0] == tr.states[n].x(k));
            CHECK(rows[i][1] == tr.times[n]);
            CHECK(rows[i][2] == tr.states[n][k]);
        }
    }
}

TEST_CASE("determinism") {
    const auto cfg = test::preset("paper-sec6");
    std::ostringstream a, b, ea, eb;
    CHECK(cmd_solve(cfg, a, ea) == exit_ok);
    CHECK(cmd_solve(cfg, b, eb) == exit_ok);
    CHECK(a.str() == b.str());
    CHECK(a.str().size() > 0);
}

TEST_CASE("zero preset") {
    const CommandResult r = solve(test::preset("zero"));
    std::string header;
    for (const auto& row : parse_csv(r.csv, header)) CHECK(row[2] == 0.0);
    const CommandResult s = steady(test::preset("zero"));
    for (const auto& row : parse_csv(s.csv, header)) CHECK(row[1] == 0.0);
    CHECK(header == "x,u_inf");
}

TEST_CASE("steady output") {
    auto cfg = test::preset("paper-sec6");
    cfg.nx = 160;
    const CommandResult r = steady(cfg);
    std::string header;
    const auto rows = parse_csv(r.csv, header);
    REQUIRE(rows.size() == 161);
    CHECK(std::fabs(rows.back()[1] - std::exp(1.0)) <= 2e-2);
    CHECK(r.report.at("residual").get<double>() <= 1e-10);

    cfg.method = config::Method::galerkin;
    const CommandResult g = steady(cfg);
    CHECK(g.report.at("uniqueness_guaranteed") == true);

    auto no_limits = test::preset("bound-demo");
    std::ostringstream out, err;
    CHECK(cmd_steady(no_limits, out, err) == exit_config);
    CHECK(err.str().find(".asymptotic") != std::string::npos);
}

TEST_CASE("verify on the paper-sec6 preset") {
    const auto cfg = test::preset("paper-sec6");
    const CommandResult r = verify(cfg, {Check::error, Check::decay, Check::energy});
    CHECK(r.exit_code == exit_ok);
    CHECK(r.report.at("pass") == true);

    const CommandResult b = verify(cfg, {Check::bound});
    CHECK(b.exit_code == exit_ok);
    CHECK(b.report.at("checks").at("bound").at("verdict") == "hypotheses not satisfied: (H5')");
    CHECK(b.report.at("checks").at("bound").at("status") == "hypotheses_not_satisfied");
}

TEST_CASE("verify on the bound demo") {
    const CommandResult r = verify(test::preset("bound-demo"), {Check::bound});
    CHECK(r.exit_code == exit_ok);
    CHECK(r.report.at("checks").at("bound").at("pass") == true);
    CHECK(r.report.at("checks").at("bound").at("M_star") == 1.0);
}

TEST_CASE("failing checks exit with 4") {
    auto cfg = test::preset("paper-sec6");
    cfg.verify.error_tol = 1e-6;
    std::ostringstream out, err;
    CHECK(cmd_verify(cfg, {Check::error}, out, err) == exit_check);
    CHECK(err.str().find("error") != std::string::npos);
}

TEST_CASE("missing inputs are config errors") {
    std::ostringstream out, err;
    CHECK(cmd_verify(test::preset("bound-demo"), {Check::error}, out, err) == exit_config);
    CHECK(err.str().find(".exact") != std::string::npos);
}

TEST_CASE("solver failures exit with 3") {
    auto cfg = test::preset("paper-sec6");
    cfg.inner_max = 1;
    std::ostringstream out, err;
    CHECK(cmd_solve(cfg, out, err) == exit_solver);
    CHECK_FALSE(err.str().empty());
}
