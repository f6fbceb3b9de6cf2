// semiheat: solve | steady | verify
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "semiheat/commands.hpp"
#include "semiheat/config.hpp"

namespace {

using namespace semiheat;

struct Args {
    std::string config;
    std::string preset;
    std::string method;
    std::optional<std::size_t> nx;
    std::optional<double> dt;
    std::optional<double> tmax;
    std::string stepper;
    std::string out;
    std::string report;
    std::string checks;
};

void add_common(CLI::App* cmd, Args& a) {
    cmd->add_option("--config", a.config, "JSON run configuration");
    cmd->add_option("--preset", a.preset, "shipped configuration: paper-sec6, bound-demo, zero");
    cmd->add_option("--method", a.method, "fdm or galerkin")->check(CLI::IsMember({"fdm", "galerkin"}));
    cmd->add_option("--nx", a.nx, "number of cells");
    cmd->add_option("--dt", a.dt, "time step");
    cmd->add_option("--tmax", a.tmax, "final time");
    cmd->add_option("--stepper", a.stepper, "eigen or be")->check(CLI::IsMember({"eigen", "be"}));
    cmd->add_option("--out", a.out, "output path");
}

config::RunConfig load(const Args& a) {
    if (!a.config.empty() && !a.preset.empty()) throw config::ConfigError("--preset", "give either --config or --preset");
    config::RunConfig cfg;
    if (!a.config.empty()) {
        cfg = config::load_config(a.config);
    } else if (!a.preset.empty()) {
        cfg = config::load_preset(a.preset);
    } else {
        throw config::ConfigError("--config", "no configuration given");
    }
    cli::Overrides o;
    if (!a.method.empty()) o.method = a.method == "fdm" ? config::Method::fdm : config::Method::galerkin;
    if (a.nx) o.nx = *a.nx;
    if (a.dt) o.dt = *a.dt;
    if (a.tmax) o.tmax = *a.tmax;
    if (!a.stepper.empty()) o.stepper = a.stepper == "eigen" ? fdm::Stepper::eigen : fdm::Stepper::backward_euler;
    if (!a.out.empty()) o.out = a.out;
    if (!a.report.empty()) o.report = a.report;
    cli::apply_overrides(cfg, o);
    return cfg;
}

/// Checks whose inputs the configuration provides.
std::vector<cli::Check> default_checks(const config::RunConfig& cfg) {
    std::vector<cli::Check> out;
    for (cli::Check c : cli::all_checks()) {
        if (c == cli::Check::error && !cfg.exact) continue;
        if (c == cli::Check::decay && !cfg.limits) continue;
        out.push_back(c);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semilinear heat equation with Robin boundary conditions"};
    app.require_subcommand(1);
    Args a;
    auto* solve = app.add_subcommand("solve", "time-dependent solve; writes the x,t,u surface CSV");
    auto* steady = app.add_subcommand("steady", "stationary limit problem; writes x,u_inf CSV");
    auto* verify = app.add_subcommand("verify", "run audits and write a JSON report");
    for (auto* cmd : {solve, steady, verify}) add_common(cmd, a);
    for (auto* cmd : {solve, steady}) cmd->add_option("--report", a.report, "JSON report path");
    verify->add_option("--checks", a.checks, "comma-separated: error,decay,bound,contraction,energy,hypotheses");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return cli::exit_config;
    }

    config::RunConfig cfg;
    std::vector<cli::Check> checks;
    try {
        if (verify->parsed()) {
            a.report = a.out;
            a.out.clear();
        }
        cfg = load(a);
        if (verify->parsed()) checks = a.checks.empty() ? default_checks(cfg) : cli::parse_checks(a.checks);
    } catch (const config::ConfigError& e) {
        std::cerr << e.what() << '\n';
        return cli::exit_config;
    }

    if (solve->parsed()) return cli::cmd_solve(cfg, std::cout, std::cerr);
    if (steady->parsed()) return cli::cmd_steady(cfg, std::cout, std::cerr);
    return cli::cmd_verify(cfg, checks, std::cout, std::cerr);
}
