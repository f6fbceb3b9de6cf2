#pragma once

// solve / steady / verify orchestration, output formats and exit codes.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "semiheat/config.hpp"
#include "semiheat/grid.hpp"

namespace semiheat::cli {

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_solver = 3, exit_check = 4 };

enum class Check { error, decay, bound, contraction, energy, hypotheses };

std::string_view check_name(Check c);
const std::vector<Check>& all_checks();
/// Comma-separated names; throws config::ConfigError with path "--checks".
std::vector<Check> parse_checks(std::string_view list);

struct Overrides {
    std::optional<config::Method> method;
    std::optional<std::size_t> nx;
    std::optional<double> dt;
    std::optional<double> tmax;
    std::optional<fdm::Stepper> stepper;
    std::optional<std::string> out;
    std::optional<std::string> report;
};

/// Applies command-line overrides and re-validates.
void apply_overrides(config::RunConfig& cfg, const Overrides& o);

/// Header x,t,u; rows time-major then node index; shortest round-trip reals; LF endings.
std::string surface_csv(const Trajectory& traj);
/// Header x,u_inf.
std::string steady_csv(const GridFunction& u);

struct CommandResult {
    int exit_code = exit_ok;
    std::string csv;  // empty for verify
    nlohmann::json report;
};

/// Pure computations; throw config::ConfigError or SolverError-derived exceptions.
Trajectory run_trajectory(const config::RunConfig& cfg);
CommandResult solve(const config::RunConfig& cfg);
CommandResult steady(const config::RunConfig& cfg);
CommandResult verify(const config::RunConfig& cfg, const std::vector<Check>& checks);

/// Command entry points: run, write outputs, map failures to exit codes.
int cmd_solve(const config::RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_steady(const config::RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_verify(const config::RunConfig& cfg, const std::vector<Check>& checks, std::ostream& out, std::ostream& err);

}  // namespace semiheat::cli
