#pragma once

// JSON run configuration. Expressions are strings; every error names the
// offending JSON path (".problem.mu") and, for expressions, the offset.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "semiheat/analysis.hpp"
#include "semiheat/fdm.hpp"
#include "semiheat/problem.hpp"

namespace semiheat::config {

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string path, const std::string& message, std::optional<std::size_t> offset = std::nullopt);

    const std::string& path() const { return path_; }
    std::optional<std::size_t> offset() const { return offset_; }

private:
    std::string path_;
    std::optional<std::size_t> offset_;
};

enum class Method { fdm, galerkin };

std::string_view method_name(Method m);
std::string_view stepper_name(fdm::Stepper s);

struct VerifyOptions {
    expr::Expr perturbation;                        // contraction check
    std::optional<analysis::DecayWindow> decay_window;
    std::optional<double> gamma;                    // admissible decay rate to test
    std::optional<double> epsilon;
    std::optional<double> error_tol;                // optional absolute cap on the max-node error
};

struct Outputs {
    std::string csv;
    std::string report;
};

struct RunConfig {
    ProblemSpec spec;
    std::optional<AsymptoticLimits> limits;
    std::optional<expr::Expr> exact;
    Method method = Method::fdm;
    std::size_t nx = 5;
    double dt = 0.02;
    fdm::Stepper stepper = fdm::Stepper::eigen;
    double inner_tol = 1e-10;
    int inner_max = 50;
    double steady_tol = 1e-10;
    VerifyOptions verify;
    Outputs output;

    /// nx >= 3, 0 < dt <= T; throws ConfigError naming the field.
    void validate() const;
};

/// Throws ConfigError.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig parse_config_text(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

std::vector<std::string> preset_names();
/// JSON text of a shipped preset, or nullopt for an unknown name.
std::optional<std::string_view> preset_text(std::string_view name);
RunConfig load_preset(std::string_view name);

}  // namespace semiheat::config
