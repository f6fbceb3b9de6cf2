#include "semiheat/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace semiheat::config {

namespace detail {
struct PresetEntry {
    const char* name;
    const char* text;
};
extern const PresetEntry presets[];
extern const std::size_t preset_count;
}  // namespace detail

ConfigError::ConfigError(std::string path, const std::string& message, std::optional<std::size_t> offset)
    : std::runtime_error("config error at " + (path.empty() ? std::string("<document>") : path) + ": " + message),
      path_(std::move(path)),
      offset_(offset) {}

std::string_view method_name(Method m) { return m == Method::fdm ? "fdm" : "galerkin"; }

std::string_view stepper_name(fdm::Stepper s) { return s == fdm::Stepper::eigen ? "eigen" : "be"; }

namespace {

using nlohmann::json;

std::string child(const std::string& path, std::string_view key) { return path + "." + std::string(key); }

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError(child(path, key), "unknown field");
    }
}

const json& require_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    return j;
}

const json* find(const json& obj, std::string_view key) {
    const auto it = obj.find(std::string(key));
    return it == obj.end() ? nullptr : &*it;
}

expr::Expr read_expr(const json& obj, const std::string& path, std::string_view key, expr::VarSet allowed) {
    const std::string p = child(path, key);
    const json* v = find(obj, key);
    if (v == nullptr) throw ConfigError(p, "missing required expression");
    if (v->is_number()) return expr::Expr::constant(v->get<double>());
    if (!v->is_string()) throw ConfigError(p, "expected an expression string");
    try {
        return expr::parse(v->get<std::string>(), allowed);
    } catch (const expr::ParseError& e) {
        throw ConfigError(p, e.what(), e.offset());
    }
}

std::optional<expr::Expr> read_optional_expr(const json& obj, const std::string& path, std::string_view key,
                                             expr::VarSet allowed) {
    if (find(obj, key) == nullptr) return std::nullopt;
    return read_expr(obj, path, key, allowed);
}

/// A real given either as a JSON number or as a constant expression string.
double read_real(const json& obj, const std::string& path, std::string_view key, std::optional<double> fallback) {
    const std::string p = child(path, key);
    const json* v = find(obj, key);
    if (v == nullptr) {
        if (fallback) return *fallback;
        throw ConfigError(p, "missing required number");
    }
    double value = 0.0;
    if (v->is_number()) {
        value = v->get<double>();
    } else if (v->is_string()) {
        try {
            value = expr::parse(v->get<std::string>(), roles::constant).eval({});
        } catch (const expr::ParseError& e) {
            throw ConfigError(p, e.what(), e.offset());
        } catch (const expr::EvalError& e) {
            throw ConfigError(p, e.what(), e.position());
        }
    } else {
        throw ConfigError(p, "expected a number");
    }
    if (!std::isfinite(value)) throw ConfigError(p, "value is not finite");
    return value;
}

std::size_t read_count(const json& obj, const std::string& path, std::string_view key, std::size_t fallback) {
    const json* v = find(obj, key);
    if (v == nullptr) return fallback;
    if (!v->is_number_integer() || v->get<long long>() < 0) throw ConfigError(child(path, key), "expected a non-negative integer");
    return v->get<std::size_t>();
}

std::string read_string(const json& obj, const std::string& path, std::string_view key, std::string fallback) {
    const json* v = find(obj, key);
    if (v == nullptr) return fallback;
    if (!v->is_string()) throw ConfigError(child(path, key), "expected a string");
    return v->get<std::string>();
}

GrowthBounds read_growth(const json* g, const std::string& path) {
    GrowthBounds b;
    if (g == nullptr) return b;
    require_object(*g, path);
    reject_unknown(*g, path, {"C1", "C1prime", "C2", "p", "delta"});
    b.C1 = read_real(*g, path, "C1", b.C1);
    b.C1prime = read_real(*g, path, "C1prime", b.C1prime);
    b.C2 = read_real(*g, path, "C2", b.C2);
    b.p = read_real(*g, path, "p", b.p);
    b.delta = read_real(*g, path, "delta", b.delta);
    try {
        b.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path, e.what());
    }
    return b;
}

ProblemSpec read_problem(const json& root) {
    const std::string path = ".problem";
    const json* pj = find(root, "problem");
    if (pj == nullptr) throw ConfigError(path, "missing required block");
    const json& p = require_object(*pj, path);
    reject_unknown(p, path, {"mu", "mu0", "f", "f1", "g0", "g1", "u0", "h0", "h1", "T", "growth"});

    ProblemSpec spec;
    spec.T = read_real(p, path, "T", std::nullopt);
    if (!(spec.T > 0.0)) throw ConfigError(child(path, "T"), "T must be positive");
    spec.mu.expr = read_expr(p, path, "mu", roles::mu);
    const GrowthBounds growth = read_growth(find(p, "growth"), child(path, "growth"));
    const expr::Expr f = read_expr(p, path, "f", roles::f);
    try {
        spec.f = ScalarNonlinearity(f, growth);
    } catch (const std::exception& e) {
        throw ConfigError(child(path, "f"), e.what());
    }
    spec.f1 = read_expr(p, path, "f1", roles::f1);
    spec.boundary.g0 = read_expr(p, path, "g0", roles::g);
    spec.boundary.g1 = read_expr(p, path, "g1", roles::g);
    spec.u0 = read_expr(p, path, "u0", roles::u0);
    spec.boundary.h0 = read_real(p, path, "h0", std::nullopt);
    spec.boundary.h1 = read_real(p, path, "h1", std::nullopt);
    if (spec.boundary.h0 < 0.0) throw ConfigError(child(path, "h0"), "h0 must be non-negative");
    if (spec.boundary.h1 < 0.0) throw ConfigError(child(path, "h1"), "h1 must be non-negative");
    if (!(spec.boundary.h0 + spec.boundary.h1 > 0.0)) throw ConfigError(child(path, "h0"), "h0 + h1 must be positive");

    if (find(p, "mu0") != nullptr) {
        spec.mu.mu0 = read_real(p, path, "mu0", std::nullopt);
    } else {
        try {
            spec.mu.mu0 = sample_mu0(spec.mu.expr, spec.T);
        } catch (const expr::EvalError& e) {
            throw ConfigError(child(path, "mu"), e.what(), e.position());
        }
    }
    if (!(spec.mu.mu0 > 0.0)) throw ConfigError(child(path, "mu"), "mu must be bounded below by a positive mu0");
    return spec;
}

AsymptoticLimits read_limits(const json& a, const std::string& path) {
    require_object(a, path);
    reject_unknown(a, path, {"mu_inf", "f1_inf", "g0_inf", "g1_inf", "gamma1", "Cexp"});
    AsymptoticLimits lim;
    lim.mu_inf = read_expr(a, path, "mu_inf", roles::steady);
    lim.f1_inf = read_expr(a, path, "f1_inf", roles::steady);
    lim.g0_inf = read_real(a, path, "g0_inf", std::nullopt);
    lim.g1_inf = read_real(a, path, "g1_inf", std::nullopt);
    lim.gamma1 = read_real(a, path, "gamma1", lim.gamma1);
    lim.Cexp = read_real(a, path, "Cexp", lim.Cexp);
    if (!(lim.gamma1 > 0.0)) throw ConfigError(child(path, "gamma1"), "gamma1 must be positive");
    return lim;
}

VerifyOptions read_verify(const json* v, const std::string& path) {
    VerifyOptions o;
    o.perturbation = expr::parse("0.1*sin(3.141592653589793*x)", roles::u0);
    if (v == nullptr) return o;
    require_object(*v, path);
    reject_unknown(*v, path, {"perturbation", "decay_window", "gamma", "epsilon", "error_tol"});
    if (auto e = read_optional_expr(*v, path, "perturbation", roles::u0)) o.perturbation = *e;
    if (const json* w = find(*v, "decay_window")) {
        const std::string wp = child(path, "decay_window");
        if (!w->is_array() || w->size() != 2) throw ConfigError(wp, "expected [t_a, t_b]");
        for (std::size_t i = 0; i < 2; ++i) {
            if (!(*w)[i].is_number()) throw ConfigError(wp + "[" + std::to_string(i) + "]", "expected a number");
        }
        o.decay_window = analysis::DecayWindow{(*w)[0].get<double>(), (*w)[1].get<double>()};
        if (!(o.decay_window->t_a < o.decay_window->t_b)) throw ConfigError(wp, "t_a must be below t_b");
    }
    if (find(*v, "gamma")) o.gamma = read_real(*v, path, "gamma", std::nullopt);
    if (find(*v, "epsilon")) o.epsilon = read_real(*v, path, "epsilon", std::nullopt);
    if (find(*v, "error_tol")) o.error_tol = read_real(*v, path, "error_tol", std::nullopt);
    return o;
}

}  // namespace

void RunConfig::validate() const {
    if (nx < 3) throw ConfigError(".nx", "nx must be at least 3");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError(".dt", "dt must be positive");
    if (dt > spec.T) throw ConfigError(".dt", "dt must not exceed T");
    if (!(inner_tol > 0.0)) throw ConfigError(".inner_tol", "inner_tol must be positive");
    if (inner_max < 1) throw ConfigError(".inner_max", "inner_max must be at least 1");
    if (!(steady_tol > 0.0)) throw ConfigError(".steady_tol", "steady_tol must be positive");
}

RunConfig parse_config(const nlohmann::json& doc) {
    require_object(doc, "");
    reject_unknown(doc, "", {"problem", "method", "nx", "dt", "stepper", "inner_tol", "inner_max", "steady_tol",
                             "asymptotic", "exact", "verify", "output", "description"});
    RunConfig cfg;
    cfg.spec = read_problem(doc);

    const std::string method = read_string(doc, "", "method", "fdm");
    if (method == "fdm") {
        cfg.method = Method::fdm;
    } else if (method == "galerkin") {
        cfg.method = Method::galerkin;
    } else {
        throw ConfigError(".method", "expected \"fdm\" or \"galerkin\"");
    }
    const std::string stepper = read_string(doc, "", "stepper", "eigen");
    if (stepper == "eigen") {
        cfg.stepper = fdm::Stepper::eigen;
    } else if (stepper == "be" || stepper == "backward_euler") {
        cfg.stepper = fdm::Stepper::backward_euler;
    } else {
        throw ConfigError(".stepper", "expected \"eigen\" or \"be\"");
    }
    cfg.nx = read_count(doc, "", "nx", cfg.nx);
    cfg.dt = read_real(doc, "", "dt", cfg.dt);
    cfg.inner_tol = read_real(doc, "", "inner_tol", cfg.inner_tol);
    cfg.inner_max = static_cast<int>(read_count(doc, "", "inner_max", static_cast<std::size_t>(cfg.inner_max)));
    cfg.steady_tol = read_real(doc, "", "steady_tol", cfg.steady_tol);

    if (const json* a = find(doc, "asymptotic")) cfg.limits = read_limits(*a, ".asymptotic");
    cfg.exact = read_optional_expr(doc, "", "exact", roles::exact);
    cfg.verify = read_verify(find(doc, "verify"), ".verify");
    if (const json* o = find(doc, "output")) {
        require_object(*o, ".output");
        reject_unknown(*o, ".output", {"csv", "report"});
        cfg.output.csv = read_string(*o, ".output", "csv", "");
        cfg.output.report = read_string(*o, ".output", "report", "");
    }
    if (const json* d = find(doc, "description"); d != nullptr && !d->is_string()) {
        throw ConfigError(".description", "expected a string");
    }
    cfg.validate();
    return cfg;
}

RunConfig parse_config_text(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("", std::string("invalid JSON: ") + e.what(), e.byte > 0 ? e.byte - 1 : 0);
    }
    return parse_config(doc);
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("", "cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < detail::preset_count; ++i) out.emplace_back(detail::presets[i].name);
    return out;
}

std::optional<std::string_view> preset_text(std::string_view name) {
    for (std::size_t i = 0; i < detail::preset_count; ++i) {
        if (name == detail::presets[i].name) return std::string_view(detail::presets[i].text);
    }
    return std::nullopt;
}

RunConfig load_preset(std::string_view name) {
    const auto text = preset_text(name);
    if (!text) throw ConfigError("", "unknown preset \"" + std::string(name) + "\"");
    return parse_config_text(*text);
}

}  // namespace semiheat::config
