#include <pybind11/pybind11.h>
#include <pybind11/numpy.h>
#include <pybind11/stl.h>

#include <sstream>

#include "semiheat/commands.hpp"
#include "semiheat/config.hpp"
#include "semiheat/expr.hpp"
#include "semiheat/forms.hpp"

namespace py = pybind11;
using namespace semiheat;

namespace {

config::RunConfig with_overrides(config::RunConfig cfg, std::optional<std::string> method, std::optional<std::size_t> nx,
                                 std::optional<double> dt, std::optional<double> tmax, std::optional<std::string> stepper) {
    cli::Overrides o;
    if (method) {
        if (*method != "fdm" && *method != "galerkin") throw config::ConfigError("method", "expected fdm or galerkin");
        o.method = *method == "fdm" ? config::Method::fdm : config::Method::galerkin;
    }
    if (stepper) {
        if (*stepper != "eigen" && *stepper != "be") throw config::ConfigError("stepper", "expected eigen or be");
        o.stepper = *stepper == "eigen" ? fdm::Stepper::eigen : fdm::Stepper::backward_euler;
    }
    o.nx = nx;
    o.dt = dt;
    o.tmax = tmax;
    cli::apply_overrides(cfg, o);
    return cfg;
}

py::array_t<double> to_array(std::span<const double> v) {
    py::array_t<double> a(std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())});
    auto m = a.mutable_unchecked<1>();
    for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<py::ssize_t>(i)) = v[i];
    return a;
}

py::dict trajectory_dict(const Trajectory& tr) {
    const std::size_t nt = tr.size();
    const std::size_t nn = tr.n_cells() + 1;
    py::array_t<double> u({static_cast<py::ssize_t>(nt), static_cast<py::ssize_t>(nn)});
    auto m = u.mutable_unchecked<2>();
    for (std::size_t n = 0; n < nt; ++n) {
        for (std::size_t k = 0; k < nn; ++k) m(n, k) = tr.states[n][k];
    }
    std::vector<double> x(nn);
    for (std::size_t k = 0; k < nn; ++k) x[k] = tr.states.front().x(k);
    py::dict d;
    d["t"] = to_array(tr.times);
    d["x"] = to_array(x);
    d["u"] = u;
    d["inner_iterations"] = tr.inner_iterations;
    return d;
}

py::object json_to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "1D semilinear heat equation with Robin boundary conditions";

    py::register_exception<config::ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
    py::register_exception<expr::ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<expr::EvalError>(m, "EvalError", PyExc_ArithmeticError);

    py::class_<expr::Expr>(m, "Expr")
        .def(py::init([](const std::string& src, const std::string& vars) {
                 expr::VarSet allowed;
                 for (char c : vars) {
                     if (c == 'x') allowed.insert(expr::Var::x);
                     else if (c == 't') allowed.insert(expr::Var::t);
                     else if (c == 'u') allowed.insert(expr::Var::u);
                     else throw py::value_error(std::string("unknown variable '") + c + "'");
                 }
                 return expr::parse(src, allowed);
             }),
             py::arg("source"), py::arg("variables") = "xtu")
        .def("__call__", [](const expr::Expr& e, double x, double t, double u) { return e.eval({x, t, u}); },
             py::arg("x") = 0.0, py::arg("t") = 0.0, py::arg("u") = 0.0)
        .def("partial",
             [](const expr::Expr& e, const std::string& var, double x, double t, double u) {
                 const expr::Var v = var == "x" ? expr::Var::x : var == "t" ? expr::Var::t : expr::Var::u;
                 return expr::numeric_partial(e, v, {x, t, u});
             },
             py::arg("var"), py::arg("x") = 0.0, py::arg("t") = 0.0, py::arg("u") = 0.0)
        .def_property_readonly("free_vars", [](const expr::Expr& e) { return e.free_vars().to_string(); })
        .def_property_readonly("source", &expr::Expr::source)
        .def("__str__", &expr::Expr::to_string)
        .def("__repr__", [](const expr::Expr& e) { return "Expr(" + e.to_string() + ")"; });

    py::class_<config::RunConfig>(m, "RunConfig")
        .def_property_readonly("nx", [](const config::RunConfig& c) { return c.nx; })
        .def_property_readonly("dt", [](const config::RunConfig& c) { return c.dt; })
        .def_property_readonly("tmax", [](const config::RunConfig& c) { return c.spec.T; })
        .def_property_readonly("method", [](const config::RunConfig& c) { return std::string(config::method_name(c.method)); })
        .def_property_readonly("stepper", [](const config::RunConfig& c) { return std::string(config::stepper_name(c.stepper)); })
        .def("form_constants", [](const config::RunConfig& c) {
            const auto k = forms::form_constants(c.spec);
            py::dict d;
            d["mu0"] = k.mu0;
            d["a0"] = k.a0;
            d["aT"] = k.aT;
            d["aT_tilde"] = k.aT_tilde;
            return d;
        });

    m.def("preset_names", &config::preset_names);
    m.def("load_preset", [](const std::string& name) { return config::load_preset(name); }, py::arg("name"));
    m.def("load_config", [](const std::string& path) { return config::load_config(path); }, py::arg("path"));
    m.def("parse_config", [](const std::string& text) { return config::parse_config_text(text); }, py::arg("text"));

    m.def("solve",
          [](const config::RunConfig& cfg, std::optional<std::string> method, std::optional<std::size_t> nx,
             std::optional<double> dt, std::optional<double> tmax, std::optional<std::string> stepper) {
              const auto c = with_overrides(cfg, method, nx, dt, tmax, stepper);
              Trajectory tr;
              {
                  py::gil_scoped_release release;
                  tr = cli::run_trajectory(c);
              }
              return trajectory_dict(tr);
          },
          py::arg("config"), py::kw_only(), py::arg("method") = py::none(), py::arg("nx") = py::none(),
          py::arg("dt") = py::none(), py::arg("tmax") = py::none(), py::arg("stepper") = py::none());

    m.def("surface_csv",
          [](const config::RunConfig& cfg) {
              py::gil_scoped_release release;
              return cli::solve(cfg).csv;
          },
          py::arg("config"));

    m.def("steady",
          [](const config::RunConfig& cfg, std::optional<std::string> method, std::optional<std::size_t> nx) {
              const auto c = with_overrides(cfg, method, nx, std::nullopt, std::nullopt, std::nullopt);
              cli::CommandResult r;
              {
                  py::gil_scoped_release release;
                  r = cli::steady(c);
              }
              py::dict d;
              d["csv"] = r.csv;
              d["report"] = json_to_py(r.report);
              return d;
          },
          py::arg("config"), py::kw_only(), py::arg("method") = py::none(), py::arg("nx") = py::none());

    m.def("verify",
          [](const config::RunConfig& cfg, const std::string& checks) {
              const auto list = cli::parse_checks(checks);
              cli::CommandResult r;
              {
                  py::gil_scoped_release release;
                  r = cli::verify(cfg, list);
              }
              return json_to_py(r.report);
          },
          py::arg("config"), py::arg("checks"));
}
