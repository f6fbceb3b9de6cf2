"""1D semilinear heat equation with Dirichlet-Robin boundary conditions."""

from ._core import (
    ConfigError,
    EvalError,
    Expr,
    ParseError,
    RunConfig,
    SolverError,
    load_config,
    load_preset,
    parse_config,
    preset_names,
    solve,
    steady,
    surface_csv,
    verify,
)

__all__ = [
    "ConfigError",
    "EvalError",
    "Expr",
    "ParseError",
    "RunConfig",
    "SolverError",
    "load_config",
    "load_preset",
    "parse_config",
    "preset_names",
    "solve",
    "steady",
    "surface_csv",
    "verify",
]
