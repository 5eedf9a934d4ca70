"""Pseudospectral experiments for damped dispersive flows with
hyperbolically-weighted (analytic-radius) energies."""

from .analytics import (
    FunctionalBreakdown,
    RadiusFit,
    conserved_combinations,
    damping_A_norm,
    energy_rate_A,
    functional_A,
    functional_M,
    functional_N,
    gsigma_norm,
    hsigma_norm,
    interpolation_check,
    lifespan_T0,
    mass_rate_M,
    operator_F,
    operator_G,
    radius_estimate,
    s_index,
    sigma_choice,
    theta_max,
)
from .config import parse_config, parse_config_text, render_config
from .dynamics import (
    BLOWUP_LIMIT,
    ConstantDamping,
    Coupled,
    EvolutionSpec,
    MKdV,
    MKdVm,
    RaisedCosineDamping,
    Trajectory,
    integrate,
    linear_symbol,
    make_damping,
    soliton,
)
from .errors import (
    ConfigParseError,
    ConfigurationError,
    DivergenceError,
    FitError,
    GevreyError,
    OverflowGuardError,
    SymmetryError,
    UnderresolvedError,
)
from .harness import (
    RUNNERS,
    SCENARIO_IDS,
    DampingConfig,
    DataConfig,
    ExperimentReport,
    ScenarioConfig,
    Tolerances,
    Verdict,
)
from .inequalities import (
    InequalityVerdict,
    certified_constant,
    check_cosh_minus_one,
    check_equivalence,
    check_sinh,
    check_triple_cosh,
    load_manifest,
    scan_triple_cosh,
)
from .reporting import (
    PlotStyle,
    canonical_json,
    content_hash,
    plot_series,
    read_series_csv,
    report_payload,
    write_plot,
    write_report,
)
from .spectral import (
    AbsDeriv,
    BracketPower,
    CoshWeight,
    Deriv,
    Grid,
    LinearFlow,
    SechWeight,
    SpectralField,
    analyze,
    apply_multiplier,
    dealias,
    make_grid,
    synthesize,
)

__version__ = "0.1.0"

__all__ = [
    "AbsDeriv",
    "BLOWUP_LIMIT",
    "BracketPower",
    "FunctionalBreakdown",
    "ConfigParseError",
    "ConfigurationError",
    "ConstantDamping",
    "CoshWeight",
    "Coupled",
    "DampingConfig",
    "DataConfig",
    "Deriv",
    "DivergenceError",
    "EvolutionSpec",
    "ExperimentReport",
    "FitError",
    "GevreyError",
    "Grid",
    "InequalityVerdict",
    "LinearFlow",
    "MKdV",
    "MKdVm",
    "OverflowGuardError",
    "PlotStyle",
    "RUNNERS",
    "RadiusFit",
    "RaisedCosineDamping",
    "SCENARIO_IDS",
    "ScenarioConfig",
    "SechWeight",
    "SpectralField",
    "SymmetryError",
    "Tolerances",
    "Trajectory",
    "UnderresolvedError",
    "Verdict",
    "analyze",
    "apply_multiplier",
    "canonical_json",
    "certified_constant",
    "check_cosh_minus_one",
    "check_equivalence",
    "check_sinh",
    "check_triple_cosh",
    "conserved_combinations",
    "content_hash",
    "damping_A_norm",
    "dealias",
    "energy_rate_A",
    "functional_A",
    "functional_M",
    "functional_N",
    "gsigma_norm",
    "hsigma_norm",
    "integrate",
    "interpolation_check",
    "lifespan_T0",
    "linear_symbol",
    "load_manifest",
    "make_damping",
    "make_grid",
    "mass_rate_M",
    "operator_F",
    "operator_G",
    "parse_config",
    "parse_config_text",
    "plot_series",
    "radius_estimate",
    "read_series_csv",
    "render_config",
    "report_payload",
    "s_index",
    "scan_triple_cosh",
    "sigma_choice",
    "soliton",
    "synthesize",
    "theta_max",
    "write_plot",
    "write_report",
    "__version__",
]
