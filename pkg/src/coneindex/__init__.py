"""Index accounting for minimal cones and minimal submanifolds with isolated conical singularities."""
from .constants import TOLERANCES, TOLERANCES_VERSION
from .errors import CompletenessError, ConvergenceError, TruncationError, WeightOnSpectrumError
from .fredholm import (
    ConeModel,
    MSIModel,
    admissible_tau_range,
    classify_generic,
    cone_model,
    duality_check,
    football_model,
    fredholm_index,
    sweep,
)
from .geometry import area_thresholds, density_bound, sphere_area, veronese_embed
from .growth import (
    GrowthField,
    GrowthParams,
    estimate_asymptotic_rate,
    find_K0,
    radial_ode_solve,
    three_circle_residual,
)
from .indicial import asymptotic_spectrum, cone_asymptotics, indicial_roots, solve_indicial
from .spectra import LinkSpectrum, clifford_torus_spectrum, morse_index, user_spectrum

__version__ = "0.1.0"

__all__ = [
    "TOLERANCES", "TOLERANCES_VERSION",
    "CompletenessError", "ConvergenceError", "TruncationError", "WeightOnSpectrumError",
    "ConeModel", "MSIModel", "admissible_tau_range", "classify_generic", "cone_model",
    "duality_check", "football_model", "fredholm_index", "sweep",
    "area_thresholds", "density_bound", "sphere_area", "veronese_embed",
    "GrowthField", "GrowthParams", "estimate_asymptotic_rate", "find_K0",
    "radial_ode_solve", "three_circle_residual",
    "asymptotic_spectrum", "cone_asymptotics", "indicial_roots", "solve_indicial",
    "LinkSpectrum", "clifford_torus_spectrum", "morse_index", "user_spectrum",
]
