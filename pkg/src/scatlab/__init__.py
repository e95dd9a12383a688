"""Scattering theory toolkit for radial Schroedinger operators."""

from . import asymptotics, levinson, potential, radial, scattering, specfun
from .asymptotics import (
    AsymptoticData,
    build_asymptotics,
    heat_coefficient_closed,
    heat_coefficient_general,
)
from .errors import (
    BranchError,
    ConfigurationError,
    ConsistencyError,
    DomainError,
    InconclusiveResonanceError,
    IntegrationError,
    RangeError,
    ScatlabError,
    TailError,
    UnsupportedProfileError,
)
from .levinson import heat_trace_check, high_energy_ssf_check, verify_levinson
from .potential import Potential, gaussian, poschl_teller, square_well, tabulated, zero
from .radial import SolverSettings, bound_state_catalog, detect_resonance, phase_shift
from .scattering import build_profile

__version__ = "0.1.0"

__all__ = [
    "asymptotics",
    "levinson",
    "potential",
    "radial",
    "scattering",
    "specfun",
    "AsymptoticData",
    "build_asymptotics",
    "heat_coefficient_closed",
    "heat_coefficient_general",
    "BranchError",
    "ConfigurationError",
    "ConsistencyError",
    "DomainError",
    "InconclusiveResonanceError",
    "IntegrationError",
    "RangeError",
    "ScatlabError",
    "TailError",
    "UnsupportedProfileError",
    "heat_trace_check",
    "high_energy_ssf_check",
    "verify_levinson",
    "Potential",
    "gaussian",
    "poschl_teller",
    "square_well",
    "tabulated",
    "zero",
    "SolverSettings",
    "bound_state_catalog",
    "detect_resonance",
    "phase_shift",
    "build_profile",
]
