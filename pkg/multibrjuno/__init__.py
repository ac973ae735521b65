"""
multi-brjuno - Multidimensional Brjuno Sums, Diophantine Scans and Siegel Germs

Certified interval computations around simultaneous rotations: the N-dimensional
Gauss map, Brjuno sums along pivot words, the Diophantine class DC_N(C, tau) and
its dual linear form, plus numerical linearization of germs fixing 0.

Quick Start:
    >>> from multibrjuno import BrjunoToolkit
    >>>
    >>> toolkit = BrjunoToolkit()
    >>> total = toolkit.brjuno("golden", "constant:1", depth=60)
    >>> round(float(total.value), 6)
    1.443635
    >>> toolkit.transference(2, 1)
    Fraction(3, 1)

Features:
    - Exact quadratic surd inputs with interval enclosures that refine on demand
    - Gauss orbits, Brjuno sums (B and Bprime) and certified finite-depth minima
    - Diophantine checks, estimates, dual form and transference exponents
    - Constructive word selector with fitted envelope constants
    - Linearization, commuting families and radius comparison for germs
    - Configurable via constructor, config object, or environment variables

For more information, see README.md
"""

__version__ = "1.0.0"
__author__ = "multi-brjuno developers"

# Main facade
from multibrjuno.toolkit import BrjunoToolkit

# Configuration
from multibrjuno.config import ConstantsConfig, RunConfig, get_run_config

# Numbers
from multibrjuno.numeric import (
    RealScalar,
    certified_floor,
    certified_nearest_integer,
    certified_sign,
    compare,
    refine,
)
from multibrjuno.surd import QuadraticSurd
from multibrjuno.syntax import parse_exact

# Computations (for advanced use)
from multibrjuno.gauss import classical_gauss_step, gauss_orbit, gauss_step, nicf_step
from multibrjuno.brjuno import (
    brjuno_minimize,
    brjuno_partial,
    classical_brjuno_partial,
    height_bound,
    rotation_density,
    siegel_radius_bound,
)
from multibrjuno.dioph import (
    dc_check,
    dc_estimate,
    dc_scan,
    dual_form_check,
    select_word_appendix,
    transference,
)
from multibrjuno.series import compose, series_invert
from multibrjuno.germs import (
    PowerSeriesGerm,
    linearize,
    radius_estimate_vs_bound,
    simultaneous_check,
    synth_commuting_family,
)

# Types
from multibrjuno.types import (
    AppendixWordTrace,
    BrjunoSum,
    DCResult,
    DiophParams,
    DualFormResult,
    GaussStep,
    RotationVector,
    WordSearchResult,
)

# Exceptions
from multibrjuno.exceptions import (
    MultiBrjunoError,
    ConfigurationError,
    InvalidInputError,
    PrecisionError,
    PrecisionExhausted,
    UndecidableAtPrecision,
    DomainError,
    ExactTie,
    SelectorFailed,
    CommutationViolated,
    DegenerateLinearTerm,
    SmallDivisorUnderflow,
)

# Public API
__all__ = [
    # Main API
    "BrjunoToolkit",
    # Configuration
    "ConstantsConfig",
    "RunConfig",
    "get_run_config",
    # Numbers
    "RealScalar",
    "QuadraticSurd",
    "parse_exact",
    "certified_floor",
    "certified_nearest_integer",
    "certified_sign",
    "compare",
    "refine",
    # Computations
    "gauss_step",
    "gauss_orbit",
    "nicf_step",
    "classical_gauss_step",
    "brjuno_partial",
    "classical_brjuno_partial",
    "brjuno_minimize",
    "rotation_density",
    "height_bound",
    "siegel_radius_bound",
    "dc_scan",
    "dc_check",
    "dc_estimate",
    "dual_form_check",
    "transference",
    "select_word_appendix",
    "compose",
    "series_invert",
    "PowerSeriesGerm",
    "linearize",
    "synth_commuting_family",
    "simultaneous_check",
    "radius_estimate_vs_bound",
    # Types
    "RotationVector",
    "GaussStep",
    "BrjunoSum",
    "WordSearchResult",
    "DiophParams",
    "DCResult",
    "DualFormResult",
    "AppendixWordTrace",
    # Exceptions
    "MultiBrjunoError",
    "ConfigurationError",
    "InvalidInputError",
    "PrecisionError",
    "PrecisionExhausted",
    "UndecidableAtPrecision",
    "DomainError",
    "ExactTie",
    "SelectorFailed",
    "CommutationViolated",
    "DegenerateLinearTerm",
    "SmallDivisorUnderflow",
]
