"""
Germs fixing 0 with an irrational rotation number

A germ f(z) = lam z + a_2 z**2 + ... + a_M z**M, lam = exp(2 pi i alpha), is
linearized by solving f o h = h o R_alpha order by order:

    (lam**n - lam) h_n = sum_{k=2}^{n} a_k [h**k]_n

The size of the Siegel disk is estimated from the coefficient growth of h
over a trailing window and compared with C exp(-2 pi B).
"""
import logging
import math
from contextlib import nullcontext
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import mpmath
import numpy as np

from multibrjuno.brjuno import siegel_radius_bound
from multibrjuno.config import ConstantsConfig, DEFAULT_CONFIG
from multibrjuno.exceptions import (
    CommutationViolated,
    InvalidInputError,
    SmallDivisorUnderflow,
)
from multibrjuno.numeric import RealScalar, refine
from multibrjuno.series import (
    SeriesLike,
    _PowerTable,
    as_series,
    commutator_residual,
    compose,
    from_terms,
    identity,
    max_abs,
    rotation,
    series_invert,
    zeros,
)
from multibrjuno.types import RotationVector

logger = logging.getLogger(__name__)


def _dtype(precision_bits: int):
    return complex if precision_bits <= 53 else object


def _working_precision(precision_bits: int):
    """mpmath context for object-dtype (mpc) coefficients"""
    if precision_bits <= 53:
        return nullcontext()
    return mpmath.mp.workprec(precision_bits)


def _convert(value, precision_bits: int):
    """Round an mpmath value to the coefficient type at precision_bits"""
    if precision_bits <= 53:
        return complex(value)
    with mpmath.mp.workprec(precision_bits):
        return mpmath.mpc(value) + 0


def _alpha_mpf(alpha: RealScalar, bits: int) -> mpmath.mpf:
    """Midpoint of alpha refined well below 2**-bits (call inside workprec(bits))"""
    mid = refine(alpha, Fraction(1, 2 ** (bits + 8))).mid
    return mpmath.mpf(mid.numerator) / mid.denominator


def multiplier_powers(alpha: RealScalar, order: int, precision_bits: int) -> List[Any]:
    """lam**n = exp(2 pi i n alpha) for n = 0..order, evaluated at twice the precision"""
    with mpmath.mp.workprec(2 * precision_bits):
        a = _alpha_mpf(alpha, 2 * precision_bits)
        powers = [mpmath.expjpi(2 * n * a) for n in range(order + 1)]
    return powers


def _check_order(order: int) -> int:
    if not 2 <= order <= DEFAULT_CONFIG.max_series_order:
        raise InvalidInputError(
            f"truncation order must be in [2, {DEFAULT_CONFIG.max_series_order}], got {order}"
        )
    return order


@dataclass(frozen=True, eq=False)
class PowerSeriesGerm:
    """Truncated germ lam z + sum_{n>=2} a_n z**n with lam = exp(2 pi i alpha)"""
    alpha: RealScalar
    coeffs: np.ndarray          # index n holds a_n; coeffs[1] == lam, coeffs[0] == 0
    precision_bits: int = 53

    @classmethod
    def from_coefficients(
        cls,
        alpha: RealScalar,
        higher: Dict[int, complex],
        order: Optional[int] = None,
        precision_bits: Optional[int] = None,
    ) -> "PowerSeriesGerm":
        """Germ with linear coefficient exp(2 pi i alpha) and the given a_n, n >= 2"""
        order = _check_order(order or DEFAULT_CONFIG.series_order)
        precision_bits = precision_bits or DEFAULT_CONFIG.series_precision_bits
        if any(n < 2 for n in higher):
            raise InvalidInputError("only coefficients a_n with n >= 2 may be given")
        with _working_precision(precision_bits):
            coeffs = from_terms(
                [(n, _convert(c, precision_bits)) for n, c in higher.items()],
                order,
                _dtype(precision_bits),
            )
        lam = multiplier_powers(alpha, 1, precision_bits)[1]
        coeffs[1] = _convert(lam, precision_bits)
        return cls(alpha, coeffs, precision_bits)

    @classmethod
    def rotation(
        cls, alpha: RealScalar, order: Optional[int] = None, precision_bits: Optional[int] = None
    ) -> "PowerSeriesGerm":
        return cls.from_coefficients(alpha, {}, order, precision_bits)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lam(self):
        return self.coeffs[1]

    def truncated(self, order: int) -> np.ndarray:
        return as_series(self.coeffs, order)


@dataclass
class LinearizationResult:
    """Formal linearization h with h_1 = 1 and its diagnostics"""
    h: np.ndarray
    min_divisor: float          # smallest certified |lam**n - lam|, 2 <= n <= M
    radius_estimate: float      # math.inf when h is the identity in the window
    residual: float             # max |[z**n](f o h - h o R_alpha)|
    order: int
    tolerance: float

    @property
    def within_tolerance(self) -> bool:
        return self.residual <= self.tolerance


@dataclass
class SimultaneousResult:
    """One h tested against every germ of a commuting family"""
    linearizable: bool
    h: np.ndarray
    residuals: List[float]      # max |h^-1 o f_k o h - R_k| per germ
    commutators: Dict[Tuple[int, int], float] = field(default_factory=dict)
    linearization: Optional[LinearizationResult] = None


@dataclass
class RadiusReport:
    """Empirical Siegel radius against C_radius exp(-2 pi B)"""
    r_est: float
    r_bound: RealScalar
    ratio: float
    implied_constant: float     # r_est / exp(-2 pi B), an empirical fit
    b_value: RealScalar


# ----------------------------------------------------------------------
# Linearization
# ----------------------------------------------------------------------

def _certified_divisor(alpha: RealScalar, n: int) -> RealScalar:
    """Enclosure of |lam**n - lam| = 2 |sin(pi (n-1) alpha)|, lower end 0 if it may vanish"""
    angle = RealScalar.pi(alpha.precision_bits) * ((n - 1) * alpha)
    s = 2 * angle.sin()
    lo, hi = s.lo, s.hi
    if lo <= 0 <= hi:
        return RealScalar.from_interval(Fraction(0), max(-lo, hi), s.precision_bits)
    return RealScalar.from_interval(min(abs(lo), abs(hi)), max(abs(lo), abs(hi)), s.precision_bits)


def _root_magnitude(x, n: int) -> float:
    """|x|**(1/(n-1))"""
    if isinstance(x, (mpmath.mpc, mpmath.mpf)):
        return float(mpmath.root(abs(x), n - 1))
    return abs(complex(x)) ** (1.0 / (n - 1))


def radius_from_coefficients(h: SeriesLike, window: Optional[float] = None) -> float:
    """
    1 / max |h_n|**(1/(n-1)) over n in [ceil(window M), M], n >= 2

    Geometric coefficients h_n = c**(n-1) give exactly 1/c; vanishing
    coefficients over the whole window give math.inf.
    """
    h = as_series(h)
    window = window if window is not None else DEFAULT_CONFIG.radius_window
    M = len(h) - 1
    start = max(2, math.ceil(window * M))
    growth = max((_root_magnitude(h[n], n) for n in range(start, M + 1)), default=0.0)
    if growth == 0.0:
        return math.inf
    return 1.0 / growth


def linearize(
    f: PowerSeriesGerm,
    order: Optional[int] = None,
    tol: Optional[float] = None,
    window: Optional[float] = None,
    floor: Optional[float] = None,
) -> LinearizationResult:
    """
    Solve f o h = h o R_alpha for h = z + h_2 z**2 + ... through z**order

    Args:
        f: The germ
        order: Truncation order M (default: the germ's order)
        tol: Residual tolerance (default: config tolerance)
        window: Start of the radius window as a fraction of M
        floor: Hard lower limit for the small divisors

    Returns:
        LinearizationResult; a residual above tol is logged, not raised

    Raises:
        SmallDivisorUnderflow: If some |lam**n - lam| is certified below floor
    """
    order = _check_order(order or f.order)
    tol = tol if tol is not None else DEFAULT_CONFIG.tolerance
    floor = floor if floor is not None else DEFAULT_CONFIG.small_divisor_floor
    bits = f.precision_bits

    min_divisor = math.inf
    for n in range(2, order + 1):
        divisor = _certified_divisor(f.alpha, n)
        if divisor.hi < Fraction(floor):
            raise SmallDivisorUnderflow(
                f"|lam^{n} - lam| <= {float(divisor.hi):.3e} is below the floor {floor:.1e}; "
                f"alpha is numerically rational at this order"
            )
        min_divisor = min(min_divisor, float(divisor.lo))

    powers = multiplier_powers(f.alpha, order, bits)
    with mpmath.mp.workprec(2 * bits):
        lam = powers[1]
        divisors = [None, None] + [_convert(powers[n] - lam, bits) for n in range(2, order + 1)]
    lam_powers = np.array([_convert(p, bits) for p in powers], dtype=_dtype(bits))

    with _working_precision(bits):
        a = f.truncated(order)
        table = _PowerTable(order, a.dtype)
        h = identity(order, a.dtype)
        table.set_linear(h, 1)
        for n in range(2, order + 1):
            table.extend(h, n)
            h[n] = table.nonlinear(a, n) / divisors[n]
            table.set_linear(h, n)

        residual = max_abs(compose(a, h, order) - h * lam_powers, start=1)

    radius = radius_from_coefficients(h, window)
    if residual > tol:
        logger.warning(f"Linearization residual {residual:.3e} exceeds tolerance {tol:.1e}")
    logger.info(
        f"Linearized germ to order {order}: min divisor {min_divisor:.3e}, "
        f"radius estimate {radius:.4g}, residual {residual:.3e}"
    )
    return LinearizationResult(h, min_divisor, radius, residual, order, tol)


# ----------------------------------------------------------------------
# Commuting families
# ----------------------------------------------------------------------

def synth_commuting_family(
    h0: SeriesLike,
    alphas: RotationVector,
    order: Optional[int] = None,
    precision_bits: Optional[int] = None,
) -> List[PowerSeriesGerm]:
    """
    f_k = h0 o R_{alpha_k} o h0^-1 through z**order, one germ per rotation number

    Raises:
        InvalidInputError: If h0 does not fix 0 tangent to the identity
        DegenerateLinearTerm: From the inversion of h0
    """
    order = _check_order(order or DEFAULT_CONFIG.series_order)
    bits = precision_bits or DEFAULT_CONFIG.series_precision_bits
    with _working_precision(bits):
        base = as_series(h0, order)
        h = zeros(order, _dtype(bits))
        h[: len(base)] = [_convert(c, bits) if bits > 53 else complex(c) for c in base]
        if h[0] != 0 or h[1] != 1:
            raise InvalidInputError("h0 must be z + O(z^2)")
        h_inv = series_invert(h, order)
        family = []
        for alpha in alphas:
            lam = _convert(multiplier_powers(alpha, 1, bits)[1], bits)
            coeffs = compose(h, lam * h_inv, order)
            coeffs[1] = lam
            family.append(PowerSeriesGerm(alpha, coeffs, bits))
    logger.info(f"Synthesized {len(family)} commuting germs to order {order}")
    return family


def simultaneous_check(
    germs: Sequence[PowerSeriesGerm],
    order: Optional[int] = None,
    tol: Optional[float] = None,
) -> SimultaneousResult:
    """
    Linearize germs[0] and test whether the same h conjugates every germ to its rotation

    Raises:
        InvalidInputError: On an empty family
        CommutationViolated: If some pair does not commute within tol
        SmallDivisorUnderflow: From the linearization
    """
    if not germs:
        raise InvalidInputError("the family is empty")
    order = _check_order(order or min(g.order for g in germs))
    tol = tol if tol is not None else DEFAULT_CONFIG.tolerance
    bits = max(g.precision_bits for g in germs)

    commutators: Dict[Tuple[int, int], float] = {}
    with _working_precision(bits):
        for i in range(len(germs)):
            for j in range(i + 1, len(germs)):
                r = commutator_residual(germs[i].truncated(order), germs[j].truncated(order), order)
                commutators[(i + 1, j + 1)] = r
                if r > tol:
                    raise CommutationViolated(
                        f"germs {i + 1} and {j + 1} do not commute: residual {r:.3e} > {tol:.1e}"
                    )

    result = linearize(germs[0], order, tol)
    with _working_precision(bits):
        h_inv = series_invert(result.h, order)
        residuals = []
        for g in germs:
            conjugated = compose(h_inv, compose(g.truncated(order), result.h, order), order)
            conjugated = conjugated - rotation(g.lam, order, conjugated.dtype)
            residuals.append(max_abs(conjugated, start=1))

    linearizable = all(r <= tol for r in residuals)
    logger.info(
        f"Simultaneous check of {len(germs)} germs: "
        f"{'linearizable' if linearizable else 'not linearizable'} by one h "
        f"(worst residual {max(residuals):.3e})"
    )
    return SimultaneousResult(linearizable, result.h, residuals, commutators, result)


def radius_estimate_vs_bound(
    result: LinearizationResult,
    b_value,
    consts: Optional[ConstantsConfig] = None,
) -> RadiusReport:
    """
    Compare the empirical radius with C_radius exp(-2 pi B)

    The ratio measures the universal constant empirically; nothing is asserted about it.
    """
    consts = consts or DEFAULT_CONFIG.constants
    bound = siegel_radius_bound(b_value, consts)
    b = b_value if isinstance(b_value, RealScalar) else RealScalar.exact(Fraction(b_value))
    r_bound = float(bound)
    ratio = math.inf if math.isinf(result.radius_estimate) else result.radius_estimate / r_bound
    return RadiusReport(
        r_est=result.radius_estimate,
        r_bound=bound,
        ratio=ratio,
        implied_constant=ratio * consts.c_radius,
        b_value=b,
    )


# ----------------------------------------------------------------------
# JSON I/O
# ----------------------------------------------------------------------

def series_to_json(c: SeriesLike) -> Dict[str, Any]:
    """{"order": M, "coefficients": [{"n": n, "c": [re, im]}, ...]} for n >= 1"""
    c = as_series(c)
    rows = []
    for n in range(1, len(c)):
        value = complex(c[n])
        rows.append({"n": n, "c": [value.real, value.imag]})
    return {"order": len(c) - 1, "coefficients": rows}


def series_from_json(data: Dict[str, Any]) -> np.ndarray:
    try:
        order = int(data["order"])
        terms = [(int(row["n"]), complex(row["c"][0], row["c"][1])) for row in data["coefficients"]]
    except (KeyError, IndexError, TypeError, ValueError) as e:
        raise InvalidInputError(f"malformed series JSON: {e}") from e
    return from_terms(terms, order)


def germ_to_json(germ: PowerSeriesGerm) -> Dict[str, Any]:
    """Germ with its rotation number in the exact-real grammar when available"""
    if germ.alpha.source is not None:
        alpha = germ.alpha.source.to_text()
    else:
        alpha = mpmath.nstr(mpmath.mpf(float(germ.alpha)), 17)
    return {"alpha": alpha, "series": series_to_json(germ.coeffs)}


def germ_from_json(data: Dict[str, Any], bits: Optional[int] = None) -> PowerSeriesGerm:
    """Germ from germ_to_json output; the linear coefficient is recomputed from alpha"""
    try:
        alpha = RealScalar.exact(str(data["alpha"]), bits)
    except KeyError as e:
        raise InvalidInputError("germ JSON needs an 'alpha' entry") from e
    coeffs = series_from_json(data.get("series", {}))
    higher = {n: coeffs[n] for n in range(2, len(coeffs)) if coeffs[n] != 0}
    return PowerSeriesGerm.from_coefficients(alpha, higher, len(coeffs) - 1)
