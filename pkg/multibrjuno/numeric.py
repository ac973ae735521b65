"""
Adaptive-precision real enclosures

A RealScalar is an outward-rounded interval [lo, hi] with dyadic endpoints,
optionally backed by an exact quadratic surd. Values produced by arithmetic
remember how to recompute themselves, so any of them can be refined by
re-evaluation at a higher precision. Every sign, floor and nearest-integer
decision goes through the certified helpers at the bottom of this module.
"""
import contextvars
import logging
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from typing import Callable, Dict, Iterable, Iterator, Optional, Tuple, Union

from mpmath import libmp
from mpmath.libmp import libmpi

from multibrjuno.config import DEFAULT_CONFIG
from multibrjuno.exceptions import (
    ExactTie,
    InvalidInputError,
    PrecisionExhausted,
    UndecidableAtPrecision,
)
from multibrjuno.surd import QuadraticSurd

logger = logging.getLogger(__name__)

Interval = Tuple[tuple, tuple]  # raw mpf endpoints (lo, hi)
Number = Union["RealScalar", QuadraticSurd, Fraction, int]

_FLOOR = libmp.round_floor
_CEILING = libmp.round_ceiling


def _fraction_bounds(lo: Fraction, hi: Fraction, bits: int) -> Interval:
    """Round rational bounds outward to dyadic endpoints"""
    return (
        libmp.from_rational(lo.numerator, lo.denominator, bits, _FLOOR),
        libmp.from_rational(hi.numerator, hi.denominator, bits, _CEILING),
    )


def _to_fraction(value: tuple) -> Fraction:
    if value in (libmp.finf, libmp.fninf, libmp.fnan):
        raise OverflowError("unbounded enclosure endpoint")
    p, q = libmp.to_rational(value)
    return Fraction(p, q)


@dataclass(frozen=True)
class RealScalar:
    """Enclosure of a real number with on-demand refinement"""

    interval: Interval
    source: Optional[QuadraticSurd] = None
    precision_bits: int = DEFAULT_CONFIG.precision_bits
    _rebuild: Optional[Callable[[int], "RealScalar"]] = field(
        default=None, repr=False, compare=False
    )
    _memo: Dict[int, "RealScalar"] = field(default_factory=dict, repr=False, compare=False)

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------

    @classmethod
    def exact(cls, value: Union[QuadraticSurd, Fraction, int, str], bits: Optional[int] = None) -> "RealScalar":
        """Enclose an exact rational or quadratic surd"""
        if isinstance(value, str):
            from multibrjuno.syntax import parse_exact
            value = parse_exact(value)
        if not isinstance(value, QuadraticSurd):
            value = QuadraticSurd(Fraction(value))
        bits = bits or DEFAULT_CONFIG.precision_bits
        lo, hi = value.enclose(bits)
        return cls(_fraction_bounds(lo, hi, bits), value, bits)

    @classmethod
    def from_interval(cls, lo: Fraction, hi: Fraction, bits: Optional[int] = None) -> "RealScalar":
        """Bare enclosure that cannot be refined"""
        if lo > hi:
            raise InvalidInputError(f"empty interval [{lo}, {hi}]")
        bits = bits or DEFAULT_CONFIG.precision_bits
        return cls(_fraction_bounds(Fraction(lo), Fraction(hi), bits), None, bits)

    @classmethod
    def pi(cls, bits: Optional[int] = None) -> "RealScalar":
        bits = bits or DEFAULT_CONFIG.precision_bits
        iv = (libmp.mpf_pi(bits, _FLOOR), libmp.mpf_pi(bits, _CEILING))
        return cls(iv, None, bits, _rebuild=cls.pi)

    # ------------------------------------------------------------------
    # Views
    # ------------------------------------------------------------------

    @property
    def lo(self) -> Fraction:
        return _to_fraction(self.interval[0])

    @property
    def hi(self) -> Fraction:
        return _to_fraction(self.interval[1])

    @property
    def is_bounded(self) -> bool:
        return all(v not in (libmp.finf, libmp.fninf, libmp.fnan) for v in self.interval)

    @property
    def width(self) -> Union[Fraction, float]:
        if not self.is_bounded:
            return float("inf")
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def is_exact(self) -> bool:
        return self.source is not None

    def __float__(self) -> float:
        if not self.is_bounded:
            return float("nan")
        return float(self.mid)

    def contains(self, value: Fraction) -> bool:
        return self.lo <= value <= self.hi

    def decimal_bounds(self, digits: int = 25) -> Tuple[str, str]:
        return (
            libmp.to_str(self.interval[0], digits),
            libmp.to_str(self.interval[1], digits),
        )

    def __repr__(self) -> str:
        lo, hi = self.decimal_bounds(12)
        tag = f", exact={self.source}" if self.source is not None else ""
        return f"RealScalar([{lo}, {hi}], bits={self.precision_bits}{tag})"

    # ------------------------------------------------------------------
    # Refinement
    # ------------------------------------------------------------------

    def at_precision(self, bits: int) -> "RealScalar":
        """The same real re-enclosed at `bits` (memoized; self if not refinable)"""
        if bits <= self.precision_bits:
            return self
        cached = self._memo.get(bits)
        if cached is not None:
            return cached
        if self.source is not None:
            result = RealScalar.exact(self.source, bits)
        elif self._rebuild is not None:
            result = self._rebuild(bits)
        else:
            return self
        self._memo[bits] = result
        return result

    @property
    def refinable(self) -> bool:
        return self.source is not None or self._rebuild is not None

    def detach(self) -> "RealScalar":
        """Interval-only view of this value (refinable, but without the exact source)"""
        return RealScalar(
            self.interval, None, self.precision_bits,
            _rebuild=lambda bits: self.at_precision(bits).detach(),
        )

    # ------------------------------------------------------------------
    # Arithmetic
    # ------------------------------------------------------------------

    def __add__(self, other: Number) -> "RealScalar":
        return _binary("add", self, coerce(other))

    def __radd__(self, other: Number) -> "RealScalar":
        return _binary("add", coerce(other), self)

    def __sub__(self, other: Number) -> "RealScalar":
        return _binary("sub", self, coerce(other))

    def __rsub__(self, other: Number) -> "RealScalar":
        return _binary("sub", coerce(other), self)

    def __mul__(self, other: Number) -> "RealScalar":
        return _binary("mul", self, coerce(other))

    def __rmul__(self, other: Number) -> "RealScalar":
        return _binary("mul", coerce(other), self)

    def __truediv__(self, other: Number) -> "RealScalar":
        return _binary("div", self, coerce(other))

    def __rtruediv__(self, other: Number) -> "RealScalar":
        return _binary("div", coerce(other), self)

    def __neg__(self) -> "RealScalar":
        return _unary("neg", self)

    def __abs__(self) -> "RealScalar":
        return -self if certified_sign(self) < 0 else self

    def __pow__(self, exponent: Union[int, Fraction, float, "RealScalar"]) -> "RealScalar":
        return power(self, exponent)

    def log(self) -> "RealScalar":
        return _unary("log", self)

    def exp(self) -> "RealScalar":
        return _unary("exp", self)

    def sin(self) -> "RealScalar":
        return _unary("sin", self)

    def loglog_e(self) -> "RealScalar":
        """log log(e / x) = log(1 - log x), positive on (0, 1)"""
        return (1 - self.log()).log()


def coerce(value: Number) -> RealScalar:
    if isinstance(value, RealScalar):
        return value
    if isinstance(value, float):
        value = Fraction(value)
    return RealScalar.exact(value)


# ----------------------------------------------------------------------
# Operation kernels
# ----------------------------------------------------------------------

_EXACT_BINARY = {
    "add": QuadraticSurd.add,
    "sub": QuadraticSurd.sub,
    "mul": QuadraticSurd.mul,
    "div": QuadraticSurd.div,
}

_INTERVAL_BINARY = {
    "add": libmpi.mpi_add,
    "sub": libmpi.mpi_sub,
    "mul": libmpi.mpi_mul,
    "div": libmpi.mpi_div,
}

_INTERVAL_UNARY = {
    "neg": lambda s, prec: libmpi.mpi_neg(s),
    "log": libmpi.mpi_log,
    "exp": libmpi.mpi_exp,
    "sin": libmpi.mpi_sin,
}


def _binary(op: str, x: RealScalar, y: RealScalar) -> RealScalar:
    bits = max(x.precision_bits, y.precision_bits)
    if op == "div":
        y = _separated_from_zero(y)
        bits = max(bits, y.precision_bits)
    if x.source is not None and y.source is not None:
        source = _EXACT_BINARY[op](x.source, y.source)
        if source is not None:
            return RealScalar.exact(source, bits)
    xb, yb = x.at_precision(bits), y.at_precision(bits)
    interval = _INTERVAL_BINARY[op](xb.interval, yb.interval, bits)
    return RealScalar(interval, None, bits, _rebuild=partial(_rebuild_binary, op, x, y))


def _rebuild_binary(op: str, x: RealScalar, y: RealScalar, bits: int) -> RealScalar:
    return _binary(op, x.at_precision(bits), y.at_precision(bits))


def _unary(op: str, x: RealScalar) -> RealScalar:
    if op == "neg" and x.source is not None:
        return RealScalar.exact(-x.source, x.precision_bits)
    if op == "log":
        x = _certified_positive(x)
        if x.source is not None and x.source == QuadraticSurd(Fraction(1)):
            return RealScalar.exact(0, x.precision_bits)
    bits = x.precision_bits
    interval = _INTERVAL_UNARY[op](x.interval, bits)
    return RealScalar(interval, None, bits, _rebuild=partial(_rebuild_unary, op, x))


def _rebuild_unary(op: str, x: RealScalar, bits: int) -> RealScalar:
    return _unary(op, x.at_precision(bits))


def fsum(items: Iterable[Number]) -> RealScalar:
    """n-ary sum with one recomputation level"""
    terms = [coerce(t) for t in items]
    if not terms:
        return RealScalar.exact(0)
    bits = max(t.precision_bits for t in terms)
    if all(t.source is not None for t in terms):
        total = QuadraticSurd(Fraction(0))
        for t in terms:
            total = total.add(t.source) if total is not None else None
        if total is not None:
            return RealScalar.exact(total, bits)
    interval = (libmp.fzero, libmp.fzero)
    for t in terms:
        interval = libmpi.mpi_add(interval, t.at_precision(bits).interval, bits)
    return RealScalar(
        interval, None, bits,
        _rebuild=lambda b: fsum([t.at_precision(b) for t in terms]),
    )


def fprod(items: Iterable[Number]) -> RealScalar:
    result = RealScalar.exact(1)
    for t in items:
        result = result * coerce(t)
    return result


def power(x: RealScalar, exponent: Union[int, Fraction, float, RealScalar]) -> RealScalar:
    """x ** exponent; integer exponents multiply, real exponents go through exp(log)"""
    if not isinstance(exponent, RealScalar):
        exponent = Fraction(exponent)
        if exponent.denominator == 1 and exponent >= 0:
            result = RealScalar.exact(1, x.precision_bits)
            for _ in range(int(exponent)):
                result = result * x
            return result
    return (coerce(exponent) * x.log()).exp()


# ----------------------------------------------------------------------
# Certified decisions
# ----------------------------------------------------------------------

_PRECISION_CAP = contextvars.ContextVar("precision_cap", default=None)


@contextmanager
def precision_cap(max_bits: Optional[int]) -> Iterator[None]:
    """
    Precision cap for decisions made without an explicit max_bits

    Covers the operators (division, log, abs) that cannot take one. None keeps
    the enclosing cap. The cap is per thread; worker code enters its own.

    Example:
        >>> with precision_cap(256):
        ...     total = brjuno_partial(alpha, word)
    """
    token = _PRECISION_CAP.set(max_bits if max_bits is not None else _PRECISION_CAP.get())
    try:
        yield
    finally:
        _PRECISION_CAP.reset(token)


def effective_max_bits(max_bits: Optional[int] = None) -> int:
    """max_bits if given, else the enclosing precision_cap, else the configured cap"""
    return max_bits or _PRECISION_CAP.get() or DEFAULT_CONFIG.max_precision_bits


def _escalate(x: RealScalar, bits: int, max_bits: int, what: str) -> Tuple[RealScalar, int]:
    if bits >= max_bits or not x.refinable:
        raise UndecidableAtPrecision(
            f"{what} undecidable at {bits} bits for {x!r}; "
            f"inputs may be rationally dependent"
        )
    bits = min(2 * bits, max_bits)
    logger.debug(f"Escalating precision to {bits} bits for {what}")
    return x.at_precision(bits), bits


def refine(x: RealScalar, target_width: Union[float, Fraction], max_bits: Optional[int] = None) -> RealScalar:
    """
    Refine an enclosure to width <= target_width

    Raises:
        PrecisionExhausted: if the precision cap is hit first
    """
    if not target_width > 0:
        raise InvalidInputError(f"target_width must be positive, got {target_width}")
    target = Fraction(target_width)
    cap = effective_max_bits(max_bits)
    current, bits = x, x.precision_bits
    while current.width > target:
        if bits >= cap:
            raise PrecisionExhausted(
                f"width {float(current.width):.3e} > {float(target):.3e} at the {cap}-bit cap"
            )
        bits = min(2 * bits, cap)
        current = x.at_precision(bits)
    return current


def _locate_sign(x: RealScalar, max_bits: Optional[int]) -> Tuple[int, RealScalar]:
    """Sign of a non-exact x with the refinement that decided it"""
    cap, current, bits = effective_max_bits(max_bits), x, x.precision_bits
    while True:
        lo, hi = current.interval
        if libmp.mpf_cmp(lo, libmp.fzero) > 0:
            return 1, current
        if libmp.mpf_cmp(hi, libmp.fzero) < 0:
            return -1, current
        if lo == hi == libmp.fzero:
            return 0, current
        current, bits = _escalate(x, bits, cap, "sign")


def _separated_from_zero(x: RealScalar, max_bits: Optional[int] = None) -> RealScalar:
    """A refinement of x whose enclosure excludes zero"""
    if x.source is not None:
        if x.source.sign() == 0:
            raise ZeroDivisionError("division by exact zero")
        return x
    sign, current = _locate_sign(x, max_bits)
    if sign == 0:
        raise ZeroDivisionError("division by a certified zero")
    return current


def _certified_positive(x: RealScalar, max_bits: Optional[int] = None) -> RealScalar:
    if x.source is not None:
        if x.source.sign() <= 0:
            raise InvalidInputError(f"logarithm of a nonpositive value {x!r}")
        return x
    sign, current = _locate_sign(x, max_bits)
    if sign <= 0:
        raise InvalidInputError(f"logarithm of a nonpositive value {x!r}")
    return current


def certified_sign(x: RealScalar, max_bits: Optional[int] = None) -> int:
    """
    The true sign of x

    Raises:
        UndecidableAtPrecision: if a non-exact enclosure straddles 0 at max precision
    """
    if x.source is not None:
        return x.source.sign()
    return _locate_sign(x, max_bits)[0]


def compare(a: Number, b: Number, max_bits: Optional[int] = None) -> int:
    """Certified sign of a - b"""
    return certified_sign(coerce(a) - coerce(b), max_bits)


def certified_floor(x: RealScalar, max_bits: Optional[int] = None) -> int:
    if x.source is not None:
        return x.source.floor()
    cap, current, bits = effective_max_bits(max_bits), x, x.precision_bits
    while True:
        if current.is_bounded:
            lo, hi = current.lo, current.hi
            n = lo.numerator // lo.denominator
            if hi < n + 1:
                return n
        current, bits = _escalate(x, bits, cap, "floor")


def certified_nearest_integer(x: RealScalar, max_bits: Optional[int] = None) -> int:
    """
    floor(x + 1/2), certified

    Raises:
        ExactTie: x is exactly a half-integer
        UndecidableAtPrecision: the enclosure keeps containing a half-integer
    """
    if x.source is not None:
        n, tie = x.source.nearest_integer()
        if tie:
            raise ExactTie(f"{x.source} is exactly half-way between two integers")
        return n
    half = Fraction(1, 2)
    cap, current, bits = effective_max_bits(max_bits), x, x.precision_bits
    while True:
        if current.is_bounded:
            lo, hi = current.lo + half, current.hi + half
            n = lo.numerator // lo.denominator
            if n < lo and hi < n + 1:
                return n
        current, bits = _escalate(x, bits, cap, "nearest integer")
