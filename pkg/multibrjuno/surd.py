"""
Exact quadratic surds a + b*sqrt(d)

Rationals are surds with b == 0 (stored with d == 1). Arithmetic stays exact
inside one field Q(sqrt(d)); mixing two different radicands returns None so
that callers can fall back to interval arithmetic.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt
from typing import Optional, Tuple, Union

Rational = Union[int, Fraction]


@lru_cache(maxsize=1024)
def squarefree_split(d: int) -> Tuple[int, int]:
    """Write d = s^2 * core with core squarefree; return (s, core)"""
    if d <= 0:
        raise ValueError(f"radicand must be positive, got {d}")
    s, core = 1, d
    f = 2
    while f * f <= core:
        while core % (f * f) == 0:
            core //= f * f
            s *= f
        f += 1
    return s, core


def _sign(x: Rational) -> int:
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class QuadraticSurd:
    """Exact real a + b*sqrt(d), d squarefree (d == 1 iff b == 0)"""

    a: Fraction
    b: Fraction = Fraction(0)
    d: int = 1

    def __post_init__(self):
        a, b, d = Fraction(self.a), Fraction(self.b), int(self.d)
        if b != 0:
            s, core = squarefree_split(d)
            if core == 1:
                a, b, d = a + b * s, Fraction(0), 1
            else:
                b, d = b * s, core
        if b == 0:
            d = 1
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------

    @classmethod
    def rational(cls, value: Rational) -> "QuadraticSurd":
        return cls(Fraction(value))

    @classmethod
    def from_parts(cls, p: int, q: int, d: int, r: int) -> "QuadraticSurd":
        """(p + q*sqrt(d)) / r"""
        if r == 0:
            raise ZeroDivisionError("surd denominator is zero")
        return cls(Fraction(p, r), Fraction(q, r), d)

    @classmethod
    def sqrt(cls, d: int) -> "QuadraticSurd":
        return cls(Fraction(0), Fraction(1), d)

    # ------------------------------------------------------------------
    # Predicates
    # ------------------------------------------------------------------

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def compatible(self, other: "QuadraticSurd") -> bool:
        """True when both live in one field Q(sqrt(d))"""
        return self.is_rational or other.is_rational or self.d == other.d

    def _field(self, other: "QuadraticSurd") -> int:
        return self.d if not self.is_rational else other.d

    # ------------------------------------------------------------------
    # Field operations (None on incompatible radicands)
    # ------------------------------------------------------------------

    def __neg__(self) -> "QuadraticSurd":
        return QuadraticSurd(-self.a, -self.b, self.d)

    def add(self, other: "QuadraticSurd") -> Optional["QuadraticSurd"]:
        if not self.compatible(other):
            return None
        return QuadraticSurd(self.a + other.a, self.b + other.b, self._field(other))

    def sub(self, other: "QuadraticSurd") -> Optional["QuadraticSurd"]:
        if not self.compatible(other):
            return None
        return QuadraticSurd(self.a - other.a, self.b - other.b, self._field(other))

    def mul(self, other: "QuadraticSurd") -> Optional["QuadraticSurd"]:
        if not self.compatible(other):
            return None
        d = self._field(other)
        return QuadraticSurd(
            self.a * other.a + self.b * other.b * d,
            self.a * other.b + self.b * other.a,
            d,
        )

    def inverse(self) -> "QuadraticSurd":
        if self.is_rational:
            if self.a == 0:
                raise ZeroDivisionError("inverse of exact zero")
            return QuadraticSurd(1 / self.a)
        norm = self.a * self.a - self.b * self.b * self.d
        return QuadraticSurd(self.a / norm, -self.b / norm, self.d)

    def div(self, other: "QuadraticSurd") -> Optional["QuadraticSurd"]:
        if not self.compatible(other):
            return None
        return self.mul(other.inverse())

    # ------------------------------------------------------------------
    # Exact order structure
    # ------------------------------------------------------------------

    def sign(self) -> int:
        """Exact sign via a^2 versus b^2 d"""
        sa, sb = _sign(self.a), _sign(self.b)
        if sb == 0 or sa == sb:
            return sa if sa != 0 else sb
        if sa == 0:
            return sb
        return sa if self.a * self.a > self.b * self.b * self.d else sb

    def floor(self) -> int:
        """Exact floor using integer square roots"""
        if self.is_rational:
            return self.a.numerator // self.a.denominator
        # common denominator: (P + Q sqrt(d)) / R with R > 0
        r = self.a.denominator * self.b.denominator // gcd(self.a.denominator, self.b.denominator)
        p = int(self.a * r)
        q = int(self.b * r)
        root = isqrt(q * q * self.d)
        # q sqrt(d) is irrational, so floor(-x) == -isqrt - 1
        floor_s = root if q > 0 else -root - 1
        return (p + floor_s) // r

    def nearest_integer(self) -> Tuple[int, bool]:
        """floor(x + 1/2) and whether x + 1/2 is exactly an integer"""
        shifted = QuadraticSurd(self.a + Fraction(1, 2), self.b, self.d)
        n = shifted.floor()
        return n, shifted.is_rational and shifted.a == n

    def enclose(self, bits: int) -> Tuple[Fraction, Fraction]:
        """Rational bounds lo <= x <= hi with relative width at most 2**-bits"""
        if self.is_rational:
            return self.a, self.a
        m = self.b * self.b * self.d
        n, den = m.numerator, m.denominator
        k = bits + 16
        while True:
            root = isqrt((n * den) << (2 * k))
            lo_s = Fraction(root, den << k)
            hi_s = Fraction(root + 1, den << k)
            if self.b < 0:
                lo_s, hi_s = -hi_s, -lo_s
            lo, hi = self.a + lo_s, self.a + hi_s
            if _sign(lo) == _sign(hi) != 0 and (hi - lo) <= abs(lo) / (1 << bits):
                return lo, hi
            k *= 2

    def __float__(self) -> float:
        lo, hi = self.enclose(60)
        return float((lo + hi) / 2)

    def to_text(self) -> str:
        """Render in the input grammar, "m/n" or "(p+q*sqrt(d))/r" """
        if self.is_rational:
            return f"{self.a.numerator}/{self.a.denominator}"
        r = self.a.denominator * self.b.denominator // gcd(self.a.denominator, self.b.denominator)
        p, q = int(self.a * r), int(self.b * r)
        return f"({p}{'+' if q > 0 else '-'}{abs(q)}*sqrt({self.d}))/{r}"

    def __str__(self) -> str:
        if self.is_rational:
            return str(self.a)
        return f"{self.a} + {self.b}*sqrt({self.d})"
