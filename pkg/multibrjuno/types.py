"""
Type definitions for multi-brjuno
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, List, Optional, Sequence, Tuple, Union

from multibrjuno.exceptions import InvalidInputError
from multibrjuno.numeric import RealScalar, certified_floor, compare
from multibrjuno.surd import QuadraticSurd

logger = logging.getLogger(__name__)

Word = Tuple[int, ...]
RealLike = Union[RealScalar, QuadraticSurd, Fraction, int, str]


def _as_scalar(value: RealLike, bits: Optional[int]) -> RealScalar:
    if isinstance(value, RealScalar):
        return value
    if isinstance(value, float):
        value = Fraction(value)
    return RealScalar.exact(value, bits)


@dataclass(frozen=True)
class RotationVector:
    """
    N-tuple of reals in (0, 1)

    The coordinates are expected to be irrational and rationally independent;
    a violation surfaces later as ExactTie or UndecidableAtPrecision.
    Use `of`, `parse` or `normalized` to build a validated vector.
    """
    alphas: Tuple[RealScalar, ...]

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(self.alphas))
        if not self.alphas:
            raise InvalidInputError("a rotation vector needs at least one coordinate")

    @classmethod
    def of(
        cls,
        values: Sequence[RealLike],
        bits: Optional[int] = None,
        max_bits: Optional[int] = None,
    ) -> "RotationVector":
        """Build a vector and certify every coordinate lies in (0, 1)"""
        alphas = tuple(_as_scalar(v, bits) for v in values)
        for i, a in enumerate(alphas, 1):
            if compare(a, 0, max_bits) <= 0 or compare(a, 1, max_bits) >= 0:
                raise InvalidInputError(
                    f"alpha_{i} = {a!r} is outside (0, 1); use RotationVector.normalized"
                )
        return cls(alphas)

    @classmethod
    def parse(
        cls, text: str, bits: Optional[int] = None, max_bits: Optional[int] = None
    ) -> "RotationVector":
        """Comma-separated exact reals, e.g. "golden" or "(0+1*sqrt(2))/1-1,sqrt3m1" """
        tokens = [t for t in text.split(",") if t.strip()]
        if not tokens:
            raise InvalidInputError(f"no coordinates in {text!r}")
        return cls.of(tokens, bits, max_bits)

    @classmethod
    def normalized(
        cls, values: Sequence[RealLike], bits: Optional[int] = None, max_bits: Optional[int] = None
    ) -> "RotationVector":
        """Reduce every coordinate mod 1, logging each change"""
        reduced = []
        for i, v in enumerate(values, 1):
            a = _as_scalar(v, bits)
            shift = certified_floor(a, max_bits)
            if shift != 0:
                logger.info(f"alpha_{i} reduced mod 1 by {shift}")
                a = a - shift
            reduced.append(a)
        return cls.of(reduced, bits, max_bits)

    @property
    def N(self) -> int:
        return len(self.alphas)

    def component(self, index: int) -> RealScalar:
        """1-based coordinate access, matching pivot indices in words"""
        return self.alphas[index - 1]

    def __iter__(self) -> Iterator[RealScalar]:
        return iter(self.alphas)

    def __len__(self) -> int:
        return self.N

    def to_floats(self) -> List[float]:
        return [float(a) for a in self.alphas]


@dataclass(frozen=True)
class GaussStep:
    """One application of the N-dimensional Gauss map"""
    w: int                          # pivot index, 1-based
    a: Tuple[int, ...]              # nearest integers a_i to hatted_i / alpha_w
    eps: Tuple[int, ...]            # signs of a_i * alpha_w - hatted_i
    image: RotationVector           # alpha tilde, every coordinate in (0, 1/2)
    hatted: Tuple[RealScalar, ...]  # alpha hat: alpha_i for i != w, 1 at w
    source: RotationVector          # the tuple the step was applied to

    @property
    def pivot(self) -> RealScalar:
        """alpha_w of the source tuple"""
        return self.source.component(self.w)


@dataclass(frozen=True)
class BrjunoTerm:
    """One summand pi_n * summand(alpha^(n)_{w(n)})"""
    depth: int
    w: int
    weight: RealScalar   # pi_n
    pivot: RealScalar    # alpha^(n)_{w(n)}
    value: RealScalar


@dataclass
class BrjunoSum:
    """Partial sum of B or Bprime along a finite word"""
    variant: str
    word: Word
    terms: List[BrjunoTerm]
    value: RealScalar

    @property
    def depth(self) -> int:
        return len(self.word)

    @property
    def increments(self) -> List[float]:
        return [float(t.value) for t in self.terms]


@dataclass
class WordSearchResult:
    """Finite-depth minimum of a Brjuno sum over all words"""
    best_word: Word
    best_value: RealScalar
    nodes_expanded: int
    proof: bool                           # best_value is the exact minimum over N**depth words
    depth: int = 0
    variant: str = "B"
    nodes_pruned: int = 0
    excluded: List[Tuple[Word, str]] = field(default_factory=list)

    @property
    def infimum_statement(self) -> str:
        """The infimum over infinite words is only bounded below by the finite minimum"""
        lo, _ = self.best_value.decimal_bounds(15)
        return f">= {lo}"


@dataclass
class DiophParams:
    """Parameters of the Diophantine class DC_N(C, tau) and its dual form"""
    N: int
    C: Fraction
    tau: Fraction
    tau_prime: Optional[Fraction] = None
    Q_max: int = 1000
    K_max: int = 10

    def __post_init__(self):
        self.C, self.tau = Fraction(self.C), Fraction(self.tau)
        if self.N < 1:
            raise InvalidInputError(f"N must be positive, got {self.N}")
        if self.C <= 0 or self.tau <= 0:
            raise InvalidInputError(f"C and tau must be positive, got C={self.C}, tau={self.tau}")
        if self.tau_prime is None:
            self.tau_prime = self.N * self.tau + self.N - 1
        self.tau_prime = Fraction(self.tau_prime)
        if self.tau_prime <= 0:
            raise InvalidInputError(f"tau_prime must be positive, got {self.tau_prime}")
        if self.Q_max < 1 or self.K_max < 1:
            raise InvalidInputError("Q_max and K_max must be at least 1")


@dataclass
class DCResult:
    """Outcome of a scan of max_j dist(q alpha_j, Z) * q**tau over 1 <= q <= Q_max"""
    holds: bool
    q: int                      # witness: q with the smallest margin
    p: Tuple[int, ...]          # nearest integers to q alpha_j at the witness
    margin: RealScalar          # q**tau * max_j dist(q alpha_j, Z) at the witness
    C: Optional[Fraction]       # tested constant (None for a pure estimate)
    tau: Fraction
    Q_max: int
    failures: int = 0           # number of q below C


@dataclass
class DualFormResult:
    """Outcome of a scan of |p.alpha + q| * |(p, q)|**tau_prime over nonzero integer vectors"""
    holds: bool
    p: Tuple[int, ...]
    q: int
    value: RealScalar           # |p.alpha + q| at the witness
    margin: RealScalar          # value * sup-norm**tau_prime
    C_prime: Fraction
    tau_prime: Fraction
    K_max: int
    vectors_scanned: int = 0


@dataclass(frozen=True)
class AppendixStep:
    """One pivot choice of the constructive word selector"""
    depth: int
    w: int
    q: int                      # nearest integer to 1/alpha_w
    beta: RealScalar            # 1/alpha_w - q, |beta| = alpha tilde_w
    j: int                      # next pivot
    test: str                   # "direct", "threshold", "fallback", "greedy" or "forced"
    tested_index: Optional[int] # k used in the threshold test
    C_n: RealScalar


@dataclass(frozen=True)
class EnvelopeRow:
    """Brjuno increment at one depth against the explicit envelope"""
    depth: int
    weight: RealScalar          # pi_n
    increment: RealScalar       # pi_n log(1 / alpha^(n)_{w(n)})
    envelope: RealScalar
    within: bool                # not refuted at working precision


@dataclass
class AppendixWordTrace:
    """Word produced by the appendix selector with its constants"""
    word: Word
    mode: str
    steps: List[AppendixStep]
    kappa: Optional[RealScalar]
    k_fit: Optional[RealScalar] = None
    tau_prime: Optional[Fraction] = None
    envelope: List[EnvelopeRow] = field(default_factory=list)

    @property
    def within_envelope(self) -> bool:
        return all(row.within for row in self.envelope)
