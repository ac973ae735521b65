"""
Brjuno-type sums along words

B sums pi_n log(1/alpha^(n)_{w(n)}); Bprime sums pi_n log log(e/alpha^(n)_{w(n)}),
where pi_0 = 1 and pi_{n+1} = pi_n alpha^(n)_{w(n)}. Every summand is positive,
so a prefix sum bounds all of its extensions from below; the minimizer is a
best-first branch-and-bound over words built on that fact.
"""
import heapq
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from multibrjuno.config import ConstantsConfig, DEFAULT_CONFIG
from multibrjuno.exceptions import (
    ExactTie,
    InvalidInputError,
    MultiBrjunoError,
    UndecidableAtPrecision,
)
from multibrjuno.gauss import classical_gauss_step, gauss_orbit, gauss_step
from multibrjuno.numeric import (
    RealScalar,
    certified_sign,
    coerce,
    compare,
    fprod,
    fsum,
    precision_cap,
)
from multibrjuno.types import BrjunoSum, BrjunoTerm, RotationVector, Word, WordSearchResult

logger = logging.getLogger(__name__)

VARIANTS = ("B", "Bprime")
REGIMES = ("log", "loglog")


def _check_variant(variant: str) -> None:
    if variant not in VARIANTS:
        raise InvalidInputError(f"variant must be one of {VARIANTS}, got {variant!r}")


def summand(x: RealScalar, variant: str = "B") -> RealScalar:
    """log(1/x) for B, log log(e/x) for Bprime"""
    _check_variant(variant)
    if variant == "B":
        return -x.log()
    return x.loglog_e()


def brjuno_partial(
    alpha: RotationVector,
    word: Sequence[int],
    variant: str = "B",
    max_bits: Optional[int] = None,
) -> BrjunoSum:
    """
    Partial sum of B or Bprime along a finite word

    The empty word gives the exact value 0 with no terms.

    Raises:
        InvalidInputError: On an unknown variant
        The orbit errors of gauss_orbit, with the failing depth attached

    Example:
        >>> golden = RotationVector.parse("golden")
        >>> round(float(brjuno_partial(golden, (1,) * 60).value), 9)
        1.443635475
    """
    _check_variant(variant)
    word = tuple(word)
    steps = gauss_orbit(alpha, word, max_bits)

    terms: List[BrjunoTerm] = []
    weight = RealScalar.exact(1)
    with precision_cap(max_bits):
        for n, step in enumerate(steps):
            pivot = step.pivot
            terms.append(BrjunoTerm(n, step.w, weight, pivot, weight * summand(pivot, variant)))
            weight = weight * pivot

    return BrjunoSum(variant, word, terms, fsum(t.value for t in terms))


def classical_brjuno_partial(x: RealScalar, depth: int, variant: str = "B") -> BrjunoSum:
    """
    One-variable B(x) or Bprime(x) along the regular continued fraction

    Summands beta_{n-1} log(1/x_n) with x_{n+1} = {1/x_n} and beta_n = x_0 ... x_n.
    For the golden mean the B series converges to phi**2 log(phi).
    """
    _check_variant(variant)
    if depth < 0:
        raise InvalidInputError(f"depth must be nonnegative, got {depth}")

    terms: List[BrjunoTerm] = []
    weight, current = RealScalar.exact(1), x
    for n in range(depth):
        terms.append(BrjunoTerm(n, 1, weight, current, weight * summand(current, variant)))
        weight = weight * current
        _, current = classical_gauss_step(current)

    return BrjunoSum(variant, (1,) * depth, terms, fsum(t.value for t in terms))


def rotation_density(alpha: RotationVector, word: Sequence[int]) -> RealScalar:
    """Product alpha^(0)_{w(0)} ... alpha^(n)_{w(n)} along the word (1 for the empty word)"""
    return fprod(step.pivot for step in gauss_orbit(alpha, word))


# ----------------------------------------------------------------------
# Branch-and-bound minimization over words
# ----------------------------------------------------------------------

@dataclass
class _Node:
    word: Word
    tuple_: RotationVector
    weight: RealScalar
    value: RealScalar


def _expand(node: _Node, w: int, variant: str, max_bits: Optional[int]):
    """Child of node along pivot w, or the failure message"""
    try:
        with precision_cap(max_bits):
            step = gauss_step(node.tuple_, w, max_bits)
            pivot = step.pivot
            term = node.weight * summand(pivot, variant)
            return _Node(node.word + (w,), step.image, node.weight * pivot, node.value + term)
    except MultiBrjunoError as e:
        return f"{type(e).__name__}: {e}"


def _at_least(
    node: _Node, incumbent: _Node, max_bits: Optional[int], strict: bool = False
) -> bool:
    """node.value >= incumbent.value (> when strict), certified; False when undecidable"""
    if node.value.lo > incumbent.value.hi or (not strict and node.value.lo == incumbent.value.hi):
        return True
    try:
        order = compare(node.value, incumbent.value, max_bits)
        return order > 0 if strict else order >= 0
    except UndecidableAtPrecision:
        return False


def brjuno_minimize(
    alpha: RotationVector,
    depth: int,
    variant: str = "B",
    threads: Optional[int] = None,
    max_bits: Optional[int] = None,
) -> WordSearchResult:
    """
    Minimum of brjuno_partial over all N**depth words of length depth

    Best-first search keyed by the lower end of the prefix enclosure; a prefix
    is pruned once its value is certified not to beat the incumbent. Children
    are expanded in parallel when threads > 1, but the heap is only touched by
    the calling thread, so best_word and best_value do not depend on threads.

    Args:
        alpha: Tuple in (0, 1)^N
        depth: Word length, at least 1
        variant: "B" or "Bprime"
        threads: Worker threads for child expansion (default: config)
        max_bits: Precision cap for comparisons

    Returns:
        WordSearchResult; proof is False when some word had to be excluded

    Raises:
        ExactTie: If two complete words have certified equal values
        UndecidableAtPrecision: If two complete words cannot be ordered
    """
    _check_variant(variant)
    if depth < 1:
        raise InvalidInputError(f"depth must be at least 1, got {depth}")
    threads = threads or DEFAULT_CONFIG.threads

    root = _Node((), alpha, RealScalar.exact(1), RealScalar.exact(0))
    heap: List[Tuple[Fraction, Word, _Node]] = [(Fraction(0), (), root)]
    incumbent: Optional[_Node] = None
    expanded = pruned = 0
    excluded: List[Tuple[Word, str]] = []
    pivots = range(1, alpha.N + 1)

    executor = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        while heap:
            lo, word, node = heapq.heappop(heap)
            if incumbent is not None:
                if lo > incumbent.value.hi:
                    # every remaining key is at least lo
                    pruned += 1 + len(heap)
                    break
                # complete words equal to the incumbent go on to the tie check
                if _at_least(node, incumbent, max_bits, strict=len(word) == depth):
                    pruned += 1
                    continue

            if len(word) == depth:
                if incumbent is None:
                    incumbent = node
                else:
                    order = compare(node.value, incumbent.value, max_bits)
                    if order == 0:
                        raise ExactTie(f"words {word} and {incumbent.word} have equal values")
                    if order < 0:
                        incumbent = node
                continue

            expanded += 1
            if executor is not None:
                children = list(executor.map(lambda w: _expand(node, w, variant, max_bits), pivots))
            else:
                children = [_expand(node, w, variant, max_bits) for w in pivots]

            for w, child in zip(pivots, children):
                if isinstance(child, str):
                    logger.warning(f"Word prefix {word + (w,)} excluded: {child}")
                    excluded.append((word + (w,), child))
                    continue
                heapq.heappush(heap, (child.value.lo, child.word, child))
    finally:
        if executor is not None:
            executor.shutdown()

    if incumbent is None:
        raise InvalidInputError(f"every word of depth {depth} failed; see the excluded prefixes")

    logger.info(
        f"Word search depth={depth} variant={variant}: best {incumbent.word}, "
        f"{expanded} nodes expanded, {pruned} pruned"
    )
    return WordSearchResult(
        best_word=incumbent.word,
        best_value=incumbent.value,
        nodes_expanded=expanded,
        proof=not excluded,
        depth=depth,
        variant=variant,
        nodes_pruned=pruned,
        excluded=excluded,
    )


# ----------------------------------------------------------------------
# Height and radius bounds
# ----------------------------------------------------------------------

def _height_function(x: RealScalar, regime: str, consts: ConstantsConfig) -> RealScalar:
    two_pi = 2 * RealScalar.pi(x.precision_bits)
    if regime == "log":
        return -x.log() / two_pi + coerce(Fraction(consts.c_univ))
    return x.loglog_e() / two_pi


def height_bound(
    alpha: RotationVector,
    word: Sequence[int],
    regime: str = "log",
    consts: Optional[ConstantsConfig] = None,
    max_bits: Optional[int] = None,
) -> RealScalar:
    """
    Arithmetic height bound sum_j pi_j t(alpha^(j)_{w(j)}) + C'

    t(x) = log(1/x)/(2 pi) + C in the log regime and log log(e/x)/(2 pi) in the
    loglog regime. The empty word gives C' exactly.
    """
    if regime not in REGIMES:
        raise InvalidInputError(f"regime must be one of {REGIMES}, got {regime!r}")
    consts = consts or DEFAULT_CONFIG.constants

    parts = []
    weight = RealScalar.exact(1)
    with precision_cap(max_bits):
        for step in gauss_orbit(alpha, word, max_bits):
            parts.append(weight * _height_function(step.pivot, regime, consts))
            weight = weight * step.pivot
    return fsum(parts) + coerce(Fraction(consts.c_prime))


def siegel_radius_bound(b_value, consts: Optional[ConstantsConfig] = None) -> RealScalar:
    """
    C_radius * exp(-2 pi b)

    Raises:
        InvalidInputError: If b is negative or unbounded
    """
    consts = consts or DEFAULT_CONFIG.constants
    b = coerce(b_value)
    if not b.is_bounded:
        raise InvalidInputError("the Brjuno value must be finite")
    sign = certified_sign(b)
    if sign < 0:
        raise InvalidInputError(f"the Brjuno value must be nonnegative, got {b!r}")
    c_radius = coerce(Fraction(consts.c_radius))
    if sign == 0:
        return c_radius
    return c_radius * (-2 * RealScalar.pi(b.precision_bits) * b).exp()
