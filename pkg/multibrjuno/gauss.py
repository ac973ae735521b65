"""
The N-dimensional Gauss map and its orbits along words

For a tuple alpha in (0, 1)^N and a pivot w, every coordinate is measured in
units of alpha_w: alpha hat_i = alpha_i (i != w), alpha hat_w = 1, a_i is the
nearest integer to alpha hat_i / alpha_w and the image is
alpha tilde_i = |a_i - alpha hat_i / alpha_w|, always in (0, 1/2).
For N = 1 this is the nearest-integer continued fraction map.
"""
import logging
from typing import List, Optional, Sequence, Tuple

from multibrjuno.exceptions import ExactTie, InvalidInputError, MultiBrjunoError
from multibrjuno.numeric import (
    RealScalar,
    certified_floor,
    certified_nearest_integer,
    certified_sign,
)
from multibrjuno.types import GaussStep, RotationVector

logger = logging.getLogger(__name__)


def gauss_step(alpha: RotationVector, w: int, max_bits: Optional[int] = None) -> GaussStep:
    """
    Apply the Gauss map with pivot w

    Args:
        alpha: Tuple in (0, 1)^N
        w: Pivot index in 1..N
        max_bits: Precision cap for the certified decisions

    Returns:
        GaussStep with a_i, eps_i, the image tuple and the hatted tuple

    Raises:
        InvalidInputError: If w is out of range
        ExactTie: If a ratio is exactly half-way between integers, or an image
            coordinate is exactly 0 (the inputs are rationally dependent)
        UndecidableAtPrecision: If a decision needs more than max_bits

    Example:
        >>> step = gauss_step(RotationVector.parse("sqrt2m1"), 1)
        >>> step.a, step.eps
        ((2,), (-1,))
    """
    if not 1 <= w <= alpha.N:
        raise InvalidInputError(f"pivot {w} outside 1..{alpha.N}")

    pivot = alpha.component(w)
    hatted = tuple(
        RealScalar.exact(1, pivot.precision_bits) if i == w else alpha.component(i)
        for i in range(1, alpha.N + 1)
    )

    a, eps, image = [], [], []
    for i, h in enumerate(hatted, 1):
        ratio = h / pivot
        try:
            n = certified_nearest_integer(ratio, max_bits)
        except ExactTie as e:
            raise ExactTie(f"coordinate {i} with pivot {w}: {e}") from e
        # n - ratio carries the sign of a_i alpha_w - alpha hat_i
        offset = n - ratio
        sign = certified_sign(offset, max_bits)
        if sign == 0:
            raise ExactTie(
                f"alpha hat_{i} / alpha_{w} is the integer {n}; "
                f"the coordinates are rationally dependent"
            )
        a.append(n)
        eps.append(sign)
        image.append(offset if sign > 0 else -offset)

    return GaussStep(
        w=w,
        a=tuple(a),
        eps=tuple(eps),
        image=RotationVector(tuple(image)),
        hatted=hatted,
        source=alpha,
    )


def gauss_orbit(
    alpha: RotationVector, word: Sequence[int], max_bits: Optional[int] = None
) -> List[GaussStep]:
    """
    Iterate the Gauss map along a finite word

    Raises:
        The error of the failing step, re-raised with its depth attached
    """
    steps: List[GaussStep] = []
    current = alpha
    for depth, w in enumerate(word):
        try:
            step = gauss_step(current, w, max_bits)
        except MultiBrjunoError as e:
            raise type(e)(f"orbit failed at depth {depth}: {e}", depth=depth) from e
        steps.append(step)
        current = step.image
    logger.debug(f"Orbit of length {len(steps)} computed for N={alpha.N}")
    return steps


def nicf_step(x: RealScalar, max_bits: Optional[int] = None) -> RealScalar:
    """Nearest-integer continued fraction map x -> dist(1/x, Z)"""
    return gauss_step(RotationVector((x,)), 1, max_bits).image.component(1)


def classical_gauss_step(x: RealScalar, max_bits: Optional[int] = None) -> Tuple[int, RealScalar]:
    """Regular Gauss map x -> {1/x}; returns (floor(1/x), {1/x})"""
    inverse = 1 / x
    a = certified_floor(inverse, max_bits)
    image = inverse - a
    if certified_sign(image, max_bits) == 0:
        raise ExactTie(f"1/x is the integer {a}; x is rational")
    return a, image
