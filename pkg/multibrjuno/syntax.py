"""
Regex grammar for exact-real input
"m/n" rationals, "(p+q*sqrt(d))/r" surds, decimal literals, named shortcuts
"""
import logging
import re
from fractions import Fraction
from typing import Dict

from multibrjuno.exceptions import InvalidInputError
from multibrjuno.surd import QuadraticSurd

logger = logging.getLogger(__name__)

_INT = r'[+-]?\d+'

# Core literal patterns
REAL_PATTERNS = {
    # Rational "m/n" (also a bare integer)
    "RATIONAL": rf'^(?P<num>{_INT})(?:/(?P<den>\d+))?$',

    # Decimal literal, treated as an exact rational
    "DECIMAL": r'^(?P<dec>[+-]?(?:\d+\.\d*|\.\d+)(?:[eE][+-]?\d+)?|[+-]?\d+[eE][+-]?\d+)$',

    # Surd "(p+q*sqrt(d))/r" with an optional rational shift, e.g. "(0+1*sqrt(2))/1-1"
    "SURD": (
        rf'^\(\s*(?P<p>{_INT})\s*(?P<qs>[+-])\s*(?P<q>\d+)\s*\*\s*sqrt\(\s*(?P<d>\d+)\s*\)\s*\)'
        rf'\s*(?:/\s*(?P<r>\d+))?'
        rf'(?:\s*(?P<ss>[+-])\s*(?P<sn>\d+)(?:/(?P<sd>\d+))?)?$'
    ),
}

# Named shortcuts
NAMED_REALS: Dict[str, QuadraticSurd] = {
    "golden": QuadraticSurd(Fraction(-1, 2), Fraction(1, 2), 5),   # phi - 1
    "sqrt2m1": QuadraticSurd(Fraction(-1), Fraction(1), 2),
    "sqrt3m1": QuadraticSurd(Fraction(-1), Fraction(1), 3),
}

# Transcendental constants whose decimal approximations draw a warning
_TRANSCENDENTALS = {
    "pi": Fraction("3.14159265358979323846264338327950288"),
    "e": Fraction("2.71828182845904523536028747135266250"),
}


def parse_exact(text: str) -> QuadraticSurd:
    """
    Parse one exact real

    Raises:
        InvalidInputError: if the text matches no grammar rule
    """
    token = text.strip()
    if token.lower() in NAMED_REALS:
        return NAMED_REALS[token.lower()]

    match = re.match(REAL_PATTERNS["RATIONAL"], token)
    if match:
        den = int(match.group("den") or 1)
        if den == 0:
            raise InvalidInputError(f"zero denominator in {text!r}")
        return QuadraticSurd(Fraction(int(match.group("num")), den))

    match = re.match(REAL_PATTERNS["DECIMAL"], token)
    if match:
        value = Fraction(match.group("dec"))
        _warn_if_transcendental(token, value)
        return QuadraticSurd(value)

    match = re.match(REAL_PATTERNS["SURD"], token)
    if match:
        q = int(match.group("q")) * (-1 if match.group("qs") == "-" else 1)
        r = int(match.group("r") or 1)
        d = int(match.group("d"))
        if r == 0 or d == 0:
            raise InvalidInputError(f"degenerate surd {text!r}")
        surd = QuadraticSurd.from_parts(int(match.group("p")), q, d, r)
        if match.group("sn"):
            shift = Fraction(int(match.group("sn")), int(match.group("sd") or 1))
            if match.group("ss") == "-":
                shift = -shift
            surd = surd.add(QuadraticSurd(shift))
        return surd

    raise InvalidInputError(
        f"cannot parse real {text!r}; expected m/n, (p+q*sqrt(d))/r, a decimal, "
        f"or one of {sorted(NAMED_REALS)}"
    )


def _warn_if_transcendental(token: str, value: Fraction) -> None:
    digits = len(token.split(".")[-1]) if "." in token else 0
    if digits < 3:
        return
    for name, constant in _TRANSCENDENTALS.items():
        for candidate in (constant, constant - int(constant)):
            if abs(value - candidate) < Fraction(1, 10 ** digits):
                logger.warning(
                    f"{token} looks like a decimal approximation of {name}; "
                    f"it is treated as the exact rational {value}"
                )
                return
