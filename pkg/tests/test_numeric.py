"""
Tests for exact surds, the input grammar and adaptive-precision enclosures.

Interval results are checked against the exact surd arithmetic: a returned
enclosure must contain the true value, decided by the exact sign of the
difference between the surd and each endpoint.
"""
import logging
import math
import random
from fractions import Fraction

import pytest

from multibrjuno.exceptions import (
    ExactTie,
    InvalidInputError,
    PrecisionExhausted,
    UndecidableAtPrecision,
)
from multibrjuno.numeric import (
    RealScalar,
    certified_floor,
    certified_nearest_integer,
    certified_sign,
    compare,
    effective_max_bits,
    fsum,
    power,
    precision_cap,
    refine,
)
from multibrjuno.surd import QuadraticSurd, squarefree_split
from multibrjuno.syntax import NAMED_REALS, parse_exact


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def surd(a, b=0, d=1):
    return QuadraticSurd(Fraction(a), Fraction(b), d)


def encloses(x: RealScalar, exact: QuadraticSurd) -> bool:
    """lo <= exact <= hi, decided with exact surd signs"""
    return (
        exact.sub(QuadraticSurd(x.lo)).sign() >= 0
        and QuadraticSurd(x.hi).sub(exact).sign() >= 0
    )


def random_surd(rng: random.Random, d: int) -> QuadraticSurd:
    a = Fraction(rng.randint(-20, 20), rng.randint(1, 9))
    b = Fraction(rng.choice([-1, 1]) * rng.randint(1, 20), rng.randint(1, 9))
    return QuadraticSurd(a, b, d)


SQRT2 = "(0+1*sqrt(2))/1"
SQRT3 = "(0+1*sqrt(3))/1"


# ---------------------------------------------------------------------------
# Quadratic surds
# ---------------------------------------------------------------------------

class TestQuadraticSurd:
    def test_squarefree_split(self):
        assert squarefree_split(12) == (2, 3)
        assert squarefree_split(7) == (1, 7)
        assert squarefree_split(36) == (6, 1)

    def test_normalizes_radicand(self):
        x = surd(0, 1, 8)
        assert (x.b, x.d) == (2, 2)
        assert surd(1, 1, 9).is_rational
        assert surd(1, 1, 9).a == 4

    def test_field_operations(self):
        x, y = surd(1, 1, 2), surd(-1, 1, 2)
        assert x.mul(y) == surd(1)
        assert x.add(y) == surd(0, 2, 2)
        assert x.div(y) == surd(3, 2, 2)

    def test_incompatible_radicands_return_none(self):
        assert surd(0, 1, 2).add(surd(0, 1, 3)) is None
        assert surd(0, 1, 2).mul(surd(0, 1, 3)) is None

    @pytest.mark.parametrize("x, expected", [
        (surd(-3, 2, 2), -1),       # 2 sqrt 2 < 3
        (surd(3, -2, 2), 1),
        (surd(0, -1, 5), -1),
        (surd(0), 0),
        (surd(-1, 1, 2), 1),
    ])
    def test_exact_sign(self, x, expected):
        assert x.sign() == expected

    @pytest.mark.parametrize("x, expected", [
        (surd(0, 1, 2), 1),
        (surd(0, -1, 2), -2),
        (surd(Fraction(-1, 2), Fraction(1, 2), 5), 0),
        (surd(Fraction(7, 2)), 3),
        (surd(Fraction(-7, 2)), -4),
    ])
    def test_exact_floor(self, x, expected):
        assert x.floor() == expected

    def test_nearest_integer_reports_ties(self):
        assert surd(Fraction(5, 2)).nearest_integer() == (3, True)
        assert surd(1, 1, 2).nearest_integer() == (2, False)

    def test_enclose_is_tight(self):
        lo, hi = surd(0, 1, 2).enclose(100)
        assert lo * lo < 2 < hi * hi
        assert hi - lo <= lo / 2 ** 100

    def test_to_text_round_trips_through_grammar(self):
        for x in (surd(Fraction(-1, 2), Fraction(1, 2), 5), surd(3, -2, 7), surd(Fraction(2, 3))):
            assert parse_exact(x.to_text()) == x


# ---------------------------------------------------------------------------
# Input grammar
# ---------------------------------------------------------------------------

class TestParseExact:
    @pytest.mark.parametrize("text, expected", [
        ("3/7", surd(Fraction(3, 7))),
        ("-2", surd(-2)),
        ("0.25", surd(Fraction(1, 4))),
        ("1e-3", surd(Fraction(1, 1000))),
        ("(1+1*sqrt(5))/2", surd(Fraction(1, 2), Fraction(1, 2), 5)),
        ("(0+1*sqrt(2))/1-1", surd(-1, 1, 2)),
        ("(0 + 1*sqrt(3)) - 1", surd(-1, 1, 3)),
        ("(2-3*sqrt(8))/4", surd(Fraction(1, 2), Fraction(-3, 2), 2)),
    ])
    def test_literals(self, text, expected):
        assert parse_exact(text) == expected

    def test_named_shortcuts(self):
        golden = parse_exact("golden")
        assert golden == NAMED_REALS["golden"]
        assert golden.mul(golden).add(golden) == surd(1)   # phi - 1 solves x^2 + x = 1
        assert parse_exact("SQRT2M1") == surd(-1, 1, 2)

    @pytest.mark.parametrize("text", ["", "pi", "1/0", "sqrt(2)", "(1+sqrt(2))/2", "1/2/3"])
    def test_rejects_malformed(self, text):
        with pytest.raises(InvalidInputError):
            parse_exact(text)

    def test_warns_on_decimal_pi(self, caplog):
        with caplog.at_level(logging.WARNING, logger="multibrjuno"):
            value = parse_exact("0.14159265")
        assert value == surd(Fraction("0.14159265"))
        assert "approximation of pi" in caplog.text


# ---------------------------------------------------------------------------
# Enclosures
# ---------------------------------------------------------------------------

class TestRealScalar:
    def test_exact_enclosure_contains_value(self):
        x = RealScalar.exact(SQRT2)
        assert x.is_exact
        assert encloses(x, surd(0, 1, 2))
        assert x.width < Fraction(1, 2 ** 120)

    def test_refine_sqrt2(self):
        x = refine(RealScalar.exact(SQRT2), Fraction(1, 10 ** 30))
        assert x.width <= Fraction(1, 10 ** 30)
        assert x.lo * x.lo < 2 < x.hi * x.hi

    def test_refine_raises_at_cap(self):
        with pytest.raises(PrecisionExhausted):
            refine(RealScalar.pi(), Fraction(1, 10 ** 300), max_bits=256)

    def test_refine_rejects_nonpositive_width(self):
        with pytest.raises(InvalidInputError):
            refine(RealScalar.exact(1), 0)

    def test_at_precision_is_memoized(self):
        x = RealScalar.pi()
        assert x.at_precision(512) is x.at_precision(512)
        assert x.at_precision(64) is x

    def test_exact_arithmetic_stays_exact(self):
        x = RealScalar.exact(SQRT2) - 1
        y = 1 / x
        assert y.source == surd(1, 1, 2)

    def test_mixed_radicands_fall_back_to_intervals(self):
        x = RealScalar.exact(SQRT2) * RealScalar.exact(SQRT3)
        assert not x.is_exact
        assert x.refinable
        assert abs(float(x) - math.sqrt(6)) < 1e-15
        assert x.at_precision(512).width < x.width

    @pytest.mark.parametrize("op", ["add", "sub", "mul", "div"])
    def test_interval_arithmetic_is_outward_rounded(self, op):
        rng = random.Random(20240 + len(op))
        for _ in range(250):
            d = rng.choice([2, 3, 5, 6, 7, 11])
            x, y = random_surd(rng, d), random_surd(rng, d)
            left, right = RealScalar.exact(x).detach(), RealScalar.exact(y).detach()
            result = {
                "add": lambda: left + right,
                "sub": lambda: left - right,
                "mul": lambda: left * right,
                "div": lambda: left / right,
            }[op]()
            exact = getattr(x, op)(y)
            assert not result.is_exact
            assert encloses(result, exact), (op, x, y)

    def test_transcendental_functions(self):
        two = RealScalar.exact(2)
        assert abs(float(two.log()) - math.log(2)) < 1e-15
        assert abs(float(two.exp()) - math.exp(2)) < 1e-14
        assert abs(float(RealScalar.pi().sin())) < 1e-30
        assert RealScalar.exact(1).log().source == surd(0)

    def test_loglog_e(self):
        x = RealScalar.exact("golden")
        assert abs(float(x.loglog_e()) - math.log(1 - math.log(float(x)))) < 1e-15

    def test_log_rejects_nonpositive(self):
        with pytest.raises(InvalidInputError):
            RealScalar.exact(-1).log()
        with pytest.raises(InvalidInputError):
            RealScalar.exact(0).log()

    def test_division_by_exact_zero(self):
        with pytest.raises(ZeroDivisionError):
            RealScalar.exact(1) / 0

    def test_power(self):
        x = RealScalar.exact(SQRT2)
        assert power(x, 2).source == surd(2)
        assert abs(float(power(x, Fraction(1, 2))) - 2 ** 0.25) < 1e-15

    def test_fsum_exact_and_mixed(self):
        assert fsum([1, Fraction(1, 2), RealScalar.exact(SQRT2)]).source == surd(Fraction(3, 2), 1, 2)
        mixed = fsum([RealScalar.exact(SQRT2), RealScalar.exact(SQRT3)])
        assert not mixed.is_exact
        assert abs(float(mixed) - (math.sqrt(2) + math.sqrt(3))) < 1e-15
        assert fsum([]).source == surd(0)

    def test_from_interval_rejects_empty(self):
        with pytest.raises(InvalidInputError):
            RealScalar.from_interval(Fraction(1), Fraction(0))

    def test_decimal_bounds(self):
        lo, hi = RealScalar.exact(Fraction(1, 3)).decimal_bounds(10)
        assert lo.startswith("0.333333")
        assert hi.startswith("0.333333")


# ---------------------------------------------------------------------------
# Certified decisions
# ---------------------------------------------------------------------------

class TestCertifiedDecisions:
    def test_sign_of_surd(self):
        assert certified_sign(RealScalar.exact(surd(-3, 2, 2))) == -1

    def test_sign_of_interval(self):
        x = RealScalar.exact(SQRT2) * RealScalar.exact(SQRT3) - 2
        assert certified_sign(x) == 1

    def test_low_precision_operands_are_re_enclosed(self):
        # 16-bit factors cannot separate sqrt6 from a rational 1e-20 away
        x = RealScalar.exact(SQRT2, bits=16) * RealScalar.exact(SQRT3, bits=16)
        assert x.lo < Fraction(math.isqrt(6 * 10 ** 40), 10 ** 20) < x.hi
        target = Fraction(math.isqrt(6 * 10 ** 40), 10 ** 20)
        assert compare(x, target) == 1

    def test_undecidable_at_cap(self):
        x = RealScalar.exact(SQRT2) * RealScalar.exact(SQRT3)
        with pytest.raises(UndecidableAtPrecision):
            certified_sign(x - x, max_bits=512)

    def test_compare(self):
        assert compare(RealScalar.exact(SQRT2), Fraction(141, 100)) == 1
        assert compare(RealScalar.exact(SQRT2), RealScalar.exact(SQRT3)) == -1
        assert compare(RealScalar.exact(2), 2) == 0

    def test_floor(self):
        assert certified_floor(RealScalar.exact(surd(1, 1, 2))) == 2
        assert certified_floor(RealScalar.exact(SQRT2) * RealScalar.exact(SQRT3)) == 2

    def test_nearest_integer(self):
        assert certified_nearest_integer(RealScalar.exact(surd(1, 1, 2))) == 2
        assert certified_nearest_integer(RealScalar.exact(SQRT2) * RealScalar.exact(SQRT3)) == 2
        assert certified_nearest_integer(RealScalar.exact(Fraction(-7, 3))) == -2

    def test_nearest_integer_exact_tie(self):
        with pytest.raises(ExactTie):
            certified_nearest_integer(RealScalar.exact(Fraction(5, 2)))


# ---------------------------------------------------------------------------
# Precision cap
# ---------------------------------------------------------------------------

def near_zero_gap():
    """A positive inexact value of size 2**-200, invisible at 128 bits"""
    a = RealScalar.exact("golden").log()
    return (a + Fraction(1, 2 ** 200)) - a


class TestPrecisionCap:
    def test_effective_cap(self):
        assert effective_max_bits(512) == 512
        with precision_cap(256):
            assert effective_max_bits() == 256
            assert effective_max_bits(1024) == 1024
            with precision_cap(None):
                assert effective_max_bits() == 256
        assert effective_max_bits() == 4096

    def test_sign_needs_more_than_the_working_precision(self):
        assert certified_sign(near_zero_gap()) == 1
        with precision_cap(128):
            with pytest.raises(UndecidableAtPrecision):
                certified_sign(near_zero_gap())

    def test_cap_reaches_logarithm(self):
        gap = near_zero_gap()
        assert float(gap.log()) == pytest.approx(-200 * math.log(2))
        with precision_cap(128):
            with pytest.raises(UndecidableAtPrecision):
                near_zero_gap().log()

    def test_cap_reaches_division(self):
        with precision_cap(128):
            with pytest.raises(UndecidableAtPrecision):
                1 / near_zero_gap()
