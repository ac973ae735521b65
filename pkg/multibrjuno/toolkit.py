"""
multi-brjuno - Main Facade Class
One configured entry point for orbits, Brjuno sums, Diophantine scans and germs
"""
import functools
import logging
import re
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from multibrjuno import brjuno, dioph, gauss, germs
from multibrjuno.config import RunConfig
from multibrjuno.exceptions import ConfigurationError, InvalidInputError, MultiBrjunoError
from multibrjuno.numeric import RealScalar, precision_cap
from multibrjuno.series import SeriesLike
from multibrjuno.types import (
    AppendixWordTrace,
    BrjunoSum,
    DCResult,
    DualFormResult,
    GaussStep,
    RotationVector,
    Word,
    WordSearchResult,
)

logger = logging.getLogger(__name__)

AlphaInput = Union[str, RotationVector, Sequence]

WORD_POLICY_PATTERNS = {
    "EXPLICIT": r'^\d+(?:\s*,\s*\d+)*$',
    "CONSTANT": r'^constant:(?P<j>\d+)$',
    "GREEDY": r'^greedy$',
    "APPENDIX": r'^appendix:(?P<C>[^,]+),(?P<tau>[^,]+)$',
    "MIN": r'^min$',
}


def _input_errors(method):
    """
    Run a toolkit call under the configured precision cap and re-raise stray
    ValueError/TypeError as InvalidInputError
    """

    @functools.wraps(method)
    def wrapper(self, *args, **kwargs):
        try:
            with precision_cap(self.max_bits):
                return method(self, *args, **kwargs)
        except MultiBrjunoError:
            raise
        except (ValueError, TypeError, ZeroDivisionError) as e:
            logger.error(f"{method.__name__} rejected its input: {e}")
            raise InvalidInputError(f"{method.__name__}: {e}") from e

    return wrapper


def parse_word(text: str) -> Word:
    """ "1,2,1" -> (1, 2, 1); the empty string is the empty word"""
    text = text.strip()
    if not text:
        return ()
    if not re.match(WORD_POLICY_PATTERNS["EXPLICIT"], text):
        raise InvalidInputError(f"cannot parse word {text!r}; expected e.g. 1,2,1")
    return tuple(int(t) for t in text.split(","))


def parse_real(text: str) -> Fraction:
    """Positive-or-zero constant given as m/n or a decimal"""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise InvalidInputError(f"cannot parse constant {text!r}") from e


class BrjunoToolkit:
    """
    Main facade for the multi-brjuno operations

    Holds a RunConfig and applies its precision, thread and tolerance settings
    to every call.

    Example:
        >>> toolkit = BrjunoToolkit()
        >>> result = toolkit.brjuno("golden", "constant:1", depth=60)
        >>> round(float(result.value), 6)
        1.443635
    """

    def __init__(self, config: Optional[RunConfig] = None, **kwargs):
        """
        Initialize the toolkit

        Args:
            config: RunConfig instance (if provided, kwargs ignored)
            **kwargs: RunConfig fields, e.g. precision_bits=256, threads=4

        Raises:
            ConfigurationError: If configuration is invalid
        """
        try:
            self.config = config if config is not None else RunConfig.from_dict(kwargs)
        except (ValueError, TypeError) as e:
            raise ConfigurationError(f"Failed to initialize BrjunoToolkit: {e}") from e
        logger.info(
            f"BrjunoToolkit initialized with precision_bits={self.config.precision_bits}, "
            f"threads={self.config.threads}"
        )

    @property
    def max_bits(self) -> int:
        return self.config.max_precision_bits

    # ------------------------------------------------------------------
    # Inputs
    # ------------------------------------------------------------------

    @_input_errors
    def parse_alphas(self, alphas: AlphaInput) -> RotationVector:
        """Rotation vector from text ("golden,sqrt2m1"), a sequence of reals, or as is"""
        if isinstance(alphas, RotationVector):
            return alphas
        if isinstance(alphas, str):
            return RotationVector.parse(alphas, self.config.precision_bits, self.max_bits)
        return RotationVector.of(list(alphas), self.config.precision_bits, self.max_bits)

    @_input_errors
    def resolve_word(
        self,
        alphas: AlphaInput,
        policy: Union[str, Sequence[int]],
        depth: int = 0,
        variant: str = "B",
        start: int = 1,
    ) -> Word:
        """
        Turn a word policy into a concrete word

        Policies: an explicit list "1,2,1", "constant:j", "greedy",
        "appendix:C,tau" (proof-mode selector) and "min" (finite-depth minimizer).
        """
        if not isinstance(policy, str):
            return tuple(int(w) for w in policy)
        policy = policy.strip()
        alpha = self.parse_alphas(alphas)

        if not policy or re.match(WORD_POLICY_PATTERNS["EXPLICIT"], policy):
            return parse_word(policy)
        if depth < 1:
            raise InvalidInputError(f"policy {policy!r} needs a positive depth")

        match = re.match(WORD_POLICY_PATTERNS["CONSTANT"], policy)
        if match:
            j = int(match.group("j"))
            if not 1 <= j <= alpha.N:
                raise InvalidInputError(f"constant pivot {j} outside 1..{alpha.N}")
            return (j,) * depth
        if re.match(WORD_POLICY_PATTERNS["GREEDY"], policy):
            return dioph.select_word_appendix(
                alpha, 1, 1, depth, mode="greedy", start=start, max_bits=self.max_bits
            ).word
        match = re.match(WORD_POLICY_PATTERNS["APPENDIX"], policy)
        if match:
            C, tau = parse_real(match.group("C")), parse_real(match.group("tau"))
            return dioph.select_word_appendix(
                alpha, C, tau, depth, mode="proof", start=start, max_bits=self.max_bits
            ).word
        if re.match(WORD_POLICY_PATTERNS["MIN"], policy):
            return self.brjuno_min(alpha, depth, variant).best_word
        raise InvalidInputError(
            f"unknown word policy {policy!r}; expected 1,2,..., constant:j, greedy, "
            f"appendix:C,tau or min"
        )

    # ------------------------------------------------------------------
    # Gauss map and Brjuno sums
    # ------------------------------------------------------------------

    @_input_errors
    def gauss_orbit(self, alphas: AlphaInput, word: Sequence[int]) -> List[GaussStep]:
        return gauss.gauss_orbit(self.parse_alphas(alphas), tuple(word), self.max_bits)

    @_input_errors
    def brjuno(
        self,
        alphas: AlphaInput,
        policy: Union[str, Sequence[int]],
        depth: int = 0,
        variant: str = "B",
    ) -> BrjunoSum:
        alpha = self.parse_alphas(alphas)
        word = self.resolve_word(alpha, policy, depth, variant)
        return brjuno.brjuno_partial(alpha, word, variant, self.max_bits)

    @_input_errors
    def brjuno_classical(self, alphas: AlphaInput, depth: int, variant: str = "B") -> BrjunoSum:
        alpha = self.parse_alphas(alphas)
        if alpha.N != 1:
            raise InvalidInputError("the classical Brjuno sum takes one rotation number")
        return brjuno.classical_brjuno_partial(alpha.component(1), depth, variant)

    @_input_errors
    def brjuno_min(self, alphas: AlphaInput, depth: int, variant: str = "B") -> WordSearchResult:
        return brjuno.brjuno_minimize(
            self.parse_alphas(alphas), depth, variant, self.config.threads, self.max_bits
        )

    @_input_errors
    def height_bound(
        self,
        alphas: AlphaInput,
        policy: Union[str, Sequence[int]],
        depth: int = 0,
        regime: str = "log",
    ) -> Tuple[RealScalar, RealScalar, Word]:
        """Height bound, rotation density and the word they were computed along"""
        alpha = self.parse_alphas(alphas)
        word = self.resolve_word(alpha, policy, depth)
        value = brjuno.height_bound(alpha, word, regime, self.config.constants, self.max_bits)
        return value, brjuno.rotation_density(alpha, word), word

    @_input_errors
    def radius_bound(self, b_value) -> RealScalar:
        return brjuno.siegel_radius_bound(b_value, self.config.constants)

    # ------------------------------------------------------------------
    # Diophantine scans
    # ------------------------------------------------------------------

    @_input_errors
    def dc_check(self, alphas: AlphaInput, C, tau, Q_max: int) -> DCResult:
        return dioph.dc_check(
            self.parse_alphas(alphas), C, tau, Q_max, self.config.threads, self.max_bits
        )

    @_input_errors
    def dc_estimate(self, alphas: AlphaInput, tau, Q_max: int) -> DCResult:
        """The full scan, whose margin is the estimate and whose q is the witness"""
        return dioph.dc_scan(
            self.parse_alphas(alphas), tau, Q_max,
            threads=self.config.threads, max_bits=self.max_bits,
        )

    @_input_errors
    def dual_check(self, alphas: AlphaInput, C_prime, tau_prime, K_max: int) -> DualFormResult:
        return dioph.dual_form_check(
            self.parse_alphas(alphas), C_prime, tau_prime, K_max,
            self.config.threads, self.max_bits,
        )

    @_input_errors
    def transference(self, N: int, tau, direction: str = "forward"):
        return dioph.transference(N, tau, direction)

    @_input_errors
    def word_appendix(
        self,
        alphas: AlphaInput,
        C,
        tau,
        depth: int,
        mode: str = "proof",
        start: int = 1,
        k_step=1,
    ) -> AppendixWordTrace:
        return dioph.select_word_appendix(
            self.parse_alphas(alphas), C, tau, depth,
            mode=mode, start=start, k_step=k_step, max_bits=self.max_bits,
        )

    # ------------------------------------------------------------------
    # Germs
    # ------------------------------------------------------------------

    @_input_errors
    def make_germ(self, alpha, higher: dict, order: Optional[int] = None) -> germs.PowerSeriesGerm:
        vector = self.parse_alphas(alpha if not isinstance(alpha, RealScalar) else [alpha])
        if vector.N != 1:
            raise InvalidInputError("a germ has one rotation number")
        return germs.PowerSeriesGerm.from_coefficients(
            vector.component(1),
            higher,
            order or self.config.series_order,
            self.config.series_precision_bits,
        )

    @_input_errors
    def linearize(self, germ: germs.PowerSeriesGerm, order: Optional[int] = None):
        return germs.linearize(
            germ,
            order,
            self.config.tolerance,
            self.config.radius_window,
            self.config.small_divisor_floor,
        )

    @_input_errors
    def synth(self, h0: SeriesLike, alphas: AlphaInput, order: Optional[int] = None):
        return germs.synth_commuting_family(
            h0,
            self.parse_alphas(alphas),
            order or self.config.series_order,
            self.config.series_precision_bits,
        )

    @_input_errors
    def simul_check(self, family: Sequence[germs.PowerSeriesGerm], order: Optional[int] = None):
        return germs.simultaneous_check(family, order, self.config.tolerance)

    @_input_errors
    def radius_compare(
        self,
        germ: germs.PowerSeriesGerm,
        b_value=None,
        depth: int = 60,
        variant: str = "B",
    ) -> Tuple[germs.LinearizationResult, germs.RadiusReport]:
        """
        Linearize a germ and compare its radius with C_radius exp(-2 pi B)

        Without b_value, B is the partial sum along the constant word (1)**depth
        of the germ's rotation number.
        """
        result = self.linearize(germ)
        if b_value is None:
            alpha = RotationVector.of([germ.alpha], max_bits=self.max_bits)
            b_value = brjuno.brjuno_partial(alpha, (1,) * depth, variant, self.max_bits).value
        return result, germs.radius_estimate_vs_bound(result, b_value, self.config.constants)
