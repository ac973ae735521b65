"""
Diophantine machinery

Scans for the simultaneous class DC_N(C, tau):
    max_j |q alpha_j - p_j| >= C / q**tau  for 1 <= q <= Q_max,
the dual linear form |p.alpha + q| >= C' / |(p, q)|**tau' over a box of
integer vectors, Khintchine's exponent exchange tau' = N tau + N - 1, and
the constructive word selector that keeps every pivot large relative to
the running constant C_n.

Scans work on integer enclosures floor(alpha_j 2**k) <= alpha_j 2**k <= ceil(...),
so multiplying by q never drifts; a scale k that cannot separate a decision
is doubled for that q only.
"""
import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple, TypeVar, Union

from mpmath import libmp
from mpmath.libmp import libmpi

from multibrjuno.config import DEFAULT_CONFIG
from multibrjuno.exceptions import (
    DomainError,
    InvalidInputError,
    SelectorFailed,
    UndecidableAtPrecision,
)
from multibrjuno.gauss import gauss_step
from multibrjuno.numeric import (
    RealScalar,
    coerce,
    compare,
    effective_max_bits,
    power,
    precision_cap,
)
from multibrjuno.types import (
    AppendixStep,
    AppendixWordTrace,
    DCResult,
    DualFormResult,
    EnvelopeRow,
    RotationVector,
)

logger = logging.getLogger(__name__)

T = TypeVar("T")
Bounds = Tuple[Fraction, Fraction]
Real = Union[int, float, Fraction]


class _ScaledAlphas:
    """Integer enclosures of alpha_j * 2**bits, cached per bit count"""

    def __init__(self, alpha: RotationVector):
        self.alpha = alpha
        self._cache: Dict[int, List[Tuple[int, int]]] = {}

    def at(self, bits: int) -> List[Tuple[int, int]]:
        cached = self._cache.get(bits)
        if cached is None:
            scale = 1 << bits
            cached = []
            for a in self.alpha:
                r = a.at_precision(bits)
                cached.append((math.floor(r.lo * scale), math.ceil(r.hi * scale)))
            self._cache[bits] = cached
        return cached


def _dist_bounds(x_lo: int, x_hi: int, bits: int) -> Optional[Tuple[int, int, int]]:
    """
    Bounds on 2**bits * dist(x, Z) for x in [x_lo, x_hi] / 2**bits, plus the nearest integer

    None when the enclosure touches an integer, so no positive lower bound exists.
    """
    scale = 1 << bits
    n = x_lo >> bits
    f_lo, f_hi = x_lo - (n << bits), x_hi - (n << bits)
    if f_lo == 0 or f_hi >= scale:
        return None
    end_lo, end_hi = min(f_lo, scale - f_lo), min(f_hi, scale - f_hi)
    half = scale >> 1
    upper = half if f_lo <= half <= f_hi else max(end_lo, end_hi)
    nearest = n if f_lo + f_hi < scale else n + 1
    return min(end_lo, end_hi), upper, nearest


def _power_bounds(base: int, exponent: Fraction, bits: int) -> Bounds:
    """Enclosure of base**exponent for a positive integer base"""
    if exponent.denominator == 1 and exponent >= 0:
        value = Fraction(base) ** int(exponent)
        return value, value
    e = (
        libmp.from_rational(exponent.numerator, exponent.denominator, bits, libmp.round_floor),
        libmp.from_rational(exponent.numerator, exponent.denominator, bits, libmp.round_ceiling),
    )
    b = libmp.from_int(base)
    lo, hi = libmpi.mpi_exp(libmpi.mpi_mul(e, libmpi.mpi_log((b, b), bits), bits), bits)
    return Fraction(*libmp.to_rational(lo)), Fraction(*libmp.to_rational(hi))


def _chunked(items: Sequence, threads: int, fn: Callable[[Sequence], T]) -> List[T]:
    """fn over contiguous chunks of items, results in chunk order"""
    if threads <= 1 or len(items) < 2 * threads:
        return [fn(items)]
    size = -(-len(items) // threads)
    chunks = [items[i:i + size] for i in range(0, len(items), size)]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(fn, chunks))


def _decide(margin: Bounds, threshold: Optional[Fraction]) -> Optional[bool]:
    """margin >= threshold, or None while the enclosure straddles it"""
    if threshold is None:
        return True
    if margin[0] >= threshold:
        return True
    if margin[1] < threshold:
        return False
    return None


# ----------------------------------------------------------------------
# Simultaneous approximation: DC_N(C, tau)
# ----------------------------------------------------------------------

def _q_margin(
    scaled: _ScaledAlphas, q: int, tau: Fraction, bits: int
) -> Optional[Tuple[Bounds, Tuple[int, ...]]]:
    lower = upper = 0
    p = []
    for a_lo, a_hi in scaled.at(bits):
        bounds = _dist_bounds(q * a_lo, q * a_hi, bits)
        if bounds is None:
            return None
        lower, upper = max(lower, bounds[0]), max(upper, bounds[1])
        p.append(bounds[2])
    scale = 1 << bits
    qpow = _power_bounds(q, tau, bits)
    return (qpow[0] * lower / scale, qpow[1] * upper / scale), tuple(p)


def dc_scan(
    alpha: RotationVector,
    tau: Real,
    Q_max: int,
    C: Optional[Real] = None,
    threads: Optional[int] = None,
    max_bits: Optional[int] = None,
) -> DCResult:
    """
    Scan q = 1..Q_max for the margin q**tau * max_j dist(q alpha_j, Z)

    With C given, a q whose margin enclosure straddles C is re-enclosed at
    doubled precision until it is decided. The witness is the q with the
    smallest lower margin bound (ties to the smaller q), independent of threads.

    Raises:
        InvalidInputError: If tau, C or Q_max are out of range
        UndecidableAtPrecision: If some q stays undecided at max_bits
    """
    tau = Fraction(tau)
    threshold = None if C is None else Fraction(C)
    if tau <= 0:
        raise InvalidInputError(f"tau must be positive, got {tau}")
    if threshold is not None and threshold <= 0:
        raise InvalidInputError(f"C must be positive, got {threshold}")
    if Q_max < 1:
        raise InvalidInputError(f"Q_max must be at least 1, got {Q_max}")
    threads = threads or DEFAULT_CONFIG.threads
    cap = effective_max_bits(max_bits)
    base_bits = max(a.precision_bits for a in alpha)
    scaled = _ScaledAlphas(alpha)

    def scan(qs: Sequence[int]):
        best = None
        failures = 0
        for q in qs:
            bits = base_bits
            while True:
                evaluated = _q_margin(scaled, q, tau, bits)
                decision = None if evaluated is None else _decide(evaluated[0], threshold)
                if decision is not None:
                    break
                if bits >= cap:
                    if threshold is not None:
                        raise UndecidableAtPrecision(
                            f"q={q}: margin not separated from C={threshold} at {bits} bits"
                        )
                    logger.warning(f"q={q}: q*alpha meets an integer at {bits} bits")
                    evaluated = ((Fraction(0), _power_bounds(q, tau, bits)[1] / 2), ())
                    decision = True
                    break
                bits = min(2 * bits, cap)
            if not decision:
                failures += 1
            margin, p = evaluated
            if best is None or (margin[0], q) < (best[0][0], best[1]):
                best = (margin, q, p)
        return best, failures

    partials = _chunked(range(1, Q_max + 1), threads, scan)
    (margin, q, p), _ = min(partials, key=lambda r: (r[0][0][0], r[0][1]))
    failures = sum(f for _, f in partials)
    logger.info(f"DC scan Q_max={Q_max} tau={tau}: min margin at q={q}, {failures} failures")
    return DCResult(
        holds=failures == 0,
        q=q,
        p=p,
        margin=RealScalar.from_interval(margin[0], margin[1], base_bits),
        C=threshold,
        tau=tau,
        Q_max=Q_max,
        failures=failures,
    )


def dc_check(
    alpha: RotationVector,
    C: Real,
    tau: Real,
    Q_max: int,
    threads: Optional[int] = None,
    max_bits: Optional[int] = None,
) -> DCResult:
    """
    Whether max_j dist(q alpha_j, Z) >= C / q**tau for all 1 <= q <= Q_max

    Example:
        >>> result = dc_check(RotationVector.parse("sqrt2m1"), Fraction(35, 100), 1, 10)
        >>> result.holds, result.q
        (False, 2)
    """
    return dc_scan(alpha, tau, Q_max, C=C, threads=threads, max_bits=max_bits)


def dc_estimate(
    alpha: RotationVector,
    tau: Real,
    Q_max: int,
    threads: Optional[int] = None,
) -> RealScalar:
    """Best constant min_q q**tau * max_j dist(q alpha_j, Z) over 1 <= q <= Q_max"""
    return dc_scan(alpha, tau, Q_max, threads=threads).margin


# ----------------------------------------------------------------------
# Transference and the dual linear form
# ----------------------------------------------------------------------

def transference(N: int, tau: Real, direction: str = "forward") -> Real:
    """
    Exponent exchange between simultaneous approximation and the dual form

    forward: tau' = N tau + N - 1; inverse: tau = (tau' + 1 - N) / N.
    Exact (Fraction) for int or Fraction input, float for float input.

    Raises:
        InvalidInputError: If N < 1 or direction is unknown
        DomainError: If the returned exponent would not be positive
    """
    if N < 1:
        raise InvalidInputError(f"N must be at least 1, got {N}")
    exact = Fraction(tau)
    if direction == "forward":
        if exact <= 0:
            raise DomainError(f"tau must be positive, got {tau}")
        result = N * exact + N - 1
    elif direction == "inverse":
        result = (exact + 1 - N) / N
        if result <= 0:
            raise DomainError(f"tau' = {tau} gives a nonpositive tau for N = {N}")
    else:
        raise InvalidInputError(f"direction must be 'forward' or 'inverse', got {direction!r}")
    return float(result) if isinstance(tau, float) else result


def _lex_positive(p: Tuple[int, ...]) -> bool:
    for c in p:
        if c:
            return c > 0
    return False


def _q_candidates(t_lo: Fraction, t_hi: Fraction, P: int, K: int) -> List[int]:
    """
    Integers q that can minimize |q - t| * max(P, |q|)**tau'

    Inside |q| <= P only the integers around t matter; beyond it the product
    is minimized at |q| = P + 1 or next to t.
    """
    near = range(math.floor(t_lo), math.ceil(t_hi) + 1)
    candidates = set(near) | {P, -P, P + 1, -(P + 1)}
    return sorted(q for q in candidates if -K <= q <= K)


def _dot_bounds(
    scaled: _ScaledAlphas, p: Tuple[int, ...], bits: int
) -> Tuple[int, int]:
    lo = hi = 0
    for c, (a_lo, a_hi) in zip(p, scaled.at(bits)):
        if c >= 0:
            lo, hi = lo + c * a_lo, hi + c * a_hi
        else:
            lo, hi = lo + c * a_hi, hi + c * a_lo
    return lo, hi


def dual_form_check(
    alpha: RotationVector,
    C_prime: Real,
    tau_prime: Real,
    K_max: int,
    threads: Optional[int] = None,
    max_bits: Optional[int] = None,
) -> DualFormResult:
    """
    Whether |p.alpha + q| >= C' / |(p, q)|**tau' for all nonzero (p, q) with sup norm <= K_max

    Only p in the lexicographically positive half-space is scanned, as (p, q)
    and (-p, -q) give the same value. p = 0 contributes |q| >= 1 at q = 1.

    Raises:
        InvalidInputError: If C', tau' or K_max are out of range
        UndecidableAtPrecision: If a value cannot be separated from 0 or from C'
    """
    threshold, tau_prime = Fraction(C_prime), Fraction(tau_prime)
    if threshold <= 0 or tau_prime <= 0:
        raise InvalidInputError(f"C' and tau' must be positive, got {threshold}, {tau_prime}")
    if K_max < 1:
        raise InvalidInputError(f"K_max must be at least 1, got {K_max}")
    threads = threads or DEFAULT_CONFIG.threads
    cap = effective_max_bits(max_bits)
    base_bits = max(a.precision_bits for a in alpha)
    scaled = _ScaledAlphas(alpha)
    norm_powers = {n: _power_bounds(n, tau_prime, base_bits) for n in range(1, K_max + 2)}

    def evaluate(p: Tuple[int, ...], q: int, P: int):
        bits = base_bits
        norm = norm_powers[max(P, abs(q))]
        while True:
            d_lo, d_hi = _dot_bounds(scaled, p, bits)
            lo, hi = d_lo + (q << bits), d_hi + (q << bits)
            if lo > 0 or hi < 0:
                if hi < 0:
                    lo, hi = -hi, -lo
                scale = 1 << bits
                value = (Fraction(lo, scale), Fraction(hi, scale))
                margin = (value[0] * norm[0], value[1] * norm[1])
                decision = _decide(margin, threshold)
                if decision is not None:
                    return value, margin, decision
            if bits >= cap:
                raise UndecidableAtPrecision(
                    f"p={p}, q={q}: linear form undecided at {bits} bits; "
                    f"inputs may be rationally dependent"
                )
            bits = min(2 * bits, cap)

    def scan(vectors: Sequence[Tuple[int, ...]]):
        best, failures, scanned = None, 0, 0
        for p in vectors:
            P = max(abs(c) for c in p)
            d_lo, d_hi = _dot_bounds(scaled, p, base_bits)
            scale = 1 << base_bits
            for q in _q_candidates(Fraction(-d_hi, scale), Fraction(-d_lo, scale), P, K_max):
                value, margin, ok = evaluate(p, q, P)
                scanned += 1
                failures += not ok
                key = (margin[0], p, q)
                if best is None or key < best[0]:
                    best = (key, value, margin)
        return best, failures, scanned

    vectors = [
        p for p in itertools.product(range(-K_max, K_max + 1), repeat=alpha.N) if _lex_positive(p)
    ]
    partials = _chunked(vectors, threads, scan)

    zero = (0,) * alpha.N
    one = (Fraction(1), Fraction(1))
    best = ((Fraction(1), zero, 1), one, one)
    failures = 0 if _decide(one, threshold) else 1
    scanned = 1
    for chunk_best, chunk_failures, chunk_scanned in partials:
        failures += chunk_failures
        scanned += chunk_scanned
        if chunk_best is not None and chunk_best[0] < best[0]:
            best = chunk_best

    (_, p, q), value, margin = best
    logger.info(
        f"Dual form scan K_max={K_max} tau'={tau_prime}: {scanned} vectors, "
        f"min margin at p={p}, q={q}, {failures} failures"
    )
    return DualFormResult(
        holds=failures == 0,
        p=p,
        q=q,
        value=RealScalar.from_interval(value[0], value[1], base_bits),
        margin=RealScalar.from_interval(margin[0], margin[1], base_bits),
        C_prime=threshold,
        tau_prime=tau_prime,
        K_max=K_max,
        vectors_scanned=scanned,
    )


# ----------------------------------------------------------------------
# Constructive word selection
# ----------------------------------------------------------------------

def _as_real(value) -> RealScalar:
    return value if isinstance(value, RealScalar) else coerce(Fraction(value))


def _certified_at_least(x: RealScalar, y: RealScalar, max_bits: Optional[int] = None) -> bool:
    try:
        return compare(x, y, max_bits) >= 0
    except UndecidableAtPrecision:
        return False


def _argmax(values: Sequence[RealScalar], max_bits: Optional[int] = None) -> int:
    """1-based index of the certified maximum"""
    best = 0
    for i in range(1, len(values)):
        if compare(values[i], values[best], max_bits) > 0:
            best = i
    return best + 1


def _min_by_float(values: Sequence[RealScalar]) -> Optional[RealScalar]:
    return min(values, key=float) if values else None


def appendix_envelope(
    pivots: Sequence[RealScalar], C: Real, tau: Real, tau_prime: Real
) -> Tuple[Optional[RealScalar], List[EnvelopeRow]]:
    """
    Brjuno increments along a word against pi_n (n log(1/k) + log(1/C) + tau'' log(1/pi_n))

    pivots are alpha^(n)_{w(n)}; tau'' = max(tau, tau' - 1). The constant k is
    fitted as the largest value making every row hold, and reported.
    """
    C, tau_pp = _as_real(C), max(Fraction(tau), Fraction(tau_prime) - 1)
    weights = [RealScalar.exact(1)]
    for x in pivots[:-1]:
        weights.append(weights[-1] * x)

    fitted = [
        power(pivots[n] / (C * power(weights[n], tau_pp)), Fraction(1, n))
        for n in range(1, len(pivots))
    ]
    k_fit = _min_by_float(fitted)
    if k_fit is None:
        return None, []

    log_inv_k, log_inv_c = -k_fit.log(), -C.log()
    rows = []
    for n in range(1, len(pivots)):
        weight = weights[n]
        increment = weight * -pivots[n].log()
        envelope = weight * (n * log_inv_k + log_inv_c + tau_pp * -weight.log())
        rows.append(EnvelopeRow(n, weight, increment, envelope, increment.lo <= envelope.hi))
    return k_fit, rows


def select_word_appendix(
    alpha: RotationVector,
    C: Real,
    tau: Real,
    depth: int,
    mode: str = "proof",
    start: int = 1,
    tau_prime: Optional[Real] = None,
    k_step: Real = 1,
    max_bits: Optional[int] = None,
) -> AppendixWordTrace:
    """
    Build a word whose pivots stay large against the running constant C_n

    At depth n with pivot w, 1/alpha_w = q + beta and |beta| = alpha tilde_w.
    Proof mode keeps w when alpha tilde_w alpha_w >= C_n / q**tau. Otherwise the
    first k != w with |q alpha_k - a_k| >= C_n / q**tau is tested against the
    threshold alpha_k |beta| <= C_n alpha_w**tau / 2, which picks k, and w when it
    fails. Greedy mode takes the largest image coordinate. The constant follows
    C_{n+1} = k_step C_n alpha_w**(tau' - 1).

    Raises:
        InvalidInputError: On bad depth, start or mode
        SelectorFailed: If proof mode finds no index passing the certified test
    """
    if depth < 1:
        raise InvalidInputError(f"depth must be at least 1, got {depth}")
    if mode not in ("proof", "greedy"):
        raise InvalidInputError(f"mode must be 'proof' or 'greedy', got {mode!r}")
    if not 1 <= start <= alpha.N:
        raise InvalidInputError(f"start pivot {start} outside 1..{alpha.N}")
    tau = Fraction(tau)
    tau_prime = Fraction(tau_prime) if tau_prime is not None else transference(alpha.N, tau)
    c_n = _as_real(C)
    k_step = coerce(Fraction(k_step))

    with precision_cap(max_bits):
        word, steps, pivots, ratios = [], [], [], []
        current, w = alpha, start
        for n in range(depth):
            step = gauss_step(current, w, max_bits)
            pivot, q = step.pivot, step.a[w - 1]
            beta = 1 / pivot - q
            alpha_tilde_w = step.image.component(w)
            word.append(w)
            pivots.append(pivot)

            tested = None
            if alpha.N == 1:
                j, test = 1, "forced"
            elif mode == "greedy":
                j, test = _argmax(step.image.alphas, max_bits), "greedy"
            else:
                bound = c_n / power(coerce(q), tau)
                if _certified_at_least(alpha_tilde_w * pivot, bound, max_bits):
                    j, test = w, "direct"
                else:
                    j = None
                    for k in range(1, alpha.N + 1):
                        if k == w:
                            continue
                        gap = abs(q * current.component(k) - step.a[k - 1])
                        if _certified_at_least(gap, bound, max_bits):
                            tested = k
                            threshold = c_n * power(pivot, tau) / 2
                            if _certified_at_least(threshold, current.component(k) * alpha_tilde_w, max_bits):
                                j, test = k, "threshold"
                            else:
                                j, test = w, "fallback"
                            break
                    if j is None:
                        raise SelectorFailed(
                            f"no index passes the certified test at depth {n} "
                            f"(C_n={float(c_n):.3e}, q={q}); alpha may not be in DC_N(C, tau)",
                            depth=n,
                        )

            if n > 0:
                ratios.append(pivot / (steps[-1].C_n * power(pivots[-2], tau)))
            steps.append(AppendixStep(n, w, q, beta, j, test, tested, c_n))
            logger.debug(f"Appendix selector depth {n}: w={w} q={q} -> j={j} ({test})")

            c_n = k_step * c_n * power(pivot, tau_prime - 1)
            current, w = step.image, j

        kappa = _min_by_float(ratios)
        k_fit, rows = appendix_envelope(pivots, C, tau, tau_prime)
    trace = AppendixWordTrace(
        word=tuple(word),
        mode=mode,
        steps=steps,
        kappa=kappa,
        k_fit=k_fit,
        tau_prime=tau_prime,
        envelope=rows,
    )
    logger.info(
        f"Appendix word of depth {depth} ({mode}): kappa="
        f"{float(kappa) if kappa is not None else 'n/a'}, "
        f"k_fit={float(k_fit) if k_fit is not None else 'n/a'}"
    )
    return trace
