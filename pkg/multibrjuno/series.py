"""
Truncated power series fixing 0

A series of order M is a 1-D numpy array c[0..M] holding the coefficient of z**n
at index n. Coefficients are complex128 by default; object arrays carry mpmath
mpc values (higher precision) or Fraction/int values (exact tests) through the
same code.
"""
import logging
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple, Union

import mpmath
import numpy as np

from multibrjuno.exceptions import DegenerateLinearTerm, InvalidInputError

logger = logging.getLogger(__name__)

SeriesLike = Union[np.ndarray, Sequence]


def as_series(coeffs: SeriesLike, order: Optional[int] = None) -> np.ndarray:
    """Coerce to a coefficient array, truncated or zero-padded to order"""
    c = np.asarray(coeffs)
    if c.ndim != 1 or c.size == 0:
        raise InvalidInputError("a series is a non-empty 1-D coefficient array")
    if c.dtype.kind not in "iufcO":
        raise InvalidInputError(f"unsupported coefficient dtype {c.dtype}")
    if c.dtype.kind in "iu":
        c = c.astype(complex)
    if order is None:
        return c
    if c.size > order + 1:
        return c[: order + 1].copy()
    out = zeros(order, c.dtype)
    out[: c.size] = c
    return out


def zeros(order: int, dtype=complex) -> np.ndarray:
    out = np.zeros(order + 1, dtype=dtype)
    if out.dtype == object:
        out[:] = 0
    return out


def identity(order: int, dtype=complex) -> np.ndarray:
    out = zeros(order, dtype)
    out[1] = 1
    return out


def rotation(lam, order: int, dtype=complex) -> np.ndarray:
    """The linear map z -> lam z"""
    out = zeros(order, dtype)
    out[1] = lam
    return out


def from_terms(terms: Iterable[Tuple[int, complex]], order: int, dtype=complex) -> np.ndarray:
    """Series from (n, coefficient) pairs"""
    out = zeros(order, dtype)
    for n, c in terms:
        if not 0 <= n <= order:
            raise InvalidInputError(f"term z^{n} outside order {order}")
        out[n] += c
    return out


def order_of(f: np.ndarray) -> int:
    return len(f) - 1


def _mul(a: np.ndarray, b: np.ndarray, order: int) -> np.ndarray:
    return np.convolve(a, b)[: order + 1]


def compose(f: SeriesLike, g: SeriesLike, order: Optional[int] = None) -> np.ndarray:
    """
    Coefficients of f(g(z)) through z**order

    g must have zero constant term; Horner's scheme with truncated products.

    Example:
        >>> compose([0, 1, 1], [0, 1, 1], 4).real
        array([0., 1., 2., 2., 1.])
    """
    if order is None:
        order = min(order_of(as_series(f)), order_of(as_series(g)))
    f, g = as_series(f, order), as_series(g, order)
    if g[0] != 0:
        raise InvalidInputError("the inner series must fix 0")
    result = zeros(order, np.result_type(f, g))
    result[0] = f[order]
    for k in range(order - 1, -1, -1):
        result = _mul(result, g, order)
        result[0] = result[0] + f[k]
    return result


class _PowerTable:
    """
    Table P[k, n] = [u**k]_n for a series u with u_0 = 0, filled column by column

    For k >= 2 column n only needs u_1..u_{n-1}, so the nonlinear part of
    [f o u]_n is known before u_n is solved for; this drives the order-by-order
    recursions of inversion and linearization.
    """

    def __init__(self, order: int, dtype):
        self.P = np.zeros((order + 1, order + 1), dtype=dtype)
        if self.P.dtype == object:
            self.P[:, :] = 0
        self.P[0, 0] = 1

    def extend(self, u: np.ndarray, n: int) -> None:
        P = self.P
        for k in range(2, n + 1):
            P[k, n] = np.dot(u[1:n - k + 2], P[k - 1, n - 1:k - 2:-1])

    def set_linear(self, u: np.ndarray, n: int) -> None:
        self.P[1, n] = u[n]

    def nonlinear(self, f: np.ndarray, n: int):
        """sum_{k=2}^{n} f_k [u**k]_n"""
        return np.dot(f[2:n + 1], self.P[2:n + 1, n])


def _is_zero(x) -> bool:
    if isinstance(x, (mpmath.mpc, mpmath.mpf)):
        return x == 0
    return abs(complex(x)) == 0


def series_invert(f: SeriesLike, order: Optional[int] = None) -> np.ndarray:
    """
    Compositional inverse g with f(g(z)) = z through z**order

    Order by order, f_1 g_n + sum_{k>=2} f_k [g**k]_n = 0.

    Raises:
        DegenerateLinearTerm: If the linear coefficient is 0
        InvalidInputError: If f does not fix 0

    Example:
        >>> series_invert([0, 1, 1], 5).real
        array([  0.,   1.,  -1.,   2.,  -5.,  14.])
    """
    f = as_series(f, order)
    order = order_of(f)
    if f[0] != 0:
        raise InvalidInputError("only series fixing 0 can be inverted")
    if order < 1 or _is_zero(f[1]):
        raise DegenerateLinearTerm("the linear coefficient is zero")

    table = _PowerTable(order, f.dtype)
    g = zeros(order, f.dtype)
    g[1] = Fraction(1, f[1]) if isinstance(f[1], int) else 1 / f[1]
    table.set_linear(g, 1)
    for n in range(2, order + 1):
        table.extend(g, n)
        g[n] = -table.nonlinear(f, n) * g[1]
        table.set_linear(g, n)
    return g


def commutator_residual(f: SeriesLike, g: SeriesLike, order: Optional[int] = None) -> float:
    """max over 2 <= n <= order of |[z**n](f o g - g o f)|"""
    if order is None:
        order = min(order_of(as_series(f)), order_of(as_series(g)))
    difference = compose(f, g, order) - compose(g, f, order)
    return max_abs(difference, start=2)


def max_abs(c: np.ndarray, start: int = 1) -> float:
    """Largest coefficient magnitude from index start on (0.0 if none)"""
    tail = c[start:]
    if tail.size == 0:
        return 0.0
    return float(max(abs(complex(x)) for x in tail))
