"""
Truncated Taylor series ("jets") in one variable.

A jet of order K stores ``coeffs[k] = f^(k)(s0) / k!`` for ``k = 0..K``.
Arithmetic between jets reproduces the Taylor coefficients of the combined
function exactly up to rounding, which is what lets the package take fifth
derivatives of closed-form curves without finite differences.

Mixing jets of different orders truncates to the lower order, so a jet that
has been differentiated ``m`` times silently carries ``m`` fewer coefficients.
The elementary functions below also accept plain floats.
"""

from __future__ import annotations

import math
import numbers

import numpy as np

from .errors import DivisionBySingularity, DomainError

#: default truncation order; one above the highest derivative any detector uses
JET_ORDER = 6

#: leading coefficients at or below this magnitude are treated as exact zeros
TOL_DIV = 1e-300

_FACTORIALS = np.array([math.factorial(k) for k in range(JET_ORDER + 1)], dtype=float)


def _factorials(n: int) -> np.ndarray:
    if n <= JET_ORDER + 1:
        return _FACTORIALS[:n]
    return np.array([math.factorial(k) for k in range(n)], dtype=float)


class Jet:
    """Truncated Taylor expansion of a scalar function about some point."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("jet coefficients must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(c)):
            raise ValueError(f"non-finite jet coefficient in {c!r}")
        self.coeffs = c

    @classmethod
    def _raw(cls, coeffs: np.ndarray) -> "Jet":
        j = object.__new__(cls)
        j.coeffs = coeffs
        return j

    @classmethod
    def variable(cls, s0: float, order: int = JET_ORDER) -> "Jet":
        """The identity function expanded about ``s0``."""
        c = np.zeros(order + 1)
        c[0] = s0
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @classmethod
    def constant(cls, value: float, order: int = JET_ORDER) -> "Jet":
        c = np.zeros(order + 1)
        c[0] = value
        return cls(c)

    @classmethod
    def from_derivatives(cls, derivs) -> "Jet":
        """Build a jet from ``[f, f', f'', ...]`` at the expansion point."""
        d = np.asarray(derivs, dtype=float)
        return cls(d / _factorials(d.size))

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    @property
    def value(self) -> float:
        return float(self.coeffs[0])

    def derivatives(self) -> np.ndarray:
        """``[f(s0), f'(s0), ..., f^(K)(s0)]``."""
        return self.coeffs * _factorials(self.coeffs.size)

    def derivative_value(self, k: int) -> float:
        if k > self.order:
            raise ValueError(f"derivative {k} exceeds jet order {self.order}")
        return float(self.coeffs[k] * math.factorial(k))

    def derivative(self) -> "Jet":
        """Jet of ``f'``; one order shorter."""
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        k = np.arange(1, self.coeffs.size)
        return Jet._raw(self.coeffs[1:] * k)

    def truncate(self, order: int) -> "Jet":
        return Jet._raw(self.coeffs[: order + 1].copy())

    def __repr__(self):
        return f"Jet({self.coeffs.tolist()!r})"

    def __eq__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        return self.coeffs.shape == other.coeffs.shape and bool(np.all(self.coeffs == other.coeffs))

    __hash__ = None

    # -- arithmetic ----------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Jet):
            n = min(self.coeffs.size, other.coeffs.size)
            return self.coeffs[:n], other.coeffs[:n]
        if isinstance(other, numbers.Real):
            c = np.zeros_like(self.coeffs)
            c[0] = float(other)
            return self.coeffs, c
        return None

    def __neg__(self):
        return Jet._raw(-self.coeffs)

    def __pos__(self):
        return self

    def __add__(self, other):
        if isinstance(other, numbers.Real):
            c = self.coeffs.copy()
            c[0] += other
            return Jet._raw(c)
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        return Jet._raw(pair[0] + pair[1])

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, numbers.Real):
            c = self.coeffs.copy()
            c[0] -= other
            return Jet._raw(c)
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        return Jet._raw(pair[0] - pair[1])

    def __rsub__(self, other):
        if not isinstance(other, numbers.Real):
            return NotImplemented
        c = -self.coeffs
        c[0] += other
        return Jet._raw(c)

    def __mul__(self, other):
        if isinstance(other, numbers.Real):
            return Jet._raw(self.coeffs * float(other))
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return Jet._raw(np.convolve(a, b)[: a.size])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, numbers.Real):
            if abs(other) <= TOL_DIV:
                raise DivisionBySingularity("division by zero constant")
            return Jet._raw(self.coeffs / float(other))
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        return Jet._raw(_series_div(*pair))

    def __rtruediv__(self, other):
        if not isinstance(other, numbers.Real):
            return NotImplemented
        num = np.zeros_like(self.coeffs)
        num[0] = float(other)
        return Jet._raw(_series_div(num, self.coeffs))

    def __pow__(self, n):
        if isinstance(n, numbers.Integral) or (isinstance(n, float) and n.is_integer()):
            return _pow_int(self, int(n))
        return NotImplemented


def _series_div(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if abs(b[0]) <= TOL_DIV:
        raise DivisionBySingularity(f"leading coefficient {b[0]!r} of divisor vanishes")
    c = np.empty_like(a)
    for k in range(a.size):
        c[k] = (a[k] - np.dot(b[1 : k + 1], c[k - 1 :: -1][:k])) / b[0]
    return c


def _pow_int(x: Jet, n: int) -> Jet:
    if n < 0:
        return 1.0 / _pow_int(x, -n)
    result = Jet.constant(1.0, x.order)
    base = x
    while n:
        if n & 1:
            result = result * base
        n >>= 1
        if n:
            base = base * base
    return result


# -- elementary functions ------------------------------------------------------


def _sin_cos(a: np.ndarray, hyperbolic: bool):
    # s' = a' c,  c' = -a' s   (hyperbolic: c' = +a' s)
    n = a.size
    s = np.empty(n)
    c = np.empty(n)
    if hyperbolic:
        s[0], c[0] = math.sinh(a[0]), math.cosh(a[0])
    else:
        s[0], c[0] = math.sin(a[0]), math.cos(a[0])
    sgn = 1.0 if hyperbolic else -1.0
    ja = np.arange(n) * a
    for k in range(1, n):
        s[k] = np.dot(ja[1 : k + 1], c[k - 1 :: -1][:k]) / k
        c[k] = sgn * np.dot(ja[1 : k + 1], s[k - 1 :: -1][:k]) / k
    return s, c


def exp(x):
    if not isinstance(x, Jet):
        return math.exp(x)
    a = x.coeffs
    n = a.size
    b = np.empty(n)
    b[0] = math.exp(a[0])
    ja = np.arange(n) * a
    for k in range(1, n):
        b[k] = np.dot(ja[1 : k + 1], b[k - 1 :: -1][:k]) / k
    return Jet._raw(b)


def sqrt(x):
    if not isinstance(x, Jet):
        if x < 0:
            raise DomainError(f"sqrt of negative number {x!r}")
        return math.sqrt(x)
    a = x.coeffs
    if a[0] <= TOL_DIV:
        raise DomainError(f"sqrt of jet with non-positive leading coefficient {a[0]!r}")
    n = a.size
    b = np.empty(n)
    b[0] = math.sqrt(a[0])
    for k in range(1, n):
        b[k] = (a[k] - np.dot(b[1:k], b[k - 1 : 0 : -1])) / (2.0 * b[0])
    return Jet._raw(b)


def sin(x):
    if not isinstance(x, Jet):
        return math.sin(x)
    return Jet._raw(_sin_cos(x.coeffs, False)[0])


def cos(x):
    if not isinstance(x, Jet):
        return math.cos(x)
    return Jet._raw(_sin_cos(x.coeffs, False)[1])


def sinh(x):
    if not isinstance(x, Jet):
        return math.sinh(x)
    return Jet._raw(_sin_cos(x.coeffs, True)[0])


def cosh(x):
    if not isinstance(x, Jet):
        return math.cosh(x)
    return Jet._raw(_sin_cos(x.coeffs, True)[1])


def tanh(x):
    if not isinstance(x, Jet):
        return math.tanh(x)
    # t' = a' (1 - t^2) stays bounded where sinh/cosh would overflow
    a = x.coeffs
    n = a.size
    t = np.empty(n)
    u = np.empty(n)
    t[0] = math.tanh(a[0])
    u[0] = 1.0 - t[0] * t[0]
    ja = np.arange(n) * a
    for k in range(1, n):
        t[k] = np.dot(ja[1 : k + 1], u[k - 1 :: -1][:k]) / k
        u[k] = -np.dot(t[: k + 1], t[k::-1])
    return Jet._raw(t)


FUNCTIONS = {
    "sqrt": sqrt,
    "exp": exp,
    "sin": sin,
    "cos": cos,
    "sinh": sinh,
    "cosh": cosh,
    "tanh": tanh,
}


def jet_arith(op: str, a: Jet, b=None) -> Jet:
    """Named-operation front end to the operator overloads."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "neg":
        return -a
    if op == "pow_int":
        return _pow_int(a, int(b))
    raise ValueError(f"unknown jet operation {op!r}")


def jet_func(name: str, a):
    try:
        f = FUNCTIONS[name]
    except KeyError:
        raise ValueError(f"unknown jet function {name!r}") from None
    return f(a)
