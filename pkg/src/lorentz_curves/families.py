"""
Closed-form torsion families of unit-curvature slant helices.

=========================  ========================================  ==============
case                       torsion                                   eps_T * eps_B
=========================  ========================================  ==============
spacelike-sn-or-timelike   sign * u / sqrt(inner + u^2),  u = b s + c    -1
spacelike-tn               sign * u / sqrt(1 - u^2)                      +1
null-slant                 a / (b s + c)^2                               (null)
salkowski-i                sign * s / sqrt(t^2 + s^2),  t = tanh(phi)    -1
salkowski-ii               sign * s / sqrt(t^2 - s^2)                    +1
salkowski-iii              sign * s / sqrt(s^2 - t^2)                    -1
=========================  ========================================  ==============

The Salkowski cases are the ``c = 0, b = 1/tanh(phi)`` members of the first two
rows; ``salkowski-iii`` is the ``inner = -1`` branch realised by timelike curves.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import jet as jetlib
from .errors import InsufficientSamples, NoConvergence, RangeError
from .jet import Jet


class FamilyCase(enum.Enum):
    SPACELIKE_SN_OR_TIMELIKE = "spacelike-sn-or-timelike"
    SPACELIKE_TN = "spacelike-tn"
    NULL_SLANT = "null-slant"
    SALKOWSKI_I = "salkowski-i"
    SALKOWSKI_II = "salkowski-ii"
    SALKOWSKI_III = "salkowski-iii"

    @property
    def param_names(self) -> tuple:
        if self is FamilyCase.NULL_SLANT:
            return ("a", "b", "c")
        if self in _SALKOWSKI:
            return ("phi",)
        return ("b", "c")

    @property
    def eps_product(self) -> int | None:
        """``eps_T * eps_B`` of the curves realising this family (None: null)."""
        if self is FamilyCase.NULL_SLANT:
            return None
        if self in (FamilyCase.SPACELIKE_TN, FamilyCase.SALKOWSKI_II):
            return 1
        return -1


_SALKOWSKI = (FamilyCase.SALKOWSKI_I, FamilyCase.SALKOWSKI_II, FamilyCase.SALKOWSKI_III)


@dataclass(frozen=True)
class TorsionFamily:
    case: FamilyCase
    params: dict = field(hash=False)
    sign: int = 1
    inner_sign: int = 1

    def __post_init__(self):
        case = FamilyCase(self.case)
        object.__setattr__(self, "case", case)
        missing = set(case.param_names) - set(self.params)
        if missing:
            raise ValueError(f"{case.value} needs parameters {sorted(missing)}")
        extra = set(self.params) - set(case.param_names)
        if extra:
            raise ValueError(f"{case.value} does not take parameters {sorted(extra)}")
        object.__setattr__(self, "params", {k: float(self.params[k]) for k in case.param_names})
        if self.sign not in (1, -1) or self.inner_sign not in (1, -1):
            raise ValueError("sign and inner_sign must be +1 or -1")
        if case is not FamilyCase.SPACELIKE_SN_OR_TIMELIKE and self.inner_sign != 1:
            raise ValueError("inner_sign only applies to spacelike-sn-or-timelike")
        if case in (FamilyCase.SPACELIKE_SN_OR_TIMELIKE, FamilyCase.SPACELIKE_TN) \
                and self.params["b"] == 0:
            raise ValueError("b must be non-zero")
        if case in _SALKOWSKI and math.tanh(self.params["phi"]) == 0:
            raise ValueError("tanh(phi) must be non-zero")

    def __call__(self, s):
        return torsion_family_eval(self, s)

    def jet(self, s0: float, order: int = jetlib.JET_ORDER) -> Jet:
        return torsion_family_eval(self, Jet.variable(s0, order))

    def in_range(self, s: float) -> bool:
        try:
            torsion_family_eval(self, float(s))
        except RangeError:
            return False
        return True

    def to_dict(self) -> dict:
        return {
            "case": self.case.value,
            "params": dict(self.params),
            "sign": self.sign,
            "inner_sign": self.inner_sign,
        }

    def describe(self) -> str:
        p = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"{self.case.value}({p}, sign={self.sign}, inner_sign={self.inner_sign})"


def _lead(x) -> float:
    return x.value if isinstance(x, Jet) else float(x)


def _tau(case: FamilyCase, params: dict, sign: int, inner: int, s):
    """Family torsion; ``s`` and any parameter may be a Jet."""
    if case is FamilyCase.NULL_SLANT:
        u = params["b"] * s + params["c"]
        if _lead(u) == 0:
            raise RangeError(f"b*s + c vanishes at s={_lead(s)!r}")
        return params["a"] / (u * u)

    if case in _SALKOWSKI:
        t = jetlib.tanh(params["phi"])
        tt, ss = t * t, s * s
        if case is FamilyCase.SALKOWSKI_I:
            bracket = tt + ss
        elif case is FamilyCase.SALKOWSKI_II:
            bracket = tt - ss
        else:
            bracket = ss - tt
        num = s
    else:
        u = params["b"] * s + params["c"]
        if case is FamilyCase.SPACELIKE_TN:
            bracket = 1.0 - u * u
        else:
            bracket = inner + u * u
        num = u
    if _lead(bracket) <= 0:
        raise RangeError(
            f"{case.value}: bracket {_lead(bracket)!r} is not positive at s={_lead(s)!r}"
        )
    return sign * num / jetlib.sqrt(bracket)


def torsion_family_eval(family: TorsionFamily, s):
    """Torsion of ``family`` at ``s`` (a float, or a Jet for derivatives).

    Raises
    ------
    RangeError
        Outside the validity set of the family.
    """
    return _tau(family.case, family.params, family.sign, family.inner_sign, s)


def validity_interval(family: TorsionFamily) -> tuple:
    """Largest open interval (possibly unbounded) on which the family is defined.

    For families whose validity set has two components the component on the
    positive side of the singular point is returned.
    """
    case, p = family.case, family.params
    if case in _SALKOWSKI:
        t = abs(math.tanh(p["phi"]))
        if case is FamilyCase.SALKOWSKI_I:
            return (-math.inf, math.inf)
        if case is FamilyCase.SALKOWSKI_II:
            return (-t, t)
        return (t, math.inf)
    b, c = p["b"], p["c"]
    if case is FamilyCase.NULL_SLANT:
        if b == 0:
            return (-math.inf, math.inf)
        root = -c / b
        return (root, math.inf)
    if case is FamilyCase.SPACELIKE_TN:
        lo, hi = sorted(((-1 - c) / b, (1 - c) / b))
        return (lo, hi)
    if family.inner_sign == 1:
        return (-math.inf, math.inf)
    # |b s + c| > 1: take the branch on the larger-s side
    lo = max((-1 - c) / b, (1 - c) / b)
    return (lo, math.inf)


# -- fitting -------------------------------------------------------------------


@dataclass(frozen=True)
class FitResult:
    family: TorsionFamily
    rms: float
    iterations: int
    converged: bool = True

    def to_dict(self) -> dict:
        return {
            "family": self.family.to_dict(),
            "rms": self.rms,
            "iterations": self.iterations,
            "converged": self.converged,
        }


def _free_params(case: FamilyCase) -> tuple:
    # b is pinned to 1 for null-slant: a/(bs+c)^2 is invariant under (l^2 a, l b, l c)
    if case is FamilyCase.NULL_SLANT:
        return ("a", "c")
    return case.param_names


def _model(case, names, x, sign, inner, s, fixed):
    params = dict(fixed)
    params.update(zip(names, x))
    return _tau(case, params, sign, inner, s)


def _residual_and_jacobian(case, names, x, sign, inner, s, tau, fixed):
    n, m = s.size, len(names)
    r = np.empty(n)
    J = np.empty((n, m))
    for j in range(m):
        xj = [Jet([v, 1.0]) if k == j else v for k, v in enumerate(x)]
        for i in range(n):
            v = _model(case, names, xj, sign, inner, s[i], fixed)
            if isinstance(v, Jet):
                r[i] = v.coeffs[0] - tau[i]
                J[i, j] = v.coeffs[1]
            else:
                r[i] = v - tau[i]
                J[i, j] = 0.0
    return r, J


def _cost(case, names, x, sign, inner, s, tau, fixed) -> float:
    try:
        r = np.array([_model(case, names, x, sign, inner, si, fixed) for si in s]) - tau
    except (RangeError, ArithmeticError, ValueError):
        return math.inf
    return float(r @ r)


def _gauss_newton(case, names, x0, sign, inner, s, tau, fixed, max_iter):
    x = np.array(x0, dtype=float)
    cost = _cost(case, names, x, sign, inner, s, tau, fixed)
    if not math.isfinite(cost):
        return x, cost, 0, False
    for it in range(1, max_iter + 1):
        r, J = _residual_and_jacobian(case, names, x, sign, inner, s, tau, fixed)
        step, *_ = np.linalg.lstsq(J, -r, rcond=None)
        alpha = 1.0
        for _ in range(60):
            trial = x + alpha * step
            c = _cost(case, names, trial, sign, inner, s, tau, fixed)
            if c < cost:
                break
            alpha *= 0.5
        else:
            # no descent along the Gauss-Newton direction: stationary to rounding
            return x, cost, it, True
        small_step = np.linalg.norm(alpha * step) <= 1e-13 * (1.0 + np.linalg.norm(x))
        stalled = cost - c <= 1e-15 * cost
        x, cost = trial, c
        if cost <= 1e-30 or small_step or stalled:
            return x, cost, it, True
    return x, cost, max_iter, False


def _linear_fit(s, y):
    A = np.vstack([s, np.ones_like(s)]).T
    (slope, icpt), *_ = np.linalg.lstsq(A, y, rcond=None)
    return slope, icpt


def _initial_guesses(case: FamilyCase, sign: int, inner: int, s, tau) -> list:
    """Starting points from linearising the family where the data allow it."""
    guesses = []
    with np.errstate(all="ignore"):
        if case is FamilyCase.NULL_SLANT:
            if np.all(tau > 0) or np.all(tau < 0):
                # 1/sqrt|tau| = (s + c)/sqrt|a|
                slope, icpt = _linear_fit(s, 1.0 / np.sqrt(np.abs(tau)))
                if slope != 0:
                    guesses.append([np.sign(tau[0]) / slope**2, icpt / slope])
            guesses.append([float(np.mean(tau)), 0.0])
        elif case in _SALKOWSKI:
            if case is FamilyCase.SALKOWSKI_I:
                t2 = s**2 * (1.0 / tau**2 - 1.0)
            elif case is FamilyCase.SALKOWSKI_II:
                t2 = s**2 * (1.0 / tau**2 + 1.0)
            else:
                t2 = s**2 * (1.0 - 1.0 / tau**2)
            t2 = t2[np.isfinite(t2) & (t2 > 0)]
            if t2.size:
                t = min(math.sqrt(float(np.median(t2))), 1.0 - 1e-12)
                guesses.append([math.atanh(t)])
            guesses.append([1.0])
        else:
            if case is FamilyCase.SPACELIKE_TN:
                u = sign * tau / np.sqrt(1.0 + tau**2)
            elif inner == 1:
                u = sign * tau / np.sqrt(1.0 - tau**2)
            else:
                u = sign * tau / np.sqrt(tau**2 - 1.0)
            if np.all(np.isfinite(u)):
                guesses.append(list(_linear_fit(s, u)))
            guesses.append([1.0, 0.0])
    return guesses


def _model_array(case: FamilyCase, p: dict, sign: int, inner: int, s: np.ndarray):
    # vectorized family; nan outside the validity set
    with np.errstate(all="ignore"):
        if case is FamilyCase.NULL_SLANT:
            u = p["b"] * s + p["c"]
            return np.where(u != 0, p["a"] / (u * u), np.nan)
        if case in _SALKOWSKI:
            tt = math.tanh(p["phi"]) ** 2
            bracket = {FamilyCase.SALKOWSKI_I: tt + s * s, FamilyCase.SALKOWSKI_II: tt - s * s,
                       FamilyCase.SALKOWSKI_III: s * s - tt}[case]
            num = s
        else:
            num = p["b"] * s + p["c"]
            bracket = 1.0 - num * num if case is FamilyCase.SPACELIKE_TN else inner + num * num
        return np.where(bracket > 0, sign * num / np.sqrt(np.abs(bracket)), np.nan)


def _scan_guesses(case: FamilyCase, names, sign: int, inner: int, s, tau, fixed,
                  keep: int = 3) -> list:
    """Best points of a coarse parameter grid, as extra Gauss-Newton starts."""
    if case in _SALKOWSKI:
        axes = [np.geomspace(0.05, 5.0, 25)]
    elif case is FamilyCase.NULL_SLANT:
        scale = float(np.max(np.abs(tau))) or 1.0
        a = np.geomspace(1e-2, 1e2, 9) * scale
        axes = [np.concatenate([-a, a]), np.linspace(-5.0, 5.0, 41)]
    else:
        axes = [np.geomspace(0.05, 20.0, 25), np.linspace(-5.0, 5.0, 41)]
    scored = []
    for x in np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, len(axes)):
        p = dict(fixed)
        p.update(zip(names, x))
        r = _model_array(case, p, sign, inner, s) - tau
        if np.all(np.isfinite(r)):
            scored.append((float(r @ r), list(x)))
    scored.sort(key=lambda t: t[0])
    return [x for _, x in scored[:keep]]


def _canonical(case: FamilyCase, params: dict, sign: int, inner: int) -> TorsionFamily:
    if case in _SALKOWSKI:
        params = {"phi": abs(params["phi"])}
    elif case is not FamilyCase.NULL_SLANT and params["b"] < 0:
        params = {"b": -params["b"], "c": -params["c"]}
        sign = -sign
    return TorsionFamily(case, params, sign, inner)


def fit_torsion_family(samples, family_case, max_iter: int = 200) -> FitResult:
    """Least-squares fit of a torsion family to ``(s, tau)`` samples.

    Gauss-Newton with backtracking; the Jacobian comes from first-order jets in
    the parameters.  Every discrete branch (outer sign, and the inner sign of
    ``spacelike-sn-or-timelike``) is tried and the best is kept.  The result is
    reported in canonical form: ``b > 0`` for the bracket families, ``b = 1``
    for ``null-slant`` and ``phi > 0`` for the Salkowski cases.

    Raises
    ------
    InsufficientSamples
        Fewer than three samples.
    NoConvergence
        The best branch exhausted ``max_iter``; carries the last iterate.
    """
    case = FamilyCase(family_case)
    data = np.asarray(samples, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise ValueError("samples must be an (n, 2) array of (s, tau)")
    if data.shape[0] < 3:
        raise InsufficientSamples(f"need at least 3 samples, got {data.shape[0]}")
    s, tau = data[:, 0], data[:, 1]
    names = _free_params(case)
    fixed = {"b": 1.0} if case is FamilyCase.NULL_SLANT else {}

    signs = (1,) if case is FamilyCase.NULL_SLANT else (1, -1)
    inners = (1, -1) if case is FamilyCase.SPACELIKE_SN_OR_TIMELIKE else (1,)
    best = None
    for sign in signs:
        for inner in inners:
            starts = _initial_guesses(case, sign, inner, s, tau)
            starts += _scan_guesses(case, names, sign, inner, s, tau, fixed)
            for x0 in starts:
                x, cost, its, ok = _gauss_newton(case, names, x0, sign, inner, s, tau,
                                                 fixed, max_iter)
                if not math.isfinite(cost):
                    continue
                if best is None or cost < best[1]:
                    best = (x, cost, its, ok, sign, inner)
    if best is None:
        raise NoConvergence("no starting point produced a finite residual")
    x, cost, its, ok, sign, inner = best
    params = dict(fixed)
    params.update(zip(names, map(float, x)))
    family = _canonical(case, params, sign, inner)
    rms = math.sqrt(cost / s.size)
    if not ok:
        raise NoConvergence(f"no convergence after {max_iter} iterations (rms={rms:.3g})",
                            params=family, rms=rms)
    return FitResult(family, rms, its, True)
