"""
Detectors built on the determinant ``det(alpha^(k), alpha^(k+1), alpha^(k+2))``
and on the torsion ODE residuals of unit-curvature curves.

Curve arguments are duck-typed: anything with ``derivatives(s, k_max)`` works
with :func:`det_k`; the torsion-based detectors additionally need curvature
jets, which :class:`~lorentz_curves.expr.CurveDef` gets from
:mod:`lorentz_curves.frame` and sampled curves provide themselves.

The reported determinant is the Cartesian coordinate determinant.  On a
g-orthonormal (or null) frame it equals the frame-component determinant up to
the orientation factor ``det3(T, N, B) = +-1``, so identities against the
closed-form residuals are checked in absolute value.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import frame as framelib
from .errors import (
    EmptyGrid,
    KappaNotOne,
    LightlikeNormal,
    NotApplicable,
    PoleError,
    RangeError,
    SigmaSingular,
)
from .expr import CurveDef, evaluate, parse_expression
from .families import TorsionFamily
from .frame import TOL_UNIT, CurveKind
from .jet import JET_ORDER, Jet
from .lorentz import det3

#: relative band for calling a sampled residual identically zero
ZERO_THRESHOLD = 1e-7
#: share of dropped grid points above which a report is inconclusive
MAX_DROPPED_FRACTION = 0.10
TOL_SIGMA = 1e-9
SIGMA_CONSTANT_TOL = 1e-6


class Verdict(enum.Enum):
    VANISHES = "Vanishes"
    NON_VANISHING = "NonVanishing"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class ResidualReport:
    grid: np.ndarray
    values: np.ndarray
    scale: float
    verdict: Verdict
    threshold: float
    dropped: list = field(default_factory=list)
    label: str = "det"

    @property
    def dropped_points(self) -> int:
        return len(self.dropped)

    @property
    def max_relative(self) -> float:
        if self.values.size == 0:
            return math.nan
        m = float(np.max(np.abs(self.values)))
        if self.scale > 0:
            return m / self.scale
        return 0.0 if m == 0 else math.inf

    def to_dict(self) -> dict:
        return {
            "grid": self.grid.tolist(),
            "values": self.values.tolist(),
            "scale": self.scale,
            "verdict": self.verdict.value,
            "threshold": self.threshold,
            "dropped_points": self.dropped_points,
        }


def _judge(values: np.ndarray, scale: float, threshold: float, n_total: int,
           n_dropped: int) -> Verdict:
    if n_total == 0 or values.size == 0 or n_dropped > MAX_DROPPED_FRACTION * n_total:
        return Verdict.INCONCLUSIVE
    if float(np.max(np.abs(values))) <= threshold * scale:
        return Verdict.VANISHES
    return Verdict.NON_VANISHING


def _check_grid(grid) -> np.ndarray:
    g = np.asarray(grid, dtype=float).ravel()
    if g.size == 0:
        raise EmptyGrid("grid is empty")
    if g.size > 1 and np.any(np.diff(g) <= 0):
        raise ValueError("grid must be strictly increasing")
    return g


def map_grid(fn, grid, workers: int | None = None, catch=(PoleError,)):
    """Apply ``fn`` to every grid point, in order.

    Exceptions listed in ``catch`` are returned in place of the result.
    With ``workers > 1`` points are evaluated on a thread pool; aggregation
    order is still the grid order.
    """
    def safe(s):
        try:
            return fn(float(s))
        except catch as exc:
            return exc

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(safe, grid))
    return [safe(s) for s in grid]


def uniform_grid(lo: float, hi: float, n: int) -> np.ndarray:
    if n < 1:
        raise EmptyGrid("grid needs at least one point")
    return np.linspace(lo, hi, n)


def frame_dual(curve, s0: float):
    """Dual basis of the curve's own frame at ``s0`` (None when undefined)."""
    if isinstance(curve, CurveDef):
        return framelib.frame_dual(curve, s0)
    fd = getattr(curve, "frame_dual", None)
    return fd(s0) if fd is not None else None


def _magnitude(curve, s0, *vectors) -> float:
    # Product of vector norms measured on the curve's frame.  Lorentz boosts
    # inflate Euclidean coordinate norms without changing the determinant, so
    # coordinates are only used when no frame exists.
    D = frame_dual(curve, s0)
    if D is not None:
        vectors = [D @ v for v in vectors]
    return float(np.prod([np.linalg.norm(v) for v in vectors]))


# -- determinant ladder --------------------------------------------------------


def det_k(curve, k: int, grid, threshold: float = ZERO_THRESHOLD,
          workers: int | None = None) -> ResidualReport:
    """Sample ``det3(alpha^(k), alpha^(k+1), alpha^(k+2))`` over ``grid``.

    ``k = 3`` is the unit-curvature slant-helix condition; ``k = 0, 1, 2`` are
    the great-circle, plane-curve and constant-slope conditions.
    Points where the curve has a pole are dropped and counted.
    """
    if k not in (0, 1, 2, 3):
        raise ValueError("k must be one of 0, 1, 2, 3")
    g = _check_grid(grid)

    def at(s):
        d = curve.derivatives(s, k + 2)
        a, b, c = d[k], d[k + 1], d[k + 2]
        return float(det3(a, b, c)), _magnitude(curve, s, a, b, c)

    results = map_grid(at, g, workers)
    keep, vals, mags, dropped = [], [], [], []
    for s, r in zip(g, results):
        if isinstance(r, Exception):
            dropped.append(float(s))
        else:
            keep.append(s)
            vals.append(r[0])
            mags.append(r[1])
    values = np.array(vals)
    scale = float(max(mags)) if mags else 0.0
    verdict = _judge(values, scale, threshold, g.size, len(dropped))
    return ResidualReport(np.array(keep), values, scale, verdict, threshold, dropped,
                          label=f"det{k}")


# -- torsion residuals ---------------------------------------------------------


def _tau_derivs(tau_jet: Jet):
    if tau_jet.order < 2:
        raise ValueError("torsion jet must have order >= 2")
    d = tau_jet.derivatives()
    return d[0], d[1], d[2]


def residual_nonnull_terms(tau_jet: Jet, eps_T: int, eps_B: int):
    """The two terms of the non-null residual, ``tau''(1 + e t^2)`` and ``3 e t t'^2``."""
    t, t1, t2 = _tau_derivs(tau_jet)
    e = eps_T * eps_B
    return t2 * (1.0 + e * t * t), 3.0 * e * t * t1 * t1


def residual_nonnull(tau_jet: Jet, eps_T: int, eps_B: int) -> float:
    """``tau''(1 + tau^2 eT eB) - 3 tau tau'^2 eT eB`` for a unit-curvature curve.

    With ``eT eB = -1`` this is ``tau''(1 - tau^2) + 3 tau tau'^2``; with
    ``eT eB = +1`` it is ``tau''(1 + tau^2) - 3 tau tau'^2``.
    """
    a, b = residual_nonnull_terms(tau_jet, eps_T, eps_B)
    return float(a - b)


def residual_null_terms(tau_jet: Jet):
    t, t1, t2 = _tau_derivs(tau_jet)
    return 2.0 * t * t2, 3.0 * t1 * t1


def residual_null(tau_jet: Jet) -> float:
    """``2 tau tau'' - 3 tau'^2`` for a null curve."""
    a, b = residual_null_terms(tau_jet)
    return float(a - b)


def _tau_source(tau, order: int):
    """Normalise a torsion specification to ``s -> Jet``."""
    if isinstance(tau, TorsionFamily):
        return lambda s: tau.jet(s, order)
    if isinstance(tau, str):
        node = parse_expression(tau)

        def from_text(s):
            v = evaluate(node, Jet.variable(s, order))
            return v if isinstance(v, Jet) else Jet.constant(v, order)

        return from_text
    return lambda s: tau(Jet.variable(s, order))


def torsion_residual_report(tau, grid, eps_product: int | None,
                            threshold: float = ZERO_THRESHOLD) -> ResidualReport:
    """Residual of the torsion ODE along ``grid`` for a prescribed torsion.

    Parameters
    ----------
    tau : TorsionFamily, str or callable
        Torsion as a family, an expression in ``s``, or a function of a Jet.
    eps_product : int or None
        ``eps_T * eps_B`` of the curve, or ``None`` for the null residual.

    The report scale is the largest magnitude of either residual term, so the
    verdict measures cancellation between them.
    """
    g = _check_grid(grid)
    src = _tau_source(tau, 3)

    def at(s):
        tj = src(s)
        if eps_product is None:
            a, b = residual_null_terms(tj)
        else:
            a, b = residual_nonnull_terms(tj, eps_product, 1)
        return float(a - b), max(abs(a), abs(b))

    results = map_grid(at, g, catch=(PoleError, RangeError, ArithmeticError))
    keep, vals, mags, dropped = [], [], [], []
    for s, r in zip(g, results):
        if isinstance(r, Exception):
            dropped.append(float(s))
        else:
            keep.append(s)
            vals.append(r[0])
            mags.append(r[1])
    values = np.array(vals)
    scale = float(max(mags)) if mags else 0.0
    verdict = _judge(values, scale, threshold, g.size, len(dropped))
    label = "null" if eps_product is None else f"nonnull(eTeB={eps_product:+d})"
    return ResidualReport(np.array(keep), values, scale, verdict, threshold, dropped, label)


# -- curvature jets of arbitrary curve sources ---------------------------------


def curvature_jets(curve, s0: float) -> framelib.CurvatureJets:
    if isinstance(curve, CurveDef):
        return framelib.curvature_jets(curve, s0, JET_ORDER)
    return curve.curvature_jets(s0)


def det345_closed_form_check(curve, grid) -> float:
    """Largest pointwise gap between ``|det(alpha''', alpha'''', alpha^(5))|`` and
    the closed-form torsion residual, relative to
    ``|alpha'''| |alpha''''| |alpha^(5)|``.

    Raises
    ------
    KappaNotOne
        A non-null grid point has curvature different from one.
    """
    g = _check_grid(grid)
    worst = 0.0
    for s in g:
        cj = curvature_jets(curve, float(s))
        if cj.null:
            res = residual_null(cj.tau)
        else:
            if abs(cj.kappa.value - 1.0) > TOL_UNIT:
                raise KappaNotOne(f"curvature {cj.kappa.value!r} at s={s!r}")
            res = residual_nonnull(cj.tau, cj.eps_T, cj.eps_B)
        d = curve.derivatives(float(s), 5)
        det = float(det3(d[3], d[4], d[5]))
        mag = _magnitude(curve, float(s), d[3], d[4], d[5])
        gap = abs(abs(det) - abs(res)) / (mag if mag > 0 else 1.0)
        worst = max(worst, gap)
    return worst


# -- slant-helix indicator -----------------------------------------------------


def slant_indicator(curve, s0: float) -> float:
    """Slant-helix indicator ``kappa^2 / |tau^2 + eT eB kappa^2|^(3/2) * (tau/kappa)'``.

    For ``eT eB = -1`` the absolute value selects the ``(tau^2 - kappa^2)`` or
    ``(kappa^2 - tau^2)`` branch by the sign of ``tau^2 - kappa^2``.  The
    curve is a slant helix exactly when this is constant.

    Raises
    ------
    SigmaSingular
        ``|tau^2 + eT eB kappa^2| <= TOL_SIGMA``.
    LightlikeNormal
        Spacelike curve with lightlike normal; such curves are always slant.
    """
    cj = curvature_jets(curve, s0)
    if cj.null:
        raise NotApplicable("the slant indicator is defined for non-null curves only")
    k, t = cj.kappa, cj.tau
    e = cj.eps_T * cj.eps_B
    den = t.value**2 + e * k.value**2
    if abs(den) <= TOL_SIGMA:
        raise SigmaSingular(f"tau^2 {'+' if e > 0 else '-'} kappa^2 vanishes at s={s0!r}")
    ratio_prime = (t / k).derivative_value(1)
    return float(k.value**2 / abs(den) ** 1.5 * ratio_prime)


@dataclass
class SlantReport:
    grid: np.ndarray
    values: np.ndarray
    mean: float
    std: float
    constant: bool
    tolerance: float
    dropped: list = field(default_factory=list)
    note: str | None = None

    def to_dict(self) -> dict:
        return {
            "grid": self.grid.tolist(),
            "values": self.values.tolist(),
            "mean": self.mean,
            "std": self.std,
            "constant": self.constant,
            "tolerance": self.tolerance,
            "dropped_points": len(self.dropped),
            "note": self.note,
        }


def slant_report(curve, grid, tol: float = SIGMA_CONSTANT_TOL,
                 workers: int | None = None) -> SlantReport:
    """Sample the slant indicator and judge constancy by its standard deviation."""
    g = _check_grid(grid)
    results = map_grid(lambda s: slant_indicator(curve, s), g, workers,
                       catch=(PoleError, SigmaSingular, LightlikeNormal))
    if any(isinstance(r, LightlikeNormal) for r in results):
        return SlantReport(g, np.array([]), math.nan, 0.0, True, tol,
                           note="lightlike normal: every such spacelike curve is slant")
    keep = [(s, r) for s, r in zip(g, results) if not isinstance(r, Exception)]
    dropped = [float(s) for s, r in zip(g, results) if isinstance(r, Exception)]
    if not keep:
        return SlantReport(np.array([]), np.array([]), math.nan, math.nan, False, tol,
                           dropped, note="no evaluable grid points")
    grid_kept = np.array([s for s, _ in keep])
    vals = np.array([r for _, r in keep])
    std = float(np.std(vals))
    return SlantReport(grid_kept, vals, float(np.mean(vals)), std, std <= tol, tol, dropped)


# -- tangent indicatrix --------------------------------------------------------


class TangentIndicatrix:
    """The curve ``s -> alpha'(s)`` of a unit-curvature non-null curve.

    Because ``|T'| = kappa = 1`` it shares the parameter of ``alpha``, and its
    k-th derivative is ``alpha^(k+1)``; in particular
    ``det_k(indicatrix, 2) == det_k(alpha, 3)``.
    """

    def __init__(self, curve: CurveDef):
        self.curve = curve

    def frame_dual(self, s0: float):
        return framelib.frame_dual(self.curve, s0)

    def _check(self, s0: float):
        cls = framelib.classify_curve(self.curve, s0)
        if cls.kind is not CurveKind.NON_NULL_UNIT_SPEED:
            raise KappaNotOne(f"indicatrix needs a unit-speed non-null curve ({cls.kind.value})")
        if abs(abs(cls.g22) - 1.0) > TOL_UNIT:
            raise KappaNotOne(f"curvature^2 = {abs(cls.g22)!r} at s={s0!r}, expected 1")

    def derivatives(self, s0: float, k_max: int = JET_ORDER - 1) -> np.ndarray:
        """Derivatives of the indicatrix, i.e. ``alpha^(1..k_max+1)``."""
        self._check(s0)
        return self.curve.derivatives(s0, k_max + 1)[1:]

    def position(self, s0: float) -> np.ndarray:
        return self.derivatives(s0, 0)[0]


def tangent_indicatrix(curve: CurveDef, check_at=()) -> TangentIndicatrix:
    """Tangent indicatrix of ``curve``; ``check_at`` points are validated eagerly."""
    ind = TangentIndicatrix(curve)
    for s in check_at:
        ind._check(float(s))
    return ind


__all__ = [
    "ResidualReport",
    "SlantReport",
    "TangentIndicatrix",
    "Verdict",
    "det345_closed_form_check",
    "det_k",
    "map_grid",
    "residual_nonnull",
    "residual_null",
    "slant_indicator",
    "slant_report",
    "tangent_indicatrix",
    "torsion_residual_report",
    "uniform_grid",
]
