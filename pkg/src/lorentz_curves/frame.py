"""
Frenet apparatus of non-null curves and Cartan apparatus of null curves.

Everything is computed on jets, so the frame vectors, curvature and torsion
come with their own Taylor expansions; the detectors in
:mod:`lorentz_curves.characterize` read ``tau'``, ``tau''`` straight from them.

Sign conventions
----------------
Non-null curves satisfy::

    T' = kappa N
    N' = -eps_T eps_N kappa T + tau B
    B' = -eps_N eps_B tau N

with ``B`` oriented so that ``det3(T, N, B) > 0`` and ``tau = eps_B g(N', B)``.

Null curves use the pseudo-arc parameter (``g(alpha'', alpha'') = 1``) and the
null frame ``g(T, B) = 1``, ``g(N, N) = 1``.  The torsion is reported as
``tau = -g(N', B)``, i.e. the frame obeys::

    T' = kappa N,   N' = -tau T - kappa B,   B' = tau N

With this sign the null curve
``(1/6)(s^5/5 - 1/s, s^2, s^5/5 + 1/s)`` has ``tau = -4/s^2``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import jet as jetlib
from .errors import (
    DegenerateCurvature,
    DegenerateFrame,
    LightlikeNormal,
    StraightNullLine,
)
from .expr import CurveDef
from .jet import JET_ORDER, Jet
from .lorentz import TOL_NULL, det3, lorentz_cross, metric_g, sign_of

TOL_UNIT = 1e-7
TOL_KAPPA = 1e-9


class CurveKind(enum.Enum):
    NON_NULL_UNIT_SPEED = "NonNullUnitSpeed"
    NULL_PSEUDO_ARC = "NullPseudoArc"
    SPACELIKE_LIGHTLIKE_NORMAL = "SpacelikeLightlikeNormal"
    NOT_NORMALIZED = "NotNormalized"


@dataclass(frozen=True)
class Classification:
    kind: CurveKind
    s: float
    g11: float  # g(alpha', alpha')
    g22: float  # g(alpha'', alpha'')
    eps_T: int | None = None
    note: str | None = None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "s": self.s,
            "eps_T": self.eps_T,
            "g_d1_d1": self.g11,
            "g_d2_d2": self.g22,
            "note": self.note,
        }


@dataclass(frozen=True)
class FrenetApparatus:
    s: float
    T: np.ndarray
    N: np.ndarray
    B: np.ndarray
    kappa: float
    tau: float
    eps_T: int
    eps_N: int
    eps_B: int

    def to_dict(self) -> dict:
        return {
            "type": "frenet",
            "s": self.s,
            "T": self.T.tolist(),
            "N": self.N.tolist(),
            "B": self.B.tolist(),
            "kappa": self.kappa,
            "tau": self.tau,
            "eps_T": self.eps_T,
            "eps_N": self.eps_N,
            "eps_B": self.eps_B,
        }


@dataclass(frozen=True)
class CartanApparatus:
    s: float
    T: np.ndarray
    N: np.ndarray
    B: np.ndarray
    kappa: int
    tau: float

    def to_dict(self) -> dict:
        return {
            "type": "cartan",
            "s": self.s,
            "T": self.T.tolist(),
            "N": self.N.tolist(),
            "B": self.B.tolist(),
            "kappa": self.kappa,
            "tau": self.tau,
        }


@dataclass(frozen=True)
class CurvatureJets:
    """Signature plus Taylor expansions of curvature and torsion at one point.

    ``eps`` is ``None`` for null curves.
    """

    s: float
    null: bool
    kappa: Jet
    tau: Jet
    eps: tuple | None = None
    apparatus: object = field(default=None, compare=False)

    @property
    def eps_T(self):
        return self.eps[0] if self.eps else None

    @property
    def eps_B(self):
        return self.eps[2] if self.eps else None


def _values(v) -> np.ndarray:
    return np.array([c.value for c in v])


def _deriv(v) -> np.ndarray:
    return np.array([c.derivative() for c in v], dtype=object)


def _euclid_sq(v) -> float:
    v = np.asarray(v, dtype=float)
    return float(v @ v)


def classify_curve(curve: CurveDef, s0: float) -> Classification:
    """Causal type and parametrization check of ``curve`` at ``s0``."""
    d = curve.derivatives(s0, 2)
    d1, d2 = d[1], d[2]
    g11 = float(metric_g(d1, d1))
    g22 = float(metric_g(d2, d2))
    n1 = _euclid_sq(d1)
    n2 = _euclid_sq(d2)
    s0 = float(s0)
    d2_zero = n2 <= TOL_KAPPA**2
    d2_null = abs(g22) <= TOL_NULL * n2

    if abs(abs(g11) - 1.0) <= TOL_UNIT:
        eps_T = sign_of(g11)
        if d2_zero:
            return Classification(CurveKind.NON_NULL_UNIT_SPEED, s0, g11, g22, eps_T,
                                  note="degenerate curvature: alpha'' vanishes")
        if d2_null and eps_T > 0:
            return Classification(CurveKind.SPACELIKE_LIGHTLIKE_NORMAL, s0, g11, g22, eps_T)
        return Classification(CurveKind.NON_NULL_UNIT_SPEED, s0, g11, g22, eps_T)
    if n1 > 0 and abs(g11) <= TOL_NULL * n1:
        if abs(g22 - 1.0) <= TOL_UNIT:
            return Classification(CurveKind.NULL_PSEUDO_ARC, s0, g11, g22)
        if d2_zero:
            return Classification(CurveKind.NOT_NORMALIZED, s0, g11, g22,
                                  note="straight null line")
    return Classification(CurveKind.NOT_NORMALIZED, s0, g11, g22)


# -- non-null ------------------------------------------------------------------


def _frenet_jets(curve: CurveDef, s0: float, order: int):
    a = curve.jets(s0, order)
    T = _deriv(a)
    Tp = _deriv(T)
    g2 = metric_g(Tp, Tp)
    tp_sq = _euclid_sq(_values(Tp))
    if tp_sq <= TOL_KAPPA**2:
        raise DegenerateCurvature(f"curvature vanishes at s={s0!r}")
    if abs(g2.value) <= TOL_NULL * tp_sq:
        raise LightlikeNormal(f"lightlike normal at s={s0!r}; Frenet frame undefined")
    eps_N = sign_of(g2.value)
    kappa = jetlib.sqrt(eps_N * g2)
    if kappa.value <= TOL_KAPPA:
        raise DegenerateCurvature(f"curvature {kappa.value!r} at s={s0!r}")
    N = Tp / kappa
    g1 = metric_g(T, T)
    eps_T = sign_of(g1.value)
    C = lorentz_cross(T, N)
    gc = metric_g(C, C)
    eps_B = sign_of(gc.value)
    B = C / jetlib.sqrt(eps_B * gc)
    if det3(_values(T), _values(N), _values(B)) < 0:
        B = -B
    tau = eps_B * metric_g(_deriv(N), B)
    return T, N, B, kappa, tau, (eps_T, eps_N, eps_B)


def nonnull_frenet(curve: CurveDef, s0: float) -> FrenetApparatus:
    """Frenet apparatus of a unit-speed non-null curve at ``s0``.

    Raises
    ------
    DegenerateCurvature
        If ``alpha''`` vanishes.
    LightlikeNormal
        If ``alpha''`` is lightlike; no Frenet frame exists there.
    """
    T, N, B, kappa, tau, (eT, eN, eB) = _frenet_jets(curve, s0, JET_ORDER)
    return FrenetApparatus(float(s0), _values(T), _values(N), _values(B),
                           kappa.value, tau.value, eT, eN, eB)


# -- null ----------------------------------------------------------------------


def _null_partner(T, N):
    """Null vector ``B`` with ``g(B, N) = 0`` and ``g(T, B) = 1``.

    ``lorentz_cross(T, N)`` is parallel to ``T`` for null ``T``, so ``B`` is
    built from the second null direction of the plane orthogonal to ``N``,
    starting from ``T`` with its time component flipped (which pairs with
    ``T`` to its squared Euclidean norm).
    """
    V = np.array([-T[0], T[1], T[2]], dtype=object if isinstance(T[0], Jet) else float)
    V = V - metric_g(V, N) * N
    pairing = metric_g(V, T)
    p0 = pairing.value if isinstance(pairing, Jet) else pairing
    if abs(p0) <= TOL_KAPPA:
        raise DegenerateFrame("cannot complete the null frame: tangent vanishes")
    W = V - (metric_g(V, V) / (2.0 * pairing)) * T
    return W / metric_g(T, W)


def _cartan_jets(curve: CurveDef, s0: float, order: int):
    a = curve.jets(s0, order)
    T = _deriv(a)
    N = _deriv(T)
    if _euclid_sq(_values(N)) <= TOL_KAPPA**2:
        raise StraightNullLine(f"alpha'' vanishes at s={s0!r}: straight null line")
    B = _null_partner(T, N)
    tau = -metric_g(_deriv(N), B)
    return T, N, B, tau


def null_cartan(curve: CurveDef, s0: float) -> CartanApparatus:
    """Cartan apparatus of a null curve in pseudo-arc parametrization."""
    T, N, B, tau = _cartan_jets(curve, s0, JET_ORDER)
    return CartanApparatus(float(s0), _values(T), _values(N), _values(B), 1, tau.value)


def curvature_jets(curve: CurveDef, s0: float, order: int = JET_ORDER) -> CurvatureJets:
    """Curvature and torsion jets at ``s0``, dispatching on the causal type."""
    cls = classify_curve(curve, s0)
    if cls.kind is CurveKind.NULL_PSEUDO_ARC:
        T, N, B, tau = _cartan_jets(curve, s0, order)
        app = CartanApparatus(float(s0), _values(T), _values(N), _values(B), 1, tau.value)
        return CurvatureJets(float(s0), True, Jet.constant(1.0, tau.order), tau, None, app)
    if cls.kind is CurveKind.SPACELIKE_LIGHTLIKE_NORMAL:
        raise LightlikeNormal(f"lightlike normal at s={s0!r}")
    if cls.kind is CurveKind.NOT_NORMALIZED:
        if cls.note == "straight null line":
            raise StraightNullLine(f"straight null line at s={s0!r}")
        raise DegenerateFrame(
            f"curve not unit speed / pseudo-arc at s={s0!r} (g11={cls.g11!r}, g22={cls.g22!r})"
        )
    T, N, B, kappa, tau, eps = _frenet_jets(curve, s0, order)
    app = FrenetApparatus(float(s0), _values(T), _values(N), _values(B),
                          kappa.value, tau.value, *eps)
    return CurvatureJets(float(s0), False, kappa, tau, eps, app)


def dual_basis(T, N, B, eps=None) -> np.ndarray:
    """Matrix mapping a coordinate vector to its components on the frame.

    Non-null frames use ``eps_X g(v, X)``; null frames (``eps=None``) use
    ``(g(v, B), g(v, N), g(v, T))``, the coefficients of ``T``, ``N``, ``B``.
    """
    eta = np.array([-1.0, 1.0, 1.0])
    if eps is None:
        return np.array([eta * B, eta * N, eta * T])
    return np.array([e * eta * X for e, X in zip(eps, (T, N, B))])


def frame_dual(curve: CurveDef, s0: float) -> np.ndarray | None:
    """Dual basis of the Frenet or Cartan frame at ``s0``, or None if there is none."""
    try:
        cls = classify_curve(curve, s0)
        if cls.kind is CurveKind.NULL_PSEUDO_ARC:
            app = null_cartan(curve, s0)
            return dual_basis(app.T, app.N, app.B)
        if cls.kind is CurveKind.NON_NULL_UNIT_SPEED:
            app = nonnull_frenet(curve, s0)
            return dual_basis(app.T, app.N, app.B, (app.eps_T, app.eps_N, app.eps_B))
    except (DegenerateCurvature, LightlikeNormal, StraightNullLine, DegenerateFrame):
        pass
    return None
