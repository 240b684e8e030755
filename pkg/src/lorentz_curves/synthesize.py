"""
Curve reconstruction from curvature data.

The position and frame are integrated together as a 12-dimensional system
(``P' = T`` plus the frame equations of :mod:`lorentz_curves.frame`) with
classical fixed-step RK4.  After every step the frame is projected back onto
its Gram pattern by a metric Gram-Schmidt pass; ``correct=False`` disables the
projection so the raw per-step drift can be measured.

Sampled curves can be fed back into the detectors: torsion is re-estimated
from the stored frames, smoothed by a local polynomial fit, and the Taylor
expansion of the curve at a sample is rebuilt by running the frame equations
as a power-series recursion.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import FrameBlowup, RangeError, TauRangeError
from .families import FamilyCase, TorsionFamily
from .expr import evaluate, parse_expression
from .frame import CurvatureJets, dual_basis
from .jet import Jet
from .lorentz import det3, metric_g

BLOWUP = 1e12
DRIFT_TOL = 1e-9
DEFAULT_STEP = 1e-3

# local torsion smoothing: polynomial degree and half window (in samples)
FIT_DEGREE = 6
FIT_HALF_WINDOW = 12
_STENCIL = 2  # five-point central difference


class FrameCase(enum.Enum):
    TIMELIKE = "timelike"
    SPACELIKE_SN = "spacelike-sn"  # spacelike curve, spacelike normal
    SPACELIKE_TN = "spacelike-tn"  # spacelike curve, timelike normal
    NULL = "null"

    @property
    def eps(self) -> tuple | None:
        return {
            FrameCase.TIMELIKE: (-1, 1, 1),
            FrameCase.SPACELIKE_SN: (1, 1, -1),
            FrameCase.SPACELIKE_TN: (1, -1, 1),
            FrameCase.NULL: None,
        }[self]

    @property
    def gram(self) -> np.ndarray:
        if self is FrameCase.NULL:
            return np.array([[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]])
        return np.diag(np.array(self.eps, dtype=float))


@dataclass(frozen=True)
class FrameState:
    position: np.ndarray
    T: np.ndarray
    N: np.ndarray
    B: np.ndarray
    s: float = 0.0


def gram_matrix(T, N, B) -> np.ndarray:
    F = (T, N, B)
    return np.array([[metric_g(x, y) for y in F] for x in F], dtype=float)


def gram_deviation(T, N, B, case: FrameCase) -> float:
    return float(np.max(np.abs(gram_matrix(T, N, B) - case.gram)))


def canonical_frame(case: FrameCase, s: float = 0.0, position=(0.0, 0.0, 0.0)) -> FrameState:
    """Coordinate-aligned frame with the Gram pattern of ``case``.

    Non-null frames are oriented with ``det3(T, N, B) = +1``:

    - timelike:     T=(1,0,0), N=(0,1,0), B=(0,0,1)
    - spacelike-sn: T=(0,1,0), N=(0,0,1), B=(1,0,0)
    - spacelike-tn: T=(0,1,0), N=(1,0,0), B=(0,0,-1)
    - null:         T=(1,1,0)/sqrt2, N=(0,0,1), B=(-1,1,0)/sqrt2
    """
    r = 1.0 / math.sqrt(2.0)
    frames = {
        FrameCase.TIMELIKE: ((1, 0, 0), (0, 1, 0), (0, 0, 1)),
        FrameCase.SPACELIKE_SN: ((0, 1, 0), (0, 0, 1), (1, 0, 0)),
        FrameCase.SPACELIKE_TN: ((0, 1, 0), (1, 0, 0), (0, 0, -1)),
        FrameCase.NULL: ((r, r, 0), (0, 0, 1), (-r, r, 0)),
    }
    T, N, B = (np.array(v, dtype=float) for v in frames[case])
    return FrameState(np.array(position, dtype=float), T, N, B, float(s))


def correct_frame(T, N, B, case: FrameCase):
    """Project a nearly-admissible frame back onto the Gram pattern of ``case``."""
    if case is FrameCase.NULL:
        return _correct_null(T, N, B)
    eT, eN, _ = case.eps
    T = T / math.sqrt(abs(metric_g(T, T)))
    N = N - (metric_g(N, T) / eT) * T
    N = N / math.sqrt(abs(metric_g(N, N)))
    B = B - (metric_g(B, T) / eT) * T - (metric_g(B, N) / eN) * N
    B = B / math.sqrt(abs(metric_g(B, B)))
    return T, N, B


def _correct_null(T, N, B):
    # work in the pseudo-orthonormal basis E0 = (T-B)/sqrt2 (timelike),
    # E2 = (T+B)/sqrt2 (spacelike); normal first
    r = 1.0 / math.sqrt(2.0)
    E0 = (T - B) * r
    E2 = (T + B) * r
    N = N / math.sqrt(abs(metric_g(N, N)))
    E0 = E0 - metric_g(E0, N) * N
    E0 = E0 / math.sqrt(abs(metric_g(E0, E0)))
    E2 = E2 - metric_g(E2, N) * N + metric_g(E2, E0) * E0
    E2 = E2 / math.sqrt(abs(metric_g(E2, E2)))
    return (E0 + E2) * r, N, (E2 - E0) * r


def _tau_function(tau):
    if isinstance(tau, TorsionFamily):
        return tau.__call__, tau.describe()
    if isinstance(tau, str):
        node = parse_expression(tau)
        return (lambda s: float(evaluate(node, s))), tau
    if isinstance(tau, (int, float)):
        value = float(tau)
        return (lambda s: value), repr(value)
    return tau, getattr(tau, "__name__", "callable")


def _rhs(Y: np.ndarray, tau: float, kappa: float, case: FrameCase) -> np.ndarray:
    _, T, N, B = Y
    out = np.empty_like(Y)
    out[0] = T
    out[1] = kappa * N
    if case is FrameCase.NULL:
        out[2] = -tau * T - kappa * B
        out[3] = tau * N
    else:
        eT, eN, eB = case.eps
        out[2] = -eT * eN * kappa * T + tau * B
        out[3] = -eN * eB * tau * N
    return out


@dataclass
class SampledCurve:
    """Integrated curve: parameter, position and frame at uniform steps."""

    s: np.ndarray
    position: np.ndarray
    T: np.ndarray
    N: np.ndarray
    B: np.ndarray
    case: FrameCase
    kappa: float = 1.0
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return self.s.size

    @property
    def step(self) -> float:
        return float(self.s[1] - self.s[0]) if self.s.size > 1 else 0.0

    @property
    def states(self) -> list:
        return [
            FrameState(self.position[i], self.T[i], self.N[i], self.B[i], float(self.s[i]))
            for i in range(self.s.size)
        ]

    def state(self, i: int) -> FrameState:
        return FrameState(self.position[i], self.T[i], self.N[i], self.B[i], float(self.s[i]))

    def gram_drift(self) -> float:
        return max(gram_deviation(self.T[i], self.N[i], self.B[i], self.case)
                   for i in range(self.s.size))

    # -- export -----------------------------------------------------------------

    def rows(self, frame: bool = False):
        for i in range(self.s.size):
            row = [self.s[i], *self.position[i]]
            if frame:
                row += [*self.T[i], *self.N[i], *self.B[i]]
            yield row

    def header(self, frame: bool = False) -> list:
        cols = ["s", "px0", "px1", "px2"]
        if frame:
            cols += [f"{v}{k}" for v in "TNB" for k in range(3)]
        return cols

    def to_csv(self, fh=None, frame: bool = False) -> str | None:
        """CSV with ``.`` decimals and LF line endings; returns text if ``fh`` is None."""
        buf = io.StringIO() if fh is None else fh
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header(frame))
        for row in self.rows(frame):
            w.writerow([format(float(v), ".17g") for v in row])
        return buf.getvalue() if fh is None else None

    def to_dict(self, frame: bool = False) -> dict:
        d = {
            "meta": {"case": self.case.value, "kappa": self.kappa, **self.meta},
            "columns": self.header(frame),
            "rows": [[float(v) for v in row] for row in self.rows(frame)],
        }
        return d

    # -- re-analysis ------------------------------------------------------------

    def index_of(self, s: float) -> int:
        h = self.step
        i = int(round((s - self.s[0]) / h))
        if not 0 <= i < self.s.size or abs(self.s[i] - s) > 1e-6 * abs(h):
            raise ValueError(f"s={s!r} is not a sample of this curve")
        return i

    def _torsion_estimates(self) -> np.ndarray:
        cached = self.__dict__.get("_tau_cache")
        if cached is not None:
            return cached
        h = self.step
        N, B = self.N, self.B
        dN = (N[:-4] - 8.0 * N[1:-3] + 8.0 * N[3:-1] - N[4:]) / (12.0 * h)
        Bi = B[2:-2]
        g = -dN[:, 0] * Bi[:, 0] + dN[:, 1] * Bi[:, 1] + dN[:, 2] * Bi[:, 2]
        if self.case is FrameCase.NULL:
            tau = -g
        else:
            tau = self.case.eps[2] * g
        self.__dict__["_tau_cache"] = tau
        return tau

    def torsion_estimates(self):
        """``(s, tau)`` at interior samples from finite differences of the frame."""
        return self.s[_STENCIL:-_STENCIL].copy(), self._torsion_estimates().copy()

    def curvature_estimates(self):
        """``(s, kappa)`` at interior samples from finite differences of ``T``."""
        h, T = self.step, self.T
        dT = (T[:-4] - 8.0 * T[1:-3] + 8.0 * T[3:-1] - T[4:]) / (12.0 * h)
        g = -dT[:, 0] ** 2 + dT[:, 1] ** 2 + dT[:, 2] ** 2
        return self.s[_STENCIL:-_STENCIL].copy(), np.sqrt(np.abs(g))

    def analysis_grid(self, n: int | None = None) -> np.ndarray:
        """Sample parameters far enough from the ends for a centred torsion fit."""
        lo = _STENCIL + FIT_HALF_WINDOW
        hi = self.s.size - 1 - lo
        if hi < lo:
            raise ValueError("sampled curve too short for re-analysis")
        idx = np.arange(lo, hi + 1)
        if n is not None and n < idx.size:
            idx = np.unique(np.round(np.linspace(lo, hi, n)).astype(int))
        return self.s[idx].copy()

    def tau_jet(self, s: float, order: int = 3) -> Jet:
        """Local polynomial fit of the torsion estimates around sample ``s``."""
        i = self.index_of(s) - _STENCIL
        tau = self._torsion_estimates()
        m = FIT_HALF_WINDOW
        lo = min(max(i - m, 0), max(tau.size - 2 * m - 1, 0))
        hi = min(lo + 2 * m + 1, tau.size)
        if not 0 <= i < tau.size or hi - lo <= FIT_DEGREE:
            raise ValueError(f"not enough samples around s={s!r} for a torsion fit")
        width = m * self.step
        x = (np.arange(lo, hi) - i) * self.step / width
        c = np.polynomial.polynomial.polyfit(x, tau[lo:hi], FIT_DEGREE)
        k = np.arange(order + 1)
        coeffs = np.zeros(order + 1)
        n = min(order, FIT_DEGREE) + 1
        coeffs[:n] = c[:n] / width ** k[:n]
        return Jet(coeffs)

    def frame_dual(self, s: float) -> np.ndarray:
        i = self.index_of(s)
        return dual_basis(self.T[i], self.N[i], self.B[i], self.case.eps)

    def curvature_jets(self, s: float) -> CurvatureJets:
        tj = self.tau_jet(s, 3)
        kj = Jet.constant(self.kappa, tj.order)
        null = self.case is FrameCase.NULL
        return CurvatureJets(float(s), null, kj, tj, None if null else self.case.eps)

    def derivatives(self, s: float, k_max: int = 5) -> np.ndarray:
        """``alpha^(0..k_max)`` at sample ``s`` rebuilt from the frame equations."""
        i = self.index_of(s)
        p = max(k_max - 3, 0)
        tau = self.tau_jet(s, p).coeffs
        kappa = self.kappa
        q = p + 1
        Tk = [self.T[i]]
        Nk = [self.N[i]]
        Bk = [self.B[i]]
        for k in range(q):
            tB = sum(tau[j] * Bk[k - j] for j in range(k + 1))
            tN = sum(tau[j] * Nk[k - j] for j in range(k + 1))
            if self.case is FrameCase.NULL:
                tT = sum(tau[j] * Tk[k - j] for j in range(k + 1))
                n_next = -tT - kappa * Bk[k]
                b_next = tN
            else:
                eT, eN, eB = self.case.eps
                n_next = -eT * eN * kappa * Tk[k] + tB
                b_next = -eN * eB * tN
            Tk.append(kappa * Nk[k] / (k + 1))
            Nk.append(n_next / (k + 1))
            Bk.append(b_next / (k + 1))
        Tk.append(kappa * Nk[q] / (q + 1))
        alpha = [self.position[i]] + [Tk[k] / (k + 1) for k in range(len(Tk))]
        out = np.array(alpha[: k_max + 1]) * np.array(
            [math.factorial(k) for k in range(k_max + 1)], dtype=float
        )[:, None]
        return out


def integrate_frame(case: FrameCase, tau, initial: FrameState | None, range_,
                    step: float = DEFAULT_STEP, kappa: float = 1.0,
                    correct: bool = True) -> SampledCurve:
    """Integrate position and frame with RK4 over ``range_ = (start, stop)``.

    ``stop < start`` integrates backwards.  ``step`` is the magnitude of the
    step; it is shrunk slightly when it does not divide the range.

    Raises
    ------
    TauRangeError
        The torsion is undefined somewhere on the range (checked up front
        at every RK stage point).
    FrameBlowup
        A component exceeds ``1e12``.
    """
    case = FrameCase(case)
    if not step > 0:
        raise ValueError("step must be positive")
    start, stop = map(float, range_)
    if start == stop:
        raise ValueError("empty integration range")
    if initial is None:
        initial = canonical_frame(case, start)
    scale = max(1.0, *(float(v @ v) for v in (initial.T, initial.N, initial.B)))
    if gram_deviation(initial.T, initial.N, initial.B, case) > 1e-12 * scale:
        raise ValueError("initial frame does not match the Gram pattern of the case")

    tau_fn, tau_desc = _tau_function(tau)
    n = max(1, int(round(abs(stop - start) / step)))
    h = (stop - start) / n
    nodes = start + 0.5 * h * np.arange(2 * n + 1)
    try:
        tau_nodes = np.array([float(tau_fn(float(x))) for x in nodes])
    except (RangeError, ArithmeticError, ValueError) as exc:
        raise TauRangeError(f"torsion undefined on [{start}, {stop}]: {exc}") from exc
    if not np.all(np.isfinite(tau_nodes)):
        raise TauRangeError("torsion is not finite on the integration range")

    Y = np.array([initial.position, initial.T, initial.N, initial.B], dtype=float)
    out = np.empty((n + 1, 4, 3))
    out[0] = Y
    # with correction on this is the per-step drift; off, it accumulates
    step_drift = 0.0
    for i in range(n):
        t0, tm, t1 = tau_nodes[2 * i], tau_nodes[2 * i + 1], tau_nodes[2 * i + 2]
        k1 = _rhs(Y, t0, kappa, case)
        k2 = _rhs(Y + 0.5 * h * k1, tm, kappa, case)
        k3 = _rhs(Y + 0.5 * h * k2, tm, kappa, case)
        k4 = _rhs(Y + h * k3, t1, kappa, case)
        Y = Y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        step_drift = max(step_drift, gram_deviation(Y[1], Y[2], Y[3], case))
        if correct:
            Y[1], Y[2], Y[3] = correct_frame(Y[1], Y[2], Y[3], case)
        if not np.all(np.abs(Y) < BLOWUP):
            raise FrameBlowup(f"frame component exceeded {BLOWUP:g} at s={start + (i + 1) * h!r}")
        out[i + 1] = Y

    s = start + h * np.arange(n + 1)
    curve = SampledCurve(
        s=s,
        position=out[:, 0].copy(),
        T=out[:, 1].copy(),
        N=out[:, 2].copy(),
        B=out[:, 3].copy(),
        case=case,
        kappa=float(kappa),
        meta={"tau": tau_desc, "step": abs(h), "corrected": bool(correct),
              "max_step_drift": step_drift},
    )
    if correct:
        drift = curve.gram_drift()
        curve.meta["gram_drift"] = drift
        if drift > DRIFT_TOL * scale:
            raise FrameBlowup(f"frame drift {drift:.3g} exceeds {DRIFT_TOL:g} after correction")
    return curve


_SALKOWSKI_CASES = {
    "I": (FamilyCase.SALKOWSKI_I, FrameCase.SPACELIKE_SN),
    "II": (FamilyCase.SALKOWSKI_II, FrameCase.SPACELIKE_TN),
    "III": (FamilyCase.SALKOWSKI_III, FrameCase.TIMELIKE),
}


def make_salkowski(case: str, phi: float, range_, step: float = DEFAULT_STEP,
                   sign: int = 1) -> SampledCurve:
    """Unit-curvature Salkowski-type curve of case ``"I"``, ``"II"`` or ``"III"``.

    I is spacelike with spacelike normal, II spacelike with timelike normal and
    III timelike; each starts from the canonical frame at the origin.
    """
    key = str(case).upper()
    if key not in _SALKOWSKI_CASES:
        raise ValueError(f"Salkowski case must be I, II or III, got {case!r}")
    fam_case, frame_case = _SALKOWSKI_CASES[key]
    family = TorsionFamily(fam_case, {"phi": phi}, sign)
    return integrate_frame(frame_case, family, None, range_, step)


def frame_case_for(family: TorsionFamily, causal: str | None = None) -> FrameCase:
    """Causal signature that realises ``family``.

    ``causal`` ("spacelike" or "timelike") picks between the two realisations
    of ``spacelike-sn-or-timelike``; it defaults to spacelike.
    """
    c = family.case
    if c is FamilyCase.NULL_SLANT:
        return FrameCase.NULL
    if c in (FamilyCase.SPACELIKE_TN, FamilyCase.SALKOWSKI_II):
        return FrameCase.SPACELIKE_TN
    if c is FamilyCase.SALKOWSKI_III:
        return FrameCase.TIMELIKE
    if c is FamilyCase.SALKOWSKI_I:
        return FrameCase.SPACELIKE_SN
    return FrameCase.TIMELIKE if causal == "timelike" else FrameCase.SPACELIKE_SN


def frame_state_from_apparatus(app, position) -> FrameState:
    """Initial state from a Frenet or Cartan apparatus returned by the frame module."""
    return FrameState(np.asarray(position, dtype=float), app.T.copy(), app.N.copy(),
                      app.B.copy(), app.s)


def orientation(state: FrameState) -> float:
    return float(det3(state.T, state.N, state.B))
