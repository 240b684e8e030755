"""
Reproducible acceptance suite.

Each ``criterion_N`` function runs one self-contained check at its pinned
tolerance and returns a :class:`CriterionResult`; :func:`run_all` runs them in
order and :func:`format_table` renders the pass/fail table printed by
``lorentz-curves verify-paper``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .characterize import (
    Verdict,
    curvature_jets,
    det345_closed_form_check,
    det_k,
    slant_report,
    torsion_residual_report,
    uniform_grid,
)
from .expr import evaluate, parse_curve, parse_expression
from .families import FamilyCase, TorsionFamily, validity_interval
from .frame import classify_curve, null_cartan
from .jet import Jet
from .lorentz import metric_g
from .synthesize import frame_case_for, frame_state_from_apparatus, integrate_frame, make_salkowski

NULL_SLANT_CURVE = "(1/6*(s^5/5 - 1/s), 1/6*s^2, 1/6*(s^5/5 + 1/s))"
HELIX = "(sqrt(3)*s, 2*cos(s), 2*sin(s))"
PLANE_CIRCLE = "(0, cos(s), sin(s))"
SEED = 20240611


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    measured: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number}. {self.name}: {self.detail}"

    def to_dict(self) -> dict:
        return {
            "criterion": self.number,
            "name": self.name,
            "passed": self.passed,
            "detail": self.detail,
            "measured": self.measured,
            "seconds": self.seconds,
        }


def _null_tau(s):
    return -4.0 / s**2


# -- 1 -------------------------------------------------------------------------


def criterion_1(n: int = 201) -> CriterionResult:
    """Null slant curve: pseudo-arc normalisation, torsion, determinant verdict."""
    curve = parse_curve(NULL_SLANT_CURVE)
    grid = uniform_grid(0.5, 3.0, n)
    g11 = g22 = tau_rel = 0.0
    for s in grid:
        d = curve.derivatives(float(s), 2)
        g11 = max(g11, abs(float(metric_g(d[1], d[1]))))
        g22 = max(g22, abs(float(metric_g(d[2], d[2])) - 1.0))
        tau = null_cartan(curve, float(s)).tau
        tau_rel = max(tau_rel, abs(tau - _null_tau(s)) / abs(_null_tau(s)))
    report = det_k(curve, 3, grid, threshold=1e-7)
    ok = g11 <= 1e-9 and g22 <= 1e-9 and tau_rel <= 1e-8 and report.verdict is Verdict.VANISHES
    detail = (f"|g(a',a')|<={g11:.1e}, |g(a'',a'')-1|<={g22:.1e}, "
              f"tau rel err {tau_rel:.1e}, det verdict {report.verdict.value}")
    return CriterionResult(1, "null slant curve reproduction", ok, detail,
                           {"g11": g11, "g22_minus_1": g22, "tau_rel": tau_rel,
                            "det_max_relative": report.max_relative,
                            "det_verdict": report.verdict.value})


# -- 2 -------------------------------------------------------------------------


def _draw_family(case: FamilyCase, rng: np.random.Generator, inner: int = 1) -> TorsionFamily:
    sign = int(rng.choice([-1, 1]))
    if case is FamilyCase.NULL_SLANT:
        params = {"a": rng.uniform(-5, 5), "b": rng.choice([-1, 1]) * rng.uniform(0.3, 2),
                  "c": rng.uniform(-1, 1)}
        return TorsionFamily(case, params, 1)
    if case.param_names == ("phi",):
        return TorsionFamily(case, {"phi": rng.choice([-1, 1]) * rng.uniform(0.3, 2)}, sign)
    params = {"b": rng.choice([-1, 1]) * rng.uniform(0.3, 2), "c": rng.uniform(-1, 1)}
    return TorsionFamily(case, params, sign, inner)


def _family_grid(family: TorsionFamily, n: int = 51) -> np.ndarray:
    lo, hi = validity_interval(family)
    if math.isinf(lo) and math.isinf(hi):
        lo, hi = -2.0, 2.0
    elif math.isinf(hi):
        lo, hi = lo, lo + 3.0
    width = hi - lo
    return uniform_grid(lo + 0.05 * width, hi - 0.05 * width, n)


FAMILY_DRAWS = (
    (FamilyCase.SPACELIKE_SN_OR_TIMELIKE, 1),
    (FamilyCase.SPACELIKE_SN_OR_TIMELIKE, -1),
    (FamilyCase.SPACELIKE_TN, 1),
    (FamilyCase.NULL_SLANT, 1),
    (FamilyCase.SALKOWSKI_I, 1),
    (FamilyCase.SALKOWSKI_II, 1),
    (FamilyCase.SALKOWSKI_III, 1),
)


def criterion_2(draws: int = 100, seed: int = SEED) -> CriterionResult:
    """Closed-form torsion families satisfy their residual ODEs; controls do not."""
    rng = np.random.default_rng(seed)
    worst = {}
    for case, inner in FAMILY_DRAWS:
        key = case.value + ("" if inner == 1 else "(inner-)")
        w = 0.0
        for _ in range(draws):
            fam = _draw_family(case, rng, inner)
            rep = torsion_residual_report(fam, _family_grid(fam), case.eps_product, 1e-10)
            w = max(w, rep.max_relative if rep.dropped_points == 0 else math.inf)
        worst[key] = w
    controls = {}
    grid = uniform_grid(0.5, 2.0, 101)
    for tau in ("s^2", "exp(s)"):
        for eps in (-1, 1, None):
            rep = torsion_residual_report(tau, grid, eps)
            controls[f"{tau}|{'null' if eps is None else eps}"] = rep.max_relative
    ok = max(worst.values()) <= 1e-10 and min(controls.values()) > 1e-2
    detail = (f"worst family residual {max(worst.values()):.1e} (<=1e-10), "
              f"smallest control residual {min(controls.values()):.2g} (>1e-2)")
    return CriterionResult(2, "torsion families solve their ODEs", ok, detail,
                           {"families": worst, "controls": controls})


# -- 3 -------------------------------------------------------------------------


def synthesized_null_curve(step: float = 1e-3, range_=(1.0, 2.0)):
    """Null Cartan integration of ``tau = -4/s^2`` from the closed-form curve's Cartan frame at ``range_[0]``."""
    curve = parse_curve(NULL_SLANT_CURVE)
    s0 = range_[0]
    app = null_cartan(curve, s0)
    family = TorsionFamily(FamilyCase.NULL_SLANT, {"a": -4.0, "b": 1.0, "c": 0.0})
    start = frame_state_from_apparatus(app, curve.position(s0))
    return curve, integrate_frame("null", family, start, range_, step)


SALKOWSKI_RANGES = {"I": (0.1, 2.0), "II": (-0.7, 0.7), "III": (1.5, 3.0)}


def criterion_3(n: int = 101) -> CriterionResult:
    """``|det(a''', a'''', a^(5))|`` equals the closed-form residual on synthesized curves."""
    gaps = {}
    for case, rng in SALKOWSKI_RANGES.items():
        c = make_salkowski(case, 1.0, rng)
        gaps[f"salkowski-{case}"] = det345_closed_form_check(c, c.analysis_grid(n))
    _, c = synthesized_null_curve()
    gaps["null-slant curve"] = det345_closed_form_check(c, c.analysis_grid(n))
    worst = max(gaps.values())
    ok = worst <= 1e-6
    detail = f"worst pointwise relative gap {worst:.1e} over {len(gaps)} curves (<=1e-6)"
    return CriterionResult(3, "determinant equals closed-form residual", ok, detail, gaps)


# -- 4 -------------------------------------------------------------------------


def slant_corpus():
    """Labelled synthesized curves: ``(name, curve, is_slant)``."""
    corpus = []
    for case, rng in SALKOWSKI_RANGES.items():
        corpus.append((f"salkowski-{case}", make_salkowski(case, 1.0, rng), True))
    fams = (
        ("sn spacelike b=1.3 c=0.2", TorsionFamily("spacelike-sn-or-timelike",
                                                    {"b": 1.3, "c": 0.2}), "spacelike", (-1, 1)),
        ("sn timelike b=0.7 c=-0.4", TorsionFamily("spacelike-sn-or-timelike",
                                                   {"b": 0.7, "c": -0.4}), "timelike", (0, 2)),
        ("sn inner- b=1 c=0", TorsionFamily("spacelike-sn-or-timelike", {"b": 1.0, "c": 0.0},
                                            inner_sign=-1), "spacelike", (1.3, 2.5)),
        ("tn b=1.5 c=0.1", TorsionFamily("spacelike-tn", {"b": 1.5, "c": 0.1}), None,
         (-0.5, 0.5)),
    )
    for name, fam, causal, rng in fams:
        corpus.append((name, integrate_frame(frame_case_for(fam, causal), fam, None, rng), True))
    negatives = (
        ("spacelike-tn", "s^2", (0.5, 2.0)),
        ("spacelike-tn", "exp(s)", (0.5, 2.0)),
        ("timelike", "s^2", (1.2, 2.0)),
        ("spacelike-sn", "sin(s)", (0.5, 2.0)),
    )
    for case, tau, rng in negatives:
        corpus.append((f"{case} tau={tau}", integrate_frame(case, tau, None, rng), False))
    return corpus


def _sigma_one_curves():
    out = []
    for causal in ("spacelike", "timelike"):
        fam = TorsionFamily("spacelike-sn-or-timelike", {"b": 1.0, "c": 0.0})
        out.append((f"sn {causal}", integrate_frame(frame_case_for(fam, causal), fam, None,
                                                    (-1.0, 1.0))))
    fam = TorsionFamily("spacelike-tn", {"b": 1.0, "c": 0.0})
    out.append(("tn", integrate_frame(frame_case_for(fam), fam, None, (-0.8, 0.8))))
    return out


def criterion_4(n: int = 101) -> CriterionResult:
    """Constant slant indicator exactly when the determinant vanishes."""
    rows = {}
    agree = True
    for name, curve, label in slant_corpus():
        grid = curve.analysis_grid(n)
        vanishes = det_k(curve, 3, grid).verdict is Verdict.VANISHES
        sr = slant_report(curve, grid)
        rows[name] = {"det_vanishes": vanishes, "sigma_std": sr.std, "expected": label}
        agree &= (sr.constant == vanishes == label)
    sigma_one = {}
    for name, curve in _sigma_one_curves():
        sr = slant_report(curve, curve.analysis_grid(n))
        sigma_one[name] = float(np.max(np.abs(sr.values - 1.0)))
    ok = agree and max(sigma_one.values()) <= 1e-6
    n_pos = sum(1 for r in rows.values() if r["expected"])
    detail = (f"{n_pos} positives / {len(rows) - n_pos} negatives "
              f"{'all agree' if agree else 'DISAGREE'}; "
              f"max |sigma-1| on unit families {max(sigma_one.values()):.1e}")
    return CriterionResult(4, "slant indicator matches determinant verdict", ok, detail,
                           {"corpus": rows, "sigma_one": sigma_one})


# -- 5 -------------------------------------------------------------------------


def criterion_5(step: float = 1e-3) -> CriterionResult:
    """RK4 synthesizer reproduces the closed-form positions with fourth-order convergence."""
    errors = []
    drift = 0.0
    for h in (step, step / 2):
        curve, c = synthesized_null_curve(h)
        exact = np.array([curve.position(float(s)) for s in c.s])
        errors.append(float(np.max(np.abs(c.position - exact))))
        drift = max(drift, c.meta["gram_drift"])
    ratio = errors[0] / errors[1] if errors[1] > 0 else math.inf
    ok = errors[0] <= 1e-6 and ratio >= 12.0 and drift <= 1e-9
    detail = (f"max position error {errors[0]:.1e} (<=1e-6), halving ratio {ratio:.1f} (>=12), "
              f"Gram drift {drift:.1e} (<=1e-9)")
    return CriterionResult(5, "synthesizer fidelity", ok, detail,
                           {"error_h": errors[0], "error_h2": errors[1], "ratio": ratio,
                            "gram_drift": drift})


# -- 6 -------------------------------------------------------------------------


JET_CORPUS = (
    ("s^3 - 2*s + 1", 0.7),
    ("1/s", 1.3),
    ("1/(1 + s^2)", 0.4),
    ("sqrt(s)", 2.0),
    ("sqrt(1 + s^2)", -0.6),
    ("s^(3/2)", 1.1),
    ("s^(-1/2)", 0.9),
    ("exp(s)", 0.5),
    ("exp(-s^2)", 0.3),
    ("sin(s)", 1.0),
    ("cos(2*s)", -0.4),
    ("sinh(s)", 0.8),
    ("cosh(s)/2", -1.2),
    ("tanh(s)", 0.6),
    ("sin(s)*exp(s)", 0.2),
    ("cos(s)/(2 + sin(s))", 1.7),
    ("s^5/5 - 1/s", 1.5),
    ("sqrt(1 - s^2)", 0.3),
    ("exp(sin(s))", 2.2),
    ("tanh(s^2)/(1 + s)", 0.45),
)


def _fd(f, x, h):
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h)


def criterion_6(h: float = 1e-3) -> CriterionResult:
    """Jet derivatives agree with central differences; algebraic identities hold."""
    worst_fd = 0.0
    worst_id = 0.0
    for text, x0 in JET_CORPUS:
        node = parse_expression(text)

        def jet_at(x, order=6):
            return evaluate(node, Jet.variable(x, order))

        ref = jet_at(x0)
        for k in range(1, 6):
            # each order is checked against a difference quotient of the order below
            fd = _fd(lambda x: jet_at(x).derivative_value(k - 1), x0, h)
            exact = ref.derivative_value(k)
            worst_fd = max(worst_fd, abs(exact - fd) / max(abs(exact), 1.0))
        g = evaluate(parse_expression("2 + cos(s)"), Jet.variable(x0, 6))
        prod = ref * g
        for k in range(6):
            leib = sum(math.comb(k, j) * ref.derivative_value(j) * g.derivative_value(k - j)
                       for j in range(k + 1))
            d = prod.derivative_value(k)
            worst_id = max(worst_id, abs(d - leib) / max(abs(d), 1.0))
        back = prod / g
        for k in range(6):
            a, b = back.derivative_value(k), ref.derivative_value(k)
            worst_id = max(worst_id, abs(a - b) / max(abs(b), 1.0))
    ok = worst_fd <= 1e-6 and worst_id <= 1e-12
    detail = (f"{len(JET_CORPUS)} expressions, orders 1-5: worst FD gap {worst_fd:.1e} (<=1e-6), "
              f"identity gap {worst_id:.1e} (<=1e-12)")
    return CriterionResult(6, "jet engine correctness", ok, detail,
                           {"fd": worst_fd, "identities": worst_id})


# -- 7 -------------------------------------------------------------------------


def criterion_7(n: int = 101) -> CriterionResult:
    """Determinant ladder: planar, helix with torsion, general helix."""
    grid = uniform_grid(0.0, 2 * math.pi, n)
    circle = parse_curve(PLANE_CIRCLE)
    helix = parse_curve(HELIX)
    v_plane = det_k(circle, 1, grid).verdict
    v_helix1 = det_k(helix, 1, grid).verdict
    v_helix2 = det_k(helix, 2, grid).verdict
    ratios = []
    for s in grid:
        cj = curvature_jets(helix, float(s))
        ratios.append(cj.tau.value / cj.kappa.value)
    ratio_dev = float(np.max(np.abs(np.array(ratios) - math.sqrt(3) / 2)))
    axis_timelike = classify_curve(helix, 0.0).eps_T == 1
    ok = (v_plane is Verdict.VANISHES and v_helix1 is Verdict.NON_VANISHING
          and v_helix2 is Verdict.VANISHES and ratio_dev <= 1e-12 and axis_timelike)
    detail = (f"k=1 plane {v_plane.value}, k=1 helix {v_helix1.value}, "
              f"k=2 helix {v_helix2.value}; |tau/kappa - sqrt(3)/2| <= {ratio_dev:.1e}")
    return CriterionResult(7, "determinant ladder", ok, detail,
                           {"k1_plane": v_plane.value, "k1_helix": v_helix1.value,
                            "k2_helix": v_helix2.value, "ratio_dev": ratio_dev})


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7)


def run_all() -> list[CriterionResult]:
    results = []
    for fn in CRITERIA:
        t0 = time.perf_counter()
        r = fn()
        r.seconds = time.perf_counter() - t0
        results.append(r)
    return results


def format_table(results) -> str:
    lines = [r.line() for r in results]
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} criteria passed")
    return "\n".join(lines)
