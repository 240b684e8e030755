import io
import math

import numpy as np
import pytest

from lorentz_curves.characterize import Verdict, det_k
from lorentz_curves.errors import TauRangeError
from lorentz_curves.expr import parse_curve
from lorentz_curves.families import FamilyCase, TorsionFamily
from lorentz_curves.frame import null_cartan
from lorentz_curves.lorentz import det3
from lorentz_curves.synthesize import (
    FrameCase,
    FrameState,
    canonical_frame,
    correct_frame,
    frame_state_from_apparatus,
    gram_deviation,
    integrate_frame,
    make_salkowski,
)

NULL_SLANT_CURVE = "(1/6*(s^5/5 - 1/s), 1/6*s^2, 1/6*(s^5/5 + 1/s))"


def null_curve_run(step=1e-3, range_=(1.0, 2.0)):
    curve = parse_curve(NULL_SLANT_CURVE)
    app = null_cartan(curve, range_[0])
    fam = TorsionFamily(FamilyCase.NULL_SLANT, {"a": -4, "b": 1, "c": 0})
    start = frame_state_from_apparatus(app, curve.position(range_[0]))
    return curve, integrate_frame("null", fam, start, range_, step)


@pytest.mark.parametrize("case", list(FrameCase))
def test_canonical_frames(case):
    f = canonical_frame(case)
    assert gram_deviation(f.T, f.N, f.B, case) <= 4e-16
    if case is not FrameCase.NULL:
        assert det3(f.T, f.N, f.B) == pytest.approx(1.0)


def test_timelike_planar_solution():
    c = integrate_frame("timelike", 0.0, None, (0, 1))
    exact = np.column_stack([np.sinh(c.s), np.cosh(c.s) - 1, np.zeros_like(c.s)])
    assert np.max(np.abs(c.position - exact)) <= 1e-8


def test_null_curve_positions():
    curve, c = null_curve_run()
    exact = np.array([curve.position(s) for s in c.s])
    assert np.max(np.abs(c.position - exact)) <= 1e-6
    assert c.meta["gram_drift"] <= 1e-9


def test_fourth_order_convergence():
    errs = []
    for h in (2e-3, 1e-3, 5e-4):
        curve, c = null_curve_run(h)
        exact = np.array([curve.position(s) for s in c.s])
        errs.append(np.max(np.abs(c.position - exact)))
    assert errs[0] / errs[1] >= 12 and errs[1] / errs[2] >= 12


def test_step_must_be_positive():
    with pytest.raises(ValueError):
        integrate_frame("timelike", 0.0, None, (0, 1), step=0.0)
    with pytest.raises(ValueError):
        integrate_frame("timelike", 0.0, None, (0, 1), step=-1e-3)


def test_salkowski_ii_pole():
    with pytest.raises(TauRangeError):
        make_salkowski("II", 1.0, (0.0, 0.9))


def test_bad_initial_frame():
    f = canonical_frame(FrameCase.TIMELIKE)
    bad = FrameState(f.position, f.T * 1.1, f.N, f.B, 0.0)
    with pytest.raises(ValueError):
        integrate_frame("timelike", 0.0, bad, (0, 1))


def test_salkowski_i_round_trip():
    phi = 1.0
    c = make_salkowski("I", phi, (0.1, 2.0))
    fam = TorsionFamily(FamilyCase.SALKOWSKI_I, {"phi": phi})
    s, kappa = c.curvature_estimates()
    assert np.max(np.abs(kappa - 1)) <= 1e-6
    s, tau = c.torsion_estimates()
    assert np.max(np.abs(tau - [fam(x) for x in s])) <= 1e-5


def test_salkowski_iii_det_vanishes():
    c = make_salkowski("III", 1.0, (1.5, 3.0))
    assert det_k(c, 3, c.analysis_grid(201)).verdict is Verdict.VANISHES


def test_torsion_recovery_converges():
    fam = TorsionFamily(FamilyCase.SPACELIKE_TN, {"b": 1.2, "c": 0.1})
    errs = []
    for h in (2e-3, 1e-3, 5e-4):
        c = integrate_frame("spacelike-tn", fam, None, (-0.5, 0.5), h)
        s, tau = c.torsion_estimates()
        exact = np.array([fam(x) for x in s])
        errs.append(np.max(np.abs(tau - exact)) / np.max(np.abs(exact)))
    assert errs[1] <= 1e-4
    assert errs[0] / errs[1] >= 12 and errs[1] / errs[2] >= 12


def test_gram_drift_over_ten_thousand_steps():
    c = make_salkowski("I", 0.8, (0.0, 10.0), step=1e-3)
    assert len(c) == 10001
    assert c.gram_drift() <= 1e-9


def test_uncorrected_drift_is_high_order():
    drifts = []
    for h in (4e-2, 2e-2):
        c = integrate_frame("spacelike-sn", "sin(3*s)", None, (0, 4), h, correct=False)
        drifts.append(c.gram_drift())
    assert drifts[0] / drifts[1] >= 12


@pytest.mark.parametrize("case, tau", [("timelike", "s"), ("spacelike-tn", "0.3*s"),
                                       ("null", "-1/(1 + s^2)")])
def test_reversibility(case, tau):
    fwd = integrate_frame(case, tau, None, (0, 1))
    end = fwd.state(len(fwd) - 1)
    back = integrate_frame(case, tau, end, (1, 0))
    start = back.state(len(back) - 1)
    for a, b in zip((start.position, start.T, start.N, start.B),
                    (fwd.position[0], fwd.T[0], fwd.N[0], fwd.B[0])):
        np.testing.assert_allclose(a, b, atol=1e-8)


@pytest.mark.parametrize("case", [FrameCase.TIMELIKE, FrameCase.SPACELIKE_TN, FrameCase.NULL])
def test_correction_is_idempotent_on_exact_frames(case):
    f = canonical_frame(case)
    T, N, B = correct_frame(f.T, f.N, f.B, case)
    np.testing.assert_allclose([T, N, B], [f.T, f.N, f.B], atol=1e-15)


def test_csv_export():
    c = integrate_frame("timelike", 0.0, None, (0, 0.01))
    text = c.to_csv(frame=True)
    assert "\r" not in text
    lines = text.split("\n")
    assert lines[0] == "s,px0,px1,px2,T0,T1,T2,N0,N1,N2,B0,B1,B2"
    assert len(lines) == len(c) + 2 and lines[-1] == ""
    row = [float(v) for v in lines[-2].split(",")]
    assert row[0] == c.s[-1] and row[1] == c.position[-1, 0]


def test_reanalysis_derivatives_match_closed_form():
    curve, c = null_curve_run()
    s = c.analysis_grid(5)[2]
    np.testing.assert_allclose(c.derivatives(s, 5), curve.derivatives(s, 5), atol=1e-7)
