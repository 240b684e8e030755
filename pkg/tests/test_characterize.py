import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from lorentz_curves.characterize import (
    Verdict,
    det345_closed_form_check,
    det_k,
    residual_nonnull,
    residual_null,
    slant_indicator,
    slant_report,
    tangent_indicatrix,
    torsion_residual_report,
    uniform_grid,
)
from lorentz_curves.errors import EmptyGrid, KappaNotOne, NotApplicable
from lorentz_curves.expr import evaluate, parse_curve, parse_expression
from lorentz_curves.jet import Jet
from lorentz_curves.lorentz import metric_g
from lorentz_curves.synthesize import integrate_frame

NULL_SLANT_CURVE = "(1/6*(s^5/5 - 1/s), 1/6*s^2, 1/6*(s^5/5 + 1/s))"
HELIX = "(sqrt(3)*s, 2*cos(s), 2*sin(s))"
UNIT_HELIX = "(s, 2*cos(s/sqrt(2)), 2*sin(s/sqrt(2)))"


def tau_jet(text, s0, order=3):
    v = evaluate(parse_expression(text), Jet.variable(s0, order))
    return v if isinstance(v, Jet) else Jet.constant(v, order)


# -- det_k ---------------------------------------------------------------------


def test_straight_line_vanishes():
    r = det_k(parse_curve("(0,s,0)"), 3, uniform_grid(0, 1, 11))
    assert r.verdict is Verdict.VANISHES
    assert np.all(r.values == 0)


def test_null_curve_vanishes():
    r = det_k(parse_curve(NULL_SLANT_CURVE), 3, uniform_grid(0.5, 3, 201))
    assert r.verdict is Verdict.VANISHES


def test_plane_curve_ladder():
    grid = uniform_grid(0, 6, 61)
    assert det_k(parse_curve("(0, cos(s), sin(s))"), 1, grid).verdict is Verdict.VANISHES
    helix = parse_curve(HELIX)
    assert det_k(helix, 1, grid).verdict is Verdict.NON_VANISHING
    assert det_k(helix, 2, grid).verdict is Verdict.VANISHES


def test_poles_are_dropped_and_counted():
    curve = parse_curve(NULL_SLANT_CURVE)
    r = det_k(curve, 3, uniform_grid(-1, 1, 21))
    assert r.dropped == [0.0]
    assert r.verdict is Verdict.VANISHES
    bad = det_k(curve, 3, uniform_grid(-1e-6, 1e-6, 3), threshold=1e-7)
    assert bad.verdict is Verdict.INCONCLUSIVE


def test_empty_grid():
    with pytest.raises(EmptyGrid):
        det_k(parse_curve(HELIX), 3, [])


def test_report_schema_and_workers():
    curve = parse_curve(HELIX)
    grid = uniform_grid(0, 3, 31)
    serial = det_k(curve, 1, grid)
    threaded = det_k(curve, 1, grid, workers=4)
    assert list(serial.to_dict()) == ["grid", "values", "scale", "verdict", "threshold",
                                      "dropped_points"]
    np.testing.assert_array_equal(serial.values, threaded.values)


def test_scale_ignores_boosts():
    # a Lorentz boost of the curve leaves the determinant and the verdict unchanged
    beta = math.tanh(2.5)
    gam = 1 / math.sqrt(1 - beta**2)
    boosted = (f"({gam}*sqrt(3)*s + {gam * beta}*2*cos(s), "
               f"{gam * beta}*sqrt(3)*s + {gam}*2*cos(s), 2*sin(s))")
    grid = uniform_grid(0, 3, 31)
    a = det_k(parse_curve(HELIX), 1, grid)
    b = det_k(parse_curve(boosted), 1, grid)
    np.testing.assert_allclose(a.values, b.values, rtol=1e-9)
    assert a.scale == pytest.approx(b.scale, rel=1e-9)


# -- residuals -----------------------------------------------------------------


def test_constant_torsion_residual_is_zero():
    for e in (-1, 1):
        assert residual_nonnull(Jet.constant(0.7, 3), e, 1) == 0.0


@given(st.floats(-5, 5))
def test_unit_bracket_family_residual(s0):
    assert abs(residual_nonnull(tau_jet("s/sqrt(1+s^2)", s0), -1, 1)) <= 1e-12


def test_negative_control_value():
    assert residual_nonnull(tau_jet("s^2", 1.0), -1, 1) == pytest.approx(12.0)


def test_null_residual_examples():
    assert residual_null(tau_jet("-4/s^2", 1.0)) == pytest.approx(0.0, abs=1e-12)
    assert residual_null(tau_jet("s", 1.0)) == pytest.approx(-3.0)


@given(st.floats(-5, 5), st.floats(0.2, 3), st.floats(-1, 1), st.floats(0.1, 3))
def test_null_family_residual(a, b, c, x):
    s0 = (x - c) / b  # b s0 + c = x stays away from the pole
    res = residual_null(tau_jet(f"{a}/({b}*s + {c})^2", s0))
    assert abs(res) <= 1e-12 * max(1.0, abs(a / x**2) * abs(6 * a * b**2 / x**4))


def test_residual_against_sympy():
    s = sp.Symbol("s")
    for text, tau in [("s^2", s**2), ("exp(s)", sp.exp(s)), ("sin(s)", sp.sin(s))]:
        for e in (-1, 1):
            t1, t2 = tau.diff(s), tau.diff(s, 2)
            sym = t2 * (1 + e * tau**2) - 3 * e * tau * t1**2
            for x in (0.5, 1.3):
                assert residual_nonnull(tau_jet(text, x), e, 1) == pytest.approx(
                    float(sym.subs(s, x)), rel=1e-12)


def test_torsion_residual_report_controls():
    grid = uniform_grid(0.5, 2, 51)
    assert torsion_residual_report("s^2", grid, -1).max_relative > 1e-2
    assert torsion_residual_report("exp(s)", grid, None).max_relative > 1e-2
    assert torsion_residual_report("-4/s^2", grid, None).verdict is Verdict.VANISHES


# -- closed-form determinant identity -------------------------------------------


def test_det345_identity_on_example():
    assert det345_closed_form_check(parse_curve(NULL_SLANT_CURVE), uniform_grid(0.5, 3, 51)) <= 1e-7


def test_det345_identity_on_synthesized_curve():
    c = integrate_frame("spacelike-sn", "s/sqrt(1 + s^2)", None, (0, 1.5))
    assert det345_closed_form_check(c, c.analysis_grid(51)) <= 1e-6


def test_det345_requires_unit_curvature():
    with pytest.raises(KappaNotOne):
        det345_closed_form_check(parse_curve(HELIX), [0.5])


@pytest.mark.parametrize("eT, e", [(1, -1), (-1, -1), (1, 1)])
def test_det345_identity_symbolic(eT, e):
    # alpha''', alpha'''', alpha^(5) in frame components for kappa = 1, built from
    # T' = N, N' = -eT eN T + tau B, B' = -eN eB tau N with e = eT eB, eN = -e
    s = sp.Symbol("s")
    tau = sp.Function("tau")(s)
    eN, eB = -e, e * eT

    def d(v):
        t, n, b = v
        return (t.diff(s) - eT * eN * n, n.diff(s) + t - eN * eB * tau * b, b.diff(s) + tau * n)

    a3 = d((sp.Integer(0), sp.Integer(1), sp.Integer(0)))
    a4 = d(a3)
    a5 = d(a4)
    det = sp.Matrix([a3, a4, a5]).det()
    expected = tau.diff(s, 2) * (1 + e * tau**2) - 3 * e * tau * tau.diff(s) ** 2
    assert sp.expand(det - expected) == 0


# -- slant indicator -----------------------------------------------------------


def test_slant_indicator_unit_families():
    for tau, case, rng in [("s/sqrt(1 + s^2)", "spacelike-sn", (-1, 1)),
                           ("s/sqrt(1 - s^2)", "spacelike-tn", (-0.8, 0.8))]:
        c = integrate_frame(case, tau, None, rng)
        sr = slant_report(c, c.analysis_grid(41))
        assert sr.constant
        np.testing.assert_allclose(sr.values, 1.0, atol=1e-6)


def test_slant_indicator_constant_torsion_is_zero():
    sr = slant_report(parse_curve(UNIT_HELIX), uniform_grid(0, 3, 21))
    assert sr.constant
    np.testing.assert_allclose(sr.values, 0.0, atol=1e-12)


def test_slant_indicator_rejects_null():
    with pytest.raises(NotApplicable):
        slant_indicator(parse_curve(NULL_SLANT_CURVE), 1.0)


def test_slant_lightlike_normal_is_constant_true():
    sr = slant_report(parse_curve("(s^2/2, s^2/2, s)"), uniform_grid(0, 1, 5))
    assert sr.constant and "lightlike" in sr.note


def test_slant_negative():
    c = integrate_frame("spacelike-tn", "s^2", None, (0.5, 2))
    assert not slant_report(c, c.analysis_grid(41)).constant


# -- tangent indicatrix --------------------------------------------------------


def test_indicatrix_of_hyperbola():
    ind = tangent_indicatrix(parse_curve("(sinh(s), cosh(s), 0)"))
    for s in np.linspace(-2, 2, 9):
        p = ind.position(s)
        np.testing.assert_allclose(p, [math.cosh(s), math.sinh(s), 0], rtol=1e-14)
        assert metric_g(p, p) == pytest.approx(-1.0)


def test_indicatrix_ladder_shift():
    curve = parse_curve(UNIT_HELIX)
    grid = uniform_grid(0, 3, 11)
    ind = tangent_indicatrix(curve)
    np.testing.assert_allclose(det_k(ind, 2, grid).values, det_k(curve, 3, grid).values)


def test_indicatrix_requires_unit_curvature():
    with pytest.raises(KappaNotOne):
        tangent_indicatrix(parse_curve(HELIX), check_at=[0.0])
