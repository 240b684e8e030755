import math

import numpy as np
import pytest
import sympy as sp

from lorentz_curves.errors import DegenerateCurvature, LightlikeNormal, StraightNullLine
from lorentz_curves.expr import parse_curve
from lorentz_curves.frame import (
    CurveKind,
    classify_curve,
    curvature_jets,
    nonnull_frenet,
    null_cartan,
)
from lorentz_curves.lorentz import det3, metric_g

NULL_SLANT_CURVE = "(1/6*(s^5/5 - 1/s), 1/6*s^2, 1/6*(s^5/5 + 1/s))"

# unit-speed non-null curves covering all three signatures
NONNULL = {
    "spacelike helix, timelike axis": "(sqrt(3)*s, 2*cos(s), 2*sin(s))",
    "timelike helix": "(sqrt(2)*s, cos(s), sin(s))",
    "spacelike, timelike normal": "(cosh(0.6*s), sinh(0.6*s), 0.8*s)",
    "timelike hyperbola": "(sinh(s), cosh(s), 0)",
    "spacelike, spacelike normal, varying torsion": "(sinh(s), cosh(s), sqrt(2)*s)",
}


def test_classify_examples():
    c = classify_curve(parse_curve("(sinh(s), cosh(s), 0)"), 0.7)
    assert c.kind is CurveKind.NON_NULL_UNIT_SPEED and c.eps_T == -1
    assert classify_curve(parse_curve(NULL_SLANT_CURVE), 1.0).kind is CurveKind.NULL_PSEUDO_ARC
    assert classify_curve(parse_curve("(0, 2*s, 0)"), 0.3).kind is CurveKind.NOT_NORMALIZED
    line = classify_curve(parse_curve("(0, s, 0)"), 1.0)
    assert line.kind is CurveKind.NON_NULL_UNIT_SPEED and "degenerate" in line.note
    assert classify_curve(parse_curve("(s, s, 0)"), 1.0).note == "straight null line"


def test_hyperbola_apparatus():
    a = nonnull_frenet(parse_curve("(sinh(s), cosh(s), 0)"), 0.0)
    assert (a.kappa, a.tau) == pytest.approx((1.0, 0.0))
    assert (a.eps_T, a.eps_N, a.eps_B) == (-1, 1, 1)


def test_timelike_normal_apparatus():
    a = nonnull_frenet(parse_curve("(cosh(s), sinh(s), 0)"), 0.0)
    assert (a.kappa, a.tau) == pytest.approx((1.0, 0.0))
    assert (a.eps_T, a.eps_N) == (1, -1)


def test_helix_apparatus():
    a = nonnull_frenet(parse_curve(NONNULL["spacelike helix, timelike axis"]), 0.4)
    assert a.kappa == pytest.approx(2.0)
    assert a.tau == pytest.approx(math.sqrt(3))


def test_frenet_errors():
    with pytest.raises(DegenerateCurvature):
        nonnull_frenet(parse_curve("(0, s, 0)"), 1.0)
    # alpha'' = (1, 1, 0)/2 * ... is lightlike
    with pytest.raises(LightlikeNormal):
        nonnull_frenet(parse_curve("(s^2/2, s^2/2, s)"), 0.5)
    with pytest.raises(StraightNullLine):
        null_cartan(parse_curve("(s, s, 0)"), 1.0)


@pytest.mark.parametrize("s0, tau", [(1.0, -4.0), (2.0, -1.0)])
def test_null_curve_cartan(s0, tau):
    a = null_cartan(parse_curve(NULL_SLANT_CURVE), s0)
    assert a.kappa == 1
    assert a.tau == pytest.approx(tau, rel=1e-12)


def test_null_curve_torsion_over_range():
    c = parse_curve(NULL_SLANT_CURVE)
    for s in np.linspace(0.5, 3.0, 201):
        assert null_cartan(c, s).tau == pytest.approx(-4 / s**2, rel=1e-8)


def test_null_curve_torsion_symbolic_oracle():
    # magnitude from the sign-free invariant g(N', N') = 2 tau for the null frame
    s = sp.Symbol("s", positive=True)
    a = sp.Matrix([sp.Rational(1, 6) * (s**5 / 5 - 1 / s), s**2 / 6,
                   sp.Rational(1, 6) * (s**5 / 5 + 1 / s)])
    g = lambda x, y: -x[0] * y[0] + x[1] * y[1] + x[2] * y[2]
    assert sp.simplify(g(a.diff(s), a.diff(s))) == 0
    assert sp.simplify(g(a.diff(s, 2), a.diff(s, 2))) == 1
    n_prime = a.diff(s, 3)
    # N' = -tau T - B with g(T, B) = 1 gives g(N', N') = 2 tau
    tau = sp.simplify(g(n_prime, n_prime) / 2)
    assert sp.simplify(tau + 4 / s**2) == 0


def _fd(f, s0, h=1e-3):
    return (f(s0 - 2 * h) - 8 * f(s0 - h) + 8 * f(s0 + h) - f(s0 + 2 * h)) / (12 * h)


@pytest.mark.parametrize("name", sorted(NONNULL))
def test_frenet_equations_by_finite_differences(name):
    curve = parse_curve(NONNULL[name])
    rng = np.random.default_rng(7)
    for s0 in rng.uniform(-1.5, 1.5, 100):
        a = nonnull_frenet(curve, s0)
        eT, eN, eB = a.eps_T, a.eps_N, a.eps_B
        k, t = a.kappa, a.tau
        dT = _fd(lambda s: nonnull_frenet(curve, s).T, s0)
        dN = _fd(lambda s: nonnull_frenet(curve, s).N, s0)
        dB = _fd(lambda s: nonnull_frenet(curve, s).B, s0)
        scale = max(1.0, np.max(np.abs([a.T, a.N, a.B]))) * max(1.0, k, abs(t))
        assert np.max(np.abs(dT - k * a.N)) <= 1e-8 * scale
        assert np.max(np.abs(dN - (-eT * eN * k * a.T + t * a.B))) <= 1e-8 * scale
        assert np.max(np.abs(dB - (-eN * eB * t * a.N))) <= 1e-8 * scale


def test_cartan_equations_by_finite_differences():
    curve = parse_curve(NULL_SLANT_CURVE)
    rng = np.random.default_rng(11)
    for s0 in rng.uniform(0.6, 3.0, 100):
        a = null_cartan(curve, s0)
        dN = _fd(lambda s: null_cartan(curve, s).N, s0)
        dB = _fd(lambda s: null_cartan(curve, s).B, s0)
        dT = _fd(lambda s: null_cartan(curve, s).T, s0)
        scale = max(1.0, np.max(np.abs([a.T, a.N, a.B]))) * max(1.0, abs(a.tau))
        assert np.max(np.abs(dT - a.N)) <= 1e-8 * scale
        assert np.max(np.abs(dN - (-a.tau * a.T - a.B))) <= 1e-8 * scale
        assert np.max(np.abs(dB - a.tau * a.N)) <= 1e-8 * scale


def _gram(a):
    return np.array([[metric_g(x, y) for y in (a.T, a.N, a.B)] for x in (a.T, a.N, a.B)])


@pytest.mark.parametrize("name", sorted(NONNULL))
def test_frenet_gram_and_orientation(name):
    curve = parse_curve(NONNULL[name])
    for s0 in np.linspace(-1, 1, 9):
        a = nonnull_frenet(curve, s0)
        G = _gram(a)
        np.testing.assert_allclose(G, np.diag([a.eps_T, a.eps_N, a.eps_B]), atol=1e-12)
        assert a.eps_T * a.eps_N * a.eps_B == -1
        assert det3(a.T, a.N, a.B) > 0


def test_cartan_gram():
    curve = parse_curve(NULL_SLANT_CURVE)
    expected = np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]])
    for s0 in np.linspace(0.5, 3, 11):
        np.testing.assert_allclose(_gram(null_cartan(curve, s0)), expected, atol=1e-10)


def test_frame_is_deterministic():
    curve = parse_curve(NONNULL["timelike helix"])
    a, b = nonnull_frenet(curve, 0.3), nonnull_frenet(curve, 0.3)
    np.testing.assert_array_equal(a.B, b.B)
    np.testing.assert_array_equal(a.N, b.N)


def test_curvature_jets_match_apparatus():
    cj = curvature_jets(parse_curve(NULL_SLANT_CURVE), 1.5)
    assert cj.null
    assert cj.tau.value == pytest.approx(-4 / 1.5**2)
    assert cj.tau.derivative_value(1) == pytest.approx(8 / 1.5**3)
    assert cj.tau.derivative_value(2) == pytest.approx(-24 / 1.5**4)
