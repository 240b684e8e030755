import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lorentz_curves.characterize import residual_nonnull, residual_null
from lorentz_curves.errors import InsufficientSamples, RangeError
from lorentz_curves.families import (
    FamilyCase,
    TorsionFamily,
    fit_torsion_family,
    torsion_family_eval,
    validity_interval,
)


def fam(case, **params):
    sign = params.pop("sign", 1)
    inner = params.pop("inner_sign", 1)
    return TorsionFamily(FamilyCase(case), params, sign, inner)


def test_eval_examples():
    assert torsion_family_eval(fam("spacelike-sn-or-timelike", b=1, c=0), 1.0) == pytest.approx(
        1 / math.sqrt(2))
    assert torsion_family_eval(fam("null-slant", a=-4, b=1, c=0), 2.0) == -1.0
    with pytest.raises(RangeError):
        torsion_family_eval(fam("spacelike-tn", b=1, c=0), 1.0)


def test_validation():
    with pytest.raises(ValueError):
        fam("spacelike-tn", b=0, c=1)
    with pytest.raises(ValueError):
        fam("null-slant", a=1, b=1)
    with pytest.raises(ValueError):
        fam("spacelike-tn", b=1, c=0, inner_sign=-1)
    with pytest.raises(ValueError):
        fam("salkowski-i", phi=0.0)


def test_validity_intervals():
    assert validity_interval(fam("spacelike-tn", b=2, c=1)) == (-1.0, 0.0)
    assert validity_interval(fam("salkowski-ii", phi=1)) == pytest.approx(
        (-math.tanh(1), math.tanh(1)))
    lo, hi = validity_interval(fam("salkowski-iii", phi=1))
    assert lo == pytest.approx(math.tanh(1)) and hi == math.inf
    assert validity_interval(fam("null-slant", a=1, b=2, c=1)) == (-0.5, math.inf)
    f = fam("spacelike-sn-or-timelike", b=1, c=0, inner_sign=-1)
    assert validity_interval(f) == (1.0, math.inf)
    assert not f.in_range(0.5) and f.in_range(1.5)


@given(st.floats(0.2, 3), st.floats(-3, 3))
def test_salkowski_i_is_the_bracket_family(phi, s):
    # the Salkowski torsion is the bracket family with b = 1/tanh(phi), c = 0
    a = torsion_family_eval(fam("salkowski-i", phi=phi), s)
    b = torsion_family_eval(fam("spacelike-sn-or-timelike", b=1 / math.tanh(phi), c=0), s)
    assert a == pytest.approx(b, rel=1e-14, abs=1e-300)


@given(st.floats(0.2, 3), st.floats(-0.99, 0.99))
def test_salkowski_ii_is_the_tn_family(phi, x):
    s = x * math.tanh(phi)
    a = torsion_family_eval(fam("salkowski-ii", phi=phi), s)
    b = torsion_family_eval(fam("spacelike-tn", b=1 / math.tanh(phi), c=0), s)
    assert a == pytest.approx(b, rel=1e-12, abs=1e-300)


CASES = [
    ("spacelike-sn-or-timelike", 1),
    ("spacelike-sn-or-timelike", -1),
    ("spacelike-tn", 1),
]


@pytest.mark.parametrize("case, inner", CASES)
def test_bracket_families_solve_their_ode(case, inner):
    rng = np.random.default_rng(3)
    eps = FamilyCase(case).eps_product
    for _ in range(100):
        f = fam(case, b=rng.choice([-1, 1]) * rng.uniform(0.3, 2), c=rng.uniform(-1, 1),
                sign=int(rng.choice([-1, 1])), inner_sign=inner)
        lo, hi = validity_interval(f)
        lo, hi = (max(lo, -3.0), min(hi, lo + 3.0 if math.isfinite(lo) else 3.0))
        for s in np.linspace(lo, hi, 13)[1:-1]:
            j = f.jet(s, 3)
            assert abs(residual_nonnull(j, eps, 1)) <= 1e-10 * max(1, abs(j.derivative_value(2)))


def test_null_family_solves_its_ode():
    rng = np.random.default_rng(5)
    for _ in range(100):
        a, b, c = rng.uniform(-5, 5), rng.uniform(0.3, 2), rng.uniform(-1, 1)
        f = fam("null-slant", a=a, b=b, c=c)
        for u in np.linspace(0.3, 3, 7):
            j = f.jet((u - c) / b, 3)
            scale = max(1.0, abs(j.value * j.derivative_value(2)))
            assert abs(residual_null(j)) <= 1e-12 * scale


def samples_of(f, lo, hi, n=41):
    s = np.linspace(lo, hi, n)
    return np.column_stack([s, [f(x) for x in s]])


def test_fit_unit_bracket():
    r = fit_torsion_family(samples_of(lambda s: s / math.sqrt(1 + s * s), -2, 2),
                           "spacelike-sn-or-timelike")
    assert r.rms <= 1e-10
    assert r.family.params["b"] == pytest.approx(1.0, abs=1e-9)
    assert r.family.params["c"] == pytest.approx(0.0, abs=1e-9)


def test_fit_null_example_canonical():
    r = fit_torsion_family(samples_of(lambda s: -4 / s**2, 0.5, 3), "null-slant")
    assert r.rms <= 1e-10
    assert r.family.params == pytest.approx({"a": -4.0, "b": 1.0, "c": 0.0}, abs=1e-9)


def test_fit_rejects_wrong_shape():
    data = samples_of(lambda s: s * s, 0.5, 2)
    r = fit_torsion_family(data, "spacelike-sn-or-timelike")
    assert r.rms > 1e-2
    # brute-force scan over (b, c, sign, inner) finds nothing better
    best = math.inf
    for b in np.linspace(0.1, 5, 60):
        for c in np.linspace(-5, 5, 60):
            for sign in (1, -1):
                for inner in (1, -1):
                    u = b * data[:, 0] + c
                    br = inner + u * u
                    if np.any(br <= 0):
                        continue
                    best = min(best, math.sqrt(np.mean((sign * u / np.sqrt(br) - data[:, 1])**2)))
    assert best > 1e-2
    assert r.rms <= best + 1e-9


@pytest.mark.parametrize("case, params, lo, hi", [
    ("spacelike-sn-or-timelike", dict(b=0.8, c=-0.3, sign=-1), -2, 2),
    ("spacelike-sn-or-timelike", dict(b=1.5, c=0.2, inner_sign=-1), 0.8, 2.5),
    ("spacelike-tn", dict(b=1.2, c=0.1), -0.8, 0.6),
    ("null-slant", dict(a=2.5, b=1.0, c=0.4), 0.1, 3),
    ("salkowski-i", dict(phi=0.7), -2, 2),
    ("salkowski-ii", dict(phi=1.2), -0.8, 0.8),
    ("salkowski-iii", dict(phi=0.5), 0.6, 3),
])
def test_fit_round_trip(case, params, lo, hi):
    f = fam(case, **params)
    r = fit_torsion_family(samples_of(f, lo, hi), case)
    assert r.rms <= 1e-10
    s = np.linspace(lo, hi, 17)
    np.testing.assert_allclose([r.family(x) for x in s], [f(x) for x in s], atol=1e-9)


def test_fit_needs_samples():
    with pytest.raises(InsufficientSamples):
        fit_torsion_family([[0, 1], [1, 2]], "null-slant")
