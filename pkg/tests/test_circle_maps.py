import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circledyn.circle_maps import (
    BlaschkeProduct,
    ConjugatedMap,
    PiecewiseMoebius,
    PowerMap,
    cusp_polynomial,
    cusp_polynomial_b,
    half_blaschke,
    pine_tree_blaschke,
)
from circledyn.geometry import MoebiusTransform, circle_dist, disk_moebius_from_constraints, to_complex
from circledyn.mapspec import SpecError, load_map_spec, parse_map_spec

angles = st.floats(0, 1, exclude_max=True, allow_nan=False)
MAPS = {
    "power2": PowerMap(2),
    "power3": PowerMap(3),
    "power2_rev": PowerMap(2, -1),
    "pine": pine_tree_blaschke(),
    "half": half_blaschke(),
    "conj": ConjugatedMap(PowerMap(2), disk_moebius_from_constraints(0, 0.5, 0.1, 0.7)),
}


@pytest.mark.parametrize("name", sorted(MAPS))
def test_lift_period(name):
    f = MAPS[name]
    x = np.linspace(-1, 2, 301)
    assert np.allclose(f.lift(x + 1) - f.lift(x), f.orientation * f.degree, atol=1e-12)


@pytest.mark.parametrize("name", sorted(MAPS))
def test_preimages_map_back(name):
    f = MAPS[name]
    for y in (0.0, 0.123, 0.5, 0.999):
        pre = f.preimages(y)
        assert pre.size == f.degree
        assert np.all(np.diff(pre) > 0)
        assert np.max(circle_dist(f.eval(pre), y)) < 1e-12


@given(angles)
@settings(max_examples=50, deadline=None)
def test_pine_preimages_property(y):
    f = MAPS["pine"]
    assert np.max(circle_dist(f.eval(f.preimages(y)), y)) < 1e-12


@given(angles)
@settings(max_examples=50, deadline=None)
def test_blaschke_derivative_matches_finite_difference(x):
    f = MAPS["pine"]
    h = 1e-6
    fd = (float(f.lift(x + h)) - float(f.lift(x - h))) / (2 * h)
    assert fd == pytest.approx(float(f.lift_derivative(x)), rel=1e-5)


def test_pine_tree_fixed_points_and_multipliers():
    B = pine_tree_blaschke()
    fps = B.fixed_points()
    pts = sorted(round(float(x), 12) for x, _ in fps)
    assert pts == [0.0, 0.5]
    mult = {round(float(x), 12): m for x, m in fps}
    assert mult[0.0] == pytest.approx(1.0, abs=1e-12)
    assert mult[0.5] == pytest.approx(9.0, abs=1e-12)


def test_pine_tree_symbolic_derivative():
    # B'(z) = 9 z^2 / (z^3 + 2)^2 in closed form
    B = pine_tree_blaschke()
    R = B.rational()
    for z in (1.0, -1.0, to_complex(0.3)):
        assert abs(R(z)[1] - 9 * z**2 / (z**3 + 2) ** 2) < 1e-12


def test_half_blaschke_multiplier():
    f = half_blaschke()
    assert f.derivative_modulus(0.0) == pytest.approx(4 / 3, abs=1e-12)


def test_from_rational_agrees_with_factored_form():
    B = pine_tree_blaschke()
    z = to_complex(np.linspace(0, 1, 17))
    direct = (2 * z**3 + 1) / (z**3 + 2)
    assert np.allclose(B.complex_eval(z), direct, atol=1e-13)


def test_blaschke_rejects_zero_outside_disk():
    with pytest.raises(ValueError):
        BlaschkeProduct([0.0, 1.2])


def test_cusp_polynomial_parabolic_points():
    R = cusp_polynomial()
    b = cusp_polynomial_b()
    for a in (1.0, b):
        val, der = R(a)
        assert abs(val - a) < 1e-12 and abs(der - 1) < 1e-12
    fps = R.fixed_points()
    assert len(fps) == 2


def test_rational_preimages_batched():
    R = cusp_polynomial()
    w = np.array([0.3 + 0.1j, -1.0, 2j])
    pre = R.preimages(w)
    assert pre.shape == (3, 5)
    assert np.allclose(R(pre)[0], w[:, None], atol=1e-9)


def test_conjugated_map_conjugates():
    M = disk_moebius_from_constraints(0, 0.5, 0.1, 0.7)
    g = MAPS["conj"]
    x = np.linspace(0, 1, 50, endpoint=False)
    lhs = g.eval(M.circle_map(x))
    rhs = M.circle_map(PowerMap(2).eval(x))
    assert np.max(circle_dist(lhs, rhs)) < 1e-12
    R = g.rational()
    z = to_complex(x[:5])
    assert np.allclose(R(M(z))[0], M(z**2), atol=1e-10)


def test_piecewise_moebius_continuity_and_degree():
    b = [0.0, 1 / 3, 2 / 3]
    # doubling combinatorics on thirds: b_k -> b_{2k}
    pieces = [disk_moebius_from_constraints(b[k], b[(k + 1) % 3], b[2 * k % 3], b[2 * (k + 1) % 3])
              for k in range(3)]
    g = PiecewiseMoebius(b, pieces)
    assert g.degree == 2
    x = np.linspace(0, 1, 1000)
    assert np.all(np.diff(g.lift(x)) > 0)
    # one-sided values at a break point are returned as a pair only when they differ
    assert np.all(np.atleast_1d(g.derivative_modulus(1 / 3)) > 0)
    skew = PiecewiseMoebius(b, [disk_moebius_from_constraints(0, 1 / 3, 0, 2 / 3, 3.0), pieces[1], pieces[2]])
    left, right = skew.derivative_modulus(0.0)
    assert right == pytest.approx(3.0)


def test_piecewise_moebius_rejects_gap():
    b = [0.0, 1 / 3, 2 / 3]
    pieces = [disk_moebius_from_constraints(0, 1 / 3, 0, 2 / 3),
              disk_moebius_from_constraints(1 / 3, 2 / 3, 0.7, 0.1),
              disk_moebius_from_constraints(2 / 3, 0, 0.1, 0.0)]
    with pytest.raises(ValueError):
        PiecewiseMoebius(b, pieces)


@pytest.mark.parametrize("name", sorted(MAPS))
def test_spec_round_trip(name):
    f = MAPS[name]
    g = parse_map_spec(f.to_spec())
    x = np.linspace(0, 1, 33)
    assert np.max(circle_dist(f.eval(x), g.eval(x))) < 1e-12


def test_rational_spec_round_trip():
    R = cusp_polynomial()
    S = parse_map_spec(R.to_spec())
    assert np.allclose(S.num, R.num) and np.allclose(S.den, R.den)


@pytest.mark.parametrize("doc", [
    {"type": "power"},
    {"type": "power", "degree": 2, "extra": 1},
    {"type": "spiral"},
    {"type": "blaschke", "zeros": [[0.2, 0.1, 3]]},
    {"type": "blaschke", "zeros": [1.5, 0]},
    {"degree": 2},
])
def test_spec_strictness(doc):
    with pytest.raises(SpecError):
        parse_map_spec(doc)


def test_load_spec_from_text():
    f = load_map_spec('{"type": "blaschke", "zeros": [0, [-0.5, 0]]}')
    assert f.derivative_modulus(0) == pytest.approx(4 / 3)


def test_anti_moebius_conjugation_keeps_orientation():
    M = MoebiusTransform(1, 0, 0, 1, anti=True)
    g = ConjugatedMap(PowerMap(2), M)
    x = np.array([0.1, 0.3])
    # conj o z^2 o conj = z^2
    assert np.max(circle_dist(g.eval(x), PowerMap(2).eval(x))) < 1e-12
    assert math.isclose(g.derivative_modulus(0.2), 2.0)
