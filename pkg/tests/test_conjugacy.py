import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circledyn.circle_maps import BlaschkeProduct
from circledyn.conjugacy import (
    Conjugacy,
    ConjugacyError,
    TabulatedLift,
    beurling_ahlfors_extend,
    beurling_ahlfors_upper,
    disk_to_upper,
    distortion_profile,
    eval_h,
    extension_class,
    integrate_batch,
    jacobian_signs,
    scalewise_distortion,
    symmetric_distortion,
    upper_to_disk,
)
from circledyn.geometry import circle_dist, to_complex
from circledyn.markov import validate_partition


def test_identity_conjugacy(p_pow2):
    C = Conjugacy(p_pow2, p_pow2)
    x = np.random.default_rng(0).uniform(size=64)
    hx, err = C.eval(x)
    assert np.max(circle_dist(hx, x)) < 1e-12 and np.all(err < 1e-10)


def test_quarter_goes_to_third(conj_b2):
    # B2(z) = -1 iff z^2 + z + 1 = 0, whose upper root has angle 1/3
    hx, _ = eval_h(conj_b2, 0.25, tol=1e-12)
    assert hx == pytest.approx(1 / 3, abs=1e-9)
    z = to_complex(1 / 3)
    assert abs(z * z + z + 1) < 1e-12


def test_pine_fixed_point_in_middle_arc(conj_pine):
    # 1/2 is fixed by z^3 and -1 is the repelling fixed point of the pine-tree map
    hx, _ = conj_pine.eval(0.5, tol=1e-8)
    assert hx == pytest.approx(0.5, abs=1e-8)
    assert circle_dist(conj_pine.g.eval(hx), hx) < 1e-8


def test_anchoring(conj_pine):
    hx, _ = conj_pine.eval(conj_pine.source.points)
    assert np.max(circle_dist(hx, conj_pine.target.points)) < 1e-14


def test_equivariance_and_monotonicity(conj_b2):
    x = np.sort(np.random.default_rng(3).uniform(size=1024))
    assert conj_b2.equivariance_residual(x) < 1e-9
    hx, _ = conj_b2.eval(x)
    assert np.all(np.diff(hx) > -1e-12)


def test_exact_on_refinement_points(conj_b2):
    A, B = conj_b2.source.refine(8), conj_b2.target.refine(8)
    hx, _ = conj_b2.eval(A.points, tol=1e-12)
    assert np.max(circle_dist(hx, B.points)) < 1e-12


def test_composition_transitivity(p_pow2, p_b2, conj_b2):
    Pk = validate_partition(BlaschkeProduct([0.0, -0.3]), [0.0, 0.5])
    g_to_k, f_to_k = Conjugacy(p_b2, Pk), Conjugacy(p_pow2, Pk)
    x = p_pow2.refine(4).points
    two_step = g_to_k.eval(conj_b2.eval(x, tol=1e-12)[0], tol=1e-12)[0]
    direct = f_to_k.eval(x, tol=1e-12)[0]
    assert np.max(circle_dist(two_step, direct)) < 1e-9


def test_rejects_mismatched_partitions(p_pow2, p_pow3):
    with pytest.raises(ConjugacyError):
        Conjugacy(p_pow2, p_pow3)
    with pytest.raises(ConjugacyError):
        Conjugacy(p_pow3, p_pow3, pairing=[0, 2, 1])


def test_rotated_pairing_must_commute(p_pow3):
    # rotation by 1/3 does not commute with z^3, so the shifted labels are not a conjugacy
    with pytest.raises(ConjugacyError, match="does not conjugate"):
        Conjugacy(p_pow3, p_pow3, pairing=[1, 2, 0])


@given(st.floats(0, 1, exclude_max=True), st.integers(3, 12))
@settings(max_examples=40, deadline=None)
def test_symmetric_distortion_at_least_one(conj_b2, z, j):
    assert symmetric_distortion(conj_b2, z, 2.0**-j) >= 1.0 - 1e-12


def test_identity_distortion():
    assert symmetric_distortion(lambda x: x, 0.3, 0.01) == pytest.approx(1.0)
    rho, _arg, skipped = scalewise_distortion(lambda x: x, 2.0**-8)
    assert rho == pytest.approx(1.0) and skipped == 0


def test_distortion_grows_beside_parabolic_point(conj_pine):
    # at z = 0 itself rho is 1 by the reflection symmetry of both maps
    assert symmetric_distortion(conj_pine, 0.0, 2.0**-10) == pytest.approx(1.0, abs=1e-9)
    near = [symmetric_distortion(conj_pine, 2.0**-j, 2.0**-j) for j in (10, 13, 16)]
    assert near[0] < near[1] < near[2]


@pytest.mark.parametrize("rows, verdict", [
    ([(j, 1.0) for j in range(3, 19)], "Bounded"),
    ([(j, float(j)) for j in range(3, 19)], "Logarithmic"),
    ([(j, 2.0 ** (j / 2)) for j in range(3, 19)], "Faster"),
])
def test_extension_class_synthetic(rows, verdict):
    assert extension_class(rows) == verdict


def test_extension_class_needs_samples():
    with pytest.raises(ValueError):
        extension_class([(j, 1.0) for j in range(3, 8)])


def test_identity_profile_bounded():
    prof = distortion_profile(lambda x: x, js=range(3, 11))
    assert prof.verdict == "Bounded" and np.allclose(prof.rho, 1.0)


def test_integrate_batch_polynomial():
    got = integrate_batch(lambda s: s**3 - s, np.array([0.0, -1.0]), np.array([1.0, 2.0]))
    assert np.allclose(got, [-0.25, 2.25], atol=1e-10)


def test_ba_identity_closed_form():
    rng = np.random.default_rng(5)
    x, y = rng.uniform(-2, 2, 100), rng.uniform(1e-3, 3, 100)
    E = beurling_ahlfors_upper(lambda s: s, x, y)
    assert np.max(np.abs(E - (x + 0.5j * y))) < 1e-8


def test_ba_commutes_with_rotation():
    alpha = 0.137
    h = lambda x: (x + 0.05 * np.sin(2 * np.pi * x) / (2 * np.pi)) % 1.0  # noqa: E731
    rot = lambda x: (h(x) + alpha) % 1.0  # noqa: E731
    rng = np.random.default_rng(6)
    w = 0.8 * np.sqrt(rng.uniform(size=16)) * np.exp(2j * np.pi * rng.uniform(size=16))
    lhs = beurling_ahlfors_extend(rot, w)
    rhs = np.exp(2j * np.pi * alpha) * beurling_ahlfors_extend(h, w)
    assert np.max(np.abs(lhs - rhs)) < 1e-8


def test_charts_are_inverse():
    w = np.array([0.3 + 0.1j, -0.5j, 0.9])
    assert np.allclose(upper_to_disk(disk_to_upper(w)), w)


def test_tabulated_lift(conj_b2):
    T = TabulatedLift(conj_b2, n=12)
    s = np.linspace(-1.5, 2.5, 257)
    H = T(s)
    assert np.all(np.diff(H) > 0)
    assert np.allclose(T(s + 1) - T(s), 1.0, atol=1e-12)
    hx, _ = conj_b2.eval(s % 1.0)
    assert np.max(circle_dist(H, hx)) < 2 * np.max(np.diff(T.y))
    # exact antiderivative against a fine trapezoid
    a, b = -0.3, 0.9
    g = np.linspace(a, b, 200_001)
    assert T.integral(a, b) == pytest.approx(np.trapezoid(T(g), g), abs=1e-9)


def test_ba_boundary_restriction(conj_b2):
    T = TabulatedLift(conj_b2)
    theta = np.arange(128) / 128
    r = 1 - 2e-6
    E = beurling_ahlfors_extend(T, r * to_complex(theta))
    hx, _ = conj_b2.eval(theta)
    y = -math.log(r) / (2 * math.pi)
    # the extension moves by at most the local oscillation of H across [x - y, x + y]
    bound = 2 * math.pi * (T(theta + y) - T(theta - y)) + 1e-5
    assert np.all(np.abs(E - to_complex(hx)) <= bound)


def test_ba_rejects_boundary_points(conj_b2):
    with pytest.raises(ValueError):
        beurling_ahlfors_extend(lambda x: x, np.array([1 - 1e-7 + 0j]))


def test_jacobian_positive(conj_b2):
    assert np.all(jacobian_signs(TabulatedLift(conj_b2), n=64) > 0)
