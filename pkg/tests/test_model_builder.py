import numpy as np
import pytest

from circledyn.circle_maps import PiecewiseMoebius, PowerMap
from circledyn.geometry import disk_moebius_from_constraints, to_complex
from circledyn.model_builder import (
    HYPERBOLIC,
    PARABOLIC,
    ModelError,
    Prescription,
    build_model,
    build_neighborhoods,
    continuity_residuals,
    derivative_residuals,
    periods,
    repels,
    verify_model,
)
from circledyn.markov import validate_partition

from conftest import SIXTHS


@pytest.fixture(scope="module")
def p_sixths():
    return validate_partition(PowerMap(3), SIXTHS)


@pytest.fixture(scope="module")
def parabolic_model(p_sixths):
    return build_model(p_sixths, {0: PARABOLIC})


def test_periods(p_sixths):
    assert periods(p_sixths) == [1, None, None, 1, None, None]


def test_prescription_resolution(p_sixths):
    kinds = Prescription.from_angles(p_sixths, {0.0: PARABOLIC}).resolve(p_sixths)
    assert kinds == {0: PARABOLIC, 3: HYPERBOLIC}
    with pytest.raises(ModelError):
        Prescription({1: HYPERBOLIC}).resolve(p_sixths)
    with pytest.raises(ModelError):
        Prescription({0: "Elliptic"}).resolve(p_sixths)


def test_hyperbolic_model(p_sixths):
    g, Pg = build_model(p_sixths)
    assert np.array_equal(Pg.transition, p_sixths.transition)
    res = derivative_residuals(g, Pg, {0: HYPERBOLIC, 3: HYPERBOLIC})
    assert max(abs(x) for pair in res.values() for x in pair) < 1e-10
    assert np.max(continuity_residuals(g)) < 1e-10
    assert np.all(np.diff(g.points) > 0) and np.all(Pg.lengths < 0.5)


def test_multiplier_override(p_sixths):
    g, Pg = build_model(p_sixths, multiplier=3.0)
    res = derivative_residuals(g, Pg, {0: HYPERBOLIC}, multiplier=3.0)
    assert max(abs(x) for x in res[0]) < 1e-10
    with pytest.raises(ModelError):
        build_model(p_sixths, multiplier=1.0)


def test_parabolic_model_derivatives(parabolic_model):
    g, Pg = parabolic_model
    res = derivative_residuals(g, Pg, {0: PARABOLIC, 3: HYPERBOLIC})
    assert max(abs(x) for pair in res.values() for x in pair) < 1e-10


@pytest.mark.parametrize("k", [0, 3])
@pytest.mark.parametrize("side", [1, -1])
def test_prescribed_points_repel(parabolic_model, k, side):
    g, Pg = parabolic_model
    assert repels(g, Pg, k, side)


def test_rejects_non_injective_arcs(p_pow3):
    # z^3 wraps each cube-root arc once around the circle
    with pytest.raises(ModelError, match="not injective"):
        build_model(p_pow3)


def test_rejects_both_endpoints_periodic():
    # on quarters 0 and 1/2 are fixed and 1/4, 3/4 form a 2-cycle
    P = validate_partition(PowerMap(3), [0.0, 0.25, 0.5, 0.75])
    with pytest.raises(ModelError, match="both endpoints"):
        build_model(P)


def test_rejects_small_or_reversed():
    with pytest.raises(ModelError):
        build_model(validate_partition(PowerMap(2), [0.0, 0.5]))
    with pytest.raises(ModelError):
        build_model(validate_partition(PowerMap(2, -1), [0.0, 1 / 3, 2 / 3]))


def test_neighborhoods_pass(parabolic_model):
    g, Pg = parabolic_model
    ns = build_neighborhoods(g, Pg)
    assert ns.passed and ns.worst == (0, 0)


def test_neighborhoods_disjoint_near_shared_endpoint(parabolic_model):
    g, Pg = parabolic_model
    ns = build_neighborhoods(g, Pg)
    b = to_complex(g.points[1])
    # points just inside the disk next to b_1, on either side of the radius through it
    for eps in (1e-3, 1e-5):
        z = b * (1 - eps) * np.exp(2j * np.pi * np.array([-eps, eps]))
        inside = [ns.in_U(0, z), ns.in_U(1, z)]
        assert not np.any(inside[0] & inside[1])


def test_neighborhood_export(parabolic_model):
    g, Pg = parabolic_model
    doc = build_neighborhoods(g, Pg, samples=2000).export()
    assert len(doc) == Pg.size and len(doc[0]["lens_circles"]) == 2


def test_neighborhoods_reject_long_arcs(p_pow2):
    with pytest.raises(ModelError, match="half a turn"):
        build_neighborhoods(None, p_pow2)


def test_verify_parabolic_model(p_sixths, parabolic_model):
    g, Pg = parabolic_model
    rep = verify_model(g, Pg, {0: PARABOLIC}, Pf=p_sixths)
    assert rep.passed, rep.mismatches
    by_index = {c.index: c for c in rep.points}
    assert by_index[0].exponent == pytest.approx(-1.0, abs=0.2)
    assert by_index[3].lam == pytest.approx(2.0, rel=0.05)


def test_verify_detects_tampered_piece(parabolic_model):
    g, Pg = parabolic_model
    b = g.points
    # same combinatorics, but derivative 1.5 at the parabolic-prescribed point
    bad = disk_moebius_from_constraints(b[0], b[1], b[Pg.sigma[0]], b[Pg.sigma[1]], 1.5)
    tampered = PiecewiseMoebius(b, [bad] + list(g.pieces[1:]))
    rep = verify_model(tampered, validate_partition(tampered, b), {0: PARABOLIC})
    assert not rep.passed
    assert [c.index for c in rep.mismatches] == [0]
    assert rep.derivative_residual == pytest.approx(0.5, abs=1e-9)
