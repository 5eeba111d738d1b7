import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circledyn.circle_maps import PowerMap
from circledyn.geometry import Arc, circle_dist
from circledyn.markov import (
    BudgetExceeded,
    PartitionError,
    arc_test_primitive,
    canonical_split,
    descendants,
    elevator_split,
    export_partition,
    expansivity_profile,
    is_primitive,
    is_realizable,
    realizable_transitions,
    side_arcs,
    validate_partition,
    word_associated_to_arc,
)
from circledyn.markov import _matrix_primitive
from synthetic import PiecewiseLinearCovering


def test_validate_doubling(p_pow2):
    assert p_pow2.transition.tolist() == [[1, 1], [1, 1]]


def test_validate_pine_all_ones(p_pine):
    assert np.all(p_pine.transition == 1)


def test_rejects_non_invariant():
    with pytest.raises(PartitionError) as exc:
        validate_partition(PowerMap(2), [0.0, 1 / 3])
    assert exc.value.clause == "invariance"


def test_rejects_non_injective_arc():
    with pytest.raises(PartitionError) as exc:
        validate_partition(PowerMap(3), [0.0, 0.5])
    assert exc.value.clause == "injectivity"


def test_rejects_single_point():
    with pytest.raises(PartitionError):
        validate_partition(PowerMap(2), [0.0])


def test_refine_dyadic(p_pow2):
    F2 = p_pow2.refine(2)
    assert np.allclose(F2.points, [0, 0.25, 0.5, 0.75])
    assert F2.level_of(0.25) == 2 and F2.level_of(0.0) == 1
    F3 = p_pow2.refine(3)
    assert len(F3) == 8
    odd = np.arange(1, 8, 2) / 8
    assert all(F3.level_of(x) == 3 for x in odd)


def test_refine_pine_size(p_pine):
    assert len(p_pine.refine(2)) == 9


def test_refine_budget(p_pow2):
    P = validate_partition(PowerMap(2), [0.0, 0.5])
    with pytest.raises(BudgetExceeded):
        P.refine(12, budget=1000)


@pytest.mark.parametrize("w, start, length", [((0, 1), 0.25, 0.25), ((0, 0, 1), 0.125, 0.125), ((), 0.0, 1.0)])
def test_arc_of_word(p_pow2, w, start, length):
    a = p_pow2.arc_of_word(w)
    assert a.start == pytest.approx(start) and a.length == pytest.approx(length)


def test_inadmissible_word_has_no_arc():
    P = validate_partition(PiecewiseLinearCovering([0, 2, 0]), [0, 1 / 3, 2 / 3])
    bad = next(w for w in itertools.product(range(3), repeat=2) if not P.is_admissible(w))
    assert P.arc_of_word(bad) is None


@pytest.mark.parametrize("w, v, u", [((0, 0, 1), (0,), (0, 1)), ((0, 1), (), (0, 1)), ((0,), (), (0,))])
def test_canonical_split_examples(p_pow2, w, v, u):
    assert canonical_split(p_pow2, w) == (v, u)


def test_word_associated_to_arc(p_pow2):
    assert word_associated_to_arc(p_pow2, Arc.between(0.2, 0.3)) == (0,)
    # [0.25, 0.3125] is a level-4 arc, and its children split at 0.28125
    assert word_associated_to_arc(p_pow2, Arc.between(0.26, 0.3)) == (0, 1, 0, 0)
    assert word_associated_to_arc(p_pow2, p_pow2.arcs[1]) == (1,)


def test_word_associated_oracle(p_pow2):
    # brute force: deepest dyadic arc [k/2^n, (k+1)/2^n] containing I
    rng = np.random.default_rng(1)
    for _ in range(30):
        a = rng.uniform(0, 0.9)
        I = Arc.between(a, a + rng.uniform(1e-3, 0.1))
        w = word_associated_to_arc(p_pow2, I)
        n = max((m for m in range(1, 30)
                 if np.floor(I.start * 2**m) == np.floor((I.end - 1e-15) * 2**m)), default=0)
        assert len(w) == n
        assert p_pow2.arc_of_word(w).contains_arc(I)


def test_elevator_alternatives(p_pow2):
    rep = elevator_split(p_pow2, Arc.between(0.2, 0.3))
    assert rep.alternative == "A-ii" and rep.split_point == pytest.approx(0.25)
    assert all(s[0] == rep.word for s in rep.half_splits)
    assert elevator_split(p_pow2, Arc.between(0.2, 0.45)).alternative == "A-i"
    arc = p_pow2.refine(5).arc(3)
    rep = elevator_split(p_pow2, arc)
    assert rep.alternative == "A-i" and rep.p <= 2 ** 3


def test_elevated_arc_matches_canonical_split(p_pow2):
    arc = p_pow2.refine(5).arc(3)
    rep = elevator_split(p_pow2, arc)
    v, u = rep.split
    # f^m(I) contains f^m(A_{vu}) = A_u and stays of unit-order size
    target = p_pow2.arc_of_word(u)
    assert Arc(rep.elevated_start, rep.elevated_length).contains_arc(target, tol=1e-12)
    assert rep.elevated_length >= 2.0 ** -(p_pow2.r + 1)


@pytest.mark.parametrize("B, primitive, witness", [
    ([[1, 1], [1, 1]], True, 1),
    ([[0, 1], [1, 0]], False, None),
    ([[1, 1, 0], [0, 0, 1], [1, 0, 0]], True, 4),
])
def test_primitivity_examples(B, primitive, witness):
    rep = is_primitive(np.array(B))
    assert rep.primitive is primitive and rep.witness_power == witness


def test_listed_three_by_three_is_not_a_covering_matrix():
    # matrix-power oracle: B^4 is the first positive power
    B = np.array([[1, 1, 0], [0, 0, 1], [1, 0, 0]])
    powers = [np.linalg.matrix_power(B, n) for n in range(1, 6)]
    assert [bool(np.all(M > 0)) for M in powers] == [False, False, False, True, True]
    assert not is_realizable(B)
    assert not is_primitive(B).arc_test_applicable


def test_realizable_enumeration_matches_predicate():
    table = realizable_transitions(3)
    for bits in itertools.product((0, 1), repeat=9):
        B = np.array(bits).reshape(3, 3)
        assert is_realizable(B) == (tuple(bits) in table)


@pytest.mark.parametrize("orientation", [1, -1])
def test_synthetic_coverings_refine(orientation):
    for sigma in itertools.product(range(3), repeat=3):
        P = validate_partition(PiecewiseLinearCovering(list(sigma), orientation), [0, 1 / 3, 2 / 3])
        F = P.refine(4)
        assert F.lengths.sum() == pytest.approx(1.0, abs=1e-12)
        geo = np.bincount(P.refine(3).first, minlength=3) >= 2
        assert bool(np.all(geo)) == (_matrix_primitive(P.transition) is not None)


def test_orientation_reversing_power():
    P = validate_partition(PowerMap(2, -1), [0, 1 / 3, 2 / 3])
    assert np.allclose(np.sort(P.refine(4).points), np.arange(24) / 24)
    assert is_primitive(P).primitive


def test_expansivity_closed_forms(p_pow2, p_pow3):
    assert expansivity_profile(p_pow2, 5).rows[-1][1] == pytest.approx(2 * np.sin(np.pi / 32), abs=1e-12)
    assert expansivity_profile(p_pow3, 4).rows[-1][1] == pytest.approx(2 * np.sin(np.pi / 81), abs=1e-12)
    assert expansivity_profile(p_pow2, 8).verdict == "expansive (numerical, geometric decay)"


def test_expansivity_pine_sub_geometric(p_pine):
    prof = expansivity_profile(p_pine, 12)
    d = [r[1] for r in prof.rows]
    assert np.all(np.diff(d) <= 0)
    assert prof.verdict == "expansive (numerical, sub-geometric decay)"


def test_export_partition(p_pow2):
    doc = export_partition(p_pow2, 3)
    assert doc["transition"] == [[1, 1], [1, 1]] and len(doc["diameter_profile"]) == 3


@pytest.mark.parametrize("name", ["p_pow2", "p_pine"])
def test_shift_action(name, request):
    P = request.getfixturevalue(name)
    f = P.map
    for n in range(2, 7):
        for kw, arc in descendants(P, (), n):
            tail = P.arc_of_word(kw[1:])
            lo, hi = f.eval(arc.start), f.eval(arc.end)
            assert circle_dist(lo, tail.start) < 1e-10 and circle_dist(hi, tail.end) < 1e-10


@pytest.mark.parametrize("name", ["p_pow2", "p_pine"])
def test_child_containment(name, request):
    P = request.getfixturevalue(name)
    for w, arc in descendants(P, (), 6):
        for _c, child in P.children(w):
            assert arc.contains_arc(child, tol=1e-12)


def test_side_arcs_dyadic(p_pow2):
    for m, (a1, a2) in enumerate(side_arcs(p_pow2, 0.0, 1, 6), start=1):
        assert a1.start == pytest.approx(0.0) and a1.length == pytest.approx(2.0**-m)
        assert a2.start == pytest.approx(2.0**-m)


def test_arc_test_on_full_matrix():
    assert arc_test_primitive(np.ones((3, 3), dtype=int)) == (True, None)


@given(st.integers(1, 9), st.integers(0, 2**12 - 1))
@settings(max_examples=60, deadline=None)
def test_refinement_word_round_trip(n, seed):
    P = validate_partition(PowerMap(3), [0.0, 1 / 3, 2 / 3])
    F = P.refine(min(n, 7))
    i = seed % len(F)
    arc = P.arc_of_word(F.word(i))
    assert circle_dist(arc.start, F.starts[i]) < 1e-12
    assert arc.length == pytest.approx(F.lengths[i], abs=1e-12)
