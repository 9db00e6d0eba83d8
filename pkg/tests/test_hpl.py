import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from vanest_jets.hpl import (ContractionData, ContractionError, FiniteGroupoid, FiniteSimplicialSet,
                             NilpotencyError, SimplicialError, boundary, check_moore_homotopy, moore_homotopy, nerve, neumann_inverse, pair_nerve,
                             perturb, random_contraction, swap_bidegrees, verify_lemma_a, verify_side_conditions,
                             vertex_nerve)
from vanest_jets.linear import SparseMatrix


def _draw(seed, delta=(1, 0), mix=True):
    return random_contraction(random.Random(seed), delta_bidegree=delta, mix=mix)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([(1, 0), (0, 1)]), st.booleans())
def test_lemma_on_random_contractions(seed, delta, mix):
    c = _draw(seed, delta, mix)
    assert verify_side_conditions(c).ok
    rep = verify_lemma_a(c)
    assert rep.ok, rep.lines()


def test_unmixed_contractions_preserve_D():
    # without mixing every identity of the lemma is checked
    for seed in range(10):
        rep = verify_lemma_a(_draw(seed, mix=False))
        assert len(rep.results) == 3 and rep.ok


def test_perturbation_of_zero_is_trivial():
    c = _draw(4)
    z = ContractionData(c.C, c.D, c.delta, SparseMatrix.zero(c.C.total, c.C.total), c.h, c.i, c.p, c.delta_bidegree)
    pert = perturb(z)
    assert pert.p == c.p and pert.i == c.i and pert.h == c.h


def test_json_roundtrip():
    for seed in range(5):
        c = _draw(seed)
        back = ContractionData.from_json(c.to_json())
        assert back == c
        assert back.to_json() == c.to_json()


def test_json_rejects_unknown_fields():
    doc = json.loads(_draw(1).to_json())
    doc["extra"] = 1
    with pytest.raises(ContractionError):
        ContractionData.from_json(json.dumps(doc))
    doc = json.loads(_draw(1).to_json())
    doc["schema"] = 2
    with pytest.raises(ContractionError):
        ContractionData.from_json(json.dumps(doc))


def _corrupt(c):
    # flip the sign of one nonzero entry of h
    (r, col), v = sorted(c.h.entries.items())[0]
    entries = dict(c.h.entries)
    entries[(r, col)] = -v
    return SparseMatrix(c.h.rows, c.h.cols, entries)


def test_corrupted_homotopy_is_rejected_with_bidegree():
    for seed in range(20):
        c = _draw(seed)
        if c.h.entries:
            break
    h = _corrupt(c)
    with pytest.raises(ContractionError, match="bidegree"):
        ContractionData(c.C, c.D, c.delta, c.d, h, c.i, c.p, c.delta_bidegree)
    bad = ContractionData(c.C, c.D, c.delta, c.d, h, c.i, c.p, c.delta_bidegree, validate=False)
    rep = verify_lemma_a(bad)
    assert not rep.ok
    failing = [b for ok, b in rep.results.values() if not ok]
    assert all(b in c.C.dims for b in failing)


def test_wrong_bidegree_is_rejected():
    c = _draw(2)
    with pytest.raises(ContractionError):
        ContractionData(c.C, c.D, c.d, c.delta, c.h, c.i, c.p, c.delta_bidegree)


def test_swap_bidegrees():
    c = _draw(3, delta=(1, 0))
    s = swap_bidegrees(c)
    assert s.delta_bidegree == (0, 1)
    assert verify_lemma_a(s).ok


def test_neumann_series():
    n = SparseMatrix.from_rows([[0, 1, 0], [0, 0, 2], [0, 0, 0]])
    inv = neumann_inverse(n)
    assert (SparseMatrix.identity(3) + n) @ inv == SparseMatrix.identity(3)
    with pytest.raises(NilpotencyError):
        neumann_inverse(SparseMatrix.identity(2))


def test_nerve_level_counts():
    X = pair_nerve("abc", 3)
    assert [len(lv) for lv in X.levels] == [3, 9, 27, 81]
    Z3 = FiniteGroupoid.group(range(3), lambda a, b: (a + b) % 3, 0)
    B = nerve(Z3, 3)
    assert [len(lv) for lv in B.levels] == [1, 3, 9, 27]
    P = nerve(FiniteGroupoid.pair("ab"), 3)
    assert [len(lv) for lv in P.levels] == [2, 4, 8, 16]


def test_boundary_squares_to_zero():
    X = vertex_nerve([["a", "b"], ["c"]], 3)
    for p in range(2, 4):
        for x in X.levels[p]:
            assert boundary(X, p - 1, boundary(X, p, {x: 1})) == {}


def test_moore_homotopy():
    X = pair_nerve("abc", 3)
    H = moore_homotopy(X, {m: "a" for m in "abc"})
    assert H.apply(0, {("b",): 1}) == {("b", "a"): -1}
    assert check_moore_homotopy(H) is None
    Y = vertex_nerve([["a", "b"], ["c", "d"]], 3)
    assert check_moore_homotopy(moore_homotopy(Y, {"a": "a", "b": "a", "c": "d", "d": "d"})) is None


def test_moore_homotopy_rejects_bad_targets():
    X = vertex_nerve([["a", "b"], ["c"]], 2)
    with pytest.raises(SimplicialError):
        moore_homotopy(X, {"a": "a", "b": "a", "c": "a"})
    with pytest.raises(SimplicialError):
        moore_homotopy(X, {"a": "b", "b": "a", "c": "c"})


def test_broken_simplicial_set_detected():
    levels = [[("a",), ("b",)], [("a", "a"), ("b", "b"), ("a", "b")]]
    with pytest.raises(SimplicialError, match="d_0"):
        FiniteSimplicialSet(levels, lambda p, i, x: ("c",), lambda p, i, x: x + x[-1:])
