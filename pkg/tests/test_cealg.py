import random
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from vanest_jets.cealg import (ActionSpec, CEElement, basis, ce_differential, cohomology_dims, square_defect,
                               validate_action)
from vanest_jets.lie import LieAlgebraSpec, abelian, aff1, heisenberg, sl2
from vanest_jets.linear import Rational
from vanest_jets.series import VariableSet, VectorField

SHIPPED = [abelian(2), heisenberg(), sl2(), aff1()]
SL2_STD = [[[1, 0], [0, -1]], [[0, 1], [0, 0]], [[0, 0], [1, 0]]]


def gen(g, *J, c=1):
    return CEElement(g, {tuple(J): c})


def test_abelian_differential_vanishes():
    g = abelian(3)
    for k in range(4):
        for J in basis(g, k):
            assert ce_differential(CEElement(g, {J: 1})).is_zero()


def test_heisenberg_and_sl2_generators():
    h = heisenberg()
    assert ce_differential(gen(h, 2)) == gen(h, 0, 1, c=-1)
    s = sl2()  # basis (h, e, f)
    assert ce_differential(gen(s, 0)) == gen(s, 1, 2, c=-1)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_abelian_betti(n):
    assert cohomology_dims(abelian(n)) == [comb(n, k) for k in range(n + 1)]


def test_betti_numbers():
    assert cohomology_dims(sl2()) == [1, 0, 0, 1]
    assert cohomology_dims(heisenberg()) == [1, 2, 2, 1]
    assert cohomology_dims(aff1()) == [1, 1, 0]


@pytest.mark.parametrize("g", SHIPPED, ids=lambda a: a.name)
def test_d_squared_zero(g):
    assert square_defect(g) is None


def test_non_jacobi_table_detected():
    bad = LieAlgebraSpec("bad", 3, {(0, 1): {0: 1}, (1, 2): {1: 1}, (2, 0): {2: 1, 0: 1}})
    J = square_defect(bad)
    assert J is not None
    assert not ce_differential(ce_differential(CEElement(bad, {J: 1}))).is_zero()


elements = st.lists(st.tuples(st.lists(st.integers(0, 2), unique=True, max_size=3), st.integers(-3, 3)), max_size=4)


def _el(g, data):
    return CEElement(g, {tuple(J): c for J, c in data if c})


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([heisenberg(), sl2()]), elements, elements)
def test_differential_is_a_derivation(g, a, b):
    x, y = _el(g, a), _el(g, b)
    for p in range(4):
        xp = CEElement(g, {J: d for J, d in x.terms.items() if len(J) == p})
        lhs = ce_differential(xp.wedge(y))
        rhs = ce_differential(xp).wedge(y) + xp.wedge(ce_differential(y)).scale((-1) ** p)
        assert lhs == rhs


def test_actions_validate():
    g = sl2()
    act = ActionSpec.linear(g, SL2_STD, order=6)
    assert validate_action(act) == (True, None)
    # gl(1) acting on the line by x d/dx
    line = VariableSet.single("u", 1)
    a = ActionSpec(abelian(1), line, [VectorField(line, 6, [{(1,): Rational(1)}])])
    assert validate_action(a)[0]
    # trivial anchor
    z = ActionSpec(heisenberg(), line, [VectorField(line, 6, [{}]) for _ in range(3)])
    assert validate_action(z)[0]


def test_broken_action_has_witness():
    g = sl2()
    mats = [[[1, 0], [0, -1]], [[0, 1], [0, 0]], [[0, 0], [2, 0]]]
    ok, w = validate_action(ActionSpec.linear(g, mats, order=6))
    assert not ok and w is not None


def _random_based(g, base, order, rng):
    t = {}
    for _ in range(4):
        J = tuple(sorted(rng.sample(range(g.dim), rng.randint(0, 2))))
        e = tuple(rng.randint(0, 2) for _ in range(base.nvars))
        t.setdefault(J, {})[e] = Rational(rng.randint(-3, 3))
    return CEElement(g, t, base, order)


@pytest.mark.parametrize("seed", range(5))
def test_d_squared_zero_with_action(seed):
    g = sl2()
    act = ActionSpec.linear(g, SL2_STD, order=8)
    x = _random_based(g, act.base, 6, random.Random(seed))
    dd = ce_differential(ce_differential(x, act), act)
    assert dd.is_zero()


def test_action_differential_on_functions():
    # anchor terms: d f = sum_i a(e_i)(f) e^i
    g = sl2()
    act = ActionSpec.linear(g, SL2_STD, order=6)
    u1 = CEElement(g, {(): {(1, 0): 1}}, act.base, 5)
    d = ce_differential(u1, act)
    # a(h) = -(u1 d1 - u2 d2), a(e) = -u2 d1, a(f) = -u1 d2
    assert d == CEElement(g, {(0,): {(1, 0): -1}, (1,): {(0, 1): -1}}, act.base, 4)
