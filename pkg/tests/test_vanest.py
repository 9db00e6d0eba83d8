"""Groupoid cochains, the triple complex and the three routes to the Van Est map."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from vanest_jets.checks import (check_cochain_map, check_homotopy, check_normalization_needed, check_routes,
                                check_export)
from vanest_jets.lie import abelian, aff1, heisenberg, right_invariant_field, sl2
from vanest_jets.linear import Rational
from vanest_jets.series import PolyForm, VectorField, format_form, parse_form
from vanest_jets.vanest import (ASCochain, GroupoidCochain, PairGroupoidModel, TripleElement, TruncationError,
                                D_operator, alexander_spanier_ve, as_dproduct, as_vars, chart_for, cochain_d, cup,
                                d_prime, d_second, e_vars, homotopy_h, iota0, is_normalized, kappa_pullback,
                                random_cochain, reverse_map, simplicial_delta, ve_dproduct, ve_explicit, ve_zigzag)
from vanest_jets.weil import WeilElement, contract, format_weil, parse_weil

SHIPPED = [abelian(2), heisenberg(), sl2(), aff1()]
A2 = abelian(2)


def G(alg, level, text, order=5):
    return GroupoidCochain.parse(alg, level, text, order)


def _triple(alg, r, text, order=4):
    return TripleElement(alg, r, parse_weil(text, alg, e_vars(alg.dim, r), order))


# ---------------------------------------------------------------------------
# groupoid cochains


def test_simplicial_delta_example():
    # delta(x^2)(a, b) = b^2 - (a + b)^2 + a^2 on the additive group
    assert simplicial_delta(G(A2, 1, "g1_1^2", 4)) == G(A2, 2, "-2*g1_1*g2_1", 4)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(SHIPPED), st.integers(0, 2), st.integers(0, 10 ** 6))
def test_delta_and_d_square_to_zero(alg, p, seed):
    rng = random.Random(seed)
    phi = random_cochain(alg, p, rng.randint(0, 1), 4, rng)
    assert simplicial_delta(simplicial_delta(phi)).is_zero()
    assert cochain_d(cochain_d(phi)).is_zero()


def test_cochain_d_example():
    got = cochain_d(G(A2, 1, "g1_1*g1_2", 4))
    assert got == G(A2, 1, "-g1_2 dg1_1 - g1_1 dg1_2", 3)


def test_cup_example():
    assert cup(G(A2, 1, "g1_1", 4), G(A2, 1, "g1_2", 4)) == G(A2, 2, "g1_1*g2_2", 4)


def test_normalization():
    assert is_normalized(G(A2, 1, "g1_1"))
    assert not is_normalized(G(A2, 1, "1"))
    assert not is_normalized(G(A2, 2, "g1_1"))
    assert is_normalized(G(A2, 2, "g1_1*g2_2"))


@pytest.mark.parametrize("alg", [heisenberg(), sl2()], ids=lambda a: a.name)
def test_delta_preserves_normalized(alg):
    rng = random.Random(5)
    for _ in range(10):
        phi = random_cochain(alg, rng.randint(1, 2), 0, 4, rng, normalized=True)
        assert is_normalized(phi) and is_normalized(simplicial_delta(phi))


# ---------------------------------------------------------------------------
# the triple complex


def test_kappa_pullback_examples():
    assert kappa_pullback(G(A2, 1, "g1_1", 4)) == _triple(A2, 1, "a0_1 - a1_1")
    h = heisenberg()
    got = kappa_pullback(G(h, 1, "g1_3", 4))
    assert got == _triple(h, 1, "a0_3 - a1_3 - 1/2*a0_1*a1_2 + 1/2*a0_2*a1_1")


def test_triple_operators_on_a_small_element():
    x = kappa_pullback(G(A2, 1, "g1_1", 4))
    assert homotopy_h(x) == _triple(A2, 0, "-a0_1")
    assert d_prime(x).is_zero()
    assert d_second(x) == _triple(A2, 1, "-da0_1 + da1_1", 3)
    y = homotopy_h(x)
    assert D_operator(y) == parse_weil("e1", A2)
    assert iota0(y).is_zero()
    assert homotopy_h(_triple(A2, 1, "a0_1")) == _triple(A2, 0, "-a0_1")


def test_D_on_coordinates():
    for alg in SHIPPED:
        for j in range(alg.dim):
            x = _triple(alg, 0, f"a0_{j + 1}")
            assert D_operator(x) == WeilElement.e(alg, j).scale(-1)
    with pytest.raises(ValueError):
        D_operator(_triple(A2, 1, "a0_1"))


def test_homotopy_suite_small():
    for alg in (A2, heisenberg()):
        rep = check_homotopy(alg, seed=3, count=10, order=5)
        assert rep.ok, rep.lines()


# ---------------------------------------------------------------------------
# the Van Est map


@pytest.mark.parametrize("route", [ve_zigzag, ve_dproduct, ve_explicit], ids=lambda f: f.__name__)
def test_ve_examples(route):
    assert format_weil(route(G(A2, 2, "g1_1*g2_2"))) == "e1^e2"
    assert format_weil(route(G(heisenberg(), 1, "g1_3"))) == "e3"
    assert format_weil(route(G(A2, 0, "5"))) == "5"
    assert format_weil(route(G(A2, 1, "dg1_1"))) == "-eb1"


def test_ve_needs_enough_jets():
    with pytest.raises(TruncationError):
        ve_zigzag(G(A2, 2, "g1_1", 1))


def test_pruning_does_not_change_the_result():
    rng = random.Random(11)
    for alg in (heisenberg(), sl2()):
        for _ in range(3):
            phi = random_cochain(alg, 2, 1, 5, rng)
            assert ve_zigzag(phi) == ve_zigzag(phi, prune=False)


@pytest.mark.parametrize("alg", SHIPPED, ids=lambda a: a.name)
def test_routes_agree_small(alg):
    rep = check_routes(alg, seed=2, count=8, pmax=2)
    assert rep.ok, rep.lines()


@pytest.mark.parametrize("alg", [A2, heisenberg(), aff1()], ids=lambda a: a.name)
def test_cochain_map_small(alg):
    rep = check_cochain_map(alg, seed=2, count=8, pmax=2)
    assert rep.ok, rep.lines()


def test_non_normalized_counterexample():
    rep = check_normalization_needed()
    assert rep.ok, rep.lines()


def test_reverse_map():
    h = heisenberg()
    assert reverse_map(WeilElement.e(h, 2), 5) == G(h, 1, "g1_3")
    assert reverse_map(WeilElement.e(h, 0) * WeilElement.e(h, 1), 5) == G(h, 2, "1/2*g1_1*g2_2 - 1/2*g1_2*g2_1")
    assert reverse_map(WeilElement.eb(h, 0), 5) == G(h, 1, "-dg1_1")
    for w in ["e3", "e1^e2", "eb1", "e1^e2^e3"]:
        alpha = parse_weil(w, h)
        assert ve_zigzag(reverse_map(alpha, 6)) == alpha


# ---------------------------------------------------------------------------
# contractor identities for D on pure level-0 forms


@pytest.mark.parametrize("alg", [A2, heisenberg(), sl2()], ids=lambda a: a.name)
def test_contractor_identities(alg):
    n, N = alg.dim, 4
    ch = chart_for(alg, N + 1).truncated(N + 1)
    vs = e_vars(n, 0)
    rng = random.Random(1)
    for _ in range(8):
        q = rng.randint(0, 2)
        terms = {}
        for _ in range(3):
            e = [0] * n
            for _ in range(rng.randint(0, 3)):
                e[rng.randrange(n)] += 1
            S = tuple(sorted(rng.sample(range(n), q)))
            terms[(tuple(e), S)] = Rational(rng.randint(-3, 3))
        phi = PolyForm(vs, N, {k: v for k, v in terms.items() if v})
        Dphi = D_operator(TripleElement(alg, 0, WeilElement.from_form(alg, phi)))
        for i in range(n):
            XR = right_invariant_field(ch, i)
            XR = VectorField(vs, XR.order, XR.components)
            at_unit = lambda f: WeilElement.one(alg, c=f.value_at_zero())
            assert contract("iK", i, Dphi) == at_unit(phi.lie_derivative(XR)).scale(-1)
            assert contract("iS", i, Dphi) == at_unit(phi.contract(XR))


# ---------------------------------------------------------------------------
# pair groupoid and Alexander-Spanier cochains


def test_pair_groupoid_D():
    m = PairGroupoidModel(2, 4)
    w = WeilElement(m.g, {((), (), (1, 0, 0, 1), ()): 1}, m.E0, 4)
    assert format_weil(m.D(w)) == "-x2*e1"


@pytest.mark.parametrize("m,level,text,expect", [
    (1, 0, "u0_1", "x1"),
    (1, 1, "u0_1*u1_1", "-x1 dx1"),
    (2, 2, "u0_1*u1_1*u2_2", "x1 dx1^dx2"),
    (2, 1, "u0_2*u1_1^2", "-2*x1*x2 dx1"),
])
def test_alexander_spanier_examples(m, level, text, expect):
    u = ASCochain.parse(m, level, text, 5)
    got = alexander_spanier_ve(u)
    assert got == parse_form(expect, got.vars, got.order)
    assert as_dproduct(u) == got


def test_as_vars():
    assert as_vars(2, 1).nvars == 4


def test_export_small():
    rep = check_export(abelian(1), N=2, samples=20)
    assert rep.ok, rep.lines()
