"""Lie algebras, the BCH chart and invariant fields.

The BCH series is compared against an independent oracle: log(exp X exp Y)
computed in the free associative algebra on X, Y, turned into a Lie
polynomial by the Dynkin-Specht-Wever map and evaluated on the structure
constants.
"""

import json
from fractions import Fraction
from itertools import product
from math import factorial

import pytest

from vanest_jets.lie import (BUILTINS, GroupChart, JacobiError, LieAlgebraSpec, abelian, aff1, bch, bch_terms,
                             builtin, embed_field, heisenberg, left_invariant_field, right_invariant_field,
                             sharp_field, sl2, validate_jacobi)
from vanest_jets.linear import Rational
from vanest_jets.series import VariableSet
from vanest_jets.vanest import b_vars, chart_for, e_vars, kappa_related


# ---------------------------------------------------------------------------
# oracle


def _wmul(a, b, N):
    out = {}
    for u, x in a.items():
        for v, y in b.items():
            if len(u) + len(v) <= N:
                out[u + v] = out.get(u + v, 0) + x * y
    return {k: v for k, v in out.items() if v}


def _wexp(letter, N):
    out = {(): Fraction(1)}
    for k in range(1, N + 1):
        out[(letter,) * k] = Fraction(1, factorial(k))
    return out


def dynkin_log(N):
    """log(exp X exp Y) up to word length N, as {word: coeff}."""
    prod = _wmul(_wexp("X", N), _wexp("Y", N), N)
    Z = {w: c for w, c in prod.items() if w}
    out, power = {}, {(): Fraction(1)}
    for k in range(1, N + 1):
        power = _wmul(power, Z, N)
        for w, c in power.items():
            out[w] = out.get(w, 0) + Fraction((-1) ** (k + 1), k) * c
    return {w: c for w, c in out.items() if c}


def _pmul(a, b, N):
    out = {}
    for e, x in a.items():
        for f, y in b.items():
            g = tuple(i + j for i, j in zip(e, f))
            if sum(g) <= N:
                out[g] = out.get(g, 0) + x * y
    return out


def oracle_bch(alg, N):
    """Coordinates of BCH(x, y) via the Dynkin-Specht-Wever projection."""
    n = alg.dim
    nv = 2 * n
    unit = lambda i: tuple(1 if j == i else 0 for j in range(nv))
    vec = {"X": [{unit(i): Fraction(1)} for i in range(n)], "Y": [{unit(n + i): Fraction(1)} for i in range(n)]}

    def br(A, B):
        out = [dict() for _ in range(n)]
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    c = alg.c[k][i][j]
                    if c and A[i] and B[j]:
                        for e, v in _pmul(A[i], B[j], N).items():
                            out[k][e] = out[k].get(e, 0) + Fraction(c) * v
        return out

    total = [dict() for _ in range(n)]
    for w, c in dynkin_log(N).items():
        val = vec[w[-1]]
        for letter in reversed(w[:-1]):
            val = br(vec[letter], val)
        for k in range(n):
            for e, v in val[k].items():
                total[k][e] = total[k].get(e, 0) + c * v / len(w)
    return [{e: v for e, v in comp.items() if v} for comp in total]


@pytest.mark.parametrize("alg", [heisenberg(), sl2(), aff1()], ids=lambda a: a.name)
@pytest.mark.parametrize("N", [2, 3, 4, 5])
def test_bch_matches_dynkin_oracle(alg, N):
    _, z = bch_terms(alg, N)
    got = [{e: Fraction(c) for e, c in comp.items()} for comp in z]
    assert got == oracle_bch(alg, N)


def test_bch_order_two_term():
    g = heisenberg()
    ch = bch(g, 2)
    V = ch.pair
    # x + y + 1/2 [x, y]; the e3 component is x3 + y3 + 1/2 (x1 y2 - x2 y1)
    third = ch.multiplication.components[2]
    expect = {V.unit(2): 1, V.unit(5): 1}
    expect[tuple(1 if j in (0, 4) else 0 for j in range(6))] = Rational(1, 2)
    expect[tuple(1 if j in (1, 3) else 0 for j in range(6))] = Rational(-1, 2)
    assert third == expect


def test_abelian_multiplication_is_addition():
    ch = bch(abelian(3), 5)
    for k, comp in enumerate(ch.multiplication.components):
        assert comp == {ch.pair.unit(k): 1, ch.pair.unit(3 + k): 1}


# ---------------------------------------------------------------------------
# group-law identities


@pytest.mark.parametrize("alg", [heisenberg(), sl2(), aff1()], ids=lambda a: a.name)
def test_unit_inverse_and_associativity(alg):
    N = 5
    ch = bch(alg, N)
    n = alg.dim
    three = VariableSet([("x", n), ("y", n), ("z", n)])
    x, y, z = (ch.block(three, b) for b in range(3))
    zero = [dict() for _ in range(n)]
    assert ch.multiply(x, zero, three) == x
    assert ch.multiply(zero, y, three) == y
    assert all(not c for c in ch.multiply(x, ch.block(three, 0, -1), three))
    lhs = ch.multiply(ch.multiply(x, y, three), z, three)
    rhs = ch.multiply(x, ch.multiply(y, z, three), three)
    assert lhs == rhs


def test_chart_refuses_non_jacobi_table():
    bad = LieAlgebraSpec("bad", 3, {(0, 1): {0: 1}, (1, 2): {1: 1}, (2, 0): {2: 1, 0: 1}})
    with pytest.raises(JacobiError):
        GroupChart(bad, 3)


# ---------------------------------------------------------------------------
# Jacobi validation and JSON


def test_validate_jacobi():
    assert validate_jacobi(abelian(3)) == (True, None)
    assert validate_jacobi(heisenberg())[0]
    # c^1_12 = c^2_23 = c^3_31 = 1 plus a broken extra constant
    bad = LieAlgebraSpec("bad", 3, {(0, 1): {0: 1}, (1, 2): {1: 1}, (2, 0): {2: 1, 0: 1}})
    ok, w = validate_jacobi(bad)
    assert not ok and sorted(w) == [0, 1, 2]


def test_json_roundtrip_and_rejection():
    for name in BUILTINS:
        g = builtin(name)
        assert LieAlgebraSpec.from_json(json.loads(json.dumps(g.to_json()))) == g
    with pytest.raises(ValueError):
        LieAlgebraSpec.from_json({"name": "x", "dim": 1, "colour": 3})
    with pytest.raises(ValueError):
        LieAlgebraSpec.from_json({"name": "x", "dim": 2, "brackets": [{"i": 1, "j": 3, "terms": []}]})


# ---------------------------------------------------------------------------
# invariant fields


def test_invariant_fields_heisenberg():
    ch = bch(heisenberg(), 4)
    L = left_invariant_field(ch, 0)
    R = right_invariant_field(ch, 0)
    x2 = ch.point.unit(1)
    assert L.components == [{ch.point.zero_exps(): 1}, {}, {x2: Rational(-1, 2)}]
    assert R.components == [{ch.point.zero_exps(): 1}, {}, {x2: Rational(1, 2)}]


@pytest.mark.parametrize("alg", [abelian(2), heisenberg(), sl2(), aff1()], ids=lambda a: a.name)
def test_invariant_field_at_unit(alg):
    ch = bch(alg, 4)
    for k in range(alg.dim):
        for F in (left_invariant_field(ch, k), right_invariant_field(ch, k)):
            at0 = [c.get(ch.point.zero_exps(), 0) for c in F.components]
            assert at0 == alg.basis(k)


def test_left_fields_represent_the_bracket_sl2():
    g = sl2()
    ch = bch(g, 6)
    for a, b in product(range(3), repeat=2):
        lhs = left_invariant_field(ch, a).bracket(left_invariant_field(ch, b))
        rhs = left_invariant_field(ch, g.bracket(g.basis(a), g.basis(b))).truncate(lhs.order)
        assert lhs == rhs
        lr = left_invariant_field(ch, a).bracket(right_invariant_field(ch, b))
        assert lr.is_zero()


def test_sharp_fields():
    ch = bch(abelian(2), 3)
    V = b_vars(2, 2)
    f = sharp_field(ch, 2, 1, 0, V)
    one = V.zero_exps()
    assert f.components == [{one: -1}, {}, {one: 1}, {}]
    assert sharp_field(ch, 1, 1, 0).components == [{ch.point.zero_exps(): -1}, {}]
    with pytest.raises(ValueError):
        sharp_field(ch, 2, 3, 0)


@pytest.mark.parametrize("alg", [heisenberg(), sl2()], ids=lambda a: a.name)
def test_distant_sharp_fields_commute(alg):
    ch = bch(alg, 5)
    V = b_vars(alg.dim, 3)
    for a, b in product(range(alg.dim), repeat=2):
        assert sharp_field(ch, 3, 1, a, V).bracket(sharp_field(ch, 3, 3, b, V)).is_zero()


@pytest.mark.parametrize("alg", [heisenberg(), sl2()], ids=lambda a: a.name)
@pytest.mark.parametrize("p", [1, 2, 3])
def test_kappa_relatedness(alg, p):
    # the generator of a_i -> exp(tX) a_i on E_p is kappa-related to the i-th sharp field
    ch = chart_for(alg, 5)
    for i in range(1, p + 1):
        for k in range(alg.dim):
            V = embed_field(right_invariant_field(ch, k), e_vars(alg.dim, p), i)
            W = sharp_field(ch, p, i, k, b_vars(alg.dim, p))
            assert kappa_related(V, W, p, ch)
            assert not kappa_related(V.scale(-1), W, p, ch)
