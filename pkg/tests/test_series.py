import pytest
from hypothesis import given, settings, strategies as st

from vanest_jets.linear import Rational
from vanest_jets.series import (ParseError, PolyForm, SeriesMap, TruncatedSeries, VariableSet, de_rham,
                                format_form, integrate_in_t, multiply, parse_form, pullback)

XY = VariableSet.single("x", 2)
X1 = VariableSet.single("x", 1)


def f(text, vars=XY, N=4):
    return parse_form(text, vars, N)


def forms(vars, N=4, max_terms=4):
    n = vars.nvars
    term = st.tuples(st.lists(st.integers(0, 2), min_size=n, max_size=n),
                     st.lists(st.integers(0, n - 1), max_size=2, unique=True).map(lambda s: tuple(sorted(s))),
                     st.integers(-3, 3))

    def build(ts):
        return PolyForm(vars, N, {(tuple(e), S): Rational(c) for e, S, c in ts if c and sum(e) <= N})
    return st.lists(term, max_size=max_terms).map(build)


def test_series_product_truncates():
    one = TruncatedSeries.constant(X1, 2)
    x = TruncatedSeries.variable(X1, 2, 0)
    assert (one + x) * (one - x) == one - x * x
    assert (x * x * x).is_zero()


def test_wedge_antisymmetry_and_expansion():
    assert f("dx1^dx2") == -f("dx2^dx1")
    assert multiply(f("x1 dx1"), f("x2 dx2")) == f("x1*x2 dx1^dx2")
    assert multiply(f("dx1"), f("dx1")).is_zero()


def test_de_rham_examples():
    assert de_rham(f("x1")) == f("dx1", N=3)
    assert de_rham(f("x1*x2")) == f("x2 dx1 + x1 dx2", N=3)
    assert de_rham(f("x1 dx2")) == f("dx1^dx2", N=3)


def test_pullback_examples():
    Y = VariableSet.single("y", 1)
    sq = SeriesMap(X1, Y, None, [{(2,): Rational(1)}])
    assert pullback(sq, parse_form("dy1", Y, 4)) == parse_form("2*x1 dx1", X1, 4)
    assert pullback(SeriesMap.identity(XY), f("x1^2 dx2")) == f("x1^2 dx2")
    Z = VariableSet.single("z", 1)
    add = SeriesMap(XY, Z, None, [{(1, 0): Rational(1), (0, 1): Rational(1)}])
    got = pullback(add, parse_form("z1 dz1", Z, 4))
    assert got == f("x1 dx1 + x1 dx2 + x2 dx1 + x2 dx2")


def test_integrate_in_t():
    T = VariableSet([("x", 1), ("t", 1)], weights=[1, 0])
    t = 1
    assert integrate_in_t(parse_form("x1^2", T, 4), t, X1).is_zero()
    assert integrate_in_t(parse_form("t1 dt1", T, 4), t, X1) == parse_form("1/2", X1, 4)
    # dt is moved to the front before integrating: t^2 dt^dx integrates to x/3 dx
    got = integrate_in_t(parse_form("x1*t1^2 dx1^dt1", T, 4), t, X1)
    assert got == parse_form("-1/3*x1 dx1", X1, 4)


def test_orders_do_not_mix():
    with pytest.raises(ValueError):
        f("x1", N=3) + f("x1", N=4)


def test_parse_roundtrip_and_errors():
    w = f("3/2*x1^2*x2 dx1^dx2 - x2 + 7")
    assert parse_form(format_form(w), XY, 4) == w
    with pytest.raises(ParseError):
        f("x3")
    with pytest.raises(ParseError):
        f("x1 +")


@settings(max_examples=50, deadline=None)
@given(forms(VariableSet.single("x", 3)))
def test_d_squared_is_zero(w):
    assert de_rham(de_rham(w)).is_zero()


@settings(max_examples=50, deadline=None)
@given(forms(XY), forms(XY))
def test_graded_commutativity(a, b):
    for p in (0, 1, 2):
        for q in (0, 1, 2):
            ap, bq = a.homogeneous(p), b.homogeneous(q)
            assert multiply(ap, bq) == multiply(bq, ap).scale((-1) ** (p * q))


@settings(max_examples=50, deadline=None)
@given(forms(XY), forms(XY))
def test_de_rham_is_a_derivation(a, b):
    for p in (0, 1, 2):
        ap = a.homogeneous(p)
        lhs = de_rham(multiply(ap, b))
        rhs = multiply(de_rham(ap), b.truncate(3)) + multiply(ap.truncate(3), de_rham(b)).scale((-1) ** p)
        assert lhs == rhs


def _poly_map(draw_coeffs, src, tgt):
    comps = []
    for j in range(tgt.nvars):
        comp = {}
        for e, c in draw_coeffs[j]:
            if c and sum(e) >= 1:
                comp[tuple(e)] = Rational(c)
        comps.append(comp)
    return SeriesMap(src, tgt, None, comps)


maps = st.lists(st.lists(st.tuples(st.lists(st.integers(0, 2), min_size=2, max_size=2), st.integers(-2, 2)),
                         max_size=3), min_size=2, max_size=2)


@settings(max_examples=40, deadline=None)
@given(maps, maps, forms(XY, N=3))
def test_pullback_is_functorial(m1, m2, w):
    U = VariableSet.single("u", 2)
    V = VariableSet.single("v", 2)
    g = _poly_map(m1, U, V)
    h = _poly_map(m2, V, XY)
    lhs = pullback(h.compose(g), w)
    rhs = pullback(g, pullback(h, w))
    M = min(lhs.order, rhs.order)
    assert lhs.truncate(M) == rhs.truncate(M)


@settings(max_examples=40, deadline=None)
@given(maps, forms(XY, N=3))
def test_pullback_commutes_with_d(m, w):
    U = VariableSet.single("u", 2)
    g = _poly_map(m, U, XY)
    lhs = pullback(g, de_rham(w))
    rhs = de_rham(pullback(g, w))
    M = min(lhs.order, rhs.order)
    assert lhs.truncate(M) == rhs.truncate(M)
