"""Van Est map for local Lie groups in exponential coordinates.

A cochain of level p is a polynomial form on ``B_p = G^p`` (blocks ``g1..gp``).
The action groupoid side uses ``E_r = G^{r+1}`` (blocks ``a0..ar``) with the
diagonal right action, so ``W(T_F E_r) = Omega(E_r) (x) W(g)`` with the frame
of left-invariant fields.  The projection ``kappa_p : E_p -> B_p`` sends
``(a0, .., ap)`` to ``(a0 a1^-1, .., a_{p-1} ap^-1)``.

Three ways of computing VE are provided (zigzag through the triple complex,
the product formula in ``D``, and the explicit evaluation formula), together
with the cup product, a reverse map ``W(g) -> Omega(B_pG)`` and the
Alexander-Spanier special case of the pair groupoid.

VE on level p depends only on the p-jet of the cochain (every step of each
route lowers the polynomial degree by at most one), so by default the routes
truncate to order p before working; pass ``prune=False`` to keep the full
order of the input.
"""
from __future__ import annotations

import random
from functools import lru_cache
from itertools import combinations, combinations_with_replacement, permutations
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple

from .linear import Rational
from .cealg import ActionSpec, wedge_merge
from .lie import (GroupChart, LieAlgebraSpec, abelian, diagonal_left_field, gadd, gscale, sharp_field)
from .series import (ONE, ZERO, PolyForm, SeriesMap, VariableSet, VectorField, _clean, _perm_sign,
                     _Substituter, de_rham, format_form, merge_sign, multiply as form_multiply, parse_form,
                     poly_mul, poly_truncate, pullback)
from .weil import WeilElement, ce_weil_differential, koszul_differential, monomial_basis, multiply

Assign = Tuple[Optional[int], ...]


class TruncationError(ValueError):
    """The input is not known to high enough order for the requested result."""


# ---------------------------------------------------------------------------
# charts and maps, cached per algebra

_CHARTS: Dict[LieAlgebraSpec, GroupChart] = {}


def chart_for(algebra: LieAlgebraSpec, order: int) -> GroupChart:
    """A chart of at least ``order``; the largest one built so far is reused."""
    order = max(order, 1)
    big = _CHARTS.get(algebra)
    if big is None or big.order < order:
        big = GroupChart(algebra, order)
        _CHARTS[algebra] = big
    return big.truncated(order)


def b_vars(n: int, p: int) -> VariableSet:
    return VariableSet.power("g", p, n, start=1)


def e_vars(n: int, r: int) -> VariableSet:
    return VariableSet.power("a", r + 1, n, start=0)


def _block_assign(n: int, blocks: Sequence[Optional[int]]) -> Assign:
    """Coordinate assignment: target block b copies source block blocks[b] (None = zero)."""
    out: List[Optional[int]] = []
    for s in blocks:
        out.extend([None] * n if s is None else [s * n + k for k in range(n)])
    return tuple(out)


def _coord_puller(nsrc: int, assign: Assign):
    """Key map for pullback along a coordinate map: (exps, dx) -> (sign, exps', dx') or None."""
    dead = [j for j, a in enumerate(assign) if a is None]
    live = [(j, a) for j, a in enumerate(assign) if a is not None]

    def pull(e, S):
        if any(e[j] for j in dead):
            return None
        S2 = []
        for s in S:
            a = assign[s]
            if a is None:
                return None
            S2.append(a)
        sg = _perm_sign(S2) if len(S2) > 1 else 1
        if not sg:
            return None
        ne = [0] * nsrc
        for j, a in live:
            if e[j]:
                ne[a] += e[j]
        return sg, tuple(ne), tuple(sorted(S2))

    return pull


def pull_coordinates(w, source: VariableSet, assign: Assign):
    """Pullback along a coordinate map (projections and zero insertions) for forms or Weil elements."""
    pull = _coord_puller(source.nvars, assign)
    out: Dict = {}
    get = out.get
    if isinstance(w, PolyForm):
        for (e, S), c in w.terms.items():
            r = pull(e, S)
            if r:
                k = (r[1], r[2])
                out[k] = get(k, ZERO) + r[0] * c
        return PolyForm(source, w.order, _clean(out), _trusted=True)
    for (I, J, e, S), c in w.terms.items():
        r = pull(e, S)
        if r:
            k = (I, J, r[1], r[2])
            out[k] = get(k, ZERO) + r[0] * c
    return WeilElement(w.algebra, _clean(out), source, w.order, _trusted=True)


def pull_weil(w: WeilElement, f: SeriesMap) -> WeilElement:
    """Pull the base forms of a Weil element back along a polynomial map."""
    if w.base != f.target:
        raise ValueError("element does not live on the map's target")
    N = f.precision_for(w.order)
    src = f.source
    sub = _Substituter(f, N)
    deg = src.degree_fn()
    dcache: Dict[Tuple[int, ...], Dict] = {(): {(): {src.zero_exps(): ONE}}}
    out: Dict = {}
    for (I, J, e, S), c in w.terms.items():
        if S not in dcache:
            prod = PolyForm.constant(src, N)
            for j in S:
                prod = form_multiply(prod, PolyForm(src, N, sub.differential(j), _trusted=True))
            dcache[S] = prod.by_dx()
        fe = sub.monomial(e)
        for T, wc in dcache[S].items():
            for ne, v in poly_mul(fe, wc, N, deg).items():
                k = (I, J, ne, T)
                out[k] = out.get(k, ZERO) + c * v
    return WeilElement(w.algebra, _clean(out), src, N, _trusted=True)


class _Maps:
    """Face, degeneracy, projection and homotopy maps for one chart."""

    def __init__(self, chart: GroupChart):
        self.chart = chart
        self.n = chart.dim
        self.cache: Dict = {}

    def _get(self, key, build):
        v = self.cache.get(key)
        if v is None:
            v = build()
            self.cache[key] = v
        return v

    def face_b(self, p: int, i: int):
        """d_i : B_{p+1} -> B_p; an assignment for the outer faces, a SeriesMap for the middle ones."""
        def build():
            n = self.n
            if i == 0:
                return _block_assign(n, range(1, p + 1))
            if i == p + 1:
                return _block_assign(n, range(p))
            src = b_vars(n, p + 1)
            c = self.chart
            prod = c.multiply(c.block(src, i - 1), c.block(src, i), src)
            comps = []
            for b in range(p):
                if b < i - 1:
                    comps.extend(c.block(src, b))
                elif b == i - 1:
                    comps.extend(prod)
                else:
                    comps.extend(c.block(src, b + 1))
            return SeriesMap(src, b_vars(n, p), c.order, comps)
        return self._get(("fb", p, i), build)

    def kappa(self, p: int) -> SeriesMap:
        def build():
            c = self.chart
            src = e_vars(self.n, p)
            comps = []
            for b in range(p):
                comps.extend(c.multiply(c.block(src, b), c.block(src, b + 1, -1), src))
            return SeriesMap(src, b_vars(self.n, p), c.order, comps)
        return self._get(("kappa", p), build)

    def j_section(self, p: int) -> SeriesMap:
        """j_p(g) = (0, g1^-1, (g1 g2)^-1, ..): a section of kappa_p."""
        def build():
            c = self.chart
            src = b_vars(self.n, p)
            comps = [dict() for _ in range(self.n)]
            acc = None
            for b in range(p):
                blk = c.block(src, b)
                acc = blk if acc is None else c.multiply(acc, blk, src)
                comps.extend(gscale(acc, -ONE))
            return SeriesMap(src, e_vars(self.n, p), c.order, comps)
        return self._get(("j", p), build)

    def action(self, r: int) -> ActionSpec:
        def build():
            vs = e_vars(self.n, r)
            return ActionSpec(self.chart.algebra, vs,
                              [diagonal_left_field(self.chart, k, vs) for k in range(self.n)])
        return self._get(("action", r), build)


def _maps(chart: GroupChart) -> _Maps:
    m = chart.cache.get("maps")
    if m is None:
        m = _Maps(chart)
        chart.cache["maps"] = m
    return m


def _face_e(n: int, r: int, i: int) -> Assign:
    """d_i : E_{r+1} -> E_r drops a_i."""
    return _block_assign(n, [b if b < i else b + 1 for b in range(r + 1)])


def _h_assign(n: int, r: int, i: int) -> Assign:
    """h_{r-1,i} : E_{r-1} -> E_r, (a0..a_{r-1}) -> (a0..ai, 0, .., 0)."""
    return _block_assign(n, [b if b <= i else None for b in range(r + 1)])


def _pull_any(w, f, source: VariableSet):
    if isinstance(f, tuple):
        return pull_coordinates(w, source, f)
    return pull_weil(w, f) if isinstance(w, WeilElement) else pullback(f, w)


# ---------------------------------------------------------------------------
# cochains on the nerve


class GroupoidCochain:
    """A polynomial form on B_p = G^p, truncated at ``form.order``."""

    __slots__ = ("algebra", "level", "form")

    def __init__(self, algebra: LieAlgebraSpec, level: int, form: PolyForm):
        if level < 0:
            raise ValueError("level must be non-negative")
        if form.vars != b_vars(algebra.dim, level):
            raise ValueError("form does not live on G^p")
        self.algebra = algebra
        self.level = level
        self.form = form

    @classmethod
    def parse(cls, algebra: LieAlgebraSpec, level: int, text: str, order: int) -> "GroupoidCochain":
        return cls(algebra, level, parse_form(text, b_vars(algebra.dim, level), order))

    @classmethod
    def zero(cls, algebra: LieAlgebraSpec, level: int, order: int) -> "GroupoidCochain":
        return cls(algebra, level, PolyForm.zero(b_vars(algebra.dim, level), order))

    @property
    def order(self) -> int:
        return self.form.order

    @property
    def vars(self) -> VariableSet:
        return self.form.vars

    def form_degrees(self) -> set:
        return self.form.form_degrees()

    def _like(self, form: PolyForm) -> "GroupoidCochain":
        return GroupoidCochain(self.algebra, self.level, form)

    def __add__(self, other: "GroupoidCochain") -> "GroupoidCochain":
        if self.algebra != other.algebra or self.level != other.level:
            raise ValueError("cochains of different algebra or level")
        N = min(self.order, other.order)
        return self._like(self.form.truncate(N) + other.form.truncate(N))

    def __sub__(self, other: "GroupoidCochain") -> "GroupoidCochain":
        return self + other.scale(-1)

    def scale(self, s) -> "GroupoidCochain":
        return self._like(self.form.scale(s))

    def truncate(self, N: int) -> "GroupoidCochain":
        return self._like(self.form.truncate(min(N, self.order)))

    def __eq__(self, other) -> bool:
        return (isinstance(other, GroupoidCochain) and self.algebra == other.algebra
                and self.level == other.level and self.form == other.form)

    def is_zero(self) -> bool:
        return self.form.is_zero()

    def __str__(self) -> str:
        return format_form(self.form)

    def __repr__(self) -> str:
        return f"GroupoidCochain(p={self.level}, {format_form(self.form)}, N={self.order})"


def random_cochain(algebra: LieAlgebraSpec, p: int, q: int, order: int, rng: random.Random, terms: int = 4,
                   normalized: bool = False, coeff_range: int = 3, degree: Optional[int] = None) -> GroupoidCochain:
    """Random homogeneous q-form on G^p with small integer coefficients.

    Coefficient polynomials have degree at most ``degree`` (default ``order``).

    With ``normalized`` every term involves every block (an exponent or a dx),
    which is exactly the normalization condition in these coordinates.
    """
    n = algebra.dim
    vs = b_vars(n, p)
    out: Dict = {}
    if q > n * p:
        return GroupoidCochain.zero(algebra, p, order)
    for _ in range(terms * 4):
        if len(out) >= terms:
            break
        S = tuple(sorted(rng.sample(range(vs.nvars), q)))
        e = [0] * vs.nvars
        top = order if degree is None else min(order, degree)
        budget = rng.randint(0, top)
        if normalized:
            for b in range(p):
                blk = range(b * n, (b + 1) * n)
                if not any(s in blk for s in S):
                    e[rng.choice(blk)] += 1
            if sum(e) > top:
                continue
            budget = max(0, budget - sum(e))
        for _ in range(budget if vs.nvars else 0):
            e[rng.randrange(vs.nvars)] += 1
        if sum(e) > top:
            continue
        c = rng.randint(-coeff_range, coeff_range)
        if c:
            out[(tuple(e), S)] = Rational(c)
    return GroupoidCochain(algebra, p, PolyForm(vs, order, out))


def simplicial_delta(phi: GroupoidCochain) -> GroupoidCochain:
    """delta = sum_i (-1)^i d_i^*, from level p to p + 1."""
    p, n = phi.level, phi.algebra.dim
    maps = _maps(chart_for(phi.algebra, phi.order + 1))
    src = b_vars(n, p + 1)
    acc = None
    for i in range(p + 2):
        t = _pull_any(phi.form, maps.face_b(p, i), src)
        t = t.scale(-1) if i & 1 else t
        acc = t if acc is None else (acc.truncate(min(acc.order, t.order)) + t.truncate(min(acc.order, t.order)))
    return GroupoidCochain(phi.algebra, p + 1, acc)


def cochain_d(phi: GroupoidCochain) -> GroupoidCochain:
    """Vertical differential (-1)^p d on Omega(G^p)."""
    f = de_rham(phi.form)
    return phi._like(f.scale(-1) if phi.level & 1 else f)


def degeneracy_assign(n: int, p: int, i: int) -> Assign:
    """s_i : B_{p-1} -> B_p inserts the unit as block i (0-based, 0 <= i < p)."""
    return _block_assign(n, [b if b < i else (None if b == i else b - 1) for b in range(p)])


def is_normalized(phi: GroupoidCochain) -> bool:
    """True when every degeneracy pulls phi back to zero."""
    n, p = phi.algebra.dim, phi.level
    src = b_vars(n, p - 1) if p else None
    for i in range(p):
        if not pull_coordinates(phi.form, src, degeneracy_assign(n, p, i)).is_zero():
            return False
    return True


def normalize_part(phi: GroupoidCochain) -> GroupoidCochain:
    """Drop the terms that miss some block (the normalized projection in these coordinates)."""
    n, p = phi.algebra.dim, phi.level
    keep = {}
    for (e, S), c in phi.form.terms.items():
        if all(any(e[b * n + k] for k in range(n)) or any(b * n <= s < (b + 1) * n for s in S)
               for b in range(p)):
            keep[(e, S)] = c
    return phi._like(PolyForm(phi.vars, phi.order, keep, _trusted=True))


def cup(phi: GroupoidCochain, psi: GroupoidCochain) -> GroupoidCochain:
    """(-1)^{p' q} pr^* phi ^ pr'^* psi on G^{p+p'} (front and back faces).

    Both factors must be homogeneous in form degree; ``q`` is the degree of phi.
    """
    if phi.algebra != psi.algebra:
        raise ValueError("cochains over different algebras")
    n = phi.algebra.dim
    p, pp = phi.level, psi.level
    degs = phi.form_degrees()
    if len(degs) > 1:
        raise ValueError("cup needs a form-homogeneous first factor")
    q = degs.pop() if degs else 0
    N = min(phi.order, psi.order)
    src = b_vars(n, p + pp)
    a = pull_coordinates(phi.form.truncate(N), src, _block_assign(n, range(p)))
    b = pull_coordinates(psi.form.truncate(N), src, _block_assign(n, range(p, p + pp)))
    r = form_multiply(a, b)
    if (pp * q) & 1:
        r = r.scale(-1)
    return GroupoidCochain(phi.algebra, p + pp, r)


# ---------------------------------------------------------------------------
# the triple complex W(T_F E_r)


class TripleElement:
    """An element of W(T_F E_r) = Omega(E_r) (x) W(g)."""

    __slots__ = ("algebra", "level", "value")

    def __init__(self, algebra: LieAlgebraSpec, level: int, value: WeilElement):
        if value.base != e_vars(algebra.dim, level):
            raise ValueError("value does not live on E_r")
        self.algebra = algebra
        self.level = level
        self.value = value

    @classmethod
    def zero(cls, algebra: LieAlgebraSpec, level: int, order: int) -> "TripleElement":
        return cls(algebra, level, WeilElement.zero(algebra, e_vars(algebra.dim, level), order))

    @classmethod
    def from_pure(cls, alpha: WeilElement, order: int) -> "TripleElement":
        """pi_0^* alpha on E_0 (constant coefficients)."""
        if alpha.base.nvars:
            raise ValueError("expected an element of W(g)")
        g = alpha.algebra
        vs = e_vars(g.dim, 0)
        z = vs.zero_exps()
        return cls(g, 0, WeilElement(g, {(I, J, z, ()): c for (I, J, _, _), c in alpha.terms.items()}, vs, order,
                                     _trusted=True))

    @property
    def order(self) -> int:
        return self.value.order

    def _like(self, v: WeilElement, level: Optional[int] = None) -> "TripleElement":
        return TripleElement(self.algebra, self.level if level is None else level, v)

    def __add__(self, other: "TripleElement") -> "TripleElement":
        if self.level != other.level:
            raise ValueError("elements of different level")
        return self._like(self.value + other.value)

    def __sub__(self, other: "TripleElement") -> "TripleElement":
        return self + other.scale(-1)

    def scale(self, s) -> "TripleElement":
        return self._like(self.value.scale(s))

    def truncate(self, N: int) -> "TripleElement":
        return self._like(self.value.truncate(min(N, self.order)))

    def __eq__(self, other) -> bool:
        return isinstance(other, TripleElement) and self.level == other.level and self.value == other.value

    def is_zero(self) -> bool:
        return self.value.is_zero()

    def __repr__(self) -> str:
        return f"TripleElement(r={self.level}, {self.value})"


def _maps_for(algebra: LieAlgebraSpec, order: int) -> _Maps:
    return _maps(chart_for(algebra, order + 1))


def kappa_pullback(phi: GroupoidCochain) -> TripleElement:
    """kappa_p^* phi as an element of W^{0,*}(T_F E_p)."""
    maps = _maps_for(phi.algebra, phi.order)
    f = pullback(maps.kappa(phi.level), phi.form)
    return TripleElement(phi.algebra, phi.level, WeilElement.from_form(phi.algebra, f))


def d_prime(x: TripleElement) -> TripleElement:
    """d' = (-1)^r d_CE on level r."""
    act = _maps_for(x.algebra, x.order).action(x.level)
    v = ce_weil_differential(x.value, act)
    return x._like(v.scale(-1) if x.level & 1 else v)


def d_second(x: TripleElement) -> TripleElement:
    """d'' = (-1)^r d_K on level r."""
    v = koszul_differential(x.value)
    return x._like(v.scale(-1) if x.level & 1 else v)


def delta_e(x: TripleElement) -> TripleElement:
    """Simplicial differential sum_i (-1)^i d_i^* from level r to r + 1."""
    n, r = x.algebra.dim, x.level
    src = e_vars(n, r + 1)
    acc = None
    for i in range(r + 2):
        t = pull_coordinates(x.value, src, _face_e(n, r, i))
        t = t.scale(-1) if i & 1 else t
        acc = t if acc is None else acc + t
    return x._like(acc, r + 1)


def homotopy_h(x: TripleElement) -> TripleElement:
    """h = sum_{i<r} (-1)^{i+1} h_{r-1,i}^* from level r to r - 1 (identity on W(g))."""
    n, r = x.algebra.dim, x.level
    if r == 0:
        raise ValueError("h is not defined on level 0")
    src = e_vars(n, r - 1)
    acc = None
    for i in range(r):
        t = pull_coordinates(x.value, src, _h_assign(n, r, i))
        t = t if i & 1 else t.scale(-1)
        acc = t if acc is None else acc + t
    return x._like(acc, r - 1)


def retraction_r(x: TripleElement) -> TripleElement:
    """R = pi^* iota^*: restrict the base coefficients to the units (all a_i = 0)."""
    n, r = x.algebra.dim, x.level
    z = e_vars(n, r).zero_exps()
    return x._like(x.value._new({k: c for k, c in x.value.terms.items() if k[2] == z and not k[3]}))


def iota0(x: TripleElement) -> WeilElement:
    """iota_0^* : W(T_F E_0) -> W(g)."""
    if x.level != 0:
        raise ValueError("iota_0^* needs a level-0 element")
    if x.order < 0:
        raise TruncationError("element not known at order 0")
    return x.value.pure()


def triple_cup(x: TripleElement, y: TripleElement) -> TripleElement:
    """(-1)^{r' |x|} pr^* x . pr'^* y with front face (a0..ar) and back face (ar..a_{r+r'})."""
    n = x.algebra.dim
    r, rr = x.level, y.level
    src = e_vars(n, r + rr)
    xv = x.value
    if rr & 1:
        xv = xv._new({k: (-c if (len(k[1]) + len(k[3])) & 1 else c) for k, c in xv.terms.items()})
    a = pull_coordinates(xv, src, _block_assign(n, range(r + 1)))
    b = pull_coordinates(y.value, src, _block_assign(n, range(r, r + rr + 1)))
    return TripleElement(x.algebra, r + rr, multiply(a, b))


def e_degeneracy_assign(n: int, r: int, i: int) -> Assign:
    """s_i : E_{r-1} -> E_r repeats a_i (0 <= i < r)."""
    return _block_assign(n, [b if b <= i else b - 1 for b in range(r + 1)])


def triple_is_normalized(x: TripleElement) -> bool:
    n, r = x.algebra.dim, x.level
    src = e_vars(n, r - 1) if r else None
    return all(pull_coordinates(x.value, src, e_degeneracy_assign(n, r, i)).is_zero() for i in range(r))


def random_triple(algebra: LieAlgebraSpec, r: int, order: int, rng: random.Random, terms: int = 4,
                  degree: int = 3, weil: Tuple[int, int] = (1, 1), normalized: bool = False) -> TripleElement:
    """Random element of W(T_F E_r): polynomial forms times Weil monomials of bidegree <= ``weil``.

    With ``normalized`` each term is multiplied by prod_i (a_i - a_{i+1})_k for
    random components k, which kills every degeneracy.
    """
    n = algebra.dim
    vs = e_vars(n, r)
    acc = TripleElement.zero(algebra, r, order)
    keys = [k for p in range(weil[0] + 1) for q in range(min(p, weil[1]) + 1) for k in monomial_basis(algebra, p, q)]
    for _ in range(terms):
        q = rng.randint(0, 1)
        S = tuple(sorted(rng.sample(range(vs.nvars), q)))
        e = [0] * vs.nvars
        for _ in range(rng.randint(0, degree)):
            e[rng.randrange(vs.nvars)] += 1
        c = rng.randint(-3, 3)
        if not c:
            continue
        f = PolyForm(vs, order, {(tuple(e), S): Rational(c)})
        if normalized:
            for i in range(r):
                k = rng.randrange(n)
                diff = PolyForm(vs, order, {(vs.unit(i * n + k), ()): ONE, (vs.unit((i + 1) * n + k), ()): -ONE})
                f = form_multiply(f, diff)
        I, J = rng.choice(keys)
        w = WeilElement.from_form(algebra, f) * WeilElement(algebra, {(I, J, vs.zero_exps(), ()): ONE}, vs, order)
        acc = acc + TripleElement(algebra, r, w)
    return acc


# ---------------------------------------------------------------------------
# the operator D and its contractor identities


def D_operator(x: TripleElement) -> WeilElement:
    """D = d_CE iota^* - iota^* d_CE on level 0.

    The result at the unit only sees the 1-jet of x, so x is cut to order 1
    first.
    """
    if x.level != 0:
        raise ValueError("D acts on level 0")
    if x.order < 1:
        raise TruncationError("D needs the 1-jet")
    x1 = x.truncate(1)
    act = _maps_for(x.algebra, 1).action(0)
    a = ce_weil_differential(x1.value.pure())
    b = ce_weil_differential(x1.value, act).pure()
    return a - b


@lru_cache(maxsize=None)
def _D_monomial(algebra: LieAlgebraSpec, e: Tuple[int, ...], S: Tuple[int, ...]) -> Tuple:
    vs = e_vars(algebra.dim, 0)
    if sum(e) > 1:
        return ()
    x = TripleElement(algebra, 0, WeilElement(algebra, {((), (), e, S): ONE}, vs, 1, _trusted=True))
    return tuple(D_operator(x).terms.items())


def _check_level(phi: GroupoidCochain, N: int) -> None:
    if phi.order < N:
        raise TruncationError(f"VE on level {phi.level} needs the cochain to order {N}, got {phi.order}")


def _working(phi: GroupoidCochain, prune: bool) -> GroupoidCochain:
    p = phi.level
    _check_level(phi, p)
    return phi.truncate(p) if prune else phi


def ve_zigzag(phi: GroupoidCochain, prune: bool = True) -> WeilElement:
    """VE = (-1)^p iota_0^* (d' h)^p kappa_p^* phi."""
    p = phi.level
    x = kappa_pullback(_working(phi, prune))
    for _ in range(p):
        x = d_prime(homotopy_h(x))
    v = iota0(x)
    return v.scale(-1) if p & 1 else v


def ve_dproduct(phi: GroupoidCochain, prune: bool = True) -> WeilElement:
    """Product formula: kappa^* phi = sum phi_0 (x) .. (x) phi_p gives

    (-1)^{p q_0 + (p-1) q_1 + .. + q_{p-1}} (iota^* phi_0) D(phi_1) .. D(phi_p).
    """
    g = phi.algebra
    n, p = g.dim, phi.level
    k = kappa_pullback(_working(phi, prune)).value
    total = WeilElement.zero(g)
    for (_, _, e, S), c in k.terms.items():
        blocks = [(e[b * n:(b + 1) * n], tuple(s - b * n for s in S if b * n <= s < (b + 1) * n))
                  for b in range(p + 1)]
        e0, S0 = blocks[0]
        if any(e0) or S0:
            continue
        sign = 1
        if sum((p - i) * len(blocks[i][1]) for i in range(p)) & 1:
            sign = -1
        prod = WeilElement.one(g, c=sign * c)
        for eb, Sb in blocks[1:]:
            d = _D_monomial(g, eb, Sb)
            if not d:
                prod = None
                break
            prod = prod * WeilElement(g, dict(d), _trusted=True)
        if prod is not None:
            total = total + prod
    return total


def _split_degrees(phi: GroupoidCochain) -> Dict[int, PolyForm]:
    return {q: phi.form.homogeneous(q) for q in sorted(phi.form_degrees())}


def explicit_sign(p: int, q: int) -> int:
    """Global sign of the explicit formula with ``sharp_field`` as implemented: (-1)^{p + q(q+1)/2}.

    ``sharp_field`` is the plain generator of (g_i exp(-tX), exp(tX) g_{i+1}),
    the push-forward of +X^R on a_i; the remaining part of the sign comes from
    the Koszul signs of the D-product.  Pinned against the zigzag.
    """
    return -1 if (p + q * (q + 1) // 2) & 1 else 1


def ve_explicit(phi: GroupoidCochain, prune: bool = True) -> WeilElement:
    """Evaluation formula on the nerve.

    For arguments (X_1..X_n; Xbar_{n+1}..Xbar_p), n = p - q, the value is
    sigma * sum_s eps(s) O_1 .. O_p phi at the unit, where position k carries
    the sharp field of X_{s(k)} and O_k is a Lie derivative when s(k) <= n and a
    contraction otherwise.  eps(s) is the sign of the order of the Lie slots
    times (-1)^{p-k} for each contraction at position k.  Coefficients of
    eb^I e^J are read off from the arguments (J; I) and divided by the
    multiplicities of I.
    """
    g = phi.algebra
    n, p = g.dim, phi.level
    w = _working(phi, prune)
    chart = chart_for(g, w.order + 1)
    vs = b_vars(n, p)
    fields: Dict[Tuple[int, int], VectorField] = {}

    def field(k, d):
        f = fields.get((k, d))
        if f is None:
            f = sharp_field(chart, p, k, d, vs)
            fields[(k, d)] = f
        return f

    out: Dict = {}
    for q, form in _split_degrees(w).items():
        nK = p - q
        if nK < 0 or form.is_zero():
            continue
        sigma = explicit_sign(p, q)
        memo: Dict[Tuple, PolyForm] = {}

        def chain(ops: Tuple[Tuple[int, int, bool], ...]) -> PolyForm:
            # ops = ((position, direction, is_lie), ...) for positions k..p, applied right to left
            if not ops:
                return form
            r = memo.get(ops)
            if r is None:
                inner = chain(ops[1:])
                k, d, lie = ops[0]
                f = field(k, d)
                r = inner.lie_derivative(f) if lie else inner.contract(f)
                memo[ops] = r
            return r

        for I, J in monomial_basis(g, p, q):
            slots = list(J) + list(I)
            total = ZERO
            for s in permutations(range(p)):
                eps = _perm_sign([x for x in s if x < nK])
                if sum(p - k - 1 for k in range(p) if s[k] >= nK) & 1:
                    eps = -eps
                ops = tuple((k + 1, slots[s[k]], s[k] < nK) for k in range(p))
                total += eps * chain(ops).value_at_zero()
            if total:
                mult = 1
                for i in set(I):
                    mult *= factorial(I.count(i))
                out[(I, J)] = out.get((I, J), ZERO) + sigma * total / mult
    return WeilElement(g, out)


ROUTES = {"zigzag": ve_zigzag, "dproduct": ve_dproduct, "explicit": ve_explicit}


def kappa_related(V: VectorField, Wf: VectorField, p: int, chart: GroupChart) -> bool:
    """V on E_p and W on B_p are kappa-related: V(kappa^k) = W^k o kappa, up to the common order."""
    kap = _maps(chart).kappa(p)
    N = min(V.order, Wf.order, kap.order - 1)
    sub = _Substituter(kap, N)
    deg = V.vars.degree_fn()
    for k, comp in enumerate(kap.components):
        lhs = poly_truncate(V.apply(comp, N), N, deg)
        rhs = poly_truncate(sub.evaluate(Wf.components[k]), N, deg)
        if _clean(lhs) != _clean(rhs):
            return False
    return True


# ---------------------------------------------------------------------------
# reverse map W(g) -> Omega(B_p G)


class _Tau:
    """Elements A0 + tau A1 with tau odd, tau^2 = 0 (the part of the foliated pullback we keep)."""

    __slots__ = ("a0", "a1")

    def __init__(self, a0: WeilElement, a1: WeilElement):
        self.a0, self.a1 = a0, a1

    def __mul__(self, other: "_Tau") -> "_Tau":
        tw = self.a0._new({k: (-c if (len(k[1]) + len(k[3])) & 1 else c) for k, c in self.a0.terms.items()})
        return _Tau(self.a0 * other.a0, tw * other.a1 + self.a1 * other.a0)


def _theta(chart: GroupChart, N: int) -> List[List[Dict]]:
    """Inverse of the matrix l(y) whose columns are the left-invariant fields, to order N."""
    n = chart.dim
    fields = [chart.left_invariant_field(i) for i in range(n)]
    deg = chart.point.degree_fn()
    z = chart.point.zero_exps()
    E = [[poly_truncate({e: c for e, c in fields[j].components[k].items() if e != z}, N, deg)
          for j in range(n)] for k in range(n)]
    ident = [[({z: ONE} if i == j else {}) for j in range(n)] for i in range(n)]
    total = [row[:] for row in ident]
    term = ident
    for _ in range(N):
        term = [[_clean(_sum_dicts([poly_mul(term[i][m], E[m][j], N, deg) for m in range(n)], -ONE))
                 for j in range(n)] for i in range(n)]
        if not any(any(x) for row in term for x in row):
            break
        total = [[_clean(_sum_dicts([total[i][j], term[i][j]])) for j in range(n)] for i in range(n)]
    return total


def _sum_dicts(ds, s=ONE):
    out: Dict = {}
    for d in ds:
        for k, v in d.items():
            out[k] = out.get(k, ZERO) + s * v
    return out


class _Homotopy:
    """k = -J o Phi^* on level r, Phi the foliated contraction (a, t) -> lambda_t(a)."""

    def __init__(self, algebra: LieAlgebraSpec, r: int, N: int):
        self.g = algebra
        n = algebra.dim
        self.r = r
        self.N = N
        chart = chart_for(algebra, N + 2)
        E = e_vars(n, r)
        self.E = E
        S = VariableSet(list(E.blocks) + [("t", 1)], weights=[1] * (r + 1) + [0])
        self.S = S
        ti = S.nvars - 1
        self.ti = ti
        one_minus_t = {S.zero_exps(): ONE, S.unit(ti): -ONE}
        a0 = chart.block(S, 0)
        F0 = [poly_mul(one_minus_t, c, N + 1, S.degree_fn()) for c in a0]
        comps = list(F0)
        for b in range(1, r + 1):
            comps.extend(chart.multiply(chart.multiply(chart.block(S, b), chart.block(S, 0, -1), S), F0, S))
        self.F = SeriesMap(S, E, chart.order, comps)
        # M_ij and m_i from block 0: T F (X_j) = sum_i M_ij X_i o F, d/dt F = sum_i m_i X_i o F
        deg = S.degree_fn()
        K = N + 1
        theta = _theta(chart, K)
        sub = _Substituter(SeriesMap(S, chart.point, None, F0), K)
        thF = [[sub.evaluate(theta[i][k]) for k in range(n)] for i in range(n)]
        emb = SeriesMap(S, chart.point, None, a0)
        sub0 = _Substituter(emb, K)
        ell = [[sub0.evaluate(chart.left_invariant_field(j).components[k]) for j in range(n)] for k in range(n)]
        XF0 = [[poly_mul(one_minus_t, ell[k][j], K, deg) for j in range(n)] for k in range(n)]
        dtF0 = [{e: -c for e, c in a.items()} for a in a0]
        self.M = [[_clean(_sum_dicts([poly_mul(thF[i][k], XF0[k][j], K, deg) for k in range(n)]))
                   for j in range(n)] for i in range(n)]
        self.m = [_clean(_sum_dicts([poly_mul(thF[i][k], dtF0[k], K, deg) for k in range(n)])) for i in range(n)]
        self.gen_cache: Dict = {}
        self.mono_cache: Dict = {}

    def _w(self, terms, order=None) -> WeilElement:
        return WeilElement(self.g, _clean(terms), self.S, self.N if order is None else order, _trusted=True)

    def _fn(self, f: Dict, I=(), J=()) -> WeilElement:
        return self._w({(I, J, e, ()): c for e, c in f.items()})

    def _dfn(self, f: Dict, I=(), J=()) -> WeilElement:
        d = de_rham(PolyForm(self.S, self.N + 1, {(e, ()): c for e, c in f.items()}, _trusted=True))
        return self._w({(I, J, e, S): c for (e, S), c in d.terms.items() if self.ti not in S})

    def gen(self, kind: str, i: int) -> _Tau:
        key = (kind, i)
        if key in self.gen_cache:
            return self.gen_cache[key]
        n = self.g.dim
        zero = self._w({})
        if kind == "e":
            a0 = zero
            for j in range(n):
                a0 = a0 + self._fn(self.M[i][j], (), (j,))
            a1 = self._fn(self.m[i])
        else:
            a0 = zero
            for j in range(n):
                a0 = a0 + self._dfn(self.M[i][j], (), (j,)) + self._fn(self.M[i][j], (j,), ())
            # d_K(tau m) = -tau dm once tau-bar is dropped
            a1 = self._dfn(self.m[i]).scale(-1)
        v = _Tau(a0, a1)
        self.gen_cache[key] = v
        return v

    def mono(self, I, J) -> _Tau:
        key = (I, J)
        if key in self.mono_cache:
            return self.mono_cache[key]
        acc = _Tau(self._w({((), (), self.S.zero_exps(), ()): ONE}), self._w({}))
        for i in I:
            acc = acc * self.gen("eb", i)
        for j in J:
            acc = acc * self.gen("e", j)
        self.mono_cache[key] = acc
        return acc

    def base_pullback(self, alpha: PolyForm) -> WeilElement:
        f = pullback(self.F, alpha)
        return self._w({((), (), e, S): c for (e, S), c in f.terms.items() if self.ti not in S})

    def apply(self, w: WeilElement) -> WeilElement:
        out = WeilElement.zero(self.g, self.E, self.N)
        for (I, J), alpha in w.weil_parts().items():
            if not I and not J:
                continue
            a = self.base_pullback(alpha.truncate(min(alpha.order, self.N)))
            t = _Tau(a, self._w({})) * self.mono(I, J)
            # J: coefficient of tau, integrated over t in [0, 1]
            acc: Dict = {}
            for (I2, J2, e, S), c in t.a1.terms.items():
                k = e[self.ti]
                key = (I2, J2, e[:self.ti], S)
                acc[key] = acc.get(key, ZERO) + c / (k + 1)
            out = out + WeilElement(self.g, _clean(acc), self.E, self.N, _trusted=True)
        return out.scale(-1)


def _homotopy(algebra: LieAlgebraSpec, r: int, N: int) -> _Homotopy:
    key = ("homotopy", r, N)
    c = chart_for(algebra, N + 2)
    h = c.cache.get(key)
    if h is None:
        h = _Homotopy(algebra, r, N)
        c.cache[key] = h
    return h


def homotopy_k(x: TripleElement) -> TripleElement:
    """Homotopy for d' on each level: k d' + d' k = id - kappa^* j^*."""
    N = x.order
    v = _homotopy(x.algebra, x.level, N).apply(x.value)
    return x._like(v.scale(-1) if x.level & 1 else v)


def j_pullback(x: TripleElement) -> GroupoidCochain:
    """j^*: keep the W-degree-0 part and pull it back along the section j_p."""
    g = x.algebra
    maps = _maps_for(g, x.order)
    part = x.value.weil_parts().get(((), ()))
    vs = b_vars(g.dim, x.level)
    if part is None:
        return GroupoidCochain(g, x.level, PolyForm.zero(vs, x.order))
    return GroupoidCochain(g, x.level, pullback(maps.j_section(x.level), part))


def kappa_j(x: TripleElement) -> TripleElement:
    """kappa^* j^* x."""
    c = j_pullback(x)
    maps = _maps_for(x.algebra, c.order)
    f = pullback(maps.kappa(x.level), c.form)
    return TripleElement(x.algebra, x.level, WeilElement.from_form(x.algebra, f))


def reverse_map(alpha: WeilElement, order: int, level: Optional[int] = None) -> GroupoidCochain:
    """(-1)^p j_p^* (delta k)^p pi_0^* alpha for alpha in W^{p,*}(g), as a cochain on G^p.

    ``order`` is the truncation order of the result.  ``level`` fixes p for a zero input.
    """
    ps = {WeilElement.key_bidegree(k)[0] for k in alpha.terms}
    if len(ps) > 1:
        raise ValueError("reverse map needs a W-degree-homogeneous input")
    if level is not None and ps and ps != {level}:
        raise ValueError("input does not sit in the requested W-degree")
    p = ps.pop() if ps else (level or 0)
    x = TripleElement.from_pure(alpha, order)
    for _ in range(p):
        x = delta_e(homotopy_k(x))
    c = j_pullback(x)
    return c.scale(-1) if p & 1 else c


# ---------------------------------------------------------------------------
# Alexander-Spanier cochains (pair groupoid of R^m)


def as_vars(m: int, p: int) -> VariableSet:
    return VariableSet.power("u", p + 1, m, start=0)


class ASCochain:
    """Polynomial function on M^{p+1}, M = R^m (blocks u0..up)."""

    __slots__ = ("m", "level", "func")

    def __init__(self, m: int, level: int, func: PolyForm):
        if func.vars != as_vars(m, level):
            raise ValueError("function does not live on M^{p+1}")
        if any(S for (_, S) in func.terms):
            raise ValueError("Alexander-Spanier cochains are functions")
        self.m = m
        self.level = level
        self.func = func

    @classmethod
    def decomposable(cls, m: int, factors: Sequence[Dict[Tuple[int, ...], Rational]], order: int) -> "ASCochain":
        """u_0 (x) .. (x) u_p from polynomials on R^m given as {exps: coeff}."""
        p = len(factors) - 1
        vs = as_vars(m, p)
        terms = {((), ()): ONE}
        for b, f in enumerate(factors):
            new = {}
            for (e, _), c in terms.items():
                for fe, fc in f.items():
                    new[(e + tuple(fe), ())] = new.get((e + tuple(fe), ()), ZERO) + c * Rational(fc)
            terms = new
        return cls(m, p, PolyForm(vs, order, terms))

    @classmethod
    def parse(cls, m: int, level: int, text: str, order: int) -> "ASCochain":
        return cls(m, level, parse_form(text, as_vars(m, level), order))

    @property
    def order(self) -> int:
        return self.func.order


def _point(m: int) -> VariableSet:
    return VariableSet.single("x", m)


def alexander_spanier_ve(u: ASCochain) -> PolyForm:
    """Closed form: u_0 (x) .. (x) u_p -> (-1)^p u_0 du_1 ^ .. ^ du_p on R^m."""
    m, p = u.m, u.level
    vs = _point(m)
    N = u.order - 1 if p else u.order
    if N < 0:
        raise TruncationError("need the cochain to order at least 1")
    total = PolyForm.zero(vs, N)
    for (e, _), c in u.func.terms.items():
        f = [PolyForm(vs, u.order, {(e[b * m:(b + 1) * m], ()): ONE}, _trusted=True) for b in range(p + 1)]
        prod = f[0].truncate(N) if p else f[0]
        for b in range(1, p + 1):
            prod = form_multiply(prod, de_rham(f[b]))
        total = total + prod.truncate(N).scale(c)
    return total.scale(-1) if p & 1 else total


class PairGroupoidModel:
    """Pair groupoid M x M over M = R^m, arrows (t, s) from s to t, units on the diagonal.

    M x M is the translation action groupoid of the abelian group R^m, the
    arrow (t, s) being translation by t - s.  Right multiplication by exp(eps X)
    sends (t, s) to (t, s - eps X), so the frame of T_F E_0 is X_k^L = -d/ds_k,
    and A = TM carries the anchor a(e_k) = -d/dx_k (the same sign rule as
    ActionSpec.linear).  C(A) is identified with Omega(M) by e^k <-> dx_k.
    iota is the diagonal M -> M x M.
    """

    def __init__(self, m: int, order: int):
        self.m = m
        self.order = order
        self.g = abelian(m)
        self.E0 = VariableSet([("t", m), ("s", m)])
        self.M = _point(m)
        big = order + 2
        self.act_E0 = ActionSpec(self.g, self.E0, [VectorField(self.E0, big, [
            ({self.E0.zero_exps(): -ONE} if j == m + k else {}) for j in range(2 * m)]) for k in range(m)])
        self.act_M = ActionSpec(self.g, self.M, [VectorField(self.M, big, [
            ({self.M.zero_exps(): -ONE} if j == k else {}) for j in range(m)]) for k in range(m)])
        self.diag = SeriesMap(self.M, self.E0, None, [{self.M.unit(k): ONE} for k in range(m)] * 2)

    def iota(self, w: WeilElement) -> WeilElement:
        return pull_weil(w, self.diag)

    def D(self, w: WeilElement) -> WeilElement:
        """D = d_CE iota^* - iota^* d_CE, as defined (no sign adjustment)."""
        return ce_weil_differential(self.iota(w), self.act_M) - self.iota(ce_weil_differential(w, self.act_E0))

    def target_function(self, f: Dict[Tuple[int, ...], Rational], order: int) -> WeilElement:
        """u (x) 1 : (t, s) -> u(t)."""
        z = (0,) * self.m
        return WeilElement(self.g, {((), (), tuple(e) + z, ()): Rational(c) for e, c in f.items()}, self.E0, order)

    def to_form(self, w: WeilElement) -> PolyForm:
        """C(TM) = Omega(M): e^J with function coefficients becomes dx_J."""
        out = {}
        for (I, J, e, S), c in w.terms.items():
            if I or S:
                raise ValueError("expected an element of C(TM)")
            out[(e, J)] = out.get((e, J), ZERO) + c
        return PolyForm(self.M, w.order, out)


def as_dproduct(u: ASCochain) -> PolyForm:
    """D-product route on the pair groupoid: f_i = u_i (x) 1 and VE = (iota^* f_0) D f_1 .. D f_p."""
    m, p = u.m, u.level
    model = PairGroupoidModel(m, u.order)
    N = u.order - 1 if p else u.order
    total = None
    for (e, _), c in u.func.terms.items():
        blocks = [e[b * m:(b + 1) * m] for b in range(p + 1)]
        f0 = model.iota(model.target_function({blocks[0]: ONE}, u.order))
        prod = f0.truncate(N) if p else f0
        for b in range(1, p + 1):
            prod = prod * model.D(model.target_function({blocks[b]: ONE}, u.order)).truncate(N)
        prod = prod.scale(c)
        total = prod if total is None else total + prod
    if total is None:
        return PolyForm.zero(model.M, N)
    return model.to_form(total)


# ---------------------------------------------------------------------------
# the Van Est double complex as finite contraction data


def _monomials(nvars: int, degree: int) -> List[Tuple[int, ...]]:
    out = []
    for combo in combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for j in combo:
            e[j] += 1
        out.append(tuple(e))
    return out


class VanestContraction:
    """Normalized C^{r,s} = (functions on E_r) (x) wedge^s g^*, modulo omega = degree + s > N.

    delta has bidegree (1, 0), the perturbation is d', h is the simplicial
    homotopy, D = wedge g^* at r = 0 with i = pi_0^* and p = iota_0^*.
    Degeneracies preserve degree and the wedge factor, so the normalized basis
    is computed one (degree, e^J) slice at a time.  ``data`` holds the
    matrices; ``element`` and ``coords`` translate to and from TripleElements.
    """

    def __init__(self, algebra: LieAlgebraSpec, N: int):
        from .hpl import ContractionData, GradedSpace

        self.algebra, self.N = algebra, N
        n = algebra.dim
        self.basis: Dict[Tuple[int, int], List[Dict]] = {}
        self.free: Dict[Tuple[int, int], Dict[Tuple, int]] = {}
        for s in range(n + 1):
            for r in range(0, N - s + 1):
                vecs, free = self._normalized(r, s)
                if vecs:
                    self.basis[(r, s)] = vecs
                    self.free[(r, s)] = free
        self.C = GradedSpace({b: len(v) for b, v in self.basis.items()})
        self.D = GradedSpace({(0, s): len(combinations_list(n, s)) for s in range(min(n, N) + 1)})
        self.data = ContractionData(self.C, self.D, self._matrix(delta_e, (1, 0)), self._matrix(d_prime, (0, 1)),
                                    self._matrix(homotopy_h, (-1, 0)), self._inclusion(), self._projection())

    def _normalized(self, r: int, s: int):
        from .linear import rank_and_kernel, SparseMatrix

        n = self.algebra.dim
        nv = n * (r + 1)
        vecs: List[Dict] = []
        free: Dict[Tuple, int] = {}
        assigns = [_block_assign(n, [b if b <= i else b - 1 for b in range(r + 1)]) for i in range(r)]
        pullers = [_coord_puller(n * r, a) for a in assigns]
        for J in combinations_list(n, s):
            for k in range(r, self.N - s + 1):
                monos = _monomials(nv, k)
                rows: Dict[Tuple, int] = {}
                ent = {}
                for col, e in enumerate(monos):
                    for i, pull in enumerate(pullers):
                        res = pull(e, ())
                        if res:
                            row = rows.setdefault((i, res[1]), len(rows))
                            ent[(row, col)] = ent.get((row, col), ZERO) + res[0]
                m = SparseMatrix(len(rows), len(monos), {key: v for key, v in ent.items() if v})
                _, ker = rank_and_kernel(m)
                for v in ker:
                    piv = next(c for c, x in enumerate(v) if x == 1 and all(w[c] == 0 for w in ker if w is not v))
                    free[(monos[piv], J)] = len(vecs)
                    vecs.append({(monos[c], J): x for c, x in enumerate(v) if x})
        return vecs, free

    def element(self, b: Tuple[int, int], k: int) -> TripleElement:
        r, _ = b
        g = self.algebra
        terms = {((), J, e, ()): c for (e, J), c in self.basis[b][k].items()}
        return TripleElement(g, r, WeilElement(g, terms, e_vars(g.dim, r), self.N, _trusted=True))

    def from_vector(self, v: Sequence) -> Dict[int, TripleElement]:
        """Flat C-vector -> {level: TripleElement}."""
        out: Dict[int, TripleElement] = {}
        for idx, c in enumerate(v):
            if c:
                b = self.C.labels[idx]
                x = self.element(b, idx - self.C.offsets[b]).scale(c)
                out[b[0]] = out[b[0]] + x if b[0] in out else x
        return out

    def coords(self, x: TripleElement) -> List[Rational]:
        """Flat C-coordinates of a normalized element (terms with omega > N are dropped)."""
        v = [ZERO] * self.C.total
        r = x.level
        for (I, J, e, S), c in x.value.terms.items():
            if I or S:
                raise ValueError("only W^{*,0} coefficients live in C")
            if sum(e) + len(J) > self.N:
                continue
            b = (r, len(J))
            k = self.free.get(b, {}).get((e, J))
            if k is not None:
                v[self.C.offsets[b] + k] = c
        return v

    def _matrix(self, op, shift):
        from .linear import SparseMatrix

        ent = {}
        for b, vecs in self.basis.items():
            if b[0] + shift[0] < 0:
                continue
            for k in range(len(vecs)):
                y = op(self.element(b, k))
                col = self.C.offsets[b] + k
                for row, c in enumerate(self.coords(y)):
                    if c:
                        ent[(row, col)] = c
        return SparseMatrix(self.C.total, self.C.total, ent)

    def _inclusion(self):
        from .linear import SparseMatrix

        n = self.algebra.dim
        z = e_vars(n, 0).zero_exps()
        ent = {}
        for (r, s), cnt in self.D.dims.items():
            for k, J in enumerate(combinations_list(n, s)):
                ent[(self.C.offsets[(0, s)] + self.free[(0, s)][(z, J)], self.D.offsets[(0, s)] + k)] = ONE
        return SparseMatrix(self.C.total, self.D.total, ent)

    def _projection(self):
        from .linear import SparseMatrix

        n = self.algebra.dim
        z = e_vars(n, 0).zero_exps()
        ent = {}
        for (r, s), cnt in self.D.dims.items():
            idx = {J: k for k, J in enumerate(combinations_list(n, s))}
            for k, vec in enumerate(self.basis[(0, s)]):
                for (e, J), c in vec.items():
                    if e == z:
                        ent[(self.D.offsets[(0, s)] + idx[J], self.C.offsets[(0, s)] + k)] = c
        return SparseMatrix(self.D.total, self.C.total, ent)

    def cup_vectors(self, u: Sequence, v: Sequence) -> List[Rational]:
        """Coordinates of the cup product of two flat C-vectors."""
        out = [ZERO] * self.C.total
        for x in self.from_vector(u).values():
            for y in self.from_vector(v).values():
                for i, c in enumerate(self.coords(triple_cup(x, y))):
                    out[i] += c
        return out


def combinations_list(n: int, s: int) -> List[Tuple[int, ...]]:
    return list(combinations(range(n), s))


def export_contraction(algebra: LieAlgebraSpec, N: int) -> VanestContraction:
    return VanestContraction(algebra, N)
