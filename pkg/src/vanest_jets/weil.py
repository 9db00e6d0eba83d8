"""Weil algebra of g, optionally tensored with polynomial forms on a base.

An element is a finite sum of terms ``c * alpha * eb^I * e^J``: ``alpha`` a
monomial form on the base, ``I`` a sorted multiset of indices for the even
generators ``eb^i`` (bidegree (1,1)) and ``J`` a strictly increasing tuple
for the odd generators ``e^i`` (bidegree (1,0)).  A base k-form has bidegree
(0,k).  Signs follow the total degree, so ``e^i`` and base 1-forms
anticommute and ``eb^i`` is central.

With a base ``R^m`` the algebra models the trivial-bundle case
``Omega(R^m) (x) S g* (x) /\\ g*`` of an action algebroid, whose anchor is
passed to the operators that need it.  Elements then carry a truncation
order (see :mod:`vanest_jets.series`).
"""
from __future__ import annotations

import numbers
import re
from functools import lru_cache
from itertools import combinations, combinations_with_replacement
from math import factorial
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .linear import Rational
from .cealg import EMPTY, ActionSpec, wedge_insert, wedge_merge
from .lie import LieAlgebraSpec
from .series import (ONE, ZERO, PolyForm, VariableSet, VectorField, _clean, _perm_sign, de_rham, format_form,
                     merge_sign, poly_add, poly_mul)

GKey = Tuple[Tuple[int, ...], Tuple[int, ...]]          # (I, J)
Term = Tuple[Tuple[int, ...], Tuple[int, ...], Tuple[int, ...], Tuple[int, ...]]  # (I, J, exps, dx)


class WeilElement:
    __slots__ = ("algebra", "base", "order", "terms")

    def __init__(self, algebra: LieAlgebraSpec, terms: Optional[Dict[Term, Rational]] = None,
                 base: Optional[VariableSet] = None, order: Optional[int] = None, *, _trusted: bool = False):
        self.algebra = algebra
        self.base = base if base is not None else EMPTY
        if self.base.nvars and order is None:
            raise ValueError("a base requires a truncation order")
        self.order = order if self.base.nvars else None
        if _trusted:
            self.terms = terms
            return
        out: Dict[Term, Rational] = {}
        n = algebra.dim
        deg = self.base.degree_fn()
        for key, c in (terms or {}).items():
            if len(key) == 2:
                I, J = key
                e, S = self.base.zero_exps(), ()
            else:
                I, J, e, S = key
            I = tuple(sorted(I))
            sj, J = _sorted_sign(tuple(J))
            ss, S2 = _sorted_sign(tuple(S))
            if not sj or not ss:
                continue
            if any(not 0 <= i < n for i in I + J):
                raise ValueError("Weil generator index out of range")
            e = tuple(e)
            if len(e) != self.base.nvars:
                raise ValueError("base exponent length mismatch")
            if self.order is not None and deg(e) > self.order:
                continue
            k = (I, J, e, S2)
            out[k] = out.get(k, ZERO) + sj * ss * Rational(c)
        self.terms = _clean(out)

    # constructors ----------------------------------------------------------
    @classmethod
    def zero(cls, algebra, base=None, order=None) -> "WeilElement":
        return cls(algebra, {}, base, order)

    @classmethod
    def one(cls, algebra, base=None, order=None, c=1) -> "WeilElement":
        b = base if base is not None else EMPTY
        return cls(algebra, {((), (), b.zero_exps(), ()): Rational(c)}, base, order)

    @classmethod
    def e(cls, algebra, i: int, base=None, order=None) -> "WeilElement":
        b = base if base is not None else EMPTY
        return cls(algebra, {((), (i,), b.zero_exps(), ()): ONE}, base, order)

    @classmethod
    def eb(cls, algebra, i: int, base=None, order=None) -> "WeilElement":
        b = base if base is not None else EMPTY
        return cls(algebra, {((i,), (), b.zero_exps(), ()): ONE}, base, order)

    @classmethod
    def monomial(cls, algebra, I=(), J=(), c=1) -> "WeilElement":
        return cls(algebra, {(tuple(I), tuple(J)): Rational(c)})

    @classmethod
    def from_form(cls, algebra, form: PolyForm) -> "WeilElement":
        return cls(algebra, {((), (), e, S): c for (e, S), c in form.terms.items()}, form.vars, form.order,
                   _trusted=True)

    def _new(self, terms: Dict[Term, Rational], order=None) -> "WeilElement":
        return WeilElement(self.algebra, _clean(terms), self.base, self.order if order is None else order,
                           _trusted=True)

    # basic algebra ------------------------------------------------------------
    def _compat(self, other: "WeilElement") -> None:
        if not isinstance(other, WeilElement):
            raise TypeError("expected a WeilElement")
        if self.algebra != other.algebra or self.base != other.base:
            raise ValueError("mismatched algebra or base")

    def truncate(self, N: Optional[int]) -> "WeilElement":
        if N is None or self.order is None or N >= self.order:
            if self.order is not None and N is not None and N > self.order:
                raise ValueError("cannot raise truncation order")
            return self
        deg = self.base.degree_fn()
        return self._new({k: c for k, c in self.terms.items() if deg(k[2]) <= N}, N)

    def _align(self, other):
        self._compat(other)
        if self.order is None:
            return self, other
        N = min(self.order, other.order)
        return self.truncate(N), other.truncate(N)

    def __add__(self, other: "WeilElement") -> "WeilElement":
        a, b = self._align(other)
        out = dict(a.terms)
        for k, c in b.terms.items():
            out[k] = out.get(k, ZERO) + c
        return a._new(out)

    def __sub__(self, other: "WeilElement") -> "WeilElement":
        return self + other.scale(-1)

    def __neg__(self) -> "WeilElement":
        return self.scale(-1)

    def scale(self, s) -> "WeilElement":
        s = Rational(s)
        return self._new({k: s * c for k, c in self.terms.items()} if s else {})

    def __mul__(self, other):
        if isinstance(other, numbers.Rational):
            return self.scale(other)
        return multiply(self, other)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeilElement):
            return NotImplemented
        return (self.algebra == other.algebra and self.base == other.base and self.order == other.order
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.order, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        n = f", N={self.order}" if self.order is not None else ""
        return f"WeilElement({format_weil(self)}{n})"

    def __str__(self) -> str:
        return format_weil(self)

    def is_zero(self) -> bool:
        return not self.terms

    # gradings ------------------------------------------------------------------
    @staticmethod
    def key_bidegree(k: Term) -> Tuple[int, int]:
        I, J, _, S = k
        return len(I) + len(J), len(I) + len(S)

    def bidegrees(self) -> set:
        return {self.key_bidegree(k) for k in self.terms}

    def component(self, p: int, q: int) -> "WeilElement":
        return self._new({k: c for k, c in self.terms.items() if self.key_bidegree(k) == (p, q)})

    def is_homogeneous(self) -> bool:
        return len(self.bidegrees()) <= 1

    def weil_parts(self) -> Dict[GKey, PolyForm]:
        """Group as ``sum_(I,J) alpha_(I,J) eb^I e^J`` with base forms ``alpha``."""
        out: Dict[GKey, Dict] = {}
        for (I, J, e, S), c in self.terms.items():
            out.setdefault((I, J), {})[(e, S)] = c
        N = self.order if self.order is not None else 0
        return {g: PolyForm(self.base, N, d, _trusted=True) for g, d in out.items()}

    @classmethod
    def from_parts(cls, algebra, base, order, parts: Dict[GKey, PolyForm]) -> "WeilElement":
        out: Dict[Term, Rational] = {}
        for (I, J), form in parts.items():
            for (e, S), c in form.terms.items():
                k = (I, J, e, S)
                out[k] = out.get(k, ZERO) + c
        return WeilElement(algebra, _clean(out), base, order, _trusted=True)

    def constant_parts(self) -> Dict[GKey, Rational]:
        """Coefficients of the pure Weil monomials (base part = constant 1)."""
        z = self.base.zero_exps()
        return {(I, J): c for (I, J, e, S), c in self.terms.items() if e == z and not S}

    def pure(self) -> "WeilElement":
        """Restrict base coefficients to their value at the origin, dropping the base."""
        return WeilElement(self.algebra, {g: c for g, c in self.constant_parts().items()})


def _sorted_sign(J: Tuple[int, ...]) -> Tuple[int, Tuple[int, ...]]:
    s = _perm_sign(J)
    return s, tuple(sorted(J))


# ---------------------------------------------------------------------------
# products


def multiply(a: WeilElement, b: WeilElement) -> WeilElement:
    """(alpha eb^I e^J)(beta eb^K e^L) = (-1)^{|J||beta|} alpha beta eb^{I+K} e^J e^L."""
    a, b = a._align(b)
    N = a.order
    deg = a.base.degree_fn()
    out: Dict[Term, Rational] = {}
    for (I, J, e1, S1), c1 in a.terms.items():
        for (K, L, e2, S2), c2 in b.terms.items():
            s1, S = merge_sign(S1, S2)
            if not s1:
                continue
            s2, JL = wedge_merge(J, L)
            if not s2:
                continue
            e = tuple(x + y for x, y in zip(e1, e2))
            if N is not None and deg(e) > N:
                continue
            sign = s1 * s2
            if (len(J) * len(S2)) & 1:
                sign = -sign
            k = (tuple(sorted(I + K)), JL, e, S)
            out[k] = out.get(k, ZERO) + sign * c1 * c2
    return a._new(out)


# ---------------------------------------------------------------------------
# operators on the pure Weil factor, memoised per monomial


def _g_iK(k: int, I, J):
    if k not in J:
        return ()
    pos = J.index(k)
    return (((I, J[:pos] + J[pos + 1:]), -ONE if pos & 1 else ONE),)


def _g_iS(k: int, I, J):
    m = I.count(k)
    if not m:
        return ()
    pos = I.index(k)
    return (((I[:pos] + I[pos + 1:], J), Rational(m)),)


def _g_dK(I, J):
    out = []
    for m, j in enumerate(J):
        out.append(((tuple(sorted(I + (j,))), J[:m] + J[m + 1:]), -ONE if m & 1 else ONE))
    return tuple(out)


def _g_mul(x: Dict[GKey, Rational], y: Dict[GKey, Rational]) -> Dict[GKey, Rational]:
    out: Dict[GKey, Rational] = {}
    for (I, J), a in x.items():
        for (K, L), b in y.items():
            s, JL = wedge_merge(J, L)
            if s:
                k = (tuple(sorted(I + K)), JL)
                out[k] = out.get(k, ZERO) + s * a * b
    return _clean(out)


class _PureOps:
    """Memoised structure-constant operators on monomials of W(g)."""

    def __init__(self, g: LieAlgebraSpec):
        self.g = g
        n = g.dim
        self.gen_e = []
        self.gen_eb = []
        for k in range(n):
            de: Dict[GKey, Rational] = {}
            deb: Dict[GKey, Rational] = {}
            for i in range(n):
                for j in range(n):
                    c = g.c[k][i][j]
                    if not c:
                        continue
                    # -1/2 c e^i e^j
                    s, K = wedge_merge((i,), (j,))
                    if s:
                        de[((), K)] = de.get(((), K), ZERO) - Rational(1, 2) * c * s
                    # -c e^i eb^j, forced by d_K d_CE + d_CE d_K = 0
                    deb[((j,), (i,))] = deb.get(((j,), (i,)), ZERO) - c
            self.gen_e.append(_clean(de))
            self.gen_eb.append(_clean(deb))
        self._dce = {}
        self._icesub = {}

    def dce(self, I, J) -> Dict[GKey, Rational]:
        key = (I, J)
        r = self._dce.get(key)
        if r is not None:
            return r
        out: Dict[GKey, Rational] = {}
        # even generators first: no sign passing them
        for pos in range(len(I)):
            if pos and I[pos] == I[pos - 1]:
                continue
            mult = I.count(I[pos])
            rest = {(I[:pos] + I[pos + 1:], J): Rational(mult)}
            for k, v in _g_mul(self.gen_eb[I[pos]], rest).items():
                out[k] = out.get(k, ZERO) + v
        for m, j in enumerate(J):
            left = {(I, J[:m]): ONE}
            right = {((), J[m + 1:]): ONE}
            prod = _g_mul(_g_mul(left, self.gen_e[j]), right)
            s = -ONE if m & 1 else ONE
            for k, v in prod.items():
                out[k] = out.get(k, ZERO) + s * v
        r = _clean(out)
        self._dce[key] = r
        return r

    def ice_pure(self, k: int, I, J) -> Dict[GKey, Rational]:
        """sum_{i,j} c^j_{ik} e^i i_S(e_j) on a pure monomial."""
        key = (k, I, J)
        r = self._icesub.get(key)
        if r is not None:
            return r
        out: Dict[GKey, Rational] = {}
        g = self.g
        for i in range(g.dim):
            for j in range(g.dim):
                c = g.c[j][i][k]
                if not c:
                    continue
                for (I2, J2), v in _g_iS(j, I, J):
                    s, K = wedge_insert(i, J2)
                    if s:
                        kk = (I2, K)
                        out[kk] = out.get(kk, ZERO) + s * c * v
        r = _clean(out)
        self._icesub[key] = r
        return r


@lru_cache(maxsize=64)
def pure_ops(g: LieAlgebraSpec) -> _PureOps:
    return _PureOps(g)


def _apply_pure(w: WeilElement, op, odd: bool, order=None) -> WeilElement:
    """Apply an operator acting on the W(g) factor only; odd operators pick up (-1)^{|alpha|}."""
    out: Dict[Term, Rational] = {}
    cache = {}
    for (I, J, e, S), c in w.terms.items():
        r = cache.get((I, J))
        if r is None:
            r = op(I, J)
            cache[(I, J)] = r
        if not r:
            continue
        s = -c if (odd and len(S) & 1) else c
        items = r.items() if isinstance(r, dict) else r
        for (I2, J2), v in items:
            k = (I2, J2, e, S)
            out[k] = out.get(k, ZERO) + s * v
    return w._new(out, order)


def _apply_base(w: WeilElement, op, order: int) -> WeilElement:
    """Apply a PolyForm operator to the base factor of each (I, J)-part (left action, no sign)."""
    parts = {}
    for g, form in w.weil_parts().items():
        r = op(form)
        if not r.is_zero():
            parts[g] = r
    out = WeilElement.from_parts(w.algebra, w.base, order, parts)
    return out


def _direction(X, n: int) -> List[Rational]:
    if isinstance(X, int):
        v = [ZERO] * n
        v[X] = ONE
        return v
    return [Rational(x) for x in X]


# ---------------------------------------------------------------------------
# differentials


def koszul_differential(w: WeilElement) -> WeilElement:
    """d_K: e^i -> eb^i, eb^i -> 0, base forms -> de Rham differential."""
    pure = _apply_pure(w, _g_dK, odd=True)
    if not w.base.nvars:
        return pure
    N = w.order - 1
    base = _apply_base(w, de_rham, N)
    return pure.truncate(N) + base


def _check_action(w: WeilElement, action: Optional[ActionSpec]):
    if w.base.nvars:
        if action is None:
            raise ValueError("an element with base needs an action")
        if action.algebra != w.algebra or action.base != w.base:
            raise ValueError("action does not match the element")
    elif action is not None and action.base.nvars:
        raise ValueError("action given for an element without base")


def _mul_e_left(i: int, w: WeilElement) -> WeilElement:
    """e^i * w."""
    out: Dict[Term, Rational] = {}
    for (I, J, e, S), c in w.terms.items():
        s, K = wedge_insert(i, J)
        if not s:
            continue
        if len(S) & 1:
            s = -s
        k = (I, K, e, S)
        out[k] = out.get(k, ZERO) + s * c
    return w._new(out)


def _mul_eb_left(i: int, w: WeilElement) -> WeilElement:
    out: Dict[Term, Rational] = {}
    for (I, J, e, S), c in w.terms.items():
        k = (tuple(sorted(I + (i,))), J, e, S)
        out[k] = out.get(k, ZERO) + c
    return w._new(out)


def ce_weil_differential(w: WeilElement, action: Optional[ActionSpec] = None) -> WeilElement:
    """Lift of d_CE to the Weil algebra (with the anchor terms when a base is present)."""
    _check_action(w, action)
    ops = pure_ops(w.algebra)
    pure = _apply_pure(w, ops.dce, odd=True)
    if not w.base.nvars:
        return pure
    N = min(w.order, action.order) - 1
    acc = pure.truncate(N)
    for i, a in enumerate(action.anchor):
        if a.is_zero():
            continue
        lie = _apply_base(w, lambda f: f.lie_derivative(a), N)
        acc = acc + _mul_e_left(i, lie)
        ins = _apply_base(w, lambda f: f.contract(a), min(w.order, a.order))
        acc = acc - _mul_eb_left(i, ins).truncate(N)
    return acc


def weil_differential(w: WeilElement, action: Optional[ActionSpec] = None) -> WeilElement:
    return koszul_differential(w) + ce_weil_differential(w, action)


# ---------------------------------------------------------------------------
# contractions


def _multiply_by_function(f: Dict, w: WeilElement, N: int) -> WeilElement:
    deg = w.base.degree_fn()
    out: Dict[Term, Rational] = {}
    for (I, J, e, S), c in w.terms.items():
        for e2, v in f.items():
            ne = tuple(x + y for x, y in zip(e, e2))
            if deg(ne) > N:
                continue
            k = (I, J, ne, S)
            out[k] = out.get(k, ZERO) + c * v
    return w._new(out, N)


def contract(kind: str, X, w: WeilElement, action: Optional[ActionSpec] = None) -> WeilElement:
    """Contraction i_S(X), i_K(X) or i_CE(X).

    ``X`` is a basis index, a list of rationals, or (for iS/iK with a base)
    a list of coefficient dicts ``{exps: c}`` giving a section of the
    trivial bundle with function coefficients.
    """
    n = w.algebra.dim
    if kind not in ("iS", "iK", "iCE"):
        raise ValueError(f"unknown contraction {kind!r}")
    if isinstance(X, (list, tuple)) and X and isinstance(X[0], dict):
        return _contract_functional(kind, X, w)
    v = _direction(X, n)
    acc = w.zero(w.algebra, w.base, w.order) if w.base.nvars else WeilElement.zero(w.algebra)
    if kind == "iCE":
        _check_action(w, action)
        ops = pure_ops(w.algebra)
        for k, c in enumerate(v):
            if c:
                acc = acc + _apply_pure(w, lambda I, J, k=k: ops.ice_pure(k, I, J), odd=True).scale(c)
                if w.base.nvars:
                    a = action.anchor[k]
                    if not a.is_zero():
                        acc = acc + _apply_base(w, lambda f: f.contract(a), min(w.order, a.order)).scale(c)
        return acc
    op = _g_iS if kind == "iS" else _g_iK
    for k, c in enumerate(v):
        if c:
            acc = acc + _apply_pure(w, lambda I, J, k=k: op(k, I, J), odd=(kind == "iK")).scale(c)
    return acc


def _contract_functional(kind: str, X: Sequence[Dict], w: WeilElement) -> WeilElement:
    """i_K(f X) = f i_K(X) - df i_S(X) and i_S(f X) = f i_S(X), summed over components."""
    if not w.base.nvars:
        raise ValueError("function coefficients need a base")
    N = w.order
    acc = None
    for k, f in enumerate(X):
        if not f:
            continue
        if kind == "iS":
            term = _multiply_by_function(f, contract("iS", k, w), N)
        elif kind == "iK":
            term = _multiply_by_function(f, contract("iK", k, w), N)
            df = de_rham(PolyForm(w.base, N, {(e, ()): c for e, c in f.items()}))
            dfw = WeilElement.from_form(w.algebra, df)
            term = term.truncate(N - 1) - multiply(dfw, contract("iS", k, w).truncate(N - 1))
        else:
            raise ValueError("function coefficients are supported for iS and iK only")
        acc = term if acc is None else acc + term
    return acc if acc is not None else w.zero(w.algebra, w.base, w.order)


def lie_derivative(X, w: WeilElement, action: Optional[ActionSpec] = None) -> WeilElement:
    """L(X) = [i_K(X), d_CE] = i_K(X) d_CE + d_CE i_K(X)."""
    a = contract("iK", X, ce_weil_differential(w, action))
    b = ce_weil_differential(contract("iK", X, w), action)
    return a + b


# ---------------------------------------------------------------------------
# derivations induced by endomorphisms of g (Cartan calculus on W(V))


def _pure_derivation(gen_e, gen_eb, odd: bool):
    """Monomial operator of the derivation with the given images of e^k and eb^k."""
    def op(I, J):
        out: Dict[GKey, Rational] = {}
        for pos in range(len(I)):
            if pos and I[pos] == I[pos - 1]:
                continue
            img = gen_eb[I[pos]]
            if not img:
                continue
            rest = {(I[:pos] + I[pos + 1:], J): Rational(I.count(I[pos]))}
            for k, v in _g_mul(img, rest).items():
                out[k] = out.get(k, ZERO) + v
        for m, j in enumerate(J):
            img = gen_e[j]
            if not img:
                continue
            prod = _g_mul(_g_mul({(I, J[:m]): ONE}, img), {((), J[m + 1:]): ONE})
            s = -ONE if (odd and m & 1) else ONE
            for k, v in prod.items():
                out[k] = out.get(k, ZERO) + s * v
        return _clean(out)
    return op


def _endo(D, n: int):
    D = [[Rational(x) for x in row] for row in D]
    if len(D) != n or any(len(row) != n for row in D):
        raise ValueError(f"endomorphism must be a {n}x{n} matrix")
    return D


def endomorphism_l(D, w: WeilElement) -> WeilElement:
    """l(D): the even derivation by which D in End(g) acts on g* (alpha -> -alpha o D) on both e and eb."""
    n = w.algebra.dim
    D = _endo(D, n)
    gen_e = [{((), (k,)): -D[j][k] for k in range(n) if D[j][k]} for j in range(n)]
    gen_eb = [{((k,), ()): -D[j][k] for k in range(n) if D[j][k]} for j in range(n)]
    return _apply_pure(w, _pure_derivation(gen_e, gen_eb, False), odd=False)


def endomorphism_j(D, w: WeilElement) -> WeilElement:
    """j(D): the odd derivation of bidegree (0, -1) with eb^j -> -sum_k D[j][k] e^k and e^j -> 0."""
    n = w.algebra.dim
    D = _endo(D, n)
    gen_e = [{} for _ in range(n)]
    gen_eb = [{((), (k,)): -D[j][k] for k in range(n) if D[j][k]} for j in range(n)]
    return _apply_pure(w, _pure_derivation(gen_e, gen_eb, True), odd=True)


# ---------------------------------------------------------------------------
# Kalkman twist and Koszul homotopy


def _kalkman_u(w: WeilElement, action: Optional[ActionSpec]) -> WeilElement:
    """u = sum_i e^i iota(a(e_i)) - 1/2 sum c^k_ij e^i e^j i_S(e_k)."""
    g = w.algebra
    acc = WeilElement.zero(g, w.base, w.order) if w.base.nvars else WeilElement.zero(g)
    for k in range(g.dim):
        sub = contract("iS", k, w)
        if sub.is_zero():
            continue
        for i in range(g.dim):
            for j in range(g.dim):
                c = g.c[k][i][j]
                if c:
                    acc = acc + _mul_e_left(i, _mul_e_left(j, sub)).scale(-Rational(1, 2) * c)
    if w.base.nvars and action is not None:
        for i, a in enumerate(action.anchor):
            if not a.is_zero():
                acc = acc + _mul_e_left(i, _apply_base(w, lambda f: f.contract(a), min(w.order, a.order)))
    return acc


def kalkman_twist(w: WeilElement, action: Optional[ActionSpec] = None, inverse: bool = False) -> WeilElement:
    """U = exp(u) (or exp(-u)); u lowers q by one, so the series is finite."""
    _check_action(w, action)
    s = -1 if inverse else 1
    total = w
    term = w
    k = 1
    while True:
        term = _kalkman_u(term, action).scale(Rational(s, k))
        if term.is_zero():
            break
        total = total + term
        k += 1
    return total


def koszul_homotopy(w: WeilElement) -> WeilElement:
    """kappa = (1/p) sum_i e^i i_S(e_i) on W^{p,*}, p > 0, and 0 on W^{0,*}."""
    if w.base.nvars:
        raise ValueError("the Koszul homotopy is implemented for W(g) without base")
    out: Dict[Term, Rational] = {}
    for (I, J, e, S), c in w.terms.items():
        p = len(I) + len(J)
        if not p:
            continue
        for pos in range(len(I)):
            if pos and I[pos] == I[pos - 1]:
                continue
            i = I[pos]
            mult = I.count(i)
            s, K = wedge_insert(i, J)
            if not s:
                continue
            k = (I[:pos] + I[pos + 1:], K, e, S)
            out[k] = out.get(k, ZERO) + c * mult * s / p
    return w._new(out)


def augmentation(w: WeilElement) -> WeilElement:
    """i o pi: keep the W^{0,0} part (constants)."""
    return w._new({k: c for k, c in w.terms.items() if not k[0] and not k[1] and not k[3]
                   and not any(k[2])})


# ---------------------------------------------------------------------------
# bases


def monomial_basis(algebra: LieAlgebraSpec, p: int, q: int) -> List[GKey]:
    """Monomials eb^I e^J of W^{p,q}(g): |I| = q, |J| = p - q."""
    if q > p or q < 0:
        return []
    n = algebra.dim
    if p - q > n:
        return []
    return [(I, J) for I in combinations_with_replacement(range(n), q) for J in combinations(range(n), p - q)]


def basis_elements(algebra: LieAlgebraSpec, p: int, q: int) -> List[WeilElement]:
    return [WeilElement.monomial(algebra, I, J) for I, J in monomial_basis(algebra, p, q)]


def spanning_set(algebra: LieAlgebraSpec, total: int) -> List[WeilElement]:
    out = []
    for p in range(total + 1):
        for q in range(total + 1 - p):
            out.extend(basis_elements(algebra, p, q))
    return out


def coordinates(w: WeilElement, p: int, q: int) -> List[Rational]:
    """Coefficient vector of a pure element on the monomial basis of W^{p,q}."""
    cp = w.constant_parts()
    return [cp.get(m, ZERO) for m in monomial_basis(w.algebra, p, q)]


# ---------------------------------------------------------------------------
# text syntax


def _fmt_gmono(I, J) -> str:
    parts = []
    i = 0
    while i < len(I):
        k = I.count(I[i])
        parts.append(f"eb{I[i] + 1}" + (f"^{k}" if k > 1 else ""))
        i += k
    if J:
        parts.append("^".join(f"e{j + 1}" for j in J))
    return "*".join(parts)


def format_weil(w: WeilElement) -> str:
    """Text form, e.g. ``2*eb1*e2^e3 - 1/2*x1*dx2*e1``."""
    out = []

    def key(item):
        (I, J, e, S), _ = item
        return (len(I) + len(J), len(I) + len(S), I, J, len(S), S, sum(e), tuple(-x for x in e))

    for (I, J, e, S), c in sorted(w.terms.items(), key=key):
        a = abs(c)
        mag = str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"
        factors = []
        if w.base.nvars:
            bf = format_form(PolyForm(w.base, 10 ** 9, {(e, S): ONE}, _trusted=True))
            if bf != "1":
                factors.extend(bf.replace(" ", "*").split("*"))
        g = _fmt_gmono(I, J)
        if g:
            factors.append(g)
        if mag != "1" or not factors:
            factors.insert(0, mag)
        body = "*".join(factors)
        if not out:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append(("- " if c < 0 else "+ ") + body)
    return " ".join(out) or "0"


class WeilParseError(ValueError):
    pass


def parse_weil(text: str, algebra: LieAlgebraSpec, base: Optional[VariableSet] = None,
               order: Optional[int] = None) -> WeilElement:
    """Parse the text syntax.

    Grammar::

        expr    := ['-'] term (('+'|'-') term)*
        term    := factor ('*' factor)*
        factor  := int ['/' int]          rational coefficient
                 | 'eb' idx ['^' int]     power of an even generator
                 | 'e' idx ('^' 'e' idx)* wedge of odd generators
                 | var ['^' int]          base coordinate (when a base is given)
                 | 'd' var ('^' 'd' var)* base differentials

    Factors are multiplied left to right with the Koszul signs of the
    algebra, so ``e1*dx1`` equals ``-dx1*e1``.  Indices are 1-based.
    """
    s = text.strip()
    if not s:
        raise WeilParseError("empty expression")
    b = base if base is not None else EMPTY
    tokens = re.split(r"\s*([+-])\s*", s)
    if tokens[0] == "":
        tokens = tokens[1:]
    else:
        tokens = ["+"] + tokens
    if len(tokens) % 2:
        raise WeilParseError(f"cannot parse {text!r}")
    total = WeilElement.zero(algebra, base, order) if b.nvars else WeilElement.zero(algebra)
    n = algebra.dim
    for idx in range(0, len(tokens), 2):
        sign, body = tokens[idx], tokens[idx + 1].replace(" ", "")
        if not body:
            raise WeilParseError(f"dangling sign in {text!r}")
        acc = WeilElement.one(algebra, base, order, -1 if sign == "-" else 1)
        for fac in body.split("*"):
            acc = multiply(acc, _parse_factor(fac, algebra, base, order, n))
        total = total + acc
    return total


def _parse_factor(fac: str, algebra, base, order, n) -> WeilElement:
    b = base if base is not None else EMPTY
    if re.fullmatch(r"\d+(/\d+)?", fac):
        return WeilElement.one(algebra, base, order, Rational(fac))
    m = re.fullmatch(r"eb(\d+)(\^(\d+))?", fac)
    if m:
        i = int(m.group(1)) - 1
        if not 0 <= i < n:
            raise WeilParseError(f"generator index out of range in {fac!r}")
        k = int(m.group(3) or 1)
        return WeilElement(algebra, {((i,) * k, (), b.zero_exps(), ()): ONE}, base, order)
    if re.fullmatch(r"e\d+(\^e\d+)*", fac):
        acc = WeilElement.one(algebra, base, order)
        for part in fac.split("^"):
            i = int(part[1:]) - 1
            if not 0 <= i < n:
                raise WeilParseError(f"generator index out of range in {fac!r}")
            acc = multiply(acc, WeilElement.e(algebra, i, base, order))
        return acc
    if b.nvars:
        parts = fac.split("^")
        if all(p.startswith("d") and p[1:] in b._index for p in parts):
            acc = WeilElement.one(algebra, base, order)
            for p in parts:
                acc = multiply(acc, WeilElement(algebra, {((), (), b.zero_exps(), (b.index(p[1:]),)): ONE},
                                                base, order))
            return acc
        m = re.fullmatch(r"([A-Za-z][A-Za-z0-9_]*)(\^(\d+))?", fac)
        if m and m.group(1) in b._index:
            e = [0] * b.nvars
            e[b.index(m.group(1))] = int(m.group(3) or 1)
            return WeilElement(algebra, {((), (), tuple(e), ()): ONE}, base, order)
    raise WeilParseError(f"bad factor {fac!r}")
