"""Chevalley-Eilenberg complexes of Lie algebras and of action algebroids.

Cochains are sums ``f_J e^J`` with ``J`` a strictly increasing tuple of basis
indices.  Without a base the coefficients are rationals (stored as
polynomials in zero variables); with a base ``R^m`` they are truncated
polynomials and the anchor contributes the terms ``e^i a(e_i)(f)``.
"""
from __future__ import annotations

from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from .lie import LieAlgebraSpec, validate_jacobi, JacobiError
from .linear import Rational, SparseMatrix, rank, rank_and_kernel
from .series import (ONE, ZERO, Exps, VariableSet, VectorField, _clean, format_poly, poly_add, poly_mul,
                     poly_truncate)

EMPTY = VariableSet([])


def wedge_insert(i: int, J: Tuple[int, ...]) -> Tuple[int, Optional[Tuple[int, ...]]]:
    """e^i ^ e^J = sign * e^{J'}; sign 0 if i already occurs."""
    if i in J:
        return 0, None
    pos = sum(1 for j in J if j < i)
    return (-1 if pos & 1 else 1), tuple(sorted(J + (i,)))


def wedge_merge(J: Tuple[int, ...], K: Tuple[int, ...]) -> Tuple[int, Optional[Tuple[int, ...]]]:
    if not J:
        return 1, K
    if not K:
        return 1, J
    if set(J) & set(K):
        return 0, None
    inv = sum(1 for a in J for b in K if a > b)
    return (-1 if inv & 1 else 1), tuple(sorted(J + K))


class ActionSpec:
    """Action of g on R^m by polynomial vector fields, ``anchor[i] = a(e_i)``."""

    def __init__(self, algebra: LieAlgebraSpec, base: VariableSet, anchor: Sequence[VectorField]):
        if len(anchor) != algebra.dim:
            raise ValueError("need one anchor field per basis vector")
        for f in anchor:
            if f.vars != base:
                raise ValueError("anchor field lives on a different base")
        self.algebra = algebra
        self.base = base
        self.anchor = list(anchor)

    @property
    def order(self) -> int:
        return min(f.order for f in self.anchor)

    @classmethod
    def trivial(cls, algebra: LieAlgebraSpec, base: VariableSet, order: int) -> "ActionSpec":
        z = VectorField(base, order, [dict() for _ in range(base.nvars)])
        return cls(algebra, base, [z] * algebra.dim)

    @classmethod
    def linear(cls, algebra: LieAlgebraSpec, matrices: Sequence[Sequence[Sequence]], order: int,
               name: str = "u") -> "ActionSpec":
        """a(e_i) = -sum_{ab} (A_i)_{ab} u_b d/du_a, a Lie algebra morphism when i -> A_i is a representation."""
        m = len(matrices[0])
        base = VariableSet.single(name, m)
        fields = []
        for A in matrices:
            comps = []
            for a in range(m):
                comps.append({base.unit(b): -Rational(A[a][b]) for b in range(m) if A[a][b]})
            fields.append(VectorField(base, order, comps))
        return cls(algebra, base, fields)


def validate_action(action: ActionSpec, order: Optional[int] = None) -> Tuple[bool, Optional[Tuple[int, int]]]:
    """Check [a(e_i), a(e_j)] = a([e_i, e_j]) up to the given order."""
    g = action.algebra
    N = action.order if order is None else order
    fields = [f.truncate(min(f.order, N)) if f.order > N else f for f in action.anchor]
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            lhs = fields[i].bracket(fields[j])
            M = lhs.order
            deg = action.base.degree_fn()
            rhs: List[Dict[Exps, Rational]] = [dict() for _ in range(action.base.nvars)]
            for k in range(g.dim):
                c = g.c[k][i][j]
                if c:
                    rhs = [poly_add(r, poly_truncate(a, M, deg), c) for r, a in zip(rhs, fields[k].components)]
            if lhs.components != [_clean(r) for r in rhs]:
                return False, (i, j)
    return True, None


class CEElement:
    """Element of C(g) or of C(g x| R^m): ``terms[J] = coefficient polynomial``."""

    __slots__ = ("algebra", "base", "order", "terms")

    def __init__(self, algebra: LieAlgebraSpec, terms: Optional[Dict] = None, base: Optional[VariableSet] = None,
                 order: Optional[int] = None):
        self.algebra = algebra
        self.base = base if base is not None else EMPTY
        if self.base.nvars and order is None:
            raise ValueError("a base requires a truncation order")
        self.order = order if self.base.nvars else None
        out: Dict[Tuple[int, ...], Dict[Exps, Rational]] = {}
        deg = self.base.degree_fn()
        for J, coef in (terms or {}).items():
            sgn, K = _sort_sign(tuple(J))
            if not sgn:
                continue
            if any(not 0 <= j < algebra.dim for j in K):
                raise ValueError("exterior index out of range")
            if not isinstance(coef, dict):
                coef = {self.base.zero_exps(): Rational(coef)}
            d = {tuple(e): sgn * Rational(c) for e, c in coef.items()}
            if self.order is not None:
                d = poly_truncate(d, self.order, deg)
            out[K] = poly_add(out.get(K, {}), d)
        self.terms = {J: d for J, d in out.items() if d}

    @classmethod
    def generator(cls, algebra: LieAlgebraSpec, i: int) -> "CEElement":
        return cls(algebra, {(i,): ONE})

    def _like(self, terms) -> "CEElement":
        x = CEElement.__new__(CEElement)
        x.algebra, x.base, x.order = self.algebra, self.base, self.order
        x.terms = {J: d for J, d in terms.items() if d}
        return x

    def _compat(self, other: "CEElement") -> None:
        if self.algebra != other.algebra or self.base != other.base:
            raise ValueError("mismatched algebra or base")

    def __add__(self, other: "CEElement") -> "CEElement":
        self._compat(other)
        out = dict(self.terms)
        for J, d in other.terms.items():
            out[J] = poly_add(out.get(J, {}), d)
        r = self._like(out)
        if self.order is not None:
            r.order = min(self.order, other.order)
            r.terms = {J: poly_truncate(d, r.order, self.base.degree_fn()) for J, d in r.terms.items()}
            r.terms = {J: d for J, d in r.terms.items() if d}
        return r

    def scale(self, s) -> "CEElement":
        s = Rational(s)
        return self._like({J: {e: s * c for e, c in d.items()} for J, d in self.terms.items()} if s else {})

    def __neg__(self) -> "CEElement":
        return self.scale(-1)

    def __sub__(self, other: "CEElement") -> "CEElement":
        return self + (-other)

    def __eq__(self, other) -> bool:
        return (isinstance(other, CEElement) and self.algebra == other.algebra and self.base == other.base
                and self.order == other.order and self.terms == other.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def wedge(self, other: "CEElement") -> "CEElement":
        self._compat(other)
        N = self.order if self.order is None else min(self.order, other.order)
        deg = self.base.degree_fn()
        out: Dict[Tuple[int, ...], Dict[Exps, Rational]] = {}
        for J, a in self.terms.items():
            for K, b in other.terms.items():
                sgn, L = wedge_merge(J, K)
                if sgn:
                    prod = poly_mul(a, b, N if N is not None else 0, deg)
                    out[L] = poly_add(out.get(L, {}), prod, Rational(sgn))
        r = self._like(out)
        r.order = N
        return r

    __mul__ = wedge

    def __repr__(self) -> str:
        return f"CEElement({format_ce(self)})"


def _sort_sign(J: Tuple[int, ...]) -> Tuple[int, Tuple[int, ...]]:
    if len(set(J)) != len(J):
        return 0, J
    inv = sum(1 for a in range(len(J)) for b in range(a + 1, len(J)) if J[a] > J[b])
    return (-1 if inv & 1 else 1), tuple(sorted(J))


def format_ce(x: CEElement) -> str:
    parts = []
    for J in sorted(x.terms, key=lambda J: (len(J), J)):
        poly = format_poly(x.terms[J], x.base) if x.base.nvars else str(x.terms[J][()])
        mono = "^".join(f"e{j + 1}" for j in J)
        if not mono:
            parts.append(f"({poly})")
        else:
            parts.append(f"({poly})*{mono}")
    return " + ".join(parts) or "0"


def _dce_generator(algebra: LieAlgebraSpec, k: int) -> Dict[Tuple[int, int], Rational]:
    """d e^k = -1/2 sum c^k_ij e^i e^j = -sum_{i<j} c^k_ij e^i e^j."""
    out = {}
    for i in range(algebra.dim):
        for j in range(i + 1, algebra.dim):
            c = algebra.c[k][i][j]
            if c:
                out[(i, j)] = -c
    return out


def ce_differential(x: CEElement, action: Optional[ActionSpec] = None) -> CEElement:
    g = x.algebra
    if action is not None:
        if action.algebra != g or action.base != x.base:
            raise ValueError("action does not match the cochain's algebra and base")
    elif x.base.nvars:
        raise ValueError("a cochain with base needs an action")
    gens = [_dce_generator(g, k) for k in range(g.dim)]
    out: Dict[Tuple[int, ...], Dict[Exps, Rational]] = {}
    N = x.order
    if action is not None:
        N = min(x.order, action.order) - 1
    deg = x.base.degree_fn()

    def add(J, d, s):
        out[J] = poly_add(out.get(J, {}), d, Rational(s))

    for J, f in x.terms.items():
        if N is not None:
            f_t = poly_truncate(f, N, deg)
        else:
            f_t = f
        # derivation on e^J
        for m, j in enumerate(J):
            rest_before, rest_after = J[:m], J[m + 1:]
            for (a, b), c in gens[j].items():
                s1, K = wedge_merge(rest_before, (a, b))
                if not s1:
                    continue
                s2, L = wedge_merge(K, rest_after)
                if not s2:
                    continue
                sign = -1 if m & 1 else 1
                add(L, f_t, c * s1 * s2 * sign)
        if action is not None:
            for i, a in enumerate(action.anchor):
                af = a.apply(f, N)
                if af:
                    s, K = wedge_insert(i, J)
                    if s:
                        add(K, af, s)
    r = x._like(out)
    r.order = N
    return r


def basis(algebra: LieAlgebraSpec, k: int) -> List[Tuple[int, ...]]:
    return list(combinations(range(algebra.dim), k))


def differential_matrix(algebra: LieAlgebraSpec, k: int) -> SparseMatrix:
    """Matrix of d_CE from the degree-k to the degree-(k+1) basis."""
    src = basis(algebra, k)
    tgt = {J: r for r, J in enumerate(basis(algebra, k + 1))}
    ent = {}
    for col, J in enumerate(src):
        d = ce_differential(CEElement(algebra, {J: ONE}))
        for K, coef in d.terms.items():
            ent[(tgt[K], col)] = coef.get((), ZERO)
    return SparseMatrix(len(tgt), len(src), ent)


def cohomology_dims(algebra: LieAlgebraSpec) -> List[int]:
    ok, w = validate_jacobi(algebra)
    if not ok:
        raise JacobiError(w)
    n = algebra.dim
    ranks = [rank(differential_matrix(algebra, k)) for k in range(n + 1)]
    dims = [len(basis(algebra, k)) for k in range(n + 1)]
    return [dims[k] - ranks[k] - (ranks[k - 1] if k else 0) for k in range(n + 1)]


def square_defect(algebra: LieAlgebraSpec) -> Optional[Tuple[int, ...]]:
    """A basis monomial on which d_CE^2 is nonzero, or None.  Works on any bracket table."""
    for k in range(algebra.dim + 1):
        for J in basis(algebra, k):
            x = CEElement(algebra, {J: ONE})
            if not ce_differential(ce_differential(x)).is_zero():
                return J
    return None


def cocycle_basis(algebra: LieAlgebraSpec, k: int) -> List[CEElement]:
    _, ker = rank_and_kernel(differential_matrix(algebra, k))
    src = basis(algebra, k)
    return [CEElement(algebra, {J: v for J, v in zip(src, vec) if v}) for vec in ker]
