"""Lie algebras from structure constants and their local groups.

The local group is realized in exponential coordinates: the unit is 0, the
inverse is ``x -> -x`` and the product is the Baker-Campbell-Hausdorff
series, generated degree by degree with Varadarajan's recursion.

Basis indices are 0-based in code and 1-based in JSON files and in printed
names (``e1, e2, ...``).
"""
from __future__ import annotations

import json
from functools import lru_cache
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from .linear import Rational
from .series import (ONE, ZERO, Exps, SeriesMap, VariableSet, VectorField, _Substituter, _clean, poly_add,
                     poly_mul, poly_truncate)

GVec = List[Dict[Exps, Rational]]  # g-valued polynomial: one dict per basis coordinate


class JacobiError(ValueError):
    def __init__(self, witness):
        super().__init__(f"Jacobi identity fails on basis triple {tuple(w + 1 for w in witness)}")
        self.witness = witness


class LieAlgebraSpec:
    """Structure constants ``c[k][i][j] = <e^k, [e_i, e_j]>``, antisymmetric in (i, j)."""

    def __init__(self, name: str, dim: int, brackets: Optional[Dict[Tuple[int, int], Dict[int, Rational]]] = None):
        if dim < 0:
            raise ValueError("negative dimension")
        self.name = name
        self.dim = dim
        c = [[[ZERO] * dim for _ in range(dim)] for _ in range(dim)]
        for (i, j), terms in (brackets or {}).items():
            if not (0 <= i < dim and 0 <= j < dim):
                raise ValueError(f"bracket index ({i},{j}) out of range")
            if i == j:
                if any(Rational(v) for v in terms.values()):
                    raise ValueError("[e_i, e_i] must vanish")
                continue
            for k, v in terms.items():
                if not 0 <= k < dim:
                    raise ValueError(f"bracket result index {k} out of range")
                v = Rational(v)
                c[k][i][j] += v
                c[k][j][i] -= v
        self.c = c
        self._nonzero = [(i, j, k, c[k][i][j]) for k in range(dim) for i in range(dim) for j in range(dim)
                         if c[k][i][j]]

    def __repr__(self) -> str:
        return f"LieAlgebraSpec({self.name!r}, dim={self.dim})"

    def __eq__(self, other) -> bool:
        return isinstance(other, LieAlgebraSpec) and self.dim == other.dim and self.c == other.c

    def __hash__(self):
        return hash((self.dim, tuple(tuple(tuple(r) for r in m) for m in self.c)))

    def structure_constants(self):
        """Nonzero (i, j, k, c^k_ij), both orders of (i, j) included."""
        return self._nonzero

    def is_abelian(self) -> bool:
        return not self._nonzero

    def bracket(self, u: Sequence, v: Sequence) -> List[Rational]:
        out = [ZERO] * self.dim
        for i, j, k, c in self._nonzero:
            if u[i] and v[j]:
                out[k] += c * u[i] * v[j]
        return out

    def basis(self, i: int) -> List[Rational]:
        v = [ZERO] * self.dim
        v[i] = ONE
        return v

    # serialisation -------------------------------------------------------
    def to_json(self) -> dict:
        br = []
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                terms = [{"k": k + 1, "coeff": _fmt(self.c[k][i][j])} for k in range(self.dim) if self.c[k][i][j]]
                if terms:
                    br.append({"i": i + 1, "j": j + 1, "terms": terms})
        return {"name": self.name, "dim": self.dim, "brackets": br}

    @classmethod
    def from_json(cls, data: dict) -> "LieAlgebraSpec":
        allowed = {"name", "dim", "brackets", "schema"}
        extra = set(data) - allowed
        if extra:
            raise ValueError(f"unknown fields in Lie algebra spec: {sorted(extra)}")
        if "schema" in data and data["schema"] != 1:
            raise ValueError(f"unsupported schema version {data['schema']}")
        try:
            name = str(data["name"])
            dim = int(data["dim"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed Lie algebra spec: {exc}") from None
        brackets: Dict[Tuple[int, int], Dict[int, Rational]] = {}
        for b in data.get("brackets", []):
            if set(b) - {"i", "j", "terms"}:
                raise ValueError(f"unknown fields in bracket entry: {sorted(set(b) - {'i', 'j', 'terms'})}")
            i, j = int(b["i"]) - 1, int(b["j"]) - 1
            if not (0 <= i < dim and 0 <= j < dim):
                raise ValueError(f"bracket index ({i + 1},{j + 1}) out of range 1..{dim}")
            terms = brackets.setdefault((i, j), {})
            for t in b["terms"]:
                if set(t) - {"k", "coeff"}:
                    raise ValueError("unknown fields in bracket term")
                k = int(t["k"]) - 1
                terms[k] = terms.get(k, ZERO) + Rational(str(t["coeff"]))
        return cls(name, dim, brackets)

    @classmethod
    def load(cls, path: str) -> "LieAlgebraSpec":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def _fmt(c: Rational) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


# built-in algebras ---------------------------------------------------------

def abelian(n: int = 2) -> LieAlgebraSpec:
    return LieAlgebraSpec(f"abelian{n}", n, {})


def heisenberg() -> LieAlgebraSpec:
    """h3 with [e1, e2] = e3."""
    return LieAlgebraSpec("heisenberg", 3, {(0, 1): {2: ONE}})


def sl2() -> LieAlgebraSpec:
    """Basis (h, e, f): [h,e] = 2e, [h,f] = -2f, [e,f] = h."""
    return LieAlgebraSpec("sl2", 3, {(0, 1): {1: Rational(2)}, (0, 2): {2: Rational(-2)}, (1, 2): {0: ONE}})


def aff1() -> LieAlgebraSpec:
    """The 2-dimensional nonabelian algebra, [e1, e2] = e2."""
    return LieAlgebraSpec("aff1", 2, {(0, 1): {1: ONE}})


BUILTINS = {"abelian": abelian, "abelian2": abelian, "heisenberg": heisenberg, "h3": heisenberg,
            "sl2": sl2, "aff1": aff1}


def builtin(name: str) -> LieAlgebraSpec:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise ValueError(f"unknown built-in algebra {name!r}; choose from {sorted(BUILTINS)}") from None


def validate_jacobi(spec: LieAlgebraSpec) -> Tuple[bool, Optional[Tuple[int, int, int]]]:
    """Check the cyclic sum [[e_i,e_j],e_k] + cyclic = 0 on all triples."""
    n = spec.dim
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                ei, ej, ek = spec.basis(i), spec.basis(j), spec.basis(k)
                a = spec.bracket(spec.bracket(ei, ej), ek)
                b = spec.bracket(spec.bracket(ej, ek), ei)
                c = spec.bracket(spec.bracket(ek, ei), ej)
                if any(x + y + z for x, y, z in zip(a, b, c)):
                    return False, (i, j, k)
    return True, None


# g-valued polynomial helpers ------------------------------------------------

def gbracket(spec: LieAlgebraSpec, A: GVec, B: GVec, N: int, deg) -> GVec:
    out: GVec = [dict() for _ in range(spec.dim)]
    cache = {}
    for i, j, k, c in spec.structure_constants():
        if not A[i] or not B[j]:
            continue
        key = (i, j)
        if key not in cache:
            cache[key] = poly_mul(A[i], B[j], N, deg)
        out[k] = poly_add(out[k], cache[key], c)
    return out


def gadd(A: GVec, B: GVec, s: Rational = ONE) -> GVec:
    return [poly_add(a, b, s) for a, b in zip(A, B)]


def gscale(A: GVec, s: Rational) -> GVec:
    return [{e: s * c for e, c in a.items()} for a in A]


@lru_cache(maxsize=None)
def _bernoulli(m: int) -> Rational:
    # B_m with B_1 = -1/2
    if m == 0:
        return ONE
    from math import comb
    return -sum(comb(m + 1, k) * _bernoulli(k) for k in range(m)) / (m + 1)


def _compositions(total: int, parts: int):
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def bch_terms(spec: LieAlgebraSpec, order: int) -> Tuple[VariableSet, GVec]:
    """BCH series z(x, y) over the variable blocks ('x', n), ('y', n), up to total degree ``order``."""
    n = spec.dim
    V = VariableSet([("x", n), ("y", n)])
    deg = V.degree_fn()
    X: GVec = [{V.unit(i): ONE} for i in range(n)]
    Y: GVec = [{V.unit(n + i): ONE} for i in range(n)]
    Z: Dict[int, GVec] = {1: gadd(X, Y)}
    XpY = Z[1]
    XmY = gadd(X, Y, -ONE)
    from math import factorial
    for m in range(1, order):
        acc = gscale(gbracket(spec, XmY, Z[m], order, deg), Rational(1, 2))
        memo: Dict[Tuple[int, ...], GVec] = {}

        def nested(ks: Tuple[int, ...]) -> GVec:
            if ks in memo:
                return memo[ks]
            if len(ks) == 1:
                r = gbracket(spec, Z[ks[0]], XpY, order, deg)
            else:
                r = gbracket(spec, Z[ks[0]], nested(ks[1:]), order, deg)
            memo[ks] = r
            return r

        p = 1
        while 2 * p <= m:
            K = _bernoulli(2 * p) / factorial(2 * p)
            for ks in _compositions(m, 2 * p):
                acc = gadd(acc, nested(ks), K)
            p += 1
        Z[m + 1] = gscale(acc, Rational(1, m + 1))
    total: GVec = [dict() for _ in range(n)]
    for m in range(1, order + 1):
        total = gadd(total, Z[m])
    return V, [poly_truncate(c, order, deg) for c in total]


class GroupChart:
    """Local group of a Lie algebra in exponential coordinates, truncated at ``order``."""

    def __init__(self, algebra: LieAlgebraSpec, order: int):
        ok, w = validate_jacobi(algebra)
        if not ok:
            raise JacobiError(w)
        if order < 1:
            raise ValueError("order must be at least 1")
        self.algebra = algebra
        self.order = order
        n = algebra.dim
        V, z = bch_terms(algebra, order)
        self.point = VariableSet.single("x", n)
        self.pair = V
        self.multiplication = SeriesMap(V, self.point, order, z)
        self.inversion = SeriesMap.linear(self.point, self.point, {i: {i: -ONE} for i in range(n)})
        self.cache: Dict = {}

    def truncated(self, order: int) -> "GroupChart":
        """The same chart at a lower order (the BCH terms are reused, not recomputed)."""
        if order >= self.order:
            return self
        key = ("truncated", order)
        if key not in self.cache:
            c = GroupChart.__new__(GroupChart)
            c.algebra, c.order, c.point, c.pair, c.inversion = self.algebra, order, self.point, self.pair, self.inversion
            c.multiplication = SeriesMap(self.pair, self.point, order, self.multiplication.components)
            c.cache = {}
            self.cache[key] = c
        return self.cache[key]

    def __repr__(self) -> str:
        return f"GroupChart({self.algebra.name}, N={self.order})"

    @property
    def dim(self) -> int:
        return self.algebra.dim

    def multiply(self, u: GVec, v: GVec, vars: VariableSet, N: Optional[int] = None) -> GVec:
        """BCH(u, v) for g-valued polynomials u, v over ``vars`` without constant terms."""
        if N is None:
            N = self.order
        src = SeriesMap(vars, self.pair, None, list(u) + list(v))
        sub = _Substituter(src, N)
        return [sub.evaluate(c) for c in self.multiplication.components]

    def block(self, vars: VariableSet, b: int, sign: int = 1) -> GVec:
        """Coordinates of block b of ``vars`` as a g-valued polynomial."""
        off = vars.offsets[b]
        return [{vars.unit(off + i): Rational(sign)} for i in range(self.dim)]

    # invariant fields --------------------------------------------------
    def _linear_part(self, which: int, X: Sequence) -> GVec:
        """Terms of z(x, y) linear in block ``which`` (0 -> x, 1 -> y), contracted with X."""
        n = self.dim
        out: GVec = [dict() for _ in range(n)]
        lo = n * which
        for k, comp in enumerate(self.multiplication.components):
            acc: Dict[Exps, Rational] = {}
            for e, c in comp.items():
                lin = e[lo:lo + n]
                if sum(lin) != 1:
                    continue
                j = lin.index(1)
                if not X[j]:
                    continue
                rest = e[n - lo:2 * n - lo] if which == 0 else e[:n]
                acc[rest] = acc.get(rest, ZERO) + c * X[j]
            out[k] = _clean(acc)
        return out

    def left_invariant_field(self, X: Sequence) -> VectorField:
        """d/dt|0 of x * exp(tX); known to order N - 1."""
        return VectorField(self.point, self.order - 1, self._linear_part(1, _vec(X, self.dim)))

    def right_invariant_field(self, X: Sequence) -> VectorField:
        """d/dt|0 of exp(tX) * x; known to order N - 1."""
        return VectorField(self.point, self.order - 1, self._linear_part(0, _vec(X, self.dim)))


def _vec(X, n) -> List[Rational]:
    if isinstance(X, int):
        v = [ZERO] * n
        v[X] = ONE
        return v
    if len(X) != n:
        raise ValueError("direction has wrong length")
    return [Rational(x) for x in X]


def bch(spec: LieAlgebraSpec, order: int) -> GroupChart:
    return GroupChart(spec, order)


def left_invariant_field(chart: GroupChart, X) -> VectorField:
    return chart.left_invariant_field(X)


def right_invariant_field(chart: GroupChart, X) -> VectorField:
    return chart.right_invariant_field(X)


def embed_field(field: VectorField, vars: VariableSet, block: int) -> VectorField:
    """Place a field on one point-chart into block ``block`` of a product chart."""
    n = field.vars.nvars
    off = vars.offsets[block]
    comps: List[Dict[Exps, Rational]] = [dict() for _ in range(vars.nvars)]
    z = [0] * vars.nvars
    for a, comp in enumerate(field.components):
        d = {}
        for e, c in comp.items():
            ne = list(z)
            ne[off:off + n] = e
            d[tuple(ne)] = c
        comps[off + a] = d
    return VectorField(vars, field.order, comps)


def power_vars(n: int, p: int, prefix: str = "g", start: int = 1) -> VariableSet:
    return VariableSet.power(prefix, p, n, start)


def sharp_field(chart: GroupChart, p: int, i: int, X, vars: Optional[VariableSet] = None) -> VectorField:
    """Generator of t -> (.., g_i exp(-tX), exp(tX) g_{i+1}, ..) on G^p (1 <= i <= p).

    This is the plain t-derivative of the action curve: right translation by
    -X on factor i and left translation by +X on factor i+1.
    """
    if not 1 <= i <= p:
        raise ValueError(f"sharp field index {i} outside 1..{p}")
    if vars is None:
        vars = power_vars(chart.dim, p)
    X = _vec(X, chart.dim)
    f = embed_field(chart.left_invariant_field(X), vars, i - 1).scale(-1)
    if i < p:
        f = f + embed_field(chart.right_invariant_field(X), vars, i)
    return f


def diagonal_left_field(chart: GroupChart, X, vars: VariableSet) -> VectorField:
    """X^L acting on every block of ``vars`` (generator of right multiplication on each factor)."""
    X = _vec(X, chart.dim)
    base = chart.left_invariant_field(X)
    out = None
    for b in range(len(vars.blocks)):
        f = embed_field(base, vars, b)
        out = f if out is None else out + f
    return out
