"""Truncated polynomials and polynomial differential forms.

A :class:`PolyForm` is a finite sum of terms ``c * x^a dx_S`` where ``a`` is
an exponent tuple over all variables and ``S`` a strictly increasing tuple of
variable indices.  Every element carries its truncation order ``N``: terms of
weighted degree above ``N`` are dropped and the remaining coefficients are
exact.  Operations that differentiate lower the order, so the order of a result
is always the order to which it is actually known.

Variables come in named blocks.  A block may have weight 0; such variables
(the homotopy parameter ``t``) do not count towards the degree and must only
ever occur polynomially.
"""
from __future__ import annotations

import numbers
from operator import add
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .linear import Rational

Exps = Tuple[int, ...]
Dx = Tuple[int, ...]
Key = Tuple[Exps, Dx]

ZERO = Rational(0)
ONE = Rational(1)


class VariableSet:
    """Ordered named blocks of coordinates."""

    __slots__ = ("blocks", "weights", "nvars", "offsets", "names", "_index", "_weight_mask", "_all_weighted")

    def __init__(self, blocks: Sequence[Tuple[str, int]], weights: Optional[Sequence[int]] = None):
        blocks = tuple((str(b), int(d)) for b, d in blocks)
        seen = set()
        for b, d in blocks:
            if b in seen:
                raise ValueError(f"duplicate block name {b!r}")
            if d < 0:
                raise ValueError("negative block dimension")
            seen.add(b)
        self.blocks = blocks
        self.weights = tuple(weights) if weights is not None else (1,) * len(blocks)
        if len(self.weights) != len(blocks) or any(w not in (0, 1) for w in self.weights):
            raise ValueError("weights must be 0 or 1, one per block")
        offs = []
        o = 0
        for _, d in blocks:
            offs.append(o)
            o += d
        self.offsets = tuple(offs)
        self.nvars = o
        names = []
        for b, d in blocks:
            sep = "_" if b[-1:].isdigit() else ""
            names.extend(f"{b}{sep}{k + 1}" for k in range(d))
        self.names = tuple(names)
        self._index = {nm: i for i, nm in enumerate(names)}
        mask = []
        for (b, d), w in zip(blocks, self.weights):
            mask.extend([w] * d)
        self._weight_mask = tuple(mask)
        self._all_weighted = all(mask)

    @classmethod
    def single(cls, name: str, dim: int) -> "VariableSet":
        return cls([(name, dim)])

    @classmethod
    def power(cls, prefix: str, count: int, dim: int, start: int = 0) -> "VariableSet":
        """Blocks ``prefix{start}``, ..., one per factor of a cartesian power."""
        return cls([(f"{prefix}{start + i}", dim) for i in range(count)])

    def __eq__(self, other) -> bool:
        return isinstance(other, VariableSet) and self.blocks == other.blocks and self.weights == other.weights

    def __hash__(self) -> int:
        return hash((self.blocks, self.weights))

    def __repr__(self) -> str:
        return f"VariableSet({list(self.blocks)})"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown variable {name!r}") from None

    def block_range(self, b) -> range:
        if isinstance(b, str):
            b = [nm for nm, _ in self.blocks].index(b)
        return range(self.offsets[b], self.offsets[b] + self.blocks[b][1])

    def degree(self, e: Exps) -> int:
        if self._all_weighted:
            return sum(e)
        return sum(x for x, w in zip(e, self._weight_mask) if w)

    def degree_fn(self) -> Callable[[Exps], int]:
        if self._all_weighted:
            return sum
        mask = self._weight_mask
        return lambda e: sum(x for x, w in zip(e, mask) if w)

    def zero_exps(self) -> Exps:
        return (0,) * self.nvars

    def unit(self, i: int) -> Exps:
        e = [0] * self.nvars
        e[i] = 1
        return tuple(e)


# ---------------------------------------------------------------------------
# raw dict kernels

def _clean(d: Dict) -> Dict:
    return {k: v for k, v in d.items() if v}


def _bucket(a: Dict[Exps, Rational], deg) -> Dict[int, List[Tuple[Exps, Rational]]]:
    out: Dict[int, List[Tuple[Exps, Rational]]] = {}
    for e, c in a.items():
        out.setdefault(deg(e), []).append((e, c))
    return out


def poly_mul(a: Dict[Exps, Rational], b: Dict[Exps, Rational], N: int, deg) -> Dict[Exps, Rational]:
    """Product of two coefficient dicts, dropping degree > N."""
    if not a or not b:
        return {}
    ba = _bucket(a, deg)
    bb = _bucket(b, deg)
    out: Dict[Exps, Rational] = {}
    get = out.get
    for da, la in ba.items():
        for db, lb in bb.items():
            if da + db > N:
                continue
            for ea, ca in la:
                for eb, cb in lb:
                    e = tuple(map(add, ea, eb))
                    out[e] = get(e, ZERO) + ca * cb
    return _clean(out)


def poly_add(a: Dict, b: Dict, s: Rational = ONE) -> Dict:
    out = dict(a)
    get = out.get
    for k, v in b.items():
        out[k] = get(k, ZERO) + s * v
    return _clean(out)


def poly_diff(a: Dict[Exps, Rational], i: int) -> Dict[Exps, Rational]:
    out: Dict[Exps, Rational] = {}
    for e, c in a.items():
        k = e[i]
        if k:
            ne = e[:i] + (k - 1,) + e[i + 1:]
            out[ne] = out.get(ne, ZERO) + k * c
    return out


def poly_truncate(a: Dict[Exps, Rational], N: int, deg) -> Dict[Exps, Rational]:
    return {e: c for e, c in a.items() if deg(e) <= N}


def merge_sign(S: Dx, T: Dx) -> Tuple[int, Optional[Dx]]:
    """Sign and sorted union for dx_S ^ dx_T (sign 0 when they overlap)."""
    if not S:
        return 1, T
    if not T:
        return 1, S
    st = set(S)
    for t in T:
        if t in st:
            return 0, None
    inv = 0
    for s in S:
        for t in T:
            if s > t:
                inv += 1
    return (-1 if inv & 1 else 1), tuple(sorted(S + T))


# ---------------------------------------------------------------------------


class TruncatedSeries:
    """Polynomial over a VariableSet truncated at weighted degree ``order``."""

    __slots__ = ("vars", "order", "coeffs")

    def __init__(self, vars: VariableSet, order: int, coeffs: Optional[Dict[Exps, Rational]] = None, *, _trusted=False):
        self.vars = vars
        self.order = order
        if _trusted:
            self.coeffs = coeffs
            return
        deg = vars.degree_fn()
        out: Dict[Exps, Rational] = {}
        for e, c in (coeffs or {}).items():
            e = tuple(e)
            if len(e) != vars.nvars:
                raise ValueError("exponent length does not match variable count")
            c = Rational(c)
            if c and deg(e) <= order:
                out[e] = out.get(e, ZERO) + c
        self.coeffs = _clean(out)

    @classmethod
    def constant(cls, vars: VariableSet, order: int, c=1) -> "TruncatedSeries":
        return cls(vars, order, {vars.zero_exps(): Rational(c)})

    @classmethod
    def variable(cls, vars: VariableSet, order: int, i: int, c=1) -> "TruncatedSeries":
        return cls(vars, order, {vars.unit(i): Rational(c)})

    def _check(self, other: "TruncatedSeries") -> None:
        if self.vars != other.vars:
            raise ValueError("variable-set mismatch")
        if self.order != other.order:
            raise ValueError(f"truncation order mismatch {self.order} vs {other.order}")

    def __add__(self, other):
        self._check(other)
        return TruncatedSeries(self.vars, self.order, poly_add(self.coeffs, other.coeffs), _trusted=True)

    def __sub__(self, other):
        self._check(other)
        return TruncatedSeries(self.vars, self.order, poly_add(self.coeffs, other.coeffs, -ONE), _trusted=True)

    def __neg__(self):
        return TruncatedSeries(self.vars, self.order, {e: -c for e, c in self.coeffs.items()}, _trusted=True)

    def scale(self, s) -> "TruncatedSeries":
        s = Rational(s)
        if not s:
            return TruncatedSeries(self.vars, self.order, {}, _trusted=True)
        return TruncatedSeries(self.vars, self.order, {e: s * c for e, c in self.coeffs.items()}, _trusted=True)

    def __mul__(self, other):
        if isinstance(other, numbers.Rational):
            return self.scale(other)
        self._check(other)
        return TruncatedSeries(self.vars, self.order,
                               poly_mul(self.coeffs, other.coeffs, self.order, self.vars.degree_fn()), _trusted=True)

    __rmul__ = scale

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.vars == other.vars and self.order == other.order and self.coeffs == other.coeffs

    def __repr__(self) -> str:
        return f"TruncatedSeries({format_poly(self.coeffs, self.vars) or '0'}, N={self.order})"

    def is_zero(self) -> bool:
        return not self.coeffs

    def constant_term(self) -> Rational:
        return self.coeffs.get(self.vars.zero_exps(), ZERO)

    def diff(self, i: int) -> "TruncatedSeries":
        """Partial derivative; the result is known only to order N-1."""
        d = poly_diff(self.coeffs, i)
        return TruncatedSeries(self.vars, self.order - 1, poly_truncate(d, self.order - 1, self.vars.degree_fn()),
                               _trusted=True)

    def truncate(self, N: int) -> "TruncatedSeries":
        if N > self.order:
            raise ValueError("cannot raise truncation order")
        return TruncatedSeries(self.vars, N, poly_truncate(self.coeffs, N, self.vars.degree_fn()), _trusted=True)

    def to_form(self) -> "PolyForm":
        return PolyForm(self.vars, self.order, {(e, ()): c for e, c in self.coeffs.items()}, _trusted=True)


class PolyForm:
    """Polynomial-coefficient differential form truncated at order N."""

    __slots__ = ("vars", "order", "terms")

    def __init__(self, vars: VariableSet, order: int, terms: Optional[Dict[Key, Rational]] = None, *, _trusted=False):
        self.vars = vars
        self.order = order
        if _trusted:
            self.terms = terms
            return
        deg = vars.degree_fn()
        out: Dict[Key, Rational] = {}
        n = vars.nvars
        for (e, S), c in (terms or {}).items():
            e = tuple(e)
            S = tuple(S)
            if len(e) != n:
                raise ValueError("exponent length does not match variable count")
            if any(not (0 <= s < n) for s in S):
                raise ValueError("dx index out of range")
            sgn = _perm_sign(S)
            if not sgn:
                continue
            c = Rational(c) * sgn
            if c and deg(e) <= order:
                k = (e, tuple(sorted(S)))
                out[k] = out.get(k, ZERO) + c
        self.terms = _clean(out)

    # constructors
    @classmethod
    def zero(cls, vars: VariableSet, order: int) -> "PolyForm":
        return cls(vars, order, {}, _trusted=True)

    @classmethod
    def constant(cls, vars: VariableSet, order: int, c=1) -> "PolyForm":
        c = Rational(c)
        return cls(vars, order, {(vars.zero_exps(), ()): c} if c else {}, _trusted=True)

    @classmethod
    def coordinate(cls, vars: VariableSet, order: int, i: int) -> "PolyForm":
        return cls(vars, order, {(vars.unit(i), ()): ONE} if order >= 1 else {}, _trusted=True)

    @classmethod
    def differential(cls, vars: VariableSet, order: int, i: int) -> "PolyForm":
        return cls(vars, order, {(vars.zero_exps(), (i,)): ONE}, _trusted=True)

    @classmethod
    def monomial(cls, vars: VariableSet, order: int, exps: Sequence[int], dx: Sequence[int] = (), c=1) -> "PolyForm":
        return cls(vars, order, {(tuple(exps), tuple(dx)): Rational(c)})

    # basic algebra
    def _check(self, other: "PolyForm") -> None:
        if not isinstance(other, PolyForm):
            raise TypeError("expected a PolyForm")
        if self.vars != other.vars:
            raise ValueError("variable-set mismatch")
        if self.order != other.order:
            raise ValueError(f"truncation order mismatch {self.order} vs {other.order}")

    def __add__(self, other: "PolyForm") -> "PolyForm":
        self._check(other)
        return PolyForm(self.vars, self.order, poly_add(self.terms, other.terms), _trusted=True)

    def __sub__(self, other: "PolyForm") -> "PolyForm":
        self._check(other)
        return PolyForm(self.vars, self.order, poly_add(self.terms, other.terms, -ONE), _trusted=True)

    def __neg__(self) -> "PolyForm":
        return PolyForm(self.vars, self.order, {k: -c for k, c in self.terms.items()}, _trusted=True)

    def scale(self, s) -> "PolyForm":
        s = Rational(s)
        if not s:
            return PolyForm.zero(self.vars, self.order)
        return PolyForm(self.vars, self.order, {k: s * c for k, c in self.terms.items()}, _trusted=True)

    def __mul__(self, other):
        if isinstance(other, numbers.Rational):
            return self.scale(other)
        return multiply(self, other)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyForm):
            return NotImplemented
        return self.vars == other.vars and self.order == other.order and self.terms == other.terms

    def __hash__(self):
        return hash((self.vars, self.order, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"PolyForm({format_form(self) or '0'}, N={self.order})"

    def __str__(self) -> str:
        return format_form(self) or "0"

    def is_zero(self) -> bool:
        return not self.terms

    def truncate(self, N: int) -> "PolyForm":
        if N > self.order:
            raise ValueError("cannot raise truncation order")
        if N == self.order:
            return self
        deg = self.vars.degree_fn()
        return PolyForm(self.vars, N, {k: c for k, c in self.terms.items() if deg(k[0]) <= N}, _trusted=True)

    def form_degrees(self) -> set:
        return {len(S) for (_, S) in self.terms}

    def homogeneous(self, q: int) -> "PolyForm":
        return PolyForm(self.vars, self.order, {k: c for k, c in self.terms.items() if len(k[1]) == q}, _trusted=True)

    def max_poly_degree(self) -> int:
        deg = self.vars.degree_fn()
        return max((deg(e) for e, _ in self.terms), default=0)

    def by_dx(self) -> Dict[Dx, Dict[Exps, Rational]]:
        out: Dict[Dx, Dict[Exps, Rational]] = {}
        for (e, S), c in self.terms.items():
            out.setdefault(S, {})[e] = c
        return out

    @classmethod
    def from_by_dx(cls, vars: VariableSet, order: int, parts: Dict[Dx, Dict[Exps, Rational]]) -> "PolyForm":
        return cls(vars, order, {(e, S): c for S, d in parts.items() for e, c in d.items() if c}, _trusted=True)

    def value_at_zero(self) -> Rational:
        """Constant term of the degree-0 part (pullback to the origin)."""
        return self.terms.get((self.vars.zero_exps(), ()), ZERO)

    def restrict_to_origin(self) -> Rational:
        return self.value_at_zero()

    def contract(self, field: "VectorField") -> "PolyForm":
        """Interior product with a polynomial vector field."""
        if field.vars != self.vars:
            raise ValueError("variable-set mismatch")
        N = min(self.order, field.order)
        deg = self.vars.degree_fn()
        out: Dict[Key, Rational] = {}
        for S, coef in self.by_dx().items():
            for pos, j in enumerate(S):
                comp = field.components[j]
                if not comp:
                    continue
                sgn = -ONE if pos & 1 else ONE
                rest = S[:pos] + S[pos + 1:]
                prod = poly_mul(coef, comp, N, deg)
                for e, c in prod.items():
                    k = (e, rest)
                    out[k] = out.get(k, ZERO) + sgn * c
        return PolyForm(self.vars, N, _clean(out), _trusted=True)

    def lie_derivative(self, field: "VectorField") -> "PolyForm":
        """Lie derivative; the result is known to order min(N, M) - 1."""
        if field.vars != self.vars:
            raise ValueError("variable-set mismatch")
        N = min(self.order, field.order) - 1
        deg = self.vars.degree_fn()
        out: Dict[Dx, Dict[Exps, Rational]] = {}
        dcomp_cache: Dict[int, Dict[Dx, Dict[Exps, Rational]]] = {}
        for S, coef in self.by_dx().items():
            # X(f) dx_S
            acc = out.setdefault(S, {})
            for j, comp in enumerate(field.components):
                if not comp:
                    continue
                df = poly_diff(coef, j)
                if df:
                    for e, c in poly_mul(df, comp, N, deg).items():
                        acc[e] = acc.get(e, ZERO) + c
            # f dx_{s1} ... d(X^{s}) ... dx_{sq}
            for pos, s in enumerate(S):
                if s not in dcomp_cache:
                    comp = field.components[s]
                    dcomp_cache[s] = {(i,): poly_diff(comp, i) for i in range(self.vars.nvars)} if comp else {}
                for (i,), dc in dcomp_cache[s].items():
                    if not dc:
                        continue
                    if i in S and i != s:
                        continue
                    newS = list(S)
                    newS[pos] = i
                    sgn = _perm_sign(newS)
                    key = tuple(sorted(newS))
                    tgt = out.setdefault(key, {})
                    for e, c in poly_mul(coef, dc, N, deg).items():
                        tgt[e] = tgt.get(e, ZERO) + sgn * c
        return PolyForm.from_by_dx(self.vars, N, {S: _clean(d) for S, d in out.items()})


def _perm_sign(seq: Sequence[int]) -> int:
    inv = 0
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                inv += 1
            elif seq[i] == seq[j]:
                return 0
    return -1 if inv & 1 else 1


class VectorField:
    """Polynomial vector field: one coefficient dict per coordinate."""

    __slots__ = ("vars", "order", "components")

    def __init__(self, vars: VariableSet, order: int, components: Sequence[Dict[Exps, Rational]]):
        if len(components) != vars.nvars:
            raise ValueError("one component per coordinate required")
        deg = vars.degree_fn()
        self.vars = vars
        self.order = order
        self.components = [poly_truncate(_clean(dict(c)), order, deg) for c in components]

    @classmethod
    def from_series(cls, comps: Sequence[TruncatedSeries]) -> "VectorField":
        vs = comps[0].vars
        N = min(c.order for c in comps)
        return cls(vs, N, [c.coeffs for c in comps])

    def __eq__(self, other) -> bool:
        return (isinstance(other, VectorField) and self.vars == other.vars and self.order == other.order
                and self.components == other.components)

    def __repr__(self) -> str:
        parts = []
        for i, c in enumerate(self.components):
            if c:
                parts.append(f"({format_poly(c, self.vars)})*d/d{self.vars.names[i]}")
        return "VectorField(" + (" + ".join(parts) or "0") + f", N={self.order})"

    def __add__(self, other: "VectorField") -> "VectorField":
        self._check(other)
        return VectorField(self.vars, self.order, [poly_add(a, b) for a, b in zip(self.components, other.components)])

    def __sub__(self, other: "VectorField") -> "VectorField":
        self._check(other)
        return VectorField(self.vars, self.order,
                           [poly_add(a, b, -ONE) for a, b in zip(self.components, other.components)])

    def __neg__(self) -> "VectorField":
        return self.scale(-1)

    def scale(self, s) -> "VectorField":
        s = Rational(s)
        return VectorField(self.vars, self.order, [{e: s * c for e, c in comp.items()} for comp in self.components])

    def truncate(self, N: int) -> "VectorField":
        if N > self.order:
            raise ValueError("cannot raise truncation order")
        return VectorField(self.vars, N, self.components)

    def _check(self, other: "VectorField") -> None:
        if self.vars != other.vars or self.order != other.order:
            raise ValueError("vector field mismatch")

    def apply(self, f: Dict[Exps, Rational], N: Optional[int] = None) -> Dict[Exps, Rational]:
        """X(f) for a coefficient dict f."""
        if N is None:
            N = self.order - 1
        deg = self.vars.degree_fn()
        out: Dict[Exps, Rational] = {}
        for j, comp in enumerate(self.components):
            if comp:
                df = poly_diff(f, j)
                if df:
                    out = poly_add(out, poly_mul(df, comp, N, deg))
        return out

    def bracket(self, other: "VectorField") -> "VectorField":
        """Lie bracket [X, Y]; known to order N - 1."""
        self._check(other)
        N = self.order - 1
        comps = []
        for j in range(self.vars.nvars):
            a = self.apply(other.components[j], N)
            b = other.apply(self.components[j], N)
            comps.append(poly_add(a, b, -ONE))
        return VectorField(self.vars, N, comps)

    def is_zero(self) -> bool:
        return not any(self.components)


# ---------------------------------------------------------------------------
# operations


def multiply(a, b):
    """Ring product of series, or wedge product of forms (Koszul signs)."""
    if isinstance(a, TruncatedSeries) and isinstance(b, TruncatedSeries):
        return a * b
    if not (isinstance(a, PolyForm) and isinstance(b, PolyForm)):
        raise TypeError("multiply expects two series or two forms")
    a._check(b)
    N = a.order
    deg = a.vars.degree_fn()
    out: Dict[Key, Rational] = {}
    pa = a.by_dx()
    pb = b.by_dx()
    for S, ca in pa.items():
        for T, cb in pb.items():
            sgn, U = merge_sign(S, T)
            if not sgn:
                continue
            for e, c in poly_mul(ca, cb, N, deg).items():
                k = (e, U)
                out[k] = out.get(k, ZERO) + (c if sgn > 0 else -c)
    return PolyForm(a.vars, N, _clean(out), _trusted=True)


def de_rham(w: PolyForm) -> PolyForm:
    """Exterior derivative.  Coefficients are known to order N - 1."""
    N = w.order - 1
    deg = w.vars.degree_fn()
    out: Dict[Key, Rational] = {}
    for (e, S), c in w.terms.items():
        for i, k in enumerate(e):
            if not k or i in S:
                continue
            ne = e[:i] + (k - 1,) + e[i + 1:]
            if deg(ne) > N:
                continue
            # dx_i ^ dx_S
            pos = sum(1 for s in S if s < i)
            sgn = -1 if pos & 1 else 1
            U = tuple(sorted(S + (i,)))
            key = (ne, U)
            out[key] = out.get(key, ZERO) + sgn * k * c
    return PolyForm(w.vars, N, _clean(out), _trusted=True)


class SeriesMap:
    """Polynomial map source -> target given by one series per target coordinate.

    ``order`` is the precision of the components; ``None`` marks an exact
    polynomial map (projections, zero insertions, linear rescalings).
    """

    __slots__ = ("source", "target", "order", "components")

    def __init__(self, source: VariableSet, target: VariableSet, order: Optional[int],
                 components: Sequence[Dict[Exps, Rational]]):
        if len(components) != target.nvars:
            raise ValueError("need one component per target coordinate")
        deg = source.degree_fn()
        self.source = source
        self.target = target
        self.order = order
        comps = [_clean(dict(c)) for c in components]
        if order is not None:
            comps = [poly_truncate(c, order, deg) for c in comps]
        self.components = comps

    @property
    def exact(self) -> bool:
        return self.order is None

    @classmethod
    def identity(cls, vars: VariableSet) -> "SeriesMap":
        return cls(vars, vars, None, [{vars.unit(i): ONE} for i in range(vars.nvars)])

    @classmethod
    def linear(cls, source: VariableSet, target: VariableSet, rows: Dict[int, Dict[int, Rational]]) -> "SeriesMap":
        """Exact linear map: target coordinate j = sum_i rows[j][i] * x_i."""
        comps = []
        for j in range(target.nvars):
            comps.append({source.unit(i): Rational(c) for i, c in rows.get(j, {}).items() if c})
        return cls(source, target, None, comps)

    def fixes_origin(self) -> bool:
        """True when every weighted target coordinate has no term of weighted degree 0."""
        deg = self.source.degree_fn()
        mask = self.target._weight_mask
        for c, w in zip(self.components, mask):
            if w and any(deg(e) == 0 for e in c):
                return False
        return True

    def precision_for(self, N: int, with_dx: bool = True) -> int:
        if self.order is None:
            return N
        return min(N, self.order - 1 if with_dx else self.order)

    def compose(self, inner: "SeriesMap") -> "SeriesMap":
        """self o inner (apply inner first)."""
        if inner.target != self.source:
            raise ValueError("composition variable mismatch")
        orders = [o for o in (self.order, inner.order) if o is not None]
        N = min(orders) if orders else None
        work = N if N is not None else 10 ** 6
        if N is None:
            work = max((inner.source.degree_fn()(e) for c in inner.components for e in c), default=1) * \
                max((self.source.degree_fn()(e) for c in self.components for e in c), default=1)
        sub = _Substituter(inner, work)
        return SeriesMap(inner.source, self.target, N, [sub.evaluate(c) for c in self.components])

    def __eq__(self, other) -> bool:
        return (isinstance(other, SeriesMap) and self.source == other.source and self.target == other.target
                and self.order == other.order and self.components == other.components)


class _Substituter:
    """Evaluates polynomials at the components of a map, sharing monomial powers."""

    def __init__(self, f: SeriesMap, N: int):
        self.f = f
        self.N = N
        self.deg = f.source.degree_fn()
        self.memo: Dict[Exps, Dict[Exps, Rational]] = {f.target.zero_exps(): {f.source.zero_exps(): ONE}}
        self.dmemo: Dict[int, Dict[Key, Rational]] = {}

    def monomial(self, a: Exps) -> Dict[Exps, Rational]:
        m = self.memo.get(a)
        if m is not None:
            return m
        j = max(i for i, k in enumerate(a) if k)
        prev = a[:j] + (a[j] - 1,) + a[j + 1:]
        m = poly_mul(self.monomial(prev), self.f.components[j], self.N, self.deg)
        self.memo[a] = m
        return m

    def evaluate(self, p: Dict[Exps, Rational]) -> Dict[Exps, Rational]:
        out: Dict[Exps, Rational] = {}
        for a, c in p.items():
            for e, v in self.monomial(a).items():
                out[e] = out.get(e, ZERO) + c * v
        return _clean(out)

    def differential(self, j: int) -> Dict[Key, Rational]:
        d = self.dmemo.get(j)
        if d is None:
            comp = self.f.components[j]
            d = de_rham(PolyForm(self.f.source, self.N + 1, {(e, ()): c for e, c in comp.items()},
                                 _trusted=True)).terms
            self.dmemo[j] = d
        return d


def pullback(f: SeriesMap, w: PolyForm) -> PolyForm:
    """Pull a form back along a polynomial map fixing the origin.

    Coordinates are substituted by their series and each dy_j becomes the
    total differential of the j-th component.  For a truncated map of order M
    the result is known to order min(N, M - 1), since dy_j pulls back to a
    derivative; exact maps keep the order N of the form.
    """
    if w.vars != f.target:
        raise ValueError("form does not live on the map's target")
    if not f.fixes_origin():
        raise ValueError("pullback requires a map fixing the origin")
    N = f.precision_for(w.order)
    sub = _Substituter(f, N)
    src = f.source
    deg = src.degree_fn()
    result = PolyForm.zero(src, N)
    acc: Dict[Key, Rational] = {}
    dcache: Dict[Dx, PolyForm] = {(): PolyForm.constant(src, N)}
    for S, coef in w.by_dx().items():
        if S not in dcache:
            prod = dcache[()]
            for j in S:
                prod = multiply(prod, PolyForm(src, N, sub.differential(j), _trusted=True))
            dcache[S] = prod
        wedge = dcache[S]
        if wedge.is_zero():
            continue
        fcoef = sub.evaluate(coef)
        for T, wc in wedge.by_dx().items():
            for e, c in poly_mul(fcoef, wc, N, deg).items():
                k = (e, T)
                acc[k] = acc.get(k, ZERO) + c
    return PolyForm(src, N, _clean(acc), _trusted=True) if acc else result


def integrate_in_t(w: PolyForm, t: int, target: VariableSet) -> PolyForm:
    """Fibre integration over t in [0, 1].

    ``t`` is the index of the parameter variable in ``w.vars``.  Writing
    ``w = dt ^ a + b`` with ``b`` free of dt, the result is the integral of
    ``a`` over [0, 1], expressed over ``target`` (the variables of w without
    t, in the same order).
    """
    n = w.vars.nvars
    if target.nvars != n - 1:
        raise ValueError("target must drop exactly the parameter variable")
    out: Dict[Key, Rational] = {}
    for (e, S), c in w.terms.items():
        if t not in S:
            continue
        pos = S.index(t)
        sgn = -1 if pos & 1 else 1
        rest = tuple(s if s < t else s - 1 for s in S if s != t)
        k = e[t]
        ne = e[:t] + e[t + 1:]
        key = (ne, rest)
        out[key] = out.get(key, ZERO) + sgn * c / (k + 1)
    return PolyForm(target, w.order, _clean(out), _trusted=True)


# ---------------------------------------------------------------------------
# text syntax


def _fmt_coeff(c: Rational, first: bool) -> Tuple[str, str]:
    sign = "-" if c < 0 else ("" if first else "+")
    a = abs(c)
    return sign, (str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}")


def _fmt_mono(e: Exps, vars: VariableSet) -> str:
    parts = []
    for i, k in enumerate(e):
        if k == 1:
            parts.append(vars.names[i])
        elif k > 1:
            parts.append(f"{vars.names[i]}^{k}")
    return "*".join(parts)


def _sort_key(item):
    (e, S), _ = item
    return (len(S), S, sum(e), tuple(-x for x in e))


def format_poly(coeffs: Dict[Exps, Rational], vars: VariableSet) -> str:
    return format_form(PolyForm(vars, 10 ** 9, {(e, ()): c for e, c in coeffs.items()}, _trusted=True))


def format_form(w: PolyForm) -> str:
    """Text form such as ``3/2*x1^2*x2 dx1^dx2 - x3``."""
    out = []
    for (e, S), c in sorted(w.terms.items(), key=_sort_key):
        sign, mag = _fmt_coeff(c, not out)
        mono = _fmt_mono(e, w.vars)
        dx = "^".join("d" + w.vars.names[s] for s in S)
        if mono:
            body = mono if mag == "1" else f"{mag}*{mono}"
        else:
            body = mag if (mag != "1" or not dx) else ""
        if dx:
            body = f"{body} {dx}" if body else dx
        out.append(f"{sign} {body}" if out else f"{sign}{body}")
    return " ".join(out)


class ParseError(ValueError):
    pass


def parse_form(text: str, vars: VariableSet, order: int) -> PolyForm:
    """Parse the text syntax produced by :func:`format_form`.

    Grammar (whitespace between a coefficient monomial and its dx part)::

        form   := term (('+'|'-') term)*
        term   := [coeff '*'] [mono] [dxpart] | dxpart
        mono   := var['^'int] ('*' var['^'int])*
        dxpart := 'd'var ('^' 'd'var)*
        coeff  := int ['/' int]
    """
    import re

    s = text.strip()
    if not s:
        raise ParseError("empty expression")
    # split on +/- that start a term
    tokens = re.split(r"(?<![\^/*])\s*([+-])\s*", s)
    terms: Dict[Key, Rational] = {}
    sign = 1
    pieces = []
    if tokens and tokens[0] == "":
        tokens = tokens[1:]
    else:
        tokens = ["+"] + tokens
    if len(tokens) % 2:
        raise ParseError(f"cannot parse {text!r}")
    for i in range(0, len(tokens), 2):
        pieces.append((tokens[i], tokens[i + 1].strip()))
    n = vars.nvars
    for sg, body in pieces:
        if not body:
            raise ParseError(f"dangling sign in {text!r}")
        sign = -1 if sg == "-" else 1
        words = body.split()
        dxw = [w for w in words if _is_dx(w, vars)]
        mw = [w for w in words if not _is_dx(w, vars)]
        if len(mw) > 1:
            raise ParseError(f"unexpected token in term {body!r}")
        coef = Rational(sign)
        e = [0] * n
        if mw:
            for fac in mw[0].split("*"):
                if not fac:
                    raise ParseError(f"empty factor in {body!r}")
                if re.fullmatch(r"\d+(/\d+)?", fac):
                    coef *= Rational(fac)
                    continue
                m = re.fullmatch(r"([A-Za-z][A-Za-z0-9_]*)(\^(\d+))?", fac)
                if not m:
                    raise ParseError(f"bad factor {fac!r}")
                try:
                    idx = vars.index(m.group(1))
                except KeyError as exc:
                    raise ParseError(str(exc)) from None
                e[idx] += int(m.group(3) or 1)
        S: List[int] = []
        for w in dxw:
            for d in w.split("^"):
                S.append(vars.index(d[1:]))
        sg2 = _perm_sign(S)
        if not sg2:
            continue
        key = (tuple(e), tuple(sorted(S)))
        terms[key] = terms.get(key, ZERO) + coef * sg2
    return PolyForm(vars, order, terms)


def _is_dx(word: str, vars: VariableSet) -> bool:
    parts = word.split("^")
    return all(p.startswith("d") and p[1:] in vars._index for p in parts)
