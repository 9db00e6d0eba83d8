"""Homological perturbation over finite bigraded complexes, plus finite nerves.

A bigraded space is a table ``{(r, s): dim}``.  Its elements are flattened in
sorted bidegree order, so every operator is a single :class:`SparseMatrix`;
bidegrees are checked entry by entry.  Conventions: ``h delta + delta h = 1 - i p``
and ``p i = 1``; the transferred data are

    p' = p (1 + d h)^-1,   i' = (1 + h d)^-1 i,   h' = h (1 + d h)^-1.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple

from .linear import Q, Rational, SparseMatrix, rank_and_kernel

Bideg = Tuple[int, int]
SCHEMA = 1


class ContractionError(ValueError):
    """Input operators violate a contraction invariant."""


class NilpotencyError(ValueError):
    """d h is not nilpotent on the given support."""


class GradedSpace:
    """Flattened bigraded space with per-bidegree index ranges."""

    def __init__(self, dims: Dict[Bideg, int]):
        self.dims = {tuple(b): int(n) for b, n in sorted(dims.items()) if n > 0}
        self.offsets: Dict[Bideg, int] = {}
        self.labels: List[Bideg] = []
        for b, n in self.dims.items():
            self.offsets[b] = len(self.labels)
            self.labels.extend([b] * n)

    @property
    def total(self) -> int:
        return len(self.labels)

    def block(self, b: Bideg) -> range:
        o = self.offsets.get(b)
        return range(o, o + self.dims[b]) if o is not None else range(0)

    def __eq__(self, other) -> bool:
        return isinstance(other, GradedSpace) and self.dims == other.dims

    def __repr__(self) -> str:
        return f"GradedSpace({self.dims})"


def _shift(b: Bideg, s: Bideg) -> Bideg:
    return b[0] + s[0], b[1] + s[1]


def check_bidegree(m: SparseMatrix, src: GradedSpace, tgt: GradedSpace, s: Bideg) -> Optional[Tuple[int, int]]:
    """First entry of ``m`` that does not move bidegree by ``s``, or None."""
    for (r, c) in sorted(m.entries):
        if tgt.labels[r] != _shift(src.labels[c], s):
            return r, c
    return None


def _first_defect(m: SparseMatrix, src: GradedSpace) -> Optional[Bideg]:
    """Source bidegree of the first nonzero column of ``m``."""
    if m.is_zero():
        return None
    return src.labels[min(c for _, c in m.entries)]


def _complement(b: Bideg) -> Bideg:
    return (0, 1) if b == (1, 0) else (1, 0)


class ContractionData:
    """Contraction (i, p, h) of (C, delta) onto D, with a perturbation d of C.

    ``delta_bidegree`` is (1, 0) or (0, 1); d has the other one and h the
    negative of delta's.  All invariants are checked here.
    """

    def __init__(self, C: Dict[Bideg, int], D: Dict[Bideg, int], delta: SparseMatrix, d: SparseMatrix,
                 h: SparseMatrix, i: SparseMatrix, p: SparseMatrix, delta_bidegree: Bideg = (1, 0),
                 validate: bool = True):
        self.C = C if isinstance(C, GradedSpace) else GradedSpace(C)
        self.D = D if isinstance(D, GradedSpace) else GradedSpace(D)
        self.delta_bidegree = tuple(delta_bidegree)
        if self.delta_bidegree not in ((1, 0), (0, 1)):
            raise ContractionError("delta must have bidegree (1, 0) or (0, 1)")
        self.d_bidegree = _complement(self.delta_bidegree)
        self.h_bidegree = (-self.delta_bidegree[0], -self.delta_bidegree[1])
        self.delta, self.d, self.h, self.i, self.p = delta, d, h, i, p
        if validate:
            self.validate()

    @property
    def ops(self) -> Dict[str, SparseMatrix]:
        return {"delta": self.delta, "d": self.d, "h": self.h, "i": self.i, "p": self.p}

    def validate(self) -> None:
        C, D = self.C, self.D
        n, m = C.total, D.total
        shapes = {"delta": (n, n), "d": (n, n), "h": (n, n), "i": (n, m), "p": (m, n)}
        for name, op in self.ops.items():
            if (op.rows, op.cols) != shapes[name]:
                raise ContractionError(f"{name} has shape {(op.rows, op.cols)}, expected {shapes[name]}")
        spaces = {"delta": (C, C, self.delta_bidegree), "d": (C, C, self.d_bidegree),
                  "h": (C, C, self.h_bidegree), "i": (D, C, (0, 0)), "p": (C, D, (0, 0))}
        for name, (src, tgt, s) in spaces.items():
            bad = check_bidegree(self.ops[name], src, tgt, s)
            if bad is not None:
                raise ContractionError(f"{name} entry {bad} has the wrong bidegree")
        one_c, one_d = SparseMatrix.identity(n), SparseMatrix.identity(m)
        checks = [
            ("delta^2 = 0", self.delta @ self.delta, C),
            ("d^2 = 0", self.d @ self.d, C),
            ("d delta + delta d = 0", self.d @ self.delta + self.delta @ self.d, C),
            ("h delta + delta h = 1 - i p", self.h @ self.delta + self.delta @ self.h - (one_c - self.i @ self.p), C),
            ("p i = 1", self.p @ self.i - one_d, D),
        ]
        for name, defect, src in checks:
            b = _first_defect(defect, src)
            if b is not None:
                raise ContractionError(f"{name} fails at bidegree {b}")

    # restricted differentials on D
    @property
    def delta_D(self) -> SparseMatrix:
        return self.p @ self.delta @ self.i

    @property
    def d_D(self) -> SparseMatrix:
        return self.p @ self.d @ self.i

    def to_json(self) -> str:
        def ent(m: SparseMatrix):
            return [[r, c, str(v)] for (r, c), v in sorted(m.entries.items())]
        doc = {
            "schema": SCHEMA,
            "kind": "contraction",
            "delta_bidegree": list(self.delta_bidegree),
            "C": [[b[0], b[1], k] for b, k in self.C.dims.items()],
            "D": [[b[0], b[1], k] for b, k in self.D.dims.items()],
            "ops": {name: ent(op) for name, op in self.ops.items()},
        }
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ContractionData":
        doc = json.loads(text)
        allowed = {"schema", "kind", "delta_bidegree", "C", "D", "ops"}
        extra = set(doc) - allowed
        if extra:
            raise ContractionError(f"unknown fields {sorted(extra)}")
        if doc.get("schema") != SCHEMA or doc.get("kind") != "contraction":
            raise ContractionError("not a schema-1 contraction document")
        C = GradedSpace({(r, s): k for r, s, k in doc["C"]})
        D = GradedSpace({(r, s): k for r, s, k in doc["D"]})
        if set(doc["ops"]) != {"delta", "d", "h", "i", "p"}:
            raise ContractionError("ops must be exactly delta, d, h, i, p")
        shapes = {"delta": (C.total, C.total), "d": (C.total, C.total), "h": (C.total, C.total),
                  "i": (C.total, D.total), "p": (D.total, C.total)}
        ops = {}
        for name, entries in doc["ops"].items():
            rows, cols = shapes[name]
            ops[name] = SparseMatrix(rows, cols, {(int(r), int(c)): Q(v) for r, c, v in entries})
        return cls(C, D, ops["delta"], ops["d"], ops["h"], ops["i"], ops["p"], tuple(doc["delta_bidegree"]))

    def __eq__(self, other) -> bool:
        return (isinstance(other, ContractionData) and self.C == other.C and self.D == other.D
                and self.delta_bidegree == other.delta_bidegree
                and all(a == b for a, b in zip(self.ops.values(), other.ops.values())))


@dataclass
class Perturbed:
    p: SparseMatrix
    i: SparseMatrix
    h: SparseMatrix


def neumann_inverse(a: SparseMatrix) -> SparseMatrix:
    """(1 + a)^-1 = sum_k (-a)^k for nilpotent a."""
    n = a.rows
    acc = SparseMatrix.identity(n)
    term = SparseMatrix.identity(n)
    for _ in range(n + 1):
        term = -(term @ a)
        if term.is_zero():
            return acc
        acc = acc + term
    raise NilpotencyError("perturbation series does not terminate")


def perturb(c: ContractionData) -> Perturbed:
    a = neumann_inverse(c.d @ c.h)
    b = neumann_inverse(c.h @ c.d)
    return Perturbed(p=c.p @ a, i=b @ c.i, h=c.h @ a)


@dataclass
class Report:
    """Pass/fail per identity; a failure carries the first offending source bidegree."""

    results: Dict[str, Tuple[bool, Optional[Bideg]]] = field(default_factory=dict)

    def add(self, name: str, defect: SparseMatrix, src: GradedSpace) -> None:
        b = _first_defect(defect, src)
        self.results[name] = (b is None, b)

    @property
    def ok(self) -> bool:
        return all(v[0] for v in self.results.values())

    def lines(self) -> List[str]:
        out = []
        for name, (ok, b) in self.results.items():
            out.append(f"{name}: {'pass' if ok else 'FAIL at bidegree ' + str(b)}")
        return out


def _preserves_D(c: ContractionData) -> bool:
    """h maps D into D and commutes with d there (tested on i(D))."""
    hi = c.h @ c.i
    ok = (hi - c.i @ (c.p @ hi)).is_zero()
    return ok and (c.h @ c.d @ c.i - c.d @ hi).is_zero()


def verify_lemma_a(c: ContractionData, pert: Optional[Perturbed] = None) -> Report:
    pert = pert or perturb(c)
    n = c.C.total
    total = c.d + c.delta
    rep = Report()
    lhs = pert.h @ total + total @ pert.h
    rep.add("[h', d + delta] = 1 - i'p'", lhs - (SparseMatrix.identity(n) - pert.i @ pert.p), c.C)
    if _preserves_D(c):
        rep.add("p'i' = 1", pert.p @ pert.i - SparseMatrix.identity(c.D.total), c.D)
        total_D = c.d_D + c.delta_D
        rep.add("p'(d + delta) = (d_D + delta_D)p'", pert.p @ total - total_D @ pert.p, c.C)
    return rep


def verify_side_conditions(c: ContractionData) -> Report:
    rep = Report()
    rep.add("h h = 0", c.h @ c.h, c.C)
    rep.add("p h = 0", c.p @ c.h, c.C)
    return rep


# ---------------------------------------------------------------------------
# random contractions, valid by construction


def _random_complex(rng: random.Random, dims: Sequence[int], coeff: int = 2) -> List[SparseMatrix]:
    """Maps V_k -> V_{k+1} with consecutive composites zero."""
    maps: List[SparseMatrix] = []
    for k in range(len(dims) - 1):
        src, tgt = dims[k], dims[k + 1]
        if maps and maps[-1].cols and maps[-1].rows:
            # rows must kill the image of the previous map
            _, left_ker = rank_and_kernel(maps[-1].transpose())
        else:
            left_ker = [[Rational(int(j == i)) for j in range(src)] for i in range(src)]
        ent = {}
        for r in range(tgt):
            for w in left_ker:
                a = rng.randint(-coeff, coeff)
                if a:
                    for col, v in enumerate(w):
                        if v:
                            ent[(r, col)] = ent.get((r, col), Rational(0)) + a * v
        maps.append(SparseMatrix(tgt, src, ent))
    return maps


def _unitriangular(rng: random.Random, n: int) -> Tuple[SparseMatrix, SparseMatrix]:
    """A random integer change of basis (permutation times unit lower triangular) and its inverse."""
    L = {(i, i): Rational(1) for i in range(n)}
    for i in range(n):
        for j in range(i):
            a = rng.randint(-1, 1)
            if a:
                L[(i, j)] = Rational(a)
    # forward substitution for L^-1
    inv: Dict[Tuple[int, int], Rational] = {}
    for col in range(n):
        x = [Rational(0)] * n
        for i in range(n):
            s = Rational(int(i == col)) - sum((L.get((i, j), 0) * x[j] for j in range(i)), Rational(0))
            x[i] = s
        for i, v in enumerate(x):
            if v:
                inv[(i, col)] = v
    perm = list(range(n))
    rng.shuffle(perm)
    P = SparseMatrix(n, n, {(perm[i], i): Rational(1) for i in range(n)})
    Pt = P.transpose()
    return P @ SparseMatrix(n, n, L), SparseMatrix(n, n, inv) @ Pt


def random_contraction(rng: random.Random, support: int = 4, max_dim: int = 5, delta_bidegree: Bideg = (1, 0),
                       mix: bool = True) -> ContractionData:
    """Random (C, delta, d) contracted onto D, on the square ``support x support`` of bidegrees.

    D = X (x) Y for random complexes X (delta direction) and Y (d direction);
    C adds acyclic pairs U -> V with their own d; a delta-commuting
    automorphism mixes d across the summands, and a final per-bidegree change
    of basis hides the splitting.  With ``mix`` d may also leave D.
    """
    R = S = support
    xd = [rng.randint(0, 2) for _ in range(R)]
    yd = [rng.randint(0, 2) for _ in range(S)]
    dX = _random_complex(rng, xd)
    dY = _random_complex(rng, yd)
    Ddims = {(r, s): xd[r] * yd[s] for r in range(R) for s in range(S)}
    Udims: Dict[Bideg, int] = {}
    for r in range(R):
        for s in range(S):
            room = max_dim - Ddims[(r, s)] - (Udims.get((r - 1, s), 0))
            nxt = max_dim - Ddims.get((r + 1, s), 0) if r + 1 < R else 0
            Udims[(r, s)] = rng.randint(0, max(0, min(room, nxt, 2)))
    # d on U: a complex along s for each r
    dU = {r: _random_complex(rng, [Udims[(r, s)] for s in range(S)]) for r in range(R)}
    Cdims = {b: Ddims[b] + Udims[b] + Udims.get((b[0] - 1, b[1]), 0) for b in Ddims}
    # the summand layout inside each C^{r,s}: D block, U block, V block (V^{r,s} copies U^{r-1,s})
    layout = {}
    for b in sorted(Cdims):
        layout[b] = (Ddims[b], Udims[b], Udims.get((b[0] - 1, b[1]), 0))
    C = GradedSpace(Cdims)
    Dsp = GradedSpace(Ddims)

    def cidx(b, part, k):
        off = C.offsets[b]
        nd, nu, _ = layout[b]
        return off + k + (0 if part == "D" else nd if part == "U" else nd + nu)

    def didx(b, k):
        return Dsp.offsets[b] + k

    def dpair(r, s):
        # basis of D^{r,s}: index x * yd[s] + y
        return [(x, y) for x in range(xd[r]) for y in range(yd[s])]

    delta, d0, h, inc, proj = {}, {}, {}, {}, {}
    for (r, s), (nd, nu, nv) in layout.items():
        b = (r, s)
        for k, (x, y) in enumerate(dpair(r, s)):
            inc[(cidx(b, "D", k), didx(b, k))] = Rational(1)
            proj[(didx(b, k), cidx(b, "D", k))] = Rational(1)
            if r + 1 < R:
                for x2 in range(xd[r + 1]):
                    v = dX[r].entries.get((x2, x))
                    if v:
                        k2 = x2 * yd[s] + y
                        delta[(cidx((r + 1, s), "D", k2), cidx(b, "D", k))] = v
            if s + 1 < S:
                for y2 in range(yd[s + 1]):
                    v = dY[s].entries.get((y2, y))
                    if v:
                        k2 = x * yd[s + 1] + y2
                        d0[(cidx((r, s + 1), "D", k2), cidx(b, "D", k))] = -v if r & 1 else v
        for k in range(nu):
            delta[(cidx((r + 1, s), "V", k), cidx(b, "U", k))] = Rational(1)
            h[(cidx(b, "U", k), cidx((r + 1, s), "V", k))] = Rational(1)
            if s + 1 < S:
                for k2 in range(Udims[(r, s + 1)]):
                    v = dU[r][s].entries.get((k2, k))
                    if v:
                        d0[(cidx((r, s + 1), "U", k2), cidx(b, "U", k))] = v
                        d0[(cidx((r + 1, s + 1), "V", k2), cidx((r + 1, s), "V", k))] = -v
    n = C.total
    M = lambda e: SparseMatrix(n, n, e)  # noqa: E731
    delta_m, d_m, h_m = M(delta), M(d0), M(h)
    i_m = SparseMatrix(n, Dsp.total, inc)
    p_m = SparseMatrix(Dsp.total, n, proj)
    # g = 1 + N with N: U -> D random and V -> D forced by commuting with delta
    N: Dict[Tuple[int, int], Rational] = {}
    for (r, s), (nd, nu, nv) in layout.items():
        for k in range(nu):
            for j in range(nd):
                a = rng.randint(-1, 1)
                if a:
                    N[(cidx((r, s), "D", j), cidx((r, s), "U", k))] = Rational(a)
    Nm = M(N)
    Nv = delta_m @ Nm @ h_m  # V -> U -> D -> D(r+1): delta_D N_U on the preimage
    Nm = Nm + Nv
    g, ginv = SparseMatrix.identity(n) + Nm, SparseMatrix.identity(n) - Nm
    d_m = g @ d_m @ ginv
    if mix:
        # g2 = 1 + K with K: D -> V vanishing on the image of delta_D
        K: Dict[Tuple[int, int], Rational] = {}
        for (r, s), (nd, nu, nv) in layout.items():
            if not nv or not nd:
                continue
            if r > 0 and Ddims[(r - 1, s)]:
                rows = [cidx((r, s), "D", j) for j in range(nd)]
                cols = [cidx((r - 1, s), "D", j) for j in range(Ddims[(r - 1, s)])]
                blk = SparseMatrix(nd, len(cols), {(a, b_): delta_m.entries[(rr, cc)]
                                                     for a, rr in enumerate(rows) for b_, cc in enumerate(cols)
                                                     if (rr, cc) in delta_m.entries})
                _, funcs = rank_and_kernel(blk.transpose()) if blk.rows and blk.cols else (0, None)
            else:
                funcs = None
            if funcs is None:
                funcs = [[Rational(int(a == j)) for a in range(nd)] for j in range(nd)]
            for k in range(nv):
                for w in funcs:
                    a = rng.randint(-1, 1)
                    if a:
                        for j, v in enumerate(w):
                            if v:
                                key = (cidx((r, s), "V", k), cidx((r, s), "D", j))
                                K[key] = K.get(key, Rational(0)) + a * v
        Km = M(K)
        d_m = (SparseMatrix.identity(n) + Km) @ d_m @ (SparseMatrix.identity(n) - Km)
    # hide the splitting
    Pblocks, Pinv = {}, {}
    for b in C.dims:
        P, Pi = _unitriangular(rng, C.dims[b])
        off = C.offsets[b]
        for (r, c), v in P.entries.items():
            Pblocks[(off + r, off + c)] = v
        for (r, c), v in Pi.entries.items():
            Pinv[(off + r, off + c)] = v
    P, Pi = M(Pblocks), M(Pinv)
    conj = lambda x: P @ x @ Pi  # noqa: E731
    cd = ContractionData(C, Dsp, conj(delta_m), conj(d_m), conj(h_m), P @ i_m, p_m @ Pi)
    if delta_bidegree == (0, 1):
        cd = swap_bidegrees(cd)
    return cd


def swap_bidegrees(c: ContractionData) -> ContractionData:
    """Relabel (r, s) -> (s, r); operators are permuted to the new flattened order."""
    newC = GradedSpace({(s, r): k for (r, s), k in c.C.dims.items()})
    newD = GradedSpace({(s, r): k for (r, s), k in c.D.dims.items()})

    def perm(old: GradedSpace, new: GradedSpace) -> List[int]:
        out = [0] * old.total
        for (r, s), k in old.dims.items():
            for j in range(k):
                out[old.offsets[(r, s)] + j] = new.offsets[(s, r)] + j
        return out

    pc, pd = perm(c.C, newC), perm(c.D, newD)

    def move(m: SparseMatrix, rp, cp) -> SparseMatrix:
        return SparseMatrix(m.rows, m.cols, {(rp[r], cp[cc]): v for (r, cc), v in m.entries.items()})

    swapped = tuple(reversed(c.delta_bidegree))
    return ContractionData(newC, newD, move(c.delta, pc, pc), move(c.d, pc, pc), move(c.h, pc, pc),
                           move(c.i, pc, pd), move(c.p, pd, pc), swapped)


# ---------------------------------------------------------------------------
# finite simplicial sets and nerves


class SimplicialError(ValueError):
    pass


class FiniteSimplicialSet:
    """Levels X_0..X_cap as finite lists with face and degeneracy functions.

    ``face(p, i, x)`` maps X_p -> X_{p-1} (0 <= i <= p) and
    ``degeneracy(p, i, x)`` maps X_p -> X_{p+1} (0 <= i <= p).
    """

    def __init__(self, levels: Sequence[Sequence[Hashable]], face: Callable, degeneracy: Callable,
                 validate: bool = True):
        self.levels = [list(lv) for lv in levels]
        self._sets = [set(lv) for lv in self.levels]
        self.face = face
        self.degeneracy = degeneracy
        if validate:
            bad = self.simplicial_defect()
            if bad:
                raise SimplicialError(f"simplicial identity fails: {bad}")

    @property
    def cap(self) -> int:
        return len(self.levels) - 1

    def contains(self, p: int, x) -> bool:
        return 0 <= p <= self.cap and x in self._sets[p]

    def simplicial_defect(self) -> Optional[str]:
        """First violated simplicial identity, checked exhaustively up to the cap."""
        f, s = self.face, self.degeneracy
        for p in range(1, self.cap + 1):
            for x in self.levels[p]:
                for i in range(p + 1):
                    if not self.contains(p - 1, f(p, i, x)):
                        return f"d_{i} leaves X_{p - 1} on {x!r}"
        for p in range(2, self.cap + 1):
            for x in self.levels[p]:
                for j in range(p + 1):
                    for i in range(j):
                        if f(p - 1, i, f(p, j, x)) != f(p - 1, j - 1, f(p, i, x)):
                            return f"d_{i} d_{j} != d_{j - 1} d_{i} on {x!r}"
        for p in range(self.cap):
            for x in self.levels[p]:
                for i in range(p + 1):
                    y = s(p, i, x)
                    if not self.contains(p + 1, y):
                        return f"s_{i} leaves X_{p + 1} on {x!r}"
                    for j in range(p + 2):
                        lhs = f(p + 1, j, y)
                        if j < i:
                            rhs = s(p - 1, i - 1, f(p, j, x)) if p else None
                        elif j in (i, i + 1):
                            rhs = x
                        else:
                            rhs = s(p - 1, i, f(p, j - 1, x)) if p else None
                        if rhs is not None and lhs != rhs:
                            return f"d_{j} s_{i} identity fails on {x!r}"
                    if p + 1 < self.cap:
                        for j in range(i + 1):
                            if s(p + 1, i + 1, s(p, j, x)) != s(p + 1, j, s(p, i, x)):
                                return f"s_{i + 1} s_{j} != s_{j} s_{i} on {x!r}"
        return None


class FiniteGroupoid:
    """Objects, arrows ``name -> (target, source)``, units and a composition table.

    ``compose[(g, k)]`` is g k (first k, then g), defined when source(g) = target(k).
    """

    def __init__(self, objects: Sequence[Hashable], arrows: Dict[Hashable, Tuple[Hashable, Hashable]],
                 units: Dict[Hashable, Hashable], compose: Dict[Tuple[Hashable, Hashable], Hashable]):
        self.objects = list(objects)
        self.arrows = dict(arrows)
        self.units = dict(units)
        self.compose = dict(compose)

    def target(self, g):
        return self.arrows[g][0]

    def source(self, g):
        return self.arrows[g][1]

    @classmethod
    def pair(cls, points: Sequence[Hashable]) -> "FiniteGroupoid":
        """Pair groupoid: the arrow (a, b) goes from b to a."""
        pts = list(points)
        arrows = {(a, b): (a, b) for a in pts for b in pts}
        comp = {((a, b), (b2, c)): (a, c) for a in pts for b in pts for b2 in pts for c in pts if b == b2}
        return cls(pts, arrows, {a: (a, a) for a in pts}, comp)

    @classmethod
    def group(cls, elements: Sequence[Hashable], mul: Callable, unit: Hashable) -> "FiniteGroupoid":
        els = list(elements)
        return cls(["*"], {g: ("*", "*") for g in els}, {"*": unit},
                   {(g, k): mul(g, k) for g in els for k in els})


def nerve(G: FiniteGroupoid, cap: int) -> FiniteSimplicialSet:
    """B_p G = composable p-tuples (g_1, .., g_p) with source(g_i) = target(g_{i+1}).

    d_0 drops g_1, d_i composes g_i g_{i+1}, d_p drops g_p; on B_1, d_0 g = s(g)
    and d_1 g = t(g).  s_i inserts a unit in slot i.
    """
    levels: List[List] = [[(m,) for m in G.objects]]
    if cap >= 1:
        levels.append([(g,) for g in G.arrows])
    for p in range(2, cap + 1):
        nxt = []
        for t in levels[-1]:
            for g in G.arrows:
                if G.source(t[-1]) == G.target(g):
                    nxt.append(t + (g,))
        levels.append(nxt)

    def face(p, i, x):
        if p == 1:
            return (G.source(x[0]),) if i == 0 else (G.target(x[0]),)
        if i == 0:
            return x[1:]
        if i == p:
            return x[:-1]
        return x[:i - 1] + (G.compose[(x[i - 1], x[i])],) + x[i + 1:]

    def degeneracy(p, i, x):
        if p == 0:
            return (G.units[x[0]],)
        # unit at the target of slot i+1 (or the source of slot i when i = p)
        obj = G.source(x[i - 1]) if i > 0 else G.target(x[0])
        return x[:i] + (G.units[obj],) + x[i:]

    return FiniteSimplicialSet(levels, face, degeneracy)


def vertex_nerve(leaves: Sequence[Sequence[Hashable]], cap: int) -> FiniteSimplicialSet:
    """Nerve of the equivalence relation with the given classes, as vertex tuples.

    X_p = (m_0, .., m_p) inside one class; d_i drops m_i and s_i repeats it.
    A single class is the pair groupoid, B_p = M^{p+1}.
    """
    levels = []
    for p in range(cap + 1):
        lv = []
        for leaf in leaves:
            lv.extend(product(list(leaf), repeat=p + 1))
        levels.append(lv)

    def face(p, i, x):
        return x[:i] + x[i + 1:]

    def degeneracy(p, i, x):
        return x[:i + 1] + x[i:]

    return FiniteSimplicialSet(levels, face, degeneracy)


def pair_nerve(points: Sequence[Hashable], cap: int) -> FiniteSimplicialSet:
    return vertex_nerve([list(points)], cap)


Chain = Dict[Tuple, int]


def _chain_add(acc: Chain, x, c: int) -> None:
    v = acc.get(x, 0) + c
    if v:
        acc[x] = v
    else:
        acc.pop(x, None)


def boundary(X: FiniteSimplicialSet, p: int, chain: Chain) -> Chain:
    """Moore boundary sum_i (-1)^i d_i from level p to p - 1 (zero on level 0)."""
    out: Chain = {}
    if p == 0:
        return out
    for x, c in chain.items():
        for i in range(p + 1):
            _chain_add(out, X.face(p, i, x), -c if i & 1 else c)
    return out


class MooreHomotopy:
    """h_p = sum_j (-1)^{j+1} h_{p,j}, h_{p,j}(m_0..m_p) = (m_0..m_j, f(m_j)..f(m_p)).

    X must be a vertex nerve (simplices are vertex tuples) and f a retraction
    of the vertex set onto a subset that keeps every point in its class.
    """

    def __init__(self, X: FiniteSimplicialSet, f: Dict[Hashable, Hashable]):
        verts = [x[0] for x in X.levels[0]]
        for m in verts:
            if m not in f:
                raise SimplicialError(f"f undefined on {m!r}")
            if f[f[m]] != f[m]:
                raise SimplicialError(f"f is not a retraction at {m!r}")
            if X.cap >= 1 and not X.contains(1, (m, f[m])):
                raise SimplicialError(f"f moves {m!r} off its leaf")
        self.X = X
        self.f = dict(f)

    def apply(self, p: int, chain: Chain) -> Chain:
        if p + 1 > self.X.cap:
            raise SimplicialError("level above the cap")
        f = self.f
        out: Chain = {}
        for x, c in chain.items():
            for j in range(p + 1):
                y = x[:j + 1] + tuple(f[m] for m in x[j:])
                _chain_add(out, y, c if j & 1 else -c)
        return out

    def f_map(self, chain: Chain) -> Chain:
        out: Chain = {}
        for x, c in chain.items():
            _chain_add(out, tuple(self.f[m] for m in x), c)
        return out


def moore_homotopy(X: FiniteSimplicialSet, f: Dict[Hashable, Hashable]) -> MooreHomotopy:
    return MooreHomotopy(X, f)


def check_moore_homotopy(H: MooreHomotopy) -> Optional[str]:
    """Exhaustive check of h d + d h = id - f and h h = 0 on basis chains; first failure or None."""
    X = H.X
    for p in range(X.cap):
        for x in X.levels[p]:
            one = {x: 1}
            hx = H.apply(p, one)
            lhs: Chain = {}
            for y, c in boundary(X, p + 1, hx).items():
                _chain_add(lhs, y, c)
            if p:
                for y, c in H.apply(p - 1, boundary(X, p, one)).items():
                    _chain_add(lhs, y, c)
            rhs = dict(one)
            for y, c in H.f_map(one).items():
                _chain_add(rhs, y, -c)
            if lhs != rhs:
                return f"h d + d h != id - f on {x!r}"
            if p + 2 <= X.cap and H.apply(p + 1, hx):
                return f"h h != 0 on {x!r}"
    return None
