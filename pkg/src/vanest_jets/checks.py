"""Seeded verification suites shared by the command line and the test-suite.

Every suite returns a :class:`CheckReport`: one line per identity, with a
witness string on the first failure.  Identical seeds give identical reports.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, List, Optional, Sequence, Tuple

from .cealg import ActionSpec, cohomology_dims, square_defect
from .hpl import (ContractionData, SimplicialError, check_moore_homotopy, moore_homotopy, perturb,
                  random_contraction, verify_lemma_a, verify_side_conditions, vertex_nerve)
from .lie import LieAlgebraSpec, validate_jacobi
from .linear import Rational, SparseMatrix, solve_in_image
from .series import PolyForm
from .vanest import (ASCochain, GroupoidCochain, alexander_spanier_ve, as_dproduct, as_vars, cochain_d, cup,
                     export_contraction, homotopy_h, iota0, is_normalized, random_cochain, random_triple,
                     retraction_r, reverse_map, simplicial_delta, triple_cup, triple_is_normalized, ve_dproduct,
                     ve_explicit, ve_zigzag)
from .weil import (WeilElement, augmentation, basis_elements, ce_weil_differential, contract, coordinates,
                   endomorphism_j, endomorphism_l, kalkman_twist, koszul_differential, koszul_homotopy,
                   lie_derivative, monomial_basis, spanning_set)


@dataclass
class CheckReport:
    entries: List[Tuple[str, bool, str]] = field(default_factory=list)

    def add(self, name: str, ok: bool, witness: str = "") -> None:
        self.entries.append((name, bool(ok), "" if ok else witness))

    def extend(self, other: "CheckReport", prefix: str = "") -> None:
        for name, ok, w in other.entries:
            self.entries.append((prefix + name, ok, w))

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.entries)

    def lines(self) -> List[str]:
        return [f"{name}: pass" if ok else f"{name}: FAIL ({w})" for name, ok, w in self.entries]

    def to_json(self) -> dict:
        return {"schema": 1, "ok": self.ok,
                "checks": [{"name": n, "pass": ok, "witness": w} for n, ok, w in self.entries]}


class _First:
    """Collects the first failing case of a named identity."""

    def __init__(self):
        self.witness: Optional[str] = None
        self.count = 0

    def __call__(self, ok: bool, witness) -> None:
        self.count += 1
        if not ok and self.witness is None:
            self.witness = witness() if callable(witness) else str(witness)

    def report(self, rep: CheckReport, name: str) -> None:
        rep.add(f"{name} [{self.count} cases]", self.witness is None, self.witness or "")


def _agree(a, b) -> bool:
    """Equality after truncating both sides to the common known order."""
    M = min(a.order, b.order)
    return a.truncate(M) == b.truncate(M)


# ---------------------------------------------------------------------------
# Lie algebra and Chevalley-Eilenberg


def check_jacobi(alg: LieAlgebraSpec) -> CheckReport:
    rep = CheckReport()
    ok, w = validate_jacobi(alg)
    rep.add(f"Jacobi identity ({alg.name})", ok, "" if ok else f"triple {tuple(i + 1 for i in w)}")
    sq = square_defect(alg)
    rep.add(f"d_CE^2 = 0 on the exterior algebra ({alg.name})", sq is None,
            "" if sq is None else "d_CE^2(" + ("^".join(f"e{i + 1}" for i in sq) or "1") + ") != 0")
    return rep


def betti_numbers(alg: LieAlgebraSpec) -> List[int]:
    return cohomology_dims(alg)


# ---------------------------------------------------------------------------
# Weil calculus


def _units(n: int) -> List[List[List[int]]]:
    return [[[1 if (i, j) == (a, b) else 0 for j in range(n)] for i in range(n)] for a in range(n) for b in range(n)]


def _mat_bracket(A, B):
    n = len(A)
    AB = [[sum(A[i][k] * B[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    BA = [[sum(B[i][k] * A[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    return [[AB[i][j] - BA[i][j] for j in range(n)] for i in range(n)]


def adjoint_action(alg: LieAlgebraSpec, order: int) -> ActionSpec:
    """g acting on itself by the adjoint representation, as a linear action on R^n."""
    n = alg.dim
    mats = [[[alg.c[j][k][i] for i in range(n)] for j in range(n)] for k in range(n)]
    return ActionSpec.linear(alg, mats, order)


def check_cartan(alg: LieAlgebraSpec, total: int = 5) -> CheckReport:
    """Cartan calculus of W(g) on the monomials of W^{p,q}, p + q <= total."""
    rep = CheckReport()
    n = alg.dim
    span = spanning_set(alg, total)
    K = koszul_differential
    C = ce_weil_differential
    l, j = endomorphism_l, endomorphism_j
    Ds = _units(n)
    names = ["[l(D1), l(D2)] = l([D1, D2])", "[l(D1), j(D2)] = j([D1, D2])", "[j(D1), j(D2)] = 0",
             "[l(D), d_K] = 0", "[j(D), d_K] = l(D)",
             "[i_S(X), d_K] = i_K(X)", "[i_K(X), d_K] = 0", "[i_K(X), d_CE] = L(X)", "[i_CE(X), d_K] = L(X)",
             "[i_CE(X1), i_K(X2)] = -i_S([X1, X2])", "[L(X1), i_K(X2)] = i_K([X1, X2])",
             "d_K^2 = 0", "d_CE^2 = 0", "d_K d_CE + d_CE d_K = 0", "kappa d_K + d_K kappa = 1 - i pi"]
    f = {name: _First() for name in names}
    for w in span:
        Kw, Cw = K(w), C(w)
        for a, D1 in enumerate(Ds):
            lw, jw = l(D1, w), j(D1, w)
            f[names[3]](l(D1, Kw) == K(lw), lambda: f"D={a} w={w}")
            f[names[4]]((j(D1, Kw) + K(jw)) == lw, lambda: f"D={a} w={w}")
            for b, D2 in enumerate(Ds):
                B = _mat_bracket(D1, D2)
                wit = lambda: f"D1={a} D2={b} w={w}"
                f[names[0]]((l(D1, l(D2, w)) - l(D2, lw)) == l(B, w), wit)
                f[names[1]]((l(D1, j(D2, w)) - j(D2, lw)) == j(B, w), wit)
                f[names[2]]((j(D1, j(D2, w)) + j(D2, jw)).is_zero(), wit)
        for k in range(n):
            wit = lambda: f"X=e{k + 1} w={w}"
            iS = lambda x: contract("iS", k, x)
            iK = lambda x: contract("iK", k, x)
            iC = lambda x: contract("iCE", k, x)
            L = lie_derivative(k, w)
            f[names[5]]((iS(Kw) - K(iS(w))) == iK(w), wit)
            f[names[6]]((iK(Kw) + K(iK(w))).is_zero(), wit)
            f[names[7]]((iK(Cw) + C(iK(w))) == L, wit)
            f[names[8]]((iC(Kw) + K(iC(w))) == L, wit)
            for k2 in range(n):
                br = alg.bracket(alg.basis(k), alg.basis(k2))
                lhs = contract("iCE", k, contract("iK", k2, w)) + contract("iK", k2, contract("iCE", k, w))
                wit2 = lambda: f"X1=e{k + 1} X2=e{k2 + 1} w={w}"
                f[names[9]](lhs == contract("iS", br, w).scale(-1), wit2)
                lk = lie_derivative(k, contract("iK", k2, w)) - contract("iK", k2, lie_derivative(k, w))
                f[names[10]](lk == contract("iK", br, w), wit2)
        f[names[11]](K(Kw).is_zero(), w)
        f[names[12]](C(Cw).is_zero(), w)
        f[names[13]]((K(Cw) + C(Kw)).is_zero(), w)
        kap = koszul_homotopy
        f[names[14]]((kap(Kw) + K(kap(w))) == w - augmentation(w), w)
    for name in names:
        f[name].report(rep, name)
    rep.extend(check_nontensorial(alg))
    return rep


def check_nontensorial(alg: LieAlgebraSpec, order: int = 4, seed: int = 0, count: int = 20) -> CheckReport:
    """i_K(f X) = f i_K(X) - df i_S(X) over the adjoint action, f a coordinate function."""
    rep = CheckReport()
    act = adjoint_action(alg, order + 2)
    base = act.base
    rng = random.Random(seed)
    n, m = alg.dim, base.nvars
    first = _First()
    for _ in range(count):
        w = _random_based(alg, base, order, rng)
        k, a = rng.randrange(n), rng.randrange(m)
        X = [{base.unit(a): Rational(1)} if i == k else {} for i in range(n)]
        lhs = contract("iK", X, w)
        x = WeilElement(alg, {((), (), base.unit(a), ()): Rational(1)}, base, order)
        dx = WeilElement(alg, {((), (), base.zero_exps(), (a,)): Rational(1)}, base, order)
        rhs = x * contract("iK", k, w) - dx * contract("iS", k, w)
        first(_agree(lhs, rhs), lambda: f"k={k} a={a} w={w}")
    first.report(rep, "i_K(f X) = f i_K(X) - df i_S(X)")
    return rep


def _random_based(alg: LieAlgebraSpec, base, order: int, rng: random.Random, terms: int = 5) -> WeilElement:
    n, m = alg.dim, base.nvars
    t = {}
    for _ in range(terms):
        I = tuple(sorted(rng.randrange(n) for _ in range(rng.randint(0, 2))))
        J = tuple(sorted(rng.sample(range(n), rng.randint(0, min(2, n)))))
        e = [0] * m
        for _ in range(rng.randint(0, 2)):
            e[rng.randrange(m)] += 1
        S = tuple(sorted(rng.sample(range(m), rng.randint(0, min(1, m)))))
        c = rng.randint(-3, 3)
        if c:
            t[(I, J, tuple(e), S)] = Rational(c)
    return WeilElement(alg, t, base, order)


def check_kalkman(alg: LieAlgebraSpec, total: int = 5) -> CheckReport:
    rep = CheckReport()
    first = _First()
    for w in spanning_set(alg, total):
        lhs = kalkman_twist(koszul_differential(kalkman_twist(w, inverse=True)))
        rhs = koszul_differential(w) + ce_weil_differential(w)
        first(lhs == rhs, w)
    first.report(rep, "U d_K U^-1 = d_K + d_CE")
    return rep


# ---------------------------------------------------------------------------
# Van Est routes


def route_suite(alg: LieAlgebraSpec, seed: int, count: int = 50, pmax: int = 3, qmax: int = 2,
                degree: int = 3) -> List[GroupoidCochain]:
    """Seeded random cochains, N = degree + p + q + 1."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        p = rng.randint(0, pmax)
        q = rng.randint(0, min(p, qmax))
        out.append(random_cochain(alg, p, q, degree + p + q + 1, rng, degree=degree))
    return out


def _at_order(phi: GroupoidCochain, N: int) -> GroupoidCochain:
    return GroupoidCochain(phi.algebra, phi.level, PolyForm(phi.vars, N, dict(phi.form.terms)))


def _case(i: int, phi: GroupoidCochain) -> str:
    return f"case {i}: p={phi.level} q={sorted(phi.form_degrees())} phi={phi}"


def check_routes(alg: LieAlgebraSpec, seed: int, count: int = 50, pmax: int = 3, qmax: int = 2,
                 degree: int = 3) -> CheckReport:
    rep = CheckReport()
    agree = _First()
    for i, phi in enumerate(route_suite(alg, seed, count, pmax, qmax, degree)):
        z = ve_zigzag(phi)
        agree(z == ve_dproduct(phi) == ve_explicit(phi), lambda: _case(i, phi))
    agree.report(rep, f"ve_zigzag = ve_dproduct = ve_explicit ({alg.name})")
    return rep


def check_cochain_map(alg: LieAlgebraSpec, seed: int, count: int = 50, pmax: int = 3, qmax: int = 2,
                      degree: int = 3) -> CheckReport:
    """VE(delta phi) = d_CE VE(phi) and VE(d phi) = d_K VE(phi); phi lifted one order for the extra step."""
    rep = CheckReport()
    fd, fk = _First(), _First()
    for i, phi in enumerate(route_suite(alg, seed, count, pmax, qmax, degree)):
        big = _at_order(phi, phi.order + 1)
        v = ve_zigzag(phi)
        fd(ve_zigzag(simplicial_delta(big)) == ce_weil_differential(v), lambda: _case(i, phi))
        fk(ve_zigzag(cochain_d(big)) == koszul_differential(v), lambda: _case(i, phi))
    fd.report(rep, f"VE(delta phi) = d_CE VE(phi) ({alg.name})")
    fk.report(rep, f"VE(d phi) = d_K VE(phi) ({alg.name})")
    return rep


def stability_subsample(alg: LieAlgebraSpec, seed: int = 1, count: int = 50, sub: int = 10) -> List[GroupoidCochain]:
    cases = route_suite(alg, seed, count)
    return random.Random(seed + 1).sample(cases, sub)


def check_stability(alg: LieAlgebraSpec, seed: int = 1, count: int = 50, sub: int = 10) -> CheckReport:
    """Unpruned zig-zag at N and N + 1 must agree (the output lives at order 0)."""
    rep = CheckReport()
    first = _First()
    for i, phi in enumerate(stability_subsample(alg, seed, count, sub)):
        a = ve_zigzag(phi, prune=False)
        b = ve_zigzag(_at_order(phi, phi.order + 1), prune=False)
        first(a == b, lambda: _case(i, phi))
    first.report(rep, f"VE at N+1 truncates to VE at N ({alg.name})")
    return rep


def check_alexander_spanier(seed: int, mmax: int = 3, pmax: int = 3, per: int = 5) -> CheckReport:
    """Closed form (-1)^p u0 du1 ... dup against the D-product route on the pair groupoid of R^m."""
    rep = CheckReport()
    rng = random.Random(seed)
    first = _First()
    for m in range(1, mmax + 1):
        for p in range(pmax + 1):
            for _ in range(per):
                N = 3 + p + 1
                vs = as_vars(m, p)
                terms = {}
                for _ in range(3):
                    e = [0] * vs.nvars
                    for _ in range(rng.randint(0, 3)):
                        e[rng.randrange(vs.nvars)] += 1
                    c = rng.randint(-3, 3)
                    if c:
                        terms[(tuple(e), ())] = Rational(c)
                u = ASCochain(m, p, PolyForm(vs, N, terms))
                first(alexander_spanier_ve(u) == as_dproduct(u), lambda: f"m={m} p={p} u={u.func}")
    first.report(rep, "Alexander-Spanier closed form = D-product route")
    return rep


# ---------------------------------------------------------------------------
# multiplicativity


def check_multiplicativity(alg: LieAlgebraSpec, seed: int, pairs: int = 25, order: int = 4) -> CheckReport:
    rep = CheckReport()
    rng = random.Random(seed)
    first = _First()
    nontrivial = 0
    for i in range(pairs):
        p = rng.randint(0, 2)
        pp = rng.randint(0, 3 - p)
        q = rng.randint(0, min(2, p))
        qq = rng.randint(0, min(2, pp))
        while True:
            phi = random_cochain(alg, p, q, order, rng, normalized=True)
            psi = random_cochain(alg, pp, qq, order, rng, normalized=True)
            if not (phi.is_zero() or psi.is_zero()):
                break
        a = ve_zigzag(cup(phi, psi))
        b = ve_zigzag(phi) * ve_zigzag(psi)
        nontrivial += not b.is_zero()
        first(is_normalized(phi) and is_normalized(psi) and a == b, lambda: f"pair {i}: phi={phi} psi={psi}")
    first.report(rep, f"VE(phi cup psi) = VE(phi) VE(psi) on normalized pairs ({alg.name})")
    rep.add(f"  {nontrivial} of {pairs} products nonzero", nontrivial > 0)
    return rep


def check_normalization_needed(order: int = 4) -> CheckReport:
    """phi = 1 at level 1 is not normalized and VE(phi cup x1) = -e2 e3 on sl2 while VE(phi) = 0."""
    from .lie import sl2
    rep = CheckReport()
    g = sl2()
    phi = GroupoidCochain.parse(g, 1, "1", order)
    psi = GroupoidCochain.parse(g, 1, "g1_1", order)
    a = ve_zigzag(cup(phi, psi))
    b = ve_zigzag(phi) * ve_zigzag(psi)
    rep.add(f"non-normalized counterexample (sl2, 1 cup g1_1): VE(cup) = {a}, VE VE = {b}",
            not is_normalized(phi) and a != b, "equality holds, counterexample lost")
    return rep


# ---------------------------------------------------------------------------
# homotopy operator and contractions


def _odd_parity(x) -> set:
    return {(len(J) + len(S)) & 1 for I, J, e, S in x.value.terms}


def check_homotopy(alg: LieAlgebraSpec, seed: int, count: int = 60, order: int = 6) -> CheckReport:
    """Homotopy h on the triple complex, then the Moore homotopy on small pair groupoids."""
    rep = CheckReport()
    rng = random.Random(seed)
    hh, der, norm, ih = _First(), _First(), _First(), _First()
    for i in range(count):
        r = rng.randint(1, 3)
        x = random_triple(alg, r, order, rng)
        if r >= 2:
            hh(homotopy_h(homotopy_h(x)).is_zero(), lambda: f"case {i}: x={x}")
        # derivation rule on homogeneous factors
        r1, r2 = rng.randint(1, 2), rng.randint(1, 2)
        a = random_triple(alg, r1, order, rng, terms=1)
        b = random_triple(alg, r2, order, rng, terms=1)
        if not (a.is_zero() or b.is_zero()):
            s = -1 if (r1 + _odd_parity(a).pop()) & 1 else 1
            lhs = homotopy_h(triple_cup(a, b))
            rhs = triple_cup(homotopy_h(a), retraction_r(b)) + triple_cup(a, homotopy_h(b)).scale(s)
            der(lhs == rhs, lambda: f"case {i}: a={a} b={b}")
        y = random_triple(alg, r, order, rng, normalized=True)
        hy = homotopy_h(y)
        norm(triple_is_normalized(y) and triple_is_normalized(hy), lambda: f"case {i}: y={y}")
        if r == 1:
            ih(iota0(hy).is_zero(), lambda: f"case {i}: y={y}")
    hh.report(rep, f"h h = 0 ({alg.name})")
    der.report(rep, f"h(a cup b) = h a cup R b + (-1)^|a| a cup h b ({alg.name})")
    norm.report(rep, f"h preserves normalized elements ({alg.name})")
    ih.report(rep, f"iota^* h = 0 on normalized elements ({alg.name})")
    return rep


def check_moore(cap: int = 3, max_points: int = 3) -> CheckReport:
    """h d + d h = 1 - f and h h = 0 for every retraction of every small vertex nerve."""
    rep = CheckReport()
    first = _First()
    pts_all = "abcdefgh"[:max_points]
    for size in range(1, max_points + 1):
        pts = pts_all[:size]
        partitions = [[list(pts)]]
        if size > 1:
            partitions.append([list(pts[:1]), list(pts[1:])])
        if size > 2:
            partitions.append([[c] for c in pts])
        for leaves in partitions:
            X = vertex_nerve(leaves, cap)
            for img in product(pts, repeat=size):
                f = dict(zip(pts, img))
                try:
                    H = moore_homotopy(X, f)
                except SimplicialError:
                    continue
                bad = check_moore_homotopy(H)
                first(bad is None, lambda: f"leaves={leaves} f={f}: {bad}")
    first.report(rep, f"Moore homotopy on point sets of size <= {max_points}, cap {cap}")
    return rep


# ---------------------------------------------------------------------------
# perturbation lemma


def check_hpl(seed: int, count: int = 100) -> CheckReport:
    rep = CheckReport()
    lemma, side, rt = _First(), _First(), _First()
    for k in range(count):
        rng = random.Random(seed * 1000 + k)
        c = random_contraction(rng, delta_bidegree=(1, 0) if k % 2 else (0, 1), mix=k % 3 != 0)
        r = verify_lemma_a(c)
        lemma(r.ok, lambda: f"instance {k}: " + "; ".join(x for x in r.lines() if "FAIL" in x))
        s = verify_side_conditions(c)
        side(s.ok, lambda: f"instance {k}: " + "; ".join(s.lines()))
        rt(ContractionData.from_json(c.to_json()) == c, f"instance {k}")
    lemma.report(rep, "[h', d + delta] = 1 - i'p' and companions")
    side.report(rep, "side conditions h h = 0, p h = 0")
    rt.report(rep, "JSON roundtrip")
    return rep


def check_export(alg: LieAlgebraSpec, N: int = 3, seed: int = 0, samples: int = 60) -> CheckReport:
    """Side conditions, the lemma and multiplicativity of Pi' = i'p' on the normalized triple complex."""
    rep = CheckReport()
    vc = export_contraction(alg, N)
    c = vc.data
    pert = perturb(c)
    rep.extend(_wrap(verify_side_conditions(c)))
    rep.extend(_wrap(verify_lemma_a(c, pert)))
    Pi = pert.i @ pert.p
    R = c.i @ c.p
    rng = random.Random(seed)
    n = c.C.total
    fm, fd = _First(), _First()
    for _ in range(samples):
        a, b = rng.randrange(n), rng.randrange(n)
        u = [0] * n
        v = [0] * n
        u[a] = 1
        v[b] = 1
        uv = vc.cup_vectors(u, v)
        fm(Pi.apply(uv) == vc.cup_vectors(Pi.apply(u), Pi.apply(v)), f"basis pair {a}, {b}")
        ba = c.C.labels[a]
        s = -1 if (ba[0] + ba[1]) & 1 else 1
        r1 = vc.cup_vectors(c.h.apply(u), R.apply(v))
        r2 = vc.cup_vectors(u, c.h.apply(v))
        fd(c.h.apply(uv) == [x + s * y for x, y in zip(r1, r2)], f"basis pair {a}, {b}")
    fd.report(rep, "h is an R-twisted derivation")
    fm.report(rep, f"Pi' multiplicative ({alg.name}, N={N})")
    return rep


def _wrap(r) -> CheckReport:
    out = CheckReport()
    for name, (ok, b) in r.results.items():
        out.add(name, ok, f"bidegree {b}")
    return out


# ---------------------------------------------------------------------------
# reverse map


def check_roundtrip(alg: LieAlgebraSpec, pmax: int = 2) -> CheckReport:
    """Rev is a cochain map; VE Rev - id is d_CE-exact; exact on cocycles for p <= 1."""
    rep = CheckReport()
    cm, ex, cy = _First(), _First(), _First()
    for p in range(pmax + 1):
        for q in range(p + 1):
            mats = _dce_matrix(alg, p - 1, q)
            for w in basis_elements(alg, p, q):
                R = reverse_map(w, p + 1)
                if p < pmax:
                    lhs = simplicial_delta(R)
                    rhs = reverse_map(ce_weil_differential(w), p + 2, level=p + 1)
                    cm(_agree(lhs, rhs), lambda: f"alpha={w}")
                diff = ve_zigzag(R) - w
                coords = coordinates(diff, p, q)
                ok = (not any(coords)) if mats is None else solve_in_image(mats, coords) is not None
                ex(ok and _only_bidegree(diff, p, q), lambda: f"alpha={w} VE Rev - alpha = {diff}")
            if p <= 1:
                for z in _cocycles(alg, p, q):
                    cy(ve_zigzag(reverse_map(z, p + 1)) == z, lambda: f"cocycle {z}")
    cm.report(rep, f"delta Rev = Rev d_CE ({alg.name})")
    ex.report(rep, f"VE Rev - id is d_CE-exact ({alg.name})")
    cy.report(rep, f"VE Rev = id on d_CE-cocycles, p <= 1 ({alg.name})")
    return rep


def _only_bidegree(w: WeilElement, p: int, q: int) -> bool:
    return all(len(I) + len(J) == p and len(I) == q for I, J in w.constant_parts())


def _dce_matrix(alg: LieAlgebraSpec, p: int, q: int) -> Optional[SparseMatrix]:
    """Matrix of d_CE : W^{p,q} -> W^{p+1,q} in monomial coordinates."""
    if p < q or p < 0:
        return None
    src = monomial_basis(alg, p, q)
    tgt = len(monomial_basis(alg, p + 1, q))
    entries = {}
    for col, (I, J) in enumerate(src):
        img = coordinates(ce_weil_differential(WeilElement.monomial(alg, I, J)), p + 1, q)
        for row, v in enumerate(img):
            if v:
                entries[(row, col)] = v
    return SparseMatrix(tgt, len(src), entries)


def _cocycles(alg: LieAlgebraSpec, p: int, q: int) -> List[WeilElement]:
    from .linear import rank_and_kernel
    src = monomial_basis(alg, p, q)
    if not src:
        return []
    m = _dce_matrix(alg, p, q)
    _, ker = rank_and_kernel(m)
    out = []
    for v in ker:
        w = WeilElement.zero(alg)
        for (I, J), c in zip(src, v):
            if c:
                w = w + WeilElement.monomial(alg, I, J).scale(c)
        out.append(w)
    return out
