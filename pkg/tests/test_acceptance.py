"""The ten acceptance criteria, each at full size with exact rational equality.

Every test prints one ``criterion N: pass`` or ``criterion N: FAIL`` line
(outside pytest's capture) followed by the failing report lines, if any.
Run directly with ``python tests/test_acceptance.py`` for the summary alone.
"""

from __future__ import annotations

import sys
import time

import pytest

from vanest_jets import checks
from vanest_jets.lie import LieAlgebraSpec, abelian, aff1, heisenberg, sl2

SEED = 1
SHIPPED = [abelian(2), heisenberg(), sl2(), aff1()]
NON_JACOBI = LieAlgebraSpec("broken", 3, {(0, 1): {0: 1}, (1, 2): {1: 1}, (2, 0): {2: 1, 0: 1}})


def criterion_1() -> checks.CheckReport:
    rep = checks.CheckReport()
    for alg in SHIPPED:
        rep.extend(checks.check_routes(alg, SEED, count=50, pmax=3, qmax=2, degree=3))
    return rep


def criterion_2() -> checks.CheckReport:
    rep = checks.CheckReport()
    for alg in SHIPPED:
        rep.extend(checks.check_cochain_map(alg, SEED, count=50, pmax=3, qmax=2, degree=3))
    return rep


def criterion_3() -> checks.CheckReport:
    rep = checks.CheckReport()
    for alg in SHIPPED:
        rep.extend(checks.check_multiplicativity(alg, SEED, pairs=25))
    rep.extend(checks.check_normalization_needed())
    return rep


def criterion_4() -> checks.CheckReport:
    rep = checks.CheckReport()
    for alg in SHIPPED:
        rep.extend(checks.check_cartan(alg, total=5), f"{alg.name}: ")
        rep.extend(checks.check_kalkman(alg, total=5), f"{alg.name}: ")
    return rep


def criterion_5() -> checks.CheckReport:
    rep = checks.check_hpl(SEED, count=100)
    rep.extend(checks.check_export(heisenberg(), N=3), "export: ")
    return rep


def criterion_6() -> checks.CheckReport:
    rep = checks.CheckReport()
    for alg in SHIPPED:
        rep.extend(checks.check_homotopy(alg, SEED))
    rep.extend(checks.check_moore(cap=3, max_points=3))
    return rep


def criterion_7() -> checks.CheckReport:
    return checks.check_alexander_spanier(SEED, mmax=3, pmax=3)


def criterion_8() -> checks.CheckReport:
    rep = checks.CheckReport()
    for alg in SHIPPED:
        rep.extend(checks.check_roundtrip(alg, pmax=2))
    return rep


def criterion_9() -> checks.CheckReport:
    rep = checks.CheckReport()
    for alg, expect in ((sl2(), [1, 0, 0, 1]), (heisenberg(), [1, 2, 2, 1])):
        got = checks.betti_numbers(alg)
        rep.add(f"Betti numbers of {alg.name} = {expect}", got == expect, f"got {got}")
    bad = checks.check_jacobi(NON_JACOBI)
    rep.add("non-Jacobi table: d_CE^2 != 0 detected", not bad.ok, "no defect reported")
    return rep


def criterion_10() -> checks.CheckReport:
    rep = checks.CheckReport()
    for alg in SHIPPED:
        rep.extend(checks.check_stability(alg, SEED, count=50, sub=10))
    return rep


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


def _summary(k: int, rep: checks.CheckReport, seconds: float) -> str:
    head = f"criterion {k}: {'pass' if rep.ok else 'FAIL'} ({seconds:.1f}s)"
    bad = [line for line in rep.lines() if "FAIL" in line]
    return "\n".join([head] + ["    " + line for line in bad])


@pytest.mark.parametrize("k", range(1, 11))
def test_criterion(k, capsys):
    t0 = time.perf_counter()
    rep = CRITERIA[k - 1]()
    with capsys.disabled():
        print("\n" + _summary(k, rep, time.perf_counter() - t0))
    assert rep.ok, "\n".join(rep.lines())


if __name__ == "__main__":
    ok = True
    for k, fn in enumerate(CRITERIA, 1):
        t0 = time.perf_counter()
        rep = fn()
        ok &= rep.ok
        print(_summary(k, rep, time.perf_counter() - t0), flush=True)
    sys.exit(0 if ok else 1)
