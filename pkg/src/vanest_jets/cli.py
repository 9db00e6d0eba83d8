"""Command-line front end: ``vanest check ...`` and ``vanest compute ...``.

Exit codes: 0 when every check passes, 1 on a failed identity, 2 on
malformed input.  Reports are deterministic for a fixed seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional

from . import checks
from .cealg import cohomology_dims
from .lie import BUILTINS, LieAlgebraSpec, abelian, aff1, builtin, heisenberg, sl2
from .series import ParseError, format_form
from .vanest import (ASCochain, GroupoidCochain, TruncationError, alexander_spanier_ve, reverse_map, ve_dproduct,
                     ve_explicit, ve_zigzag)
from .weil import (WeilElement, WeilParseError, ce_weil_differential, contract, format_weil, kalkman_twist,
                   koszul_differential, koszul_homotopy, lie_derivative, parse_weil, weil_differential)

CHECKS = ("jacobi", "cartan", "kalkman", "hpl", "homotopy", "routes", "roundtrip", "multiplicativity")
COMPUTES = ("ve", "reverse", "cohomology", "weil-op")
COCHAIN_FIELDS = {"schema", "algebra", "level", "form_degree", "expr", "order", "route"}


class InputError(ValueError):
    """Malformed user input (exit code 2)."""


def _shipped() -> List[LieAlgebraSpec]:
    return [abelian(2), heisenberg(), sl2(), aff1()]


def load_algebra(ref) -> LieAlgebraSpec:
    """A builtin name, a path to a JSON spec, or an inline JSON object."""
    try:
        if isinstance(ref, dict):
            return LieAlgebraSpec.from_json(ref)
        if not isinstance(ref, str):
            raise InputError(f"algebra must be a name or an object, got {ref!r}")
        if ref in BUILTINS:
            return builtin(ref)
        if os.path.exists(ref):
            with open(ref) as fh:
                return LieAlgebraSpec.from_json(json.load(fh))
    except (ValueError, KeyError, TypeError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"bad algebra spec {ref!r}: {exc}") from None
    raise InputError(f"unknown algebra {ref!r} (builtins: {', '.join(sorted(BUILTINS))}, or a JSON file)")


def _algebras(args) -> List[LieAlgebraSpec]:
    return [load_algebra(args.algebra)] if args.algebra else _shipped()


def _read_json(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected a JSON object")
    if data.get("schema") != 1:
        raise InputError(f"{path}: missing or unsupported \"schema\" (expected 1)")
    return data


def _int_field(data: dict, key: str, default=None) -> Optional[int]:
    v = data.get(key, default)
    if v is None:
        return None
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise InputError(f"field {key!r} must be a non-negative integer")
    return v


# ---------------------------------------------------------------------------
# check


def run_check(args) -> checks.CheckReport:
    rep = checks.CheckReport()
    target = args.target
    if target == "jacobi":
        for g in _algebras(args):
            rep.extend(checks.check_jacobi(g))
    elif target == "cartan":
        for g in _algebras(args):
            rep.extend(checks.check_cartan(g))
    elif target == "kalkman":
        for g in _algebras(args):
            rep.extend(checks.check_kalkman(g))
    elif target == "hpl":
        rep.extend(checks.check_hpl(args.seed, args.count or 100))
        for g in ([load_algebra(args.algebra)] if args.algebra else []):
            rep.extend(checks.check_export(g, args.order or 3, args.seed))
    elif target == "homotopy":
        for g in _algebras(args):
            rep.extend(checks.check_homotopy(g, args.seed))
        rep.extend(checks.check_moore(3, 3))
    elif target == "routes":
        for g in _algebras(args):
            kw = dict(count=args.count or 50, pmax=args.pmax, qmax=args.qmax)
            rep.extend(checks.check_routes(g, args.seed, **kw))
            rep.extend(checks.check_cochain_map(g, args.seed, **kw))
        rep.extend(checks.check_alexander_spanier(args.seed))
    elif target == "roundtrip":
        for g in _algebras(args):
            rep.extend(checks.check_roundtrip(g, min(args.pmax, 2)))
    elif target == "multiplicativity":
        for g in _algebras(args):
            rep.extend(checks.check_multiplicativity(g, args.seed, args.count or 25))
        rep.extend(checks.check_normalization_needed())
    return rep


# ---------------------------------------------------------------------------
# compute


def _degree(form) -> int:
    return max((sum(e) for e, _ in form.terms), default=0)


def load_cochain(data: dict):
    """A GroupoidCochain, or an ASCochain when the algebra is ``pair:m``."""
    extra = set(data) - COCHAIN_FIELDS
    if extra:
        raise InputError(f"unknown fields in cochain spec: {sorted(extra)}")
    for key in ("algebra", "level", "expr"):
        if key not in data:
            raise InputError(f"cochain spec needs {key!r}")
    p = _int_field(data, "level")
    q = _int_field(data, "form_degree")
    N = _int_field(data, "order")
    expr = data["expr"]
    if not isinstance(expr, str):
        raise InputError("field 'expr' must be a string")
    alg = data["algebra"]
    try:
        if isinstance(alg, str) and alg.startswith("pair:"):
            m = int(alg[5:])
            if m < 1:
                raise InputError("pair groupoid needs m >= 1")
            probe = ASCochain.parse(m, p, expr, 64)
            N = N if N is not None else _degree(probe.func) + p + _formdeg(probe.func, q) + 1
            out = ASCochain.parse(m, p, expr, N)
        else:
            g = load_algebra(alg)
            probe = GroupoidCochain.parse(g, p, expr, 64)
            N = N if N is not None else _degree(probe.form) + p + _formdeg(probe.form, q) + 1
            out = GroupoidCochain.parse(g, p, expr, N)
    except (ParseError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"cannot parse cochain: {exc}") from None
    form = out.func if isinstance(out, ASCochain) else out.form
    if q is not None and not form.is_zero() and {len(S) for _, S in form.terms} != {q}:
        raise InputError(f"expression is not of form degree {q}")
    return out


def _formdeg(form, q: Optional[int]) -> int:
    if q is not None:
        return q
    return max((len(S) for _, S in form.terms), default=0)


def _weil_json(w: WeilElement) -> list:
    out = []
    for (I, J), c in sorted(w.constant_parts().items()):
        out.append({"eb": [i + 1 for i in I], "e": [j + 1 for j in J], "coeff": _q(c)})
    return out


def _q(c) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _load_element(args, g: LieAlgebraSpec) -> WeilElement:
    if not args.element:
        raise InputError("--element is required")
    try:
        return parse_weil(args.element, g)
    except (WeilParseError, ValueError) as exc:
        raise InputError(f"cannot parse element: {exc}") from None


def _direction(op: str, g: LieAlgebraSpec) -> int:
    try:
        k = int(op.split(":", 1)[1]) - 1
    except (IndexError, ValueError):
        raise InputError(f"operator {op!r} needs a basis index, e.g. {op.split(':')[0]}:1") from None
    if not 0 <= k < g.dim:
        raise InputError(f"basis index out of range 1..{g.dim}")
    return k


def weil_op(op: str, w: WeilElement) -> WeilElement:
    g = w.algebra
    name = op.split(":", 1)[0]
    simple = {"dK": koszul_differential, "dCE": ce_weil_differential, "dW": weil_differential,
              "U": kalkman_twist, "Uinv": lambda x: kalkman_twist(x, inverse=True), "kappa": koszul_homotopy}
    if name in simple and ":" not in op:
        return simple[name](w)
    if name in ("iS", "iK", "iCE"):
        return contract(name, _direction(op, g), w)
    if name == "L":
        return lie_derivative(_direction(op, g), w)
    raise InputError(f"unknown operator {op!r} (dK, dCE, dW, U, Uinv, kappa, iS:k, iK:k, iCE:k, L:k)")


def run_compute(args) -> dict:
    target = args.target
    if target == "cohomology":
        g = load_algebra(args.algebra or "")
        b = cohomology_dims(g)
        return {"text": " ".join(map(str, b)), "json": {"schema": 1, "algebra": g.name, "betti": b}}
    if target == "ve":
        if not args.cochain:
            raise InputError("--cochain is required")
        data = _read_json(args.cochain)
        phi = load_cochain(data)
        if args.order is not None:
            phi = type(phi).parse(*_reparse(phi, data, args.order))
        route = data.get("route", "zigzag")
        if isinstance(phi, ASCochain):
            form = alexander_spanier_ve(phi)
            text = format_form(form)
            return {"text": text, "json": {"schema": 1, "result": text}}
        fn = {"zigzag": ve_zigzag, "dproduct": ve_dproduct, "explicit": ve_explicit}.get(route)
        if fn is None:
            raise InputError(f"unknown route {route!r}")
        w = fn(phi)
        return {"text": format_weil(w), "json": {"schema": 1, "result": format_weil(w), "terms": _weil_json(w)}}
    if target == "reverse":
        g = load_algebra(args.algebra or "")
        w = _load_element(args, g)
        ps = {len(I) + len(J) for I, J in w.constant_parts()}
        if len(ps) > 1:
            raise InputError("element must be homogeneous in p")
        N = args.order if args.order is not None else (ps.pop() if ps else 0) + 1
        phi = reverse_map(w, N)
        return {"text": str(phi), "json": {"schema": 1, "level": phi.level, "order": phi.order, "expr": str(phi)}}
    if target == "weil-op":
        g = load_algebra(args.algebra or "")
        w = _load_element(args, g)
        if not args.op:
            raise InputError("--op is required")
        r = weil_op(args.op, w)
        return {"text": format_weil(r), "json": {"schema": 1, "result": format_weil(r), "terms": _weil_json(r)}}
    raise InputError(f"unknown compute target {target!r}")


def _reparse(phi, data: dict, N: int):
    if isinstance(phi, ASCochain):
        return (phi.m, phi.level, data["expr"], N)
    return (phi.algebra, phi.level, data["expr"], N)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="vanest", description="Van Est map on jets of local Lie groups")
    sub = ap.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--algebra", help="builtin name (abelian2, heisenberg, sl2, aff1) or JSON file")
    common.add_argument("--cochain", help="JSON cochain spec")
    common.add_argument("--order", type=int, help="truncation order override")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--pmax", type=int, default=3)
    common.add_argument("--qmax", type=int, default=2)
    common.add_argument("--count", type=int, help="number of random cases")
    common.add_argument("--format", choices=("text", "json"), default="text")
    c = sub.add_parser("check", parents=[common], help="run a verification suite")
    c.add_argument("target", choices=CHECKS)
    k = sub.add_parser("compute", parents=[common], help="compute a single result")
    k.add_argument("target", choices=COMPUTES)
    k.add_argument("--element", help="Weil element, e.g. 'e1^e2 + 2*eb3'")
    k.add_argument("--op", help="operator for weil-op: dK, dCE, dW, U, Uinv, kappa, iS:k, iK:k, iCE:k, L:k")
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.order is not None and args.order < 0:
            raise InputError("--order must be non-negative")
        if args.command == "check":
            rep = run_check(args)
            if args.format == "json":
                print(json.dumps(rep.to_json(), indent=2, sort_keys=True))
            else:
                print("\n".join(rep.lines()))
                print("PASS" if rep.ok else "FAIL")
            return 0 if rep.ok else 1
        out = run_compute(args)
        if args.format == "json":
            print(json.dumps(out["json"], indent=2, sort_keys=True))
        else:
            print(out["text"])
        return 0
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except TruncationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
