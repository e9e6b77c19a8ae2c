"""Command-line front end. Every command is a pure function of (inputs, seed)
and emits a stable JSON document (integers as decimal strings so consumers
never hit precision traps); text mode is a human rendering of the same data.

Exit codes: 0 success, 2 invalid input, 3 algorithmic failure (max_trials),
4 internal invariant violation.
"""

import argparse
import json
import os
import random
import sys

from . import backend
from .curve import Curve, FrobeniusData, is_ordinary, j_invariant, trace
from .endo import EndRingResult, ascend, oracle_endring
from .errors import EndoringError, InvalidInputError
from .field import PrimeField
from .isogeny import walk
from .ntheory import derive_seed
from .quadorder import (
    build_factor_base,
    class_group_structure,
    enumerate_classes,
    order_from_frobenius,
    prime_ideal_above,
)
from .relations import RelationParams, find_relation

DEFAULT_SEED = 0xE4D0_0001


def _s(n: int) -> str:
    return str(int(n))


def _curve_from_args(args) -> tuple[Curve, FrobeniusData]:
    F = PrimeField(args.p)
    E = Curve(F, args.a, args.b)
    fd = trace(E)
    if not is_ordinary(fd):
        raise InvalidInputError("curve is not ordinary (supersingular)")
    return E, fd


def _params_from_args(args) -> RelationParams:
    kwargs = {}
    if getattr(args, "norm_bound", None) is not None:
        kwargs["norm_bound"] = args.norm_bound
    if getattr(args, "coord_bound", None) is not None:
        kwargs["coord_bound"] = args.coord_bound
    if getattr(args, "small_norm_bound", None) is not None:
        kwargs["small_norm_bound"] = args.small_norm_bound
    if getattr(args, "r_min", None) is not None:
        kwargs["r_min"] = args.r_min
    if getattr(args, "max_trials", None) is not None:
        kwargs["max_trials"] = args.max_trials
    return RelationParams(**kwargs)


def _seed_from_args(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("ENDORING_SEED")
    if env:
        return int(env)
    return DEFAULT_SEED


def _result_doc(fd: FrobeniusData, res: EndRingResult, seed: int) -> dict:
    return {
        "t": _s(fd.t),
        "delta": _s(fd.delta),
        "delta_factorization": [[_s(p), _s(e)] for p, e in fd.delta_factorization],
        "d_K": _s(res.d_k),
        "f_max": _s(res.f_max),
        "conductor": _s(res.conductor),
        "discriminant": _s(res.discriminant),
        "lattice_path": [_s(f) for f in res.lattice_path],
        "relations_used": _s(res.relations_used),
        "volcano_levels": {_s(p): _s(v) for p, v in sorted(res.volcano_levels.items())},
        "seed": _s(seed),
    }


def cmd_compute(args) -> dict:
    E, fd = _curve_from_args(args)
    seed = _seed_from_args(args)
    params = _params_from_args(args)
    res = ascend(E, fd, params, random.Random(derive_seed(seed, "compute")), threads=args.threads)
    return _result_doc(fd, res, seed)


def cmd_oracle(args) -> dict:
    E, fd = _curve_from_args(args)
    res = oracle_endring(E, fd)
    doc = _result_doc(fd, res, _seed_from_args(args))
    doc["method"] = "oracle"
    return doc


def cmd_classgroup(args) -> dict:
    D = args.disc
    forms = enumerate_classes(D)
    structure = class_group_structure(D)
    return {
        "D": _s(D),
        "h": _s(len(forms)),
        "reduced_forms": [[_s(f.a), _s(f.b), _s(f.c)] for f in forms],
        "structure": [
            {"generator": [_s(g.a), _s(g.b), _s(g.c)], "order": _s(k)}
            for g, k in structure
        ],
    }


def cmd_relation(args) -> dict:
    seed = _seed_from_args(args)
    if args.p is not None:
        if args.disc is not None:
            raise InvalidInputError("give either a curve (--p --a --b) or --disc, not both")
        _, fd = _curve_from_args(args)
    else:
        if args.disc is None:
            raise InvalidInputError("need a curve (--p --a --b) or a discriminant spec")
        if args.trace is None or args.q is None:
            raise InvalidInputError("--disc mode needs --trace and --q")
        if args.trace * args.trace - 4 * args.q != args.disc:
            raise InvalidInputError("t^2 - 4q does not equal the given discriminant")
        fd = FrobeniusData.synthetic(args.disc)
        fd = FrobeniusData(
            q=args.q,
            t=args.trace,
            delta=args.disc,
            delta_factorization=fd.delta_factorization,
            char=None,
        )
    O = order_from_frobenius(fd)
    params = _params_from_args(args)
    B = build_factor_base(O, fd, params.resolve_norm_bound(fd))
    rel = find_relation(O, fd, params, random.Random(derive_seed(seed, "relation")), B=B)
    return {
        "D": _s(O.D),
        "factor_base": [[_s(p.ell), _s(p.lam)] for p in B.primes],
        "relation": {_s(ell): _s(e) for ell, e in sorted(rel.n.items())},
        "verified": True,
        "trials": _s(rel.trials),
        "seed": _s(seed),
    }


def cmd_act(args) -> dict:
    E, fd = _curve_from_args(args)
    seed = _seed_from_args(args)
    O = order_from_frobenius(fd)
    pic = prime_ideal_above(O, fd, args.ell)
    if pic is None:
        raise InvalidInputError(
            f"ell = {args.ell} is not a split prime coprime to the discriminant"
        )
    if args.which == "minus":
        pic = pic.conj()
    curves = walk(E, fd, pic, args.steps, random.Random(derive_seed(seed, "act")))
    js = [j_invariant(c) for c in curves]
    j0 = js[0]
    return {
        "ell": _s(args.ell),
        "which": args.which,
        "lambda": _s(pic.eigenvalue(fd)),
        "j_walk": [_s(int(j)) for j in js],
        "cycle_detected": any(j == j0 for j in js[1:]),
        "seed": _s(seed),
    }


def _render_text(doc: dict, indent: str = "") -> str:
    lines = []
    for key, val in doc.items():
        if isinstance(val, dict):
            lines.append(f"{indent}{key}:")
            lines.append(_render_text(val, indent + "  "))
        elif isinstance(val, list):
            lines.append(f"{indent}{key}: {json.dumps(val)}")
        else:
            lines.append(f"{indent}{key}: {val}")
    return "\n".join(lines)


def _add_curve_args(sp):
    sp.add_argument("--p", type=int, required=True, help="prime field characteristic (> 3)")
    sp.add_argument("--a", type=int, required=True, help="curve coefficient a")
    sp.add_argument("--b", type=int, required=True, help="curve coefficient b")


def _add_param_args(sp):
    sp.add_argument("--norm-bound", type=int, default=None, help="factor-base norm bound N")
    sp.add_argument("--coord-bound", type=int, default=None, help="per-coordinate draw bound")
    sp.add_argument("--small-norm-bound", type=int, default=None, help="small-prime cutoff for draws")
    sp.add_argument("--r-min", type=int, default=None, help="minimum relations per order test")
    sp.add_argument("--max-trials", type=int, default=None, help="relation search trial budget")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="endoring",
        description="Endomorphism rings of ordinary elliptic curves over prime fields "
        f"(arithmetic core: {backend.backend_name()})",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("compute", help="compute End(E) by relation tests + lattice ascent")
    _add_curve_args(sp)
    _add_param_args(sp)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_compute)

    sp = sub.add_parser("oracle", help="compute End(E) by the deterministic volcano oracle")
    _add_curve_args(sp)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("classgroup", help="enumerate cl(D) and its structure")
    sp.add_argument("--disc", type=int, required=True, help="negative discriminant, 0 or 1 mod 4")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_classgroup)

    sp = sub.add_parser("relation", help="draw one verified random relation")
    sp.add_argument("--p", type=int, default=None)
    sp.add_argument("--a", type=int, default=None)
    sp.add_argument("--b", type=int, default=None)
    sp.add_argument("--disc", type=int, default=None)
    sp.add_argument("--trace", type=int, default=None)
    sp.add_argument("--q", type=int, default=None)
    _add_param_args(sp)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_relation)

    sp = sub.add_parser("act", help="walk the CM action of one prime ideal")
    _add_curve_args(sp)
    sp.add_argument("--ell", type=int, required=True)
    sp.add_argument("--which", choices=("plus", "minus"), default="plus")
    sp.add_argument("--steps", type=int, default=1)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_act)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if args.command == "relation" and args.p is not None:
            if args.a is None or args.b is None:
                raise InvalidInputError("curve mode needs --p --a --b")
        doc = args.func(args)
    except EndoringError as exc:
        err = {"error": {"code": exc.exit_code, "message": str(exc)}}
        print(json.dumps(err, sort_keys=True, separators=(",", ":")))
        return exc.exit_code
    if args.json:
        print(json.dumps(doc, sort_keys=True, separators=(",", ":")))
    else:
        print(_render_text(doc))
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
