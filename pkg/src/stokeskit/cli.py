"""``stokeskit`` command line: build, check, directions, tangent, and the bundled corpus."""
from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
import time
from importlib import resources
from pathlib import Path

from . import io as sio
from .functors import (FunctorError, cocartesian_failures, ext_dims, fiber_restriction, is_split, is_stokes)
from .generators import GenerationError, random_stokes
from .irregular import format_angle, level_filtration, stokes_directions
from .space import FiberwiseMap, StokesSpace
from .stokes_ops import devissage_check, hybrid_descent_report, is_elementary

EXIT = {"valid": 0, "true": 0, "pass": 0, "elementary-certified": 0,
        "false": 1, "fail": 1, "counterexample": 1, "inconclusive": 2, "error": 64}
CHECKS = ("cocartesian", "split", "stokes", "elementary", "devissage", "descent")


class InputError(Exception):
    pass


def _load(path):
    try:
        return sio.load_json(path)
    except FileNotFoundError:
        raise InputError(f"{path}: no such file") from None
    except sio.SchemaError as e:
        raise InputError(str(e)) from None


def _space(path) -> StokesSpace:
    try:
        return sio.space_from_json(_load(path))
    except (sio.SchemaError, ValueError) as e:
        raise InputError(f"{path}: {e}") from None


def _functor(path, space):
    try:
        return sio.functor_from_json(_load(path), space=space)
    except (sio.SchemaError, ValueError) as e:
        raise InputError(f"{path}: {e}") from None


def _digest(*paths) -> str:
    h = hashlib.sha256()
    for p in paths:
        if p:
            h.update(Path(p).read_bytes())
    return h.hexdigest()[:16]


# ---------------------------------------------------------------------------
# commands; each returns (verdict, witness)


def cmd_build(args):
    s = _space(args.file)
    return "valid", {"space": sio.space_to_json(s), "total": sio.total_to_json(s),
                     "counts": {"base": len(s.base), "total": len(s.total),
                                "total_covers": len(s.total.covers())}}


def _random_functors(space, args):
    rng = random.Random(args.seed)
    out = []
    for _ in range(args.trials):
        try:
            out.append(random_stokes(space, rng, max_dim=args.dim_bound))
        except GenerationError:
            pass
    return out


def _level_map(space):
    cls = space.meta.get("irregular_class")
    if cls is not None:
        return list(level_filtration(cls, space).maps)
    return [FiberwiseMap.to_point(space)]


def cmd_check(args):
    space = _space(args.file)
    F = _functor(args.functor, space) if args.functor else None
    which = args.which
    if which in ("cocartesian", "split", "stokes") and F is None:
        raise InputError(f"check {which} needs --functor")
    if which == "cocartesian":
        fails = cocartesian_failures(F, space)
        return ("false" if fails else "true"), {"failures": [[str(x), str(y), str(b)] for x, y, b in fails]}
    if which == "split":
        bad = [str(x) for x in space.base if not is_split(fiber_restriction(F, space, x))[0]]
        return ("false" if bad else "true"), {"non_split_fibers": bad}
    if which == "stokes":
        ok = is_stokes(F, space)
        return ("true" if ok else "false"), {"cocartesian_failures": len(cocartesian_failures(F, space))}
    if which == "elementary":
        v = is_elementary(space, dim_bound=args.dim_bound, trials=args.trials, seed=args.seed)
        w = {"reason": v.reason, "details": _plain(v.details)}
        if v.witness is not None:
            w["functor"] = sio.functor_to_json(v.witness, space)
        return v.verdict, w
    functors = [F] if F is not None else _random_functors(space, args)
    if which == "devissage":
        maps = _level_map(space)
        reports = []
        for i, G in enumerate(functors):
            for k, p in enumerate(maps):
                r = devissage_check(space if k == 0 else p.source, p, G if k == 0 else _push(maps[:k], G),
                                    seed=args.seed + i)
                reports.append({"functor": i, "step": k, **r.to_json()})
        ok = all(r["passed"] for r in reports)
        failed = [r for r in reports if not r["passed"]]
        return ("pass" if ok else "fail"), {"runs": len(reports), "failed": failed[:5]}
    if which == "descent":
        cover = [sorted(space.base.up_set(x), key=space.base.index) for x in space.base.minimal()]
        reports = [hybrid_descent_report(space, cover, G) for G in functors]
        ok = all(r["descends"] for r in reports)
        return ("true" if ok else "false"), {"cover": [[str(x) for x in c] for c in cover],
                                             "runs": len(reports), "reports": reports[:3]}
    raise InputError(f"unknown check {which!r}")


def _push(maps, G):
    from .functors import lan
    for p in maps:
        G = lan(p.total_map, G)
    return G


def _plain(d):
    return json.loads(json.dumps(d, default=str))


def cmd_directions(args):
    data = _load(args.file)
    try:
        cls = sio.irregular_from_json(data)
    except (sio.SchemaError, ValueError) as e:
        raise InputError(f"{args.file}: {e}") from None
    d = cls.ramification
    out = {}
    for i in range(len(cls)):
        for j in range(i + 1, len(cls)):
            a, b = cls.labels[i], cls.labels[j]
            out[f"({i},{j})"] = [format_angle(t) for t in stokes_directions(cls[a], cls[b], d)]
    return "valid", {"ramification": d, "labels": list(cls.labels), "directions": out}


def cmd_tangent(args):
    space = _space(args.file)
    if not args.functor:
        raise InputError("tangent needs --functor")
    F = _functor(args.functor, space)
    G = _functor(args.other, space) if args.other else F
    dims = ext_dims(F, G)
    chi = sum((-1) ** k * v for k, v in dims.items())
    return "valid", {"ext": {str(k): v for k, v in sorted(dims.items())}, "euler_characteristic": chi}


COMMANDS = {"build": cmd_build, "check": cmd_check, "directions": cmd_directions, "tangent": cmd_tangent}


# ---------------------------------------------------------------------------
# corpus

CORPUS = [
    # (description, argv, expected verdict)
    ("two-point circle build", ["build", "one_dimensional.json"], "valid"),
    ("square build", ["build", "square.json"], "valid"),
    ("two-point circle elementary", ["check", "one_dimensional.json", "--which", "elementary"], "counterexample"),
    ("W_1 elementary", ["check", "one_dimensional_W1.json", "--which", "elementary"], "elementary-certified"),
    ("W_-1 elementary", ["check", "one_dimensional_W-1.json", "--which", "elementary"], "elementary-certified"),
    ("point a<b elementary", ["check", "point_chain.json", "--which", "elementary"], "counterexample"),
    ("interval intro elementary", ["check", "interval_intro.json", "--which", "elementary"], "elementary-certified"),
    ("three-element interval elementary", ["check", "three_element_interval.json", "--which", "elementary"],
     "counterexample"),
    ("shadowed interval elementary", ["check", "three_element_interval_shadowed.json", "--which", "elementary"],
     "elementary-certified"),
    ("rank (1,1) circle functor is Stokes",
     ["check", "zero_one.json", "--functor", "rank11_functor.json", "--which", "stokes"], "true"),
    ("two-level devissage", ["check", "two_level.json", "--which", "devissage", "--trials", "8"], "pass"),
    ("two-level descent", ["check", "two_level.json", "--which", "descent", "--trials", "4"], "true"),
    ("{0, z^-1} directions", ["directions", "zero_one.json"], "valid"),
    ("Airy directions", ["directions", "airy.json"], "valid"),
    ("trivial local system tangent",
     ["tangent", "circle_local_system.json", "--functor", "trivial_rank1.json"], "valid"),
]


def data_dir() -> Path:
    return Path(str(resources.files("stokeskit") / "data"))


def run_corpus(args) -> int:
    base = data_dir()
    results = []
    code = 0
    for desc, argv, expected in CORPUS:
        argv = [argv[0], str(base / argv[1])] + [str(base / a) if a.endswith(".json") else a for a in argv[2:]]
        sub = build_parser().parse_args(argv + ["--seed", str(args.seed)])
        rep = _run(sub)
        ok = rep["verdict"] == expected
        code = code or (0 if ok else 1)
        results.append({"example": desc, "expected": expected, **rep, "ok": ok})
        if not args.json:
            print(f"{'ok  ' if ok else 'FAIL'} {desc}: {rep['verdict']} ({rep['elapsed_ms']} ms)")
    if args.json:
        print(json.dumps({"command": "corpus", "verdict": "pass" if code == 0 else "fail", "witness": results,
                          "seed": args.seed, "elapsed_ms": sum(r["elapsed_ms"] for r in results)},
                         sort_keys=True, ensure_ascii=False))
    return code


# ---------------------------------------------------------------------------


def _add_common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dim-bound", type=int, default=2)
    p.add_argument("--trials", type=int, default=64)
    p.add_argument("--json", action="store_true", help="machine-readable single-line report")
    p.add_argument("--no-timing", action="store_true", help="report elapsed_ms as 0 (byte-stable output)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stokeskit", description="Exact computations with finite Stokes functors.")
    ap.add_argument("--corpus", action="store_true", help="run the bundled worked examples")
    _add_common(ap)
    sub = ap.add_subparsers(dest="command")
    p = sub.add_parser("build", help="validate a space and dump its total poset")
    p.add_argument("file")
    _add_common(p)
    p = sub.add_parser("check", help="run a check on a space (and functor)")
    p.add_argument("file")
    p.add_argument("--functor")
    p.add_argument("--which", choices=CHECKS, required=True)
    _add_common(p)
    p = sub.add_parser("directions", help="exact Stokes directions of an irregular class")
    p.add_argument("file")
    _add_common(p)
    p = sub.add_parser("tangent", help="Ext dimensions and Euler characteristic of RHom(F, G)")
    p.add_argument("file")
    p.add_argument("--functor")
    p.add_argument("--other", help="second functor G (defaults to F)")
    _add_common(p)
    return ap


def _run(args) -> dict:
    t0 = time.perf_counter()
    paths = [getattr(args, k, None) for k in ("file", "functor", "other")]
    try:
        verdict, witness = COMMANDS[args.command](args)
        digest = _digest(*paths)
    except InputError as e:
        verdict, witness, digest = "error", {"error": str(e)}, None
    except (FunctorError, ValueError) as e:
        verdict, witness, digest = "error", {"error": f"{type(e).__name__}: {e}"}, None
    ms = 0 if args.no_timing else int(round((time.perf_counter() - t0) * 1000))
    return {"command": args.command, "verdict": verdict, "witness": witness, "seed": args.seed,
            "elapsed_ms": ms, "input_digest": digest}


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.corpus:
        return run_corpus(args)
    if args.command is None:
        ap.print_help()
        return 64
    rep = _run(args)
    if args.json:
        print(json.dumps(rep, sort_keys=True, ensure_ascii=False))
    else:
        if rep["verdict"] == "error":
            print(f"error: {rep['witness']['error']}", file=sys.stderr)
        else:
            print(json.dumps(rep, indent=2, sort_keys=True, ensure_ascii=False))
    return EXIT[rep["verdict"]]


if __name__ == "__main__":
    sys.exit(main())
