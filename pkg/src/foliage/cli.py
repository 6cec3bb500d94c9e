"""``foliage`` command-line front end.

Every verb builds a JSON-ready dict; ``--format table`` renders that same
dict as aligned text.  Errors go to stderr as a JSON object carrying
``error_code`` and the process exits with the error's status.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .bound_catalog import InvariantRecord, evaluate_bounds
from .errors import FoliageError, InputError
from .foliation_model import FoliatedSurface, index_formulas
from .gallery import CASES, build_example, parse_params, verify_example
from .numeric_kernel import fmt_rational
from .plane_foliation_lab import (
    PlaneFoliation,
    depth_cap_from_env,
    find_singularities,
    reduce_local,
    reduce_singularities,
)
from .surface_lattice import DivClass, SurfaceLattice, chi_of_class
from .zariski_engine import ChainSpec, chain_negative_part, zariski_decompose

VERBS = ("invariants", "zariski", "classify-sing", "reduce", "check-inequalities", "gallery")


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, fixed separators, no floats introduced here."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False)


def _q(v) -> str:
    return fmt_rational(Fraction(v))


def _load(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc.msg} at line {exc.lineno}") from exc


def _input(args):
    path = getattr(args, "field", None) or args.input
    if path is None:
        raise InputError("no input file given")
    return _load(path)


def _obj(data, what="input") -> dict:
    if not isinstance(data, dict):
        raise InputError(f"{what} must be a JSON object")
    return data


# ------------------------------------------------------------------ verbs

def cmd_invariants(args) -> dict:
    FS = FoliatedSurface.from_json(_obj(_input(args)))
    kf, ks = FS.kf, FS.ks
    curves = {}
    for c in FS.curves:
        idx = index_formulas(FS, c)
        curves[c.label] = (
            {"tang": _q(idx.tang)} if idx.tang is not None else {"Z": _q(idx.Z), "CS": _q(idx.CS)}
        )
    return {
        "kf2": _q(kf.square()),
        "ks2": _q(ks.square()),
        "kf_ks": _q(kf.dot(ks)),
        "normal2": _q(FS.normal_class.square()),
        "chi_kf": _q(chi_of_class(FS.lattice, kf)),
        "curves": curves,
    }


def _chain_input(data: dict) -> ChainSpec:
    ch = data["chain"]
    if isinstance(ch, list):
        ch = {"e": ch}
    es = ch.get("e") or ch.get("self_intersections")
    if not es:
        raise InputError("chain needs a non-empty list e of self-intersection magnitudes")
    kd = ch.get("kf_dot") or [-1] + [0] * (len(es) - 1)
    labels = ch.get("labels") or [f"C{i}" for i in range(1, len(es) + 1)]
    return ChainSpec(es, [Fraction(v) for v in kd], tuple(labels))


def cmd_zariski(args) -> dict:
    data = _obj(_input(args))
    if "chain" in data:
        spec = _chain_input(data)
        y = chain_negative_part(spec)
        return {"kind": "chain", "N": {lab: _q(v) for lab, v in zip(spec.labels, y)}}
    if "model" in data:
        FS = FoliatedSurface.from_json(data["model"])
        wanted = data.get("candidates")
        cands = [c for c in FS.curves if wanted is None or c.label in wanted]
        res = zariski_decompose(FS.kf, cands)
    else:
        try:
            L = SurfaceLattice.from_json(data["lattice"])
            D = DivClass(data["D"], L)
            cands = [(c["label"], DivClass(c["class"], L)) for c in data.get("candidates", [])]
        except (KeyError, TypeError) as exc:
            raise InputError(f"zariski input needs lattice, D and candidates ({exc})") from exc
        res = zariski_decompose(D, cands)
    out = res.to_json()
    out["kind"] = "decomposition"
    return out


def _field(data: dict) -> PlaneFoliation:
    return PlaneFoliation.from_json(data["field"] if "field" in data else data)


def cmd_classify(args) -> dict:
    data = _obj(_input(args))
    F = _field(data)
    reps = find_singularities(F)
    return {
        "degree": F.degree,
        "count": sum(r.multiplicity or 1 for r in reps),
        "all_reduced": all(r.is_reduced for r in reps),
        "singularities": [r.to_json() for r in reps],
    }


def cmd_reduce(args) -> dict:
    data = _obj(_input(args))
    cap = args.depth_cap if args.depth_cap is not None else depth_cap_from_env()
    if data.get("local"):
        F = _field(data)
        node = reduce_local(F.A, F.B, cap)
        return {
            "blowups": node.blowups(),
            "kf_coefficients": node.coefficients(),
            "all_reduced": all(l.report is not None and l.report.is_reduced for l in node.leaves()),
            "tree": [node.to_json()],
        }
    return reduce_singularities(_field(data), cap).to_json()


def cmd_check(args) -> dict:
    rec = InvariantRecord.from_json(_obj(_input(args)))
    out = evaluate_bounds(rec, include_auxiliary=args.auxiliary).to_json()
    out["record"] = rec.to_json()
    return out


def cmd_gallery(args) -> dict:
    if args.case is None:
        return {"cases": {k: list(v) for k, v in CASES.items()}}
    case = build_example(args.case, parse_params(args.params))
    if args.verify:
        return verify_example(case).to_json()
    return {
        "case": case.id,
        "params": case.params,
        "expected": {k: _q(v) for k, v in case.expected.items()},
        "model": case.model.to_json(),
        "candidates": [c.label for c in case.candidates],
        "pg_route": case.pg_route,
    }


# ------------------------------------------------------------------ tables

def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k in sorted(obj):
            yield from _flatten(obj[k], f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list) and obj and not all(isinstance(v, (dict, list)) for v in obj):
        yield prefix, ", ".join(str(v) for v in obj)
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, "" if obj is None else str(obj).lower() if isinstance(obj, bool) else str(obj)


def _grid(rows: list) -> list:
    cols = sorted({k for r in rows for k in r})
    width = {c: max(len(c), *(len(r.get(c, "")) for r in rows)) for c in cols}
    lines = ["  ".join(c.ljust(width[c]) for c in cols).rstrip()]
    lines.append("  ".join("-" * width[c] for c in cols))
    for r in rows:
        lines.append("  ".join(r.get(c, "").ljust(width[c]) for c in cols).rstrip())
    return lines


def render_table(data: dict) -> str:
    """Aligned text view of a JSON report; lists of records become column tables."""
    scalars, tables = [], []
    for k in sorted(data):
        v = data[k]
        if isinstance(v, list) and v and all(isinstance(x, dict) for x in v):
            tables.append((k, [dict(_flatten(x)) for x in v]))
        else:
            scalars.extend(_flatten(v, k))
    out = []
    if scalars:
        w = max(len(k) for k, _ in scalars)
        out += [f"{k.ljust(w)}  {v}" for k, v in scalars]
    for name, rows in tables:
        out += ["", f"{name}:"] + _grid(rows)
    return "\n".join(out) + "\n"


# -------------------------------------------------------------------- main

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="foliage", description="Exact invariants of foliated surfaces.")
    p.add_argument("--format", choices=("json", "table"), default="json")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def verb(name, fn, helptext, with_input=True):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--format", choices=("json", "table"), default=argparse.SUPPRESS)
        if with_input:
            sp.add_argument("input", nargs="?", help="JSON file, or - for stdin")
        sp.set_defaults(func=fn)
        return sp

    verb("invariants", cmd_invariants, "intersection numbers and curve indices of a model")
    verb("zariski", cmd_zariski, "Zariski decomposition or F-chain negative part")
    c = verb("classify-sing", cmd_classify, "singularities of a plane polynomial field")
    r = verb("reduce", cmd_reduce, "blow up until every singularity is reduced")
    for sp in (c, r):
        sp.add_argument("--field", help="field JSON file (alternative to the positional input)")
    r.add_argument("--depth-cap", type=int, default=None)
    verb("check-inequalities", cmd_check, "evaluate the bound catalog on an invariant record").add_argument(
        "--auxiliary", action="store_true", help="include the restated consequences"
    )
    g = verb("gallery", cmd_gallery, "rebuild a worked example", with_input=False)
    g.add_argument("--case", choices=sorted(CASES))
    g.add_argument("--params", default=None, help="comma separated name=value list")
    g.add_argument("--verify", action="store_true")
    return p


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        data = args.func(args)
        stdout.write(render_table(data) if args.format == "table" else dumps(data) + "\n")
        return 0
    except FoliageError as exc:
        err = exc.as_dict()
        if getattr(exc, "partial", None) is not None:
            err["partial"] = exc.partial
        stderr.write(json.dumps(err, sort_keys=True, default=str) + "\n")
        return exc.exit_code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
