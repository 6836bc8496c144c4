"""Command-line driver: ``stringalg <command> <input> [options]``.

Exit codes: 0 when every verdict holds (or the computation succeeded), 1 when
some verdict fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path as FsPath
from typing import Optional

from .axioms import AXIOM_ORDER, check_presentation, check_string
from .freealg import PresentationError, load_presentation, parse_element
from .orders import OrderError, verify_order
from .quotient import NotFiniteAtPrecision, build
from .structure import (InadmissiblePath, NotAStringAlgebra, admissible_paths, cover_kernel,
                        gabriel_quiver, radical_syzygies, uniserial_chain)

SCHEMA = "stringalg-report/1"
EXAMPLES = ["comparing", "dihedral", "node", "fields", "roggenkamp", "drozd", "br-field-gentle"]


class InputError(Exception):
    pass


def list_examples() -> list[str]:
    return list(EXAMPLES)


def example_text(name: str) -> str:
    if name not in EXAMPLES:
        raise InputError(f"unknown example {name!r}; known: {', '.join(EXAMPLES)}")
    return (resources.files("stringalg") / "fixtures" / f"{name}.toml").read_text(encoding="utf-8")


def load_input(source: str, precision: Optional[int] = None):
    """A file path, or the name of a built-in example."""
    if source in EXAMPLES and not FsPath(source).exists():
        pres = load_presentation(example_text(source), name=source)
    else:
        if not FsPath(source).is_file():
            raise InputError(f"no such file or example: {source}")
        pres = load_presentation(FsPath(source))
    if precision is not None:
        if precision < 1:
            raise InputError("--precision-override must be positive")
        pres = pres.with_precision(precision)
    return pres


def parse_path_option(text: Optional[str], pres):
    if not text:
        raise InputError("--path is required for this command")
    x = parse_element(text, pres.quiver, pres.ring)
    terms = list(x.terms.items())
    if len(terms) != 1 or terms[0][1] != 1:
        raise InputError(f"--path must be a single path, got {text!r}")
    return terms[0][0]


# -- command bodies: each returns (exit code, result dict, text lines) ------------------------


@dataclass
class Outcome:
    code: int
    result: dict
    lines: list[str]


def _verdict_line(name: str, v: dict) -> str:
    s = f"{name:<18} {v['verdict']}"
    det = v.get("details", {})
    if name == "bounded_below" and "m" in det:
        s += f" (m = {det['m']})"
    if "witness" in v:
        s += f": {v['witness']}"
    return s


def _check_report(rep) -> Outcome:
    d = rep.to_dict()
    lines = []
    if "admissibility_precision" in rep.certification:
        lines.append(f"admissibility certified at precision {rep.certification['admissibility_precision']}")
    lines += [_verdict_line(k, d["axioms"][k]) for k in AXIOM_ORDER]
    return Outcome(0 if rep.all_hold() else 1, d, lines)


def cmd_check(A, args) -> Outcome:
    return _check_report(check_string(A))


def _check_unbuilt(pres):
    rep = check_presentation(pres)
    cert = {k: v for k, v in rep.certification.items() if k != "admissibility_precision"}
    return _check_report(rep), cert


def cmd_paths(A, args) -> Outcome:
    n = A.L if args.max_len is None else args.max_len
    if n < 0:
        raise InputError("--max-len must be non-negative")
    Q = A.quiver
    ps = [Q.render_path(p) for p in admissible_paths(A, n)]
    return Outcome(0, {"max_len": n, "paths": ps}, ps)


def cmd_chain(A, args) -> Outcome:
    p = parse_path_option(args.path, A.presentation)
    ch = uniserial_chain(A, p, args.side)
    d = ch.render(A.quiver)
    lines = [f"{args.side} chain of {d['generator']}:"] + [f"  {q}" for q in d["chain"]]
    lines += [f"terminal: {d['terminal']}", f"strict: {str(d['strict']).lower()}",
              f"exhaustive: {str(d['exhaustive']).lower()}"]
    lines += [f"failure: {f}" for f in d["failures"]]
    return Outcome(0 if ch.strict and ch.exhaustive else 1, d, lines)


def _kernel_lines(d: dict) -> list[str]:
    if d["side"] == "left":
        parts = [f"Lambda*{x['generator']}" for x in d["summands"]]
    else:
        parts = [f"{x['generator']}*Lambda" for x in d["summands"]]
    lines = [f"{d['side']} kernel for {d['path']} (cover at vertex {d['cover_vertex']}, "
             f"case {d['case']}): {' + '.join(parts) or '0'}",
             f"  brute-force agreement: {str(d['brute_force_agreement']).lower()}",
             f"  direct sum: {str(d['direct_sum']).lower()}"]
    if "note" in d:
        lines.append(f"  note: {d['note']}")
    return lines


def cmd_kernel(A, args) -> Outcome:
    Q = A.quiver
    if args.path:
        reps = [cover_kernel(A, parse_path_option(args.path, A.presentation), args.side)]
    else:
        reps = radical_syzygies(A)
    ds = [r.render(Q) for r in reps]
    lines = [ln for d in ds for ln in _kernel_lines(d)]
    ok = all(r.brute_force_agreement and r.direct and len(r.summands) <= 2 for r in reps)
    return Outcome(0 if ok else 1, {"kernels": ds}, lines)


def cmd_quiver(A, args) -> Outcome:
    rep = gabriel_quiver(A)
    Q = A.quiver
    d = rep.to_dict(Q)
    w = max(len(v) for v in Q.vertices)
    lines = ["a(i, j) = number of arrows i -> j", " " * (w + 1) + " ".join(Q.vertices)]
    for v, row in zip(Q.vertices, d["matrix"]):
        lines.append(f"{v:>{w}} " + " ".join(f"{x:>{len(u)}}" for x, u in zip(row, Q.vertices)))
    lines += [f"matches input quiver: {str(rep.match).lower()}",
              f"top length: {rep.top_length}",
              f"radical layer length: {rep.radical_layer_length}"]
    return Outcome(0 if rep.match else 1, d, lines)


def cmd_verify_order(A, args) -> Outcome:
    rep = verify_order(A)
    d = rep.to_dict()
    lines = [_verdict_line(k, v) for k, v in d.items()]
    kd = d["kernel_is_ideal"].get("details")
    if kd:
        lines.append(f"free rank {kd['free_rank']}, image free rank {kd['image_free_rank']} "
                     f"(certified at precision {kd['certificate_precision']})")
    return Outcome(0 if rep.all_hold else 1, d, lines)


COMMANDS = {"check": cmd_check, "paths": cmd_paths, "chain": cmd_chain, "kernel": cmd_kernel,
            "quiver": cmd_quiver, "verify-order": cmd_verify_order}


# -- driver ------------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stringalg",
                                 description="Certify string-algebra conditions for RQ/I over R/pi^N.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("input", help="presentation file or built-in example name")
        sp.add_argument("--precision-override", type=int, default=None, metavar="N")
        sp.add_argument("--format", choices=["text", "json"], default="text")
        if name == "paths":
            sp.add_argument("--max-len", type=int, default=None)
        if name in ("chain", "kernel"):
            sp.add_argument("--path", default=None, help="path in the element syntax, e.g. a*b")
            sp.add_argument("--side", choices=["left", "right"], default="left")
    ex = sub.add_parser("examples")
    ex.add_argument("name", nargs="?")
    ex.add_argument("--dump", action="store_true")
    ex.add_argument("--format", choices=["text", "json"], default="text")
    return ap


def _emit(text: str, stream) -> None:
    stream.write(text if text.endswith("\n") else text + "\n")


def run(argv: Optional[list[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        if args.command == "examples":
            return _run_examples(args, out)
        pres = load_input(args.input, args.precision_override)
        if args.command == "check":
            res, cert = _check_unbuilt(pres)
        else:
            A = build(pres)
            res = COMMANDS[args.command](A, args)
            cert = A.certification()
    except NotFiniteAtPrecision as exc:
        _emit(f"error: {exc}", err)
        return 1
    except NotAStringAlgebra as exc:
        _emit(f"error: {exc}", err)
        return 1
    except (InputError, PresentationError, InadmissiblePath, OrderError) as exc:
        _emit(f"error: {exc}", err)
        return 2
    if args.format == "json":
        doc = {"schema": SCHEMA, "command": args.command, "presentation": pres.name,
               "certification": cert, "exit_code": res.code, "result": res.result}
        _emit(json.dumps(doc, indent=2, ensure_ascii=False), out)
    else:
        head = [f"presentation: {pres.name}", f"ring: {cert['ring']}"]
        if "window" in cert:
            head.append(f"certified at precision {cert['precision']}, window {cert['window']}")
        else:
            head.append(f"no finite model at precision {cert['precision']}")
        _emit("\n".join(head + res.lines), out)
    return res.code


def _run_examples(args, out) -> int:
    if args.name is None:
        if args.dump:
            raise InputError("--dump needs an example name")
        if args.format == "json":
            _emit(json.dumps({"schema": SCHEMA, "command": "examples", "examples": EXAMPLES}, indent=2), out)
        else:
            _emit("\n".join(EXAMPLES), out)
        return 0
    text = example_text(args.name)
    if args.dump:
        out.write(text)
        return 0
    pres = load_presentation(text, name=args.name)
    lines = [f"{args.name}: {pres.ring.describe()}, {pres.quiver.num_vertices} vertices, "
             f"{pres.quiver.num_arrows} arrows, {len(pres.generator_texts)} generators"]
    _emit("\n".join(lines), out)
    return 0


def main(argv: Optional[list[str]] = None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
