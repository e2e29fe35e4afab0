"""Command line interface.

Subcommands:

``sstt check FILE...``
    Type-check source files.  Files in the same directory whose names sort
    earlier are loaded first as dependencies, so a library split across
    numbered files works without an explicit import list.

``sstt corpus [DIR]``
    Check the bundled formal library (or another directory laid out the
    same way) and print a summary.

``sstt tope "x : 2, y : 2 | x <= y |- ..."``
    Decide a tope sequent and show a counter-model if it fails.

``--machine`` switches any subcommand to deterministic JSON on stdout.
Exit status: 0 success, 1 checking failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .checker import DEFAULT_FUEL
from .corpus import check_files, load_corpus
from .parser import ParseError, parse_sequent_source
from .tope import TopeError, TopeTooLargeError, entails


def _machine_dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


class Style:
    def __init__(self, enabled: bool):
        self.enabled = enabled

    def _wrap(self, code: str, s: str) -> str:
        return f"\033[{code}m{s}\033[0m" if self.enabled else s

    def good(self, s: str) -> str:
        return self._wrap("32", s)

    def bad(self, s: str) -> str:
        return self._wrap("31", s)

    def dim(self, s: str) -> str:
        return self._wrap("2", s)


def _style(args) -> Style:
    enabled = (not args.no_color and not os.environ.get("NO_COLOR")
               and sys.stdout.isatty() and not args.machine)
    return Style(enabled)


def _with_siblings(paths: list[Path]) -> tuple[list[Path], set[Path]]:
    """The given files plus earlier-sorting .sstt siblings, in check order."""
    wanted = {p.resolve() for p in paths}
    out: set[Path] = set()
    for p in paths:
        out.add(p.resolve())
        for sib in p.resolve().parent.glob("*.sstt"):
            if sib.name < p.name:
                out.add(sib.resolve())
    ordered = sorted(out, key=lambda p: (str(p.parent), p.name))
    return ordered, wanted


def cmd_check(args) -> int:
    style = _style(args)
    paths = [Path(p) for p in args.files]
    for p in paths:
        if not p.exists():
            print(f"error: no such file: {p}", file=sys.stderr)
            return 2
    ordered, wanted = _with_siblings(paths)
    reports, _ = check_files(ordered, fuel=args.fuel, stop_on_error=True)
    ok = all(r.ok for r in reports)
    if args.machine:
        payload = {
            "ok": ok,
            "files": [
                {
                    "path": r.path,
                    "requested": Path(r.path).resolve() in wanted,
                    "decls": [d.name for d in r.decls],
                    "diagnostics": [d.to_json() for d in r.diagnostics],
                }
                for r in reports
            ],
        }
        print(_machine_dump(payload))
        return 0 if ok else 1
    for r in reports:
        mark = style.good("ok") if r.ok else style.bad("FAIL")
        print(f"{mark} {r.path} ({len(r.decls)} declarations)")
        for d in r.diagnostics:
            where = f" [{d.decl}]" if d.decl else ""
            print(f"  {style.bad(d.kind)}{where}: {d.message}")
    return 0 if ok else 1


def cmd_corpus(args) -> int:
    style = _style(args)
    directory = Path(args.dir) if args.dir else None
    if directory is not None and not directory.is_dir():
        print(f"error: no such directory: {directory}", file=sys.stderr)
        return 2
    result = load_corpus(directory, fuel=args.fuel)
    if args.machine:
        print(_machine_dump(result.to_json()))
        return 0 if result.ok else 1
    for r in result.files:
        mark = style.good("ok") if r.ok else style.bad("FAIL")
        print(f"{mark} {Path(r.path).name} ({len(r.decls)} declarations)")
        for d in r.diagnostics:
            where = f" [{d.decl}]" if d.decl else ""
            print(f"  {style.bad(d.kind)}{where}: {d.message}")
    summary = result.to_json()["counts"]
    print(style.dim(
        f"total: {sum(summary.values())} declarations, "
        f"{summary['definition']} definitions, {summary['axiom']} axioms, "
        f"{summary['theorem-proved']} proved, {summary['theorem-stated']} stated "
        f"({result.elapsed:.2f}s)"
    ))
    return 0 if result.ok else 1


def cmd_tope(args) -> int:
    style = _style(args)
    try:
        seq = parse_sequent_source(args.sequent)
        result = entails(seq)
    except (ParseError, TopeTooLargeError, TopeError) as e:
        if args.machine:
            print(_machine_dump({"error": str(e)}))
        else:
            print(f"error: {e}", file=sys.stderr)
        return 2
    if args.machine:
        payload = {"holds": bool(result)}
        if result.counter_model is not None:
            payload["counter_model"] = str(result.counter_model)
        print(_machine_dump(payload))
        return 0 if result else 1
    if result:
        print(style.good("holds"))
        return 0
    print(style.bad("does not hold"))
    print(f"counter-model: {result.counter_model}")
    return 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="sstt",
        description="Proof checker for a three-layer simplicial type theory.",
    )
    ap.add_argument("--machine", action="store_true",
                    help="emit deterministic JSON on stdout")
    ap.add_argument("--no-color", action="store_true",
                    help="disable ANSI colors (NO_COLOR is also honored)")
    ap.add_argument("--fuel", type=int, default=DEFAULT_FUEL,
                    help="reduction step budget per declaration")
    sub = ap.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="type-check source files")
    p_check.add_argument("files", nargs="+")
    p_check.set_defaults(fn=cmd_check)

    p_corpus = sub.add_parser("corpus", help="check the bundled library")
    p_corpus.add_argument("dir", nargs="?", default=None)
    p_corpus.set_defaults(fn=cmd_corpus)

    p_tope = sub.add_parser("tope", help="decide a tope sequent")
    p_tope.add_argument("sequent")
    p_tope.set_defaults(fn=cmd_tope)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
