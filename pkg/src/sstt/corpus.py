"""Loading and checking the bundled formal library.

The library is a directory of ``.sstt`` files processed in sorted order, so
later files may use anything declared earlier.  Every postulate must be
named in the ``axioms.ledger`` file that ships with the library; a
postulate outside the ledger is reported instead of silently extending the
axiom base.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .checker import CheckError, Checker, DEFAULT_FUEL, Diagnostic
from .core import Decl, DeclTag, reset_fresh
from .parser import ParseError, parse_file
from .scope import GlobalEnv, ScopeError, elaborate_toplevels

CORPUS_DIR = Path(__file__).parent / "corpus"
LEDGER_NAME = "axioms.ledger"


def read_ledger(path: Path) -> set[str]:
    names: set[str] = set()
    if not path.exists():
        return names
    for line in path.read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            names.add(line)
    return names


@dataclass
class FileReport:
    path: str
    decls: list[Decl] = field(default_factory=list)
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.diagnostics


@dataclass
class CorpusResult:
    files: list[FileReport]
    env: GlobalEnv
    ledger: set[str]
    elapsed: float

    @property
    def ok(self) -> bool:
        return all(f.ok for f in self.files)

    @property
    def decls(self) -> list[Decl]:
        return [d for f in self.files for d in f.decls]

    @property
    def diagnostics(self) -> list[Diagnostic]:
        return [d for f in self.files for d in f.diagnostics]

    def by_tag(self, tag: DeclTag) -> list[Decl]:
        return [d for d in self.decls if d.tag == tag]

    def to_json(self) -> dict:
        counts = {tag.value: len(self.by_tag(tag)) for tag in DeclTag}
        return {
            "ok": self.ok,
            "files": [
                {
                    "path": f.path,
                    "decls": [d.name for d in f.decls],
                    "diagnostics": [d.to_json() for d in f.diagnostics],
                }
                for f in self.files
            ],
            "counts": counts,
            "axioms": sorted(d.name for d in self.by_tag(DeclTag.AXIOM)),
            "theorems_proved": sorted(
                d.name for d in self.by_tag(DeclTag.THEOREM_PROVED)),
            "theorems_stated": sorted(
                d.name for d in self.by_tag(DeclTag.THEOREM_STATED)),
            "ledger": sorted(self.ledger),
        }


def check_files(paths: list[Path], env: Optional[GlobalEnv] = None,
                fuel: int = DEFAULT_FUEL,
                ledger: Optional[set[str]] = None,
                stop_on_error: bool = True) -> tuple[list[FileReport], GlobalEnv]:
    """Parse, elaborate and check the given files in order, accumulating
    declarations in one environment.  Stops at the first diagnostic (by
    default), since later declarations may depend on a failed one."""
    env = env if env is not None else GlobalEnv()
    reports: list[FileReport] = []
    checker = Checker(env, fuel=fuel)
    for path in paths:
        report = FileReport(str(path))
        reports.append(report)
        try:
            items = parse_file(path.read_text(), str(path))
        except ParseError as e:
            report.diagnostics.append(
                Diagnostic("parse", e.message + f" (line {e.line}, column {e.col})"))
            if stop_on_error:
                break
            continue
        try:
            decls = elaborate_toplevels(items, env)
        except ScopeError as e:
            report.diagnostics.append(Diagnostic("scope", e.message, span=e.span))
            if stop_on_error:
                break
            continue
        failed = False
        for d in decls:
            if (ledger is not None and d.tag == DeclTag.AXIOM
                    and d.name not in ledger):
                report.diagnostics.append(Diagnostic(
                    "unledgered-axiom",
                    f"the postulate {d.name!r} is not in the axiom ledger",
                    d.name, d.span))
                failed = True
                break
            try:
                checked = checker.check_decl(d)
            except CheckError as e:
                report.diagnostics.append(e.diagnostic)
                failed = True
                break
            env.decls[d.name] = checked
            report.decls.append(checked)
        if failed and stop_on_error:
            break
    return reports, env


def load_corpus(directory: Optional[Path] = None,
                fuel: int = DEFAULT_FUEL) -> CorpusResult:
    directory = directory or CORPUS_DIR
    reset_fresh()
    ledger = read_ledger(directory / LEDGER_NAME)
    paths = sorted(p for p in directory.glob("*.sstt"))
    start = time.monotonic()
    reports, env = check_files(paths, fuel=fuel, ledger=ledger)
    elapsed = time.monotonic() - start
    return CorpusResult(reports, env, ledger, elapsed)
