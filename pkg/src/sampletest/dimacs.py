"""DIMACS CNF reading and writing.

Literals are written in clause order and never simplified, so
``read_dimacs(write_dimacs(f)) == f`` for every formula.
"""

from __future__ import annotations

import logging
from pathlib import Path

from .cnf import Formula, Literal, StructureError

log = logging.getLogger(__name__)


class DimacsError(StructureError):
    pass


def write_dimacs(f: Formula, comments=()) -> str:
    lines = [f"c {c}" for c in comments]
    lines.append(f"p cnf {f.n} {f.m}")
    for vs, ss in zip(f.var.tolist(), f.neg.tolist()):
        lits = [-(v + 1) if s else v + 1 for v, s in zip(vs, ss)]
        lines.append(" ".join(map(str, lits)) + " 0")
    return "\n".join(lines) + "\n"


def read_dimacs(text: str, k: int | None = None, strict: bool = True) -> Formula:
    """Parse DIMACS CNF text.

    ``k`` fixes the clause width; by default it is taken from the first
    clause.  With ``strict=False`` clauses of other widths are accepted with a
    warning: shorter ones are padded by repeating their last literal (which
    leaves the clause's truth table unchanged) and ``k`` becomes the widest
    clause.  Clauses may span lines; everything after ``%`` is ignored, as in
    the SATLIB corpora.
    """
    n = m = None
    clauses: list[list[int]] = []
    current: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line[0] == "c":
            continue
        if line[0] == "%":
            break
        if line[0] == "p":
            fields = line.split()
            if n is not None:
                raise DimacsError(f"line {lineno}: duplicate header")
            if len(fields) != 4 or fields[1] != "cnf":
                raise DimacsError(f"line {lineno}: bad header {line!r}")
            try:
                n, m = int(fields[2]), int(fields[3])
            except ValueError:
                raise DimacsError(f"line {lineno}: bad header {line!r}") from None
            if n < 0 or m < 0:
                raise DimacsError(f"line {lineno}: negative sizes in header")
            continue
        if n is None:
            raise DimacsError(f"line {lineno}: clause before header")
        try:
            values = [int(x) for x in line.split()]
        except ValueError:
            raise DimacsError(f"line {lineno}: non-integer literal") from None
        for x in values:
            if x == 0:
                if not current:
                    raise DimacsError(f"line {lineno}: empty clause")
                clauses.append(current)
                current = []
            elif abs(x) > n:
                raise DimacsError(f"line {lineno}: variable {abs(x)} exceeds n={n}")
            else:
                current.append(x)
    if n is None:
        raise DimacsError("missing 'p cnf' header")
    if current:
        raise DimacsError("last clause is not terminated by 0")
    if len(clauses) != m:
        raise DimacsError(f"header declares {m} clauses, found {len(clauses)}")

    widths = {len(c) for c in clauses}
    if k is None:
        k = len(clauses[0]) if clauses else 1
    if widths - {k}:
        if strict:
            raise DimacsError(f"clause widths {sorted(widths)} differ from k={k}")
        k = max(widths | {k})
        log.warning("mixed clause widths %s; padding to k=%d", sorted(widths), k)
        clauses = [c + [c[-1]] * (k - len(c)) for c in clauses]
    return Formula(n, k, [[Literal.from_dimacs(x) for x in c] for c in clauses])


def load_dimacs(path, k: int | None = None, strict: bool = True) -> Formula:
    return read_dimacs(Path(path).read_text(), k=k, strict=strict)


def save_dimacs(f: Formula, path, comments=()) -> None:
    Path(path).write_text(write_dimacs(f, comments))
