"""k-CNF formulas, assignments and their evaluation.

Variables are 0-indexed.  A clause is a tuple of exactly ``k`` literals and
may repeat a literal or contain both polarities of a variable; nothing is
ever simplified.

An :class:`Assignment` is bit-packed into a Python int (bit ``i`` is the
value of variable ``i``).  A :class:`Formula` keeps its literals as two
``(m, k)`` numpy arrays for batch evaluation, plus per-clause bit masks for
the scalar path used inside the neighbourhood searches.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np


class StructureError(ValueError):
    """Malformed formula, assignment, or mismatched sizes."""


class Literal(NamedTuple):
    var: int
    negated: bool = False

    def to_dimacs(self) -> int:
        return -(self.var + 1) if self.negated else self.var + 1

    @classmethod
    def from_dimacs(cls, value: int) -> Literal:
        if value == 0:
            raise StructureError("0 is not a literal")
        return cls(abs(value) - 1, value < 0)

    def __repr__(self):
        return f"{'~' if self.negated else ''}x{self.var}"


Clause = tuple  # tuple[Literal, ...] of length k


@dataclass(frozen=True)
class Assignment:
    n: int
    bits: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise StructureError("negative assignment length")
        if self.bits < 0 or self.bits >> self.n:
            raise StructureError(f"bits do not fit in {self.n} variables")

    @classmethod
    def from_bools(cls, values: Iterable) -> Assignment:
        values = [bool(v) for v in values]
        bits = 0
        for i, v in enumerate(values):
            if v:
                bits |= 1 << i
        return cls(len(values), bits)

    @classmethod
    def from_string(cls, text: str) -> Assignment:
        """Parse ``"0110"``; character ``i`` is variable ``i``."""
        text = text.strip()
        if set(text) - {"0", "1"}:
            raise StructureError(f"not a bit string: {text!r}")
        return cls.from_bools(c == "1" for c in text)

    @classmethod
    def all_true(cls, n: int) -> Assignment:
        return cls(n, (1 << n) - 1)

    def __len__(self):
        return self.n

    def __getitem__(self, i: int) -> bool:
        if not 0 <= i < self.n:
            raise IndexError(i)
        return bool(self.bits >> i & 1)

    def flip(self, *variables: int) -> Assignment:
        bits = self.bits
        for v in variables:
            if not 0 <= v < self.n:
                raise StructureError(f"variable {v} out of range for n={self.n}")
            bits ^= 1 << v
        return Assignment(self.n, bits)

    def complement(self) -> Assignment:
        return Assignment(self.n, self.bits ^ ((1 << self.n) - 1))

    def to_bools(self) -> list[bool]:
        return [bool(self.bits >> i & 1) for i in range(self.n)]

    def to_array(self) -> np.ndarray:
        return np.array(self.to_bools(), dtype=bool)

    def to_string(self) -> str:
        return "".join("1" if b else "0" for b in self.to_bools())

    def to_dimacs(self) -> list[int]:
        """Signed 1-indexed literals, the ``v`` line convention of SAT solvers."""
        return [(i + 1) if b else -(i + 1) for i, b in enumerate(self.to_bools())]

    def __repr__(self):
        return f"Assignment({self.to_string()!r})" if self.n <= 64 else f"Assignment(n={self.n})"


class Formula:
    """An immutable k-CNF formula over ``n`` variables.

    ``var[c, j]`` and ``neg[c, j]`` describe literal ``j`` of clause ``c``.
    """

    __slots__ = ("n", "k", "var", "neg", "_masks")

    def __init__(self, n: int, k: int, clauses: Iterable[Sequence] = ()):
        rows = [tuple(Literal(int(v), bool(s)) for v, s in c) for c in clauses]
        for c in rows:
            if len(c) != k:
                raise StructureError(f"clause {c} has width {len(c)}, expected {k}")
        var = neg = None
        if rows:
            var = np.array([[lit.var for lit in c] for c in rows], dtype=np.int64)
            neg = np.array([[lit.negated for lit in c] for c in rows], dtype=bool)
        self._init(n, k, var, neg)

    @classmethod
    def from_arrays(cls, n: int, var, neg) -> Formula:
        var = np.asarray(var, dtype=np.int64)
        neg = np.asarray(neg, dtype=bool)
        if var.ndim != 2 or var.shape != neg.shape:
            raise StructureError("var and neg must be equal-shape (m, k) arrays")
        f = cls.__new__(cls)
        f._init(n, var.shape[1], var, neg)
        return f

    @classmethod
    def from_dimacs_clauses(cls, n: int, clauses: Iterable[Sequence[int]], k: int | None = None) -> Formula:
        rows = [[Literal.from_dimacs(x) for x in c] for c in clauses]
        if k is None:
            if not rows:
                raise StructureError("cannot infer k from an empty clause list")
            k = len(rows[0])
        return cls(n, k, rows)

    def _init(self, n, k, var, neg):
        if n < 0 or k < 1:
            raise StructureError(f"invalid sizes n={n}, k={k}")
        if var is None:
            var = np.zeros((0, k), dtype=np.int64)
            neg = np.zeros((0, k), dtype=bool)
        if var.shape[1] != k:
            raise StructureError(f"clause width {var.shape[1]} != k={k}")
        if var.size and (var.min() < 0 or var.max() >= n):
            raise StructureError(f"variable index out of range for n={n}")
        var = var.copy()
        neg = neg.copy()
        var.flags.writeable = False
        neg.flags.writeable = False
        self.n = int(n)
        self.k = int(k)
        self.var = var
        self.neg = neg
        self._masks = None

    @property
    def m(self) -> int:
        return self.var.shape[0]

    def __len__(self):
        return self.m

    @property
    def clauses(self) -> list[Clause]:
        return [self.clause(c) for c in range(self.m)]

    def clause(self, c: int) -> Clause:
        return tuple(Literal(int(v), bool(s)) for v, s in zip(self.var[c], self.neg[c]))

    def __eq__(self, other):
        if not isinstance(other, Formula):
            return NotImplemented
        return (self.n, self.k) == (other.n, other.k) and np.array_equal(self.var, other.var) \
            and np.array_equal(self.neg, other.neg)

    def __hash__(self):
        return hash((self.n, self.k, self.var.tobytes(), self.neg.tobytes()))

    def __repr__(self):
        return f"Formula(n={self.n}, k={self.k}, m={self.m})"

    @property
    def masks(self) -> tuple[list[int], list[int]]:
        """Per-clause ``(positive, negative)`` variable bit masks.

        Clause ``c`` is satisfied by ``bits`` iff
        ``bits & pos[c] or ~bits & neg[c]``.
        """
        if self._masks is None:
            pos, negm = [], []
            for vs, ss in zip(self.var.tolist(), self.neg.tolist()):
                p = q = 0
                for v, s in zip(vs, ss):
                    if s:
                        q |= 1 << v
                    else:
                        p |= 1 << v
                pos.append(p)
                negm.append(q)
            self._masks = (pos, negm)
        return self._masks

    def first_unsatisfied(self, bits: int) -> int:
        """Index of the lowest-numbered clause falsified by ``bits``, or -1."""
        pos, negm = self.masks
        for c in range(len(pos)):
            if not (bits & pos[c] or ~bits & negm[c]):
                return c
        return -1

    def is_satisfied_by(self, a: Assignment) -> bool:
        _check_length(self, a)
        return self.first_unsatisfied(a.bits) < 0


def _check_length(f: Formula, a: Assignment):
    if a.n != f.n:
        raise StructureError(f"assignment has length {a.n}, formula has n={f.n}")


def eval_clause(clause: Sequence[Literal], a: Assignment) -> bool:
    for var, negated in clause:
        if not 0 <= var < a.n:
            raise StructureError(f"variable {var} out of range for assignment of length {a.n}")
        if (a.bits >> var & 1) != negated:
            return True
    return False


def num_clauses_unsat(f: Formula, a: Assignment) -> int:
    _check_length(f, a)
    pos, negm = f.masks
    bits = a.bits
    return sum(1 for p, q in zip(pos, negm) if not (bits & p or ~bits & q))


def num_clauses_sat(f: Formula, a: Assignment) -> int:
    return f.m - num_clauses_unsat(f, a)


def hamming_distance(a: Assignment, b: Assignment) -> int:
    if a.n != b.n:
        raise StructureError(f"length mismatch: {a.n} vs {b.n}")
    return (a.bits ^ b.bits).bit_count()


# -- batch evaluation ---------------------------------------------------------

def index_bits(indices, n: int) -> np.ndarray:
    """Unpack assignment indices (``bits`` as integers, n <= 63) to an (N, n) bool matrix."""
    indices = np.asarray(indices, dtype=np.int64)
    return ((indices[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(bool)


def words_bits(words: np.ndarray, n: int) -> np.ndarray:
    """Unpack (N, W) uint64 words (little-endian bit order) to an (N, n) bool matrix."""
    words = np.ascontiguousarray(words, dtype="<u8")
    raw = np.unpackbits(words.view(np.uint8), axis=1, bitorder="little")
    return raw[:, :n].astype(bool)


def bits_to_assignment(row: np.ndarray) -> Assignment:
    return Assignment.from_bools(row)


def satisfied_matrix(f: Formula, bits: np.ndarray) -> np.ndarray:
    """(N, m) bool: clause ``c`` satisfied by assignment row ``r``."""
    if bits.shape[1] != f.n:
        raise StructureError(f"assignment rows have length {bits.shape[1]}, formula has n={f.n}")
    out = np.zeros((bits.shape[0], f.m), dtype=bool)
    for j in range(f.k):
        out |= bits[:, f.var[:, j]] != f.neg[:, j]
    return out


def count_satisfied(f: Formula, bits: np.ndarray) -> np.ndarray:
    """NumClausesSAT for every row of an (N, n) assignment matrix."""
    return satisfied_matrix(f, bits).sum(axis=1)


def enumerate_counts(f: Formula, start: int = 0, stop: int | None = None, chunk: int = 1 << 15) -> np.ndarray:
    """Satisfied-clause counts for assignment indices ``start..stop`` (default all 2**n)."""
    if f.n > 40:
        raise StructureError(f"refusing to enumerate 2**{f.n} assignments")
    stop = (1 << f.n) if stop is None else stop
    out = np.empty(stop - start, dtype=np.int64)
    for lo in range(start, stop, chunk):
        hi = min(lo + chunk, stop)
        out[lo - start:hi - start] = count_satisfied(f, index_bits(np.arange(lo, hi), f.n))
    return out
