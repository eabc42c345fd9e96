"""Deterministic searches around an assignment, and the small-k fallback solver."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .cnf import Assignment, Formula, StructureError
from .distributions import sample_assignment_uniform
from .oracle import BRUTE_FORCE_LIMIT, brute_force_solve
from .rng import RandomStream


class Inconclusive(Exception):
    """The solver gave up without deciding satisfiability."""


@dataclass
class SearchStats:
    nodes: int = 0
    clause_evaluations: int = 0
    searches: int = 0

    def add(self, other: SearchStats):
        self.nodes += other.nodes
        self.clause_evaluations += other.clause_evaluations
        self.searches += other.searches


def max_branching_nodes(k: int, radius: int) -> int:
    return sum(k ** j for j in range(radius + 1))


def _first_unsat(pos, negm, bits):
    nbits = ~bits
    for c, p in enumerate(pos):
        if not (bits & p or nbits & negm[c]):
            return c
    return -1


def sat_from_small_hd(f: Formula, v: Assignment, radius: int, stats: SearchStats | None = None) -> Assignment | None:
    """Branching search for a satisfying assignment within ``radius`` flips of ``v``.

    At each node the lowest-index falsified clause is found and each of its
    literals' variables is flipped in clause order.  Complete for the ball of
    the given radius; visits at most ``sum(k**j for j <= radius)`` nodes.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    if v.n != f.n:
        raise StructureError(f"assignment has length {v.n}, formula has n={f.n}")
    stats = stats if stats is not None else SearchStats()
    stats.searches += 1
    pos, negm = f.masks
    rows = f.var.tolist()
    m = f.m

    def branch(bits, left):
        stats.nodes += 1
        c = _first_unsat(pos, negm, bits)
        stats.clause_evaluations += m if c < 0 else c + 1
        if c < 0:
            return bits
        if left == 0:
            return None
        for var in rows[c]:
            found = branch(bits ^ (1 << var), left - 1)
            if found is not None:
                return found
        return None

    found = branch(v.bits, radius)
    return None if found is None else Assignment(f.n, found)


def ball_masks(n: int, radius: int):
    """Flip masks of every assignment in the ball, by distance then lexicographically."""
    for d in range(radius + 1):
        for combo in itertools.combinations(range(n), d):
            mask = 0
            for i in combo:
                mask |= 1 << i
            yield mask


def ball_size(n: int, radius: int) -> int:
    return sum(math.comb(n, i) for i in range(min(radius, n) + 1))


def exhaustive_ball_search(f: Formula, v: Assignment, radius: int, stats: SearchStats | None = None) -> Assignment | None:
    """Test every assignment within ``radius`` of ``v``, nearest first."""
    if not 0 <= radius <= f.n:
        raise StructureError(f"radius {radius} outside [0, n={f.n}]")
    if v.n != f.n:
        raise StructureError(f"assignment has length {v.n}, formula has n={f.n}")
    stats = stats if stats is not None else SearchStats()
    stats.searches += 1
    pos, negm = f.masks
    m = f.m
    for mask in ball_masks(f.n, radius):
        bits = v.bits ^ mask
        stats.nodes += 1
        c = _first_unsat(pos, negm, bits)
        stats.clause_evaluations += m if c < 0 else c + 1
        if c < 0:
            return Assignment(f.n, bits)
    return None


def solve_small_k(f: Formula, rng: RandomStream, restarts: int = 100,
                  brute_force_limit: int = BRUTE_FORCE_LIMIT,
                  stats: SearchStats | None = None) -> Assignment | None:
    """Complete solver used below the large-k cutoff.

    Restart ``i`` starts from the uniform assignment of ``rng.derive(i)`` and
    runs :func:`sat_from_small_hd` with radius ``ceil(n / (k + 1))``.  If no
    restart succeeds the whole cube is enumerated when ``n`` allows it;
    otherwise :class:`Inconclusive` is raised.  ``None`` always means
    unsatisfiable.
    """
    stats = stats if stats is not None else SearchStats()
    radius = math.ceil(f.n / (f.k + 1))
    for i in range(restarts):
        start = sample_assignment_uniform(f.n, rng.derive(i))
        found = sat_from_small_hd(f, start, radius, stats)
        if found is not None:
            return found
    if f.n > brute_force_limit:
        raise Inconclusive(f"{restarts} restarts failed and n={f.n} exceeds brute-force bound {brute_force_limit}")
    stats.clause_evaluations += f.m << f.n
    return brute_force_solve(f, brute_force_limit)
