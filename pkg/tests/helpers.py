"""Shared seeded corpora for the tests."""

from functools import lru_cache

from sampletest.distributions import sample_assignment_uniform, sample_formula_fixed_m, sample_planted_formula
from sampletest.oracle import brute_force_solve
from sampletest.rng import RandomStream


@lru_cache(maxsize=None)
def unsat_corpus(count: int, n: int = 14, k: int = 3, m: int = 84, seed: int = 2024):
    """First ``count`` brute-force-verified unsatisfiable draws of the uniform model."""
    out, i = [], 0
    while len(out) < count:
        f = sample_formula_fixed_m(n, k, m, RandomStream(seed).derive(i))
        if brute_force_solve(f) is None:
            out.append(f)
        i += 1
    return tuple(out)


def planted(n, k, m, seed):
    rng = RandomStream(seed)
    a = sample_assignment_uniform(n, rng.child(0))
    return a, sample_planted_formula(a, m, k, rng.child(1))


# acceptance verdicts, printed by the terminal-summary hook in conftest.py
ACCEPTANCE: dict[int, str] = {}
