"""Ground truth by exhaustive enumeration, and closed-form expectations.

Assignment index ``i`` in ``[0, 2**n)`` is the assignment whose bits are
``i``; enumeration therefore covers every assignment exactly once and can be
partitioned into index ranges.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .cnf import Assignment, Formula, StructureError
from .distributions import sample_formula_fixed_m
from .rng import RandomStream

BRUTE_FORCE_LIMIT = 26
_CHUNK = 1 << 18


class OracleLimitError(StructureError):
    """Formula too large for exhaustive enumeration."""


def _check_limit(f: Formula, limit: int):
    if f.n > limit:
        raise OracleLimitError(f"n={f.n} exceeds brute-force bound {limit}")


def _satisfying_in_range(f: Formula, lo: int, hi: int) -> np.ndarray:
    idx = np.arange(lo, hi, dtype=np.int64)
    var, neg = f.var.tolist(), f.neg.tolist()
    for vs, ss in zip(var, neg):
        keep = np.zeros(idx.shape, dtype=bool)
        for v, s in zip(vs, ss):
            keep |= ((idx >> v) & 1).astype(bool) != s
        idx = idx[keep]
        if not idx.size:
            break
    return idx


def _ranges(n: int, chunk: int = _CHUNK):
    total = 1 << n
    return [(lo, min(lo + chunk, total)) for lo in range(0, total, chunk)]


def satisfying_indices(f: Formula, limit: int = BRUTE_FORCE_LIMIT, workers: int = 1) -> np.ndarray:
    """Sorted indices of every satisfying assignment."""
    _check_limit(f, limit)
    ranges = _ranges(f.n)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda r: _satisfying_in_range(f, *r), ranges))
    else:
        parts = [_satisfying_in_range(f, lo, hi) for lo, hi in ranges]
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


def brute_force_solve(f: Formula, limit: int = BRUTE_FORCE_LIMIT) -> Assignment | None:
    """Lowest-index satisfying assignment (all-false first), or None."""
    _check_limit(f, limit)
    for lo, hi in _ranges(f.n):
        found = _satisfying_in_range(f, lo, hi)
        if found.size:
            return Assignment(f.n, int(found[0]))
    return None


def count_satisfying(f: Formula, limit: int = BRUTE_FORCE_LIMIT, workers: int = 1) -> int:
    return int(satisfying_indices(f, limit, workers).size)


def sample_satisfiable_formula(n: int, k: int, m: int, rng: RandomStream, max_tries: int = 10_000,
                               limit: int = 20) -> Formula:
    """Uniform satisfiable formula by rejection from the uniform model.

    Only sensible at brute-force scale; attempt ``i`` uses ``rng.derive(i)``.
    """
    for i in range(max_tries):
        f = sample_formula_fixed_m(n, k, m, rng.derive(i))
        if brute_force_solve(f, limit) is not None:
            return f
    raise RuntimeError(f"no satisfiable formula in {max_tries} draws")


# -- closed forms -------------------------------------------------------------

def log_binomial(n: int, i: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(i + 1) - math.lgamma(n - i + 1)


def _log_sum_exp(terms) -> float:
    terms = [t for t in terms if t != -math.inf]
    if not terms:
        return -math.inf
    top = max(terms)
    return top + math.log(math.fsum(math.exp(t - top) for t in terms))


def planted_unsat_prob(alpha: float, k: int) -> float:
    """Chance that a planted clause is falsified at exact distance ``alpha * n`` from its plant."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha={alpha} outside [0, 1]")
    return (1.0 - (1.0 - alpha) ** k) / (2.0 ** k - 1.0)


def log_expected_count_planted(n: int, k: int, m: int) -> float:
    terms = []
    for i in range(n + 1):
        keep = 1.0 - planted_unsat_prob(i / n if n else 0.0, k)
        if m == 0:
            terms.append(log_binomial(n, i))
        elif keep <= 0.0:
            terms.append(-math.inf)
        else:
            terms.append(log_binomial(n, i) + m * math.log(keep))
    return _log_sum_exp(terms)


def expected_count_planted(n: int, k: int, m: int) -> float:
    """Expected number of satisfying assignments of a planted formula."""
    return math.exp(log_expected_count_planted(n, k, m))


def log_support_ratio(m: int, n: int, k: int) -> float:
    return n * math.log(2.0) + m * math.log1p(-(2.0 ** -k))


def support_ratio(m: int, n: int, k: int) -> float:
    """(planted pairs) / (formulas) = ``2**n (1 - 2**-k)**m``."""
    return math.exp(log_support_ratio(m, n, k))


def expected_unsat_at_distance(n: int, k: int, m: int, d: int) -> float:
    """Expected falsified clauses of a planted formula at distance ``d`` from the plant."""
    return m * planted_unsat_prob(d / n, k)


def expected_unsat_planted_uniform(n: int, k: int, m: int) -> float:
    """Expected falsified clauses of a planted formula under a uniform assignment.

    Mixes :func:`expected_unsat_at_distance` over Binomial(n, 1/2) distances.
    Slightly below ``m / 2**k`` because repeated variables inside a clause
    correlate the literals.
    """
    return math.fsum(math.exp(log_binomial(n, d) - n * math.log(2.0)) * expected_unsat_at_distance(n, k, m, d)
                     for d in range(n + 1))


def expected_unsat_planted_ball(n: int, k: int, m: int, radius: int) -> float:
    """Same, for an assignment uniform over the ball of the given radius around the plant."""
    weights = [math.comb(n, d) for d in range(radius + 1)]
    return math.fsum(w * expected_unsat_at_distance(n, k, m, d) for d, w in enumerate(weights)) / sum(weights)
