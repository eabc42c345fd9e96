"""Sample-and-test solving for random k-CNF.

Uniform assignments are sampled; only those satisfying unusually many
clauses (at least ``T``) get a bounded branching search around them.  The
solver has one-sided error: it never reports an assignment that does not
satisfy the formula.
"""

from __future__ import annotations

import math
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .cnf import Assignment, Formula, count_satisfied
from .distributions import uniform_assignment_bits
from .rng import RandomStream
from .search import Inconclusive, SearchStats, sat_from_small_hd, solve_small_k

DEFAULT_K_STAR = 60

FOUND = "found"
NOT_FOUND = "not_found"
INCONCLUSIVE = "inconclusive"


def compute_alpha(n: int, k: int) -> int:
    """Search radius ``floor(n lg(k) / (16 k))``."""
    if n < 1 or k < 2:
        raise ValueError("need n >= 1 and k >= 2")
    return math.floor(n * math.log2(k) / (16 * k))


def compute_threshold(m: int, k: int, alpha: float) -> float:
    """Minimum satisfied-clause count ``(1 - (1 - (1-alpha)**(2k)) / (2**k - 1)) m``."""
    if not 0.0 <= alpha < 1.0:
        raise ValueError(f"alpha={alpha} outside [0, 1)")
    return (1.0 - (1.0 - (1.0 - alpha) ** (2 * k)) / (2.0 ** k - 1.0)) * m


def _to_float(x: Fraction) -> float:
    try:
        return float(x)
    except OverflowError:
        return math.inf


def compute_budgets(n: int, k: int, alpha_n: int, scale: float = 1.0) -> tuple[int, float]:
    """Sample budget ``ceil(n^2 2^n / C(n, alpha_n))`` and |S| cap ``4 n^3 2^n / (C(n, alpha_n) k^alpha_n) + 1``.

    Both are computed in exact rational arithmetic; ``scale`` multiplies the
    sample budget only.
    """
    if not 0 <= alpha_n <= n:
        raise ValueError(f"alpha_n={alpha_n} outside [0, {n}]")
    ball = math.comb(n, alpha_n)
    budget = Fraction(n * n << n, ball) * Fraction(scale)
    cap = Fraction(4 * n ** 3 << n, ball * k ** alpha_n) + 1
    return max(1, math.ceil(budget)), _to_float(cap)


@dataclass(frozen=True)
class SolverParams:
    alpha_n: int
    threshold_T: float
    sample_budget: int
    cap_S: float
    k_star: int = DEFAULT_K_STAR

    def __post_init__(self):
        if self.sample_budget < 1:
            raise ValueError("sample_budget must be >= 1")
        if self.alpha_n < 0:
            raise ValueError("alpha_n must be >= 0")

    @classmethod
    def for_formula(cls, f: Formula, alpha_n: int | None = None, k_star: int = DEFAULT_K_STAR,
                    threshold: float | None = None, budget_scale: float = 1.0,
                    always_positive: bool = False) -> SolverParams:
        """Parameters from the formula's size, with optional overrides.

        ``always_positive`` replaces the clause-count test by one every sample
        passes, which turns the solver into plain sample-and-search.
        """
        n, k = f.n, f.k
        if alpha_n is None:
            alpha_n = compute_alpha(max(n, 1), max(k, 2))
        alpha_n = min(alpha_n, n)
        if always_positive:
            threshold = 0.0
        elif threshold is None:
            threshold = compute_threshold(f.m, k, alpha_n / n if n else 0.0)
        budget, cap = compute_budgets(n, k, alpha_n, budget_scale)
        return cls(alpha_n, float(threshold), budget, cap, k_star)

    def passes(self, count) -> bool:
        return count >= self.threshold_T


@dataclass
class SolveResult:
    status: str
    assignment: Assignment | None = None
    samples_used: int = 0
    searches_triggered: int = 0
    promising: int = 0
    cap_abort: bool = False
    path: str = "sample_and_test"
    nodes: int = 0
    clause_evaluations: int = 0
    wall_time: float = 0.0
    params: dict = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.status == FOUND

    def to_json(self) -> dict:
        out = asdict(self)
        out["assignment"] = None if self.assignment is None else self.assignment.to_string()
        return out


def alpha_sample_and_test(f: Formula, params: SolverParams, rng: RandomStream,
                          workers: int = 1, chunk: int = 2048,
                          small_k_restarts: int = 100) -> SolveResult:
    """Run the sample-and-test solver on ``f``.

    Below ``params.k_star`` the formula goes to :func:`solve_small_k`.
    Otherwise sample ``i`` is the uniform assignment of ``rng.derive(i)``;
    samples passing the clause-count test join ``S``, and once ``|S|``
    exceeds ``params.cap_S`` the run stops with ``cap_abort`` set.  Each
    admitted sample gets a branching search of radius ``params.alpha_n``.

    ``workers`` only parallelises the clause counting of sample chunks;
    admitted samples are still searched in index order, so the result does
    not depend on it.
    """
    start = time.perf_counter()
    stats = SearchStats()
    info = asdict(params)

    if f.k < params.k_star:
        try:
            a = solve_small_k(f, rng, restarts=small_k_restarts, stats=stats)
            status = FOUND if a is not None else NOT_FOUND
        except Inconclusive:
            a, status = None, INCONCLUSIVE
        return SolveResult(status, a, path="small_k", nodes=stats.nodes,
                           searches_triggered=stats.searches,
                           clause_evaluations=stats.clause_evaluations,
                           wall_time=time.perf_counter() - start, params=info)

    result = SolveResult(NOT_FOUND, params=info)

    def counts_for(span):
        lo, hi = span
        bits = uniform_assignment_bits(f.n, rng, lo, hi - lo)
        return lo, bits, count_satisfied(f, bits)

    starts = _spans(params.sample_budget, chunk)
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        for lo, bits, counts in _ordered(pool, counts_for, starts, 2 * workers):
            for j in np.flatnonzero(counts >= params.threshold_T):
                result.promising += 1
                if result.promising > params.cap_S:
                    result.cap_abort = True
                    result.samples_used = lo + int(j) + 1
                    return _finish(result, stats, start, f.m)
                a = Assignment.from_bools(bits[j])
                found = sat_from_small_hd(f, a, params.alpha_n, stats)
                if found is not None:
                    if not f.is_satisfied_by(found):
                        raise RuntimeError("search returned a non-satisfying assignment")
                    result.status = FOUND
                    result.assignment = found
                    result.samples_used = lo + int(j) + 1
                    return _finish(result, stats, start, f.m)
            result.samples_used = lo + len(counts)
    finally:
        if pool:
            pool.shutdown(wait=True, cancel_futures=True)
    return _finish(result, stats, start, f.m)


def _spans(total, largest, first=64):
    """Index ranges covering ``[0, total)``, doubling from ``first`` up to ``largest``."""
    lo, size = 0, min(first, largest)
    while lo < total:
        hi = min(lo + size, total)
        yield lo, hi
        lo, size = hi, min(2 * size, largest)


def _ordered(pool, fn, items, window):
    """``map(fn, items)`` in order, with at most ``window`` calls in flight on ``pool``."""
    if pool is None:
        yield from map(fn, items)
        return
    pending = deque()
    for item in items:
        pending.append(pool.submit(fn, item))
        if len(pending) >= window:
            yield pending.popleft().result()
    while pending:
        yield pending.popleft().result()


def _finish(result: SolveResult, stats: SearchStats, start: float, m: int) -> SolveResult:
    result.searches_triggered = stats.searches
    result.nodes = stats.nodes
    result.clause_evaluations = stats.clause_evaluations + m * result.samples_used
    result.wall_time = time.perf_counter() - start
    return result


# -- rates and the runtime model ----------------------------------------------

def wilson_interval(successes: int, total: int, z: float = 1.959963984540054) -> tuple[float, float]:
    if total == 0:
        return 0.0, 1.0
    p = successes / total
    denom = 1 + z * z / total
    centre = (p + z * z / (2 * total)) / denom
    half = z * math.sqrt(p * (1 - p) / total + z * z / (4 * total * total)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


@dataclass(frozen=True)
class RateEstimates:
    """Counts of assignments by (passes the test) x (close to a solution)."""

    tp: int
    fp: int
    fn: int
    tn: int
    surrogate: bool = False

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def _rate(self, count):
        return count / self.total if self.total else 0.0

    p_TP = property(lambda self: self._rate(self.tp))
    p_FP = property(lambda self: self._rate(self.fp))
    p_FN = property(lambda self: self._rate(self.fn))
    p_TN = property(lambda self: self._rate(self.tn))

    @property
    def precision(self) -> float:
        """Fraction of test-passing assignments that are close to a solution."""
        pos = self.tp + self.fp
        return self.tp / pos if pos else 0.0

    def interval(self, name: str) -> tuple[float, float]:
        return wilson_interval(getattr(self, name.lower()[2:]), self.total)

    def rows(self) -> list[dict]:
        out = []
        for name in ("p_TP", "p_FP", "p_FN", "p_TN"):
            lo, hi = self.interval(name)
            out.append({"rate": name, "value": getattr(self, name), "count": getattr(self, name.lower()[2:]),
                        "total": self.total, "ci_low": lo, "ci_high": hi, "surrogate": self.surrogate})
        return out


@dataclass(frozen=True)
class RuntimePrediction:
    sample_term: float
    search_term: float
    false_positive_term: float
    diagnostic: str = ""

    @property
    def total(self) -> float:
        return self.sample_term + self.search_term + self.false_positive_term


def predicted_runtime(M: float, rates: RateEstimates, alpha: float, n: int, k: int,
                      node_cost: float = 1.0) -> RuntimePrediction:
    """Cost model ``M / p_TP + k**(alpha n) + (p_FP / p_TP) k**(alpha n)``.

    ``M`` is the cost of one membership test and ``node_cost`` the cost of
    one search node, in the same unit (e.g. clause evaluations: both ``m``).
    """
    search = node_cost * float(k) ** (alpha * n)
    if rates.p_TP <= 0:
        return RuntimePrediction(math.inf, search, math.inf, "p_TP is zero: no test-passing assignment is close")
    return RuntimePrediction(M / rates.p_TP, search, rates.p_FP / rates.p_TP * search)
