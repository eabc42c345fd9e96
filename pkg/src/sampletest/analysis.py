"""Exhaustive and sampled statistics of how a formula's assignments score.

Everything here labels assignments along two axes: whether they pass the
clause-count test (``NumClausesSAT >= T``) and whether they lie within
``alpha_n`` of a satisfying assignment.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .cnf import Assignment, Formula, StructureError, count_satisfied, enumerate_counts, index_bits
from .distributions import draw_ball_flips, uniform_assignment_bits
from .oracle import BRUTE_FORCE_LIMIT, OracleLimitError, satisfying_indices
from .rng import RandomStream
from .search import ball_masks, ball_size
from .solver import RateEstimates, compute_budgets

EXHAUSTIVE_HISTOGRAM_LIMIT = 24


def dilate(mask: np.ndarray, n: int, radius: int) -> np.ndarray:
    """Indicator of every index within Hamming distance ``radius`` of a set index."""
    idx = np.arange(1 << n, dtype=np.int64)
    out = mask.copy()
    for _ in range(radius):
        grown = out.copy()
        for j in range(n):
            grown |= out[idx ^ (1 << j)]
        if np.array_equal(grown, out):
            break
        out = grown
    return out


def ball_offsets(n: int, radius: int, exact: bool = False) -> np.ndarray:
    """Integer XOR masks of the ball (or, with ``exact``, the sphere) of a given radius."""
    masks = np.fromiter(ball_masks(n, radius), dtype=np.int64)
    if exact:
        masks = masks[np.array([int(x).bit_count() == radius for x in masks], dtype=bool)]
    return masks


def estimate_rates(f: Formula, alpha_n: int, T: float, mode: str = "exhaustive",
                   planted: Assignment | None = None, samples: int = 100_000,
                   rng: RandomStream | None = None, limit: int = BRUTE_FORCE_LIMIT) -> RateEstimates:
    """True/false positive/negative counts of the test ``NumClausesSAT >= T``.

    ``mode="exhaustive"`` labels all ``2**n`` assignments against the full
    solution set.  ``mode="sampled"`` draws uniform assignments and labels
    them as close iff within ``alpha_n`` of ``planted``; the result carries
    ``surrogate=True`` since other solutions are ignored.
    """
    if mode == "exhaustive":
        if f.n > limit:
            raise OracleLimitError(f"exhaustive rates need n <= {limit}, got {f.n}")
        counts = enumerate_counts(f)
        sat = np.zeros(1 << f.n, dtype=bool)
        sat[satisfying_indices(f, limit)] = True
        close = dilate(sat, f.n, alpha_n)
        positive = counts >= T
        surrogate = False
    elif mode == "sampled":
        if planted is None or rng is None:
            raise ValueError("sampled mode needs a planted assignment and a RandomStream")
        bits = uniform_assignment_bits(f.n, rng, 0, samples)
        positive = count_satisfied(f, bits) >= T
        close = (bits != planted.to_array()).sum(axis=1) <= alpha_n
        surrogate = True
    else:
        raise ValueError(f"unknown mode {mode!r}")
    tp = int(np.count_nonzero(positive & close))
    fp = int(np.count_nonzero(positive & ~close))
    fn = int(np.count_nonzero(~positive & close))
    tn = int(positive.size - tp - fp - fn)
    return RateEstimates(tp, fp, fn, tn, surrogate)


@dataclass
class HistogramData:
    n: int
    k: int
    m: int
    alpha_n: int
    uniform: np.ndarray
    ball: np.ndarray | None = None
    T: float | None = None
    seed: int | None = None
    exhaustive: bool = True
    meta: dict = field(default_factory=dict)

    @staticmethod
    def _mean(series):
        if series is None or series.sum() == 0:
            return math.nan
        return float(np.dot(np.arange(series.size), series) / series.sum())

    @property
    def uniform_mean(self) -> float:
        return self._mean(self.uniform)

    @property
    def ball_mean(self) -> float:
        return self._mean(self.ball)

    def metadata(self) -> dict:
        return {"n": self.n, "k": self.k, "m": self.m, "alpha_n": self.alpha_n, "T": self.T,
                "seed": self.seed, "exhaustive": self.exhaustive,
                "uniform_total": int(self.uniform.sum()),
                "ball_total": None if self.ball is None else int(self.ball.sum()),
                "uniform_mean": self.uniform_mean, "ball_mean": self.ball_mean, **self.meta}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["satisfied", "uniform", "ball"])
        for b in range(self.m + 1):
            w.writerow([b, int(self.uniform[b]), "" if self.ball is None else int(self.ball[b])])
        return buf.getvalue()

    def save(self, path) -> None:
        """Write ``path`` (CSV) and ``path`` with ``.json`` suffix (metadata)."""
        path = Path(path)
        path.write_text(self.to_csv())
        path.with_suffix(".json").write_text(json.dumps(self.metadata(), indent=2))


def histogram_num_sat(f: Formula, planted: Assignment | None = None, alpha_n: int = 0,
                      T: float | None = None, seed: int | None = None,
                      rng: RandomStream | None = None, samples: int = 1 << 20) -> HistogramData:
    """Distribution of NumClausesSAT over all assignments and over the ball around ``planted``.

    Exhaustive up to n = 24; beyond that ``rng`` must be given and both
    series are sampled (``samples`` draws each).
    """
    exhaustive = f.n <= EXHAUSTIVE_HISTOGRAM_LIMIT
    if exhaustive:
        counts = enumerate_counts(f)
    else:
        if rng is None:
            raise StructureError(f"n={f.n} needs a RandomStream for sampled histograms")
        counts = count_satisfied(f, uniform_assignment_bits(f.n, rng.child(0), 0, samples))
    uniform = np.bincount(counts, minlength=f.m + 1)

    ball = None
    if planted is not None:
        if planted.n != f.n:
            raise StructureError("planted assignment length does not match formula")
        if ball_size(f.n, alpha_n) <= (1 << EXHAUSTIVE_HISTOGRAM_LIMIT) and f.n <= 62:
            idx = planted.bits ^ ball_offsets(f.n, alpha_n)
            bits = index_bits(idx, f.n)
        else:
            exhaustive = False
            bits = _sample_ball(planted, alpha_n, samples, (rng or RandomStream(0)).child(1))
        ball = np.bincount(count_satisfied(f, bits), minlength=f.m + 1)
    return HistogramData(f.n, f.k, f.m, alpha_n, uniform, ball, T, seed, exhaustive)


def _sample_ball(center: Assignment, radius: int, samples: int, rng: RandomStream) -> np.ndarray:
    gen = rng.generator()
    logw = np.array([math.lgamma(center.n + 1) - math.lgamma(d + 1) - math.lgamma(center.n - d + 1)
                     for d in range(radius + 1)])
    w = np.exp(logw - logw.max())
    dists = gen.choice(radius + 1, size=samples, p=w / w.sum())
    out = np.empty((samples, center.n), dtype=bool)
    base = center.to_array()
    for d in range(radius + 1):
        rows = np.flatnonzero(dists == d)
        out[rows] = base ^ draw_ball_flips(gen, center.n, d, rows.size)
    return out


@dataclass
class FormulaClassification:
    promising_count: int
    cap: float
    is_stuffed: bool
    standard_satisfying_assignments: list
    f_count: int
    shell_only: bool = False

    @property
    def is_hollow(self) -> bool:
        return not self.is_stuffed

    def to_json(self) -> dict:
        out = asdict(self)
        out["standard_satisfying_assignments"] = [a.to_string() for a in self.standard_satisfying_assignments]
        out["is_hollow"] = self.is_hollow
        return out


def classify_formula(f: Formula, alpha_n: int, T: float, shell_only: bool = False,
                     limit: int = BRUTE_FORCE_LIMIT) -> FormulaClassification:
    """Count promising assignments and find the standard satisfying ones.

    A satisfying assignment is standard when at least half of its radius
    ``alpha_n`` ball is promising; ``shell_only`` uses the sphere at exactly
    ``alpha_n`` instead of the full ball.
    """
    if f.n > limit:
        raise OracleLimitError(f"classification needs n <= {limit}, got {f.n}")
    promising = enumerate_counts(f) >= T
    count = int(promising.sum())
    _, cap = compute_budgets(f.n, f.k, alpha_n)
    offsets = ball_offsets(f.n, alpha_n, exact=shell_only)
    sat = satisfying_indices(f, limit)
    standard = [Assignment(f.n, int(s)) for s in sat
                if 2 * int(promising[int(s) ^ offsets].sum()) >= offsets.size]
    return FormulaClassification(count, cap, count > cap, standard, int(sat.size), shell_only)


def is_standard(f: Formula, a: Assignment, alpha_n: int, T: float, shell_only: bool = False) -> bool:
    """Whether ``a`` satisfies ``f`` and at least half its ball (or shell) is promising."""
    if not f.is_satisfied_by(a):
        return False
    offsets = ball_offsets(f.n, alpha_n, exact=shell_only)
    counts = count_satisfied(f, index_bits(a.bits ^ offsets, f.n))
    return 2 * int((counts >= T).sum()) >= offsets.size
