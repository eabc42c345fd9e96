"""Samplers for random, at-threshold and planted k-CNF formulas.

Public samplers take a :class:`~sampletest.rng.RandomStream` and are pure
functions of their arguments.  The ``draw_*`` helpers work on a numpy
``Generator`` and return whole batches as arrays; the samplers and the
validation suites are both built on them.

Literal ``l`` in ``[0, 2n)`` encodes variable ``l >> 1`` with negation
``l & 1``, so drawing ``l`` uniformly is the with-replacement clause model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cnf import Assignment, Formula, Literal, StructureError, words_bits
from .rng import RandomStream, counter_words

LN2 = math.log(2.0)


def threshold_density(k: int) -> float:
    """Closed-form approximation ``2**k ln 2 - (1 + ln 2) / 2`` of the threshold density."""
    if k < 2:
        raise ValueError(f"threshold density needs k >= 2, got {k}")
    return math.ldexp(LN2, k) - (1.0 + LN2) / 2.0


@dataclass(frozen=True)
class ThresholdModel:
    k: int
    k_star: int = 60

    @property
    def d_k_approx(self) -> float:
        return threshold_density(self.k)

    def mean_clauses(self, n: int) -> float:
        return self.d_k_approx * n

    def clause_range(self, n: int) -> tuple[float, float]:
        """The window ``[(d_k - 1) n, (d_k + 1) n]`` that m falls in with high probability."""
        d = self.d_k_approx
        return (d - 1.0) * n, (d + 1.0) * n

    def outside_range_bound(self, n: int) -> float:
        """Upper bound ``2 * 2**(-n / (3 ln2 2**k))`` on Pr[m outside :meth:`clause_range`]."""
        return 2.0 * 2.0 ** (-n / (3.0 * LN2 * 2.0 ** self.k))


# -- generator-level batch draws ---------------------------------------------

def draw_literals(gen: np.random.Generator, n: int, shape) -> tuple[np.ndarray, np.ndarray]:
    lits = gen.integers(0, 2 * n, size=shape)
    return lits >> 1, (lits & 1).astype(bool)


def draw_planted_literals(gen, a_bits: np.ndarray, k: int, size: int):
    """``size`` clauses from the planted-clause distribution of ``a_bits``.

    Rejection from the uniform clause model: a draw is kept iff ``a_bits``
    satisfies it.  Accepted draws are kept in order, so the result is a
    sequence of i.i.d. planted clauses.
    """
    n = a_bits.shape[0]
    var_out = np.empty((size, k), dtype=np.int64)
    neg_out = np.empty((size, k), dtype=bool)
    have = 0
    accept = 1.0 - 2.0 ** -k
    while have < size:
        batch = int((size - have) / accept * 1.1) + 16
        var, neg = draw_literals(gen, n, (batch, k))
        ok = (a_bits[var] != neg).any(axis=1)
        var, neg = var[ok], neg[ok]
        take = min(size - have, var.shape[0])
        var_out[have:have + take] = var[:take]
        neg_out[have:have + take] = neg[:take]
        have += take
    return var_out, neg_out


def draw_falsified_literals(gen, a_bits: np.ndarray, k: int, size: int):
    """``size`` clauses uniform over those falsified by ``a_bits``.

    Each literal picks a variable uniformly and the polarity that ``a_bits``
    makes false (negated iff the variable is true).
    """
    var = gen.integers(0, a_bits.shape[0], size=(size, k))
    return var, a_bits[var].copy()


def draw_ball_flips(gen, n: int, d: int, size: int) -> np.ndarray:
    """(size, n) bool masks, each a uniform d-subset of positions."""
    if not 0 <= d <= n:
        raise ValueError(f"distance {d} outside [0, {n}]")
    order = np.argsort(gen.random((size, n)), axis=1)[:, :d]
    flips = np.zeros((size, n), dtype=bool)
    np.put_along_axis(flips, order, True, axis=1)
    return flips


# -- stream-level samplers ---------------------------------------------------

def _clause(var_row, neg_row):
    return tuple(Literal(int(v), bool(s)) for v, s in zip(var_row, neg_row))


def sample_clause_replace(n: int, k: int, rng: RandomStream):
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    var, neg = draw_literals(rng.generator(), n, (1, k))
    return _clause(var[0], neg[0])


def sample_formula_fixed_m(n: int, k: int, m: int, rng: RandomStream) -> Formula:
    if m < 0:
        raise ValueError("m must be >= 0")
    var, neg = draw_literals(rng.generator(), n, (m, k))
    return Formula.from_arrays(n, var, neg)


def sample_m_at_threshold(n: int, k: int, rng: RandomStream) -> int:
    """Poisson(d_k n) clause count.

    numpy's Poisson sampler is exact: inversion for small means and the
    PTRS transformed-rejection method for large ones.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    return int(rng.generator().poisson(threshold_density(k) * n))


def sample_threshold_formula(n: int, k: int, rng: RandomStream) -> Formula:
    m = sample_m_at_threshold(n, k, rng.child(0))
    return sample_formula_fixed_m(n, k, m, rng.child(1))


def sample_planted_clause(a: Assignment, k: int, rng: RandomStream):
    var, neg = draw_planted_literals(rng.generator(), a.to_array(), k, 1)
    return _clause(var[0], neg[0])


def sample_falsified_clause(a: Assignment, k: int, rng: RandomStream):
    var, neg = draw_falsified_literals(rng.generator(), a.to_array(), k, 1)
    return _clause(var[0], neg[0])


def sample_planted_formula(a: Assignment, m: int, k: int, rng: RandomStream) -> Formula:
    if m < 0:
        raise ValueError("m must be >= 0")
    var, neg = draw_planted_literals(rng.generator(), a.to_array(), k, m)
    return Formula.from_arrays(a.n, var, neg)


def uniform_assignment_bits(n: int, rng: RandomStream, start: int = 0, count: int = 1) -> np.ndarray:
    """(count, n) bool matrix; row ``r`` is the uniform assignment of stream ``rng.derive(start + r)``."""
    n_words = max(1, -(-n // 64))
    streams = np.uint64(rng.stream) ^ np.arange(start, start + count, dtype=np.uint64)
    return words_bits(counter_words(rng.seed, streams, n_words), n)


def sample_assignment_uniform(n: int, rng: RandomStream) -> Assignment:
    return Assignment.from_bools(uniform_assignment_bits(n, rng, 0, 1)[0])


def sample_in_ball_exact(center: Assignment, d: int, rng: RandomStream) -> Assignment:
    """Uniform assignment at Hamming distance exactly ``d`` from ``center``."""
    if not 0 <= d <= center.n:
        raise StructureError(f"distance {d} outside [0, {center.n}]")
    flips = draw_ball_flips(rng.generator(), center.n, d, 1)[0]
    return center.flip(*np.flatnonzero(flips).tolist())
