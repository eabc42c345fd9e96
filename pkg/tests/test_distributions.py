from collections import Counter
from decimal import Decimal, getcontext

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from sampletest.cnf import Assignment, Literal, StructureError, eval_clause, hamming_distance
from sampletest.distributions import (
    ThresholdModel,
    draw_ball_flips,
    draw_falsified_literals,
    draw_literals,
    draw_planted_literals,
    sample_clause_replace,
    sample_falsified_clause,
    sample_formula_fixed_m,
    sample_in_ball_exact,
    sample_m_at_threshold,
    sample_planted_clause,
    sample_planted_formula,
    sample_threshold_formula,
    threshold_density,
)
from sampletest.rng import RandomStream


def _dk_reference(k):
    getcontext().prec = 40
    ln2 = Decimal(2).ln()
    return float(Decimal(2) ** k * ln2 - (1 + ln2) / 2)


@pytest.mark.parametrize("k", [3, 4, 5, 8])
def test_threshold_density_matches_high_precision(k):
    assert threshold_density(k) == pytest.approx(_dk_reference(k), rel=1e-14)


def test_threshold_density_values():
    assert threshold_density(4) == pytest.approx(10.2437806, abs=1e-6)
    assert threshold_density(3) == pytest.approx(4.6986039, abs=1e-6)
    with pytest.raises(ValueError):
        threshold_density(1)


def _chi2_pvalue(observed: Counter, outcomes, probs, draws):
    obs = np.array([observed[o] for o in outcomes])
    assert obs.sum() == draws
    return stats.chisquare(obs, np.array(probs) * draws).pvalue


def test_single_literal_clause_chi2():
    gen = RandomStream(1).generator()
    var, neg = draw_literals(gen, 1, (10_000, 1))
    seen = Counter((int(v[0]), bool(s[0])) for v, s in zip(var, neg))
    assert set(seen) == {(0, False), (0, True)}
    assert _chi2_pvalue(seen, [(0, False), (0, True)], [0.5, 0.5], 10_000) > 1e-3


def _all_clauses(n, k):
    import itertools
    lits = [(v, s) for v in range(n) for s in (False, True)]
    return list(itertools.product(lits, repeat=k))


def test_width2_clause_chi2():
    gen = RandomStream(2).generator()
    draws = 100_000
    var, neg = draw_literals(gen, 2, (draws, 2))
    seen = Counter(tuple(zip(v.tolist(), s.tolist())) for v, s in zip(var, neg))
    outcomes = _all_clauses(2, 2)
    assert len(outcomes) == 16
    assert _chi2_pvalue(seen, outcomes, [1 / 16] * 16, draws) > 1e-3


def test_planted_clause_chi2_against_enumeration():
    # planted clauses are uniform over the clauses the plant satisfies
    a = Assignment.from_string("10")
    outcomes = [c for c in _all_clauses(2, 2)
                if eval_clause(tuple(Literal(v, s) for v, s in c), a)]
    assert len(outcomes) == 12
    draws = 60_000
    var, neg = draw_planted_literals(RandomStream(3).generator(), a.to_array(), 2, draws)
    seen = Counter(tuple(zip(v.tolist(), s.tolist())) for v, s in zip(var, neg))
    assert _chi2_pvalue(seen, outcomes, [1 / 12] * 12, draws) > 1e-3


def test_falsified_clause_chi2_against_enumeration():
    a = Assignment.from_string("10")
    outcomes = [c for c in _all_clauses(2, 2)
                if not eval_clause(tuple(Literal(v, s) for v, s in c), a)]
    assert len(outcomes) == 4
    draws = 20_000
    var, neg = draw_falsified_literals(RandomStream(4).generator(), a.to_array(), 2, draws)
    seen = Counter(tuple(zip(v.tolist(), s.tolist())) for v, s in zip(var, neg))
    assert _chi2_pvalue(seen, outcomes, [1 / 4] * 4, draws) > 1e-3


def test_determinism_and_independence():
    assert sample_clause_replace(50, 4, RandomStream(7)) == sample_clause_replace(50, 4, RandomStream(7))
    f = sample_formula_fixed_m(50, 4, 30, RandomStream(7, 0))
    g = sample_formula_fixed_m(50, 4, 30, RandomStream(7, 1))
    assert f == sample_formula_fixed_m(50, 4, 30, RandomStream(7, 0))
    assert f.clauses != g.clauses


def test_empty_formulas():
    assert sample_formula_fixed_m(5, 3, 0, RandomStream(0)).m == 0
    assert sample_planted_formula(Assignment(5, 3), 0, 3, RandomStream(0)).m == 0


def test_uniform_falsification_rate_k4():
    gen = RandomStream(5).generator()
    draws, n, k = 100_000, 30, 4
    var, neg = draw_literals(gen, n, (draws, k))
    h = gen.integers(0, 2, (draws, n)).astype(bool)
    rows = np.arange(draws)[:, None]
    rate = float(((h[rows, var] != neg).sum(axis=1) == 0).mean())
    p = 1 / 16
    assert abs(rate - p) <= 3 * np.sqrt(p * (1 - p) / draws)


def test_threshold_poisson_mean():
    draws = 10_000
    ms = np.array([sample_m_at_threshold(100, 4, RandomStream(11, i)) for i in range(draws)])
    lam = threshold_density(4) * 100
    assert abs(ms.mean() - lam) <= 3 * np.sqrt(lam / draws)


def test_threshold_formula_uses_sampled_m():
    f = sample_threshold_formula(40, 3, RandomStream(6))
    assert f.m == sample_m_at_threshold(40, 3, RandomStream(6).child(0))


def test_threshold_model():
    model = ThresholdModel(4)
    lo, hi = model.clause_range(100)
    assert lo == pytest.approx(924.378, abs=1e-3) and hi == pytest.approx(1124.378, abs=1e-3)
    assert 0 < model.outside_range_bound(100) <= 2


@settings(max_examples=40)
@given(st.integers(0, 2**40), st.integers(1, 40), st.integers(1, 6), st.integers(0, 60))
def test_planted_formula_satisfied_by_plant(seed, n, k, m):
    a = Assignment(n, seed % (1 << n))
    f = sample_planted_formula(a, m, k, RandomStream(seed))
    assert f.is_satisfied_by(a)


@settings(max_examples=40)
@given(st.integers(0, 2**40), st.integers(1, 40), st.integers(1, 6))
def test_falsified_clause_falsified(seed, n, k):
    a = Assignment(n, seed % (1 << n))
    assert not eval_clause(sample_falsified_clause(a, k, RandomStream(seed)), a)
    assert eval_clause(sample_planted_clause(a, k, RandomStream(seed)), a)


@settings(max_examples=40)
@given(st.integers(0, 2**40), st.integers(1, 40), st.data())
def test_ball_exact_distance(seed, n, data):
    a = Assignment(n, seed % (1 << n))
    d = data.draw(st.integers(0, n))
    assert hamming_distance(sample_in_ball_exact(a, d, RandomStream(seed)), a) == d


def test_ball_extremes():
    a = Assignment.from_string("0110100")
    assert sample_in_ball_exact(a, 0, RandomStream(1)) == a
    assert sample_in_ball_exact(a, 7, RandomStream(1)) == a.complement()
    with pytest.raises(StructureError):
        sample_in_ball_exact(a, 8, RandomStream(1))


def test_ball_flips_uniform_over_subsets():
    flips = draw_ball_flips(RandomStream(9).generator(), 4, 2, 30_000)
    seen = Counter(tuple(np.flatnonzero(r).tolist()) for r in flips)
    outcomes = [(i, j) for i in range(4) for j in range(i + 1, 4)]
    assert _chi2_pvalue(seen, outcomes, [1 / 6] * 6, 30_000) > 1e-3
