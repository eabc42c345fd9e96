"""Monte Carlo and exhaustive checks of the closed-form quantities.

Each suite returns a list of :class:`Check` rows.  Statistical checks pass
when the observed value is within ``3 sigma`` of the target, with sigma
computed from the sample counts; exact checks use the tolerance stated on the
row.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .analysis import estimate_rates, histogram_num_sat
from .cnf import index_bits, satisfied_matrix
from .distributions import (
    ThresholdModel,
    draw_ball_flips,
    draw_falsified_literals,
    draw_literals,
    draw_planted_literals,
    sample_assignment_uniform,
    sample_planted_formula,
)
from .oracle import (
    expected_count_planted,
    expected_unsat_planted_ball,
    expected_unsat_planted_uniform,
    planted_unsat_prob,
)
from .rng import RandomStream
from .search import ball_size

SIGMAS = 3.0

# reference regime: 16 variables, 163 clauses of width 4, radius 4, threshold 155.5
REFERENCE_REGIME = {"n": 16, "k": 4, "m": 163, "alpha_n": 4, "T": 155.5}
BALL_MEAN_TARGET = 155.57


@dataclass
class Check:
    suite: str
    name: str
    observed: float
    expected: float
    tolerance: float
    passed: bool
    params: dict = field(default_factory=dict)

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (f"[{verdict}] {self.suite}/{self.name}: observed={self.observed:.6g} "
                f"expected={self.expected:.6g} tol={self.tolerance:.3g}")


def _within(suite, name, observed, expected, tolerance, **params) -> Check:
    return Check(suite, name, float(observed), float(expected), float(tolerance),
                 bool(abs(observed - expected) <= tolerance), params)


def _mean_sigma(values: np.ndarray) -> tuple[float, float]:
    values = np.asarray(values, dtype=float)
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(values.size))


def _satisfied_literals(h: np.ndarray, var: np.ndarray, neg: np.ndarray) -> np.ndarray:
    """Per-row count of literals satisfied by row ``r`` of ``h``."""
    rows = np.arange(h.shape[0])[:, None]
    return (h[rows, var] != neg).sum(axis=1)


def checks_to_csv(checks) -> str:
    buf = io.StringIO()
    fields = ["suite", "name", "observed", "expected", "tolerance", "passed", "params"]
    w = csv.DictWriter(buf, fieldnames=fields)
    w.writeheader()
    for c in checks:
        row = asdict(c)
        row["params"] = ";".join(f"{k}={v}" for k, v in sorted(c.params.items()))
        w.writerow(row)
    return buf.getvalue()


# -- suites --------------------------------------------------------------------

def falsification(ks=(3, 4, 5), n: int = 64, samples: int = 100_000, seed: int = 1):
    """Uniform clause vs independent uniform assignment is falsified with probability 2**-k."""
    out = []
    for k in ks:
        gen = RandomStream(seed, k).generator()
        var, neg = draw_literals(gen, n, (samples, k))
        h = gen.integers(0, 2, size=(samples, n)).astype(bool)
        rate = float((_satisfied_literals(h, var, neg) == 0).mean())
        p = 2.0 ** -k
        out.append(_within("falsification", f"k={k}", rate, p, SIGMAS * math.sqrt(p * (1 - p) / samples),
                           k=k, n=n, samples=samples, seed=seed))
    return out


def distance_falsification(k: int = 4, alphas=(0.1, 0.25, 0.5), n: int = 64, samples: int = 100_000,
                           seed: int = 2):
    """Planted clause falsified at exact distance d = round(alpha n) with probability
    ``(1 - (1 - d/n)**k) / (2**k - 1)``."""
    out = []
    for i, alpha in enumerate(alphas):
        gen = RandomStream(seed, i).generator()
        d = round(alpha * n)
        a = gen.integers(0, 2, size=n).astype(bool)
        var, neg = draw_planted_literals(gen, a, k, samples)
        h = a ^ draw_ball_flips(gen, n, d, samples)
        rate = float((_satisfied_literals(h, var, neg) == 0).mean())
        p = planted_unsat_prob(d / n, k)
        out.append(_within("distance-falsification", f"alpha={alpha}", rate, p,
                           SIGMAS * math.sqrt(p * (1 - p) / samples), k=k, n=n, d=d, samples=samples, seed=seed))
    return out


STATISTICS = {
    "unsat_indicator": lambda r: (r == 0).astype(float),
    "satisfied_literals": lambda r: r.astype(float),
}


def decomposition(k: int = 4, n: int = 64, alpha_n: int = 16, samples: int = 100_000, seed: int = 3):
    """Expectation over planted clauses equals the uniform/falsified mixture

    ``E_pc = 2**k/(2**k-1) E_replace - 1/(2**k-1) E_fc``

    with ``h`` uniform at exact distance ``alpha_n`` from the plant; each of
    the three expectations gets its own ``samples`` draws.
    """
    gen = RandomStream(seed).generator()
    a = gen.integers(0, 2, size=n).astype(bool)
    draws = {
        "planted": draw_planted_literals(gen, a, k, samples),
        "replace": draw_literals(gen, n, (samples, k)),
        "falsified": draw_falsified_literals(gen, a, k, samples),
    }
    r = {}
    for name, (var, neg) in draws.items():
        h = a ^ draw_ball_flips(gen, n, alpha_n, samples)
        r[name] = _satisfied_literals(h, var, neg)
    w_rep = 2.0 ** k / (2.0 ** k - 1)
    w_fc = 1.0 / (2.0 ** k - 1)
    out = []
    for stat, fn in STATISTICS.items():
        lhs, s_lhs = _mean_sigma(fn(r["planted"]))
        rep, s_rep = _mean_sigma(fn(r["replace"]))
        fc, s_fc = _mean_sigma(fn(r["falsified"]))
        rhs = w_rep * rep - w_fc * fc
        sigma = math.sqrt(s_lhs ** 2 + (w_rep * s_rep) ** 2 + (w_fc * s_fc) ** 2)
        out.append(_within("decomposition", stat, lhs, rhs, SIGMAS * sigma,
                           k=k, n=n, alpha_n=alpha_n, samples=samples, seed=seed))
    lhs, s_lhs = _mean_sigma(STATISTICS["unsat_indicator"](r["planted"]))
    out.append(_within("decomposition", "unsat_closed_form", lhs, planted_unsat_prob(alpha_n / n, k),
                       SIGMAS * s_lhs, k=k, n=n, alpha_n=alpha_n, samples=samples, seed=seed))
    return out


def planted_counts(n: int, k: int, m: int, formulas: int, seed: int) -> np.ndarray:
    """Exact satisfying-assignment counts of ``formulas`` planted formulas; formula ``i`` uses stream ``i``."""
    everything = index_bits(np.arange(1 << n), n)
    counts = np.empty(formulas, dtype=np.int64)
    base = RandomStream(seed)
    for i in range(formulas):
        s = base.derive(i)
        a = sample_assignment_uniform(n, s.child(0))
        f = sample_planted_formula(a, m, k, s.child(1))
        counts[i] = satisfied_matrix(f, everything).all(axis=1).sum()
    return counts


def expected_count(n: int = 12, k: int = 3, m: int = 20, formulas: int = 2000, seed: int = 4):
    """Mean brute-force solution count of planted formulas vs the closed-form expectation."""
    counts = planted_counts(n, k, m, formulas, seed)
    mean, sigma = _mean_sigma(counts)
    return [_within("expected-count", f"n={n},k={k},m={m}", mean, expected_count_planted(n, k, m),
                    SIGMAS * sigma, n=n, k=k, m=m, formulas=formulas, seed=seed)]


def poisson(n: int = 100, k: int = 4, draws: int = 10_000, variance_draws: int = 100_000,
            window_n: int = 200, window_draws: int = 100_000, seed: int = 5):
    """Clause counts at the threshold: mean, variance = mean, and the concentration window."""
    model = ThresholdModel(k)
    lam = model.mean_clauses(n)
    gen = RandomStream(seed).generator()
    ms = gen.poisson(lam, size=draws)
    out = [_within("poisson", "mean", ms.mean(), lam, SIGMAS * math.sqrt(lam / draws),
                   n=n, k=k, draws=draws, seed=seed)]
    vs = gen.poisson(lam, size=variance_draws)
    out.append(_within("poisson", "variance_over_mean", vs.var(ddof=1) / vs.mean(), 1.0, 0.05,
                       n=n, k=k, draws=variance_draws, seed=seed))
    lo, hi = model.clause_range(window_n)
    ws = gen.poisson(model.mean_clauses(window_n), size=window_draws)
    inside = float(((ws >= lo) & (ws <= hi)).mean())
    bound = 1.0 - model.outside_range_bound(window_n)
    out.append(Check("poisson", "window_probability", inside, bound, 0.0, inside >= bound,
                     {"n": window_n, "k": k, "draws": window_draws, "seed": seed}))
    return out


def _planted_instance(seed: int, n: int, k: int, m: int):
    base = RandomStream(seed)
    a = sample_assignment_uniform(n, base.child(0))
    return a, sample_planted_formula(a, m, k, base.child(1))


def histogram(seeds=range(20), n: int = REFERENCE_REGIME["n"], k: int = REFERENCE_REGIME["k"], m: int = REFERENCE_REGIME["m"],
              alpha_n: int = REFERENCE_REGIME["alpha_n"], T: float = REFERENCE_REGIME["T"]):
    """Exhaustive satisfied-clause histograms of planted instances, averaged over seeds."""
    seeds = list(seeds)
    uni, ball = [], []
    totals_ok = True
    for s in seeds:
        a, f = _planted_instance(s, n, k, m)
        h = histogram_num_sat(f, a, alpha_n, T=T, seed=s)
        uni.append(h.uniform_mean)
        ball.append(h.ball_mean)
        totals_ok &= int(h.uniform.sum()) == 1 << n and int(h.ball.sum()) == ball_size(n, alpha_n)
    u, b = float(np.mean(uni)), float(np.mean(ball))
    params = {"n": n, "k": k, "m": m, "alpha_n": alpha_n, "seeds": len(seeds)}
    return [
        _within("histogram", "uniform_mean", u, m * (1 - 2.0 ** -k), 0.5, **params),
        _within("histogram", "ball_mean", b, BALL_MEAN_TARGET if (n, k, m, alpha_n) == (16, 4, 163, 4)
                else m - expected_unsat_planted_ball(n, k, m, alpha_n), 1.0, **params),
        Check("histogram", "ball_minus_uniform", b - u, 2.0, 0.0, b - u >= 2.0, params),
        Check("histogram", "series_totals", float(totals_ok), 1.0, 0.0, totals_ok, params),
        _within("histogram", "uniform_mean_exact_planted", u, m - expected_unsat_planted_uniform(n, k, m),
                0.5, **params),
        _within("histogram", "ball_mean_exact_planted", b, m - expected_unsat_planted_ball(n, k, m, alpha_n),
                1.0, **params),
    ]


def rates(seeds=range(5), n: int = REFERENCE_REGIME["n"], k: int = REFERENCE_REGIME["k"], m: int = REFERENCE_REGIME["m"],
          alpha_n: int = REFERENCE_REGIME["alpha_n"], T: float = REFERENCE_REGIME["T"]):
    """The clause-count test enriches for assignments close to a solution."""
    base_rate = ball_size(n, alpha_n) / 2.0 ** n
    out = []
    for s in seeds:
        a, f = _planted_instance(s, n, k, m)
        r = estimate_rates(f, alpha_n, T)
        close_rate = r.p_TP + r.p_FN
        params = {"n": n, "k": k, "m": m, "alpha_n": alpha_n, "T": T, "seed": s}
        out.append(Check("rates", f"seed={s}:sum", r.p_TP + r.p_FP + r.p_FN + r.p_TN, 1.0, 1e-12,
                         abs(r.p_TP + r.p_FP + r.p_FN + r.p_TN - 1.0) <= 1e-12, params))
        out.append(Check("rates", f"seed={s}:precision_vs_ball_fraction", r.precision, base_rate, 0.0,
                         r.p_TP > 0 and r.precision > base_rate, params))
        out.append(Check("rates", f"seed={s}:precision_vs_close_fraction", r.precision, close_rate, 0.0,
                         r.p_TP > 0 and r.precision > close_rate, params))
    return out


SUITES = {
    "falsification": falsification,
    "distance-falsification": distance_falsification,
    "decomposition": decomposition,
    "expected-count": expected_count,
    "poisson": poisson,
    "histogram": histogram,
    "rates": rates,
}
