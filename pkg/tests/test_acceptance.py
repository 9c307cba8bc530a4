"""Exit criteria, one test each, at the tolerances the build contract fixes."""

import random
import time
from fractions import Fraction


from hetcache.analysis import (
    delta_r1,
    delta_r2,
    expected_rate_enumeration,
    expected_totals,
    rate_baseline,
    rate_proposed,
    rate_report,
)
from hetcache.experiments import EXAMPLE1, exhaustive_grid, run_preset, run_simulation, verify_exhaustive
from hetcache.grouping import enumerate_demands, worst_case_demand
from hetcache.model import Demand, SystemConfig

from conftest import EXAMPLE1_MU


def test_c1_example1_closed_forms(criterion):
    criterion("C1 example-1 closed forms")
    t0 = time.perf_counter()
    r_c = rate_proposed(EXAMPLE1_MU, 2).r_c
    r_b = rate_baseline(EXAMPLE1_MU, 2)
    elapsed = time.perf_counter() - t0
    criterion("C1 example-1 closed forms", f"r_c={float(r_c):.7f} r_b={float(r_b):.7f} t={elapsed:.4f}s")
    assert abs(float(r_c) - 1.758) <= 0.001
    assert abs(float(r_b) - 2.681) <= 0.001
    assert r_c == Fraction(17578125, 10**7)
    assert elapsed < 1


def _draw_config(rng, N, K):
    den = rng.choice([1, 2, 3, 4, 6, 8])
    mu = [Fraction(rng.randint(0, den * N), den) for _ in range(K)]
    if rng.random() < 0.15:
        mu[rng.randrange(K)] = Fraction(N)
    return SystemConfig(N, 1, K, tuple(mu))


def test_c2_oracle_equality(criterion):
    criterion("C2 enumeration = closed-form branches")
    rng = random.Random(2024)
    t0 = time.perf_counter()
    coded_wins = 0
    for _ in range(200):
        K = rng.randint(2, 12)
        cfg = _draw_config(rng, rng.randint(1, K - 1), K)
        totals = expected_totals(cfg, worst_case_demand(cfg))
        closed = rate_proposed(cfg.mu, cfg.N)
        if closed.branch == "coded":
            coded_wins += 1
            assert totals.coded == closed.coded_branch
        assert totals.random == sum((1 - m / cfg.N for m in sorted(cfg.mu)[: cfg.N]), start=Fraction(0))
        # stronger than required: the coded totals agree even when random wins
        assert totals.coded == closed.coded_branch
    elapsed = time.perf_counter() - t0
    criterion("C2 enumeration = closed-form branches", f"200 configs ({coded_wins} coded wins) t={elapsed:.1f}s")
    assert elapsed < 60


def test_c3_zero_error_decoding(criterion):
    criterion("C3 exhaustive zero-error decoding")
    t0 = time.perf_counter()
    result = verify_exhaustive(seeds=(0, 1, 2), max_users=5, max_files=3, file_size_bits=2**10)
    elapsed = time.perf_counter() - t0
    criterion(
        "C3 exhaustive zero-error decoding",
        f"{result.instances} instances x 2 procedures failures={len(result.failures)} t={elapsed:.0f}s",
    )
    assert result.ok, result.failures[:5]
    assert result.instances == 3 * sum(N**K for K in range(1, 6) for N in range(1, 4))
    assert elapsed < 300


def test_c4_monte_carlo_convergence(criterion):
    criterion("C4 Monte Carlo coded rate")
    report = run_simulation(EXAMPLE1.with_file_size(10**5), None, trials=20, seed=0)
    mean = report.mean_coded_rate
    criterion("C4 Monte Carlo coded rate", f"mean={mean:.5f} target=1.7578 decoded={report.all_decoded}")
    assert report.all_decoded
    assert abs(mean - 1.7578) <= 0.02 * 1.7578


def test_c5_eq5_inequality(criterion):
    criterion("C5 r_b - r_c >= dR1 + dR2")
    rng = random.Random(5)
    strict = 0
    for _ in range(1000):
        K = rng.randint(2, 30)
        N = rng.randint(1, K - 1)
        mu = _draw_config(rng, N, K).mu
        r = rate_report(mu, N)
        d1, d2 = delta_r1(mu, N), delta_r2(mu, N)
        assert r.r_b - r.r_c >= d1 + d2 >= 0
        if all(m < N for m in mu):
            strict += 1
            assert r.r_b - r.r_c > 0 and d1 + d2 > 0
    criterion("C5 r_b - r_c >= dR1 + dR2", f"1000 instances, {strict} strict")


def test_c6_reduction_when_files_suffice(criterion):
    criterion("C6 N >= K reduces to baseline")
    rng = random.Random(6)
    for _ in range(100):
        K = rng.randint(1, 10)
        N = rng.randint(K, K + 5)
        cfg = _draw_config(rng, N, K)
        demand = Demand(tuple(rng.sample(range(1, N + 1), K)))
        assert expected_rate_enumeration(cfg, demand) == rate_baseline(cfg.mu, N)
    criterion("C6 N >= K reduces to baseline", "100 instances exact")


def test_c7_worst_case_generator(criterion):
    criterion("C7 worst-case demand attains max")
    configs = [cfg for seed in range(6) for cfg in exhaustive_grid(seed, 5, 3, 1)]
    for cfg in configs:
        worst = expected_rate_enumeration(cfg, worst_case_demand(cfg))
        assert worst == max(expected_rate_enumeration(cfg, d) for d in enumerate_demands(cfg))
    criterion("C7 worst-case demand attains max", f"{len(configs)} configs, all N^K demands")


def test_c8_figure_reproduction(criterion):
    criterion("C8 figure presets (qualitative)")
    t0 = time.perf_counter()
    fig2, fig3 = run_preset("fig2"), run_preset("fig3")
    elapsed = time.perf_counter() - t0
    criterion("C8 figure presets (qualitative)", f"{len(fig2)}+{len(fig3)} points t={elapsed:.1f}s")
    for r in fig2:
        if r.M > 0:
            assert r.r_c < r.r_b
    assert all(a.r_c >= b.r_c for a, b in zip(fig2, fig2[1:]))
    assert all(r.r_c <= r.r_b for r in fig3)
    gaps = [r.r_b - r.r_c for r in fig3]
    assert all(a >= b for a, b in zip(gaps, gaps[1:]))
    assert all(r.cut_set <= r.r_c for r in fig2 + fig3)
    assert elapsed < 10
