"""Experiment drivers: cache profiles, figure presets, rate sweeps, Monte
Carlo simulation and the exhaustive small-instance verification grid."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from .analysis import CSV_HEADER, RateReport, expected_rate_enumeration, rate_proposed, rate_report
from .decode import verify_all
from .delivery import coded_delivery, random_delivery, select_scheme
from .grouping import enumerate_demands, group_users, worst_case_demand
from .model import ConfigError, Demand, SystemConfig, as_fraction, generate_library, validate_config
from .placement import partition_subfiles, place_random

log = logging.getLogger(__name__)

DEFAULT_TRIALS = 20
DEFAULT_FILE_SIZE = 10**5
# bit-level random delivery costs O(F^3 / 64); past this it is skipped
DEFAULT_RANDOM_MAX_F = 4096
BIT_LEVEL_MAX_USERS = 16
PRESET_POINTS = 25


def exp_profile(K: int, M, alpha) -> tuple[Fraction, ...]:
    """Capacities alpha^(K-k) M for k = 1..K (ascending when alpha <= 1)."""
    M, alpha = as_fraction(M), as_fraction(alpha)
    if not 0 <= alpha <= 1:
        raise ConfigError([f"alpha={alpha} outside [0, 1]"])
    if M < 0:
        raise ConfigError([f"M={M} is negative"])
    return tuple(alpha ** (K - k) * M for k in range(1, K + 1))


def parse_grid(text: str) -> list[Fraction]:
    """``a:b:step`` -> [a, a+step, ..., <= b] as exact rationals."""
    try:
        a, b, step = (as_fraction(x) for x in text.split(":"))
    except ValueError as exc:
        raise ConfigError([f"bad grid {text!r}, expected a:b:step"]) from exc
    if step <= 0:
        raise ConfigError([f"grid step must be positive, got {step}"])
    out, x = [], a
    while x <= b:
        out.append(x)
        x += step
    return out


@dataclass(frozen=True)
class SweepPreset:
    N: int
    K: int
    axis: str  # "M" or "alpha"
    fixed: Fraction
    grid: tuple[Fraction, ...]


def _fig2() -> SweepPreset:
    N = 50
    grid = tuple(Fraction(N * t, PRESET_POINTS - 1) for t in range(PRESET_POINTS))
    return SweepPreset(N=N, K=70, axis="M", fixed=Fraction(97, 100), grid=grid)


def _fig3() -> SweepPreset:
    grid = tuple(Fraction(9, 10) + Fraction(t, 10 * (PRESET_POINTS - 1)) for t in range(PRESET_POINTS))
    return SweepPreset(N=30, K=45, axis="alpha", fixed=Fraction(2), grid=grid)


PRESETS = {"fig2": _fig2, "fig3": _fig3}


def run_sweep(N: int, K: int, axis: str, fixed, grid: Iterable) -> list[RateReport]:
    """One closed-form report per grid point of the exponential profile.

    ``axis="M"`` sweeps the largest capacity with ``fixed`` = alpha;
    ``axis="alpha"`` sweeps the skew with ``fixed`` = M.
    """
    rows = []
    for x in grid:
        M, alpha = (x, fixed) if axis == "M" else (fixed, x)
        if as_fraction(M) > N:
            raise ConfigError([f"M={M} exceeds N={N}"])
        rows.append(rate_report(exp_profile(K, M, alpha), N, alpha=alpha, M=M))
    return rows


def run_preset(name: str) -> list[RateReport]:
    p = PRESETS[name]()
    return run_sweep(p.N, p.K, p.axis, p.fixed, p.grid)


def sweep_csv(rows: Sequence[RateReport]) -> str:
    return CSV_HEADER + "\n" + "".join(r.csv_row() + "\n" for r in rows)


def trial_seed(master: int, point: int, trial: int) -> int:
    return int(np.random.SeedSequence([master, point, trial]).generate_state(1)[0])


@dataclass
class TrialResult:
    seed: int
    coded_rate: Fraction
    random_rate: Fraction | None
    chosen: str
    rate: Fraction
    decoded: bool
    detail: str = ""


@dataclass
class SimulationReport:
    config: SystemConfig
    demand: Demand
    r_c: Fraction
    expected_rate: Fraction
    trials: list[TrialResult] = field(default_factory=list)

    @property
    def all_decoded(self) -> bool:
        return all(t.decoded for t in self.trials)

    @property
    def mean_rate(self) -> float:
        return float(np.mean([float(t.rate) for t in self.trials]))

    @property
    def mean_coded_rate(self) -> float:
        return float(np.mean([float(t.coded_rate) for t in self.trials]))

    @property
    def max_deviation(self) -> float:
        return max(abs(float(t.rate - self.r_c)) for t in self.trials)

    def summary(self) -> str:
        return (
            f"trials={len(self.trials)} mean_rate={self.mean_rate:.6f} "
            f"mean_coded_rate={self.mean_coded_rate:.6f} r_c={float(self.r_c):.6f} "
            f"expected={float(self.expected_rate):.6f} max_dev={self.max_deviation:.6f} "
            f"all_decoded={str(self.all_decoded).lower()}"
        )


def simulate_once(
    config: SystemConfig,
    demand: Demand,
    seed: int,
    random_max_f: int = DEFAULT_RANDOM_MAX_F,
) -> TrialResult:
    """Place, deliver (both procedures when affordable), decode and verify one instance."""
    if config.num_users > BIT_LEVEL_MAX_USERS:
        raise ConfigError([f"bit-level mode supports K <= {BIT_LEVEL_MAX_USERS}"])
    F = config.file_size_bits
    library = generate_library(config, seed)
    placement = place_random(config, seed)
    partition = partition_subfiles(config, placement)
    grouping = group_users(config, demand)
    coded = coded_delivery(config, library, partition, grouping)
    report = verify_all(config, library, placement, demand, coded, partition)
    ok, detail = report.ok, "" if report.ok else "coded:\n" + report.table()
    random_rate = None
    chosen, rate = "coded", coded.rate(F)
    if F <= random_max_f:
        rnd = random_delivery(config, library, placement, grouping, seed)
        rreport = verify_all(config, library, placement, demand, rnd, partition)
        if not rreport.ok:
            ok = False
            detail += "random:\n" + rreport.table()
        random_rate = rnd.rate(F)
        ledger, rate = select_scheme(coded, rnd, F)
        chosen = "coded" if ledger is coded else "random"
    if not ok:
        detail += "\nledger:\n" + coded.export()
    return TrialResult(seed, coded.rate(F), random_rate, chosen, rate, ok, detail)


def run_simulation(
    config: SystemConfig,
    demand: Demand | None = None,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    random_max_f: int = DEFAULT_RANDOM_MAX_F,
) -> SimulationReport:
    validate_config(config)
    demand = worst_case_demand(config) if demand is None else demand.validate(config)
    if config.file_size_bits > random_max_f:
        log.info("F=%d > %d: random delivery not simulated", config.file_size_bits, random_max_f)
    report = SimulationReport(
        config,
        demand,
        rate_proposed(config.cache_capacities, config.num_files).r_c,
        expected_rate_enumeration(config, demand) if config.num_users <= 20 else Fraction(0),
    )
    for t in range(trials):
        report.trials.append(simulate_once(config, demand, trial_seed(seed, 0, t), random_max_f))
    return report


def exhaustive_grid(seed: int, max_users: int = 5, max_files: int = 3, file_size_bits: int = 1024) -> Iterator[SystemConfig]:
    """Configs for K <= max_users, N <= max_files with capacities drawn from
    multiples of N/8 (so M_k F / N is an integer when 8 divides F)."""
    rng = random.Random(seed)
    for K in range(1, max_users + 1):
        for N in range(1, max_files + 1):
            mu = tuple(Fraction(N * rng.randint(0, 8), 8) for _ in range(K))
            yield SystemConfig(N, file_size_bits, K, mu)


@dataclass
class ExhaustiveResult:
    instances: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_exhaustive(
    seeds: Sequence[int] = (0, 1, 2), max_users: int = 5, max_files: int = 3, file_size_bits: int = 1024
) -> ExhaustiveResult:
    """Bit-exact decoding of both procedures for every demand in the grid."""
    result = ExhaustiveResult()
    for seed in seeds:
        for config in exhaustive_grid(seed, max_users, max_files, file_size_bits):
            library = generate_library(config, seed)
            placement = place_random(config, seed)
            partition = partition_subfiles(config, placement)
            for demand in enumerate_demands(config):
                grouping = group_users(config, demand)
                result.instances += 1
                for name, ledger in (
                    ("coded", coded_delivery(config, library, partition, grouping)),
                    ("random", random_delivery(config, library, placement, grouping, seed)),
                ):
                    rep = verify_all(config, library, placement, demand, ledger, partition)
                    if not rep.ok:
                        result.failures.append(
                            f"seed={seed} N={config.num_files} mu={[str(m) for m in config.mu]} "
                            f"d={demand} {name}: {rep.summary()}"
                        )
    return result


EXAMPLE1 = SystemConfig.from_capacities(2, ["1/8", "1/4", "1/2", "1"], file_size_bits=10**5)
