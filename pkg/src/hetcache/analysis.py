"""Closed-form delivery rates in exact rational arithmetic, and the
expected-length enumeration of the coded ledger that cross-checks them."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import NamedTuple, Sequence

from .delivery import coded_plan
from .grouping import group_users
from .model import ConfigError, Demand, SystemConfig, as_fraction

DEFAULT_ENUMERATION_USERS = 20

CSV_HEADER = "N,K,alpha,M,r_c,r_b,delta_r1,delta_r2,cut_set,branch"


def _ascending(mu: Sequence) -> list[Fraction]:
    return sorted(as_fraction(m) for m in mu)


def _require_fewer_files(N: int, K: int) -> None:
    if N >= K:
        raise ValueError(f"defined only for N < K (got N={N}, K={K})")


def delta_r1(mu: Sequence, N: int) -> Fraction:
    """Saving from sending each uncached subfile once per demand group."""
    mu = _ascending(mu)
    K = len(mu)
    _require_fewer_files(N, K)
    return (K - N) * prod((1 - m / N for m in mu), start=Fraction(1))


def delta_r2(mu: Sequence, N: int) -> Fraction:
    """Saving on bits cached by a single user.

    Each term (k-1) M_{k+N}/(N - M_{k+N}) * prod_l (1 - M_l/N) is evaluated
    as (k-1) (M_{k+N}/N) prod_{l != k+N} (1 - M_l/N): identical when
    M_{k+N} < N and the continuous limit when M_{k+N} = N.
    """
    mu = _ascending(mu)
    K = len(mu)
    _require_fewer_files(N, K)
    q = [1 - m / N for m in mu]
    total = Fraction(0)
    for k in range(2, K - N + 1):
        t = k + N - 1
        total += (k - 1) * (mu[t] / N) * prod(q[:t] + q[t + 1 :], start=Fraction(1))
    return total


def rate_baseline(mu: Sequence, N: int) -> Fraction:
    """R_b: sum over i of prod_{j <= i} (1 - M_j / N), capacities ascending."""
    out, run = Fraction(0), Fraction(1)
    for m in _ascending(mu):
        run *= 1 - m / N
        out += run
    return out


def rate_random_branch(mu: Sequence, N: int) -> Fraction:
    """Random delivery: each distinct file once, sized by the smallest requesting cache."""
    mu = _ascending(mu)
    return sum((1 - m / N for m in mu[:N]), start=Fraction(0))


class ProposedRate(NamedTuple):
    coded_branch: Fraction
    random_branch: Fraction
    r_c: Fraction
    branch: str


def rate_proposed(mu: Sequence, N: int) -> ProposedRate:
    mu = _ascending(mu)
    K = len(mu)
    random_branch = rate_random_branch(mu, N)
    if N >= K:
        coded = rate_baseline(mu, N)
    else:
        coded = rate_baseline(mu, N) - delta_r1(mu, N) - delta_r2(mu, N)
    if random_branch < coded:
        return ProposedRate(coded, random_branch, random_branch, "random")
    return ProposedRate(coded, random_branch, coded, "coded")


def cut_set_bound(mu: Sequence, N: int, K: int | None = None) -> Fraction:
    """max over s of s - (sum of the s smallest M_k) / floor(N / s), floored at 0."""
    mu = _ascending(mu)
    K = len(mu) if K is None else K
    best = Fraction(0)
    for s in range(1, min(N, K) + 1):
        best = max(best, s - sum(mu[:s], start=Fraction(0)) / (N // s))
    return best


@dataclass(frozen=True)
class RateReport:
    N: int
    K: int
    r_coded_branch: Fraction
    r_random_branch: Fraction
    r_c: Fraction
    r_b: Fraction
    delta_r1: Fraction
    delta_r2: Fraction
    cut_set: Fraction
    branch: str
    alpha: Fraction | None = None
    M: Fraction | None = None

    def csv_row(self) -> str:
        def num(x):
            return "" if x is None else f"{float(x):.10g}"

        return ",".join(
            [
                str(self.N),
                str(self.K),
                num(self.alpha),
                num(self.M),
                *(num(x) for x in (self.r_c, self.r_b, self.delta_r1, self.delta_r2, self.cut_set)),
                self.branch,
            ]
        )


def rate_report(mu: Sequence, N: int, alpha=None, M=None) -> RateReport:
    mu = _ascending(mu)
    K = len(mu)
    proposed = rate_proposed(mu, N)
    d1 = delta_r1(mu, N) if N < K else Fraction(0)
    d2 = delta_r2(mu, N) if N < K else Fraction(0)
    return RateReport(
        N=N,
        K=K,
        r_coded_branch=proposed.coded_branch,
        r_random_branch=proposed.random_branch,
        r_c=proposed.r_c,
        r_b=rate_baseline(mu, N),
        delta_r1=d1,
        delta_r2=d2,
        cut_set=cut_set_bound(mu, N, K),
        branch=proposed.branch,
        alpha=None if alpha is None else as_fraction(alpha),
        M=None if M is None else as_fraction(M),
    )


class ExpectedTotals(NamedTuple):
    coded: Fraction
    random: Fraction

    @property
    def rate(self) -> Fraction:
        return min(self.coded, self.random)


def expected_totals(
    config: SystemConfig, demand: Demand, cap: int = DEFAULT_ENUMERATION_USERS
) -> ExpectedTotals:
    """Coded and random ledger lengths (in files) when every subfile has its
    expected size, each coded segment costing its longest source."""
    K = config.num_users
    if K > cap:
        raise ConfigError([f"K={K} exceeds enumeration cap {cap}"])
    grouping = group_users(config, demand)
    fracs = [config.cache_fraction(k) for k in range(1, K + 1)]
    denom = prod(f.denominator for f in fracs)
    # numerators over the common denominator, indexed by membership bitmask
    weights = [1]
    for f in fracs:
        weights = [w * (f.denominator - f.numerator) for w in weights] + [w * f.numerator for w in weights]
    coded = 0
    for _, srcs in coded_plan(config, grouping):
        coded += max(weights[sum(1 << (u - 1) for u in s.cached_by)] for s in srcs)
    random = sum(
        (max(1 - fracs[k - 1] for k in grouping.group(i)) for i in grouping.nonempty()),
        start=Fraction(0),
    )
    return ExpectedTotals(Fraction(coded, denom), random)


def expected_rate_enumeration(
    config: SystemConfig, demand: Demand, cap: int = DEFAULT_ENUMERATION_USERS
) -> Fraction:
    return expected_totals(config, demand, cap).rate
