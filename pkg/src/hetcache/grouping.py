"""Demand groups, capacity ordering and worst-case demand vectors."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

from .model import ConfigError, Demand, SystemConfig

DEFAULT_ENUMERATION_CAP = 10**6


def capacity_order(config: SystemConfig) -> list[int]:
    """Users sorted by non-decreasing capacity, ties by lower index."""
    return sorted(range(1, config.num_users + 1), key=lambda k: (config.capacity(k), k))


@dataclass(frozen=True)
class Grouping:
    """Users split by requested file.

    ``groups[i - 1]`` lists the original indices of users requesting file i,
    in non-decreasing capacity order. ``boundaries`` is (S_0, ..., S_N) and
    ``relabel[t - 1]`` is the original user carrying canonical label t.
    """

    groups: tuple[tuple[int, ...], ...]
    boundaries: tuple[int, ...]
    relabel: tuple[int, ...]

    @property
    def num_files(self) -> int:
        return len(self.groups)

    def group(self, file_index: int) -> tuple[int, ...]:
        return self.groups[file_index - 1]

    def head(self, file_index: int) -> int:
        """Smallest-cache user of a non-empty group (canonical label S_{i-1}+1)."""
        return self.groups[file_index - 1][0]

    def nonempty(self) -> list[int]:
        return [i for i, g in enumerate(self.groups, start=1) if g]

    def canonical_demand(self) -> list[int]:
        """Requests in relabeled order; contiguous blocks per file."""
        return [i for i, g in enumerate(self.groups, start=1) for _ in g]

    def group_of(self, user: int) -> int:
        for i, g in enumerate(self.groups, start=1):
            if user in g:
                return i
        raise KeyError(user)


def group_users(config: SystemConfig, demand: Demand) -> Grouping:
    demand.validate(config)
    order = capacity_order(config)
    groups = tuple(
        tuple(k for k in order if demand[k] == i) for i in range(1, config.num_files + 1)
    )
    boundaries = [0]
    for g in groups:
        boundaries.append(boundaries[-1] + len(g))
    relabel = tuple(k for g in groups for k in g)
    return Grouping(groups, tuple(boundaries), relabel)


def worst_case_demand(config: SystemConfig) -> Demand:
    """Distinct files for the min(N, K) smallest caches, then round-robin."""
    d = [0] * config.num_users
    for t, k in enumerate(capacity_order(config)):
        d[k - 1] = t % config.num_files + 1
    return Demand(tuple(d))


def enumerate_demands(config: SystemConfig, cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[Demand]:
    total = config.num_files**config.num_users
    if total > cap:
        raise ConfigError([f"N^K = {total} demands exceeds enumeration cap {cap}"])
    for d in itertools.product(range(1, config.num_files + 1), repeat=config.num_users):
        yield Demand(d)
