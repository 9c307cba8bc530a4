"""Decentralized placement: every user independently caches a random
``round(M_k F / N)`` bits of each file."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import floor
from typing import Iterable, Iterator

import numpy as np

from .model import SubfileLabel, SystemConfig

_EMPTY = np.zeros(0, dtype=np.int64)
_EMPTY.setflags(write=False)


def bits_per_file(config: SystemConfig, user: int) -> int:
    """Cached bits per file for ``user``, rounding M_k F / N half up."""
    return floor(config.cache_fraction(user) * config.file_size_bits + Fraction(1, 2))


def subseed(seed: int, user: int, file_index: int) -> np.random.SeedSequence:
    # Mixing rule: SeedSequence entropy [seed, user, file]; independent of loop order.
    return np.random.SeedSequence([seed, user, file_index])


@dataclass(frozen=True, eq=False)
class Placement:
    """Realized caches: ``cached_bits[(k, i)]`` is a sorted array of 0-based bit
    indices of file ``i`` held by user ``k``."""

    num_users: int
    num_files: int
    file_size_bits: int
    cached_bits: dict[tuple[int, int], np.ndarray]

    def cached(self, user: int, file_index: int) -> np.ndarray:
        return self.cached_bits[(user, file_index)]

    def user_total(self, user: int) -> int:
        return sum(len(self.cached(user, i)) for i in range(1, self.num_files + 1))

    def __eq__(self, other):
        if not isinstance(other, Placement) or self.cached_bits.keys() != other.cached_bits.keys():
            return False
        return all(np.array_equal(v, other.cached_bits[k]) for k, v in self.cached_bits.items())

    def dump(self) -> str:
        """One line per (user, file): ``user file count runs`` with 1-based
        run-length ranges ``a-b``."""
        lines = []
        for (k, i), idx in sorted(self.cached_bits.items()):
            lines.append(f"{k} {i} {len(idx)} {_rle(idx + 1)}".rstrip())
        return "\n".join(lines) + "\n"

    @classmethod
    def parse_dump(cls, text: str, num_users: int, num_files: int, file_size_bits: int) -> "Placement":
        cached = {}
        for line in text.splitlines():
            parts = line.split()
            if not parts:
                continue
            k, i = int(parts[0]), int(parts[1])
            idx = []
            for run in parts[3:]:
                for r in run.split(","):
                    a, _, b = r.partition("-")
                    idx.extend(range(int(a), int(b or a) + 1))
            cached[(k, i)] = np.asarray(idx, dtype=np.int64) - 1
        return cls(num_users, num_files, file_size_bits, cached)


def _rle(one_based: np.ndarray) -> str:
    if len(one_based) == 0:
        return ""
    breaks = np.flatnonzero(np.diff(one_based) != 1)
    starts = np.concatenate(([0], breaks + 1))
    ends = np.concatenate((breaks, [len(one_based) - 1]))
    runs = []
    for s, e in zip(starts, ends):
        a, b = int(one_based[s]), int(one_based[e])
        runs.append(str(a) if a == b else f"{a}-{b}")
    return ",".join(runs)


def place_random(config: SystemConfig, seed: int) -> Placement:
    F = config.file_size_bits
    cached = {}
    for k in range(1, config.num_users + 1):
        count = bits_per_file(config, k)
        for i in range(1, config.num_files + 1):
            if count == 0:
                idx = np.zeros(0, dtype=np.int64)
            elif count >= F:
                idx = np.arange(F, dtype=np.int64)
            else:
                rng = np.random.default_rng(subseed(seed, k, i))
                idx = np.sort(rng.choice(F, size=count, replace=False)).astype(np.int64)
            idx.setflags(write=False)
            cached[(k, i)] = idx
    return Placement(config.num_users, config.num_files, F, cached)


@dataclass(frozen=True, eq=False)
class SubfilePartition:
    """For each file, the bit indices cached by exactly each user set V.

    Only non-empty subfiles are materialized, plus V = {} for every file.
    """

    num_users: int
    num_files: int
    file_size_bits: int
    subfiles: dict[SubfileLabel, np.ndarray] = field(default_factory=dict)

    def indices(self, label: SubfileLabel) -> np.ndarray:
        return self.subfiles.get(label, _EMPTY)

    def length(self, label: SubfileLabel) -> int:
        return len(self.subfiles.get(label, _EMPTY))

    def labels_of(self, file_index: int) -> Iterator[SubfileLabel]:
        return (lab for lab in self.subfiles if lab.file_index == file_index)


def partition_subfiles(config: SystemConfig, placement: Placement) -> SubfilePartition:
    F, K = config.file_size_bits, config.num_users
    subfiles = {}
    for i in range(1, config.num_files + 1):
        # membership code per bit: bit (k - 1) set when user k caches it
        code = np.zeros(F, dtype=np.int64)
        for k in range(1, K + 1):
            code[placement.cached(k, i)] |= 1 << (k - 1)
        order = np.argsort(code, kind="stable")
        sorted_codes = code[order]
        values, starts = np.unique(sorted_codes, return_index=True)
        ends = np.append(starts[1:], F)
        subfiles[SubfileLabel.of(i)] = _EMPTY
        for value, s, e in zip(values, starts, ends):
            users = frozenset(k for k in range(1, K + 1) if (int(value) >> (k - 1)) & 1)
            idx = order[s:e]
            idx.setflags(write=False)
            subfiles[SubfileLabel(i, users)] = idx
    return SubfilePartition(K, config.num_files, F, subfiles)


def expected_subfile_fraction(config: SystemConfig, users: Iterable[int]) -> Fraction:
    """Large-F fraction of any file cached by exactly ``users``."""
    users = set(users)
    out = Fraction(1)
    for k in range(1, config.num_users + 1):
        p = config.cache_fraction(k)
        out *= p if k in users else 1 - p
    return out
