"""Problem-instance types shared by every stage of the caching pipeline.

User and file indices are 1-based throughout the public API. Bit indices
inside numpy arrays are 0-based; text dumps convert them to 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np


class ConfigError(ValueError):
    """Raised when a problem instance violates its invariants."""

    def __init__(self, problems: Sequence[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


def as_fraction(value) -> Fraction:
    """Parse ints, Fractions, decimal floats or strings like ``"1/8"``."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(value).limit_denominator(10**12)
    return Fraction(str(value).strip())


@dataclass(frozen=True)
class SystemConfig:
    num_files: int
    file_size_bits: int
    num_users: int
    cache_capacities: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "cache_capacities", tuple(as_fraction(m) for m in self.cache_capacities)
        )

    @classmethod
    def from_capacities(cls, num_files: int, capacities: Iterable, file_size_bits: int = 1000):
        mu = tuple(as_fraction(m) for m in capacities)
        return cls(num_files, file_size_bits, len(mu), mu)

    # short aliases matching the usual notation
    @property
    def N(self) -> int:
        return self.num_files

    @property
    def F(self) -> int:
        return self.file_size_bits

    @property
    def K(self) -> int:
        return self.num_users

    @property
    def mu(self) -> tuple[Fraction, ...]:
        return self.cache_capacities

    def capacity(self, user: int) -> Fraction:
        return self.cache_capacities[user - 1]

    def cache_fraction(self, user: int) -> Fraction:
        """Fraction of every file held by ``user``: M_k / N."""
        return self.cache_capacities[user - 1] / self.num_files

    def with_file_size(self, file_size_bits: int) -> "SystemConfig":
        return SystemConfig(self.num_files, file_size_bits, self.num_users, self.cache_capacities)

    def to_text(self) -> str:
        mu = ",".join(str(m) for m in self.cache_capacities)
        return f"N={self.num_files}\nF={self.file_size_bits}\nK={self.num_users}\nmu={mu}\n"

    @classmethod
    def from_text(cls, text: str) -> "SystemConfig":
        fields = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError([f"malformed line {line!r}"])
            fields[key.strip()] = value.strip()
        missing = [k for k in ("N", "F", "K", "mu") if k not in fields]
        if missing:
            raise ConfigError([f"missing key {k}" for k in missing])
        mu = tuple(as_fraction(m) for m in fields["mu"].split(",") if m.strip())
        return cls(int(fields["N"]), int(fields["F"]), int(fields["K"]), mu)


def validate_config(config: SystemConfig) -> SystemConfig:
    problems = []
    if config.num_files < 1:
        problems.append(f"N must be positive, got {config.num_files}")
    if config.file_size_bits < 1:
        problems.append(f"F must be positive, got {config.file_size_bits}")
    if config.num_users < 1:
        problems.append(f"K must be positive, got {config.num_users}")
    if len(config.cache_capacities) != config.num_users:
        problems.append(
            f"capacity vector has length {len(config.cache_capacities)}, expected K={config.num_users}"
        )
    for k, m in enumerate(config.cache_capacities, start=1):
        if m < 0 or m > config.num_files:
            problems.append(f"M_{k}={m} outside [0, N={config.num_files}]")
    if problems:
        raise ConfigError(problems)
    return config


@dataclass(frozen=True)
class Demand:
    requests: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "requests", tuple(int(d) for d in self.requests))

    def __len__(self):
        return len(self.requests)

    def __getitem__(self, user: int) -> int:
        """File requested by 1-based ``user``."""
        return self.requests[user - 1]

    def validate(self, config: SystemConfig) -> "Demand":
        problems = []
        if len(self.requests) != config.num_users:
            problems.append(f"demand has length {len(self.requests)}, expected K={config.num_users}")
        for k, d in enumerate(self.requests, start=1):
            if not 1 <= d <= config.num_files:
                problems.append(f"d_{k}={d} outside [1, N={config.num_files}]")
        if problems:
            raise ConfigError(problems)
        return self

    @classmethod
    def parse(cls, text: str) -> "Demand":
        return cls(tuple(int(x) for x in text.split(",") if x.strip()))

    def __str__(self):
        return ",".join(map(str, self.requests))


@dataclass(frozen=True)
class SubfileLabel:
    """W_{i,V}: bits of file ``file_index`` cached by exactly ``cached_by``."""

    file_index: int
    cached_by: frozenset[int]

    @classmethod
    def of(cls, file_index: int, users: Iterable[int] = ()) -> "SubfileLabel":
        return cls(file_index, frozenset(users))

    def __str__(self):
        users = ",".join(str(u) for u in sorted(self.cached_by))
        return f"{self.file_index}:{{{users}}}"


@dataclass(frozen=True, eq=False)
class Library:
    """N files of F bits each, stored as a read-only ``(N, F)`` uint8 array."""

    bits: np.ndarray

    def __post_init__(self):
        self.bits.setflags(write=False)

    @property
    def num_files(self) -> int:
        return self.bits.shape[0]

    @property
    def file_size_bits(self) -> int:
        return self.bits.shape[1]

    def file(self, index: int) -> np.ndarray:
        return self.bits[index - 1]

    def __eq__(self, other):
        return isinstance(other, Library) and np.array_equal(self.bits, other.bits)


def generate_library(config: SystemConfig, seed: int) -> Library:
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x11B]))
    bits = rng.integers(0, 2, size=(config.num_files, config.file_size_bits), dtype=np.uint8)
    return Library(bits)
