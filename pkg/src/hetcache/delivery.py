"""Coded delivery (three parts of zero-padded XORs) and the random linear
combination fallback, plus scheme selection."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Sequence

import numpy as np

from .gf2 import GF2Basis, pack_rows
from .grouping import Grouping
from .model import Library, SubfileLabel, SystemConfig
from .placement import Placement, SubfilePartition

P1, P2_1, P2_2, P2_3, P3, RND = "P1", "P2_1", "P2_2", "P2_3", "P3", "RND"
PART_TAGS = (P1, P2_1, P2_2, P2_3, P3, RND)

RANDOM_BLOCK_ROWS = 16


def xor_padded(*operands) -> np.ndarray:
    """Bitwise XOR after zero-padding every operand at the tail to the longest length."""
    arrays = [np.asarray(a, dtype=np.uint8) for a in operands]
    out = np.zeros(max((len(a) for a in arrays), default=0), dtype=np.uint8)
    for a in arrays:
        out[: len(a)] ^= a
    return out


@dataclass(frozen=True, eq=False)
class Segment:
    part_tag: str
    sources: tuple[SubfileLabel, ...]
    payload: np.ndarray
    # set for RND segments only: one coefficient row per payload bit
    file_index: int | None = None
    coefficients: np.ndarray | None = None

    @property
    def length(self) -> int:
        return len(self.payload)

    def record(self, with_payload: bool = False) -> str:
        if self.part_tag == RND:
            src = f"file={self.file_index} rows={self.length}"
        else:
            src = "+".join(str(s) for s in self.sources)
        fields = [self.part_tag, src, str(self.length)]
        if with_payload:
            fields.append(np.packbits(self.payload).tobytes().hex())
        return "\t".join(fields)


@dataclass(frozen=True, eq=False)
class MessageLedger:
    segments: tuple[Segment, ...]

    @property
    def total_bits(self) -> int:
        return sum(s.length for s in self.segments)

    def rate(self, file_size_bits: int) -> Fraction:
        return measure_rate(self, file_size_bits)

    def by_part(self, tag: str) -> list[Segment]:
        return [s for s in self.segments if s.part_tag == tag]

    def without(self, index: int) -> "MessageLedger":
        return MessageLedger(self.segments[:index] + self.segments[index + 1 :])

    def drop_last_row(self, file_index: int) -> "MessageLedger":
        """Copy with one fewer random combination for ``file_index``."""
        segs = []
        for s in self.segments:
            if s.part_tag == RND and s.file_index == file_index and s.length:
                s = Segment(RND, (), s.payload[:-1], file_index, s.coefficients[:-1])
            segs.append(s)
        return MessageLedger(tuple(segs))

    def export(self, with_payload: bool = False) -> str:
        return "".join(s.record(with_payload) + "\n" for s in self.segments)


def measure_rate(ledger: MessageLedger, file_size_bits: int) -> Fraction:
    if file_size_bits <= 0:
        raise ValueError("file size must be positive")
    return Fraction(ledger.total_bits, file_size_bits)


def _chain(file_index: int, users: Sequence[int]) -> Iterator[tuple[SubfileLabel, ...]]:
    for a, b in zip(users, users[1:]):
        yield (SubfileLabel.of(file_index, [a]), SubfileLabel.of(file_index, [b]))


def coded_plan(config: SystemConfig, grouping: Grouping) -> Iterator[tuple[str, tuple[SubfileLabel, ...]]]:
    """Yield ``(part_tag, sources)`` for every coded segment in emission order.

    Part 3 walks users in non-decreasing capacity order, so that for every
    (i, V) the subfile W_{d_i, V} is the longest source in expectation.
    """
    files = grouping.nonempty()
    for i in files:
        yield P1, (SubfileLabel.of(i),)

    for i in files:
        for src in _chain(i, grouping.group(i)):
            yield P2_1, src
    for i, j in itertools.combinations(files, 2):
        for src in _chain(i, grouping.group(j)):
            yield P2_2, src
        for src in _chain(j, grouping.group(i)):
            yield P2_2, src
    for i, j in itertools.combinations(files, 2):
        yield P2_3, (SubfileLabel.of(i, [grouping.head(j)]), SubfileLabel.of(j, [grouping.head(i)]))

    request = {k: f for f, g in enumerate(grouping.groups, start=1) for k in g}
    order = sorted(request, key=lambda k: (config.capacity(k), k))
    K = len(order)
    for pos in range(K - 2):
        u = order[pos]
        later = order[pos + 1 :]
        for size in range(2, K - pos):
            for V in itertools.combinations(later, size):
                srcs = [SubfileLabel.of(request[v], [u, *(w for w in V if w != v)]) for v in V]
                srcs.append(SubfileLabel.of(request[u], V))
                yield P3, tuple(srcs)


def plan_lengths(plan, length_of: Callable[[SubfileLabel], object]) -> list:
    """Segment lengths under a subfile-length model (max over sources)."""
    return [max(length_of(s) for s in srcs) for _, srcs in plan]


def coded_delivery(
    config: SystemConfig, library: Library, partition: SubfilePartition, grouping: Grouping
) -> MessageLedger:
    segments = []
    for tag, srcs in coded_plan(config, grouping):
        parts = [library.file(s.file_index)[partition.indices(s)] for s in srcs]
        if not any(len(p) for p in parts):
            continue
        segments.append(Segment(tag, srcs, xor_padded(*parts)))
    return MessageLedger(tuple(segments))


def _uncached(placement: Placement, user: int, file_index: int) -> np.ndarray:
    mask = np.ones(placement.file_size_bits, dtype=bool)
    mask[placement.cached(user, file_index)] = False
    return np.flatnonzero(mask)


def random_delivery(
    config: SystemConfig,
    library: Library,
    placement: Placement,
    grouping: Grouping,
    seed: int,
    block_rows: int = RANDOM_BLOCK_ROWS,
) -> MessageLedger:
    """Per requested file, send random GF(2) combinations until every user in
    its group can solve for its uncached bits; trailing rows beyond the
    shortest sufficient prefix are dropped."""
    F = config.file_size_bits
    segments = []
    for i in grouping.nonempty():
        unknown = {k: _uncached(placement, k, i) for k in grouping.group(i)}
        pending = {k: GF2Basis(len(cols)) for k, cols in unknown.items() if len(cols)}
        if not pending:
            continue
        rng = np.random.default_rng(np.random.SeedSequence([seed, 0x52D, i]))
        blocks, needed, sent = [], 0, 0
        while pending:
            block = rng.integers(0, 2, size=(block_rows, F), dtype=np.uint8)
            blocks.append(block)
            for k in list(pending):
                basis = pending[k]
                packed = pack_rows(block[:, unknown[k]], basis.width)
                for r, row in enumerate(packed):
                    basis.insert_packed(row)
                    if basis.full:
                        needed = max(needed, sent + r + 1)
                        del pending[k]
                        break
            sent += block_rows
        coeffs = np.concatenate(blocks)[:needed]
        payload = np.bitwise_xor.reduce(coeffs & library.file(i), axis=1).astype(np.uint8)
        coeffs.setflags(write=False)
        segments.append(Segment(RND, (), payload, i, coeffs))
    return MessageLedger(tuple(segments))


def select_scheme(coded: MessageLedger, random: MessageLedger, file_size_bits: int):
    """Return ``(ledger, rate)`` for the shorter ledger; ties go to coded."""
    if random.total_bits < coded.total_bits:
        return random, measure_rate(random, file_size_bits)
    return coded, measure_rate(coded, file_size_bits)
