"""Per-user decoding and end-to-end verification of a delivery ledger."""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .delivery import RND, MessageLedger, measure_rate, xor_padded
from .gf2 import GF2Basis, pack_rows
from .model import Demand, Library, SubfileLabel, SystemConfig
from .placement import Placement, SubfilePartition, partition_subfiles


class DecodeError(RuntimeError):
    pass


class UnresolvableError(DecodeError):
    """Coded segments left some needed subfile unrecoverable."""


class RankDeficiencyError(DecodeError):
    """Too few random combinations to solve for the missing bits."""


@dataclass(frozen=True, eq=False)
class UserCache:
    """What one user physically stores: per file, sorted 0-based indices and their bit values."""

    user: int
    files: dict[int, tuple[np.ndarray, np.ndarray]]


def user_cache(library: Library, placement: Placement, user: int) -> UserCache:
    return UserCache(
        user,
        {
            i: (placement.cached(user, i), library.file(i)[placement.cached(user, i)])
            for i in range(1, library.num_files + 1)
        },
    )


@dataclass
class DecodeState:
    user: int
    known_subfiles: dict[SubfileLabel, np.ndarray] = field(default_factory=dict)
    recovered_file: np.ndarray | None = None


def initial_state(cache: UserCache, partition: SubfilePartition) -> DecodeState:
    state = DecodeState(cache.user)
    for label, idx in partition.subfiles.items():
        if cache.user in label.cached_by:
            cidx, cbits = cache.files[label.file_index]
            state.known_subfiles[label] = cbits[np.searchsorted(cidx, idx)]
    return state


def _resolve_coded(state: DecodeState, partition: SubfilePartition, ledger: MessageLedger) -> None:
    known = state.known_subfiles

    def is_known(label):
        return label in known or partition.length(label) == 0

    segments = [s for s in ledger.segments if s.part_tag != RND]
    missing = []
    waiting = defaultdict(list)
    queue = deque()
    for n, seg in enumerate(segments):
        unknown = {s for s in seg.sources if not is_known(s)}
        missing.append(unknown)
        for s in unknown:
            waiting[s].append(n)
        if len(unknown) == 1:
            queue.append(n)
    while queue:
        n = queue.popleft()
        if len(missing[n]) != 1:
            continue
        (target,) = missing[n]
        seg = segments[n]
        others = [known[s] for s in seg.sources if s != target and s in known]
        known[target] = xor_padded(seg.payload, *others)[: partition.length(target)]
        for m in waiting.pop(target, ()):
            missing[m].discard(target)
            if len(missing[m]) == 1:
                queue.append(m)


def decode_user(
    user: int,
    cache: UserCache,
    partition: SubfilePartition,
    ledger: MessageLedger,
    demand: Demand,
) -> np.ndarray:
    """Reconstruct the file requested by ``user`` from its cache and the broadcast."""
    want = demand[user]
    F = partition.file_size_bits
    cidx, cbits = cache.files[want]
    out = np.zeros(F, dtype=np.uint8)
    out[cidx] = cbits
    if len(cidx) == F:
        return out

    rnd = [s for s in ledger.segments if s.part_tag == RND]
    if rnd:
        unknown = np.setdiff1d(np.arange(F), cidx)
        basis = GF2Basis(len(unknown), augmented=True)
        for seg in rnd:
            if seg.file_index != want:
                continue
            coeffs = seg.coefficients
            known_part = np.bitwise_xor.reduce(coeffs[:, cidx] & cbits, axis=1) if len(cidx) else 0
            system = np.column_stack([coeffs[:, unknown], seg.payload ^ known_part])
            for row in pack_rows(system, basis.width):
                basis.insert_packed(row)
                if basis.full:
                    break
        if not basis.full:
            raise RankDeficiencyError(
                f"user {user}: rank {basis.rank} of {len(unknown)} unknown bits of file {want}"
            )
        out[unknown] = basis.solution()
        return out

    state = initial_state(cache, partition)
    _resolve_coded(state, partition, ledger)
    for label in partition.labels_of(want):
        if user in label.cached_by or partition.length(label) == 0:
            continue
        if label not in state.known_subfiles:
            raise UnresolvableError(f"user {user}: subfile {label} not recoverable")
        out[partition.indices(label)] = state.known_subfiles[label]
    return out


@dataclass
class UserResult:
    user: int
    ok: bool
    mismatched_bits: int
    error: str = ""


@dataclass
class VerificationReport:
    users: list[UserResult]
    rate: Fraction

    @property
    def ok(self) -> bool:
        return all(u.ok for u in self.users)

    @property
    def users_failed(self) -> int:
        return sum(not u.ok for u in self.users)

    def summary(self) -> str:
        return f"ok={str(self.ok).lower()} rate={float(self.rate):.6f} users_failed={self.users_failed}"

    def table(self) -> str:
        lines = ["user  ok     mismatched  error"]
        for u in self.users:
            lines.append(f"{u.user:<5d} {str(u.ok):<6s} {u.mismatched_bits:<11d} {u.error}".rstrip())
        return "\n".join(lines)


def verify_all(
    config: SystemConfig,
    library: Library,
    placement: Placement,
    demand: Demand,
    ledger: MessageLedger,
    partition: SubfilePartition | None = None,
) -> VerificationReport:
    if partition is None:
        partition = partition_subfiles(config, placement)
    results = []
    for k in range(1, config.num_users + 1):
        truth = library.file(demand[k])
        try:
            got = decode_user(k, user_cache(library, placement, k), partition, ledger, demand)
        except DecodeError as exc:
            results.append(UserResult(k, False, config.file_size_bits, str(exc)))
            continue
        bad = int(np.count_nonzero(got != truth))
        results.append(UserResult(k, bad == 0, bad))
    return VerificationReport(results, measure_rate(ledger, config.file_size_bits))
