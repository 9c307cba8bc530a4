"""Incremental elimination over GF(2) with rows packed into uint64 words."""

from __future__ import annotations

import numba
import numpy as np


def pack_rows(bits: np.ndarray, width: int) -> np.ndarray:
    """Pack a ``(rows, cols)`` 0/1 array into ``(rows, width)`` little-endian uint64 words."""
    bits = np.atleast_2d(np.asarray(bits, dtype=np.uint8))
    packed = np.packbits(bits, axis=1, bitorder="little")
    out = np.zeros((bits.shape[0], width * 8), dtype=np.uint8)
    out[:, : packed.shape[1]] = packed
    return out.view("<u8")


@numba.njit(cache=True)
def _insert(rows, rank, pw, pb, row, colmask):
    """Reduce ``row`` in place against ``rows[:rank]``; return its new pivot
    column (after clearing that column from the basis) or -1."""
    width = row.shape[0]
    one = np.uint64(1)
    for t in range(rank):
        if (row[pw[t]] >> np.uint64(pb[t])) & one:
            for w in range(width):
                row[w] ^= rows[t, w]
    for w in range(width):
        live = row[w] & colmask[w]
        if live:
            b = 0
            while not (live >> np.uint64(b)) & one:
                b += 1
            for t in range(rank):
                if (rows[t, w] >> np.uint64(b)) & one:
                    for v in range(width):
                        rows[t, v] ^= row[v]
            return 64 * w + b
    return -1


class GF2Basis:
    """Row space of the rows inserted so far, kept in reduced echelon form.

    Pivots are chosen among the first ``ncols`` columns only; with
    ``augmented=True`` one extra right-hand-side column rides along, so a
    full-rank basis reads off the solution directly.
    """

    def __init__(self, ncols: int, augmented: bool = False):
        self.ncols = ncols
        self.augmented = augmented
        self.width = max(1, (ncols + int(augmented) + 63) // 64)
        cap = min(max(ncols, 1), 64)
        self._rows = np.zeros((cap, self.width), dtype=np.uint64)
        self._pw = np.zeros(cap, dtype=np.int64)
        self._pb = np.zeros(cap, dtype=np.int64)
        self.pivots: list[int] = []
        # columns beyond ncols (padding and the augmented bit) never pivot
        mask = np.zeros(self.width, dtype=np.uint64)
        full, rest = divmod(ncols, 64)
        mask[:full] = np.uint64(0xFFFFFFFFFFFFFFFF)
        if rest:
            mask[full] = np.uint64((1 << rest) - 1)
        self._colmask = mask

    @property
    def rank(self) -> int:
        return len(self.pivots)

    @property
    def full(self) -> bool:
        return self.rank == self.ncols

    def pack(self, bits: np.ndarray, rhs: int | None = None) -> np.ndarray:
        row = np.zeros(self.ncols + int(self.augmented), dtype=np.uint8)
        row[: self.ncols] = bits
        if self.augmented:
            row[self.ncols] = rhs or 0
        return pack_rows(row, self.width)[0]

    def insert_packed(self, row: np.ndarray) -> bool:
        """Reduce ``row`` against the basis; keep it if independent."""
        r = self.rank
        row = np.array(row, dtype=np.uint64)
        pivot = _insert(self._rows, r, self._pw, self._pb, row, self._colmask)
        if pivot < 0:
            return False
        if r == len(self._rows):
            grow = len(self._rows)
            self._rows = np.concatenate([self._rows, np.zeros_like(self._rows)])
            self._pw = np.concatenate([self._pw, np.zeros(grow, dtype=np.int64)])
            self._pb = np.concatenate([self._pb, np.zeros(grow, dtype=np.int64)])
        self._rows[r] = row
        self._pw[r], self._pb[r] = divmod(pivot, 64)
        self.pivots.append(pivot)
        return True

    def insert(self, bits: np.ndarray, rhs: int | None = None) -> bool:
        return self.insert_packed(self.pack(bits, rhs))

    def solution(self) -> np.ndarray:
        """Unique solution of the augmented system; requires full rank."""
        if not self.augmented:
            raise ValueError("basis carries no right-hand side")
        if not self.full:
            raise np.linalg.LinAlgError(f"rank {self.rank} < {self.ncols} unknowns")
        aw, ab = divmod(self.ncols, 64)
        rhs = (self._rows[: self.rank, aw] >> np.uint64(ab)) & np.uint64(1)
        x = np.zeros(self.ncols, dtype=np.uint8)
        x[np.asarray(self.pivots, dtype=np.int64)] = rhs.astype(np.uint8)
        return x


def gf2_rank(matrix: np.ndarray) -> int:
    matrix = np.atleast_2d(np.asarray(matrix, dtype=np.uint8))
    basis = GF2Basis(matrix.shape[1])
    for row in pack_rows(matrix, basis.width):
        basis.insert_packed(row)
        if basis.full:
            break
    return basis.rank
