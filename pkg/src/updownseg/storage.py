"""Cost-function stores for the two-state segmentation recursion.

The forward pass produces, for every data row, a background-state cost
function and (from the second row on) a peak-state cost function; the
decoder later reads them back by ``(row, state)``.  Two interchangeable
backends are provided: an in-memory list, and an append-only disk pair
``cost.db``/``cost.idx`` that keeps resident memory flat no matter how
long the profile is.

Disk layout (all integers little-endian):

``cost.db``
    4-byte magic ``GFPC``, one version byte ``0x01``, then per pushed
    column: a ``u32`` record count followed by that many 57-byte piece
    records for state 0, then the same for state 1 (count 0 when the
    column has no peak function).  A record is six ``f64`` values
    (alpha, beta, gamma, min_mean, max_mean, prev_mean), one ``i64``
    ``prev_end`` (-1 encodes "none") and one flags byte whose bit 0
    marks the equality sentinel (``prev_mean`` is then written as 0.0).

``cost.idx``
    One ``u64`` offset into ``cost.db`` per ``(column, state)`` pair, in
    push order, pointing at the state's record count.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

from .piecewise import EQUALITY, Piece, PiecewiseCost

MAGIC = b"GFPC"
VERSION = 1
_RECORD = struct.Struct("<6dqB")  # 57 bytes
_COUNT = struct.Struct("<I")
_OFFSET = struct.Struct("<Q")
_WRITE_BUFFER = 1 << 16


class CostColumn(NamedTuple):
    """Both state cost functions for one data row (``peak`` may be ``None``)."""

    index: int
    background: PiecewiseCost
    peak: PiecewiseCost | None


@dataclass
class StoreStats:
    """Bookkeeping counters accumulated over every stored function."""

    functions_stored: int = 0
    total_pieces: int = 0
    max_pieces: int = 0
    bytes_written: int = 0
    columns: int = 0

    @property
    def mean_pieces(self):
        if self.functions_stored == 0:
            return math.nan
        return self.total_pieces / self.functions_stored


class MemoryCostStore:
    """Keeps every pushed column in a Python list."""

    def __init__(self):
        self._columns = []
        self._stats = StoreStats()
        self._closed = False

    def push_column(self, column):
        if self._closed:
            raise ValueError("store is closed")
        if column.index != len(self._columns):
            raise ValueError(
                f"columns must be pushed in order: expected index "
                f"{len(self._columns)}, got {column.index}")
        self._columns.append((column.background, column.peak))
        self._account(column)

    def get(self, index, state):
        if self._closed:
            raise ValueError("store is closed")
        if not 0 <= index < len(self._columns):
            raise LookupError(f"no column {index} in store")
        fn = self._columns[index][state]
        if fn is None:
            raise LookupError(f"no state-{state} function stored for column {index}")
        return fn

    def _account(self, column):
        st = self._stats
        st.columns += 1
        for fn in (column.background, column.peak):
            if fn is None:
                continue
            n = len(fn.pieces)
            st.functions_stored += 1
            st.total_pieces += n
            if n > st.max_pieces:
                st.max_pieces = n

    def stats(self):
        return self._stats

    def close(self, delete=True):
        self._columns = []
        self._closed = True


class DiskCostStore:
    """Streams columns to ``cost.db``/``cost.idx`` under ``workdir``.

    Only file handles stay resident; reading a column back seeks through
    the index, so memory use does not grow with the number of columns.
    """

    def __init__(self, workdir):
        workdir = Path(workdir)
        workdir.mkdir(parents=True, exist_ok=True)
        self.db_path = workdir / "cost.db"
        self.idx_path = workdir / "cost.idx"
        self._db = open(self.db_path, "wb", buffering=_WRITE_BUFFER)
        self._idx = open(self.idx_path, "wb", buffering=_WRITE_BUFFER)
        self._db.write(MAGIC)
        self._db.write(bytes([VERSION]))
        self._offset = len(MAGIC) + 1
        self._next_index = 0
        self._dirty = True
        self._db_read = None
        self._idx_read = None
        self._stats = StoreStats(bytes_written=self._offset)
        self._closed = False

    def push_column(self, column):
        if self._closed:
            raise ValueError("store is closed")
        if column.index != self._next_index:
            raise ValueError(
                f"columns must be pushed in order: expected index "
                f"{self._next_index}, got {column.index}")
        self._next_index += 1
        st = self._stats
        st.columns += 1
        for fn in (column.background, column.peak):
            self._idx.write(_OFFSET.pack(self._offset))
            if fn is None:
                self._db.write(_COUNT.pack(0))
                self._offset += _COUNT.size
                continue
            pieces = fn.pieces
            n = len(pieces)
            chunks = [_COUNT.pack(n)]
            for p in pieces:
                if p.prev_mean == EQUALITY:
                    pm, flags = 0.0, 1
                else:
                    pm, flags = p.prev_mean, 0
                pe = -1 if p.prev_end is None else p.prev_end
                chunks.append(_RECORD.pack(p.alpha, p.beta, p.gamma,
                                           p.min_mean, p.max_mean, pm, pe, flags))
            blob = b"".join(chunks)
            self._db.write(blob)
            self._offset += len(blob)
            st.functions_stored += 1
            st.total_pieces += n
            if n > st.max_pieces:
                st.max_pieces = n
        st.bytes_written = self._offset
        self._dirty = True

    def get(self, index, state):
        if self._closed:
            raise ValueError("store is closed")
        if not 0 <= index < self._next_index:
            raise LookupError(f"no column {index} in store")
        if state not in (0, 1):
            raise LookupError(f"invalid state {state}")
        if self._dirty:
            self._db.flush()
            self._idx.flush()
            self._dirty = False
        if self._db_read is None:
            self._db_read = open(self.db_path, "rb")
            self._idx_read = open(self.idx_path, "rb")
        self._idx_read.seek(_OFFSET.size * (2 * index + state))
        (offset,) = _OFFSET.unpack(self._idx_read.read(_OFFSET.size))
        self._db_read.seek(offset)
        (n,) = _COUNT.unpack(self._db_read.read(_COUNT.size))
        if n == 0:
            raise LookupError(f"no state-{state} function stored for column {index}")
        blob = self._db_read.read(_RECORD.size * n)
        pieces = []
        for a, b, g, lo, hi, pm, pe, flags in _RECORD.iter_unpack(blob):
            pieces.append(Piece(a, b, g, lo, hi,
                                None if pe == -1 else pe,
                                EQUALITY if flags & 1 else pm))
        return PiecewiseCost(pieces, pieces[0].min_mean, pieces[-1].max_mean)

    def stats(self):
        return self._stats

    def close(self, delete=True):
        if self._closed:
            return
        self._closed = True
        for handle in (self._db, self._idx, self._db_read, self._idx_read):
            if handle is not None:
                handle.close()
        if delete:
            self.db_path.unlink(missing_ok=True)
            self.idx_path.unlink(missing_ok=True)


def open_store(backend, workdir=None):
    """Construct a cost store: ``backend`` is ``"memory"`` or ``"disk"``."""
    if backend == "memory":
        return MemoryCostStore()
    if backend == "disk":
        if workdir is None:
            raise ValueError("disk backend requires a workdir")
        return DiskCostStore(workdir)
    raise ValueError(f"unknown storage backend {backend!r}")
