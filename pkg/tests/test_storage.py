"""Tests for the memory and disk cost-function stores."""

import struct

import pytest

from updownseg.piecewise import EQUALITY, Piece, PiecewiseCost
from updownseg.storage import (
    MAGIC,
    VERSION,
    CostColumn,
    DiskCostStore,
    MemoryCostStore,
    open_store,
)


def cost(*piece_tuples):
    pieces = [Piece(*s) for s in piece_tuples]
    return PiecewiseCost(pieces, pieces[0].min_mean, pieces[-1].max_mean)


def sample_columns():
    c0 = CostColumn(0, cost((2.0, -6.0, 0.0, 0.0, 3.0, None, EQUALITY)), None)
    c1 = CostColumn(
        1,
        cost((2.0, -6.0, 0.5, 0.0, 1.5, 0, EQUALITY),
             (0.0, 0.0, -1.25, 1.5, 3.0, 0, 1.5)),
        cost((4.0, -2.0, 7.0, 0.0, 3.0, 0, 0.75)))
    c2 = CostColumn(
        2,
        cost((1.0, 0.0, 2.0, 0.0, 3.0, 1, EQUALITY)),
        cost((3.0, -9.0, -2.5, 0.0, 2.0, 1, EQUALITY),
             (0.0, 0.0, 4.0, 2.0, 3.0, 1, 2.0)))
    return [c0, c1, c2]


def assert_same_function(a, b):
    assert a.domain_min == b.domain_min
    assert a.domain_max == b.domain_max
    assert len(a.pieces) == len(b.pieces)
    for p, q in zip(a.pieces, b.pieces):
        assert (p.alpha, p.beta, p.gamma) == (q.alpha, q.beta, q.gamma)
        assert (p.min_mean, p.max_mean) == (q.min_mean, q.max_mean)
        assert p.prev_end == q.prev_end
        assert p.prev_mean == q.prev_mean


@pytest.fixture(params=["memory", "disk"])
def store(request, tmp_path):
    s = open_store(request.param, tmp_path)
    yield s
    s.close()


def test_roundtrip(store):
    columns = sample_columns()
    for col in columns:
        store.push_column(col)
    for col in columns:
        assert_same_function(store.get(col.index, 0), col.background)
        if col.peak is not None:
            assert_same_function(store.get(col.index, 1), col.peak)


def test_push_out_of_order(store):
    columns = sample_columns()
    store.push_column(columns[0])
    with pytest.raises(ValueError):
        store.push_column(columns[2])
    with pytest.raises(ValueError):
        store.push_column(columns[0])


def test_first_column_has_no_peak_function(store):
    store.push_column(sample_columns()[0])
    with pytest.raises(LookupError):
        store.get(0, 1)


def test_get_bad_index(store):
    store.push_column(sample_columns()[0])
    with pytest.raises(LookupError):
        store.get(5, 0)
    with pytest.raises(LookupError):
        store.get(-1, 0)


def test_stats_accounting(store):
    for col in sample_columns():
        store.push_column(col)
    st = store.stats()
    assert st.columns == 3
    assert st.functions_stored == 5  # three background + two peak
    assert st.total_pieces == 2 + 1 + 1 + 1 + 2
    assert st.max_pieces == 2
    assert st.mean_pieces == pytest.approx(7 / 5)


def test_interleaved_push_and_get(store):
    columns = sample_columns()
    store.push_column(columns[0])
    assert_same_function(store.get(0, 0), columns[0].background)
    store.push_column(columns[1])
    assert_same_function(store.get(1, 1), columns[1].peak)
    store.push_column(columns[2])
    assert_same_function(store.get(2, 0), columns[2].background)


def test_closed_store_rejects_use(store):
    store.push_column(sample_columns()[0])
    store.close()
    with pytest.raises(ValueError):
        store.get(0, 0)
    with pytest.raises(ValueError):
        store.push_column(sample_columns()[1])


def test_memory_backend_reports_zero_bytes():
    s = MemoryCostStore()
    for col in sample_columns():
        s.push_column(col)
    assert s.stats().bytes_written == 0


def test_disk_bytes_written_matches_file(tmp_path):
    s = DiskCostStore(tmp_path)
    for col in sample_columns():
        s.push_column(col)
    s.get(0, 0)  # forces a flush
    assert s.stats().bytes_written == s.db_path.stat().st_size
    s.close(delete=False)


def test_disk_cleanup_and_keep(tmp_path):
    s = DiskCostStore(tmp_path / "a")
    s.push_column(sample_columns()[0])
    db, idx = s.db_path, s.idx_path
    s.close(delete=True)
    assert not db.exists() and not idx.exists()

    s = DiskCostStore(tmp_path / "b")
    s.push_column(sample_columns()[0])
    db, idx = s.db_path, s.idx_path
    s.close(delete=False)
    assert db.exists() and idx.exists()


def test_disk_file_format_bytes(tmp_path):
    # Golden check of the wire format, byte for byte.
    s = DiskCostStore(tmp_path)
    s.push_column(CostColumn(0, cost((2.0, -6.0, 0.0, 0.0, 3.0, None, EQUALITY)),
                             None))
    s.push_column(CostColumn(
        1,
        cost((0.0, 0.0, -1.25, 0.0, 3.0, 0, 1.5)),
        cost((4.0, -2.0, 7.0, 0.0, 3.0, 0, EQUALITY))))
    s.close(delete=False)

    record = struct.Struct("<6dqB")
    count = struct.Struct("<I")
    expected_db = (
        MAGIC + bytes([VERSION])
        # column 0, state 0: one piece, no previous segment, equality flag
        + count.pack(1)
        + record.pack(2.0, -6.0, 0.0, 0.0, 3.0, 0.0, -1, 1)
        # column 0, state 1: absent
        + count.pack(0)
        # column 1, state 0: finite prev_mean, flag clear
        + count.pack(1)
        + record.pack(0.0, 0.0, -1.25, 0.0, 3.0, 1.5, 0, 0)
        # column 1, state 1
        + count.pack(1)
        + record.pack(4.0, -2.0, 7.0, 0.0, 3.0, 0.0, 0, 1))
    assert s.db_path.read_bytes() == expected_db
    assert record.size == 57

    offsets = [5, 5 + 4 + 57, 5 + 4 + 57 + 4, 5 + 4 + 57 + 4 + 4 + 57]
    expected_idx = b"".join(struct.pack("<Q", off) for off in offsets)
    assert s.idx_path.read_bytes() == expected_idx


def test_backend_equivalence_random(rng, tmp_path):
    mem = MemoryCostStore()
    disk = DiskCostStore(tmp_path)
    columns = []
    for i in range(20):
        def rand_cost():
            n = int(rng.integers(1, 5))
            bounds = sorted(set(float(x) for x in rng.uniform(0, 10, size=n + 1)))
            while len(bounds) < n + 1:
                bounds.append(bounds[-1] + 1.0)
            pieces = []
            for k in range(n):
                pieces.append(Piece(float(rng.uniform(0, 5)),
                                    -float(rng.uniform(0, 5)),
                                    float(rng.uniform(-5, 5)),
                                    bounds[k], bounds[k + 1],
                                    None if rng.random() < 0.2 else int(rng.integers(0, 99)),
                                    EQUALITY if rng.random() < 0.5
                                    else float(rng.uniform(0, 10))))
            return PiecewiseCost(pieces, bounds[0], bounds[n])

        peak = None if i == 0 else rand_cost()
        columns.append(CostColumn(i, rand_cost(), peak))
    for col in columns:
        mem.push_column(col)
        disk.push_column(col)
    for col in columns:
        assert_same_function(mem.get(col.index, 0), disk.get(col.index, 0))
        if col.peak is not None:
            assert_same_function(mem.get(col.index, 1), disk.get(col.index, 1))
    stats_m, stats_d = mem.stats(), disk.stats()
    assert stats_m.functions_stored == stats_d.functions_stored
    assert stats_m.total_pieces == stats_d.total_pieces
    assert stats_m.max_pieces == stats_d.max_pieces
    mem.close()
    disk.close()


def test_open_store_rejects_unknown_backend(tmp_path):
    with pytest.raises(ValueError):
        open_store("tape", tmp_path)
    with pytest.raises(ValueError):
        open_store("disk", None)
