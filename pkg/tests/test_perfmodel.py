import pytest
from hypothesis import given, settings, strategies as st

from ppmlr.decomp import STANDARD_CONFIGS, PartitionConfig
from ppmlr.grid import build_default_grid
from ppmlr.perfmodel import (REPORT_FIELDS, TABLE_SPEC, WORKLOAD_FLOOR, BandwidthSpec, StepTiming, aggregate,
                             mas, predict_speedup, report_row)

GRID_SHAPE = (156, 150, 150)


def test_mas_examples():
    assert mas(BandwidthSpec(250e9, 51.2e9)) == 4.8828125
    assert round(mas(TABLE_SPEC), 2) == 4.88
    assert mas(BandwidthSpec(3e9, 3e9)) == 1.0
    assert mas(BandwidthSpec(6e9, 3e9)) == 2.0


@settings(max_examples=100)
@given(st.floats(1.0, 1e12), st.floats(1.0, 1e12), st.sampled_from([2.0, 4.0, 0.5, 1024.0]))
def test_mas_scale_invariant(a, b, k):
    assert mas(BandwidthSpec(k * a, k * b)) == mas(BandwidthSpec(a, b))


def test_bandwidth_validation():
    with pytest.raises(ValueError):
        BandwidthSpec(0.0, 1.0)


def test_predicted_speedup_examples():
    big = PartitionConfig(3, 1, 1)
    assert predict_speedup(big, GRID_SHAPE, efficiency=0.732) == pytest.approx(3.574, abs=5e-4)
    assert predict_speedup(big, GRID_SHAPE, efficiency=1.0) == mas(TABLE_SPEC)
    with pytest.raises(ValueError):
        predict_speedup(big, GRID_SHAPE, efficiency=0.0)


def test_small_blocks_fall_below_floor():
    at_floor = predict_speedup(PartitionConfig(1, 1, 1), (64, 64, 64), efficiency=0.732)
    below = predict_speedup(PartitionConfig(2, 1, 1), (64, 64, 64), efficiency=0.732)
    assert below < at_floor
    assert below == pytest.approx(at_floor / 2)


@settings(max_examples=100)
@given(st.integers(1, 8), st.sampled_from([1, 3, 5, 7]), st.floats(0.01, 1.0))
def test_prediction_never_exceeds_mas_and_falls_with_ranks(nx, nyz, eff):
    cfg = PartitionConfig(nx, nyz, nyz)
    more = PartitionConfig(nx + 1, nyz, nyz)
    value = predict_speedup(cfg, GRID_SHAPE, efficiency=eff)
    assert value <= mas(TABLE_SPEC)
    assert predict_speedup(more, GRID_SHAPE, efficiency=eff) <= value


def test_aggregate_examples():
    one = StepTiming(0, 0, 1.5, 0.25)
    s = aggregate([one])
    assert (s.mean_compute, s.mean_transfer, s.records) == (1.5, 0.25, 1)
    assert aggregate([StepTiming(0, 0, 1.0, 0.0), StepTiming(1, 0, 3.0, 0.0)]).mean_compute == 2.0
    with pytest.raises(ValueError):
        aggregate([])
    with pytest.raises(ValueError):
        StepTiming(0, 0, -1.0, 0.0)


@settings(max_examples=50)
@given(st.lists(st.tuples(st.floats(0, 100), st.floats(0, 100)), min_size=1, max_size=40))
def test_aggregate_equals_brute_force_mean(pairs):
    records = [StepTiming(i % 3, i, c, t) for i, (c, t) in enumerate(pairs)]
    s = aggregate(records)
    compute = 0.0
    transfer = 0.0
    for c, t in pairs:
        compute += c
        transfer += t
    assert s.mean_compute == pytest.approx(compute / len(pairs), rel=1e-12, abs=1e-300)
    assert s.mean_transfer == pytest.approx(transfer / len(pairs), rel=1e-12, abs=1e-300)


def test_report_rows_cover_standard_configs():
    grid = build_default_grid()
    rows = [report_row(PartitionConfig(*c), grid, 6) for c in STANDARD_CONFIGS]
    assert all(tuple(r) == REPORT_FIELDS for r in rows)
    assert [r["ranks"] for r in rows] == [4, 28, 37, 55, 101, 151]
    assert rows[0]["predicted_speedup"] == pytest.approx(3.574, abs=5e-4)
    # the 6x5x5 blocks hold 26x30x30 cells, well under the 64^3 floor
    assert rows[-1]["predicted_speedup"] == pytest.approx(mas(TABLE_SPEC) * 0.732 * 26 * 30 * 30 / WORKLOAD_FLOOR)
