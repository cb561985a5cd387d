"""Queues, wait-cycle aging, flow averages, and the congestion index."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from tcaco.congestion import (FlowHistory, InsufficientHistory, NodeQueue,
                              enqueue, tick_wait_and_drop)
from tcaco.model import DROPPED_OVERFLOW, DROPPED_TIMEOUT, Packet


def pkt(pid=0):
    return Packet(pid, origin=0, created_cycle=1)


class TestQueue:
    def test_enqueue_into_empty(self):
        q = NodeQueue(10)
        assert enqueue(q, pkt())
        assert len(q) == 1

    def test_overflow_rejected_with_fate(self):
        q = NodeQueue(1)
        assert enqueue(q, pkt(0))
        p2 = pkt(1)
        assert not enqueue(q, p2)
        assert p2.fate == DROPPED_OVERFLOW
        assert len(q) == 1

    def test_reset_wait_on_enqueue(self):
        q = NodeQueue(4)
        p = pkt()
        p.wait_cycles = 2
        enqueue(q, p)
        assert p.wait_cycles == 0

    def test_unbounded_never_full(self):
        q = NodeQueue(1, unbounded=True)
        for k in range(5):
            assert enqueue(q, pkt(k))
        assert not q.full
        assert q.free_space() == 0

    def test_fifo_order_preserved(self):
        q = NodeQueue(5)
        packets = [pkt(k) for k in range(4)]
        for p in packets:
            enqueue(q, p)
        tick_wait_and_drop(q, wc_max=3)
        assert [p.id for p in q.entries] == [0, 1, 2, 3]


class TestTick:
    def test_below_horizon_retained(self):
        q = NodeQueue(5)
        p = pkt()
        enqueue(q, p)
        p.wait_cycles = 2
        dropped = tick_wait_and_drop(q, wc_max=3)
        assert dropped == []
        assert p.wait_cycles == 3

    def test_at_horizon_dropped(self):
        q = NodeQueue(5)
        p = pkt()
        enqueue(q, p)
        p.wait_cycles = 3
        dropped = tick_wait_and_drop(q, wc_max=3)
        assert dropped == [p]
        assert p.fate == DROPPED_TIMEOUT
        assert len(q) == 0

    def test_empty_queue_returns_nothing(self):
        assert tick_wait_and_drop(NodeQueue(3), wc_max=3) == []

    def test_wait_never_exceeds_horizon(self):
        q = NodeQueue(8)
        for k in range(6):
            enqueue(q, pkt(k))
        for _ in range(10):
            tick_wait_and_drop(q, wc_max=3)
            assert all(p.wait_cycles <= 3 for p in q.entries)

    def test_hold_counts_down(self):
        q = NodeQueue(5)
        p = pkt()
        p.hold_cycles = 2
        enqueue(q, p)
        tick_wait_and_drop(q, wc_max=5)
        assert p.hold_cycles == 1


def history_from(inflows, outflows, frees):
    """Build a FlowHistory for one node from per-cycle columns."""
    h = FlowHistory(1)
    for a, b, f in zip(inflows, outflows, frees):
        h.record_cycle([a], [b], [f])
    return h


class TestFlowAverages:
    def test_avg_inflow_two_cycles(self):
        h = history_from([4, 6], [0, 0], [10, 10])
        assert h.avg_inflow(0, 3) == pytest.approx(5.0, abs=1e-12)

    def test_avg_inflow_single_cycle(self):
        h = history_from([7], [0], [10])
        assert h.avg_inflow(0, 2) == pytest.approx(7.0, abs=1e-12)

    def test_all_zero_history(self):
        h = history_from([0, 0, 0], [0, 0, 0], [10, 10, 10])
        assert h.avg_inflow(0, 4) == 0.0
        assert h.avg_outflow(0, 4) == 0.0

    def test_avg_outflow_values(self):
        h = history_from([0, 0], [2, 4], [10, 10])
        assert h.avg_outflow(0, 3) == pytest.approx(3.0, abs=1e-12)
        h2 = history_from([0], [10], [10])
        assert h2.avg_outflow(0, 2) == pytest.approx(10.0, abs=1e-12)

    def test_history_required(self):
        h = FlowHistory(1)
        with pytest.raises(InsufficientHistory):
            h.avg_inflow(0, 1)
        with pytest.raises(InsufficientHistory):
            h.avg_outflow(0, 1)
        h.record_cycle([1], [1], [5])
        with pytest.raises(InsufficientHistory):
            h.avg_inflow(0, 3)  # cycle 3 needs two completed cycles


class TestCongestionIndex:
    def test_bootstrap_zero_before_history(self):
        assert FlowHistory(1).congestion_index(0, 1) == 0.0

    def test_hand_value(self):
        # r_in 5, free space 1, r_out 3 -> (5+1-3)/(5+1)
        h = history_from([5], [3], [1])
        assert h.congestion_index(0, 2) == pytest.approx(0.5, abs=1e-12)

    def test_numerator_vanishes(self):
        # r_out equals r_in + free space
        h = history_from([2], [4], [2])
        assert h.congestion_index(0, 2) == 0.0

    def test_nothing_leaves_is_fully_congested(self):
        h = history_from([3], [0], [4])
        assert h.congestion_index(0, 2) == 1.0

    def test_negative_clamped_to_zero(self):
        # draining faster than absorbing: (1+1-5)/(1+1) < 0
        h = history_from([1], [5], [1])
        assert h.congestion_index(0, 2) == 0.0

    def test_zero_denominator_is_zero(self):
        h = history_from([0], [0], [0])
        assert h.congestion_index(0, 2) == 0.0

    def test_in_unit_interval(self):
        rng = random.Random(5)
        h = FlowHistory(1)
        for _ in range(50):
            h.record_cycle([rng.randrange(20)], [rng.randrange(20)], [rng.randrange(11)])
        for c in range(2, 51):
            assert 0.0 <= h.congestion_index(0, c) <= 1.0


def replay_congestion_index(inflows, outflows, frees, k, c, window=None):
    """Independent oracle: direct evaluation over the raw trace."""
    completed = c - 1
    start = 0 if window is None else max(0, completed - window)
    span = completed - start
    if span <= 0:
        return 0.0
    r_in = sum(inflows[k][start:completed]) / span
    r_out = sum(outflows[k][start:completed]) / span
    q_prev = frees[k][completed - 1]
    denom = r_in + q_prev
    if denom <= 0:
        return 0.0
    return min(1.0, max(0.0, (r_in + q_prev - r_out) / denom))


trace = st.integers(min_value=2, max_value=20).flatmap(
    lambda cycles: st.integers(min_value=1, max_value=5).flatmap(
        lambda nodes: st.tuples(
            st.just(nodes),
            st.lists(
                st.tuples(
                    st.lists(st.integers(0, 30), min_size=nodes, max_size=nodes),
                    st.lists(st.integers(0, 30), min_size=nodes, max_size=nodes),
                    st.lists(st.integers(0, 10), min_size=nodes, max_size=nodes),
                ),
                min_size=cycles, max_size=cycles,
            ),
        )
    )
)


@settings(max_examples=200, deadline=None)
@given(trace, st.sampled_from([None, 1, 3, 8]))
def test_incremental_matches_replay_exactly(data, window):
    nodes, rows = data
    h = FlowHistory(nodes, window=window)
    inflows = [[] for _ in range(nodes)]
    outflows = [[] for _ in range(nodes)]
    frees = [[] for _ in range(nodes)]
    for a, b, f in rows:
        h.record_cycle(a, b, f)
        for k in range(nodes):
            inflows[k].append(a[k])
            outflows[k].append(b[k])
            frees[k].append(f[k])
    c = len(rows) + 1
    for k in range(nodes):
        assert h.congestion_index(k, c) == replay_congestion_index(
            inflows, outflows, frees, k, c, window)
