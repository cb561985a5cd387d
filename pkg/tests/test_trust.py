"""Trust metrics, the weighted blend, and classification."""

import math

import pytest
from hypothesis import given, strategies as st

from tcaco.trust import (MALICIOUS_NODE, TRUSTED_NODE, TRUSTWORTHY, UNTRUSTED,
                         TrustStats, ZeroWeights, classify, compute_trust,
                         energy_metric, latency_score,
                         packet_transmission_ratio)

unit = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


def make_stats(sent=0, acked=0, latencies=(), link=(0, 1)):
    stats = TrustStats()
    i, j = link
    for _ in range(sent):
        stats.record_send(i, j)
    for _ in range(acked):
        stats.record_ack(i, j)
    for value in latencies:
        stats.record_latency(i, j, value)
    return stats


class TestTransmissionRatio:
    def test_partial_acks(self):
        stats = make_stats(sent=10, acked=8)
        assert packet_transmission_ratio(stats, 0, 1) == pytest.approx(0.8, abs=1e-9)

    def test_perfect_link(self):
        stats = make_stats(sent=5, acked=5)
        assert packet_transmission_ratio(stats, 0, 1) == 1.0

    def test_no_evidence_bootstraps_to_one(self):
        assert packet_transmission_ratio(TrustStats(), 0, 1) == 1.0

    def test_more_acks_than_sends_rejected(self):
        stats = make_stats(sent=1, acked=1)
        with pytest.raises(RuntimeError):
            stats.record_ack(0, 1)


class TestLatencyScore:
    def test_faster_than_peers_capped_at_one(self):
        stats = TrustStats()
        stats.record_latency(0, 1, 2.0)
        stats.record_latency(0, 2, 4.0)
        assert latency_score(stats, 0, 1, peers=[2]) == 1.0  # min(1, 4/2)

    def test_slower_than_peers(self):
        stats = TrustStats()
        stats.record_latency(0, 1, 8.0)
        stats.record_latency(0, 2, 4.0)
        assert latency_score(stats, 0, 1, peers=[2]) == pytest.approx(0.5, abs=1e-9)

    def test_no_samples_bootstraps_to_one(self):
        assert latency_score(TrustStats(), 0, 1, peers=[2]) == 1.0

    def test_zero_latency_scores_one(self):
        stats = TrustStats()
        stats.record_latency(0, 1, 0.0)
        stats.record_latency(0, 2, 4.0)
        assert latency_score(stats, 0, 1, peers=[2]) == 1.0

    def test_literal_polarity_rewards_slow(self):
        stats = TrustStats()
        stats.record_latency(0, 1, 2.0)
        stats.record_latency(0, 2, 4.0)
        assert latency_score(stats, 0, 1, [2], polarity="literal") == pytest.approx(0.5)
        stats2 = TrustStats()
        stats2.record_latency(0, 1, 8.0)
        stats2.record_latency(0, 2, 4.0)
        assert latency_score(stats2, 0, 1, [2], polarity="literal") == 1.0  # clamped

    def test_reference_used_when_no_peer_evidence(self):
        stats = TrustStats()
        stats.record_latency(0, 1, 6.0)
        assert latency_score(stats, 0, 1, peers=[2]) == 1.0
        assert latency_score(stats, 0, 1, peers=[2], reference=3.0) == pytest.approx(0.5)

    def test_unbounded_latency_scores_zero(self):
        stats = TrustStats()
        stats.record_latency(0, 1, math.inf)
        stats.record_latency(0, 2, 4.0)
        assert latency_score(stats, 0, 1, peers=[2]) == 0.0
        # even without peers, with only a reference
        stats2 = TrustStats()
        stats2.record_latency(0, 1, math.inf)
        assert latency_score(stats2, 0, 1, peers=[], reference=3.0) == 0.0

    def test_peer_with_unbounded_latency_makes_finite_look_fast(self):
        stats = TrustStats()
        stats.record_latency(0, 1, 5.0)
        stats.record_latency(0, 2, math.inf)
        assert latency_score(stats, 0, 1, peers=[2]) == 1.0


class TestEnergyMetric:
    def test_full_batteries(self):
        assert energy_metric(1.0, 1.0, 1.0) == 1.0

    def test_half(self):
        assert energy_metric(1.0, 0.0, 1.0) == pytest.approx(0.5, abs=1e-9)

    def test_empty(self):
        assert energy_metric(0.0, 0.0, 1.0) == 0.0

    def test_normalized_by_initial(self):
        assert energy_metric(0.5, 0.5, 2.0) == pytest.approx(0.25, abs=1e-9)


class TestComputeTrust:
    def test_equal_weights_mean(self):
        assert compute_trust(0.6, 0.8, 0.4, 1, 1, 1) == pytest.approx(0.6, abs=1e-9)

    def test_all_ones_any_weights(self):
        assert compute_trust(1, 1, 1, 0.3, 0.9, 0.05) == pytest.approx(1.0, abs=1e-9)

    def test_scaled_weights(self):
        assert compute_trust(0.5, 1.0, 0.0, 1.0, 0.5, 0.5) == pytest.approx(0.5, abs=1e-9)

    def test_zero_weights_raise(self):
        with pytest.raises(ZeroWeights):
            compute_trust(0.5, 0.5, 0.5, 0, 0, 0)

    @given(unit, unit, unit, unit, unit, unit,
           st.floats(min_value=0.01, max_value=100))
    def test_weight_scaling_invariance(self, ne, ptr, pl, a1, a2, a3, k):
        if a1 + a2 + a3 == 0:
            return
        base = compute_trust(ne, ptr, pl, a1, a2, a3)
        scaled = compute_trust(ne, ptr, pl, k * a1, k * a2, k * a3)
        assert scaled == pytest.approx(base, abs=1e-9)

    @given(unit, unit, unit, unit)
    def test_monotone_in_each_metric(self, ne, ptr, pl, bump):
        hi = min(1.0, ne + bump)
        assert compute_trust(hi, ptr, pl, 1, 1, 1) >= compute_trust(ne, ptr, pl, 1, 1, 1) - 1e-12

    @given(unit, unit, unit, unit, unit, unit)
    def test_result_in_unit_interval(self, ne, ptr, pl, a1, a2, a3):
        if a1 + a2 + a3 == 0:
            return
        t = compute_trust(ne, ptr, pl, a1, a2, a3)
        assert -1e-12 <= t <= 1.0 + 1e-12


class TestClassify:
    def test_strictly_above_threshold_is_trustworthy(self):
        links, nodes = classify({(0, 1): 0.51}, 0.5)
        assert links[(0, 1)] == TRUSTWORTHY
        assert nodes[1] == TRUSTED_NODE

    def test_equality_is_untrusted(self):
        links, nodes = classify({(0, 1): 0.5}, 0.5)
        assert links[(0, 1)] == UNTRUSTED
        assert nodes[1] == MALICIOUS_NODE

    def test_node_with_no_trustworthy_incoming_link_is_malicious(self):
        table = {(0, 2): 0.3, (1, 2): 0.4, (2, 0): 0.9, (2, 1): 0.9}
        links, nodes = classify(table, 0.5)
        assert nodes[2] == MALICIOUS_NODE
        assert nodes[0] == TRUSTED_NODE and nodes[1] == TRUSTED_NODE

    def test_pure_function(self):
        table = {(0, 1): 0.7, (1, 0): 0.2}
        assert classify(table, 0.5) == classify(table, 0.5)


def test_drop_all_link_converges_untrusted():
    """A never-acknowledging neighbor loses the link and the node verdict."""
    stats = TrustStats()
    table = {}
    for cycle in range(1, 30):
        for _ in range(5):
            stats.record_send(0, 1)
            stats.record_latency(0, 1, math.inf)
        ptr = packet_transmission_ratio(stats, 0, 1)
        pl = latency_score(stats, 0, 1, peers=[2], reference=3.0)
        table[(0, 1)] = compute_trust(1.0, ptr, pl, 1, 1, 1)
    assert packet_transmission_ratio(stats, 0, 1) == 0.0
    assert table[(0, 1)] < 0.5
    _, nodes = classify(table, 0.5)
    assert nodes[1] == MALICIOUS_NODE
