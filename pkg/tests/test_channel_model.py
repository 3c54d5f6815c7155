import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from secure_harq.channel_model import (
    ChannelRealization,
    FadingSpec,
    OutageFlags,
    Protocol,
    SystemParams,
    WynerRates,
    acc_mi_inr,
    acc_mi_prefix,
    acc_mi_rtd,
    db_to_linear,
    outage_flags,
    sample_snrs,
)


@pytest.mark.parametrize("db, expected, tol", [(0, 1.0, 0.0), (15, 31.6228, 1e-4), (5, 3.16228, 1e-5)])
def test_db_to_linear(db, expected, tol):
    assert db_to_linear(db) == pytest.approx(expected, abs=tol)


def test_db_to_linear_rejects_nonfinite():
    with pytest.raises(ValueError):
        db_to_linear(float("nan"))


class TestTypes:
    def test_fading_spec_positive(self):
        with pytest.raises(ValueError):
            FadingSpec(0.0)
        with pytest.raises(ValueError):
            FadingSpec(-1.0)

    def test_system_params_ceiling(self):
        spec = FadingSpec(1.0)
        SystemParams(1024, spec, spec)
        with pytest.raises(ValueError):
            SystemParams(1025, spec, spec)
        with pytest.raises(ValueError):
            SystemParams(0, spec, spec)
        SystemParams(2000, spec, spec, max_tx_ceiling=2048)

    @pytest.mark.parametrize("r0, rs", [(1.0, 1.5), (1.0, -0.1), (float("inf"), 0.0)])
    def test_wyner_rates_invalid(self, r0, rs):
        with pytest.raises(ValueError):
            WynerRates(r0, rs)

    def test_realization_shapes(self):
        with pytest.raises(ValueError):
            ChannelRealization(np.ones(3), np.ones(4))
        with pytest.raises(ValueError):
            ChannelRealization(np.array([1.0, -1.0]), np.ones(2))
        real = ChannelRealization([1.0, 2.0], [0.0, 0.0])
        assert real.max_tx == 2
        with pytest.raises(ValueError):
            real.main_snrs[0] = 5.0


class TestSampling:
    def test_empty(self):
        assert sample_snrs(FadingSpec(2.0), 0, np.random.default_rng(0)).shape == (0,)

    def test_mean(self):
        # sigma / sqrt(n) = 2e-3, so [1.99, 2.01] is a 5-sigma window
        x = sample_snrs(FadingSpec(2.0), 10**6, np.random.default_rng(1))
        assert 1.99 <= x.mean() <= 2.01
        assert x.min() >= 0

    def test_deterministic(self):
        a = sample_snrs(FadingSpec(3.0), 100, np.random.default_rng(5))
        b = sample_snrs(FadingSpec(3.0), 100, np.random.default_rng(5))
        np.testing.assert_array_equal(a, b)

    def test_partition_independent(self):
        spec = FadingSpec(3.0)
        whole = sample_snrs(spec, 1000, np.random.default_rng(9))
        rng = np.random.default_rng(9)
        parts = np.concatenate([sample_snrs(spec, k, rng) for k in (1, 10, 289, 700)])
        np.testing.assert_array_equal(whole, parts)


class TestAccumulatedMI:
    def test_zero_blocks(self):
        assert acc_mi_inr(0, 4, [5.0] * 4) == 0.0
        assert acc_mi_rtd(0, 4, [5.0] * 4) == 0.0

    def test_inr_direct(self):
        assert acc_mi_inr(2, 4, [1.0, 3.0, 7.0, 7.0]) == pytest.approx(0.375, abs=1e-15)

    def test_inr_eight_blocks(self):
        # 0.5 * log2(32.6228), evaluated with mpmath at 30 digits
        assert acc_mi_inr(8, 8, [31.6228] * 8) == pytest.approx(2.5139043540533948, abs=1e-12)

    def test_rtd_direct(self):
        assert acc_mi_rtd(3, 3, [1.0, 1.0, 1.0]) == pytest.approx(1 / 3, abs=1e-15)

    def test_rtd_eight_blocks(self):
        # log2(1 + 8 * 31.6228) / 16, mpmath at 30 digits
        assert acc_mi_rtd(8, 8, [31.6228] * 8) == pytest.approx(0.4992865448148786, abs=1e-12)

    def test_single_block_protocols_agree(self):
        snrs = [4.2, 1.0, 0.3]
        assert acc_mi_rtd(1, 3, snrs) == acc_mi_inr(1, 3, snrs)

    @pytest.mark.parametrize("m, M, n", [(-1, 3, 3), (4, 3, 4), (2, 3, 2), (0, 0, 0)])
    def test_out_of_range(self, m, M, n):
        with pytest.raises(ValueError):
            acc_mi_inr(m, M, [1.0] * n)
        with pytest.raises(ValueError):
            acc_mi_rtd(m, M, [1.0] * n)

    def test_prefix_matches_scalar(self):
        rng = np.random.default_rng(3)
        snrs = rng.exponential(5.0, 6)
        for protocol, scalar in ((Protocol.INR, acc_mi_inr), (Protocol.RTD, acc_mi_rtd)):
            pref = acc_mi_prefix(protocol, snrs)
            for m in range(1, 7):
                assert pref[m - 1] == pytest.approx(scalar(m, 6, snrs), rel=1e-13)


snr_vectors = st.lists(st.floats(0.0, 1e4, allow_nan=False), min_size=1, max_size=12)


@settings(max_examples=200, deadline=None)
@given(snr_vectors)
def test_inr_dominates_rtd(snrs):
    M = len(snrs)
    for m in range(M + 1):
        inr, rtd = acc_mi_inr(m, M, snrs), acc_mi_rtd(m, M, snrs)
        assert inr >= rtd - 1e-12
        if sum(1 for s in snrs[:m] if s > 0) <= 1:
            assert inr == pytest.approx(rtd, rel=1e-12, abs=1e-15)


@settings(max_examples=200, deadline=None)
@given(snr_vectors)
def test_monotone_in_m(snrs):
    M = len(snrs)
    for fn in (acc_mi_inr, acc_mi_rtd):
        values = [fn(m, M, snrs) for m in range(M + 1)]
        assert all(b >= a for a, b in zip(values, values[1:]))


@settings(max_examples=100, deadline=None)
@given(snr_vectors, st.integers(2, 6))
def test_scales_as_one_over_m(snrs, factor):
    M = len(snrs)
    padded = snrs + [0.0] * (M * (factor - 1))
    for fn in (acc_mi_inr, acc_mi_rtd):
        for m in range(M + 1):
            assert fn(m, M * factor, padded) == pytest.approx(fn(m, M, snrs) / factor, rel=1e-12, abs=1e-15)


class TestOutageFlags:
    def test_silent_eavesdropper(self):
        real = ChannelRealization([3.0, 3.0], [0.0, 0.0])
        for m in (1, 2):
            flags = outage_flags("inr", WynerRates(1.0, 1.0), real, m)
            assert flags.secrecy_outage is False

    def test_zero_rate_never_fails(self):
        real = ChannelRealization([0.0, 0.0, 0.0], [1.0, 2.0, 3.0])
        for protocol in ("rtd", "inr"):
            for m in (1, 2, 3):
                assert not outage_flags(protocol, WynerRates(0.0, 0.0), real, m).connection_outage

    def test_inr_connection_outage(self):
        # accumulated MI is 2.514 < 2.6
        real = ChannelRealization([31.6228] * 8, [0.0] * 8)
        flags = outage_flags(Protocol.INR, WynerRates(2.6, 0.0), real, 8)
        assert flags == OutageFlags(connection_outage=True, secrecy_outage=False)

    def test_boundary_is_not_outage(self):
        # M=1, SNR 3: MI = 0.5 * log2(4) = 1 exactly
        real = ChannelRealization([3.0], [3.0])
        flags = outage_flags("rtd", WynerRates(1.0, 0.0), real, 1)
        assert flags == OutageFlags(False, False)

    def test_both_flags_can_be_set(self):
        real = ChannelRealization([0.0], [100.0])
        assert outage_flags("inr", WynerRates(1.0, 0.5), real, 1) == OutageFlags(True, True)

    def test_range(self):
        real = ChannelRealization([1.0], [1.0])
        with pytest.raises(ValueError):
            outage_flags("inr", WynerRates(1.0, 0.0), real, 2)
        with pytest.raises(ValueError):
            outage_flags("inr", WynerRates(1.0, 0.0), real, 0)


def test_protocol_parse():
    assert Protocol.parse("INR") is Protocol.INR
    assert Protocol.parse(Protocol.RTD) is Protocol.RTD
    with pytest.raises(ValueError):
        Protocol.parse("harq")


def test_log_base_is_two():
    # one block at SNR 1 carries half a bit when M = 1
    assert acc_mi_inr(1, 1, [1.0]) == pytest.approx(0.5)
    assert math.isclose(acc_mi_rtd(1, 1, [1.0]), 0.5)
