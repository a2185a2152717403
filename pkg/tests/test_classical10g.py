"""Receiver sensitivity model for the data channels."""

import pytest
from hypothesis import given, strategies as st

from qkdmux.classical10g import (
    TransceiverSpec,
    adapted_launch_dbm,
    ber_at_power,
    ber_for_q_factor,
    error_free,
    q_factor_for_ber,
    received_power_dbm,
)
from qkdmux.errors import ParameterError
from qkdmux.linkmodel import ComponentLoss, FiberSpec, LinkBudget

from oracles import erfc_bisect_inverse

TRX = TransceiverSpec()


class TestQFactor:
    def test_reference_q_near_seven(self):
        assert TRX.q_reference == pytest.approx(7.03, abs=0.01)

    def test_against_bisection_oracle(self):
        for ber in (1.0e-12, 1.0e-9, 1.0e-3):
            want = 2.0 ** 0.5 * erfc_bisect_inverse(2.0 * ber)
            assert q_factor_for_ber(ber) == pytest.approx(want, rel=1e-9)

    @given(st.floats(min_value=1.0e-15, max_value=0.4))
    def test_round_trip(self, ber):
        assert ber_for_q_factor(q_factor_for_ber(ber)) == pytest.approx(ber, rel=1e-6)

    def test_validation(self):
        with pytest.raises(ParameterError):
            q_factor_for_ber(0.0)
        with pytest.raises(ParameterError):
            q_factor_for_ber(0.5)
        with pytest.raises(ParameterError):
            ber_for_q_factor(-1.0)

    def test_zero_q_is_coin_flip(self):
        assert ber_for_q_factor(0.0) == pytest.approx(0.5, rel=1e-12)


class TestBerCurve:
    def test_threshold_at_sensitivity(self):
        assert ber_at_power(-27.0, TRX) == pytest.approx(1.0e-12, rel=1e-6)

    def test_deep_fade_approaches_coin_flip(self):
        assert ber_at_power(-80.0, TRX) == pytest.approx(0.5, abs=0.01)

    def test_strictly_decreasing_in_power(self):
        points = [ber_at_power(p, TRX) for p in (-40.0, -35.0, -30.0, -27.0, -25.0)]
        assert all(b < a for a, b in zip(points, points[1:]))

    def test_one_db_above_sensitivity_is_far_below_threshold(self):
        assert ber_at_power(-26.0, TRX) < 1.0e-14


class TestErrorFree:
    def test_at_sensitivity(self):
        assert error_free(-27.0, TRX)

    def test_below(self):
        assert not error_free(-30.0, TRX)

    def test_above(self):
        assert error_free(-20.0, TRX)

    def test_float_guard(self):
        assert error_free(-27.0 - 1.0e-12, TRX)
        assert not error_free(-27.1, TRX)


class TestReceivedPower:
    def test_subtracts_loss(self):
        assert received_power_dbm(0.0, 13.0) == -13.0

    def test_rejects_negative_loss(self):
        with pytest.raises(ParameterError):
            received_power_dbm(0.0, -1.0)


def _budget(length_km, mux_db=1.5, demux_db=1.5):
    return LinkBudget(
        fiber=FiberSpec(length_km=length_km),
        components=(ComponentLoss("mux", mux_db), ComponentLoss("demux", demux_db)),
    )


class TestAdaptedLaunch:
    def test_fifty_km_link(self):
        # 10 dB of fiber plus 3 dB of mux/demux: the laser idles at -14 dBm.
        assert adapted_launch_dbm(_budget(50.0), TRX) == pytest.approx(-14.0, abs=1e-9)

    def test_zero_loss_sits_at_sensitivity(self):
        budget = LinkBudget(fiber=FiberSpec(length_km=0.0))
        assert adapted_launch_dbm(budget, TRX) == pytest.approx(-27.0, abs=1e-12)

    def test_margin_adds(self):
        assert adapted_launch_dbm(_budget(50.0), TRX, margin_db=3.0) == pytest.approx(-11.0, abs=1e-9)

    def test_negative_margin_rejected(self):
        with pytest.raises(ParameterError):
            adapted_launch_dbm(_budget(50.0), TRX, margin_db=-1.0)

    def test_loss_beyond_ceiling_raises(self):
        # 160 km of fiber needs 32 + 3 dB: 8 dBm is above the 5 dBm ceiling.
        with pytest.raises(ParameterError):
            adapted_launch_dbm(_budget(160.0), TRX)

    def test_adapted_launch_closes_the_link_exactly(self):
        budget = _budget(50.0)
        launch = adapted_launch_dbm(budget, TRX)
        assert error_free(received_power_dbm(launch, budget.total_db), TRX)
        # A tenth of a dB less and the link no longer closes.
        assert not error_free(received_power_dbm(launch - 0.1, budget.total_db), TRX)


class TestTransceiverSpec:
    def test_validation(self):
        with pytest.raises(ParameterError):
            TransceiverSpec(bitrate_gbps=0.0)
        with pytest.raises(ParameterError):
            TransceiverSpec(ber_threshold=0.6)
        with pytest.raises(ParameterError):
            TransceiverSpec(sensitivity_dbm=-10.0, max_launch_dbm=-20.0)
