"""Codeword, channel and readout behaviour for both encoding families."""

import numpy as np
import pytest

from dfq.encoding import (
    X_DP,
    X_R,
    Z_DP,
    Z_R,
    BasisKind,
    EncodingFamily,
    LogicalValue,
    apply_collective_dephasing,
    apply_collective_rotation,
    apply_family_noise,
    apply_readout,
    basis_for,
    decode_pair,
    measure_logical,
    prepare,
    sift_measure_and_resend,
)
from dfq.statevector import (
    StateVector,
    apply_single,
    equal_up_to_global_phase,
    new_basis_state,
    rz,
    ry,
    tensor,
)

S2 = 1.0 / np.sqrt(2.0)

# Frozen amplitude oracles, basis order |00>, |01>, |10>, |11>.
CODEWORDS = {
    (EncodingFamily.DEPHASING, LogicalValue.ZERO): [0, 1, 0, 0],
    (EncodingFamily.DEPHASING, LogicalValue.ONE): [0, 0, 1, 0],
    (EncodingFamily.DEPHASING, LogicalValue.PLUS): [0, S2, S2, 0],
    (EncodingFamily.DEPHASING, LogicalValue.MINUS): [0, S2, -S2, 0],
    (EncodingFamily.ROTATION, LogicalValue.ZERO): [S2, 0, 0, S2],
    (EncodingFamily.ROTATION, LogicalValue.ONE): [0, S2, -S2, 0],
    (EncodingFamily.ROTATION, LogicalValue.PLUS): [0.5, 0.5, -0.5, 0.5],
    (EncodingFamily.ROTATION, LogicalValue.MINUS): [0.5, -0.5, 0.5, 0.5],
}


@pytest.mark.parametrize("family", list(EncodingFamily))
@pytest.mark.parametrize("value", list(LogicalValue))
def test_codeword_amplitudes(family, value):
    state = prepare(family, value)
    np.testing.assert_allclose(state.amps, CODEWORDS[(family, value)], atol=1e-12)


def test_rotation_x_codewords_are_bell_combinations():
    # |+_L> and |-_L> of the rotation family are (|0_L> +/- |1_L>)/sqrt(2)
    zero = prepare(EncodingFamily.ROTATION, LogicalValue.ZERO).amps
    one = prepare(EncodingFamily.ROTATION, LogicalValue.ONE).amps
    np.testing.assert_allclose(
        prepare(EncodingFamily.ROTATION, LogicalValue.PLUS).amps,
        (zero + one) * S2,
        atol=1e-12,
    )
    np.testing.assert_allclose(
        prepare(EncodingFamily.ROTATION, LogicalValue.MINUS).amps,
        (zero - one) * S2,
        atol=1e-12,
    )


class TestCollectiveChannels:
    def test_dephasing_channel_is_rz_on_each_qubit(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            theta = rng.uniform(0, 2 * np.pi)
            amps = rng.normal(size=4) + 1j * rng.normal(size=4)
            state = StateVector(amps / np.linalg.norm(amps))
            via_channel = apply_collective_dephasing(state, theta)
            by_hand = apply_single(apply_single(state, rz(theta), 1), rz(theta), 2)
            np.testing.assert_allclose(via_channel.amps, by_hand.amps, atol=1e-12)

    def test_rotation_channel_is_ry_double_angle_on_each_qubit(self):
        rng = np.random.default_rng(6)
        for _ in range(10):
            theta = rng.uniform(0, 2 * np.pi)
            amps = rng.normal(size=4) + 1j * rng.normal(size=4)
            state = StateVector(amps / np.linalg.norm(amps))
            via_channel = apply_collective_rotation(state, theta)
            by_hand = apply_single(apply_single(state, ry(2 * theta), 1), ry(2 * theta), 2)
            np.testing.assert_allclose(via_channel.amps, by_hand.amps, atol=1e-12)

    def test_dephasing_codewords_invariant_up_to_phase(self):
        rng = np.random.default_rng(7)
        for value in LogicalValue:
            state = prepare(EncodingFamily.DEPHASING, value)
            for theta in rng.uniform(0, 2 * np.pi, 25):
                noisy = apply_collective_dephasing(state, theta)
                assert equal_up_to_global_phase(state, noisy, 1e-10)

    def test_rotation_codewords_exactly_invariant(self):
        rng = np.random.default_rng(8)
        for value in LogicalValue:
            state = prepare(EncodingFamily.ROTATION, value)
            for theta in rng.uniform(0, 2 * np.pi, 25):
                noisy = apply_collective_rotation(state, theta)
                np.testing.assert_allclose(noisy.amps, state.amps, atol=1e-10)

    def test_dephasing_exact_phases(self):
        theta = 1.234
        # |01> and |10> pick up exactly e^{i theta}; |00> is untouched
        noisy = apply_collective_dephasing(
            prepare(EncodingFamily.DEPHASING, LogicalValue.ZERO), theta
        )
        np.testing.assert_allclose(noisy.amps[1], np.exp(1j * theta), atol=1e-12)
        minus = prepare(EncodingFamily.DEPHASING, LogicalValue.MINUS)
        noisy = apply_collective_dephasing(minus, theta)
        np.testing.assert_allclose(noisy.amps, np.exp(1j * theta) * minus.amps, atol=1e-12)
        trivial = apply_collective_dephasing(new_basis_state(2, 0), theta)
        np.testing.assert_allclose(trivial.amps, [1, 0, 0, 0], atol=1e-12)

    def test_quarter_turn_rotation_flips_both_qubits(self):
        noisy = apply_collective_rotation(new_basis_state(2, 0), np.pi / 2)
        np.testing.assert_allclose(noisy.amps, [0, 0, 0, 1], atol=1e-12)

    def test_family_noise_dispatch(self):
        state = prepare(EncodingFamily.DEPHASING, LogicalValue.ZERO)
        a = apply_family_noise(state, EncodingFamily.DEPHASING, 0.3)
        b = apply_collective_dephasing(state, 0.3)
        np.testing.assert_allclose(a.amps, b.amps)

    def test_channels_act_on_first_two_qubits_of_three(self):
        # a bystander probe qubit must be left alone
        pair = prepare(EncodingFamily.DEPHASING, LogicalValue.PLUS)
        joint = tensor(pair, new_basis_state(1, 1))
        noisy = apply_collective_dephasing(joint, 1.1)
        # all amplitude stays on odd indices (probe = 1)
        np.testing.assert_allclose(noisy.amps[::2], 0, atol=1e-12)


class TestReadout:
    @pytest.mark.parametrize(
        "family,value",
        [(f, v) for f in EncodingFamily for v in LogicalValue],
    )
    def test_roundtrip_measurement(self, family, value):
        basis = basis_for(family, value)
        rng = np.random.default_rng(11)
        for _ in range(8):
            outcome = measure_logical(prepare(family, value), basis, rng)
            assert outcome.value is value
            assert not outcome.is_invalid

    @pytest.mark.parametrize(
        "family,value",
        [(f, v) for f in EncodingFamily for v in LogicalValue],
    )
    def test_roundtrip_survives_matching_noise(self, family, value):
        basis = basis_for(family, value)
        rng = np.random.default_rng(12)
        for theta in rng.uniform(0, 2 * np.pi, 8):
            noisy = apply_family_noise(prepare(family, value), family, theta)
            outcome = measure_logical(noisy, basis, rng)
            assert outcome.value is value

    def test_minus_dephasing_readout_raw_is_fixed(self):
        rng = np.random.default_rng(13)
        for theta in rng.uniform(0, 2 * np.pi, 10):
            noisy = apply_collective_dephasing(
                prepare(EncodingFamily.DEPHASING, LogicalValue.MINUS), theta
            )
            outcome = measure_logical(noisy, X_DP, rng)
            assert outcome.value is LogicalValue.MINUS and outcome.raw == "11"

    def test_minus_rotation_readout_raw_is_uniform_pair(self):
        rng = np.random.default_rng(14)
        raws = set()
        for _ in range(60):
            outcome = measure_logical(
                prepare(EncodingFamily.ROTATION, LogicalValue.MINUS), X_R, rng
            )
            assert outcome.value is LogicalValue.MINUS
            raws.add(outcome.raw)
        assert raws == {"01", "10"}

    def test_decode_tables(self):
        assert decode_pair(Z_DP, "01") is LogicalValue.ZERO
        assert decode_pair(Z_DP, "10") is LogicalValue.ONE
        assert decode_pair(Z_DP, "00") is None
        assert decode_pair(Z_DP, "11") is None
        assert decode_pair(X_DP, "01") is LogicalValue.PLUS
        assert decode_pair(X_DP, "11") is LogicalValue.MINUS
        assert decode_pair(X_DP, "00") is None
        # rotation-family readouts never produce invalid pairs
        assert decode_pair(Z_R, "00") is LogicalValue.ZERO
        assert decode_pair(Z_R, "11") is LogicalValue.ZERO
        assert decode_pair(Z_R, "01") is LogicalValue.ONE
        assert decode_pair(Z_R, "10") is LogicalValue.ONE
        assert decode_pair(X_R, "00") is LogicalValue.PLUS
        assert decode_pair(X_R, "11") is LogicalValue.PLUS
        assert decode_pair(X_R, "01") is LogicalValue.MINUS
        assert decode_pair(X_R, "10") is LogicalValue.MINUS

    def test_x_readout_of_dephasing_minus(self):
        state = apply_readout(prepare(EncodingFamily.DEPHASING, LogicalValue.MINUS), X_DP)
        np.testing.assert_allclose(np.abs(state.amps), [0, 0, 0, 1], atol=1e-12)

    def test_cross_basis_is_fifty_fifty(self):
        """Measuring a Z codeword in the X basis splits evenly: 10^5 shots
        per family, 4 sigma window (and a lighter check going back)."""
        rng = np.random.default_rng(21)
        shots = 100_000
        for family in EncodingFamily:
            state = prepare(family, LogicalValue.ZERO)
            x_basis = basis_for(family, LogicalValue.PLUS)
            hits = 0
            for _ in range(shots):
                out = measure_logical(state, x_basis, rng)
                assert out.value in (LogicalValue.PLUS, LogicalValue.MINUS)
                hits += out.value is LogicalValue.PLUS
            assert abs(hits - shots / 2) < 4 * np.sqrt(shots * 0.25)
        shots = 4000
        for family in EncodingFamily:
            state = prepare(family, LogicalValue.PLUS)
            z_basis = basis_for(family, LogicalValue.ZERO)
            hits = sum(
                measure_logical(state, z_basis, rng).value is LogicalValue.ZERO
                for _ in range(shots)
            )
            assert abs(hits - shots / 2) < 4 * np.sqrt(shots * 0.25)

    def test_invalid_outcome_shape(self):
        # a bare |00> is outside the dephasing Z table
        rng = np.random.default_rng(2)
        outcome = measure_logical(new_basis_state(2, 0), Z_DP, rng)
        assert outcome.is_invalid
        assert outcome.value is None
        assert outcome.raw == "00"


class TestSift:
    def test_sift_on_z_codeword_reproduces_bit(self):
        rng = np.random.default_rng(31)
        for family in EncodingFamily:
            for value, bit in ((LogicalValue.ZERO, 0), (LogicalValue.ONE, 1)):
                got, fresh = sift_measure_and_resend(prepare(family, value), family, rng)
                assert got == bit

    def test_sift_resends_raw_computational_state(self):
        """The participant can only re-prepare product states, so the fresh
        pair is whatever bit pattern the measurement produced -- for the
        rotation family that is |00> or |11>, never the entangled codeword."""
        rng = np.random.default_rng(34)
        # dephasing Z codewords survive verbatim
        _, fresh = sift_measure_and_resend(
            prepare(EncodingFamily.DEPHASING, LogicalValue.ZERO), EncodingFamily.DEPHASING, rng
        )
        np.testing.assert_allclose(fresh.amps, [0, 1, 0, 0], atol=1e-12)
        bit, fresh = sift_measure_and_resend(
            prepare(EncodingFamily.DEPHASING, LogicalValue.ONE), EncodingFamily.DEPHASING, rng
        )
        assert bit == 1
        np.testing.assert_allclose(fresh.amps, [0, 0, 1, 0], atol=1e-12)
        seen = set()
        for _ in range(40):
            bit, fresh = sift_measure_and_resend(
                prepare(EncodingFamily.ROTATION, LogicalValue.ZERO), EncodingFamily.ROTATION, rng
            )
            assert bit == 0
            index = int(np.argmax(np.abs(fresh.amps)))
            assert index in (0, 3)
            seen.add(index)
        assert seen == {0, 3}  # both even-parity patterns occur

    def test_sift_on_invalid_pair_returns_none(self):
        rng = np.random.default_rng(32)
        bit, fresh = sift_measure_and_resend(new_basis_state(2, 0), EncodingFamily.DEPHASING, rng)
        assert bit is None
        # resend mirrors the raw outcome even when it is not a codeword
        np.testing.assert_allclose(fresh.amps, new_basis_state(2, 0).amps)

    def test_sift_on_x_codeword_is_unbiased(self):
        rng = np.random.default_rng(33)
        shots = 4000
        for family in EncodingFamily:
            ones = 0
            for _ in range(shots):
                bit, _ = sift_measure_and_resend(
                    prepare(family, LogicalValue.PLUS), family, rng
                )
                assert bit in (0, 1)
                ones += bit
            assert abs(ones - shots / 2) < 4 * np.sqrt(shots * 0.25)


def test_basis_for_x_values():
    assert basis_for(EncodingFamily.DEPHASING, LogicalValue.PLUS) is X_DP
    assert basis_for(EncodingFamily.ROTATION, LogicalValue.MINUS) is X_R
    assert Z_DP.kind is BasisKind.Z and X_R.kind is BasisKind.X


def test_logical_value_bit_property():
    assert LogicalValue.ZERO.bit == 0 and LogicalValue.ONE.bit == 1
    with pytest.raises(ValueError):
        LogicalValue.PLUS.bit
