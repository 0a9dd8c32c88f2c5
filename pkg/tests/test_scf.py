"""SC-Flip tests: insertion-sorter oracle equivalence, retry semantics."""

import numpy as np
import pytest

from polarkit.code import PolarCode, construct_frozen_set, encode_payload
from polarkit.crc import CRC4, CRC8, crc_append
from polarkit.quant import FLEXIBLE_QUANT, quantize_llr_frame
from polarkit.sc import decode_sc
from polarkit.scf import MAX_TRIALS, FlipList, build_flip_list, decode_scf, flip_list_insert
from polarkit.sim import awgn_llr_frame, ebn0_to_sigma
from reference import sc_reference


def sort_oracle(pairs, capacity):
    """Stable full sort by magnitude, keep the first `capacity`."""
    ranked = sorted(enumerate(pairs), key=lambda t: (t[1][0], t[0]))
    return [p for _, p in ranked[:capacity]]


class TestFlipList:
    def test_insert_into_sentinels(self):
        fl = FlipList(3, np.inf)
        fl.insert(5.0, 42)
        assert fl.entries[0] == (5.0, 42)
        assert fl.indices[1] == -1

    def test_spec_stream(self):
        fl = FlipList(3, np.inf)
        for mag, idx in zip((9, 2, 7, 5, 1), ("a", "b", "c", "d", "e")):
            fl.insert(mag, idx)
        assert fl.entries == [(1, "e"), (2, "b"), (5, "d")]

    def test_equal_magnitude_goes_after(self):
        fl = FlipList(3, np.inf)
        fl.insert(4.0, 10)
        fl.insert(4.0, 20)
        assert fl.entries[:2] == [(4.0, 10), (4.0, 20)]

    def test_functional_wrapper(self):
        fl = FlipList(2, np.inf)
        assert flip_list_insert(fl, 1.0, 3) is fl

    def test_zero_capacity(self):
        fl = FlipList(0, np.inf)
        fl.insert(1.0, 0)
        assert fl.entries == []

    def test_magnitude_equal_to_sentinel_not_stored(self):
        fl = FlipList(2, 32)
        fl.insert(32, 5)
        assert fl.valid_count() == 0

    @pytest.mark.parametrize("capacity", [1, 3, 7, 15])
    def test_matches_sort_oracle_random_streams(self, capacity):
        rng = np.random.default_rng(capacity)
        for trial in range(300):
            k = int(rng.integers(1, 60))
            mags = rng.integers(0, 12, k)  # small alphabet forces ties
            pairs = [(int(m), i) for i, m in enumerate(mags)]
            fl = build_flip_list([m for m, _ in pairs], [i for _, i in pairs], capacity, 10**9)
            expect = sort_oracle(pairs, capacity)
            assert fl.entries[: len(expect)] == expect


def make_noisy_frame(code, crc, ebn0_db, seed, quant=None):
    rng = np.random.default_rng(seed)
    kp = code.k - crc.length
    payload = rng.integers(0, 2, kp).astype(np.uint8)
    x = encode_payload(code, crc_append(payload, crc))
    sigma = ebn0_to_sigma(ebn0_db, code.k / code.N)
    llr = awgn_llr_frame(x, sigma, seed)
    if quant is not None:
        llr = quantize_llr_frame(llr, quant)
    return payload, x, llr


class TestDecodeScf:
    CODE = PolarCode(construct_frozen_set(64, 40, 2.0))

    def test_noiseless_single_trial(self):
        payload, x, _ = make_noisy_frame(self.CODE, CRC8, 30.0, 1)
        llr = (1.0 - 2.0 * x) * 10.0
        out = decode_scf(self.CODE, llr, None, trials=8, crc=CRC8)
        assert out.trials_used == 1 and out.crc_ok is True
        assert np.array_equal(out.info_bits[:-8], payload)

    def test_t1_is_sc_plus_verdict(self):
        for seed in range(40):
            _, _, llr = make_noisy_frame(self.CODE, CRC8, 3.0, 100 + seed)
            plain = decode_sc(self.CODE, llr)
            flip = decode_scf(self.CODE, llr, None, trials=1, crc=CRC8)
            assert np.array_equal(plain.u_hat, flip.u_hat)
            assert flip.crc_ok in (True, False)
            assert flip.trials_used == 1

    def test_trial_budget_validated(self):
        _, _, llr = make_noisy_frame(self.CODE, CRC8, 3.0, 5)
        with pytest.raises(ValueError):
            decode_scf(self.CODE, llr, None, trials=0, crc=CRC8)
        with pytest.raises(ValueError):
            decode_scf(self.CODE, llr, None, trials=MAX_TRIALS + 1, crc=CRC8)
        with pytest.raises(ValueError):
            decode_scf(self.CODE, llr, None, trials=4, crc=None)

    def test_two_trial_recovery_exists(self):
        # hunt for a frame where SC fails but one flip repairs it
        found = 0
        for seed in range(400):
            payload, _, llr = make_noisy_frame(self.CODE, CRC8, 2.5, 7000 + seed)
            first = decode_scf(self.CODE, llr, None, trials=1, crc=CRC8)
            if first.crc_ok:
                continue
            out = decode_scf(self.CODE, llr, None, trials=8, crc=CRC8)
            if out.trials_used == 2 and out.crc_ok:
                assert np.array_equal(out.info_bits[:-8], payload)
                found += 1
                if found >= 3:
                    break
        assert found >= 3

    def test_flip_semantics_single_differing_decision(self):
        # trial j: identical prefix, one inverted decision at the recorded
        # index, versus what plain SC would do from that prefix
        for seed in range(60):
            _, _, llr = make_noisy_frame(self.CODE, CRC8, 2.5, 300 + seed)
            first = decode_sc(self.CODE, llr)
            fl = build_flip_list(
                first.decision_magnitudes, self.CODE.info_indices, 7, np.inf
            )
            out = decode_scf(self.CODE, llr, None, trials=8, crc=CRC8)
            if out.trials_used == 1:
                continue
            j = out.trials_used
            flip_idx = fl.indices[j - 2]
            # replay trial j with the reference decoder
            u_ref, _, _ = sc_reference(self.CODE.frozen_mask, llr, flip_index=flip_idx)
            assert np.array_equal(out.u_hat, u_ref)
            assert out.u_hat[flip_idx] != first.u_hat[flip_idx]
            assert np.array_equal(out.u_hat[:flip_idx], first.u_hat[:flip_idx])

    def test_trials_used_bounded(self):
        for seed in range(30):
            _, _, llr = make_noisy_frame(self.CODE, CRC4, 1.0, 900 + seed)
            out = decode_scf(self.CODE, llr, None, trials=6, crc=CRC4)
            assert 1 <= out.trials_used <= 6
            if out.crc_ok is False:
                assert out.trials_used == 6

    def test_quantized_mode(self):
        ok = 0
        for seed in range(30):
            payload, _, llr = make_noisy_frame(
                self.CODE, CRC8, 6.0, 40 + seed, quant=FLEXIBLE_QUANT
            )
            out = decode_scf(self.CODE, llr, FLEXIBLE_QUANT, trials=8, crc=CRC8)
            if out.crc_ok and np.array_equal(out.info_bits[:-8], payload):
                ok += 1
        assert ok >= 25

    def test_average_trials_shrinks_with_snr(self):
        def avg_trials(ebn0, n=150):
            tot = 0
            for seed in range(n):
                _, _, llr = make_noisy_frame(self.CODE, CRC8, ebn0, 5000 + seed)
                tot += decode_scf(self.CODE, llr, None, trials=8, crc=CRC8).trials_used
            return tot / n

        assert avg_trials(6.0) < avg_trials(2.0)
