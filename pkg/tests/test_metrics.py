import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import levenshtein_oracle, random_instance, sig
from sedecomp import (
    Decomposition,
    ReferencePair,
    UndefinedMetricError,
    ValidationError,
    corpus_wer,
    decompose,
    edit_distance,
    metrics_report,
    sar,
    sdr,
    si_snr,
    snr,
    wer,
)
from sedecomp.metrics import db_from_energies, format_db, machine_value, tokenize


def axis_decomposition():
    pair = ReferencePair(sig([1, 0, 0, 0]), sig([0, 1, 0, 0]))
    return decompose(sig([2, 3, 0, 5]), pair)


class TestDecompositionMetrics:
    def test_hand_computed_values(self):
        d = axis_decomposition()
        # energies by hand: target 4, noise 9, artifact 25, total error 34
        assert sdr(d) == pytest.approx(10 * math.log10(4 / 34), abs=1e-12)
        assert snr(d) == pytest.approx(10 * math.log10(4 / 9), abs=1e-12)
        assert sar(d) == pytest.approx(10 * math.log10(13 / 25), abs=1e-12)

    def test_perfect_enhancement_is_infinite_sdr(self):
        pair = ReferencePair(sig([1, 0, 0, 0]), sig([0, 1, 0, 0]))
        d = decompose(pair.speech, pair)
        assert sdr(d) == math.inf
        assert snr(d) == math.inf
        assert sar(d) == math.inf

    def test_in_plane_signal_has_infinite_sar(self):
        pair = ReferencePair(sig([1, 0, 0, 0]), sig([0, 1, 0, 0]))
        y = sig([1, 1, 0, 0])
        assert sar(decompose(y, pair)) == math.inf

    def test_zero_target_is_negative_infinity(self):
        d = Decomposition(sig([0, 0, 0]), sig([0, 1, 0]), sig([0, 0, 0]))
        assert snr(d) == -math.inf
        assert sdr(d) == -math.inf

    def test_all_zero_ratio_is_undefined(self):
        d = Decomposition(sig([0, 0]), sig([0, 0]), sig([0, 0]))
        with pytest.raises(UndefinedMetricError):
            sdr(d)

    def test_table_row_consistency(self):
        # published-style row: SDR 9.0, SNR 21.5, SAR 9.4
        assert 9.0 <= min(21.5, 9.4) + 1e-6

    def test_ordering_on_random_instances(self):
        rng = np.random.default_rng(10)
        for _ in range(50):
            pair, shat, _ = random_instance(rng, int(rng.integers(8, 256)))
            d = decompose(shat, pair)
            values = (sdr(d), snr(d), sar(d))
            if all(math.isfinite(v) for v in values):
                assert values[0] <= values[1] + 1e-6
                assert values[0] <= values[2] + 1e-6

    def test_scale_invariance(self):
        rng = np.random.default_rng(11)
        pair, shat, _ = random_instance(rng, 128)
        base = metrics_report(d := decompose(shat, pair))
        for c in (1e-3, 0.5, 7.0, 1e3):
            scaled = metrics_report(decompose(sig(c * shat.samples), pair))
            assert scaled.sdr_db == pytest.approx(base.sdr_db, abs=1e-9)
            assert scaled.snr_db == pytest.approx(base.snr_db, abs=1e-9)
            assert scaled.sar_db == pytest.approx(base.sar_db, abs=1e-9)

    def test_db_round_trip(self):
        d = axis_decomposition()
        assert 10 ** (sdr(d) / 10) == pytest.approx(4 / 34, rel=1e-12)
        assert 10 ** (snr(d) / 10) == pytest.approx(4 / 9, rel=1e-12)
        assert 10 ** (sar(d) / 10) == pytest.approx(13 / 25, rel=1e-12)

    def test_cap_threshold_is_relative(self):
        # tiny but nonzero denominators stay finite down to the 1e-30 ratio
        assert db_from_energies(1.0, 1e-29) == pytest.approx(290.0, abs=1e-9)
        assert db_from_energies(1.0, 1e-31) == math.inf
        assert db_from_energies(1e-31, 1.0) == -math.inf


class TestSiSnr:
    def test_hand_example(self):
        value = si_snr(sig([1, -1, 2, -2]), sig([1, -1, 0, 0]))
        assert value == pytest.approx(10 * math.log10(2 / 8), abs=1e-12)

    def test_scaled_copy_is_infinite(self):
        ref = sig([0.5, -0.25, 0.75, -1.0])
        assert si_snr(sig(2.0 * ref.samples), ref) == math.inf

    def test_invariant_to_rescaling(self):
        rng = np.random.default_rng(12)
        ref = sig(rng.standard_normal(64))
        est = sig(rng.standard_normal(64))
        base = si_snr(est, ref)
        for c in (0.5, 3.0):
            assert si_snr(sig(c * est.samples), ref) == pytest.approx(base, abs=1e-9)

    def test_mean_removal_applied(self):
        # constant offset on the estimate must not change the value
        ref = sig([1.0, -1.0, 0.5, -0.5])
        est = sig([0.9, -1.1, 0.4, -0.6])
        shifted = sig(est.samples + 10.0)
        assert si_snr(shifted, ref) == pytest.approx(si_snr(est, ref), abs=1e-9)

    def test_constant_reference_is_an_error(self):
        with pytest.raises(UndefinedMetricError):
            si_snr(sig([1, 2, 3, 4]), sig([2.0, 2.0, 2.0, 2.0]))

    def test_length_mismatch(self):
        with pytest.raises(ValidationError):
            si_snr(sig([1, 2]), sig([1, 2, 3]))


class TestFormatting:
    def test_format_db(self):
        assert format_db(9.04) == "9.0"
        assert format_db(math.inf) == "inf"
        assert format_db(-math.inf) == "-inf"
        assert format_db(None) == ""

    def test_machine_value_round_trips(self):
        for v in (0.1 + 0.2, -9.294189257142927, 1e-30):
            assert float(machine_value(v)) == v
        assert machine_value(math.inf) == "inf"
        assert float(machine_value(math.inf)) == math.inf


class TestWer:
    def test_identity(self):
        assert wer("a b c".split(), "a b c".split()) == 0.0

    def test_single_substitution(self):
        assert wer("a b c".split(), "a x c".split()) == pytest.approx(1 / 3)

    def test_insertion(self):
        ref, hyp = "a b".split(), "a b c".split()
        assert edit_distance(ref, hyp) == levenshtein_oracle(ref, hyp) == 1
        assert wer(ref, hyp) == 0.5

    def test_empty_hypothesis(self):
        assert wer(["a", "b"], []) == 1.0

    def test_empty_reference_is_an_error(self):
        with pytest.raises(ValidationError):
            wer([], ["a"])

    def test_corpus_pooling(self):
        pairs = [("a b".split(), "a x".split()), ("p q r s".split(), "p q r s".split())]
        assert corpus_wer(pairs) == pytest.approx(1 / 6)

    def test_tokenize(self):
        assert tokenize("  Hello   World ") == ["Hello", "World"]
        assert tokenize("Hello World", lowercase=True) == ["hello", "world"]

    @given(
        st.lists(st.sampled_from("abcd"), min_size=1, max_size=8),
        st.lists(st.sampled_from("abcd"), max_size=8),
    )
    def test_matches_recursive_oracle(self, ref, hyp):
        assert edit_distance(ref, hyp) == levenshtein_oracle(ref, hyp)

    @given(st.lists(st.sampled_from("abc"), min_size=1, max_size=6))
    def test_zero_iff_equal(self, ref):
        assert wer(ref, list(ref)) == 0.0
        assert wer(ref, ref + ["x"]) > 0.0
