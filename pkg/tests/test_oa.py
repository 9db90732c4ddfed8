import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_instance, sig
from sedecomp import (
    ReferencePair,
    ValidationError,
    attach_scores,
    decompose,
    evaluate_weight,
    metrics_report,
    observation_add,
    select_weight,
    sweep,
)
from sedecomp.oa import DEFAULT_GRID


def running_example():
    pair = ReferencePair(sig([1, 0, 0, 0]), sig([0, 1, 0, 0]))
    shat = sig([2, 3, 0, 5])
    y = sig([1, 1, 0, 0])
    return pair, shat, y


class TestObservationAdd:
    def test_halfway_arithmetic(self):
        _, shat, y = running_example()
        out = observation_add(shat, y, 0.5)
        np.testing.assert_array_equal(out.samples, [1.5, 2.0, 0.0, 2.5])

    def test_zero_weight_returns_enhanced_unchanged(self):
        _, shat, y = running_example()
        assert observation_add(shat, y, 0.0) is shat

    def test_unit_weight_returns_observed_unchanged(self):
        _, shat, y = running_example()
        assert observation_add(shat, y, 1.0) is y

    def test_weight_out_of_range(self):
        _, shat, y = running_example()
        for w in (-0.1, 1.1):
            with pytest.raises(ValidationError):
                observation_add(shat, y, w)

    def test_shape_mismatch(self):
        _, shat, _ = running_example()
        with pytest.raises(ValidationError):
            observation_add(shat, sig([1, 1, 0]), 0.5)


class TestSweep:
    def test_default_grid(self):
        assert DEFAULT_GRID == tuple(k / 10 for k in range(11))

    def test_running_example_sar_curve(self):
        pair, shat, y = running_example()
        result = sweep(shat, y, pair)
        by_weight = {p.weight: p.report for p in result.points}
        assert by_weight[0.0].sar_db == pytest.approx(10 * math.log10(13 / 25), abs=1e-12)
        # at 0.5: in-plane energy (1.5^2 + 2^2) over artifact energy 2.5^2
        assert by_weight[0.5].sar_db == pytest.approx(0.0, abs=1e-12)
        assert by_weight[1.0].sar_db == math.inf

    def test_endpoint_zero_matches_plain_decomposition(self):
        rng = np.random.default_rng(20)
        pair, shat, y = random_instance(rng, 257)
        result = sweep(shat, y, pair)
        base = metrics_report(decompose(shat, pair), enhanced=shat, reference=pair.speech)
        first = result.points[0].report
        assert first.sdr_db == base.sdr_db
        assert first.snr_db == base.snr_db
        assert first.sar_db == base.sar_db
        assert first.si_snr_db == base.si_snr_db

    def test_endpoint_one_has_zero_artifact(self):
        rng = np.random.default_rng(21)
        pair, shat, y = random_instance(rng, 123)
        d, report = evaluate_weight(shat, y, pair, 1.0)
        assert np.linalg.norm(d.e_artif.samples) <= 1e-9 * np.linalg.norm(y.samples)
        assert report.sar_db == math.inf

    def test_artifact_scaling_law_direct_decomposition(self):
        rng = np.random.default_rng(22)
        for _ in range(20):
            pair, shat, y = random_instance(rng, int(rng.integers(8, 300)))
            base_artifact = decompose(shat, pair).e_artif.samples
            scale = np.abs(base_artifact).max()
            for w in DEFAULT_GRID:
                d = decompose(observation_add(shat, y, w), pair)
                diff = np.abs(d.e_artif.samples - (1.0 - w) * base_artifact).max()
                assert diff <= 1e-12 * scale

    def test_sweep_matches_direct_decomposition_at_inner_weights(self):
        rng = np.random.default_rng(23)
        pair, shat, y = random_instance(rng, 400)
        result = sweep(shat, y, pair, with_si_snr=False)
        for point in result.points[1:-1]:
            d = decompose(observation_add(shat, y, point.weight), pair)
            direct = metrics_report(d)
            assert point.report.sdr_db == pytest.approx(direct.sdr_db, abs=1e-6)
            assert point.report.snr_db == pytest.approx(direct.snr_db, abs=1e-6)
            assert point.report.sar_db == pytest.approx(direct.sar_db, abs=1e-6)

    def test_sar_monotone_when_alignment_nonnegative(self):
        rng = np.random.default_rng(24)
        checked = 0
        while checked < 20:
            pair, shat, y = random_instance(rng, int(rng.integers(16, 200)))
            result = sweep(shat, y, pair, with_si_snr=False)
            if not result.sar_monotone_expected:
                continue
            curve = [p.report.sar_db for p in result.points]
            assert all(b >= a - 1e-9 for a, b in zip(curve, curve[1:]))
            checked += 1

    def test_alignment_indicator_value(self):
        pair, shat, y = running_example()
        result = sweep(shat, y, pair)
        # plane projection of shat is (2, 3, 0, 0); inner product with y is 5
        assert result.alignment == pytest.approx(5.0)
        assert result.sar_monotone_expected

    def test_negative_alignment_is_flagged_but_still_runs(self):
        pair, _, y = running_example()
        shat = sig([-1.0, -2.0, 0.0, 2.0])
        result = sweep(shat, y, pair)
        assert result.alignment < 0.0
        assert not result.sar_monotone_expected
        assert len(result.points) == len(DEFAULT_GRID)

    def test_observation_residual_reported(self):
        rng = np.random.default_rng(25)
        pair, shat, y = random_instance(rng, 64)
        assert sweep(shat, y, pair).observation_residual <= 1e-12
        bumped = y.samples.copy()
        bumped[7] += 0.5
        result = sweep(shat, sig(bumped), pair)
        assert result.observation_residual > 1e-4

    def test_grid_validation(self):
        pair, shat, y = running_example()
        with pytest.raises(ValidationError):
            sweep(shat, y, pair, grid=[0.2, 0.1])
        with pytest.raises(ValidationError):
            sweep(shat, y, pair, grid=[0.0, 1.2])
        with pytest.raises(ValidationError):
            sweep(shat, y, pair, grid=[])


class TestSelectWeight:
    def test_tie_breaks_toward_smallest_weight(self):
        scores = [(0.0, 5.0), (0.1, 4.0), (0.2, 4.0), (0.3, 6.0)]
        assert select_weight(scores, lower_is_better=True) == 0.1

    def test_single_entry(self):
        assert select_weight([(0.7, 12.5)]) == 0.7

    def test_higher_is_better(self):
        scores = [(0.0, 5.0), (0.5, 9.0), (1.0, 9.0)]
        assert select_weight(scores, lower_is_better=False) == 0.5

    def test_empty_and_duplicate_weights(self):
        with pytest.raises(ValidationError):
            select_weight([])
        with pytest.raises(ValidationError):
            select_weight([(0.1, 1.0), (0.1, 2.0)])

    @given(st.permutations([(0.0, 5.0), (0.1, 4.0), (0.2, 4.0), (0.3, 6.0)]))
    def test_permutation_invariant(self, scores):
        assert select_weight(list(scores), lower_is_better=True) == 0.1


class TestAttachScores:
    def test_selection_lands_on_grid(self):
        pair, shat, y = running_example()
        result = sweep(shat, y, pair, grid=[0.0, 0.1, 0.2, 0.3])
        scored = attach_scores(result, [(0.0, 5.0), (0.1, 4.0), (0.2, 4.0), (0.3, 6.0)])
        assert scored.selected == 0.1
        assert scored.selected in scored.grid
        assert scored.selection_rule == "lowest-score-smallest-weight"
        assert [p.score for p in scored.points] == [5.0, 4.0, 4.0, 6.0]

    def test_off_grid_score_rejected(self):
        pair, shat, y = running_example()
        result = sweep(shat, y, pair, grid=[0.0, 0.5, 1.0])
        with pytest.raises(ValidationError):
            attach_scores(result, [(0.25, 1.0)])

    def test_duplicate_scored_weight_rejected(self):
        pair, shat, y = running_example()
        result = sweep(shat, y, pair, grid=[0.0, 0.5, 1.0])
        with pytest.raises(ValidationError):
            attach_scores(result, [(0.5, 1.0), (0.5, 2.0)])
