import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import brute_force_auc

from pdscreen.metrics import LengthMismatch, SingleClass, ZeroVariance, auc, mae_pearson


class TestAuc:
    def test_perfect_ranking(self):
        assert auc([0.9, 0.1], [1, 0]) == 1.0

    def test_all_ties(self):
        assert auc([0.5, 0.5, 0.5, 0.5], [1, 0, 1, 0]) == 0.5

    def test_explicit_pair_enumeration(self):
        # pairs: (0.8 > 0.6) = 1, (0.4 < 0.6) = 0 -> 0.5
        assert auc([0.8, 0.6, 0.4], [1, 0, 1]) == 0.5

    def test_single_class(self):
        with pytest.raises(SingleClass):
            auc([0.1, 0.9], [1, 1])

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            auc([0.1], [1, 0])

    def test_matches_brute_force_continuous(self):
        rng = np.random.default_rng(11)
        for _ in range(300):
            n = int(rng.integers(2, 120))
            labels = rng.integers(0, 2, n)
            if labels.min() == labels.max():
                continue
            scores = rng.normal(size=n)
            assert auc(scores, labels) == brute_force_auc(scores, labels)

    def test_matches_brute_force_with_ties(self):
        rng = np.random.default_rng(12)
        for _ in range(300):
            n = int(rng.integers(2, 120))
            labels = rng.integers(0, 2, n)
            if labels.min() == labels.max():
                continue
            scores = rng.integers(0, 5, n).astype(float)
            assert auc(scores, labels) == brute_force_auc(scores, labels)

    @given(
        # coarse grid keeps exp() strictly increasing in float arithmetic
        st.lists(
            st.integers(-500, 500).map(lambda v: v / 10.0), min_size=4, max_size=40
        ),
        st.data(),
    )
    @settings(max_examples=60, deadline=None)
    def test_monotone_transform_invariance(self, scores, data):
        labels = data.draw(
            st.lists(
                st.integers(0, 1),
                min_size=len(scores),
                max_size=len(scores),
            )
        )
        if min(labels) == max(labels):
            return
        base = auc(scores, labels)
        affine = auc([3.0 * s + 11.0 for s in scores], labels)
        expo = auc(list(np.exp(np.array(scores) / 50.0)), labels)
        assert affine == pytest.approx(base, abs=1e-12)
        assert expo == pytest.approx(base, abs=1e-12)


class TestMaePearson:
    def test_identity(self):
        mae, r = mae_pearson([0, 1, 2], [0, 1, 2])
        assert mae == 0.0
        assert r == pytest.approx(1.0, abs=1e-12)

    def test_anti_linear(self):
        targets = np.array([-1.0, 0.0, 1.0])
        mae, r = mae_pearson(-targets, targets)
        assert r == pytest.approx(-1.0, abs=1e-12)

    def test_known_mae(self):
        mae, _ = mae_pearson([1, 2, 4], [1, 2, 3])
        assert mae == pytest.approx(1 / 3, abs=1e-12)

    def test_zero_variance(self):
        with pytest.raises(ZeroVariance):
            mae_pearson([1, 2, 3], [5, 5, 5])

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            mae_pearson([1], [1, 2])

    def test_matches_numpy_corrcoef(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            n = int(rng.integers(3, 60))
            a, b = rng.normal(size=n), rng.normal(size=n)
            _, r = mae_pearson(a, b)
            assert r == pytest.approx(np.corrcoef(a, b)[0, 1], abs=1e-12)
