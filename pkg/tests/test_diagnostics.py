import math
import random

import numpy as np
import pytest

from qjacobi.diagnostics import (WeightDistribution, participation_ratio,
                                 shannon_entropy, topk_mass)


def uniform(n):
    return WeightDistribution.from_weights([1.0 / n] * n)


class TestEntropy:
    def test_uniform_is_one(self):
        for n in (2, 5, 100):
            assert shannon_entropy(uniform(n)) == pytest.approx(1.0, abs=1e-12)

    def test_spike_is_zero(self):
        assert shannon_entropy(WeightDistribution.from_weights([1.0])) == 0.0

    def test_closed_form(self):
        d = WeightDistribution.from_weights([0.5, 0.25, 0.25])
        expected = (1.5 * math.log(2)) / math.log(3)
        assert shannon_entropy(d) == pytest.approx(expected, abs=1e-12)

    def test_permutation_invariant(self):
        rng = random.Random(3)
        w = [rng.random() for _ in range(20)]
        total = sum(w)
        w = [x / total for x in w]
        a = shannon_entropy(WeightDistribution.from_weights(w))
        rng.shuffle(w)
        b = shannon_entropy(WeightDistribution.from_weights(w))
        assert a == pytest.approx(b, abs=1e-12)


class TestParticipationRatio:
    def test_uniform_equals_n(self):
        for n in (2, 7, 64):
            assert participation_ratio(uniform(n)) == pytest.approx(n, abs=1e-10)

    def test_spike_is_one(self):
        assert participation_ratio(WeightDistribution.from_weights([1.0])) == 1.0

    def test_two_equal_weights(self):
        d = WeightDistribution.from_weights([0.5, 0.5])
        assert participation_ratio(d) == pytest.approx(2.0, abs=1e-12)

    def test_bounded_by_support(self):
        rng = random.Random(5)
        for _ in range(50):
            n = rng.randint(1, 30)
            w = np.array([rng.random() + 1e-3 for _ in range(n)])
            w /= w.sum()
            d = WeightDistribution.from_weights(w)
            pr = participation_ratio(d)
            assert pr <= n + 1e-10
            if pr > n - 1e-10:
                assert np.allclose(w, 1.0 / n, atol=1e-10)


class TestTopK:
    def test_uniform(self):
        d = uniform(10)
        for k in range(1, 11):
            assert topk_mass(d, k) == pytest.approx(k / 10, abs=1e-12)

    def test_spike(self):
        assert topk_mass(WeightDistribution.from_weights([1.0]), 1) == 1.0

    def test_k_at_least_support_gives_exactly_one(self):
        rng = random.Random(9)
        for _ in range(20):
            amps = [rng.uniform(-1, 1) for _ in range(rng.randint(1, 15))]
            d = WeightDistribution.from_amplitudes(amps)
            assert topk_mass(d, d.support_size) == 1.0
            assert topk_mass(d, d.support_size + 5) == 1.0

    def test_nondecreasing_in_k(self):
        rng = random.Random(11)
        for _ in range(30):
            amps = [rng.uniform(-1, 1) for _ in range(rng.randint(2, 25))]
            d = WeightDistribution.from_amplitudes(amps)
            masses = [topk_mass(d, k) for k in range(1, d.support_size + 1)]
            assert all(b >= a for a, b in zip(masses, masses[1:]))


class TestConstruction:
    def test_support_cutoff(self):
        d = WeightDistribution.from_amplitudes([0.5, 1e-13, -0.5])
        assert d.support_size == 2

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            WeightDistribution.from_amplitudes([1e-15])

    def test_weights_normalized(self):
        d = WeightDistribution.from_amplitudes([3.0, 4.0])
        assert sum(d.weights()) == pytest.approx(1.0, abs=1e-15)
        assert d.weights()[0] == pytest.approx(16 / 25, abs=1e-12)

    def test_from_run_residuals(self, h4_cfqj_trace):
        # qualitative: residual statistics behave over a real run
        recs = [r for r in h4_cfqj_trace.records if r.residual_magnitudes]
        dists = [WeightDistribution.from_amplitudes(r.residual_magnitudes.values())
                 for r in recs]
        for d in dists:
            assert 1.0 <= participation_ratio(d) <= d.support_size + 1e-9
            assert 0.0 <= shannon_entropy(d) <= 1.0 + 1e-12
        # the late-cycle residual is broader than the first one (correlation
        # weight spreads over many small contributors)
        assert dists[-1].support_size >= dists[0].support_size
