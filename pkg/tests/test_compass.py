"""LAN-MSE properties, Compass Score composition, favorability rules."""

import math

import numpy as np
import pytest

from compasskit.compass import (
    FavorabilityThresholds,
    PcbTriple,
    buffer_for,
    classify_favorability,
    combined_loss,
    compass_component,
    compass_components,
    compass_total,
    lan_mse,
    log_buffered,
    scale_drift,
)
from compasskit.errors import EmptyInput, LengthMismatch, WeightOutOfRange


def scalar_oracle(y_hat, y, eps=1e-5):
    """Independent single-pair evaluation of the loss definition."""
    b_true = 1.1 if abs(y) < 1 else 1.0
    b_pred = 1.1 if abs(y_hat) < 1 else 1.0
    num = math.log(abs(y) + b_true) - math.log(abs(y_hat) + b_pred)
    den = 2 * abs(math.log(abs(y) + b_true)) + eps
    return (num / den) ** 2


class TestLanMse:
    def test_equal_inputs_zero(self):
        assert lan_mse([5.0, -3.0, 0.2], [5.0, -3.0, 0.2]) == 0.0

    def test_singleton_documented_value(self):
        value = lan_mse([1.0], [10.0])
        expected = ((math.log(11) - math.log(2)) / (2 * math.log(11) + 1e-5)) ** 2
        assert value == pytest.approx(expected, abs=1e-12)
        assert value == pytest.approx(0.126357, abs=1e-6)

    def test_zeros(self):
        assert lan_mse([0.0], [0.0]) == 0.0

    def test_tiny_values_finite(self):
        value = lan_mse([1e-12], [1e-12])
        assert value == 0.0
        assert math.isfinite(lan_mse([1e-12], [5e-12]))

    def test_matches_scalar_oracle_elementwise(self):
        rng = np.random.default_rng(77)
        for _ in range(200):
            y = float(rng.uniform(-50, 50))
            y_hat = float(rng.uniform(-50, 50))
            assert lan_mse([y_hat], [y]) == pytest.approx(
                scalar_oracle(y_hat, y), rel=1e-12
            )

    def test_mean_over_elements(self):
        ys = [2.0, -7.0, 0.3]
        yh = [1.0, 4.0, 0.9]
        expected = sum(scalar_oracle(a, b) for a, b in zip(yh, ys)) / 3
        assert lan_mse(yh, ys) == pytest.approx(expected, rel=1e-12)

    def test_nonnegative_random(self):
        rng = np.random.default_rng(123)
        for _ in range(500):
            n = int(rng.integers(1, 6))
            y = rng.uniform(-1e3, 1e3, size=n)
            yh = rng.uniform(-1e3, 1e3, size=n)
            assert lan_mse(yh, y) >= 0.0

    def test_permutation_invariance(self):
        rng = np.random.default_rng(5)
        y = list(rng.uniform(-20, 20, size=8))
        yh = list(rng.uniform(-20, 20, size=8))
        base = lan_mse(yh, y)
        perm = rng.permutation(8)
        assert lan_mse([yh[i] for i in perm], [y[i] for i in perm]) == pytest.approx(
            base, rel=1e-12
        )

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            lan_mse([1.0], [1.0, 2.0])

    def test_empty(self):
        with pytest.raises(EmptyInput):
            lan_mse([], [])

    def test_buffer_switch(self):
        assert buffer_for(0.999) == 1.1
        assert buffer_for(1.0) == 1.0
        assert buffer_for(-0.5) == 1.1
        assert buffer_for(-3.0) == 1.0


class TestLogBufferedProperties:
    def test_stability_band_below_one(self):
        # log(|x| + 1.1) stays within [log(1.1), log(2.1)] for |x| < 1.
        for x in np.linspace(-0.999999, 0.999999, 2001):
            v = log_buffered(float(x))
            assert math.log(1.1) - 1e-12 <= v <= math.log(2.1) + 1e-12

    def test_slope_bound_by_buffer(self):
        # |d/dx log(|x| + b)| = 1/(|x| + b) <= 1/b, checked by finite
        # differences on log-spaced grids within each buffer regime.
        h = 1e-7
        for grid, buffer in (
            (np.logspace(-12, math.log10(0.5), 60), 1.1),
            (np.logspace(math.log10(2.0), 6, 60), 1.0),
        ):
            for x in grid:
                slope = (log_buffered(x + h) - log_buffered(x - h)) / (2 * h)
                assert abs(slope) <= 1.0 / buffer + 1e-6

    def test_normalization_decreases_with_larger_truth(self):
        # For |y| >= 10, doubling |y| grows the denominator and so shrinks
        # the weight of a fixed numerator.
        eps = 1e-5
        for y in (10.0, 25.0, 300.0, 1e4):
            d1 = 2 * abs(log_buffered(y)) + eps
            d2 = 2 * abs(log_buffered(2 * y)) + eps
            assert d2 > d1

    def test_approximate_scale_invariance_diagnostic(self):
        for y in (100.0, 1e3, 1e5):
            for k in (0.5, 0.8, 1.25, 2.0):
                assert scale_drift(y, y / 3, k) < 0.02


class TestCompassScore:
    def test_component_zero_for_equal(self):
        assert compass_component(-6.46, -6.46) == 0.0

    def test_extreme_prediction_bounded(self):
        # Affinity blow-up case: huge positive prediction vs a good truth.
        value = compass_component(3505.32, -11.33)
        assert math.isfinite(value)
        assert 0 < value < 10

    def test_clash_pair_in_unit_interval(self):
        value = compass_component(19.0, 3.0)
        assert 0 < value < 1

    def test_total_mean_of_components(self):
        pred = PcbTriple(-3.13, 11.9, 19)
        truth = PcbTriple(-6.46, 0.16, 3)
        parts = compass_components(pred, truth)
        assert compass_total(pred, truth) == pytest.approx(
            (parts["affinity"] + parts["strain"] + parts["clash"]) / 3
        )

    def test_total_of_equal_triples_zero(self):
        t = PcbTriple(-6.46, 0.16, 3)
        assert compass_total(t, t) == 0.0

    def test_equal_components_average_to_same(self):
        # components (0, 0, c) -> c / 3
        pred = PcbTriple(-6.46, 0.16, 19.0)
        truth = PcbTriple(-6.46, 0.16, 3.0)
        c = compass_component(19.0, 3.0)
        assert compass_total(pred, truth) == pytest.approx(c / 3)


class TestCombinedLoss:
    def test_documented_weighting(self):
        assert combined_loss(1.0, 2.0, 0.99) == pytest.approx(1.01)

    def test_pure_primary(self):
        assert combined_loss(3.7, 99.0, 1.0) == 3.7

    def test_pure_score(self):
        assert combined_loss(3.7, 99.0, 0.0) == 99.0

    def test_out_of_range(self):
        with pytest.raises(WeightOutOfRange):
            combined_loss(1.0, 1.0, 1.5)
        with pytest.raises(WeightOutOfRange):
            combined_loss(1.0, 1.0, -0.1)


class TestFavorability:
    def test_reference_pairs(self):
        assert classify_favorability(PcbTriple(-6.46, 0.16, 3)) == "favorable"
        assert classify_favorability(PcbTriple(-3.13, 11.9, 19)) == "unfavorable"
        assert classify_favorability(PcbTriple(-11.33, 7.31, 6)) == "unfavorable"
        assert classify_favorability(PcbTriple(3505.32, 20.65, 205)) == "unfavorable"

    def test_boundaries_strict(self):
        assert classify_favorability(PcbTriple(-0.0, 4.9, 4)) == "unfavorable"
        assert classify_favorability(PcbTriple(-0.1, 5.0, 4)) == "unfavorable"
        assert classify_favorability(PcbTriple(-0.1, 4.9, 5)) == "unfavorable"
        assert classify_favorability(PcbTriple(-0.1, 4.9, 4)) == "favorable"

    def test_custom_thresholds(self):
        loose = FavorabilityThresholds(max_affinity=10.0, max_strain=100.0,
                                       max_clashes=100.0)
        assert classify_favorability(PcbTriple(5.0, 50.0, 50), loose) == "favorable"
