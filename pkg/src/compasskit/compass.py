"""Log-normalized pose scoring: LAN-MSE, per-feature and total Compass
Score, the combined fine-tuning loss, and favorability classification."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import EmptyInput, LengthMismatch, WeightOutOfRange


@dataclass(frozen=True)
class PcbTriple:
    """Binding affinity (kcal/mol), strain energy (kcal/mol), clash count."""

    binding_affinity: float
    strain_energy: float
    clash_count: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.binding_affinity, self.strain_energy, self.clash_count)


@dataclass(frozen=True)
class LanMseParams:
    buffer_low: float = 1.1    # applied when |value| < low_threshold
    buffer_high: float = 1.0
    epsilon: float = 1e-5
    low_threshold: float = 1.0


@dataclass(frozen=True)
class FavorabilityThresholds:
    max_affinity: float = 0.0
    max_strain: float = 5.0
    max_clashes: float = 5.0


def buffer_for(value: float, params: LanMseParams = LanMseParams()) -> float:
    return params.buffer_low if abs(value) < params.low_threshold else params.buffer_high


def log_buffered(value: float, params: LanMseParams = LanMseParams()) -> float:
    """log(|x| + buffer) with the magnitude-dependent buffer; finite for all
    finite x, including x -> 0."""
    return math.log(abs(value) + buffer_for(value, params))


def lan_mse(pred, truth, params: LanMseParams = LanMseParams()) -> float:
    """Mean squared buffered-log error, normalized per element by
    2|log(|y| + buffer_y)| + epsilon."""
    pred = list(pred)
    truth = list(truth)
    if len(pred) != len(truth):
        raise LengthMismatch(f"pred has {len(pred)} elements, truth {len(truth)}")
    if not pred:
        raise EmptyInput("need at least one element")
    total = 0.0
    for y_hat, y in zip(pred, truth):
        log_true = log_buffered(y, params)
        log_pred = log_buffered(y_hat, params)
        denom = 2.0 * abs(log_true) + params.epsilon
        ratio = (log_true - log_pred) / denom
        total += ratio * ratio
    return total / len(pred)


def compass_component(pred_value: float, true_value: float,
                      params: LanMseParams = LanMseParams()) -> float:
    """Single-feature score: LAN-MSE of the singleton pair."""
    return lan_mse([pred_value], [true_value], params)


def compass_total(pred: PcbTriple, truth: PcbTriple,
                  params: LanMseParams = LanMseParams()) -> float:
    """Equal-weight mean of the three per-feature scores."""
    return (
        compass_component(pred.binding_affinity, truth.binding_affinity, params)
        + compass_component(pred.strain_energy, truth.strain_energy, params)
        + compass_component(pred.clash_count, truth.clash_count, params)
    ) / 3.0


def compass_components(pred: PcbTriple, truth: PcbTriple,
                       params: LanMseParams = LanMseParams()) -> dict[str, float]:
    parts = {
        "affinity": compass_component(pred.binding_affinity, truth.binding_affinity, params),
        "strain": compass_component(pred.strain_energy, truth.strain_energy, params),
        "clash": compass_component(pred.clash_count, truth.clash_count, params),
    }
    parts["total"] = (parts["affinity"] + parts["strain"] + parts["clash"]) / 3.0
    return parts


def combined_loss(l_primary: float, cs_total: float, w_primary: float) -> float:
    """Mix the docking-model loss with the Compass Score penalizer;
    the score weight is 1 - w_primary."""
    if not 0.0 <= w_primary <= 1.0:
        raise WeightOutOfRange(f"weight {w_primary} outside [0, 1]")
    return l_primary * w_primary + cs_total * (1.0 - w_primary)


def classify_favorability(triple: PcbTriple,
                          thresholds: FavorabilityThresholds = FavorabilityThresholds()) -> str:
    """'favorable' iff affinity, strain and clash count are all strictly
    below their thresholds."""
    ok = (
        triple.binding_affinity < thresholds.max_affinity
        and triple.strain_energy < thresholds.max_strain
        and triple.clash_count < thresholds.max_clashes
    )
    return "favorable" if ok else "unfavorable"


def scale_drift(y: float, y_hat: float, k: float,
                params: LanMseParams = LanMseParams()) -> float:
    """Relative drift of the buffered-log difference under scaling by k.

    Scaling both values by k leaves the difference only approximately
    unchanged (the fixed buffers do not rescale); this diagnostic reports
    |num(k*y, k*y_hat) - num(y, y_hat)| / max(|num|, eps) so callers can
    check the approximate-invariance regime (large |y|, k near 1).
    """
    base = log_buffered(y, params) - log_buffered(y_hat, params)
    scaled = log_buffered(k * y, params) - log_buffered(k * y_hat, params)
    return abs(scaled - base) / max(abs(base), params.epsilon)
