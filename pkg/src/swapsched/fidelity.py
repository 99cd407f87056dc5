"""Scalar fidelity and success-probability arithmetic for Werner-state pairs.

All times are milliseconds, all fidelities/probabilities are plain floats.
Stored pairs decay along an empirical stretched-exponential curve; swapping
two pairs mixes their noise terms.  Every other module routes its fidelity
math through these functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "FidelityModel",
    "FullyDecoheredError",
    "decoherence_curve",
    "invert_curve",
    "decay_one_slot",
    "swap_fidelity",
    "swap_with_decay",
    "link_success_prob",
    "path_success_prob",
]


class FullyDecoheredError(ValueError):
    """Raised when a fidelity is at or below the decoherence asymptote."""


@dataclass(frozen=True)
class FidelityModel:
    """Decoherence constants plus the slot length.

    The storage curve is ``F(t) = a + b * exp(-(t / tcoh_ms) ** kappa)``;
    ``tau_ms`` is the duration of one scheduling slot.
    """

    a: float = 0.25
    b: float = 0.75
    tcoh_ms: float = 40.0
    kappa: float = 2.0
    tau_ms: float = 2.0

    def __post_init__(self):
        if not (0.0 <= self.a < self.a + self.b <= 1.0):
            raise ValueError(f"need 0 <= a < a+b <= 1, got a={self.a} b={self.b}")
        if self.tcoh_ms <= 0 or self.kappa <= 0 or self.tau_ms <= 0:
            raise ValueError("tcoh_ms, kappa and tau_ms must be positive")


def decoherence_curve(model: FidelityModel, t_ms: float) -> float:
    """Fidelity of a pair after idling ``t_ms`` milliseconds from fresh."""
    if t_ms < 0:
        raise ValueError(f"negative idle time {t_ms}")
    return model.a + model.b * math.exp(-((t_ms / model.tcoh_ms) ** model.kappa))


def invert_curve(model: FidelityModel, fid: float) -> float:
    """Idle time in ms at which the curve reaches ``fid``.

    Only fidelities in ``(a, a + b]`` are invertible; anything at or below
    the asymptote is fully decohered and rejected.
    """
    excess = fid - model.a
    if excess <= 1e-12:
        raise FullyDecoheredError(f"fidelity {fid} at or below asymptote {model.a}")
    if fid > model.a + model.b + 1e-12:
        raise FullyDecoheredError(f"fidelity {fid} above curve maximum {model.a + model.b}")
    if excess >= model.b:
        return 0.0
    return model.tcoh_ms * math.log(model.b / excess) ** (1.0 / model.kappa)


def decay_one_slot(model: FidelityModel, fid: float) -> float:
    """Fidelity after one further slot of idling."""
    return decoherence_curve(model, invert_curve(model, fid) + model.tau_ms)


def swap_fidelity(f1: float, f2: float) -> float:
    """Fidelity of the pair produced by swapping two Werner pairs.

    Symmetric, and exactly 0.25 whenever either input is 0.25 (the grouping
    of the noise term keeps that fixed point bit-exact).
    """
    if f2 < f1:
        f1, f2 = f2, f1
    return f1 * f2 + (1.0 - f1) / 3.0 * (1.0 - f2)


def swap_with_decay(model: FidelityModel, f1: float, f2: float) -> float:
    """Swap two pairs that both decohere during the swap slot."""
    return swap_fidelity(decay_one_slot(model, f1), decay_one_slot(model, f2))


def link_success_prob(lambda_per_km: float, length_km: float, xi: int) -> float:
    """Probability that at least one of ``xi`` entangling attempts succeeds."""
    if lambda_per_km < 0 or length_km < 0:
        raise ValueError("rate and length must be nonnegative")
    if xi < 1:
        raise ValueError(f"attempt count must be >= 1, got {xi}")
    single = math.exp(-lambda_per_km * length_km)
    return 1.0 - (1.0 - single) ** xi


def path_success_prob(link_probs, swap_probs) -> float:
    """Product of per-edge entangling and per-interior-node swap probabilities."""
    prob = 1.0
    for p in link_probs:
        prob *= p
    for p in swap_probs:
        prob *= p
    return prob
