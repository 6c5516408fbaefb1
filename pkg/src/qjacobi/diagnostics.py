"""Residual-distribution statistics: entropy, participation ratio, top-K mass."""

from __future__ import annotations

import math
from dataclasses import dataclass

SUPPORT_CUTOFF = 1e-12


@dataclass(frozen=True)
class WeightDistribution:
    """Normalized weights p_mu = |c_mu|^2 / sum |c_nu|^2, sorted descending.

    ``raw`` keeps the pre-normalization squared magnitudes so that partial
    sums and the total share one summation order (M_N is then exactly 1).
    """

    raw: tuple[float, ...]
    total: float

    def __post_init__(self):
        if not self.raw:
            raise ValueError("empty weight distribution")
        if abs(sum(self.weights()) - 1.0) > 1e-12:
            raise ValueError("weights do not sum to 1")

    @property
    def support_size(self) -> int:
        return len(self.raw)

    def weights(self) -> tuple[float, ...]:
        return tuple(r / self.total for r in self.raw)

    @classmethod
    def from_amplitudes(cls, amplitudes, cutoff: float = SUPPORT_CUTOFF) -> "WeightDistribution":
        raw = sorted((abs(a) ** 2 for a in amplitudes if abs(a) > cutoff), reverse=True)
        if not raw:
            raise ValueError("no amplitude above the support cutoff")
        return cls(tuple(raw), sum(raw))

    @classmethod
    def from_weights(cls, weights) -> "WeightDistribution":
        raw = tuple(sorted((float(w) for w in weights), reverse=True))
        return cls(raw, sum(raw))


def shannon_entropy(dist: WeightDistribution) -> float:
    """Normalized Shannon entropy (-sum p ln p)/ln N; 0 for a single spike."""
    n = dist.support_size
    if n == 1:
        return 0.0
    s = -sum(p * math.log(p) for p in dist.weights() if p > 0.0)
    return s / math.log(n)


def participation_ratio(dist: WeightDistribution) -> float:
    """1 / sum p^2, the effective number of significant contributors."""
    return 1.0 / sum(p * p for p in dist.weights())


def topk_mass(dist: WeightDistribution, k: int) -> float:
    """Total weight captured by the k largest components; 1 for k >= N."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return sum(dist.raw[:k]) / dist.total
