"""Current trace to bitstream through a load resistor and an ideal comparator."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import binomtest


@dataclass(frozen=True)
class ThresholdChain:
    r_load: float = 4e9         # Ohm
    v_dd: float = 0.8           # V
    v_th: float = 0.4           # V
    width_um: float = 1.0       # device width the per-um current is scaled by

    def __post_init__(self):
        if not self.r_load > 0:
            raise ValueError("r_load must be positive")
        if not 0 < self.v_th < self.v_dd:
            raise ValueError("need 0 < v_th < v_dd")
        if not self.width_um > 0:
            raise ValueError("width_um must be positive")

    @property
    def equivalent_current_threshold(self) -> float:
        """A/um at which the load voltage reaches v_th."""
        return self.v_th / (self.r_load * self.width_um)

    @classmethod
    def for_current_threshold(cls, i_th: float = 1e-10, v_dd: float = 0.8,
                              width_um: float = 1.0) -> "ThresholdChain":
        """Chain with v_th = v_dd/2 and r_load set so the threshold is ``i_th`` A/um."""
        v_th = v_dd / 2.0
        return cls(v_th / (i_th * width_um), v_dd, v_th, width_um)


def threshold_bitstream(current, chain: ThresholdChain) -> np.ndarray:
    """1 where I * width * r_load > v_th, else 0 (ties give 0)."""
    i = np.asarray(current, dtype=float)
    if i.size == 0:
        raise ValueError("empty current series")
    return (i * chain.width_um * chain.r_load > chain.v_th).astype(np.uint8)


@dataclass(frozen=True)
class ProbabilityEstimate:
    p: float
    half_width: float           # Wilson 95% interval, half of its length
    n: int
    low: float
    high: float


def probability(bits, confidence: float = 0.95) -> ProbabilityEstimate:
    b = np.asarray(bits)
    if b.size == 0:
        raise ValueError("empty bitstream")
    k, n = int(np.count_nonzero(b)), int(b.size)
    ci = binomtest(k, n).proportion_ci(confidence_level=confidence, method="wilson")
    return ProbabilityEstimate(k / n, 0.5 * (ci.high - ci.low), n, float(ci.low), float(ci.high))
