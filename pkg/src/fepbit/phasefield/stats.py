"""Statistics of sampled polarization."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..constants import K_B
from .dynamics import Trajectory
from .landau import psi_pol
from .system import FeSystemConfig

DEFAULT_BURN_IN = 0.1


@dataclass
class Histogram:
    bin_edges: np.ndarray
    counts: np.ndarray
    density: np.ndarray

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])

    def to_dict(self) -> dict:
        return {"bin_edges": self.bin_edges.tolist(), "counts": self.counts.tolist(),
                "density": self.density.tolist()}


def post_burn_in(traj: Trajectory, domain="all", burn_in: float = DEFAULT_BURN_IN) -> np.ndarray:
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    start = int(round(burn_in * len(traj)))
    p = traj.p_samples[start:]
    if domain == "all":
        return p.reshape(-1)
    if domain == "mean":
        return p.mean(axis=1)
    return p[:, int(domain)]


def polarization_histogram(traj: Trajectory, domain="all", n_bins: int = 50,
                           burn_in: float = DEFAULT_BURN_IN, range=None) -> Histogram:
    if n_bins < 2:
        raise ValueError("n_bins must be >= 2")
    x = post_burn_in(traj, domain, burn_in)
    if range is None:
        lo, hi = float(x.min()), float(x.max())
        if lo == hi:
            lo, hi = lo - 0.5e-6 * max(1.0, abs(lo)), hi + 0.5e-6 * max(1.0, abs(hi))
        range = (lo, hi)
    counts, edges = np.histogram(x, bins=n_bins, range=range)
    widths = np.diff(edges)
    total = counts.sum()
    density = counts / (total * widths) if total else np.zeros_like(widths)
    return Histogram(edges, counts, density)


def sample_std(traj: Trajectory, domain="all", burn_in: float = DEFAULT_BURN_IN) -> float:
    """Fluctuation std of the sampled polarization.

    ``"all"`` pools every domain sample about the grand mean, so the spread of
    domain centres counts as fluctuation range. ``"within"`` pools only the
    deviations of each domain about its own mean. ``"mean"`` is the std of the
    domain-averaged polarization; an integer selects one domain.
    """
    start = int(round(burn_in * len(traj)))
    p = traj.p_samples[start:]
    if domain == "all":
        return float(np.std(p))
    if domain == "within":
        return float(np.sqrt(np.mean(np.var(p, axis=0))))
    if domain == "mean":
        return float(np.std(p.mean(axis=1)))
    return float(np.std(p[:, int(domain)]))


def density_overlap(a: Histogram, b: Histogram) -> float:
    """Overlap area of two normalized densities on the same bins."""
    if not np.array_equal(a.bin_edges, b.bin_edges):
        raise ValueError("histograms must share bin edges")
    return float(np.sum(np.minimum(a.density, b.density) * np.diff(a.bin_edges)))


def effective_energy(p, cfg: FeSystemConfig, e_field: float, domain: int = 0):
    """W_eff(p) = psi_pol - E p + k_dep p^2 / 2 for an isolated domain (J/m^3)."""
    d = cfg.domains[domain]
    p = np.asarray(p, dtype=float)
    return (psi_pol(p, d.landau, cfg.noise.temperature) - e_field * p
            + 0.5 * cfg.stack.depolarization_coefficient * p * p)


def boltzmann_log_density(p, cfg: FeSystemConfig, e_field: float, domain: int = 0):
    """Unnormalized log of the stationary density, -V_char W_eff / (k_B T)."""
    return -cfg.noise.v_char * effective_energy(p, cfg, e_field, domain) / (K_B * cfg.noise.temperature)


def log_density_profile_error(hist: Histogram, cfg: FeSystemConfig, e_field: float,
                              min_count: int = 1000, domain: int = 0) -> np.ndarray:
    """Per-bin error of the empirical log-density against the Boltzmann law.

    The free additive constant is fitted by count-weighted least squares over
    bins holding at least ``min_count`` samples. Errors are reported relative
    to the span of the theoretical log-density over those bins.
    """
    m = hist.counts >= min_count
    if m.sum() < 2:
        raise ValueError("fewer than two bins meet the count threshold")
    x = hist.centers[m]
    emp = np.log(hist.density[m])
    th = boltzmann_log_density(x, cfg, e_field, domain)
    w = hist.counts[m].astype(float)
    c = np.sum(w * (emp - th)) / w.sum()
    span = th.max() - th.min()
    return np.abs(emp - th - c) / span
