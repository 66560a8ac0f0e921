"""Fixed-seed sweeps of polarization fluctuation against one knob at a time.

Each sweep holds the noise seed and observation window fixed so that only the
swept parameter changes between points. Fluctuation is the std of all samples
about their grand mean (see ``stats.sample_std``).
"""
from __future__ import annotations

import numpy as np

from .dynamics import Waveform, run_trajectory
from .landau import FE2
from .stats import sample_std
from .system import DomainParams, FeSystemConfig, NoiseConfig, sample_domain_params

TREND_STEPS = 300_000
DOMAIN_PITCH = 1e-9          # m, grid spacing for the coupling and sigma sweeps


def _std(cfg: FeSystemConfig, e_field: float, n_steps: int) -> float:
    tr = run_trajectory(cfg, Waveform.constant(e_field, cfg.noise.dt * n_steps))
    return sample_std(tr)


def coupling_sweep(g0_values=(1e-9, 1e-7, 1e-6), n_domains: int = 4, sigma: float = 0.2,
                   e_field: float = 8e8, seed: int = 5, param_seed: int = 1,
                   n_steps: int = TREND_STEPS) -> list[float]:
    doms = sample_domain_params(DomainParams(), sigma, n_domains, param_seed)
    out = []
    for g0 in g0_values:
        cfg = FeSystemConfig(domains=doms, coupling_g0=g0, grid_spacing_dx=DOMAIN_PITCH,
                             noise=NoiseConfig(seed=seed))
        out.append(_std(cfg, e_field, n_steps))
    return out


def two_domain_coupling_sweep(g0_values=(1e-9, 1e-7, 1e-6), e_field: float = 8e8,
                              seed: int = 5, n_steps: int = TREND_STEPS) -> list[float]:
    """FE-1 next to FE-2, as in the two-domain coupling picture."""
    doms = (DomainParams(), DomainParams(FE2))
    return [_std(FeSystemConfig(domains=doms, coupling_g0=g, grid_spacing_dx=DOMAIN_PITCH,
                                noise=NoiseConfig(seed=seed)), e_field, n_steps)
            for g in g0_values]


def sigma_sweep(sigmas=(0.2, 0.4, 0.6), n_domains: int = 4, g0: float = 1e-9,
                e_field: float = 3e9, seed: int = 100, param_seeds=range(8),
                n_steps: int = TREND_STEPS) -> list[float]:
    """Fluctuation averaged over several parameter draws per sigma.

    A single draw of four domains is too small a sample of the variation for
    its std to move monotonically with sigma, so each point is the mean over
    ``param_seeds``. Draws share their standard normals across sigma values.
    """
    out = []
    for s in sigmas:
        vals = []
        for ps in param_seeds:
            doms = sample_domain_params(DomainParams(), s, n_domains, ps)
            cfg = FeSystemConfig(domains=doms, coupling_g0=g0, grid_spacing_dx=DOMAIN_PITCH,
                                 noise=NoiseConfig(seed=seed))
            vals.append(_std(cfg, e_field, n_steps))
        out.append(float(np.mean(vals)))
    return out


def domain_count_sweep(counts=(1, 4, 8, 12), sigma: float = 0.2, g0: float = 1e-7,
                       e_field: float = 0.0, seed: int = 5, param_seed: int = 1,
                       n_steps: int = TREND_STEPS) -> list[float]:
    out = []
    for n in counts:
        doms = sample_domain_params(DomainParams(), sigma, n, param_seed)
        cfg = FeSystemConfig(domains=doms, coupling_g0=g0, noise=NoiseConfig(seed=seed))
        out.append(_std(cfg, e_field, n_steps))
    return out


def temperature_sweep(temps=(100.0, 200.0, 300.0), e_field: float = 0.0, seed: int = 5,
                      n_steps: int = TREND_STEPS) -> list[float]:
    out = []
    for t in temps:
        cfg = FeSystemConfig(noise=NoiseConfig(temperature=t, seed=seed))
        out.append(_std(cfg, e_field, n_steps))
    return out


def timestep_sweep(dts=(5e-12, 2e-11, 8e-11), duration: float = 6e-6, e_field: float = 0.0,
                   seed: int = 5) -> list[float]:
    """Fluctuation over a fixed physical window at several step sizes."""
    out = []
    for dt in dts:
        cfg = FeSystemConfig(noise=NoiseConfig(dt=dt, seed=seed))
        out.append(_std(cfg, e_field, int(round(duration / dt))))
    return out


def strictly_decreasing(xs) -> bool:
    return all(b < a for a, b in zip(xs, xs[1:]))


def strictly_increasing(xs) -> bool:
    return all(b > a for a, b in zip(xs, xs[1:]))
