"""Configuration types for a chain of coupled ferroelectric domains."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from ..constants import EPS0
from ..rng import stream
from .landau import FE1, LandauSet, spontaneous_polarization


@dataclass(frozen=True)
class DomainParams:
    landau: LandauSet = FE1
    viscosity_mu: float = 10.0      # Ohm m

    def __post_init__(self):
        if not self.viscosity_mu > 0:
            raise ValueError(f"viscosity_mu must be positive, got {self.viscosity_mu}")


@dataclass(frozen=True)
class StackGeometry:
    """TiN/HZO/SiO2/Si gate stack.

    ``si_thickness`` is the effective thickness of the linear MOS capacitor.
    Its default is a calibration (see README), not a physical Si thickness.
    """
    fe_thickness_h: float = 6e-9
    lambda1_over_eps0: float = 0.05e-10
    lambda2_over_eps0: float = 2.5e-10
    eps_background: float = 30.0
    sio2_thickness: float = 2e-9
    eps_sio2: float = 3.9
    si_thickness: float = 2.3e-11
    eps_si: float = 11.7
    depolarization: bool = True

    def __post_init__(self):
        for name in ("fe_thickness_h", "lambda1_over_eps0", "lambda2_over_eps0",
                     "sio2_thickness", "si_thickness"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        for name in ("eps_background", "eps_sio2", "eps_si"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def depolarization_coefficient(self) -> float:
        """E_dep / p in V/m per C/m^2 (zero when depolarization is disabled)."""
        if not self.depolarization:
            return 0.0
        lam = self.lambda1_over_eps0 + self.lambda2_over_eps0
        return lam / (EPS0 * (self.fe_thickness_h + lam * self.eps_background))

    @property
    def c_sio2(self) -> float:
        return EPS0 * self.eps_sio2 / self.sio2_thickness

    @property
    def c_mos(self) -> float:
        return EPS0 * self.eps_si / self.si_thickness


@dataclass(frozen=True)
class NoiseConfig:
    temperature: float = 300.0      # K
    v_char: float = 1.38e-29        # m^3
    dt: float = 2e-11               # s
    seed: int = 0

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if not self.v_char > 0:
            raise ValueError("v_char must be positive")
        if not self.dt > 0:
            raise ValueError("dt must be positive")


@dataclass(frozen=True)
class FeSystemConfig:
    domains: tuple = (DomainParams(),)
    coupling_g0: float = 0.0                 # m^3/F
    grid_spacing_dx: float | None = None     # m; None -> v_char ** (1/3)
    stack: StackGeometry = field(default_factory=StackGeometry)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    p_clamp: float | None = None             # C/m^2; None -> 10x zero-field SP

    def __post_init__(self):
        object.__setattr__(self, "domains", tuple(self.domains))
        if len(self.domains) < 1:
            raise ValueError("need at least one domain")
        if self.coupling_g0 < 0:
            raise ValueError("coupling_g0 must be >= 0")
        if self.grid_spacing_dx is not None and not self.grid_spacing_dx > 0:
            raise ValueError("grid_spacing_dx must be positive")

    @property
    def n_domains(self) -> int:
        return len(self.domains)

    @property
    def dx(self) -> float:
        if self.grid_spacing_dx is None:
            return self.noise.v_char ** (1.0 / 3.0)
        return self.grid_spacing_dx

    @property
    def clamp(self) -> float:
        if self.p_clamp is not None:
            return self.p_clamp
        t = self.noise.temperature
        ps = 0.0
        for d in self.domains:
            try:
                ps = max(ps, max(abs(r) for r in spontaneous_polarization(d.landau, t, 0.0)))
            except ValueError:
                pass
        return 10.0 * ps if ps > 0 else 10.0

    def arrays(self):
        """Per-domain (alpha1, alpha11, alpha111, mu) as float arrays."""
        t = self.noise.temperature
        a1 = np.array([d.landau.alpha0 * (d.landau.t_curie - t) / d.landau.t_curie for d in self.domains])
        a11 = np.array([d.landau.alpha11 for d in self.domains])
        a111 = np.array([d.landau.alpha111 for d in self.domains])
        mu = np.array([d.viscosity_mu for d in self.domains])
        return a1, a11, a111, mu

    def with_noise(self, **kw) -> "FeSystemConfig":
        return replace(self, noise=replace(self.noise, **kw))

    def with_stack(self, **kw) -> "FeSystemConfig":
        return replace(self, stack=replace(self.stack, **kw))


@dataclass
class FeState:
    p: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.p = np.array(self.p, dtype=float).reshape(-1)


def depolarization_field(p_mean, stack: StackGeometry):
    """Depolarization field magnitude, directed along p (V/m).

    The dynamics subtract this field, so it always opposes net polarization.
    """
    return stack.depolarization_coefficient * np.asarray(p_mean, dtype=float)


def uniform_chain(base: DomainParams, n: int) -> tuple:
    return tuple(base for _ in range(n))


def sample_domain_params(base: DomainParams, sigma_fraction: float, n_domains: int,
                         seed: int, min_factor: float = 0.1) -> list[DomainParams]:
    """Gaussian domain-to-domain variation of alpha0, alpha11, alpha111 and mu.

    Each parameter of each domain is drawn from its own stream, keyed by
    (domain index, parameter index), so domain i is the same whatever the
    chain length. A draw that flips the sign of the base value, or shrinks it
    below ``min_factor`` of its magnitude, is redrawn.
    """
    if sigma_fraction < 0:
        raise ValueError("sigma_fraction must be >= 0")
    if sigma_fraction == 0:
        return [base] * n_domains
    lan = base.landau
    bases = (lan.alpha0, lan.alpha11, lan.alpha111, base.viscosity_mu)
    out = []
    for i in range(n_domains):
        vals = []
        for k, b in enumerate(bases):
            g = stream(seed, i, k)
            while True:
                factor = 1.0 + sigma_fraction * g.standard_normal()
                if factor >= min_factor:
                    break
            vals.append(b * factor)
        out.append(DomainParams(LandauSet(vals[0], vals[1], vals[2], lan.t_curie), vals[3]))
    return out


def stationary_polarization(cfg: FeSystemConfig, e_field: float, domain: int = 0) -> list[float]:
    """Noise-free stable roots for one isolated domain including depolarization."""
    d = cfg.domains[domain]
    return spontaneous_polarization(d.landau, cfg.noise.temperature, e_field,
                                    stiffness=cfg.stack.depolarization_coefficient)


def chain(domains: Sequence[DomainParams], **kw) -> FeSystemConfig:
    return FeSystemConfig(domains=tuple(domains), **kw)
