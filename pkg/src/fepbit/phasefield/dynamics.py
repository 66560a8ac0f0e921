"""Stochastic time-dependent Landau-Ginzburg integration.

Per domain i of a 1-D chain with zero-flux ends:

    dp_i/dt = ( -psi'(p_i) + G0 lap(p)_i / dx^2 - k_dep p_i + E_fe ) / mu_i + eta_i

The drift is advanced with classical RK4; the thermal noise eta_i is drawn
once per step and added as an Euler increment eta_i * dt afterwards.
E_fe is an affine function of the applied drive and of the mean
polarization (``FieldMap``), which covers both a directly applied field and
the quasi-static FeFET gate stack.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numba
import numpy as np

from ..constants import EPS0, K_B
from ..rng import stream
from .landau import spontaneous_polarization
from .system import FeState, FeSystemConfig, NoiseConfig, StackGeometry

CHUNK = 16384
# RK4 is stable on the negative real axis up to |lambda dt| ~ 2.78
_RK4_SAFE = 2.0


class DivergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class FieldMap:
    """E_fe = gain * drive + feedback * mean(p)."""
    gain: float = 1.0
    feedback: float = 0.0

    @classmethod
    def direct(cls) -> "FieldMap":
        return cls(1.0, 0.0)

    @classmethod
    def from_stack(cls, stack: StackGeometry) -> "FieldMap":
        # eps0 E + p = Q = C_s (V_g - E h), C_s = SiO2 and MOS in series
        c_s = 1.0 / (1.0 / stack.c_sio2 + 1.0 / stack.c_mos)
        denom = stack.fe_thickness_h + EPS0 / c_s
        return cls(1.0 / denom, -1.0 / (c_s * denom))


@dataclass(frozen=True)
class Waveform:
    """Piecewise-constant drive: sequence of (duration in s, value)."""
    segments: tuple

    def __post_init__(self):
        segs = tuple((float(d), float(v)) for d, v in self.segments)
        if not segs:
            raise ValueError("empty waveform")
        object.__setattr__(self, "segments", segs)

    @classmethod
    def constant(cls, value: float, duration: float) -> "Waveform":
        return cls(((duration, value),))

    def step_counts(self, dt: float) -> list[int]:
        counts = []
        for d, _ in self.segments:
            n = d / dt
            k = int(round(n))
            if k < 1 or abs(n - k) > 1e-6 * max(1.0, n):
                raise ValueError(f"segment duration {d} is not a positive multiple of dt={dt}")
            counts.append(k)
        return counts

    @property
    def duration(self) -> float:
        return sum(d for d, _ in self.segments)


@dataclass
class Trajectory:
    times: np.ndarray
    p_samples: np.ndarray          # (n_samples, n_domains)
    drive: Waveform
    sampling_stride: int
    drive_samples: np.ndarray      # drive value in force at each sample
    dt: float
    final_state: FeState | None = None
    meta: dict = field(default_factory=dict)

    @property
    def n_domains(self) -> int:
        return self.p_samples.shape[1]

    @property
    def p_mean(self) -> np.ndarray:
        return self.p_samples.mean(axis=1)

    def __len__(self):
        return len(self.times)


def alpha_arrays(cfg: FeSystemConfig):
    a1, a11, a111, mu = cfg.arrays()
    return a1, a11, a111, mu


def laplacian(p: np.ndarray) -> np.ndarray:
    """Nearest-neighbour second difference with zero-flux ends (unit spacing)."""
    lap = np.zeros_like(p)
    if p.size > 1:
        d = np.diff(p)
        lap[:-1] += d
        lap[1:] -= d
    return lap


def deterministic_rhs(state: FeState, e_external: float, cfg: FeSystemConfig,
                      field_map: FieldMap | None = None) -> np.ndarray:
    """Polarization transition rate dp/dt without noise (C m^-2 s^-1)."""
    fm = field_map or FieldMap.direct()
    p = np.asarray(state.p, dtype=float)
    if p.shape != (cfg.n_domains,):
        raise ValueError(f"state has {p.size} domains, config has {cfg.n_domains}")
    a1, a11, a111, mu = cfg.arrays()
    p2 = p * p
    dpsi = p * (2 * a1 + p2 * (4 * a11 + 6 * a111 * p2))
    e_fe = fm.gain * e_external + fm.feedback * p.mean()
    coupling = cfg.coupling_g0 / cfg.dx ** 2 * laplacian(p)
    e_dep = cfg.stack.depolarization_coefficient * p
    return (-dpsi + coupling - e_dep + e_fe) / mu


def noise_amplitude(noise: NoiseConfig, mu) -> np.ndarray:
    """Standard deviation of eta for viscosity mu (C m^-2 s^-1)."""
    mu = np.asarray(mu, dtype=float)
    return np.sqrt(2.0 * K_B * noise.temperature / (mu * noise.v_char * noise.dt))


def domain_streams(seed: int, n_domains: int, traj_index: int = 0) -> list[np.random.Generator]:
    return [stream(seed, traj_index, i) for i in range(n_domains)]


def noise_sample(cfg: NoiseConfig, rng_streams, mu, size: int | None = None) -> np.ndarray:
    """Draw eta for each domain: one stream and one viscosity per domain.

    With ``size`` given, returns an array (size, n_domains) of consecutive draws.
    """
    amp = noise_amplitude(cfg, mu).reshape(-1)
    gens = list(rng_streams)
    if len(gens) != amp.size:
        raise ValueError("need one rng stream per domain")
    n = 1 if size is None else size
    g = np.empty((n, amp.size))
    for i, gen in enumerate(gens):
        g[:, i] = gen.standard_normal(n)
    out = g * amp
    return out[0] if size is None else out


@numba.njit(cache=True)
def _rhs(p, out, v, a1, a11, a111, mu, g0dx2, kdep, gain, feedback):
    n = p.shape[0]
    mean = 0.0
    for i in range(n):
        mean += p[i]
    mean /= n
    e_fe = gain * v + feedback * mean
    for i in range(n):
        x = p[i]
        x2 = x * x
        dpsi = x * (2.0 * a1[i] + x2 * (4.0 * a11[i] + 6.0 * a111[i] * x2))
        lap = 0.0
        if i > 0:
            lap += p[i - 1] - x
        if i < n - 1:
            lap += p[i + 1] - x
        out[i] = (-dpsi + g0dx2 * lap - kdep * x + e_fe) / mu[i]


@numba.njit(cache=True)
def _stiffness(p, a1, a11, a111, mu, g0dx2, kdep, feedback):
    n = p.shape[0]
    lam = 0.0
    for i in range(n):
        x2 = p[i] * p[i]
        c = abs(2.0 * a1[i] + 12.0 * a11[i] * x2 + 30.0 * a111[i] * x2 * x2)
        c += kdep + abs(feedback)
        if n > 1:
            c += 4.0 * g0dx2
        c /= mu[i]
        if c > lam:
            lam = c
    return lam


@numba.njit(cache=True)
def _integrate(p, n_steps, v, a1, a11, a111, mu, g0dx2, kdep, gain, feedback, dt,
               noise, clamp, stride, step0, out, out_pos):
    """Advance p in place; returns (status, out_pos, bad_step, bad_domain).

    status 0: ok, 1: |p| exceeded clamp or became non-finite.
    """
    n = p.shape[0]
    k1 = np.empty(n)
    k2 = np.empty(n)
    k3 = np.empty(n)
    k4 = np.empty(n)
    tmp = np.empty(n)
    use_noise = noise.shape[0] > 0
    for s in range(n_steps):
        lam = _stiffness(p, a1, a11, a111, mu, g0dx2, kdep, feedback)
        m = 1
        if lam * dt > 2.0:
            m = int(math.ceil(lam * dt / 2.0))
        h = dt / m
        for _ in range(m):
            _rhs(p, k1, v, a1, a11, a111, mu, g0dx2, kdep, gain, feedback)
            for i in range(n):
                tmp[i] = p[i] + 0.5 * h * k1[i]
            _rhs(tmp, k2, v, a1, a11, a111, mu, g0dx2, kdep, gain, feedback)
            for i in range(n):
                tmp[i] = p[i] + 0.5 * h * k2[i]
            _rhs(tmp, k3, v, a1, a11, a111, mu, g0dx2, kdep, gain, feedback)
            for i in range(n):
                tmp[i] = p[i] + h * k3[i]
            _rhs(tmp, k4, v, a1, a11, a111, mu, g0dx2, kdep, gain, feedback)
            for i in range(n):
                p[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        if use_noise:
            for i in range(n):
                p[i] += noise[s, i] * dt
        for i in range(n):
            if not (abs(p[i]) <= clamp):
                return 1, out_pos, s, i
        if (step0 + s + 1) % stride == 0:
            for i in range(n):
                out[out_pos, i] = p[i]
            out_pos += 1
    return 0, out_pos, -1, -1


def _kernel_args(cfg: FeSystemConfig, field_map: FieldMap):
    a1, a11, a111, mu = cfg.arrays()
    g0dx2 = cfg.coupling_g0 / cfg.dx ** 2
    return (a1, a11, a111, mu, g0dx2, cfg.stack.depolarization_coefficient,
            field_map.gain, field_map.feedback)


def rk4_step(state: FeState, e_external: float, cfg: FeSystemConfig, rng_streams=None,
             field_map: FieldMap | None = None) -> FeState:
    """One time step: RK4 drift followed by an additive noise increment.

    ``rng_streams`` is one Generator per domain, or None for a noise-free step.
    """
    fm = field_map or FieldMap.direct()
    dt = cfg.noise.dt
    p = np.array(state.p, dtype=float)
    if rng_streams is not None and cfg.noise.temperature > 0:
        _, _, _, mu = cfg.arrays()
        noise = noise_sample(cfg.noise, rng_streams, mu, size=1)
    else:
        noise = np.empty((0, p.size))
    out = np.empty((1, p.size))
    status, _, _, dom = _integrate(p, 1, float(e_external), *_kernel_args(cfg, fm), dt,
                                   noise, cfg.clamp, 1, 0, out, 0)
    if status:
        raise DivergenceError(f"|p| exceeded clamp {cfg.clamp:.3g} in domain {dom} at t={state.time + dt:.4g} s")
    return FeState(p, state.time + dt)


def negative_sp_init(cfg: FeSystemConfig, first_value: float = 0.0) -> FeState:
    """Each domain at its zero-field spontaneous polarization, opposite to the drive."""
    sign = -1.0 if first_value >= 0 else 1.0
    t = cfg.noise.temperature
    p = np.zeros(cfg.n_domains)
    for i, d in enumerate(cfg.domains):
        try:
            p[i] = sign * max(abs(r) for r in spontaneous_polarization(d.landau, t, 0.0))
        except ValueError:
            p[i] = 0.0
    return FeState(p, 0.0)


def run_trajectory(cfg: FeSystemConfig, drive: Waveform, initial: FeState | str = "negative-sp",
                   sampling_stride: int = 1, field_map: FieldMap | None = None,
                   noise: bool = True, traj_index: int = 0) -> Trajectory:
    """Integrate the full drive and record every ``sampling_stride``-th step.

    Without a field map the drive value is the applied field E_fe in V/m.
    Noise for domain i is drawn from stream (seed, traj_index, i).
    """
    if not isinstance(drive, Waveform):
        drive = Waveform(tuple(drive))
    if sampling_stride < 1:
        raise ValueError("sampling_stride must be >= 1")
    fm = field_map or FieldMap.direct()
    dt = cfg.noise.dt
    counts = drive.step_counts(dt)
    if isinstance(initial, str):
        if initial != "negative-sp":
            raise ValueError(f"unknown initial state {initial!r}")
        state = negative_sp_init(cfg, drive.segments[0][1])
    else:
        state = FeState(np.array(initial.p, dtype=float), initial.time)
    if state.p.size != cfg.n_domains:
        raise ValueError("initial state length does not match the number of domains")

    n = cfg.n_domains
    total = sum(counts)
    n_samples = total // sampling_stride
    out = np.empty((n_samples, n))
    drive_samples = np.empty(n_samples)
    args = _kernel_args(cfg, fm)
    _, _, _, mu = cfg.arrays()
    noisy = noise and cfg.noise.temperature > 0
    if noisy:
        gens = domain_streams(cfg.noise.seed, n, traj_index)
        amp = noise_amplitude(cfg.noise, mu)
    empty = np.empty((0, n))
    clamp = cfg.clamp
    p = state.p.copy()
    step = 0
    pos = 0
    for (_, value), k in zip(drive.segments, counts):
        done = 0
        while done < k:
            m = min(CHUNK, k - done)
            if noisy:
                g = np.empty((m, n))
                for i, gen in enumerate(gens):
                    g[:, i] = gen.standard_normal(m)
                g *= amp
            else:
                g = empty
            start = pos
            status, pos, bad, dom = _integrate(p, m, value, *args, dt, g, clamp,
                                               sampling_stride, step, out, pos)
            drive_samples[start:pos] = value
            if status:
                t_bad = state.time + (step + bad + 1) * dt
                raise DivergenceError(
                    f"|p| exceeded clamp {clamp:.3g} C/m^2 in domain {dom} at t={t_bad:.4g} s "
                    f"(drive={value:g})")
            step += m
            done += m
    times = state.time + dt * sampling_stride * np.arange(1, n_samples + 1)
    return Trajectory(times, out, drive, sampling_stride, drive_samples, dt,
                      final_state=FeState(p, state.time + total * dt))


def settle(cfg: FeSystemConfig, value: float, state: FeState, field_map: FieldMap | None = None,
           tol: float = 1e-6, max_steps: int = 1_000_000, check_every: int = 100) -> tuple[FeState, bool, int]:
    """Noise-free relaxation until max|dp/dt| * dt < tol (C/m^2).

    Returns (state, converged, steps taken).
    """
    fm = field_map or FieldMap.direct()
    args = _kernel_args(cfg, fm)
    dt = cfg.noise.dt
    p = np.array(state.p, dtype=float)
    empty = np.empty((0, p.size))
    scratch = np.empty((0, p.size))
    steps = 0
    while True:
        rate = deterministic_rhs(FeState(p), value, cfg, fm)
        if np.max(np.abs(rate)) * dt < tol:
            return FeState(p, state.time + steps * dt), True, steps
        if steps >= max_steps:
            return FeState(p, state.time + steps * dt), False, steps
        m = min(check_every, max_steps - steps)
        status, _, _, dom = _integrate(p, m, value, *args, dt, empty, cfg.clamp, m + 1, 0, scratch, 0)
        if status:
            raise DivergenceError(f"noise-free relaxation diverged in domain {dom}")
        steps += m


def stationary_state(cfg: FeSystemConfig, value: float, guess: Sequence[float],
                     field_map: FieldMap | None = None) -> np.ndarray:
    """Root of the coupled noise-free rate equations near ``guess``."""
    from scipy.optimize import fsolve

    fm = field_map or FieldMap.direct()
    _, _, _, mu = cfg.arrays()

    def f(p):
        return deterministic_rhs(FeState(p), value, cfg, fm) * mu / 1e9

    sol, info, ier, msg = fsolve(f, np.asarray(guess, dtype=float), full_output=True, xtol=1e-13)
    if ier != 1:
        raise RuntimeError(f"stationary solve failed: {msg}")
    return sol
