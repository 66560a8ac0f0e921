"""Ballistic channel current: thermionic over the barrier top plus WKB tunneling.

Single parabolic band, 2-D channel, current per unit width. Energies are in
eV measured from the source band edge; the source Fermi level sits at
``fermi_level_source`` and the drain one ``drain_bias`` lower. Spin
degeneracy is not included (it only rescales the current, which the
band-offset calibration absorbs).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq
from scipy.special import expit

from ..constants import HBAR, H_PLANCK, K_B, M_E, Q_E

PER_UM = 1e-6       # A/m -> A/um


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class TransportParams:
    effective_mass: float = 0.19        # fraction of m_e
    channel_length: float = 10e-9       # m
    fermi_level_source: float = 0.0     # eV
    band_offset: float = 0.38748214    # eV, barrier top at v_mos = 0 (calibrated)
    drain_bias: float = 0.5             # V
    temperature: float = 300.0          # K
    include_tunneling: bool = True

    def __post_init__(self):
        if not self.effective_mass > 0:
            raise ValueError("effective_mass must be positive")
        if not self.channel_length > 0:
            raise ValueError("channel_length must be positive")
        if not self.temperature > 0:
            raise ValueError("temperature must be positive")

    @property
    def fermi_level_drain(self) -> float:
        return self.fermi_level_source - self.drain_bias

    @property
    def kt_ev(self) -> float:
        return K_B * self.temperature / Q_E

    @property
    def mass_kg(self) -> float:
        return self.effective_mass * M_E


def fermi_dirac_integral(order: float, eta) -> np.ndarray:
    """Normalized complete Fermi-Dirac integral F_j(eta) for j = -1/2 or 1/2.

    F_j(eta) = 1/Gamma(j+1) * int_0^inf x^j / (1 + exp(x - eta)) dx. With
    x = u^2 the integrand is smooth and even in u, so the trapezoid rule
    converges geometrically.
    """
    eta = np.atleast_1d(np.asarray(eta, dtype=float))
    top = math.sqrt(max(float(eta.max()), 0.0) + 60.0)
    u = np.linspace(0.0, top, 1601)
    h = u[1] - u[0]
    occ = expit(eta[:, None] - u[None, :] ** 2)
    if order == -0.5:
        f = occ
        pref = 2.0 / math.sqrt(math.pi)
    elif order == 0.5:
        f = occ * u ** 2
        pref = 4.0 / math.sqrt(math.pi)
    else:
        raise ValueError("order must be -0.5 or 0.5")
    integral = h * (f.sum(axis=1) - 0.5 * f[:, 0] - 0.5 * f[:, -1])
    return pref * integral


def barrier_top(v_mos, params: TransportParams):
    """Barrier top energy in eV; ideal gate control lowers it by v_mos."""
    return params.band_offset - np.asarray(v_mos, dtype=float)


def tob_current(v_mos, params: TransportParams):
    """Thermionic (top-of-barrier) current per um width, A/um."""
    kt = K_B * params.temperature
    e_top = barrier_top(v_mos, params)
    eta_s = (params.fermi_level_source - e_top) / params.kt_ev
    eta_d = (params.fermi_level_drain - e_top) / params.kt_ev
    pref = (Q_E * math.sqrt(2.0 * params.mass_kg) * kt ** 1.5
            / (4.0 * math.pi ** 1.5 * HBAR ** 2))
    scalar = np.ndim(v_mos) == 0
    diff = (fermi_dirac_integral(0.5, np.ravel(eta_s))
            - fermi_dirac_integral(0.5, np.ravel(eta_d)))
    if params.drain_bias == 0:
        diff = np.zeros_like(diff)
    out = pref * diff * PER_UM
    return float(out[0]) if scalar else out.reshape(np.shape(v_mos))


def wkb_action(energy: float, x, u, mass_kg: float) -> float:
    """int kappa dx over U(x) > E for a piecewise-linear profile (x in m, U and E in eV)."""
    x = np.asarray(x, dtype=float)
    d = (np.asarray(u, dtype=float) - energy) * Q_E          # J
    if x.size < 2 or d.size != x.size:
        raise ValueError("barrier profile needs >= 2 matching samples")
    a, b = d[:-1], d[1:]
    length = np.diff(x)
    total = 0.0
    for ai, bi, li in zip(a, b, length):
        if ai <= 0 and bi <= 0:
            continue
        if ai < 0 or bi < 0:
            # keep only the forbidden part of the segment
            frac = max(ai, bi) / (abs(ai) + abs(bi))
            li = li * frac
            ai, bi = max(ai, 0.0), max(bi, 0.0)
        if abs(bi - ai) <= 1e-12 * max(ai, bi):
            total += li * math.sqrt(ai)
        else:
            total += li * (2.0 / 3.0) * (bi ** 1.5 - ai ** 1.5) / (bi - ai)
    return math.sqrt(2.0 * mass_kg) / HBAR * total


def wkb_transmission(energy: float, x, u, params: TransportParams) -> float:
    """exp(-2 int kappa dx), equal to 1 when nothing is forbidden."""
    if energy >= np.max(u):
        return 1.0
    return min(1.0, math.exp(-2.0 * wkb_action(energy, x, u, params.mass_kg)))


def parabolic_barrier(e_top: float, params: TransportParams, n: int = 201):
    """Barrier of height e_top peaking mid-channel, zero at both contacts."""
    s = np.linspace(0.0, 1.0, n)
    return s * params.channel_length, 4.0 * s * (1.0 - s) * e_top


def parabolic_action(energy: float, e_top: float, params: TransportParams) -> float:
    """Closed form of int kappa dx through the parabolic barrier (oracle)."""
    if energy >= e_top or e_top <= 0:
        return 0.0
    e = max(energy, 0.0)
    # U = e_top (1 - (2y/L)^2): forbidden half-width w = (L/2) sqrt(1 - e/e_top)
    return (params.channel_length / 2.0 * math.sqrt(2.0 * params.mass_kg * Q_E) / HBAR
            * math.pi * (e_top - e) / (2.0 * math.sqrt(e_top)))


def _transverse_occupancy(mu_minus_e, params: TransportParams):
    """int dk_y / 2pi f over the transverse band, 1/m."""
    kt = K_B * params.temperature
    return (math.sqrt(2.0 * params.mass_kg * kt) / (2.0 * math.pi * HBAR) * math.sqrt(math.pi)
            * fermi_dirac_integral(-0.5, mu_minus_e / params.kt_ev))


def tunnel_current(v_mos: float, params: TransportParams, epsrel: float = 1e-8) -> float:
    """Landauer current below the barrier top through the parabolic barrier, A/um."""
    e_top = float(barrier_top(v_mos, params))
    if params.drain_bias == 0 or e_top <= 0:
        return 0.0
    efs, efd = params.fermi_level_source, params.fermi_level_drain

    def integrand(e):
        t = math.exp(-2.0 * parabolic_action(e, e_top, params))
        occ = _transverse_occupancy(np.array([efs - e, efd - e]), params)
        return t * (occ[0] - occ[1])

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err, info = quad(integrand, 0.0, e_top, epsrel=epsrel, epsabs=0.0, limit=200,
                              full_output=True)[:3]
    if err > max(10 * epsrel * abs(val), 1e-300) and info.get("last", 0) >= 200:
        raise QuadratureError(
            f"tunnel integral did not converge at v_mos={v_mos:g}: "
            f"value {val:.3e}, error estimate {err:.1e}")
    # dE in J, q/h prefactor
    return Q_E / H_PLANCK * val * Q_E * PER_UM


def drain_current(v_mos, params: TransportParams):
    """Total current per um width, thermionic plus tunneling."""
    tob = tob_current(v_mos, params)
    if not params.include_tunneling:
        return tob
    if np.ndim(v_mos) == 0:
        return tob + tunnel_current(float(v_mos), params)
    tun = np.array([tunnel_current(float(v), params) for v in np.ravel(v_mos)])
    return tob + tun.reshape(np.shape(v_mos))


class CurrentTable:
    """Cubic spline of log I over v_mos for fast evaluation along trajectories.

    The grid grows on demand so any v_mos requested lies inside it.
    """

    def __init__(self, params: TransportParams, step: float = 0.005):
        self.params = params
        self.step = step
        self._lo = None
        self._hi = None
        self._spline = None

    def _build(self, lo: float, hi: float):
        lo = math.floor(lo / self.step) * self.step - 2 * self.step
        hi = math.ceil(hi / self.step) * self.step + 2 * self.step
        v = np.arange(round((hi - lo) / self.step) + 1) * self.step + lo
        logi = _log_current_grid(self.params, tuple(np.round(v, 12)))
        self._lo, self._hi = lo, hi
        self._spline = CubicSpline(v, logi)

    def __call__(self, v_mos):
        v = np.asarray(v_mos, dtype=float)
        lo, hi = float(v.min()), float(v.max())
        if self._spline is None or lo < self._lo or hi > self._hi:
            self._build(min(lo, self._lo if self._lo is not None else lo),
                        max(hi, self._hi if self._hi is not None else hi))
        out = np.exp(self._spline(v))
        return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=64)
def _log_current_grid(params: TransportParams, v: tuple) -> np.ndarray:
    return np.log(drain_current(np.array(v), params))


def subthreshold_slope(v_mos, params: TransportParams):
    """dV/dlog10(I) between consecutive points of a sorted v_mos grid, V/dec."""
    v = np.asarray(v_mos, dtype=float)
    logi = np.log10(drain_current(v, params))
    return np.diff(v) / np.diff(logi)


def calibrate_band_offset(params: TransportParams, target: float = 1e-10, v_mos: float = 0.0,
                          bracket=(-0.5, 1.5)) -> TransportParams:
    """Band offset at which drain_current(v_mos) equals ``target`` (A/um)."""
    def f(offset):
        return math.log(drain_current(v_mos, replace(params, band_offset=offset)) / target)
    offset = brentq(f, *bracket, xtol=1e-12)
    return replace(params, band_offset=offset)
