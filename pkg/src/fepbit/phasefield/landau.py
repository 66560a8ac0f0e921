"""Landau double-well energy of a single ferroelectric domain.

Energy density (J/m^3) of the out-of-plane polarization p (C/m^2):

    psi(p) = a1(T) p^2 + a11 p^4 + a111 p^6,   a1(T) = a0 (Tc - T) / Tc
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LandauSet:
    alpha0: float       # m/F
    alpha11: float      # m^5 C^-2 F^-1
    alpha111: float     # m^9 C^-4 F^-1
    t_curie: float      # K

    def __post_init__(self):
        if not self.alpha111 > 0:
            raise ValueError(f"alpha111 must be positive, got {self.alpha111}")
        if not self.t_curie > 0:
            raise ValueError(f"t_curie must be positive, got {self.t_curie}")

    def scaled(self, alpha0: float = 1.0, alpha11: float = 1.0, alpha111: float = 1.0) -> "LandauSet":
        return LandauSet(self.alpha0 * alpha0, self.alpha11 * alpha11,
                         self.alpha111 * alpha111, self.t_curie)


# HZO coefficients; FE2 is the higher-barrier variant.
FE1 = LandauSet(alpha0=-4.0e8, alpha11=3.7e9, alpha111=1.1e9, t_curie=450.0)
FE2 = LandauSet(alpha0=-2.4e9, alpha11=1.3e10, alpha111=1.1e10, t_curie=450.0)

PRESETS = {"fe1": FE1, "fe2": FE2}


def alpha1_of_temperature(landau: LandauSet, t: float) -> float:
    if t < 0:
        raise ValueError("temperature must be >= 0")
    return landau.alpha0 * (landau.t_curie - t) / landau.t_curie


def psi_pol(p, landau: LandauSet, t: float):
    a1 = alpha1_of_temperature(landau, t)
    p2 = np.square(p)
    return a1 * p2 + landau.alpha11 * p2 ** 2 + landau.alpha111 * p2 ** 3


def dpsi_pol(p, landau: LandauSet, t: float):
    """First derivative of psi_pol with respect to p (V/m)."""
    a1 = alpha1_of_temperature(landau, t)
    p = np.asarray(p, dtype=float)
    p2 = p * p
    return p * (2.0 * a1 + p2 * (4.0 * landau.alpha11 + 6.0 * landau.alpha111 * p2))


def d2psi_pol(p, landau: LandauSet, t: float):
    a1 = alpha1_of_temperature(landau, t)
    p2 = np.square(p)
    return 2.0 * a1 + 12.0 * landau.alpha11 * p2 + 30.0 * landau.alpha111 * p2 ** 2


def spontaneous_polarization(landau: LandauSet, t: float, e_field: float = 0.0,
                             stiffness: float = 0.0) -> list[float]:
    """Stable stationary polarizations under a uniform field.

    Returns the real roots of dpsi/dp + stiffness*p - E = 0 that are local
    minima of psi + stiffness*p^2/2 - E*p, sorted ascending. ``stiffness``
    folds in any linear restoring field (depolarization, stack feedback).
    """
    a1 = alpha1_of_temperature(landau, t)
    c1 = 2.0 * a1 + stiffness
    # 6 a111 p^5 + 4 a11 p^3 + c1 p - E
    coeffs = np.array([6.0 * landau.alpha111, 0.0, 4.0 * landau.alpha11, 0.0, c1, -e_field])
    if not np.any(coeffs[:-1]):
        raise ValueError("no stable root: degenerate Landau polynomial")
    # rescale p so the polynomial is well conditioned
    scale = 0.1
    scaled = coeffs * scale ** np.arange(5, -1, -1)
    roots = np.roots(np.trim_zeros(scaled, "f")) * scale
    real = roots[np.abs(roots.imag) <= 1e-7 * np.maximum(1.0, np.abs(roots))].real

    def g(p):
        return 6 * landau.alpha111 * p ** 5 + 4 * landau.alpha11 * p ** 3 + c1 * p - e_field

    def dg(p):
        return 30 * landau.alpha111 * p ** 4 + 12 * landau.alpha11 * p ** 2 + c1

    stable = []
    for p in real:
        for _ in range(50):
            d = dg(p)
            if d == 0:
                break
            step = g(p) / d
            p -= step
            if abs(step) <= 1e-15 * max(1.0, abs(p)):
                break
        if dg(p) > 0:
            stable.append(float(p))
    if not stable:
        raise ValueError("no stable root")
    stable.sort()
    out = [stable[0]]
    for p in stable[1:]:
        if abs(p - out[-1]) > 1e-10:
            out.append(p)
    return out
