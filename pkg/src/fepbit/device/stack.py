"""Electrostatics of the metal/FE/SiO2/Si stack as three series capacitors."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..constants import EPS0
from ..phasefield.system import StackGeometry


class SingularStackError(ValueError):
    pass


@dataclass(frozen=True)
class StackSolution:
    e_fe: float         # V/m
    v_sio2: float       # V
    v_mos: float        # V
    q_areal: float      # C/m^2
    v_fe: float         # V

    @property
    def v_gate(self) -> float:
        return self.v_fe + self.v_sio2 + self.v_mos


def stack_matrix(stack: StackGeometry) -> np.ndarray:
    """Rows: FE/SiO2 charge continuity, SiO2/MOS continuity, voltage balance.

    Unknowns are (e_fe, v_sio2, v_mos).
    """
    c_ox, c_mos = stack.c_sio2, stack.c_mos
    return np.array([[EPS0, -c_ox, 0.0],
                     [0.0, c_ox, -c_mos],
                     [stack.fe_thickness_h, 1.0, 1.0]])


def solve_stack(v_gate: float, p_mean: float, stack: StackGeometry) -> StackSolution:
    a = stack_matrix(stack)
    if not np.isfinite(np.linalg.cond(a)) or np.linalg.cond(a) > 1e14:
        raise SingularStackError("stack capacitances give a singular system")
    e_fe, v_ox, v_mos = np.linalg.solve(a, np.array([-p_mean, 0.0, v_gate]))
    return StackSolution(float(e_fe), float(v_ox), float(v_mos),
                         float(stack.c_mos * v_mos), float(e_fe * stack.fe_thickness_h))


def v_mos_of(v_gate, p_mean, stack: StackGeometry):
    """Vectorized closed form of ``solve_stack(...).v_mos``."""
    c_s = 1.0 / (1.0 / stack.c_sio2 + 1.0 / stack.c_mos)
    denom = stack.fe_thickness_h + EPS0 / c_s
    e_fe = (np.asarray(v_gate, dtype=float) - np.asarray(p_mean, dtype=float) / c_s) / denom
    return (EPS0 * e_fe + p_mean) / stack.c_mos
