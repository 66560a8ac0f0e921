"""FeFET: ferroelectric dynamics under the gate stack, read out as drain current."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ..phasefield.dynamics import (FieldMap, Waveform, negative_sp_init, run_trajectory,
                                   settle)
from ..phasefield.system import FeState, FeSystemConfig
from .stack import v_mos_of
from .transport import CurrentTable, TransportParams, drain_current


class SettlementError(RuntimeError):
    pass


def device_field_map(cfg: FeSystemConfig) -> FieldMap:
    return FieldMap.from_stack(cfg.stack)


@lru_cache(maxsize=16)
def current_table(params: TransportParams) -> CurrentTable:
    return CurrentTable(params)


def current_from_polarization(v_gate, p_mean, cfg: FeSystemConfig, transport: TransportParams,
                              exact: bool = False):
    """Drain current (A/um) for gate voltage(s) and mean polarization(s)."""
    v_mos = v_mos_of(v_gate, p_mean, cfg.stack)
    if exact:
        return drain_current(v_mos, transport)
    return current_table(transport)(v_mos)


@dataclass(frozen=True)
class BiasProtocol:
    v_init: float = -3.0
    init_duration: float = 1e-7
    gate_levels: tuple = ()
    hold_duration: float = 1e-5

    def __post_init__(self):
        object.__setattr__(self, "gate_levels", tuple(float(v) for v in self.gate_levels))
        if not (self.init_duration > 0 and self.hold_duration > 0):
            raise ValueError("init_duration and hold_duration must be positive")

    def check(self, dt: float):
        for name in ("init_duration", "hold_duration"):
            n = getattr(self, name) / dt
            if abs(n - round(n)) > 1e-6 * max(1.0, n):
                raise ValueError(f"{name} is not a multiple of dt={dt:g}")


@dataclass
class IVCurve:
    v_gate: np.ndarray
    current: np.ndarray
    p_mean: np.ndarray
    converged: np.ndarray
    direction: str = "forward"

    def rows(self):
        return [(float(v), float(i)) for v, i in zip(self.v_gate, self.current)]


@dataclass
class BiasTrace:
    v_gate: float
    times: np.ndarray           # s, measured from the start of the hold
    p_mean: np.ndarray
    current: np.ndarray

    def decades(self) -> float:
        return fluctuation_range(self.current)


@dataclass
class StochasticIV:
    traces: list
    meta: dict = field(default_factory=dict)

    def rows(self):
        for tr in self.traces:
            for t, i in zip(tr.times, tr.current):
                yield float(t), tr.v_gate, float(i)


def fluctuation_range(current) -> float:
    """Span of a current trace in decades, log10(max / min)."""
    c = np.asarray(current, dtype=float)
    return float(math.log10(c.max() / c.min()))


def iv_noiseless(cfg: FeSystemConfig, transport: TransportParams, sweep, direction: str = "forward",
                 dwell: float | None = None, tol: float = 1e-6, max_steps: int = 1_000_000,
                 strict: bool = False) -> IVCurve:
    """Noise-free I-V along ``sweep`` (reversed for direction="reverse").

    With ``dwell`` None each bias point relaxes until max|dp/dt|*dt < tol.
    With a dwell time the polarization only evolves for that long at each
    point, which is a sweep at finite rate and shows dynamic hysteresis.
    The polarization state carries over from point to point.
    """
    if direction not in ("forward", "reverse"):
        raise ValueError("direction must be 'forward' or 'reverse'")
    v = np.asarray(sweep, dtype=float)
    if direction == "reverse":
        v = v[::-1]
    fm = device_field_map(cfg)
    state = negative_sp_init(cfg, 1.0 if direction == "forward" else -1.0)
    p_mean = np.empty(v.size)
    ok = np.ones(v.size, dtype=bool)
    for k, vg in enumerate(v):
        if dwell is None:
            state, ok[k], _ = settle(cfg, vg, state, fm, tol=tol, max_steps=max_steps)
            if strict and not ok[k]:
                raise SettlementError(f"no settlement within {max_steps} steps at V_g={vg:g} V")
        else:
            tr = run_trajectory(cfg, Waveform.constant(vg, dwell), initial=state,
                                sampling_stride=max(1, int(round(dwell / cfg.noise.dt))),
                                field_map=fm, noise=False)
            state = FeState(tr.final_state.p, state.time + dwell)
        p_mean[k] = state.p.mean()
    current = np.asarray(current_from_polarization(v, p_mean, cfg, transport, exact=True))
    return IVCurve(v, current, p_mean, ok, direction)


def hysteresis_window(forward: IVCurve, reverse: IVCurve) -> float:
    """Gate-voltage gap between the zero crossings of mean polarization, V."""
    def crossing(curve):
        v, p = curve.v_gate, curve.p_mean
        order = np.argsort(v)
        v, p = v[order], p[order]
        idx = np.nonzero(np.diff(np.sign(p)))[0]
        if idx.size == 0:
            raise ValueError("polarization does not change sign along the sweep")
        i = idx[0]
        return v[i] - p[i] * (v[i + 1] - v[i]) / (p[i + 1] - p[i])
    return float(crossing(forward) - crossing(reverse))


def iv_stochastic(cfg: FeSystemConfig, transport: TransportParams, protocol: BiasProtocol,
                  sampling_stride: int = 1, noise: bool = True) -> StochasticIV:
    """Current traces at each gate level after a fresh v_init reset.

    Level k uses noise streams (seed, k, domain), so levels are independent
    of each other and of evaluation order. With ``noise`` False the same
    protocol runs noise-free.
    """
    dt = cfg.noise.dt
    protocol.check(dt)
    fm = device_field_map(cfg)
    n_init = int(round(protocol.init_duration / dt))
    traces = []
    for k, vg in enumerate(protocol.gate_levels):
        drive = Waveform(((protocol.init_duration, protocol.v_init), (protocol.hold_duration, vg)))
        tr = run_trajectory(cfg, drive, sampling_stride=sampling_stride, field_map=fm,
                            noise=noise, traj_index=k)
        steps = (np.arange(len(tr)) + 1) * sampling_stride
        keep = steps > n_init
        pm = tr.p_mean[keep]
        times = (steps[keep] - n_init) * dt
        cur = np.asarray(current_from_polarization(vg, pm, cfg, transport))
        traces.append(BiasTrace(vg, times, pm, cur))
    return StochasticIV(traces, {"v_init": protocol.v_init, "sampling_stride": sampling_stride,
                                 "noise": noise})
