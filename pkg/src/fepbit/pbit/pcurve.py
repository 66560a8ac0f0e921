"""Probability-vs-gate-bias curves and their sigmoid fits."""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import OptimizeWarning, curve_fit

from ..device.fefet import BiasProtocol, iv_stochastic
from ..device.transport import TransportParams
from ..phasefield.system import FeSystemConfig
from .bitstream import ThresholdChain, probability, threshold_bitstream


class FitError(RuntimeError):
    pass


def sigmoid(v, v0, k):
    return 0.5 * (1.0 + np.tanh(0.5 * k * (np.asarray(v, dtype=float) - v0)))


@dataclass(frozen=True)
class SigmoidFit:
    v0: float       # V
    k: float        # 1/V

    def __call__(self, v):
        return sigmoid(v, self.v0, self.k)


@dataclass
class PCurve:
    v: np.ndarray
    p: np.ndarray
    n: np.ndarray
    fit: SigmoidFit | None = None
    r2: float | None = None
    fit_error: str | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.v = np.asarray(self.v, dtype=float)
        self.p = np.asarray(self.p, dtype=float)
        self.n = np.asarray(self.n, dtype=int)
        if np.any((self.p < 0) | (self.p > 1)):
            raise ValueError("probabilities must lie in [0, 1]")

    def to_dict(self) -> dict:
        d = {"points": [{"v": float(v), "p": float(p), "n": int(n)}
                        for v, p, n in zip(self.v, self.p, self.n)],
             "fit": None if self.fit is None else {"v0": self.fit.v0, "k": self.fit.k},
             "r2": self.r2}
        if self.fit_error:
            d["fit_error"] = self.fit_error
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "PCurve":
        pts = d["points"]
        fit = d.get("fit")
        return cls([q["v"] for q in pts], [q["p"] for q in pts], [q["n"] for q in pts],
                   SigmoidFit(fit["v0"], fit["k"]) if fit else None, d.get("r2"),
                   d.get("fit_error"))

    @classmethod
    def from_json(cls, text: str) -> "PCurve":
        return cls.from_dict(json.loads(text))

    def csv_rows(self):
        return [(float(v), float(p), int(n)) for v, p, n in zip(self.v, self.p, self.n)]


def _initial_guess(v, p, n):
    """Centre and slope from the logits of the two points bracketing p = 0.5."""
    q = np.clip(p, 1.0 / n, 1.0 - 1.0 / n)
    logit = np.log(q / (1.0 - q))
    above = np.nonzero(p >= 0.5)[0]
    if above.size == 0 or above[0] == 0:
        i = int(np.argmin(np.abs(p - 0.5)))
        j = i + 1 if i + 1 < v.size else i - 1
    else:
        j = int(above[0])
        i = j - 1
    if logit[j] == logit[i] or v[j] == v[i]:
        return float(v[i]), 1.0 / max(np.ptp(v), 1e-12)
    k = (logit[j] - logit[i]) / (v[j] - v[i])
    v0 = v[i] - logit[i] / k
    return float(v0), float(k)


def fit_sigmoid(v, p, n) -> tuple[SigmoidFit, float]:
    """Least-squares fit of 1/(1+exp(-k(v-v0))); returns the fit and R^2."""
    v = np.asarray(v, dtype=float)
    p = np.asarray(p, dtype=float)
    n = np.broadcast_to(np.asarray(n, dtype=float), p.shape)
    if np.all(p <= 0) or np.all(p >= 1):
        raise FitError("all probabilities are 0 or all are 1; nothing to fit")
    order = np.argsort(v)
    v, p, n = v[order], p[order], n[order]
    v0, k = _initial_guess(v, p, n)
    if not k > 0:
        k = 1.0 / max(np.ptp(v), 1e-12)
    try:
        with warnings.catch_warnings():
            # an exact step has no finite covariance; the fit itself is still usable
            warnings.simplefilter("ignore", OptimizeWarning)
            (v0, k), _ = curve_fit(sigmoid, v, p, p0=(v0, k), maxfev=10000)
    except RuntimeError as exc:
        raise FitError(str(exc)) from exc
    if not k > 0:
        raise FitError(f"fitted slope is not positive (k={k:g})")
    resid = p - sigmoid(v, v0, k)
    ss_tot = np.sum((p - p.mean()) ** 2)
    r2 = 1.0 - np.sum(resid ** 2) / ss_tot if ss_tot > 0 else 0.0
    return SigmoidFit(float(v0), float(k)), float(r2)


def pcurve_from_points(v, p, n, meta=None) -> PCurve:
    curve = PCurve(v, p, n, meta=dict(meta or {}))
    try:
        curve.fit, curve.r2 = fit_sigmoid(curve.v, curve.p, curve.n)
    except FitError as exc:
        curve.fit_error = str(exc)
    return curve


def extract_pcurve(cfg: FeSystemConfig, transport: TransportParams, chain: ThresholdChain,
                   v_samples, hold_duration: float = 1e-5, seed: int = 0, noise: bool = True,
                   v_init: float = -3.0, init_duration: float = 1e-7, burn_in: float = 0.1,
                   sampling_stride: int = 1) -> PCurve:
    """Probability of exceeding the threshold at each gate bias.

    Every bias starts from a fresh v_init reset. The first ``burn_in``
    fraction of each hold is discarded before counting.
    """
    v = np.asarray(v_samples, dtype=float)
    if np.any(np.diff(v) < 0):
        raise ValueError("v_samples must be sorted ascending")
    cfg = cfg.with_noise(seed=seed)
    protocol = BiasProtocol(v_init, init_duration, tuple(v), hold_duration)
    iv = iv_stochastic(cfg, transport, protocol, sampling_stride, noise=noise)
    p, n = [], []
    for tr in iv.traces:
        start = int(round(burn_in * len(tr.current)))
        est = probability(threshold_bitstream(tr.current[start:], chain))
        p.append(est.p)
        n.append(est.n)
    meta = {"seed": seed, "noise": noise, "hold_duration": hold_duration, "burn_in": burn_in,
            "current_threshold": chain.equivalent_current_threshold}
    return pcurve_from_points(v, p, n, meta)


def center_pcurve(curve: PCurve) -> PCurve:
    """Shift the curve so its fitted centre sits at 0 V."""
    if curve.fit is None:
        raise FitError("curve has no fit to centre on")
    shift = -curve.fit.v0
    return replace(curve, v=curve.v + shift, fit=SigmoidFit(0.0, curve.fit.k),
                   meta={**curve.meta, "shift": shift})
