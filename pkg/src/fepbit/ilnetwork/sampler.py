"""Sequential p-bit dynamics on an Ising circuit.

Each update draws u ~ U(-1, 1) and sets s_i = +1 when u > 1 - 2 P(I_i),
where I_i = i0 (h_i + sum_j J_ij s_j) and P is the response. For the ideal
response P = (1 + tanh I)/2, which is s_i = sgn(u + tanh I_i).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numba
import numpy as np

from ..pbit.pcurve import PCurve, center_pcurve
from ..rng import stream
from .circuit import IsingCircuit, clamp_product, compose_multiplier

KIND_TANH, KIND_LOGISTIC, KIND_TABLE, KIND_STEP = 0, 1, 2, 3
SWEEP_CHUNK = 4096
DEFAULT_VOLTS_PER_UNIT = 1.0


@dataclass(frozen=True)
class PBitResponse:
    """Probability of +1 as a function of the network input I.

    kind "tanh": ideal (1 + tanh I)/2.
    kind "logistic": 1/(1 + exp(-gain I)), the sigmoid fit of a p-curve.
    kind "table": linear interpolation of a monotone point table (xs, ps).
    kind "step": deterministic sign(I); a zero input keeps the current state.
    """
    kind: str = "tanh"
    gain: float = 2.0
    xs: tuple = ()
    ps: tuple = ()

    def __post_init__(self):
        if self.kind not in ("tanh", "logistic", "table", "step"):
            raise ValueError(f"unknown response kind {self.kind!r}")
        if self.kind == "table":
            xs, ps = np.asarray(self.xs, dtype=float), np.asarray(self.ps, dtype=float)
            if xs.size < 2 or xs.size != ps.size or np.any(np.diff(xs) <= 0):
                raise ValueError("table needs >= 2 points with increasing inputs")
            if np.any(np.diff(ps) < 0) or np.any((ps < 0) | (ps > 1)):
                raise ValueError("table probabilities must be monotone and in [0, 1]")
        if self.kind == "logistic" and not self.gain > 0:
            raise ValueError("gain must be positive")

    @classmethod
    def ideal(cls) -> "PBitResponse":
        return cls("tanh")

    @classmethod
    def step(cls) -> "PBitResponse":
        return cls("step")

    @classmethod
    def from_pcurve(cls, curve: PCurve, volts_per_unit: float = DEFAULT_VOLTS_PER_UNIT,
                    use_fit: bool = True) -> "PBitResponse":
        """Response from a centred p-curve, reading network input I as gate bias I * volts_per_unit.

        With ``use_fit`` the sigmoid fit is used; otherwise the measured points,
        made monotone by a running maximum, are interpolated.
        """
        c = center_pcurve(curve)
        if use_fit:
            return cls("logistic", gain=c.fit.k * volts_per_unit)
        xs = c.v / volts_per_unit
        ps = np.maximum.accumulate(c.p)
        return cls("table", xs=tuple(xs), ps=tuple(ps))

    def prob(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "tanh":
            return 0.5 * (1.0 + np.tanh(x))
        if self.kind == "logistic":
            return 0.5 * (1.0 + np.tanh(0.5 * self.gain * x))
        if self.kind == "table":
            return np.interp(x, self.xs, self.ps)
        return np.where(x > 0, 1.0, np.where(x < 0, 0.0, 0.5))

    def _codes(self):
        code = {"tanh": KIND_TANH, "logistic": KIND_LOGISTIC, "table": KIND_TABLE,
                "step": KIND_STEP}[self.kind]
        xs = np.asarray(self.xs if self.kind == "table" else (0.0,), dtype=float)
        ps = np.asarray(self.ps if self.kind == "table" else (0.0,), dtype=float)
        return code, float(self.gain), xs, ps


def pbit_update(input_i: float, response: PBitResponse, rng: np.random.Generator,
                current: int = 1) -> int:
    u = rng.uniform(-1.0, 1.0)
    if response.kind == "step":
        return 1 if input_i > 0 else (-1 if input_i < 0 else current)
    if response.kind == "tanh":
        return 1 if u + np.tanh(input_i) > 0 else -1
    return 1 if u > 1.0 - 2.0 * float(response.prob(input_i)) else -1


def local_input(circuit: IsingCircuit, state, i: int) -> float:
    return circuit.i0 * (circuit.h[i] + circuit.j[i] @ state)


def sweep(circuit: IsingCircuit, state, response: PBitResponse, rng: np.random.Generator,
          order=None) -> np.ndarray:
    """One in-place pass over the unclamped bits (reference implementation)."""
    bits = circuit.free_bits if order is None else np.asarray(order)
    for i in bits:
        if i in circuit.clamps:
            continue
        state[i] = pbit_update(local_input(circuit, state, i), response, rng, int(state[i]))
    return state


@numba.njit(cache=True)
def _prob(x, code, gain, xs, ps):
    if code == 0:
        return 0.5 * (1.0 + np.tanh(x))
    if code == 1:
        return 0.5 * (1.0 + np.tanh(0.5 * gain * x))
    # table
    n = xs.size
    if x <= xs[0]:
        return ps[0]
    if x >= xs[n - 1]:
        return ps[n - 1]
    lo, hi = 0, n - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if xs[mid] <= x:
            lo = mid
        else:
            hi = mid
    t = (x - xs[lo]) / (xs[hi] - xs[lo])
    return ps[lo] + t * (ps[hi] - ps[lo])


@numba.njit(cache=True)
def _run_sweeps(state, free, indptr, indices, weights, h, i0, code, gain, xs, ps,
                u, perm_u, record, keys, key_pos, key_bits, key_w, key_start):
    """Run u.shape[0] sweeps; tally the decoded key after each recorded sweep."""
    n_sweeps, n_free = u.shape
    order = free.copy()
    for t in range(n_sweeps):
        if perm_u.shape[0] > 0:
            # Fisher-Yates on the free bits, driven by pre-drawn uniforms
            for a in range(n_free):
                order[a] = free[a]
            for a in range(n_free - 1, 0, -1):
                b = int(perm_u[t, a] * (a + 1))
                if b > a:
                    b = a
                tmp = order[a]
                order[a] = order[b]
                order[b] = tmp
        for a in range(n_free):
            i = order[a]
            acc = h[i]
            for q in range(indptr[i], indptr[i + 1]):
                acc += weights[q] * state[indices[q]]
            x = i0 * acc
            if code == 3:
                if x > 0:
                    state[i] = 1
                elif x < 0:
                    state[i] = -1
            elif code == 0:
                state[i] = 1 if u[t, a] + np.tanh(x) > 0 else -1
            else:
                p = _prob(x, code, gain, xs, ps)
                state[i] = 1 if u[t, a] > 1.0 - 2.0 * p else -1
        if key_start + t >= record:
            k = 0
            for m in range(key_bits.size):
                if state[key_bits[m]] > 0:
                    k += key_w[m]
            keys[key_pos] = k
            key_pos += 1
    return key_pos


@dataclass
class SolutionHistogram:
    counts: dict                     # (a, b) -> count
    total_sweeps: int
    correct: set = field(default_factory=set)
    meta: dict = field(default_factory=dict)

    def probability(self, key) -> float:
        return self.counts.get(tuple(key), 0) / self.total_sweeps if self.total_sweeps else 0.0

    def ranked(self) -> list:
        return sorted(self.counts.items(), key=lambda kv: (-kv[1], kv[0]))

    def rank_of(self, key) -> int | None:
        for r, (k, _) in enumerate(self.ranked()):
            if k == tuple(key):
                return r
        return None

    @property
    def accuracy(self) -> float:
        return sum(self.probability(k) for k in self.correct)

    def to_dict(self) -> dict:
        return {"total_sweeps": self.total_sweeps,
                "correct": [list(k) for k in sorted(self.correct)],
                "entries": [{"a": k[0], "b": k[1], "count": c, "probability": c / self.total_sweeps}
                            for k, c in self.ranked()]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "SolutionHistogram":
        return cls({(e["a"], e["b"]): e["count"] for e in d["entries"]}, d["total_sweeps"],
                   {tuple(k) for k in d["correct"]})

    def merge(self, other: "SolutionHistogram") -> "SolutionHistogram":
        counts = dict(self.counts)
        for k, c in other.counts.items():
            counts[k] = counts.get(k, 0) + c
        return SolutionHistogram(counts, self.total_sweeps + other.total_sweeps,
                                 self.correct | other.correct)


def _csr(j: np.ndarray):
    indptr = [0]
    indices, weights = [], []
    for i in range(j.shape[0]):
        nz = np.nonzero(j[i])[0]
        indices.extend(nz.tolist())
        weights.extend(j[i, nz].tolist())
        indptr.append(len(indices))
    return (np.array(indptr, dtype=np.int64), np.array(indices, dtype=np.int64),
            np.array(weights, dtype=float))


def run_network(circuit: IsingCircuit, response: PBitResponse, n_sweeps: int, burn_in: int = 0,
                seed: int = 0, decode=("A", "B"), initial=None, random_order: bool = False,
                correct=()) -> SolutionHistogram:
    """Sweep the network and tally the decoded pair after every post-burn-in sweep.

    Uniforms come from stream (seed, 1) in chunks of SWEEP_CHUNK sweeps; the
    random initial state from stream (seed, 0).
    """
    if not n_sweeps > burn_in >= 0:
        raise ValueError("need n_sweeps > burn_in >= 0")
    n = circuit.n_total
    free = circuit.free_bits
    state = np.empty(n, dtype=np.int8)
    if initial is None:
        state[:] = np.where(stream(seed, 0).random(n) < 0.5, -1, 1)
    else:
        state[:] = np.asarray(initial, dtype=np.int8)
        if state.size != n or np.any(np.abs(state) != 1):
            raise ValueError("initial state must be a full +-1 vector")
    for b, v in circuit.clamps.items():
        state[b] = v
    groups = [circuit.decode[g] for g in decode]
    sizes = [len(g) for g in groups]
    key_bits = np.array([b for g in groups for b in g], dtype=np.int64)
    key_w = np.array([1 << k for g in groups for k in range(len(g))], dtype=np.int64)
    # second group's weights are shifted above the first
    key_w[sizes[0]:] <<= sizes[0]
    indptr, indices, weights = _csr(circuit.j)
    code, gain, xs, ps = response._codes()
    rng = stream(seed, 1)
    keys = np.empty(n_sweeps - burn_in, dtype=np.int64)
    pos = 0
    done = 0
    empty_perm = np.empty((0, 0))
    while done < n_sweeps:
        m = min(SWEEP_CHUNK, n_sweeps - done)
        u = rng.uniform(-1.0, 1.0, size=(m, free.size))
        perm = rng.random((m, free.size)) if random_order else empty_perm
        pos = _run_sweeps(state, free, indptr, indices, weights, circuit.h, circuit.i0, code,
                          gain, xs, ps, u, perm, burn_in, keys, pos, key_bits, key_w, done)
        done += m
    mask = (1 << sizes[0]) - 1
    uniq, cnt = np.unique(keys[:pos], return_counts=True)
    counts = {(int(k & mask), int(k >> sizes[0])): int(c) for k, c in zip(uniq, cnt)}
    return SolutionHistogram(counts, pos, {tuple(c) for c in correct},
                             {"seed": seed, "n_sweeps": n_sweeps, "burn_in": burn_in,
                              "i0": circuit.i0, "response": response.kind,
                              "final_state": state.astype(int).tolist()})


def factor_pairs(f: int, bits_x: int, bits_y: int) -> set:
    return {(a, b) for a in range(2 ** bits_x) for b in range(2 ** bits_y) if a * b == f}


def _consistent(circuit: IsingCircuit, pair) -> bool:
    """Whether (A, B) agrees with every clamped bit of the A and B terminals."""
    for name, value in zip(("A", "B"), pair):
        for k, bit in enumerate(circuit.decode[name]):
            if bit in circuit.clamps and circuit.clamps[bit] != (1 if (value >> k) & 1 else -1):
                return False
    return True


def factorize(f: int, bits_x: int, bits_y: int, response: PBitResponse | None = None,
              n_sweeps: int = 100_000, seed: int = 0, i0: float = 1.0, burn_in: int = 0,
              extra_clamps: dict | None = None, circuit: IsingCircuit | None = None,
              initial=None) -> SolutionHistogram:
    """Clamp the product to f and tally the decoded (A, B) pairs."""
    circ = circuit if circuit is not None else compose_multiplier(bits_x, bits_y)
    circ = clamp_product(circ, f).with_i0(i0)
    if extra_clamps:
        circ = circ.with_clamps(extra_clamps)
    correct = {c for c in factor_pairs(f, bits_x, bits_y) if _consistent(circ, c)}
    hist = run_network(circ, response or PBitResponse.ideal(), n_sweeps, burn_in, seed,
                       initial=initial, correct=correct)
    hist.meta["f"] = f
    return hist


def descend(circuit: IsingCircuit, state, max_sweeps: int = 1000) -> tuple[np.ndarray, bool]:
    """Deterministic step-response sweeps until no bit changes (a local minimum)."""
    s = np.asarray(state, dtype=np.int8).copy()
    for b, v in circuit.clamps.items():
        s[b] = v
    step = PBitResponse.step()
    rng = np.random.default_rng(0)      # unused by the step response
    for _ in range(max_sweeps):
        before = s.copy()
        sweep(circuit, s, step, rng)
        if np.array_equal(before, s):
            return s, True
    return s, False


def wrong_basin_state(circuit: IsingCircuit, correct, seed: int = 0, tries: int = 200):
    """A local minimum of the clamped circuit whose decoded (A, B) is not correct."""
    g = stream(seed, 2)
    n = circuit.n_total
    for _ in range(tries):
        s0 = np.where(g.random(n) < 0.5, -1, 1).astype(np.int8)
        s, ok = descend(circuit, s0)
        key = (circuit.decode_value(s, "A"), circuit.decode_value(s, "B"))
        if ok and key not in set(correct):
            return s, key
    raise RuntimeError("no wrong-solution local minimum found")
