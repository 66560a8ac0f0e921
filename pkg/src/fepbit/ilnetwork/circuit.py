"""Circuits of invertible gates sharing bits, and the array multiplier."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .gates import IsingGate, all_states, ising_energy, library_gate


@dataclass
class IsingCircuit:
    n_total: int
    j: np.ndarray
    h: np.ndarray
    clamps: dict = field(default_factory=dict)      # bit -> +-1
    decode: dict = field(default_factory=dict)      # name -> bit indices, LSB first
    labels: list = field(default_factory=list)
    i0: float = 1.0
    gates: list = field(default_factory=list)       # (gate name, bit indices)
    constant_zero: list = field(default_factory=list)   # product bits with no logic behind them

    def __post_init__(self):
        self.j = np.asarray(self.j, dtype=float)
        self.h = np.asarray(self.h, dtype=float)
        for b, v in self.clamps.items():
            if not 0 <= b < self.n_total or v not in (-1, 1):
                raise ValueError(f"bad clamp {b}: {v}")

    def with_clamps(self, extra: dict) -> "IsingCircuit":
        return replace(self, clamps={**self.clamps, **{int(k): int(v) for k, v in extra.items()}})

    def with_i0(self, i0: float) -> "IsingCircuit":
        return replace(self, i0=float(i0))

    @property
    def free_bits(self) -> np.ndarray:
        return np.array([b for b in range(self.n_total) if b not in self.clamps], dtype=np.int64)

    def decode_value(self, state, name: str) -> int:
        bits = self.decode[name]
        return sum(1 << k for k, b in enumerate(bits) if state[b] > 0)


class CircuitBuilder:
    def __init__(self):
        self.labels: list = []
        self.terms: list = []

    def bit(self, label: str) -> int:
        self.labels.append(label)
        return len(self.labels) - 1

    def add(self, gate: IsingGate, bits) -> list:
        bits = list(bits)
        if len(bits) != gate.n:
            raise ValueError(f"gate {gate.name} needs {gate.n} bits, got {len(bits)}")
        self.terms.append((gate, bits))
        return bits

    def build(self, decode=None, i0: float = 1.0) -> IsingCircuit:
        n = len(self.labels)
        j = np.zeros((n, n))
        h = np.zeros(n)
        for gate, bits in self.terms:
            idx = np.array(bits)
            j[np.ix_(idx, idx)] += gate.j
            h[idx] += gate.h
        return IsingCircuit(n, j, h, {}, dict(decode or {}), list(self.labels), i0,
                            [(g.name, list(b)) for g, b in self.terms])


def energy(circuit: IsingCircuit, state) -> float:
    return float(ising_energy(circuit.j, circuit.h, np.asarray(state)))


def single_gate_circuit(gate: IsingGate, i0: float = 1.0) -> IsingCircuit:
    b = CircuitBuilder()
    bits = [b.bit(lbl) for lbl in gate.labels]
    b.add(gate, bits)
    n_vis = gate.n - gate.n_ancilla
    decode = {lbl: [bit] for lbl, bit in zip(gate.labels[:n_vis], bits[:n_vis])}
    return b.build(decode, i0)


def iand_circuit(i0: float = 1.0, margin: float = 1.0) -> IsingCircuit:
    """One invertible AND with terminals A, B, C."""
    return single_gate_circuit(library_gate("and", margin), i0)


def compose_multiplier(bits_x: int, bits_y: int, i0: float = 1.0, margin: float = 1.0) -> IsingCircuit:
    """Array multiplier: one AND per partial product, columns reduced by adders.

    Each column is reduced with full adders while it holds three or more
    bits and a half adder when two remain; carries move to the next column.
    Decode groups: "A" (bits_x), "B" (bits_y), "P" (bits_x + bits_y).
    """
    if bits_x < 2 or bits_y < 2:
        raise ValueError("bits_x and bits_y must be >= 2")
    g_and, g_ha, g_fa = library_gate("and", margin), library_gate("ha", margin), library_gate("fa", margin)
    b = CircuitBuilder()
    a_bits = [b.bit(f"a{i}") for i in range(bits_x)]
    b_bits = [b.bit(f"b{i}") for i in range(bits_y)]
    n_out = bits_x + bits_y
    cols = [[] for _ in range(n_out + 1)]
    for i, ai in enumerate(a_bits):
        for k, bk in enumerate(b_bits):
            pp = b.bit(f"pp{i}_{k}")
            b.add(g_and, [ai, bk, pp])
            cols[i + k].append(pp)
    for c in range(n_out):
        col = cols[c]
        while len(col) > 1:
            if len(col) >= 3:
                x, y, z = col.pop(0), col.pop(0), col.pop(0)
                s, co = b.bit(f"fa_s{c}"), b.bit(f"fa_c{c}")
                b.add(g_fa, [x, y, z, s, co])
            else:
                x, y = col.pop(0), col.pop(0)
                s, co = b.bit(f"ha_s{c}"), b.bit(f"ha_c{c}")
                b.add(g_ha, [x, y, s, co])
            col.append(s)
            cols[c + 1].append(co)
    if cols[n_out]:
        raise RuntimeError("carry out of the top product column")
    p_bits, zero = [], []
    for c in range(n_out):
        if cols[c]:
            p_bits.append(cols[c][0])
        else:
            p_bits.append(-1)
            zero.append(c)
    circ = b.build({"A": a_bits, "B": b_bits}, i0)
    circ.decode["P"] = p_bits
    circ.constant_zero = zero
    return circ


def clamp_product(circuit: IsingCircuit, f: int) -> IsingCircuit:
    """Clamp the product terminals to the binary representation of f."""
    p_bits = circuit.decode["P"]
    if not 0 <= f < 2 ** len(p_bits):
        raise ValueError(f"{f} does not fit in {len(p_bits)} product bits")
    clamps = {}
    for k, bit in enumerate(p_bits):
        v = (f >> k) & 1
        if bit < 0:
            if v:
                raise ValueError(f"product bit {k} is structurally zero; {f} is unreachable")
            continue
        clamps[bit] = 1 if v else -1
    return circuit.with_clamps(clamps)


def enumerate_ground_states(circuit: IsingCircuit, max_free: int = 22, tol: float = 1e-9):
    """All minimum-energy states with the clamps applied (exhaustive)."""
    free = circuit.free_bits
    if free.size > max_free:
        raise ValueError(f"{free.size} free bits is too many to enumerate")
    base = np.zeros(circuit.n_total, dtype=np.int8)
    for bit, v in circuit.clamps.items():
        base[bit] = v
    states = np.repeat(base[None, :], 2 ** free.size, axis=0)
    if free.size:
        states[:, free] = all_states(free.size)
    e = ising_energy(circuit.j, circuit.h, states)
    emin = e.min()
    return states[e <= emin + tol], float(emin)
