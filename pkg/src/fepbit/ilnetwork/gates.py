"""Invertible-logic gates as Ising Hamiltonians, synthesized by linear programming.

Bits are spins in {-1, +1}; logical 1 is +1. The energy of a state is

    E(s) = -sum_{i<j} J_ij s_i s_j - sum_i h_i s_i
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

SNAP = 1e-9     # LP coefficients smaller than this are set to zero


class InfeasibleGateError(ValueError):
    def __init__(self, message: str, violated: list):
        super().__init__(message)
        self.violated = violated


@dataclass
class IsingGate:
    n: int
    j: np.ndarray
    h: np.ndarray
    ground_energy: float
    labels: tuple = ()
    name: str = ""
    n_ancilla: int = 0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.j = np.asarray(self.j, dtype=float)
        self.h = np.asarray(self.h, dtype=float)
        if self.j.shape != (self.n, self.n) or self.h.shape != (self.n,):
            raise ValueError("j must be n x n and h length n")
        if not np.array_equal(self.j, self.j.T) or np.any(np.diag(self.j) != 0):
            raise ValueError("j must be symmetric with zero diagonal")
        if not self.labels:
            self.labels = tuple(f"s{i}" for i in range(self.n))

    def energy(self, states):
        return ising_energy(self.j, self.h, states)


def all_states(n: int) -> np.ndarray:
    """Every +-1 vector of length n, first bit most significant."""
    bits = (np.arange(2 ** n)[:, None] >> np.arange(n - 1, -1, -1)) & 1
    return (2 * bits - 1).astype(np.int8)


def ising_energy(j, h, states):
    s = np.asarray(states, dtype=float)
    return -0.5 * np.einsum("...i,ij,...j->...", s, j, s) - s @ h


def to_spins(rows) -> set:
    """Truth-table rows of 0/1 into a set of +-1 tuples."""
    return {tuple(2 * int(b) - 1 for b in r) for r in rows}


def copy_table():
    return to_spins([(0, 0), (1, 1)])


def and_table():
    """(A, B, C = A and B)."""
    return to_spins([(a, b, a & b) for a in (0, 1) for b in (0, 1)])


def half_adder_table():
    """(A, B, S, Cout)."""
    return to_spins([(a, b, a ^ b, a & b) for a in (0, 1) for b in (0, 1)])


def full_adder_table():
    """(A, B, Cin, S, Cout)."""
    rows = []
    for a, b, c in itertools.product((0, 1), repeat=3):
        t = a + b + c
        rows.append((a, b, c, t & 1, t >> 1))
    return to_spins(rows)


def xor_table():
    """(A, B, C = A xor B)."""
    return to_spins([(a, b, a ^ b) for a in (0, 1) for b in (0, 1)])


TRUTH_TABLES = {
    "copy": (copy_table, ("A", "B")),
    "and": (and_table, ("A", "B", "C")),
    "iand": (and_table, ("A", "B", "C")),
    "ha": (half_adder_table, ("A", "B", "S", "Cout")),
    "fa": (full_adder_table, ("A", "B", "Cin", "S", "Cout")),
    "xor": (xor_table, ("A", "B", "C")),
}


def _pair_index(n):
    return [(a, b) for a in range(n) for b in range(a + 1, n)]


def _energy_rows(states, pairs):
    """Coefficient rows so that E(s) = row . [j_pairs, h]."""
    s = np.asarray(states, dtype=float)
    jcols = np.stack([-s[:, a] * s[:, b] for a, b in pairs], axis=1) if pairs else np.zeros((len(s), 0))
    return np.hstack([jcols, -s])


def _solve_lp(valid: np.ndarray, invalid: np.ndarray, n: int, margin: float):
    pairs = _pair_index(n)
    npair = len(pairs)
    nv = npair + n + 3          # j, h, e0, t_j, t_h
    ie0, itj, ith = npair + n, npair + n + 1, npair + n + 2
    ev = _energy_rows(valid, pairs)
    ei = _energy_rows(invalid, pairs)
    a_eq = np.zeros((len(valid), nv))
    a_eq[:, :npair + n] = ev
    a_eq[:, ie0] = -1.0
    rows = []
    rhs = []
    for r in ei:
        row = np.zeros(nv)
        row[:npair + n] = -r
        row[ie0] = 1.0
        rows.append(row)
        rhs.append(-margin)
    for k in range(npair + n):
        t = itj if k < npair else ith
        for sgn in (1.0, -1.0):
            row = np.zeros(nv)
            row[k] = sgn
            row[t] = -1.0
            rows.append(row)
            rhs.append(0.0)
    c = np.zeros(nv)
    c[itj] = 1.0
    c[ith] = 1e-3
    bounds = [(None, None)] * (npair + n + 1) + [(0, None), (0, None)]
    res = linprog(c, A_ub=np.array(rows), b_ub=np.array(rhs), A_eq=a_eq,
                  b_eq=np.zeros(len(valid)), bounds=bounds, method="highs")
    return res, pairs


def _violated_constraints(valid, invalid, n, margin):
    """States whose constraints cannot all hold: minimize total slack and list the slack ones."""
    pairs = _pair_index(n)
    npair = len(pairs)
    ev = _energy_rows(valid, pairs)
    ei = _energy_rows(invalid, pairs)
    nvar = npair + n + 1
    nsl = len(valid) * 2 + len(invalid)
    # equality as two inequalities with slack, margin with slack
    rows, rhs = [], []
    k = 0
    for r in ev:
        for sgn in (1.0, -1.0):
            row = np.zeros(nvar + nsl)
            row[:npair + n] = sgn * r
            row[npair + n] = -sgn
            row[nvar + k] = -1.0
            rows.append(row)
            rhs.append(0.0)
            k += 1
    for r in ei:
        row = np.zeros(nvar + nsl)
        row[:npair + n] = -r
        row[npair + n] = 1.0
        row[nvar + k] = -1.0
        rows.append(row)
        rhs.append(-margin)
        k += 1
    c = np.concatenate([np.zeros(nvar), np.ones(nsl)])
    bounds = [(-100, 100)] * nvar + [(0, None)] * nsl
    res = linprog(c, A_ub=np.array(rows), b_ub=np.array(rhs), bounds=bounds, method="highs")
    slack = res.x[nvar:]
    out = []
    for i, v in enumerate(valid):
        if slack[2 * i] > 1e-9 or slack[2 * i + 1] > 1e-9:
            out.append(("valid", tuple(int(x) for x in v)))
    off = 2 * len(valid)
    for i, v in enumerate(invalid):
        if slack[off + i] > 1e-9:
            out.append(("invalid", tuple(int(x) for x in v)))
    return out


def _unpack(x, n, pairs):
    j = np.zeros((n, n))
    for k, (a, b) in enumerate(pairs):
        j[a, b] = j[b, a] = x[k]
    h = np.array(x[len(pairs):len(pairs) + n])
    j[np.abs(j) < SNAP] = 0.0
    h[np.abs(h) < SNAP] = 0.0
    return j, h


def synthesize_gate(truth_table, n: int, margin: float = 1.0, labels=(), name: str = "") -> IsingGate:
    """Smallest-coupling Ising gate whose ground states are exactly the truth table."""
    valid = sorted(set(tuple(int(x) for x in r) for r in truth_table))
    if not valid:
        raise ValueError("truth table is empty")
    if any(len(r) != n or any(x not in (-1, 1) for x in r) for r in valid):
        raise ValueError("truth-table rows must be length-n vectors of +-1")
    if len(valid) == 2 ** n:
        raise ValueError("truth table contains every state")
    if not margin > 0:
        raise ValueError("margin must be positive")
    states = all_states(n)
    vset = set(valid)
    invalid = np.array([s for s in states if tuple(s) not in vset])
    valid_arr = np.array(valid)
    res, pairs = _solve_lp(valid_arr, invalid, n, margin)
    if res.status == 2:
        violated = _violated_constraints(valid_arr, invalid, n, margin)
        raise InfeasibleGateError(
            f"no {n}-bit Ising gate reproduces this truth table; "
            f"{len(violated)} constraints cannot be met", violated)
    if res.status != 0:
        raise RuntimeError(f"linear program failed: {res.message}")
    j, h = _unpack(res.x, n, pairs)
    gate = IsingGate(n, j, h, float(ising_energy(j, h, valid_arr[0])), tuple(labels), name)
    report = verify_gate(gate, vset, margin)
    if not report.ok:
        raise RuntimeError(f"synthesized gate failed verification: {report}")
    return gate


def synthesize_with_ancilla(truth_table, n: int, margin: float = 1.0, labels=(), name: str = "",
                            max_ancilla: int = 2) -> IsingGate:
    """Try a direct encoding, then add ancilla bits until one is found.

    With a ancillas every valid row is extended by an ancilla pattern; all
    pattern assignments are tried in order. Ancillas are appended after the
    n visible bits.
    """
    try:
        return synthesize_gate(truth_table, n, margin, labels, name)
    except InfeasibleGateError as first:
        err = first
    valid = sorted(set(tuple(int(x) for x in r) for r in truth_table))
    for a in range(1, max_ancilla + 1):
        patterns = [tuple(p) for p in all_states(a)]
        for choice in itertools.product(patterns, repeat=len(valid)):
            table = {v + c for v, c in zip(valid, choice)}
            try:
                gate = synthesize_gate(table, n + a, margin,
                                       tuple(labels) + tuple(f"anc{k}" for k in range(a)), name)
            except InfeasibleGateError:
                continue
            gate.n_ancilla = a
            return gate
    raise err


@dataclass
class GateReport:
    ok: bool
    ground_states: set
    expected: set
    gap: float

    def __str__(self):
        return (f"ok={self.ok} ground={sorted(self.ground_states)} "
                f"expected={sorted(self.expected)} gap={self.gap:.6g}")


def ground_state_set(j, h, n, tol=1e-9):
    states = all_states(n)
    e = ising_energy(j, h, states)
    emin = e.min()
    ground = {tuple(int(x) for x in s) for s in states[e <= emin + tol]}
    above = e[e > emin + tol]
    gap = float(above.min() - emin) if above.size else float("inf")
    return ground, float(emin), gap


def verify_gate(gate: IsingGate, truth_table, margin: float = 0.0) -> GateReport:
    """Exhaustive check that the ground states, projected onto the visible bits, are the truth table."""
    ground, _, gap = ground_state_set(gate.j, gate.h, gate.n)
    n_vis = gate.n - gate.n_ancilla
    visible = {g[:n_vis] for g in ground}
    expected = set(tuple(int(x) for x in r) for r in truth_table)
    if gate.n_ancilla == 0:
        ok = ground == expected
    else:
        # each valid row must appear with exactly one ancilla pattern
        ok = visible == {e[:n_vis] for e in expected} and len(ground) == len(visible)
    ok = ok and gap >= margin * (1 - 1e-6)
    return GateReport(ok, ground, expected, gap)


def library_gate(kind: str, margin: float = 1.0) -> IsingGate:
    """Synthesized gate for one of the names in TRUTH_TABLES."""
    try:
        table_fn, labels = TRUTH_TABLES[kind]
    except KeyError:
        raise ValueError(f"unknown gate {kind!r}; choose from {sorted(TRUTH_TABLES)}") from None
    return synthesize_with_ancilla(table_fn(), len(labels), margin, labels, kind)
