"""SPICE-like resistor-network netlist for an Ising circuit, and a parser back.

Coupling J_ij becomes a resistor R0/|J_ij| from pbit<i>_in to pbit<j>_out
(J > 0) or to the inverted output pbit<j>_outb (J < 0); each ordered pair
gets its own resistor. Bias h_i becomes R0/|h_i| to the vbias_p (h > 0) or
vbias_n (h < 0) rail. Every p-bit senses its summed input current with a
zero-volt source and converts it with a 1 MOhm CCVS.
"""
from __future__ import annotations

import re

import numpy as np

from .circuit import IsingCircuit

CCVS_OHMS = 1e6
ZERO = 1e-12


def emit_netlist(circuit: IsingCircuit, r0: float = 500e3, v_dd: float = 0.8) -> str:
    if not r0 > 0:
        raise ValueError("r0 must be positive")
    n = circuit.n_total
    lines = [f"# p-bit resistor network, {n} p-bits",
             f".param R0={float(r0)!r} VDD={float(v_dd)!r}"]
    if n == 0:
        return "\n".join(lines) + "\n"
    half = v_dd / 2.0
    lines += [f"VBP vbias_p 0 {float(half)!r}", f"VBN vbias_n 0 {float(-half)!r}"]
    for i in range(n):
        lines.append(f"VS{i} pbit{i}_in pbit{i}_sum 0")
        lines.append(f"H{i} pbit{i}_v 0 VS{i} {CCVS_OHMS!r}")
    for i in range(n):
        for k in range(n):
            jv = circuit.j[i, k]
            if i == k or abs(jv) <= ZERO:
                continue
            node = f"pbit{k}_out" if jv > 0 else f"pbit{k}_outb"
            lines.append(f"RJ{i}_{k} pbit{i}_in {node} {float(r0 / abs(jv))!r}")
    for i in range(n):
        hv = circuit.h[i]
        if abs(hv) <= ZERO:
            continue
        rail = "vbias_p" if hv > 0 else "vbias_n"
        lines.append(f"RH{i} pbit{i}_in {rail} {float(r0 / abs(hv))!r}")
    lines.append(".end")
    return "\n".join(lines) + "\n"


_PARAM = re.compile(r"\.param\s+R0=(\S+)\s+VDD=(\S+)")
_NODE = re.compile(r"pbit(\d+)_(in|outb|out)$")


def parse_netlist(text: str):
    """Recover (j, h, r0, v_dd) from emit_netlist output."""
    r0 = v_dd = None
    n = None
    couplings, biases = [], []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = re.search(r"(\d+) p-bits", line)
            if m:
                n = int(m.group(1))
            continue
        m = _PARAM.match(line)
        if m:
            r0, v_dd = float(m.group(1)), float(m.group(2))
            continue
        parts = line.split()
        if parts[0].startswith("RJ"):
            i = int(_NODE.match(parts[1]).group(1))
            mk = _NODE.match(parts[2])
            sign = 1.0 if mk.group(2) == "out" else -1.0
            couplings.append((i, int(mk.group(1)), sign, float(parts[3])))
        elif parts[0].startswith("RH"):
            i = int(_NODE.match(parts[1]).group(1))
            sign = 1.0 if parts[2] == "vbias_p" else -1.0
            biases.append((i, sign, float(parts[3])))
    if r0 is None or n is None:
        raise ValueError("netlist header is missing")
    j = np.zeros((n, n))
    h = np.zeros(n)
    for i, k, sign, r in couplings:
        j[i, k] = sign * r0 / r
    for i, sign, r in biases:
        h[i] = sign * r0 / r
    return j, h, r0, v_dd
