import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from fepbit.ilnetwork import (TRUTH_TABLES, InfeasibleGateError, IsingGate, all_states,
                              ising_energy, library_gate, synthesize_gate, verify_gate)
from fepbit.ilnetwork.gates import and_table, ground_state_set, to_spins, xor_table


def brute_energy(j, h, s):
    n = len(s)
    e = 0.0
    for a in range(n):
        e -= h[a] * s[a]
        for b in range(a + 1, n):
            e -= j[a, b] * s[a] * s[b]
    return e


@given(st.integers(1, 5), st.integers(0, 1000))
def test_energy_matches_pair_sum(n, seed):
    rng = np.random.default_rng(seed)
    j = rng.normal(size=(n, n))
    j = np.triu(j, 1)
    j = j + j.T
    h = rng.normal(size=n)
    for s in all_states(n):
        assert ising_energy(j, h, s) == pytest.approx(brute_energy(j, h, s))


def test_all_states_enumeration():
    s = all_states(3)
    assert s.shape == (8, 3)
    assert len({tuple(r) for r in s}) == 8
    assert tuple(s[0]) == (-1, -1, -1) and tuple(s[-1]) == (1, 1, 1)


@pytest.mark.parametrize("kind", ["copy", "and", "iand", "ha", "fa"])
def test_library_gates_pass_exhaustive_enumeration(kind):
    gate = library_gate(kind)
    table_fn, labels = TRUTH_TABLES[kind]
    report = verify_gate(gate, table_fn(), margin=1.0)
    assert report.ok, str(report)
    assert gate.n_ancilla == 0
    assert gate.labels == labels


def test_and_gate_coefficients():
    g = library_gate("and")
    np.testing.assert_allclose(g.j, [[0, -0.25, 0.5], [-0.25, 0, 0.5], [0.5, 0.5, 0]], atol=1e-9)
    np.testing.assert_allclose(g.h, [0.25, 0.25, -0.5], atol=1e-9)


def test_copy_gate_is_a_ferromagnetic_bond():
    g = library_gate("copy")
    assert g.j[0, 1] == pytest.approx(0.5) and np.all(g.h == 0)


def test_iand_with_output_clamped_low_has_three_ground_states():
    g = library_gate("iand")
    states = all_states(3)
    clamped = states[states[:, 2] == -1]
    e = ising_energy(g.j, g.h, clamped)
    ground = {tuple((clamped[k, :2] + 1) // 2) for k in np.nonzero(e <= e.min() + 1e-9)[0]}
    assert ground == {(0, 0), (0, 1), (1, 0)}


def test_xor_has_no_three_bit_encoding():
    with pytest.raises(InfeasibleGateError) as exc:
        synthesize_gate(xor_table(), 3)
    assert exc.value.violated


def test_xor_with_an_ancilla():
    g = library_gate("xor")
    assert g.n_ancilla == 1
    assert verify_gate(g, xor_table()).ok


def test_invalid_tables_are_rejected():
    with pytest.raises(ValueError):
        synthesize_gate(set(), 2)
    with pytest.raises(ValueError):
        synthesize_gate(to_spins([(0, 0), (0, 1), (1, 0), (1, 1)]), 2)
    with pytest.raises(ValueError):
        synthesize_gate(and_table(), 2)
    with pytest.raises(ValueError):
        library_gate("nand")


def test_gate_shape_validation():
    with pytest.raises(ValueError):
        IsingGate(2, np.array([[0, 1], [0, 0]]), np.zeros(2), 0.0)


@given(st.integers(2, 4), st.integers(0, 10_000))
def test_lp_finds_an_encoding_whenever_one_exists(n, seed):
    # a random Hamiltonian is a witness; its ground-state set must be synthesizable
    rng = np.random.default_rng(seed)
    j = np.triu(rng.integers(-2, 3, size=(n, n)).astype(float), 1)
    j = j + j.T
    h = rng.integers(-2, 3, size=n).astype(float)
    ground, _, gap = ground_state_set(j, h, n)
    assume(len(ground) < 2 ** n)
    gate = synthesize_gate(ground, n, margin=1.0)
    assert ground_state_set(gate.j, gate.h, n)[0] == ground
    # the rescaled witness is feasible, so it bounds the LP objective max|J| + 1e-3 max|h|
    scale = 1.0 / gap
    bound = np.abs(j * scale).max() + 1e-3 * np.abs(h * scale).max()
    assert np.abs(gate.j).max() + 1e-3 * np.abs(gate.h).max() <= bound + 1e-6
