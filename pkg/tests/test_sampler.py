import numpy as np
import pytest
from hypothesis import given, strategies as st

from fepbit.ilnetwork import (IsingCircuit, PBitResponse, SolutionHistogram, clamp_product,
                              compose_multiplier, descend, energy, factor_pairs, factorize,
                              iand_circuit, run_network, sweep, wrong_basin_state)
from fepbit.ilnetwork.gates import all_states
from fepbit.pbit import pcurve_from_points, sigmoid
from fepbit.rng import stream

RESPONSES = [PBitResponse.ideal(), PBitResponse("logistic", gain=1.3),
             PBitResponse("table", xs=(-2.0, 0.0, 2.0), ps=(0.05, 0.5, 0.9)), PBitResponse.step()]


def reference_counts(circuit, response, n_sweeps, seed, decode=("A", "B")):
    n = circuit.n_total
    state = np.where(stream(seed, 0).random(n) < 0.5, -1, 1).astype(np.int8)
    for b, v in circuit.clamps.items():
        state[b] = v
    rng = stream(seed, 1)
    counts = {}
    for _ in range(n_sweeps):
        sweep(circuit, state, response, rng)
        key = tuple(circuit.decode_value(state, g) for g in decode)
        counts[key] = counts.get(key, 0) + 1
    return counts


@pytest.mark.parametrize("response", RESPONSES, ids=lambda r: r.kind)
def test_compiled_sampler_matches_reference_sweeps(response):
    c = clamp_product(compose_multiplier(2, 2), 6).with_i0(0.8)
    hist = run_network(c, response, 300, seed=11)
    assert hist.counts == reference_counts(c, response, 300, 11)


def test_single_bit_follows_its_response():
    c = IsingCircuit(1, np.zeros((1, 1)), np.array([0.7]), decode={"A": [0], "B": []})
    hist = run_network(c, PBitResponse.ideal(), 200_000, seed=3)
    p_up = hist.probability((1, 0))
    assert p_up == pytest.approx(0.5 * (1 + np.tanh(0.7)), abs=4e-3)


def test_ideal_network_samples_the_boltzmann_law():
    # P(s) proportional to exp(-i0 E(s)) for the tanh update
    c = iand_circuit(i0=0.7)
    c.decode = {"X": [0, 1], "Y": [2]}
    hist = run_network(c, PBitResponse.ideal(), 300_000, burn_in=100, seed=5, decode=("X", "Y"))
    states = all_states(3)
    w = np.exp(-0.7 * np.array([energy(c, s) for s in states]))
    w /= w.sum()
    for s, p in zip(states, w):
        b = (s + 1) // 2
        key = (int(b[0] + 2 * b[1]), int(b[2]))
        assert hist.probability(key) == pytest.approx(p, abs=6e-3)


def test_step_response_holds_state_at_zero_input():
    rng = np.random.default_rng(0)
    c = IsingCircuit(1, np.zeros((1, 1)), np.zeros(1))
    for start in (-1, 1):
        s = np.array([start], dtype=np.int8)
        sweep(c, s, PBitResponse.step(), rng)
        assert s[0] == start


def test_response_validation_and_probabilities():
    with pytest.raises(ValueError):
        PBitResponse("cubic")
    with pytest.raises(ValueError):
        PBitResponse("table", xs=(0.0, 1.0), ps=(0.9, 0.1))
    with pytest.raises(ValueError):
        PBitResponse("logistic", gain=0.0)
    r = PBitResponse("logistic", gain=2.0)
    np.testing.assert_allclose(r.prob([-1.0, 0.0, 1.0]), PBitResponse.ideal().prob([-1.0, 0.0, 1.0]))


def test_response_from_pcurve():
    v = np.linspace(-20, 20, 9)
    curve = pcurve_from_points(v, sigmoid(v, 2.0, 0.3), np.full(9, 10_000))
    fit = PBitResponse.from_pcurve(curve, volts_per_unit=5.0)
    assert fit.kind == "logistic" and fit.gain == pytest.approx(1.5, rel=1e-6)
    table = PBitResponse.from_pcurve(curve, volts_per_unit=5.0, use_fit=False)
    assert table.kind == "table"
    assert table.prob(0.0) == pytest.approx(0.5, abs=0.05)
    assert np.all(np.diff(table.ps) >= 0)


def test_histogram_bookkeeping():
    h = SolutionHistogram({(2, 3): 5, (3, 2): 3, (1, 1): 2}, 10, {(2, 3), (3, 2)})
    assert h.ranked()[0] == ((2, 3), 5)
    assert h.rank_of((1, 1)) == 2 and h.rank_of((0, 0)) is None
    assert h.accuracy == pytest.approx(0.8)
    back = SolutionHistogram.from_dict(h.to_dict())
    assert back.counts == h.counts and back.correct == h.correct
    m = h.merge(back)
    assert m.total_sweeps == 20 and m.counts[(2, 3)] == 10


def test_run_is_reproducible():
    c = clamp_product(compose_multiplier(2, 2), 6)
    a = run_network(c, PBitResponse.ideal(), 5000, seed=2, random_order=True)
    b = run_network(c, PBitResponse.ideal(), 5000, seed=2, random_order=True)
    assert a.counts == b.counts
    with pytest.raises(ValueError):
        run_network(c, PBitResponse.ideal(), 10, burn_in=10)


def test_factorize_six_ranks_factor_pairs_first():
    h = factorize(6, 2, 2, n_sweeps=50_000, seed=1, i0=2.0)
    assert {k for k, _ in h.ranked()[:2]} == {(2, 3), (3, 2)}
    assert h.correct == factor_pairs(6, 2, 2)


@given(st.integers(0, 500))
def test_descend_ends_in_a_local_minimum(seed):
    c = clamp_product(compose_multiplier(2, 2), 6)
    s0 = np.where(np.random.default_rng(seed).random(c.n_total) < 0.5, -1, 1)
    s, ok = descend(c, s0)
    assert ok
    e = energy(c, s)
    for i in c.free_bits:
        t = s.copy()
        t[i] = -t[i]
        assert energy(c, t) >= e - 1e-9


def test_wrong_basin_state_is_wrong_and_stable():
    c = clamp_product(compose_multiplier(2, 2), 6)
    s, key = wrong_basin_state(c, factor_pairs(6, 2, 2), seed=0)
    assert key not in factor_pairs(6, 2, 2)
    hist = run_network(c, PBitResponse.step(), 1000, initial=s)
    assert hist.counts == {key: 1000}
