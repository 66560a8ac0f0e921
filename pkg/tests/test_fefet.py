import numpy as np
import pytest

from fepbit.device import (BiasProtocol, IVCurve, TransportParams, current_from_polarization,
                           fluctuation_range, hysteresis_window, iv_noiseless, iv_stochastic,
                           v_mos_of)
from fepbit.device.transport import drain_current
from fepbit.phasefield import FeSystemConfig


def test_current_from_polarization_uses_stack_potential():
    cfg = FeSystemConfig()
    tp = TransportParams()
    v, p = np.array([-2.0, 0.0, 2.0]), np.array([-0.1, 0.0, 0.1])
    exact = current_from_polarization(v, p, cfg, tp, exact=True)
    np.testing.assert_allclose(exact, drain_current(v_mos_of(v, p, cfg.stack), tp))
    np.testing.assert_allclose(current_from_polarization(v, p, cfg, tp), exact, rtol=1e-5)


def test_noiseless_branches_coincide_at_the_sweep_ends():
    cfg = FeSystemConfig()
    tp = TransportParams()
    sweep = np.linspace(-3, 3, 13)
    fwd = iv_noiseless(cfg, tp, sweep, "forward")
    rev = iv_noiseless(cfg, tp, sweep, "reverse")
    assert fwd.converged.all() and rev.converged.all()
    for v in (-3.0, 3.0):
        a = fwd.current[fwd.v_gate == v][0]
        b = rev.current[rev.v_gate == v][0]
        assert abs(a - b) / max(a, b) < 0.01
    assert np.all(np.diff(fwd.current) > 0)


def test_finite_dwell_opens_a_hysteresis_window():
    cfg = FeSystemConfig()
    tp = TransportParams()
    sweep = np.linspace(-30, 30, 25)
    fwd = iv_noiseless(cfg, tp, sweep, "forward", dwell=2e-10)
    rev = iv_noiseless(cfg, tp, sweep, "reverse", dwell=2e-10)
    assert hysteresis_window(fwd, rev) > 0


def test_hysteresis_window_of_shifted_curves():
    v = np.linspace(-2, 2, 5)
    fwd = IVCurve(v, np.ones(5), v - 0.5, np.ones(5, bool))
    rev = IVCurve(v, np.ones(5), v + 0.5, np.ones(5, bool), "reverse")
    assert hysteresis_window(fwd, rev) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        hysteresis_window(IVCurve(v, v, np.ones(5), v), rev)


def test_fluctuation_range_in_decades():
    assert fluctuation_range([1e-12, 1e-10, 1e-9]) == pytest.approx(3.0)


def test_protocol_validation():
    with pytest.raises(ValueError):
        BiasProtocol(hold_duration=0.0)
    with pytest.raises(ValueError):
        BiasProtocol(hold_duration=3e-11).check(2e-11)


def test_stochastic_iv_is_reproducible_and_level_independent():
    cfg = FeSystemConfig()
    tp = TransportParams()
    proto = BiasProtocol(-3.0, 2e-9, (0.0, 1.0), 4e-9)
    a = iv_stochastic(cfg, tp, proto)
    b = iv_stochastic(cfg, tp, proto)
    only_second = iv_stochastic(cfg, tp, BiasProtocol(-3.0, 2e-9, (5.0, 1.0), 4e-9))
    assert np.array_equal(a.traces[1].current, b.traces[1].current)
    assert np.array_equal(a.traces[1].current, only_second.traces[1].current)
    assert len(a.traces[0].times) == 200
    assert a.traces[0].times[0] == pytest.approx(2e-11)
    rows = list(a.rows())
    assert len(rows) == 400 and rows[0][1] == 0.0


def test_noise_off_protocol_is_deterministic_relaxation():
    cfg = FeSystemConfig()
    tr = iv_stochastic(cfg, TransportParams(), BiasProtocol(-3.0, 2e-9, (0.0,), 2e-8),
                       noise=False).traces[0]
    assert np.all(np.diff(tr.p_mean) >= -1e-15)
