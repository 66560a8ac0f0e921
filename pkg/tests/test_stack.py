import numpy as np
import pytest
from hypothesis import given, strategies as st

from fepbit.device import solve_stack, v_mos_of
from fepbit.phasefield import StackGeometry

EPS0 = 8.8541878128e-12

stacks = st.builds(StackGeometry,
                   fe_thickness_h=st.floats(2e-9, 2e-8),
                   sio2_thickness=st.floats(5e-10, 5e-9),
                   si_thickness=st.floats(1e-11, 1e-8))


@given(st.floats(-10, 10), st.floats(-0.5, 0.5), stacks)
def test_solution_satisfies_voltage_and_charge_balance(v_gate, p, stack):
    s = solve_stack(v_gate, p, stack)
    assert s.v_gate == pytest.approx(v_gate, abs=1e-9)
    q_fe = EPS0 * s.e_fe + p
    assert q_fe == pytest.approx(stack.c_sio2 * s.v_sio2, rel=1e-8, abs=1e-12)
    assert stack.c_sio2 * s.v_sio2 == pytest.approx(stack.c_mos * s.v_mos, rel=1e-8, abs=1e-12)
    assert s.q_areal == pytest.approx(stack.c_mos * s.v_mos)


@given(st.lists(st.floats(-10, 10), min_size=1, max_size=5), st.floats(-0.5, 0.5), stacks)
def test_closed_form_matches_linear_solve(vs, p, stack):
    got = v_mos_of(np.array(vs), p, stack)
    for v, g in zip(vs, got):
        assert g == pytest.approx(solve_stack(v, p, stack).v_mos, rel=1e-9, abs=1e-12)


def test_unbiased_unpolarized_stack_is_neutral():
    s = solve_stack(0.0, 0.0, StackGeometry())
    assert s.e_fe == 0 and s.v_mos == 0 and s.q_areal == 0


def test_positive_polarization_raises_channel_potential():
    stack = StackGeometry()
    assert v_mos_of(0.0, 0.1, stack) > 0 > v_mos_of(0.0, -0.1, stack)
