from .stack import SingularStackError, StackSolution, solve_stack, v_mos_of
from .transport import (CurrentTable, QuadratureError, TransportParams, calibrate_band_offset,
                        drain_current, fermi_dirac_integral, parabolic_barrier, tob_current,
                        tunnel_current, wkb_transmission)
from .fefet import (BiasProtocol, BiasTrace, IVCurve, SettlementError, StochasticIV,
                    current_from_polarization, device_field_map, fluctuation_range,
                    hysteresis_window, iv_noiseless, iv_stochastic)
