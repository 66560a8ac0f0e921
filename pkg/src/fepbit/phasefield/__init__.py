from .landau import (FE1, FE2, LandauSet, alpha1_of_temperature, d2psi_pol, dpsi_pol,
                     psi_pol, spontaneous_polarization)
from .system import (DomainParams, FeState, FeSystemConfig, NoiseConfig, StackGeometry,
                     depolarization_field, sample_domain_params, stationary_polarization)
from .dynamics import (DivergenceError, FieldMap, Trajectory, Waveform, deterministic_rhs,
                       noise_sample, rk4_step, run_trajectory, settle)
from .stats import Histogram, polarization_histogram, sample_std
from . import trends
