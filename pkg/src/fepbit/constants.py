from scipy import constants as _c

EPS0 = _c.epsilon_0        # F/m
K_B = _c.k                 # J/K
Q_E = _c.e                 # C
HBAR = _c.hbar             # J s
H_PLANCK = _c.h            # J s
M_E = _c.m_e               # kg
