"""Physical constants in the meV / nm / ps unit system used throughout.

All interfaces exchange energies in meV, lengths in nm and times in ps;
these three constants are the only place unit conversions live.
"""

# hbar in meV * ps
HBAR_MEV_PS = 0.6582119

# hbar^2 / m0 in meV * nm^2 (m0 = free electron mass)
HBAR2_OVER_M0 = 76.1996

# e^2 / (4 pi eps0) in meV * nm
COULOMB_MEV_NM = 1439.96
