"""Physical constants and unit conventions.

Units used throughout the package: energies in meV, times in ps,
lengths in nm, masses in units of the free-electron mass.
"""

# Reduced Planck constant in meV ps.
HBAR_MEV_PS = 0.6582119569

# hbar^2 / (2 m_e) in meV nm^2; divide by the dimensionless effective mass
# to get the kinetic prefactor of a continuum Hamiltonian.
KINETIC_MEV_NM2 = 38.0998
