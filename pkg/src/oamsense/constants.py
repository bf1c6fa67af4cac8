"""Physical constants, pinned to fixed values so outputs are bit-reproducible."""

C = 2.99792458e8          # speed of light (m/s)
HBAR = 1.054571817e-34    # reduced Planck constant (J s)
KB = 1.380649e-23         # Boltzmann constant (J/K)
