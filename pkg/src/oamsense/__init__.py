"""Design and noise-budget simulator for a torsional optomechanical detector
of optical orbital angular momentum.

Submodules:

* device    - tabulated mechanical-mode datasets (load / validate / interpolate)
* mechanics - two-coupled-oscillator dynamics, torque transduction, coupling fits
* noise     - noise-equivalent torque budget, power and photon-number limits
* beams     - scalar fields, LG modes, phase masks, propagation, mode metrics
* swg       - hexagonal pillar-grating layouts and their transmission masks
* cli       - the `oam-sense` command line front end
"""

from . import beams, cli, constants, device, mechanics, noise, swg

__version__ = "0.1.0"

__all__ = [
    "beams",
    "cli",
    "constants",
    "device",
    "mechanics",
    "noise",
    "swg",
    "__version__",
]
