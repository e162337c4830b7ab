"""Physical constants in SI units."""

import math

from scipy import constants as _c

#: Magnetic flux quantum h/2e (Wb).
PHI0 = 2.067833848e-15
#: Elementary charge (C).
E_CHARGE = _c.e
#: Reduced Planck constant (J s).
HBAR = _c.hbar
#: Boltzmann constant (J/K).
K_B = _c.k
#: Vacuum permeability, fixed at the pre-2019 exact value (H/m).
MU0 = 4e-7 * math.pi

TWO_PI = 2.0 * math.pi


def hz_to_rad(f_hz):
    """Convert a frequency in Hz to angular frequency in rad/s."""
    return TWO_PI * f_hz


def rad_to_hz(omega):
    """Convert an angular frequency in rad/s to Hz."""
    return omega / TWO_PI
