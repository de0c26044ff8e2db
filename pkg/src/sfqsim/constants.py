"""Physical constants used throughout the simulator (SI units, CODATA 2018)."""

import math

E_CHARGE = 1.602176634e-19      # elementary charge, C
HBAR = 1.054571817e-34          # reduced Planck constant, J s
H_PLANCK = 6.62607015e-34       # Planck constant, J s
K_B = 1.380649e-23              # Boltzmann constant, J/K

# Magnetic flux quantum h/2e.  In engineering units: 2.0678 mV ps.
PHI0 = H_PLANCK / (2.0 * E_CHARGE)

# Voltage-to-frequency conversion of a junction, f = V / PHI0.
# 4.8359784e14 Hz/V, i.e. the familiar 483.6 GHz/mV.
FREQ_PER_VOLT = 1.0 / PHI0

TWO_PI = 2.0 * math.pi


def josephson_frequency(voltage: float) -> float:
    """Oscillation frequency (Hz) of a junction held at a DC voltage (V)."""
    return voltage * FREQ_PER_VOLT


def voltage_for_frequency(freq: float) -> float:
    """DC junction voltage (V) that oscillates at the given frequency (Hz)."""
    return freq * PHI0


def critical_damping_resistance(ic: float, c: float, beta_c: float = 1.0) -> float:
    """Shunt resistance giving the requested Stewart-McCumber parameter.

    beta_c = 2 pi Ic R^2 C / PHI0, so R = sqrt(beta_c PHI0 / (2 pi Ic C)).
    """
    return math.sqrt(beta_c * PHI0 / (TWO_PI * ic * c))


def stewart_mccumber(ic: float, r: float, c: float) -> float:
    """Stewart-McCumber damping parameter of an RCSJ junction."""
    return TWO_PI * ic * r * r * c / PHI0
