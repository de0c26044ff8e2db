"""sfqsim: time-domain simulation and analysis of SFQ qubit-control chains."""

from .constants import (FREQ_PER_VOLT, K_B, PHI0, critical_damping_resistance,
                        josephson_frequency, stewart_mccumber,
                        voltage_for_frequency)
from .elements import (Capacitor, CurrentSource, Inductor, Junction, Mutual,
                       Resistor, VoltageSource)
from .errors import (AboveGap, GridMismatch, InsufficientEvents,
                     InvalidNetlist, MissingProbe, NoFeasiblePoint,
                     NominalFails, NonConvergence, NoSteps, NoSwitching,
                     OverlappingWindows, SfqsimError, SubcriticalBias,
                     SynthesisFailure)
from .netlist import Netlist, Probe, ValidationReport, netlist_from_json, \
    netlist_to_json, validate
from .solver import (IVCurve, SolverConfig, TransientResult, dc_sweep,
                     johnson_noise_current, run_transient)
from .waveforms import (Dc, GaussianNoise, PulseTrainDrive, Pwl, Ramp, Sine,
                        Waveform)

__version__ = "0.1.0"
