"""Exception types shared across the toolkit."""


class SfqsimError(Exception):
    """Base class for all toolkit errors."""


class InvalidNetlist(SfqsimError):
    """Raised when a netlist fails validation; carries the report."""

    def __init__(self, report):
        super().__init__(str(report))
        self.report = report


class NonConvergence(SfqsimError):
    """Newton failed at a time step: dt too large or parameters too stiff."""

    def __init__(self, step: int, time: float):
        super().__init__(f"Newton did not converge at step {step} (t = {time * 1e12:.3f} ps)")
        self.step = step
        self.time = time


class SubcriticalBias(SfqsimError):
    """Oscillator bias current does not exceed the junction critical current."""


class MissingProbe(SfqsimError):
    """Requested probe is not present in a transient result."""


class InsufficientEvents(SfqsimError):
    """Too few pulse events for the requested estimate."""


class OverlappingWindows(SfqsimError):
    """Pulse areas requested with windows wider than the pulse spacing."""


class NoSwitching(SfqsimError):
    """Bias ramp reached its ceiling without a sustained voltage state."""


class NoSteps(SfqsimError):
    """No constant-voltage steps found; RF drive amplitude likely too small."""


class NominalFails(SfqsimError):
    """Margin sweep aborted: the nominal parameter point fails the predicate."""


class NoFeasiblePoint(SfqsimError):
    """Margin optimization found no parameter vector passing at nominal."""


class AboveGap(SfqsimError):
    """Frequency above the superconducting gap; Mattis-Bardeen sub-gap form invalid."""


class GridMismatch(SfqsimError):
    """Two-port responses sampled on different frequency grids."""


class SynthesisFailure(SfqsimError):
    """Matching-network synthesis could not meet the requested bandwidth."""
