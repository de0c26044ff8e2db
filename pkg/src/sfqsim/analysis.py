"""Figure-of-merit extraction from transient results.

Pulse trains come from junction phase records (one event per upward crossing
of an odd multiple of pi), areas from windowed V dt integrals, spectra from
windowed DFTs.  Margin sweeps bisect a pass/fail predicate around the nominal
parameter point.  All analyses are pure functions of their inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .constants import PHI0, TWO_PI
from .elements import CurrentSource, Junction, Resistor, VoltageSource
from .errors import (InsufficientEvents, MissingProbe, NominalFails,
                     OverlappingWindows)
from .netlist import Netlist, Probe
from .solver import IVCurve, SolverConfig, TransientResult, run_transient

__all__ = [
    "PulseTrain", "Spectrum", "MarginReport", "IVCurve",
    "detect_pulses", "pulse_area", "spectrum", "estimate_frequency",
    "envelope", "static_power", "margin_sweep",
]


@dataclass(frozen=True)
class PulseTrain:
    """Ordered SFQ event times extracted from a junction phase record."""

    times: np.ndarray          # s, strictly increasing
    source: str                # probe label

    @property
    def count(self) -> int:
        return len(self.times)

    def rate(self) -> float:
        return estimate_frequency(self)


@dataclass(frozen=True)
class Spectrum:
    """Windowed DFT of a probe record.

    ``amp`` holds two-sided complex amplitudes scaled by 1/N, so a real tone
    of amplitude A gives |amp| = A/2 at +-f and sum |amp|^2 equals the mean
    square of the windowed samples (the Parseval identity used in tests).
    """

    freq: np.ndarray           # Hz, fftfreq layout
    amp: np.ndarray            # complex, volts
    window: str

    def magnitude(self) -> np.ndarray:
        return np.abs(self.amp)

    def positive(self) -> tuple[np.ndarray, np.ndarray]:
        """(freq, |amp|) restricted to f > 0."""
        sel = self.freq > 0
        return self.freq[sel], np.abs(self.amp[sel])

    def peak(self) -> tuple[float, float]:
        """Dominant positive-frequency component as (freq, |amp|)."""
        f, a = self.positive()
        i = int(np.argmax(a))
        return float(f[i]), float(a[i])

    def to_csv(self, path) -> None:
        sel = self.freq >= 0
        table = np.column_stack([self.freq[sel] / 1e9, np.abs(self.amp[sel]) / 1e-3,
                                 np.angle(self.amp[sel])])
        np.savetxt(path, table, delimiter=",", header="f_GHz,amp_mV,phase_rad",
                   comments="", fmt="%.10g")


@dataclass
class MarginReport:
    """Pass interval of one parameter, as fractions of its nominal value."""

    parameter: str
    nominal: float
    low: float                  # fraction <= 1
    high: float                 # fraction >= 1
    points: list[tuple[float, bool, int]]   # (scale, passed, error count)

    @property
    def half_width(self) -> float:
        return min(1.0 - self.low, self.high - 1.0)


def _phase_record(result: TransientResult, junction: str) -> np.ndarray:
    label = junction if junction.startswith("phase(") else f"phase({junction})"
    if label not in result.data:
        raise MissingProbe(f"no phase probe {label!r} in result")
    return result[label]


def _voltage_record(result: TransientResult, probe: str) -> np.ndarray:
    label = probe if "(" in probe else f"v({probe})"
    if label not in result.data:
        raise MissingProbe(f"no probe {label!r} in result")
    return result[label]


def detect_pulses(result: TransientResult, junction: str) -> PulseTrain:
    """One event per upward crossing of phi through an odd multiple of pi.

    Event times are linearly interpolated between samples.  Downward
    re-crossings cancel: a level is counted again only after being re-crossed
    upward, so count = floor(net phase advance / 2 pi) for monotone records.
    """
    phi = _phase_record(result, junction)
    t = result.time
    # number of odd-pi levels at or below phi
    levels = np.floor((phi + math.pi) / TWO_PI).astype(np.int64)
    steps = np.diff(levels)
    events: list[float] = []
    for i in np.nonzero(steps > 0)[0]:
        dphi = phi[i + 1] - phi[i]
        for lev in range(levels[i] + 1, levels[i + 1] + 1):
            target = (2 * lev - 1) * math.pi
            frac = (target - phi[i]) / dphi
            events.append(t[i] + frac * (t[i + 1] - t[i]))
    label = junction if junction.startswith("phase(") else f"phase({junction})"
    return PulseTrain(np.asarray(events), label)


def estimate_frequency(train: PulseTrain) -> float:
    """Mean event rate (count - 1) / span; needs at least two events."""
    if train.count < 2:
        raise InsufficientEvents(f"{train.count} event(s) in {train.source}")
    return (train.count - 1) / (train.times[-1] - train.times[0])


def pulse_area(result: TransientResult, probe: str, train: PulseTrain,
               window: float | None = None) -> np.ndarray:
    """Per-pulse integral of V dt (Wb) over a window bracketing each event.

    With ``window=None`` the windows extend to the midpoints between
    neighbouring events (never overlapping); a fixed width raises
    OverlappingWindows when events sit closer than the window.
    """
    v = _voltage_record(result, probe)
    t = result.time
    times = train.times
    if len(times) == 0:
        return np.zeros(0)
    if window is not None and len(times) > 1:
        if np.min(np.diff(times)) < window:
            raise OverlappingWindows(f"events closer than window = {window * 1e12:.2f} ps")
    areas = np.empty(len(times))
    if window is None:
        mids = 0.5 * (times[1:] + times[:-1])
        half = 0.5 * (np.median(np.diff(times)) if len(times) > 1 else (t[-1] - t[0]))
        starts = np.concatenate([[max(times[0] - half, t[0])], mids])
        stops = np.concatenate([mids, [min(times[-1] + half, t[-1])]])
    else:
        starts = np.maximum(times - 0.5 * window, t[0])
        stops = np.minimum(times + 0.5 * window, t[-1])
    i0 = np.searchsorted(t, starts)
    i1 = np.searchsorted(t, stops)
    for k in range(len(times)):
        areas[k] = np.trapezoid(v[i0[k]:i1[k] + 1], t[i0[k]:i1[k] + 1])
    return areas


_WINDOWS = {
    "rect": lambda n: np.ones(n),
    "hann": lambda n: np.hanning(n),
}


def spectrum(result: TransientResult, probe: str, window: str = "rect") -> Spectrum:
    """Windowed two-sided DFT of a probe record, amplitudes in volts."""
    x = _voltage_record(result, probe)
    dt = result.time[1] - result.time[0]
    return spectrum_of(x, dt, window)


def spectrum_of(x: np.ndarray, dt: float, window: str = "rect") -> Spectrum:
    n = len(x)
    w = _WINDOWS[window](n)
    amp = np.fft.fft(x * w) / n
    freq = np.fft.fftfreq(n, dt)
    return Spectrum(freq, amp, window)


def envelope(result: TransientResult, probe: str, f_cut: float) -> np.ndarray:
    """Zero-phase low-pass of |v|: the pulse-train envelope without group delay."""
    x = np.abs(_voltage_record(result, probe))
    dt = result.time[1] - result.time[0]
    spec = np.fft.rfft(x)
    f = np.fft.rfftfreq(len(x), dt)
    spec[f > f_cut] = 0.0
    return np.fft.irfft(spec, n=len(x))


def mean_junction_voltage(result: TransientResult, junction: str,
                          t_from: float, t_to: float) -> float:
    """Exact trapezoidal time-average of a junction voltage via its phase."""
    phi = _phase_record(result, junction)
    i0 = int(np.searchsorted(result.time, t_from))
    i1 = min(int(np.searchsorted(result.time, t_to)), len(phi) - 1)
    return (phi[i1] - phi[i0]) * PHI0 / (TWO_PI * (result.time[i1] - result.time[i0]))


def static_power(netlist: Netlist, result: TransientResult | None = None,
                 config: SolverConfig | None = None,
                 window: tuple[float, float] | None = None) -> float:
    """Time-averaged power delivered by all sources, watts.

    When no result is given, the netlist is re-probed (source terminals and
    branch currents) and simulated with ``config``.  The average runs over
    ``window`` or the trailing half of the record.
    """
    sources = [e for e in netlist.elements
               if isinstance(e, (CurrentSource, VoltageSource))]
    if result is None:
        probes = []
        for e in sources:
            probes.extend([Probe("v", e.a), Probe("v", e.b), Probe("i", e.label)])
        seen, uniq = set(), []
        for p in probes:
            if p not in seen:
                uniq.append(p)
                seen.add(p)
        if config is None:
            raise ValueError("static_power needs a config when no result is given")
        result = run_transient(netlist.with_probes(uniq), config)

    t = result.time
    t0, t1 = window if window else (t[0] + 0.5 * (t[-1] - t[0]), t[-1])
    sel = (t >= t0) & (t <= t1)

    def node_v(name):
        if name == netlist.ground:
            return 0.0
        return result[f"v({name})"][sel]

    total = 0.0
    for e in sources:
        vab = node_v(e.a) - node_v(e.b)
        i = result[f"i({e.label})"][sel]
        if isinstance(e, CurrentSource):
            p = vab * i                  # injects i into node a
        else:
            p = -vab * i                 # branch current flows a -> b inside
        total += float(np.mean(p))
    return total


def margin_sweep(builder: Callable[[float], Netlist], parameter: str,
                 predicate: Callable[[TransientResult], bool | tuple[bool, int]],
                 config: SolverConfig, sweep_range: tuple[float, float] = (0.5, 1.5),
                 steps: int = 6, resolution: float = 0.01,
                 nominal: float = 1.0) -> MarginReport:
    """Bisection-refined pass interval of one parameter around its nominal.

    ``builder`` maps a scale factor (1.0 = nominal) to a netlist; the
    predicate judges the transient result, optionally returning an error
    count.  Raises NominalFails when the nominal point fails.
    """
    lo_bound, hi_bound = sweep_range
    points: list[tuple[float, bool, int]] = []

    def passes(scale: float) -> bool:
        verdict = predicate(run_transient(builder(scale), config))
        ok, errs = verdict if isinstance(verdict, tuple) else (verdict, 0 if verdict else 1)
        points.append((scale, ok, errs))
        return ok

    if not passes(1.0):
        raise NominalFails(f"{parameter}: predicate fails at the nominal point")

    def edge(direction: int, bound: float) -> float:
        grid = np.linspace(1.0, bound, steps + 1)[1:]
        last_pass, first_fail = 1.0, None
        for s in grid:
            if passes(float(s)):
                last_pass = float(s)
            else:
                first_fail = float(s)
                break
        if first_fail is None:
            return bound
        while abs(first_fail - last_pass) > resolution:
            mid = 0.5 * (first_fail + last_pass)
            if passes(mid):
                last_pass = mid
            else:
                first_fail = mid
        return last_pass

    high = edge(+1, hi_bound)
    low = edge(-1, lo_bound)
    return MarginReport(parameter, nominal, low, high, points)
