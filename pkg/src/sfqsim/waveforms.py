"""Source waveforms: total functions of time, vectorized over sample grids.

Every waveform is an immutable value with ``sample(t)`` mapping an array of
times (s) to source values (A for current sources, V for voltage sources).
``GaussianNoise`` is the one stochastic kind; the solver draws its samples
from the run's seeded generator so results stay reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Waveform", "Dc", "Ramp", "Sine", "PulseTrainDrive", "Pwl", "GaussianNoise",
    "waveform_from_json", "waveform_to_json",
]


class Waveform:
    """Base class; subclasses implement ``sample``."""

    def sample(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, t: float) -> float:
        return float(self.sample(np.asarray([t], dtype=float))[0])


@dataclass(frozen=True)
class Dc(Waveform):
    """Constant level with an optional raised-cosine turn-on.

    The smooth turn-on (C1 at both corners) avoids exciting the undamped
    alternating mode of the trapezoidal rule in lossless test circuits.
    """

    value: float
    ramp: float = 0.0   # turn-on time, s

    def sample(self, t: np.ndarray) -> np.ndarray:
        if self.ramp <= 0.0:
            return np.full_like(t, self.value, dtype=float)
        x = np.clip(t / self.ramp, 0.0, 1.0)
        return self.value * 0.5 * (1.0 - np.cos(np.pi * x))


@dataclass(frozen=True)
class Ramp(Waveform):
    """Linear sweep from ``start`` to ``stop`` over [t0, t1], clamped outside."""

    start: float
    stop: float
    t0: float
    t1: float

    def sample(self, t: np.ndarray) -> np.ndarray:
        x = np.clip((t - self.t0) / (self.t1 - self.t0), 0.0, 1.0)
        return self.start + (self.stop - self.start) * x


@dataclass(frozen=True)
class Sine(Waveform):
    amplitude: float
    freq: float
    phase: float = 0.0
    offset: float = 0.0

    def sample(self, t: np.ndarray) -> np.ndarray:
        return self.offset + self.amplitude * np.sin(2.0 * np.pi * self.freq * t + self.phase)


@dataclass(frozen=True)
class PulseTrainDrive(Waveform):
    """Train of raised-cosine pulses, used to inject SFQ-like excitations.

    Each pulse is amp * (1 - cos(2 pi (t - t_k)/width))/2 on [t_k, t_k + width]
    and zero elsewhere; pulses are assumed non-overlapping.
    """

    times: tuple[float, ...]
    amplitude: float
    width: float

    @staticmethod
    def periodic(rate: float, count: int, amplitude: float, width: float,
                 t_start: float = 0.0) -> "PulseTrainDrive":
        times = tuple(t_start + k / rate for k in range(count))
        return PulseTrainDrive(times, amplitude, width)

    def sample(self, t: np.ndarray) -> np.ndarray:
        out = np.zeros_like(t, dtype=float)
        if not self.times:
            return out
        starts = np.asarray(self.times)
        # np.searchsorted locates the latest pulse that could cover each sample.
        idx = np.searchsorted(starts, t, side="right") - 1
        valid = idx >= 0
        rel = np.where(valid, t - starts[np.clip(idx, 0, None)], -1.0)
        inside = valid & (rel >= 0.0) & (rel <= self.width)
        out[inside] = self.amplitude * 0.5 * (1.0 - np.cos(2.0 * np.pi * rel[inside] / self.width))
        return out


@dataclass(frozen=True)
class Pwl(Waveform):
    """Piecewise-linear interpolation through (t, value) points, clamped outside."""

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        ts = [p[0] for p in self.points]
        if len(ts) < 2 or any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("pwl needs >= 2 points with strictly increasing times")

    def sample(self, t: np.ndarray) -> np.ndarray:
        ts = np.asarray([p[0] for p in self.points])
        vs = np.asarray([p[1] for p in self.points])
        return np.interp(t, ts, vs)


@dataclass(frozen=True)
class GaussianNoise(Waveform):
    """White Gaussian samples with the given per-step standard deviation.

    Stochastic: the solver substitutes seeded draws; ``sample`` here returns
    zeros so a noise source is well-defined outside a simulation.
    """

    std: float

    def sample(self, t: np.ndarray) -> np.ndarray:
        return np.zeros_like(t, dtype=float)


_PS = 1e-12
_GHZ = 1e9
_MHZ = 1e6


def _scale_for(unit: str) -> float:
    return {"uA": 1e-6, "mA": 1e-3, "mV": 1e-3, "uV": 1e-6, "V": 1.0, "A": 1.0}[unit]


def waveform_from_json(obj: dict, unit: str) -> Waveform:
    """Build a waveform from its JSON form.

    ``unit`` is the engineering unit of the source's amplitude fields
    ("uA" for current sources, "mV" for voltage sources).
    """
    kind = obj["kind"]
    s = _scale_for(unit)
    amp_key = f"value_{unit}"
    if kind == "dc":
        return Dc(obj[amp_key] * s, obj.get("ramp_ps", 0.0) * _PS)
    if kind == "ramp":
        return Ramp(obj[f"start_{unit}"] * s, obj[f"stop_{unit}"] * s,
                    obj["t0_ps"] * _PS, obj["t1_ps"] * _PS)
    if kind == "sine":
        f = obj["f_GHz"] * _GHZ if "f_GHz" in obj else obj["f_MHz"] * _MHZ
        return Sine(obj[f"amp_{unit}"] * s, f, obj.get("phase_rad", 0.0),
                    obj.get(f"offset_{unit}", 0.0) * s)
    if kind == "pulses":
        if "t_ps" in obj:
            times = tuple(x * _PS for x in obj["t_ps"])
            return PulseTrainDrive(times, obj[f"amp_{unit}"] * s, obj["width_ps"] * _PS)
        return PulseTrainDrive.periodic(obj["rate_GHz"] * _GHZ, obj["count"],
                                        obj[f"amp_{unit}"] * s, obj["width_ps"] * _PS,
                                        obj.get("t_start_ps", 0.0) * _PS)
    if kind == "pwl":
        pts = tuple((tp * _PS, v * s) for tp, v in zip(obj["t_ps"], obj[f"values_{unit}"]))
        return Pwl(pts)
    if kind == "noise":
        return GaussianNoise(obj[f"std_{unit}"] * s)
    raise ValueError(f"unknown waveform kind {kind!r}")


def waveform_to_json(w: Waveform, unit: str) -> dict:
    s = _scale_for(unit)
    if isinstance(w, Dc):
        return {"kind": "dc", f"value_{unit}": w.value / s, "ramp_ps": w.ramp / _PS}
    if isinstance(w, Ramp):
        return {"kind": "ramp", f"start_{unit}": w.start / s, f"stop_{unit}": w.stop / s,
                "t0_ps": w.t0 / _PS, "t1_ps": w.t1 / _PS}
    if isinstance(w, Sine):
        return {"kind": "sine", f"amp_{unit}": w.amplitude / s, "f_GHz": w.freq / _GHZ,
                "phase_rad": w.phase, f"offset_{unit}": w.offset / s}
    if isinstance(w, PulseTrainDrive):
        return {"kind": "pulses", "t_ps": [t / _PS for t in w.times],
                f"amp_{unit}": w.amplitude / s, "width_ps": w.width / _PS}
    if isinstance(w, Pwl):
        return {"kind": "pwl", "t_ps": [p[0] / _PS for p in w.points],
                f"values_{unit}": [p[1] / s for p in w.points]}
    if isinstance(w, GaussianNoise):
        return {"kind": "noise", f"std_{unit}": w.std / s}
    raise ValueError(f"cannot serialize waveform {type(w).__name__}")
