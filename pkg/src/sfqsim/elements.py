"""Circuit elements: typed records over named nodes.

A Josephson junction is the only element carrying internal dynamical state
(phase and its derivative); everything else is linear.  Sources hold a
waveform that is a total function of time.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .waveforms import Waveform, waveform_from_json, waveform_to_json

__all__ = [
    "Element", "Resistor", "Capacitor", "Inductor", "Mutual", "Junction",
    "CurrentSource", "VoltageSource", "element_from_json", "element_to_json",
]


@dataclass(frozen=True)
class Element:
    label: str

    @property
    def nodes(self) -> tuple[str, ...]:
        return ()


@dataclass(frozen=True)
class Resistor(Element):
    a: str = "0"
    b: str = "0"
    r: float = 1.0          # ohm

    @property
    def nodes(self):
        return (self.a, self.b)


@dataclass(frozen=True)
class Capacitor(Element):
    a: str = "0"
    b: str = "0"
    c: float = 1e-12        # F
    v0: float = 0.0         # initial voltage, V

    @property
    def nodes(self):
        return (self.a, self.b)


@dataclass(frozen=True)
class Inductor(Element):
    a: str = "0"
    b: str = "0"
    l: float = 1e-12        # H
    i0: float = 0.0         # initial current a->b, A

    @property
    def nodes(self):
        return (self.a, self.b)


@dataclass(frozen=True)
class Mutual(Element):
    """Mutual coupling k between two named inductors; M = k sqrt(L1 L2)."""

    l1: str = ""
    l2: str = ""
    k: float = 0.0


@dataclass(frozen=True)
class Junction(Element):
    """RCSJ junction: C dV/dt + V/R + Ic sin(phi) = I, dphi/dt = (2e/hbar) V."""

    a: str = "0"
    b: str = "0"
    ic: float = 1e-4        # critical current, A
    r: float = 2.0          # shunt resistance, ohm
    c: float = 5e-13        # shunt capacitance, F
    phi0: float = 0.0       # initial phase, rad

    @property
    def nodes(self):
        return (self.a, self.b)


@dataclass(frozen=True)
class CurrentSource(Element):
    """Injects waveform current into node ``a`` and extracts it from ``b``."""

    a: str = "0"
    b: str = "0"
    waveform: Waveform = None

    @property
    def nodes(self):
        return (self.a, self.b)


@dataclass(frozen=True)
class VoltageSource(Element):
    """Holds v(a) - v(b) to the waveform value; branch current is an unknown."""

    a: str = "0"
    b: str = "0"
    waveform: Waveform = None

    @property
    def nodes(self):
        return (self.a, self.b)


_PF = 1e-12
_PH = 1e-12
_UA = 1e-6


def element_from_json(obj: dict) -> Element:
    kind = obj["kind"]
    label = obj["label"]
    if kind == "resistor":
        return Resistor(label, *obj["nodes"], r=obj["r_ohm"])
    if kind == "capacitor":
        return Capacitor(label, *obj["nodes"], c=obj["c_pF"] * _PF,
                         v0=obj.get("v0_mV", 0.0) * 1e-3)
    if kind == "inductor":
        return Inductor(label, *obj["nodes"], l=obj["l_pH"] * _PH,
                        i0=obj.get("i0_uA", 0.0) * _UA)
    if kind == "mutual":
        return Mutual(label, l1=obj["inductors"][0], l2=obj["inductors"][1], k=obj["k"])
    if kind == "jj":
        return Junction(label, *obj["nodes"], ic=obj["ic_uA"] * _UA, r=obj["r_ohm"],
                        c=obj["c_pF"] * _PF, phi0=obj.get("phi0_rad", 0.0))
    if kind == "isource":
        return CurrentSource(label, *obj["nodes"],
                             waveform=waveform_from_json(obj["waveform"], "uA"))
    if kind == "vsource":
        return VoltageSource(label, *obj["nodes"],
                             waveform=waveform_from_json(obj["waveform"], "mV"))
    raise ValueError(f"unknown element kind {kind!r}")


def element_to_json(e: Element) -> dict:
    if isinstance(e, Resistor):
        return {"kind": "resistor", "label": e.label, "nodes": [e.a, e.b], "r_ohm": e.r}
    if isinstance(e, Capacitor):
        return {"kind": "capacitor", "label": e.label, "nodes": [e.a, e.b],
                "c_pF": e.c / _PF, "v0_mV": e.v0 / 1e-3}
    if isinstance(e, Inductor):
        return {"kind": "inductor", "label": e.label, "nodes": [e.a, e.b],
                "l_pH": e.l / _PH, "i0_uA": e.i0 / _UA}
    if isinstance(e, Mutual):
        return {"kind": "mutual", "label": e.label, "inductors": [e.l1, e.l2], "k": e.k}
    if isinstance(e, Junction):
        return {"kind": "jj", "label": e.label, "nodes": [e.a, e.b], "ic_uA": e.ic / _UA,
                "r_ohm": e.r, "c_pF": e.c / _PF, "phi0_rad": e.phi0}
    if isinstance(e, CurrentSource):
        return {"kind": "isource", "label": e.label, "nodes": [e.a, e.b],
                "waveform": waveform_to_json(e.waveform, "uA")}
    if isinstance(e, VoltageSource):
        return {"kind": "vsource", "label": e.label, "nodes": [e.a, e.b],
                "waveform": waveform_to_json(e.waveform, "mV")}
    raise ValueError(f"cannot serialize {type(e).__name__}")
