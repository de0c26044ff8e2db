"""Netlist container, admissibility checks and JSON ingestion/emission."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .elements import (Capacitor, CurrentSource, Element, Inductor, Junction,
                       Mutual, Resistor, VoltageSource, element_from_json,
                       element_to_json)

__all__ = ["Probe", "Netlist", "Violation", "ValidationReport", "validate",
           "netlist_from_json", "netlist_to_json"]


@dataclass(frozen=True)
class Probe:
    """A recording request: node voltage, junction phase, or branch current."""

    kind: str               # "v" | "phase" | "i"
    target: str             # node name for "v", element label otherwise

    @property
    def label(self) -> str:
        return f"{self.kind}({self.target})"


@dataclass(frozen=True)
class Netlist:
    elements: tuple[Element, ...]
    probes: tuple[Probe, ...] = ()
    ground: str = "0"

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        object.__setattr__(self, "probes", tuple(self.probes))

    @property
    def nodes(self) -> set[str]:
        names: set[str] = {self.ground}
        for e in self.elements:
            names.update(e.nodes)
        return names

    def element(self, label: str) -> Element:
        for e in self.elements:
            if e.label == label:
                return e
        raise KeyError(label)

    def with_probes(self, probes) -> "Netlist":
        return Netlist(self.elements, tuple(probes), self.ground)

    def with_element_replaced(self, label: str, new: Element) -> "Netlist":
        els = tuple(new if e.label == label else e for e in self.elements)
        return Netlist(els, self.probes, self.ground)


@dataclass(frozen=True)
class Violation:
    code: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        if self.ok:
            return "netlist admissible"
        return "\n".join(f"{v.code}: {v.message}" for v in self.violations)


def validate(netlist: Netlist) -> ValidationReport:
    """Check admissibility; an empty report means the netlist can be solved.

    Checks: ground present, positive element parameters, |k| <= 1 couplings
    over existing inductors, unique labels, no dangling nodes, and that every
    node reaches ground through elements that constrain its voltage.
    """
    out: list[Violation] = []
    labels: set[str] = set()
    inductors: dict[str, Inductor] = {}

    for e in netlist.elements:
        if e.label in labels:
            out.append(Violation("duplicate label", f"element label {e.label!r} reused"))
        labels.add(e.label)
        if isinstance(e, Inductor):
            inductors[e.label] = e

    for e in netlist.elements:
        if isinstance(e, Resistor) and e.r <= 0:
            out.append(Violation("nonpositive parameter", f"{e.label}: R = {e.r}"))
        elif isinstance(e, Capacitor) and e.c <= 0:
            out.append(Violation("nonpositive parameter", f"{e.label}: C = {e.c}"))
        elif isinstance(e, Inductor) and e.l <= 0:
            out.append(Violation("nonpositive parameter", f"{e.label}: L = {e.l}"))
        elif isinstance(e, Junction):
            if e.ic <= 0:
                out.append(Violation("nonpositive parameter", f"{e.label}: Ic = {e.ic}"))
            if e.r <= 0:
                out.append(Violation("nonpositive parameter", f"{e.label}: shunt R = {e.r}"))
            if e.c < 0:
                out.append(Violation("nonpositive parameter", f"{e.label}: shunt C = {e.c}"))
        elif isinstance(e, Mutual):
            if abs(e.k) > 1.0:
                out.append(Violation("coupling out of range", f"{e.label}: |k| = {abs(e.k)} > 1"))
            for ref in (e.l1, e.l2):
                if ref not in inductors:
                    out.append(Violation("missing inductor",
                                         f"{e.label}: couples unknown inductor {ref!r}"))
            if e.l1 == e.l2:
                out.append(Violation("self coupling", f"{e.label}: couples {e.l1!r} to itself"))
        elif isinstance(e, (CurrentSource, VoltageSource)) and e.waveform is None:
            out.append(Violation("missing waveform", f"{e.label}: source has no waveform"))

    nodes = netlist.nodes
    if netlist.ground not in nodes:
        out.append(Violation("missing ground", f"ground node {netlist.ground!r} not present"))

    # Connectivity over voltage-constraining elements.  Current sources are
    # excluded: a node fed only by a current source has no defined voltage.
    adjacency: dict[str, set[str]] = {n: set() for n in nodes}
    touched: set[str] = {netlist.ground}
    for e in netlist.elements:
        if isinstance(e, (Resistor, Capacitor, Inductor, Junction, VoltageSource)):
            a, b = e.nodes
            adjacency[a].add(b)
            adjacency[b].add(a)
            touched.update((a, b))
    reached = {netlist.ground}
    stack = [netlist.ground]
    while stack:
        for nxt in adjacency.get(stack.pop(), ()):
            if nxt not in reached:
                reached.add(nxt)
                stack.append(nxt)
    for n in sorted(nodes):
        if n not in touched:
            out.append(Violation("dangling node",
                                 f"node {n!r} touches no voltage-defining element"))
        elif n not in reached:
            out.append(Violation("unreachable node", f"node {n!r} has no path to ground"))

    for p in netlist.probes:
        if p.kind == "v":
            if p.target not in nodes:
                out.append(Violation("unknown probe", f"probe node {p.target!r} not in netlist"))
        else:
            try:
                e = netlist.element(p.target)
            except KeyError:
                out.append(Violation("unknown probe", f"probe element {p.target!r} not found"))
                continue
            if p.kind == "phase" and not isinstance(e, Junction):
                out.append(Violation("unknown probe", f"phase probe on non-junction {p.target!r}"))
            if p.kind == "i" and isinstance(e, Mutual):
                out.append(Violation("unknown probe", f"current probe on coupling {p.target!r}"))

    return ValidationReport(tuple(out))


def netlist_from_json(obj: dict | str) -> Netlist:
    """Parse the JSON netlist document (engineering units, see README)."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    elements = tuple(element_from_json(e) for e in obj["elements"])
    probes = tuple(Probe(p["kind"], p.get("node") or p.get("element"))
                   for p in obj.get("probes", ()))
    return Netlist(elements, probes, obj.get("ground", "0"))


def netlist_to_json(netlist: Netlist) -> dict:
    probes = []
    for p in netlist.probes:
        key = "node" if p.kind == "v" else "element"
        probes.append({"kind": p.kind, key: p.target})
    return {
        "ground": netlist.ground,
        "nodes": sorted(netlist.nodes),
        "elements": [element_to_json(e) for e in netlist.elements],
        "probes": probes,
    }
