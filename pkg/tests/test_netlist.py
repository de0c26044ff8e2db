"""Netlist construction, validation and JSON round-tripping."""

import json

import pytest

from sfqsim import (CurrentSource, Dc, Inductor, Junction, Mutual, Netlist,
                    Probe, Resistor, Sine, netlist_from_json, netlist_to_json,
                    validate)


def single_jj_netlist():
    return Netlist(
        elements=[
            CurrentSource("IB", "n1", "0", waveform=Dc(5e-5)),
            Junction("J1", "n1", "0", ic=1e-4, r=2.0, c=0.5e-12),
        ],
        probes=[Probe("phase", "J1")],
    )


def test_minimal_valid_circuit():
    report = validate(single_jj_netlist())
    assert report.ok
    assert report.violations == ()


def test_nonpositive_resistance_flagged():
    net = Netlist(elements=[Resistor("R1", "n1", "0", r=0.0)])
    report = validate(net)
    assert not report.ok
    assert any(v.code == "nonpositive parameter" for v in report.violations)


def test_disconnected_subcircuit_flagged():
    net = Netlist(elements=[
        Resistor("R1", "n1", "0", r=1.0),
        Resistor("R2", "a", "b", r=1.0),   # island without a ground path
    ])
    report = validate(net)
    codes = {v.code for v in report.violations}
    assert "unreachable node" in codes


def test_dangling_node_flagged():
    # a node fed only by a current source has no defined voltage
    net = Netlist(elements=[
        Resistor("R1", "n1", "0", r=1.0),
        CurrentSource("I1", "n2", "0", waveform=Dc(1e-6)),
    ])
    report = validate(net)
    assert any(v.code == "dangling node" for v in report.violations)


def test_coupling_coefficient_bounds():
    net = Netlist(elements=[
        Inductor("L1", "n1", "0", l=1e-12),
        Inductor("L2", "n2", "0", l=1e-12),
        Resistor("R1", "n1", "0", r=1.0),
        Resistor("R2", "n2", "0", r=1.0),
        Mutual("K1", l1="L1", l2="L2", k=1.2),
    ])
    report = validate(net)
    assert any(v.code == "coupling out of range" for v in report.violations)
    ok = Netlist(elements=net.elements[:-1] + (Mutual("K1", l1="L1", l2="L2", k=0.9),))
    assert validate(ok).ok


def test_duplicate_labels_flagged():
    net = Netlist(elements=[
        Resistor("R1", "n1", "0", r=1.0),
        Resistor("R1", "n1", "0", r=2.0),
    ])
    assert any(v.code == "duplicate label" for v in validate(net).violations)


def test_probe_targets_checked():
    net = Netlist(
        elements=[Resistor("R1", "n1", "0", r=1.0)],
        probes=[Probe("v", "nope"), Probe("phase", "R1")],
    )
    report = validate(net)
    assert sum(v.code == "unknown probe" for v in report.violations) == 2


def test_json_round_trip():
    doc = {
        "ground": "0",
        "elements": [
            {"kind": "jj", "label": "J1", "nodes": ["n1", "0"],
             "ic_uA": 100, "r_ohm": 2.0, "c_pF": 0.5},
            {"kind": "resistor", "label": "Rb", "nodes": ["nb", "n1"], "r_ohm": 39.0},
            {"kind": "inductor", "label": "L1", "nodes": ["n1", "n2"], "l_pH": 5.0},
            {"kind": "capacitor", "label": "C1", "nodes": ["n2", "0"], "c_pF": 1.0},
            {"kind": "isource", "label": "IB", "nodes": ["nb", "0"],
             "waveform": {"kind": "dc", "value_uA": 70.0, "ramp_ps": 100.0}},
            {"kind": "vsource", "label": "VS", "nodes": ["n2", "0"],
             "waveform": {"kind": "sine", "amp_mV": 0.1, "f_GHz": 10.0}},
        ],
        "probes": [{"kind": "v", "node": "n1"}, {"kind": "phase", "element": "J1"},
                   {"kind": "i", "element": "L1"}],
    }
    net = netlist_from_json(json.dumps(doc))
    assert isinstance(net.element("J1"), Junction)
    assert net.element("J1").ic == pytest.approx(1e-4)
    assert net.element("L1").l == pytest.approx(5e-12)
    assert net.element("IB").waveform == Dc(7e-5, 100e-12)
    assert isinstance(net.element("VS").waveform, Sine)
    assert validate(net).ok

    back = netlist_to_json(net)
    net2 = netlist_from_json(back)
    assert net2 == net


def test_unknown_kind_rejected():
    with pytest.raises(ValueError):
        netlist_from_json({"elements": [{"kind": "diode", "label": "D1", "nodes": ["a", "0"]}]})
