"""Transient solver physics: junction relation, LC oracle, noise, determinism."""

import math

import numpy as np
import pytest

from sfqsim import (Capacitor, CurrentSource, Dc, Inductor, InvalidNetlist,
                    Junction, Netlist, NonConvergence, Probe, Resistor, Sine,
                    SolverConfig, VoltageSource, dc_sweep,
                    johnson_noise_current, run_transient)
from sfqsim.constants import FREQ_PER_VOLT, K_B, PHI0, TWO_PI


def cold(t_end, **kw):
    return SolverConfig(t_end=t_end, temperature=0.0, **kw)


def mean_voltage_from_phase(result, label, t_from, t_to):
    """Exact trapezoidal time-average of junction voltage via its phase."""
    i0 = np.searchsorted(result.time, t_from)
    i1 = np.searchsorted(result.time, t_to)
    phi = result[label]
    return (phi[i1] - phi[i0]) * PHI0 / (TWO_PI * (result.time[i1] - result.time[i0]))


def voltage_driven_junction(v):
    return Netlist(
        elements=[
            VoltageSource("VS", "n1", "0", waveform=Dc(v)),
            Junction("J1", "n1", "0", ic=1e-4, r=2.566, c=0.5e-12),
        ],
        probes=[Probe("phase", "J1")],
    )


def test_josephson_relation_10ghz():
    # 0.02068 mV * 483.6 GHz/mV is almost exactly 10 GHz
    v = 0.02068e-3
    res = run_transient(voltage_driven_junction(v), cold(10e-9))
    phi = res["phase(J1)"]
    rate = (phi[-1] - phi[0]) / (res.time[-1] - res.time[0]) / TWO_PI
    assert rate == pytest.approx(v * FREQ_PER_VOLT, rel=1e-3)
    assert rate == pytest.approx(10e9, rel=0.01)


def test_josephson_relation_linear_in_voltage():
    rates = []
    volts = np.array([5e-6, 10e-6, 20e-6, 50e-6, 100e-6])
    for v in volts:
        res = run_transient(voltage_driven_junction(v), cold(2e-9))
        phi = res["phase(J1)"]
        rates.append((phi[-1] - phi[0]) / (res.time[-1] - res.time[0]) / TWO_PI)
    rates = np.array(rates)
    slope = np.sum(volts * rates) / np.sum(volts * volts)
    assert slope == pytest.approx(FREQ_PER_VOLT, rel=1e-3)
    ss_res = np.sum((rates - slope * volts) ** 2)
    ss_tot = np.sum((rates - rates.mean()) ** 2)
    assert 1.0 - ss_res / ss_tot > 0.9999


def test_series_inductor_dc_steady_state():
    net = Netlist(
        elements=[
            CurrentSource("I0", "n1", "0", waveform=Dc(1e-4, ramp=0.2e-9)),
            Inductor("L1", "n1", "0", l=10e-12),
        ],
        probes=[Probe("i", "L1"), Probe("v", "n1")],
    )
    res = run_transient(net, cold(1e-9))
    assert res["i(L1)"][-1] == pytest.approx(1e-4, rel=1e-9)
    assert abs(res["v(n1)"][-1]) < 1e-9


def lc_netlist(l, c, v0=1e-3):
    return Netlist(
        elements=[
            Capacitor("C1", "n1", "0", c=c, v0=v0),
            Inductor("L1", "n1", "0", l=l),
        ],
        probes=[Probe("v", "n1")],
    )


def test_lc_resonance_frequency_and_amplitude():
    l, c = 10e-12, 1e-12
    f0 = 1.0 / (TWO_PI * math.sqrt(l * c))
    res = run_transient(lc_netlist(l, c), cold(100 / f0))
    v = res["v(n1)"]
    sign = np.sign(v)
    up = np.where((sign[:-1] < 0) & (sign[1:] >= 0))[0]
    f_meas = (len(up) - 1) / (res.time[up[-1]] - res.time[up[0]])
    assert f_meas == pytest.approx(f0, rel=1e-3)
    per = int(round(1.0 / f0 / res.config.dt))
    assert np.max(np.abs(v[-per:])) == pytest.approx(np.max(np.abs(v[:per])), rel=0.01)


def test_trapezoidal_second_order_on_lc():
    l, c = 10e-12, 1e-12
    f0 = 1.0 / (TWO_PI * math.sqrt(l * c))
    t_end = 10 / f0
    errs = []
    runs = {}
    for k, dt in enumerate([2e-13, 1e-13, 5e-14]):
        n = int(round(t_end / dt))
        runs[k] = run_transient(lc_netlist(l, c), cold(n * dt, dt=dt))
    # compare on the coarse grid (every 2nd / 4th fine sample)
    e01 = np.max(np.abs(runs[0]["v(n1)"] - runs[1]["v(n1)"][::2]))
    e12 = np.max(np.abs(runs[1]["v(n1)"] - runs[2]["v(n1)"][::2]))
    ratio = e01 / e12
    assert 3.0 < ratio < 5.5   # ~4 for a second-order method


def test_flux_quantum_per_phase_slip():
    # current-biased running junction: integral of V dt per 2 pi equals PHI0
    net = Netlist(
        elements=[
            CurrentSource("IB", "n1", "0", waveform=Dc(2e-4, ramp=0.1e-9)),
            Junction("J1", "n1", "0", ic=1e-4, r=1.0, c=1e-14),
        ],
        probes=[Probe("phase", "J1"), Probe("v", "n1")],
    )
    res = run_transient(net, cold(3e-9))
    i0 = np.searchsorted(res.time, 0.5e-9)
    phi, v, t = res["phase(J1)"][i0:], res["v(n1)"][i0:], res.time[i0:]
    slips = (phi[-1] - phi[0]) / TWO_PI
    area = np.trapezoid(v, t)
    assert area / slips == pytest.approx(PHI0, rel=5e-3)


def test_johnson_noise_variance():
    rng = np.random.default_rng(123)
    r, t, dt = 2.0, 4.2, 1e-13
    samples = np.array([johnson_noise_current(r, t, dt, rng) for _ in range(10 ** 6)])
    assert samples.var() == pytest.approx(4 * K_B * t / (r * dt), rel=0.02)
    assert abs(samples.mean()) < 3 * samples.std() / 1000


def test_johnson_noise_zero_temperature():
    rng = np.random.default_rng(0)
    assert johnson_noise_current(2.0, 0.0, 1e-13, rng) == 0.0


def test_johnson_noise_scales_inverse_with_r():
    rng = np.random.default_rng(7)
    v1 = np.array([johnson_noise_current(2.0, 4.2, 1e-13, rng) for _ in range(200000)]).var()
    v2 = np.array([johnson_noise_current(4.0, 4.2, 1e-13, rng) for _ in range(200000)]).var()
    assert v1 / v2 == pytest.approx(2.0, rel=0.03)


def noisy_junction_netlist():
    return Netlist(
        elements=[
            CurrentSource("IB", "n1", "0", waveform=Dc(1.5e-4, ramp=0.1e-9)),
            Junction("J1", "n1", "0", ic=1e-4, r=1.0, c=1e-14),
        ],
        probes=[Probe("v", "n1"), Probe("phase", "J1")],
    )


def test_bit_identical_reruns():
    cfg = SolverConfig(t_end=2e-9, temperature=4.2, rng_seed=11)
    r1 = run_transient(noisy_junction_netlist(), cfg)
    r2 = run_transient(noisy_junction_netlist(), cfg)
    for label in r1.data:
        assert np.array_equal(r1[label], r2[label])


def test_seed_and_temperature_change_waveforms():
    base = run_transient(noisy_junction_netlist(),
                         SolverConfig(t_end=1e-9, temperature=4.2, rng_seed=11))
    other_seed = run_transient(noisy_junction_netlist(),
                               SolverConfig(t_end=1e-9, temperature=4.2, rng_seed=12))
    coldrun = run_transient(noisy_junction_netlist(),
                            SolverConfig(t_end=1e-9, temperature=0.0, rng_seed=11))
    assert not np.array_equal(base["v(n1)"], other_seed["v(n1)"])
    assert not np.array_equal(base["v(n1)"], coldrun["v(n1)"])


def test_kcl_residual_small():
    # probe currents of all branches at a node and check they sum to ~0
    net = Netlist(
        elements=[
            CurrentSource("IB", "n1", "0", waveform=Dc(1.8e-4, ramp=0.1e-9)),
            Junction("J1", "n1", "0", ic=1e-4, r=1.0, c=1e-14),
            Resistor("R1", "n1", "0", r=5.0),
        ],
        probes=[Probe("i", "IB"), Probe("i", "J1"), Probe("i", "R1")],
    )
    res = run_transient(net, cold(1e-9))
    resid = res["i(IB)"] - res["i(J1)"] - res["i(R1)"]
    assert np.max(np.abs(resid[1:])) < 1e-9 * 1.8e-4 * 10


def test_invalid_netlist_raises():
    net = Netlist(elements=[Resistor("R1", "n1", "0", r=-1.0)])
    with pytest.raises(InvalidNetlist):
        run_transient(net, cold(1e-11))


def test_nonconvergence_signalled():
    # absurdly large dt on a stiff junction forces Newton failure
    net = Netlist(
        elements=[
            CurrentSource("IB", "n1", "0", waveform=Dc(5e-4)),
            Junction("J1", "n1", "0", ic=1e-4, r=20.0, c=2e-12),
        ],
    )
    with pytest.raises(NonConvergence):
        run_transient(net, SolverConfig(t_end=2e-9, dt=2e-11, temperature=0.0,
                                        newton_max_iter=8))


def test_result_row_count_and_csv(tmp_path):
    net = voltage_driven_junction(2e-5)
    res = run_transient(net, cold(1e-10))
    assert len(res.time) == 1001
    path = tmp_path / "out.csv"
    res.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("t_ps,")
    assert "phase_rad(J1)" in lines[0]
    assert len(lines) == 1002


def test_dc_sweep_overdamped_rsj():
    ic, r = 1e-4, 1.0
    net = Netlist(
        elements=[
            CurrentSource("IB", "n1", "0", waveform=Dc(0.0)),
            Junction("J1", "n1", "0", ic=ic, r=r, c=1e-15),
        ],
    )
    curve = dc_sweep(net, "IB", (0.0, 2.2 * ic, 2.2 * ic / 120e-9), cold(1e-9))
    assert np.all(np.diff(curve.bias) > 0)
    below = curve.voltage[curve.bias < 0.95 * ic]
    assert np.max(np.abs(below)) < 1e-7
    idx = int(np.argmin(np.abs(curve.bias - 2 * ic)))
    analytic = r * math.sqrt(curve.bias[idx] ** 2 - ic ** 2)
    assert curve.voltage[idx] == pytest.approx(analytic, rel=0.01)
