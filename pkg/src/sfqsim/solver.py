"""Transient MNA solver for superconductor netlists.

Trapezoidal integration with companion models for C/L/mutuals and Newton
iteration on the junction sin(phi) nonlinearity, JSIM-style.  Unknown vector
is [node voltages, inductor branch currents, voltage-source currents].
Identical (netlist, config, seed) inputs give bit-identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernel
from .constants import K_B, PHI0, TWO_PI
from .elements import (Capacitor, CurrentSource, Inductor, Junction, Mutual,
                       Resistor, VoltageSource)
from .errors import InvalidNetlist, NonConvergence, SfqsimError
from .netlist import Netlist, Probe, validate
from .waveforms import GaussianNoise, Pwl

__all__ = ["SolverConfig", "TransientResult", "IVCurve", "run_transient",
           "dc_sweep", "johnson_noise_current"]

_CHUNK = 8192


@dataclass(frozen=True)
class SolverConfig:
    t_end: float                    # s
    dt: float = 1e-13               # s
    newton_tol: float = 1e-9        # relative KCL residual
    newton_max_iter: int = 50
    temperature: float = 4.2        # K; > 0 enables Johnson noise
    rng_seed: int = 1

    def __post_init__(self):
        if self.dt <= 0 or self.t_end < self.dt or self.newton_tol <= 0:
            raise ValueError("need dt > 0, t_end >= dt, newton_tol > 0")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


@dataclass
class TransientResult:
    """Uniformly sampled probe records; time strictly increasing with step dt."""

    time: np.ndarray
    data: dict[str, np.ndarray]
    config: SolverConfig

    def __getitem__(self, label: str) -> np.ndarray:
        return self.data[label]

    @property
    def labels(self) -> list[str]:
        return list(self.data)

    def to_csv(self, path) -> None:
        """Write `t_ps,<probe1>,...` rows in engineering units."""
        headers = ["t_ps"]
        cols = [self.time / 1e-12]
        for label, series in self.data.items():
            kind, target = label.split("(", 1)
            target = target[:-1]
            unit, scale = {"v": ("v_mV", 1e3), "phase": ("phase_rad", 1.0),
                           "i": ("i_uA", 1e6)}[kind]
            headers.append(f"{unit}({target})")
            cols.append(series * scale)
        table = np.column_stack(cols)
        np.savetxt(path, table, delimiter=",", header=",".join(headers),
                   comments="", fmt="%.10g")


@dataclass
class IVCurve:
    """Sampled (bias current, time-averaged junction voltage) pairs."""

    bias: np.ndarray                # A, monotone
    voltage: np.ndarray             # V
    junction: str = ""
    rf_drive: tuple[float, float] | None = None   # (freq Hz, amplitude A)

    def to_csv(self, path) -> None:
        table = np.column_stack([self.bias / 1e-6, self.voltage / 1e-6])
        np.savetxt(path, table, delimiter=",", header="i_uA,v_uV", comments="",
                   fmt="%.10g")


def johnson_noise_current(r: float, t: float, dt: float, rng: np.random.Generator) -> float:
    """One Gaussian Johnson-noise current sample for a resistor.

    Zero mean, variance 4 k_B T / (R dt); attached in parallel with every
    resistor (junction shunts included) when the solver runs warm.
    """
    if r <= 0 or dt <= 0 or t < 0:
        raise ValueError("need R > 0, dt > 0, T >= 0")
    if t == 0.0:
        return 0.0
    return rng.normal(0.0, math.sqrt(4.0 * K_B * t / (r * dt)))


class _Assembled:
    """Kernel-ready arrays for one netlist at one dt."""

    def __init__(self, netlist: Netlist, dt: float, temperature: float):
        self.netlist = netlist
        self.dt = dt

        node_names = sorted(netlist.nodes - {netlist.ground})
        self.node_index = {netlist.ground: -1}
        self.node_index.update({n: i for i, n in enumerate(node_names)})
        self.n_nodes = len(node_names)

        jjs = [e for e in netlist.elements if isinstance(e, Junction)]
        caps = [e for e in netlist.elements if isinstance(e, Capacitor)]
        inds = [e for e in netlist.elements if isinstance(e, Inductor)]
        muts = [e for e in netlist.elements if isinstance(e, Mutual)]
        self.vsrcs = [e for e in netlist.elements if isinstance(e, VoltageSource)]
        isrcs = [e for e in netlist.elements if isinstance(e, CurrentSource)]
        self.csrcs = [e for e in isrcs if not isinstance(e.waveform, GaussianNoise)]
        noise_srcs = [e for e in isrcs if isinstance(e.waveform, GaussianNoise)]
        ress = [e for e in netlist.elements if isinstance(e, Resistor)]
        self.jjs, self.caps, self.inds = jjs, caps, inds

        self.jj_index = {e.label: i for i, e in enumerate(jjs)}
        self.cap_index = {e.label: i for i, e in enumerate(caps)}
        self.ind_index = {e.label: i for i, e in enumerate(inds)}
        self.cs_index = {e.label: i for i, e in enumerate(self.csrcs)}

        n = self.n_nodes + len(inds) + len(self.vsrcs)
        self.n_total = n
        self.ind_row = np.array([self.n_nodes + i for i in range(len(inds))], dtype=np.int64)
        self.vs_row = np.array([self.n_nodes + len(inds) + i
                                for i in range(len(self.vsrcs))], dtype=np.int64)

        ni = self.node_index
        G = np.zeros((n, n))

        def stamp_cond(a, b, g):
            ia, ib = ni[a], ni[b]
            if ia >= 0:
                G[ia, ia] += g
            if ib >= 0:
                G[ib, ib] += g
            if ia >= 0 and ib >= 0:
                G[ia, ib] -= g
                G[ib, ia] -= g

        for e in ress:
            stamp_cond(e.a, e.b, 1.0 / e.r)
        for e in caps:
            stamp_cond(e.a, e.b, 2.0 * e.c / dt)
        for e in jjs:
            stamp_cond(e.a, e.b, 1.0 / e.r)
            if e.c > 0:
                stamp_cond(e.a, e.b, 2.0 * e.c / dt)

        # Inductance matrix including mutual couplings, as 2 M / dt.
        Md = np.zeros((len(inds), len(inds)))
        for i, e in enumerate(inds):
            Md[i, i] = 2.0 * e.l / dt
        for m in muts:
            i1, i2 = self.ind_index[m.l1], self.ind_index[m.l2]
            mval = m.k * math.sqrt(inds[i1].l * inds[i2].l)
            Md[i1, i2] += 2.0 * mval / dt
            Md[i2, i1] += 2.0 * mval / dt
        self.Md = Md

        def stamp_branch(row, a, b):
            ia, ib = ni[a], ni[b]
            if ia >= 0:
                G[ia, row] += 1.0
                G[row, ia] += 1.0
            if ib >= 0:
                G[ib, row] -= 1.0
                G[row, ib] -= 1.0

        for i, e in enumerate(inds):
            row = self.ind_row[i]
            stamp_branch(row, e.a, e.b)
            G[row, self.ind_row] -= Md[i]
        for i, e in enumerate(self.vsrcs):
            stamp_branch(self.vs_row[i], e.a, e.b)

        self.G = G
        try:
            self.Ginv = np.linalg.inv(G) if n else np.zeros((0, 0))
        except np.linalg.LinAlgError as exc:
            raise SfqsimError("singular MNA system; check source topology") from exc

        self.jj_a = np.array([ni[e.a] for e in jjs], dtype=np.int64)
        self.jj_b = np.array([ni[e.b] for e in jjs], dtype=np.int64)
        self.jj_ic = np.array([e.ic for e in jjs])
        self.jj_geqc = np.array([2.0 * e.c / dt for e in jjs])
        self.ic_max = float(self.jj_ic.max()) if jjs else 0.0
        self.alpha = math.pi * dt / PHI0

        W = np.zeros((n, len(jjs)))
        for j in range(len(jjs)):
            if self.jj_a[j] >= 0:
                W[:, j] += self.Ginv[:, self.jj_a[j]]
            if self.jj_b[j] >= 0:
                W[:, j] -= self.Ginv[:, self.jj_b[j]]
        S0 = np.zeros((len(jjs), len(jjs)))
        for j in range(len(jjs)):
            row = W[self.jj_a[j]] if self.jj_a[j] >= 0 else 0.0
            rowb = W[self.jj_b[j]] if self.jj_b[j] >= 0 else 0.0
            S0[j] = row - rowb
        self.W, self.S0 = W, S0

        self.cap_a = np.array([ni[e.a] for e in caps], dtype=np.int64)
        self.cap_b = np.array([ni[e.b] for e in caps], dtype=np.int64)
        self.cap_geq = np.array([2.0 * e.c / dt for e in caps])
        self.ind_a = np.array([ni[e.a] for e in inds], dtype=np.int64)
        self.ind_b = np.array([ni[e.b] for e in inds], dtype=np.int64)

        self.cs_a = np.array([ni[e.a] for e in self.csrcs], dtype=np.int64)
        self.cs_b = np.array([ni[e.b] for e in self.csrcs], dtype=np.int64)

        # Noise injections: thermal across every resistive branch, plus
        # explicit Gaussian sources.  Order fixed by netlist order.
        nz: list[tuple[int, int, float]] = []
        if temperature > 0.0:
            for e in netlist.elements:
                if isinstance(e, Resistor):
                    nz.append((ni[e.a], ni[e.b],
                               math.sqrt(4.0 * K_B * temperature / (e.r * dt))))
                elif isinstance(e, Junction):
                    nz.append((ni[e.a], ni[e.b],
                               math.sqrt(4.0 * K_B * temperature / (e.r * dt))))
        for e in noise_srcs:
            nz.append((ni[e.a], ni[e.b], e.waveform.std))
        self.nz_a = np.array([t[0] for t in nz], dtype=np.int64)
        self.nz_b = np.array([t[1] for t in nz], dtype=np.int64)
        self.nz_std = np.array([t[2] for t in nz])

        self._build_probes(netlist)

    def _build_probes(self, netlist: Netlist) -> None:
        kinds, i1s, pas, pbs, pgs = [], [], [], [], []
        ni = self.node_index
        for p in netlist.probes:
            if p.kind == "v":
                idx = ni[p.target]
                if idx < 0:
                    kinds.append(8)   # ground: constant zero
                    i1s.append(0)
                else:
                    kinds.append(0)
                    i1s.append(idx)
                pas.append(-1), pbs.append(-1), pgs.append(0.0)
                continue
            e = netlist.element(p.target)
            if p.kind == "phase":
                kinds.append(1)
                i1s.append(self.jj_index[e.label])
                pas.append(-1), pbs.append(-1), pgs.append(0.0)
            elif isinstance(e, Inductor):
                kinds.append(0)
                i1s.append(int(self.ind_row[self.ind_index[e.label]]))
                pas.append(-1), pbs.append(-1), pgs.append(0.0)
            elif isinstance(e, VoltageSource):
                kinds.append(0)
                i1s.append(int(self.vs_row[self.vsrcs.index(e)]))
                pas.append(-1), pbs.append(-1), pgs.append(0.0)
            elif isinstance(e, Resistor):
                kinds.append(2)
                i1s.append(0)
                pas.append(ni[e.a]), pbs.append(ni[e.b]), pgs.append(1.0 / e.r)
            elif isinstance(e, Capacitor):
                kinds.append(3)
                i1s.append(self.cap_index[e.label])
                pas.append(-1), pbs.append(-1), pgs.append(0.0)
            elif isinstance(e, Junction):
                kinds.append(4)
                i1s.append(self.jj_index[e.label])
                pas.append(ni[e.a]), pbs.append(ni[e.b]), pgs.append(1.0 / e.r)
            elif isinstance(e, CurrentSource):
                kinds.append(5)
                i1s.append(self.cs_index[e.label])
                pas.append(-1), pbs.append(-1), pgs.append(0.0)
            else:
                raise SfqsimError(f"cannot probe current of {e.label!r}")
        self.pr_kind = np.array(kinds, dtype=np.int64)
        self.pr_i1 = np.array(i1s, dtype=np.int64)
        self.pr_a = np.array(pas, dtype=np.int64)
        self.pr_b = np.array(pbs, dtype=np.int64)
        self.pr_g = np.array(pgs)

    def initial_state(self):
        """Consistent t = 0 operating point honoring initial conditions.

        Capacitors are clamped to v0, inductors inject i0, junctions
        contribute their shunt plus the frozen supercurrent Ic sin(phi0), and
        sources take their t = 0 values.  Solved in least-squares sense so
        voltage-indeterminate corners (e.g. nodes touching only inductors)
        settle at the minimum-norm point instead of failing.
        """
        ni = self.node_index
        nn = self.n_nodes
        n_cap, n_vs = len(self.caps), len(self.vsrcs)
        n = nn + n_cap + n_vs
        A = np.zeros((n, n))
        b = np.zeros(n)

        def cond(a, bb, g):
            ia, ib = ni[a], ni[bb]
            if ia >= 0:
                A[ia, ia] += g
            if ib >= 0:
                A[ib, ib] += g
            if ia >= 0 and ib >= 0:
                A[ia, ib] -= g
                A[ib, ia] -= g

        def inject(a, bb, cur):
            ia, ib = ni[a], ni[bb]
            if ia >= 0:
                b[ia] += cur
            if ib >= 0:
                b[ib] -= cur

        def branch(row, a, bb, value):
            ia, ib = ni[a], ni[bb]
            if ia >= 0:
                A[ia, row] += 1.0
                A[row, ia] += 1.0
            if ib >= 0:
                A[ib, row] -= 1.0
                A[row, ib] -= 1.0
            b[row] = value

        for e in self.netlist.elements:
            if isinstance(e, Resistor):
                cond(e.a, e.b, 1.0 / e.r)
        for e in self.jjs:
            cond(e.a, e.b, 1.0 / e.r)
            inject(e.a, e.b, -e.ic * math.sin(e.phi0))
        for e in self.inds:
            inject(e.a, e.b, -e.i0)
        for e in self.csrcs:
            inject(e.a, e.b, e.waveform(0.0))
        for i, e in enumerate(self.caps):
            branch(nn + i, e.a, e.b, e.v0)
        for i, e in enumerate(self.vsrcs):
            branch(nn + n_cap + i, e.a, e.b, e.waveform(0.0))

        sol = np.linalg.lstsq(A, b, rcond=None)[0] if n else np.zeros(0)
        volts = sol[:nn]

        def vat(name):
            i = ni[name]
            return volts[i] if i >= 0 else 0.0

        x0 = np.zeros(self.n_total)
        x0[:nn] = volts
        for i, e in enumerate(self.inds):
            x0[self.ind_row[i]] = e.i0
        for i in range(n_vs):
            x0[self.vs_row[i]] = sol[nn + n_cap + i]
        jj_v0 = np.array([vat(e.a) - vat(e.b) for e in self.jjs])
        ind_v0 = np.array([vat(e.a) - vat(e.b) for e in self.inds])
        cap_i0 = sol[nn: nn + n_cap].copy()
        return x0, jj_v0, ind_v0, cap_i0

    def initial_probe_row(self, x0, cap_i0) -> np.ndarray:
        """Probe values of the consistent t = 0 state."""
        vals = np.zeros(len(self.netlist.probes))
        for i in range(len(self.netlist.probes)):
            kind = self.pr_kind[i]
            if kind == 0:
                vals[i] = x0[self.pr_i1[i]]
            elif kind == 1:
                vals[i] = self.jjs[self.pr_i1[i]].phi0
            elif kind == 2:
                va = x0[self.pr_a[i]] if self.pr_a[i] >= 0 else 0.0
                vb = x0[self.pr_b[i]] if self.pr_b[i] >= 0 else 0.0
                vals[i] = (va - vb) * self.pr_g[i]
            elif kind == 3:
                vals[i] = cap_i0[self.pr_i1[i]]
            elif kind == 4:
                j = self.pr_i1[i]
                va = x0[self.pr_a[i]] if self.pr_a[i] >= 0 else 0.0
                vb = x0[self.pr_b[i]] if self.pr_b[i] >= 0 else 0.0
                vals[i] = self.jjs[j].ic * math.sin(self.jjs[j].phi0) + (va - vb) * self.pr_g[i]
            elif kind == 5:
                vals[i] = self.csrcs[self.pr_i1[i]].waveform(0.0)
        return vals


def run_transient(netlist: Netlist, config: SolverConfig) -> TransientResult:
    """Integrate the netlist and return all requested probe records.

    Raises InvalidNetlist when validation fails and NonConvergence when a
    Newton step exceeds the iteration budget.
    """
    report = validate(netlist)
    if not report.ok:
        raise InvalidNetlist(report)

    asm = _Assembled(netlist, config.dt, config.temperature)
    rng = np.random.default_rng(config.rng_seed)
    n_steps = config.n_steps
    time = np.arange(n_steps + 1) * config.dt
    n_probes = len(netlist.probes)
    records = np.empty((n_probes, n_steps + 1))

    x, jj_v, ind_v, cap_i = asm.initial_state()
    records[:, 0] = asm.initial_probe_row(x, cap_i)
    jj_phi = np.array([e.phi0 for e in asm.jjs])
    jj_icap = np.zeros(len(asm.jjs))
    cap_v = np.array([e.v0 for e in asm.caps])
    ind_i = np.array([e.i0 for e in asm.inds])

    done = 0
    while done < n_steps:
        steps = min(_CHUNK, n_steps - done)
        ts = time[done + 1: done + 1 + steps]
        vs_vals = np.empty((steps, len(asm.vsrcs)))
        for j, e in enumerate(asm.vsrcs):
            vs_vals[:, j] = e.waveform.sample(ts)
        cs_vals = np.empty((steps, len(asm.csrcs)))
        for j, e in enumerate(asm.csrcs):
            cs_vals[:, j] = e.waveform.sample(ts)
        if len(asm.nz_std):
            nz_vals = rng.normal(size=(steps, len(asm.nz_std))) * asm.nz_std
        else:
            nz_vals = np.zeros((steps, 0))

        out = np.empty((n_probes, steps))
        ret = _kernel.run_chunk(
            asm.G, asm.Ginv, asm.W, asm.S0,
            asm.jj_a, asm.jj_b, asm.jj_ic, asm.jj_geqc, asm.alpha, asm.ic_max,
            asm.cap_a, asm.cap_b, asm.cap_geq,
            asm.ind_row, asm.ind_a, asm.ind_b, asm.Md,
            asm.vs_row, vs_vals,
            asm.cs_a, asm.cs_b, cs_vals,
            asm.nz_a, asm.nz_b, nz_vals,
            asm.pr_kind, asm.pr_i1, asm.pr_a, asm.pr_b, asm.pr_g,
            config.newton_tol, config.newton_max_iter, asm.n_nodes,
            x, jj_phi, jj_v, jj_icap, cap_v, cap_i, ind_i, ind_v,
            out, done,
        )
        if ret >= 0:
            raise NonConvergence(ret, (ret + 1) * config.dt)
        records[:, done + 1: done + 1 + steps] = out
        done += steps

    data = {p.label: records[i] for i, p in enumerate(netlist.probes)}
    return TransientResult(time, data, config)


def staircase(levels, t_window: float, t_rise: float) -> Pwl:
    """Piecewise-linear staircase holding each level for ``t_window``."""
    pts = [(0.0, float(levels[0]))]
    for k in range(1, len(levels)):
        t0 = k * t_window
        pts.append((t0, float(levels[k - 1])))
        pts.append((t0 + t_rise, float(levels[k])))
    pts.append(((len(levels) + 1) * t_window, float(levels[-1])))
    return Pwl(tuple(pts))


def dc_sweep(netlist: Netlist, source_label: str, ramp: tuple[float, float, float],
             config: SolverConfig, junction: str | None = None,
             n_samples: int = 120, settle: float = 0.4) -> IVCurve:
    """Staircase the named current source and record averaged junction voltage.

    ``ramp`` is (I_start, I_end, rate A/s); the total sweep time follows from
    the rate and is rounded to whole windows.  The averaging window is the
    trailing (1 - settle) share of each hold, an integer number of samples;
    the mean voltage comes from the junction phase advance, which is the exact
    trapezoidal time-average of its voltage.  State carries between holds.
    """
    i_start, i_end, rate = ramp
    src = netlist.element(source_label)
    if not isinstance(src, CurrentSource):
        raise SfqsimError(f"{source_label!r} is not a current source")
    if junction is None:
        jj_labels = [e.label for e in netlist.elements if isinstance(e, Junction)]
        if len(jj_labels) != 1:
            raise SfqsimError("specify which junction to average")
        junction = jj_labels[0]

    total_t = abs(i_end - i_start) / rate
    t_window = max(config.dt, total_t / n_samples)
    t_window = round(t_window / config.dt) * config.dt
    levels = np.linspace(i_start, i_end, n_samples)
    wave = staircase(levels, t_window, min(5e-12, 0.1 * t_window))
    swept = netlist.with_element_replaced(source_label, replace(src, waveform=wave))

    phase_probe = Probe("phase", junction)
    probes = tuple(swept.probes)
    if phase_probe not in probes:
        probes = probes + (phase_probe,)
    swept = swept.with_probes(probes)

    cfg = replace(config, t_end=n_samples * t_window)
    result = run_transient(swept, cfg)
    phi = result[phase_probe.label]

    steps_per = int(round(t_window / config.dt))
    v = np.empty(n_samples)
    for k in range(n_samples):
        j0 = k * steps_per + int(math.ceil(settle * steps_per))
        j1 = (k + 1) * steps_per
        v[k] = (phi[j1] - phi[j0]) * PHI0 / (TWO_PI * (result.time[j1] - result.time[j0]))
    order = 1.0 if i_end >= i_start else -1.0
    return IVCurve(levels[::1 if order > 0 else -1], v[::1 if order > 0 else -1],
                   junction=junction)
