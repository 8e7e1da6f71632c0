"""Ready-made studies: figure data sets, the tolerance table, real-system scans."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources

import numpy as np
from scipy.optimize import minimize_scalar

from .config import load_toml
from .errors import HomSimError
from .hom import HomConfig, bin_histogram
from .oracle import ideal_threshold
from .sweep import (
    Axis, RunRecord, Scenario, SweepSpec, evaluate, evaluate_point, find_crossings, find_threshold,
    g2_of, run_sweep, set_param,
)
from .tls import EmitterSpec, PulseSpec
from .units import UnitSystem, parse_quantity

FIGURES = ("fig2", "fig3", "fig4", "fig5", "fig6a", "fig6b", "fig7")
TABLE_AXES = ("gamma_ratio", "delta_omega", "delta_tau", "gamma_deph", "wander_fwhm")
TABLE_TARGETS = (0.1, 0.2, 0.3)


@dataclass
class FigureData:
    name: str
    records: list = field(default_factory=list)
    curves: dict = field(default_factory=dict)  # name -> (x, y, xlabel, ylabel)
    notes: dict = field(default_factory=dict)


def _sweep_curve(records, path):
    x = [r.params[path] for r in records if r.ok]
    y = [r.scalars["g2_normalized"] for r in records if r.ok]
    return np.array(x), np.array(y)


def _reindex(records, lead):
    for r in records:
        r.index = (lead,) + tuple(r.index)
    return records


# --- fig2: time-resolved curves in SI units ----------------------------------


def fig2(lifetimes_ps=(100.0, 200.0, 400.0, 800.0), pulse_ps=5.0, bin_width_ps=16.0,
         precision="default", jobs=1) -> FigureData:
    data = FigureData("fig2")
    for k, life in enumerate(lifetimes_ps):
        units = UnitSystem.from_lifetime(life, "ps")
        sc = Scenario(pulse=PulseSpec(units.time(f"{pulse_ps} ps")))
        res = evaluate(sc, precision)
        tau, vals = res.time_resolved()
        tau_ns = tau * life * 1e-3
        per_ns = vals / (life * 1e-3)
        centers, counts = bin_histogram(tau, vals, units.time(f"{bin_width_ps} ps"))
        data.curves[f"time_resolved_{life:g}ps"] = (tau_ns, per_ns, "tau_ns", "G2HOM_per_ns")
        data.curves[f"histogram_{life:g}ps"] = (centers * life * 1e-3, counts, "bin_center_ns", "coincidences")
        mid = int(np.argmin(np.abs(centers)))
        data.notes[f"{life:g}ps"] = {
            "central_bin": float(counts[mid]),
            "neighbour_bins": [float(counts[mid - 1]), float(counts[mid + 1])],
            "g2_normalized": res.g2hom_normalized,
        }
        data.records.append(RunRecord((k,), {"emitter1.lifetime_ps": life, "pulse.fwhm_ps": pulse_ps},
                                      "ok", res.scalars(), {}, "", res.extras["grid"]))
    return data


# --- fig3: decay-rate ratio versus detuning -----------------------------------


def fig3(ratio_count=21, detuning_count=25, precision="default", jobs=1) -> FigureData:
    spec = SweepSpec(
        Scenario(),
        (Axis("gamma_ratio", 0.2, 10.0, ratio_count, "log"), Axis("delta_omega", -3.0, 3.0, detuning_count)),
        ("g2_pulsewise", "breakdown"),
        precision,
    )
    recs = run_sweep(spec, jobs)
    data = FigureData("fig3", recs)
    ratios, dws = spec.axes[0].values(), spec.axes[1].values()
    g = np.full((len(ratios), len(dws)), np.nan)
    for r in recs:
        if r.ok:
            g[r.index] = r.scalars["g2_normalized"]
    for i in range(0, len(ratios), max(1, len(ratios) // 5)):
        data.curves[f"cut_ratio_{ratios[i]:.3g}"] = (dws, g[i], "delta_omega", "g2")
    for j in range(0, len(dws), max(1, len(dws) // 6)):
        data.curves[f"cut_detuning_{dws[j]:.3g}"] = (ratios, g[:, j], "gamma_ratio", "g2")
    ridge = ratios[np.nanargmin(g, axis=0)]
    data.curves["ridge"] = (dws, ridge, "delta_omega", "argmin_gamma_ratio")
    i0, j0 = np.unravel_index(np.nanargmin(g), g.shape)
    data.notes["global_minimum"] = {"gamma_ratio": float(ratios[i0]), "delta_omega": float(dws[j0]),
                                    "g2": float(g[i0, j0])}
    return data


# --- fig4: arrival-time delay -------------------------------------------------

FIG4_CASES = {
    "identical": {},
    "gamma_ratio_0.5": {"gamma_ratio": 0.5},
    "detuned_1": {"delta_omega": 1.0},
    "both": {"gamma_ratio": 0.5, "delta_omega": 1.0},
}


def fig4(count=41, span=5.0, precision="default", jobs=1) -> FigureData:
    data = FigureData("fig4")
    for k, (name, changes) in enumerate(FIG4_CASES.items()):
        base = Scenario()
        for path, v in changes.items():
            base = set_param(base, path, v)
        spec = SweepSpec(base, (Axis("delta_tau", -span, span, count),), ("g2_pulsewise", "breakdown"), precision)
        recs = _reindex(run_sweep(spec, jobs), k)
        data.records += recs
        data.curves[name] = (*_sweep_curve(recs, "hom.delta_tau"), "delta_tau", "g2")
    return data


# --- fig5: pure dephasing -----------------------------------------------------


def _argmin_refined(f, xs, ys):
    i = int(np.nanargmin(ys))
    if i == 0:
        return float(xs[0]), float(ys[0])
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, len(xs) - 1)]
    r = minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": 1e-4 * max(1.0, hi)})
    return float(r.x), float(r.fun)


def fig5(count=13, span=3.0, precision="default", jobs=1) -> FigureData:
    base = set_param(Scenario(), "gamma_ratio", 2.0)
    spec = SweepSpec(
        base,
        (Axis("emitter1.gamma_deph", 0.0, span, count), Axis("emitter2.gamma_deph", 0.0, span, count)),
        ("g2_pulsewise", "breakdown"),
        precision,
    )
    data = FigureData("fig5", _reindex(run_sweep(spec, jobs), 0))
    # line cuts: dephasing in emitter 1 for several ratios, then for several detunings
    for k, ratio in enumerate((1.0, 2.0, 5.0, 10.0), start=1):
        s = SweepSpec(set_param(Scenario(), "gamma_ratio", ratio), (Axis("gamma_deph", 0.0, 10.0, 21),),
                      ("g2_pulsewise",), precision)
        recs = _reindex(run_sweep(s, jobs), k)
        data.records += recs
        data.curves[f"a_ratio_{ratio:g}"] = (*_sweep_curve(recs, "emitter1.gamma_deph"), "gamma_deph_1", "g2")
    opt = []
    dws = (0.0, 1.0, 2.0, 3.0, 4.0)
    for k, dw in enumerate(dws, start=5):
        sc = set_param(Scenario(), "delta_omega", dw)
        s = SweepSpec(sc, (Axis("gamma_deph", 0.0, 6.0, 25),), ("g2_pulsewise",), precision)
        recs = _reindex(run_sweep(s, jobs), k)
        data.records += recs
        x, y = _sweep_curve(recs, "emitter1.gamma_deph")
        data.curves[f"b_detuning_{dw:g}"] = (x, y, "gamma_deph_1", "g2")
        opt.append(_argmin_refined(lambda v, sc=sc: g2_of(set_param(sc, "gamma_deph", v), precision), x, y))
    data.curves["b_optimum"] = (np.array(dws), np.array([o[0] for o in opt]), "delta_omega", "gamma_deph_opt")
    data.notes["dephasing_optimum"] = {f"{dw:g}": {"gamma_deph_opt": o[0], "g2": o[1]} for dw, o in zip(dws, opt)}
    return data


# --- fig6: spectral wandering -------------------------------------------------


def fig6a(fwhms=(0.0, 10.0, 50.0, 200.0), detuning=20.0, precision="default", jobs=1) -> FigureData:
    data = FigureData("fig6a")
    for k, fw in enumerate(fwhms):
        sc = Scenario(emitter1=EmitterSpec(1.0, wander_fwhm=fw, label="emitter1"),
                      hom=HomConfig(delta_omega0=detuning), resolve_beats=True)
        res = evaluate(sc, precision)
        tau, vals = res.time_resolved()
        keep = np.abs(tau) <= 6.0
        data.curves[f"fwhm_{fw:g}"] = (tau[keep], vals[keep], "tau", "G2HOM")
        data.records.append(RunRecord((k,), {"emitter1.wander_fwhm": fw, "hom.delta_omega0": detuning},
                                      "ok", res.scalars(), {}, "", res.extras["grid"]))
    return data


def fig6b(count=41, span=10.0, detunings=(0.0, 0.5, 1.0, 2.0, 3.0, 4.0), precision="default",
          jobs=1) -> FigureData:
    data = FigureData("fig6b")
    opt = []
    for k, dw in enumerate(detunings):
        sc = set_param(Scenario(), "delta_omega", dw)
        spec = SweepSpec(sc, (Axis("wander_fwhm", 0.0, span, count),), ("g2_pulsewise",), precision)
        recs = _reindex(run_sweep(spec, jobs), k)
        data.records += recs
        x, y = _sweep_curve(recs, "emitter2.wander_fwhm")
        data.curves[f"detuning_{dw:g}"] = (x, y, "fwhm_2", "g2")
        opt.append(_argmin_refined(lambda v, sc=sc: g2_of(set_param(sc, "wander_fwhm", v), precision), x, y))
    data.curves["fwhm_optimum"] = (np.array(detunings), np.array([o[0] for o in opt]), "delta_omega0", "fwhm_opt")
    data.notes["wandering_optimum"] = {f"{dw:g}": {"fwhm_opt": o[0], "g2": o[1]} for dw, o in zip(detunings, opt)}
    return data


# --- fig7: real systems ---------------------------------------------------------


def load_real_systems(path=None) -> list[dict]:
    """Preset emitters from the editable data file (lifetimes in ns)."""
    if path is None:
        ref = resources.files("homsim").joinpath("data/real_systems.toml")
        with resources.as_file(ref) as p:
            doc = load_toml(p)
    else:
        doc = load_toml(path)
    out = []
    for entry in doc.get("system", []):
        value, unit = parse_quantity(entry["lifetime"])
        ns = UnitSystem(1e9).time_to_internal(value, unit)  # gamma1 = 1/ns turns times into ns
        out.append({"name": entry["name"], "lifetime_ns": ns, "note": entry.get("note", "")})
    return out


def _system_scenario(lifetime1_ns, pulse_ps, detuning_ghz, convention):
    units = UnitSystem.from_lifetime(lifetime1_ns, "ns", convention)
    sc = Scenario(pulse=PulseSpec(units.time(f"{pulse_ps} ps")),
                  hom=HomConfig(delta_omega0=units.rate(f"{detuning_ghz} GHz")))
    return sc, units


def g2_vs_lifetime2(lifetime1_ns, lifetime2_ns, detuning_ghz=0.0, pulse_ps=10.0, precision="default",
                    convention="angular") -> float:
    sc, units = _system_scenario(lifetime1_ns, pulse_ps, detuning_ghz, convention)
    return g2_of(set_param(sc, "emitter2.lifetime", units.time(f"{lifetime2_ns} ns")), precision)


def lifetime_crossings(lifetime1_ns, detuning_ghz, target, pulse_ps=10.0, span_ns=(0.05, 20.0), scan=16,
                       precision="default", convention="angular"):
    """Lifetimes of emitter 2 (ns) where g2 crosses ``target``, with direction (+1 rising)."""
    def f(life_ns):
        return g2_vs_lifetime2(lifetime1_ns, life_ns, detuning_ghz, pulse_ps, precision, convention)

    crossings, _ = find_crossings(f, np.geomspace(*span_ns, scan), target, 1e-3, geometric=True)
    return crossings


def real_systems_report(lifetime1_ns=0.25, detunings_ghz=(0.0, 2.0, 4.0, 6.0), lifetimes2_ns=None,
                        pulse_ps=10.0, count=41, precision="default", convention="angular", jobs=1,
                        systems=None) -> FigureData:
    """g2 versus the lifetime of emitter 2 for each detuning, plus preset rows."""
    life2 = np.geomspace(0.05, 20.0, count) if lifetimes2_ns is None else np.asarray(lifetimes2_ns, float)
    data = FigureData(f"real_systems_{lifetime1_ns:g}ns")
    systems = load_real_systems() if systems is None else systems
    for k, det in enumerate(detunings_ghz):
        sc, units = _system_scenario(lifetime1_ns, pulse_ps, det, convention)
        tasks = [(SweepSpec(sc, (), ("g2_pulsewise",), precision), (k, i),
                  {"emitter2.lifetime": units.time(f"{t} ns")}) for i, t in enumerate(life2)]
        recs = _map(tasks, jobs)
        for r, t in zip(recs, life2):
            r.params = {"lifetime1_ns": lifetime1_ns, "detuning_ghz": det, "lifetime2_ns": float(t)}
        data.records += recs
        y = np.array([r.scalars.get("g2_normalized", np.nan) for r in recs])
        data.curves[f"detuning_{det:g}GHz"] = (life2, y, "lifetime2_ns", "g2")
        for s in systems:
            data.notes.setdefault(s["name"], {"lifetime_ns": s["lifetime_ns"]})[f"g2_{det:g}GHz"] = (
                g2_vs_lifetime2(lifetime1_ns, s["lifetime_ns"], det, pulse_ps, precision, convention))
    return data


def fig7(count=41, precision="default", jobs=1, convention="angular") -> FigureData:
    qd = real_systems_report(0.25, (0.0, 2.0, 4.0, 6.0), count=count, precision=precision, jobs=jobs,
                             convention=convention)
    cc = real_systems_report(2.0, (0.0,), count=count, precision=precision, jobs=jobs, convention=convention)
    data = FigureData("fig7", _reindex(qd.records, 0) + _reindex(cc.records, 1))
    data.curves = {f"tau1_250ps_{k}": v for k, v in qd.curves.items()}
    data.curves.update({f"tau1_2ns_{k}": v for k, v in cc.curves.items()})
    data.notes = {"systems_250ps": qd.notes, "systems_2ns": cc.notes}
    for det in (0.0, 4.0):
        xs = lifetime_crossings(0.25, det, 0.4, precision=precision, convention=convention)
        data.notes[f"crossing_0.4_250ps_{det:g}GHz_ns"] = [x for x, d in xs if d > 0]
    band = lifetime_crossings(2.0, 0.0, 0.1, precision=precision, convention=convention)
    data.notes["band_0.1_2ns_ns"] = [x for x, _ in band]
    return data


# --- table1 ----------------------------------------------------------------------


def _table_task(args):
    axis, target, precision = args
    try:
        value, reason, status = find_threshold(axis, target, Scenario(), precision), "", "ok"
    except HomSimError as exc:
        value, reason, status = math.nan, f"{type(exc).__name__}: {exc}", "failed"
    return value, reason, status


def _map(tasks, jobs, fn=None):
    fn = fn or (lambda t: evaluate_point(*t))
    if jobs <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_point_or_table, [(fn is _table_task, t) for t in tasks]))


def _point_or_table(item):
    is_table, t = item
    return _table_task(t) if is_table else evaluate_point(*t)


def table1(precision="default", jobs=1, axes=TABLE_AXES, targets=TABLE_TARGETS) -> FigureData:
    """Largest tolerated mismatch per axis for each g2 target, baseline pulse."""
    tasks = [(a, t, precision) for a in axes for t in targets]
    results = _map(tasks, jobs, _table_task)
    data = FigureData("table1")
    for (axis, target, _), (value, reason, status) in zip(tasks, results):
        ia, it = axes.index(axis), targets.index(target)
        data.records.append(RunRecord(
            (ia, it), {"axis": axis, "target": target}, status,
            {"threshold": value, "ideal_threshold": ideal_threshold(axis, target)} if status == "ok" else {},
            {}, reason,
        ))
    return data


def build_figure(name: str, precision="default", jobs=1, bin_width_ps=16.0, convention="angular") -> FigureData:
    if name == "fig2":
        return fig2(bin_width_ps=bin_width_ps, precision=precision, jobs=jobs)
    if name == "fig7":
        return fig7(precision=precision, jobs=jobs, convention=convention)
    builders = {"fig3": fig3, "fig4": fig4, "fig5": fig5, "fig6a": fig6a, "fig6b": fig6b}
    if name not in builders:
        raise ValueError(f"unknown figure {name!r}; choose from {FIGURES}")
    return builders[name](precision=precision, jobs=jobs)
