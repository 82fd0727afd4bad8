"""Command-line front end.

Commands: mesh generation, single solver runs, parameter sweeps, ROM
training and evaluation, clinical-table validation, and report emission.
Exit codes: 0 success, 1 runtime/numerical failure, 2 usage or schema
error.

Environment: HEMOFLOW_OUTDIR overrides the default output directory,
HEMOFLOW_WORKERS caps sweep concurrency, HEMOFLOW_LOG sets the log level.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time

import numpy as np

from . import indicators, podi, pump, refdata, units, windkessel
from .casefile import load_case
from .errors import HemoflowError, InvalidArgumentError, SchemaError
from .fv import PisoSolver
from .indicators import TimeSeries, pas_pad_pam, volume_avg_pressure, wall_shear_stress
from .mesh import (generate_bifurcation_mesh, generate_channel_mesh,
                   generate_pipe_mesh, mesh_quality, read_mesh, write_mesh,
                   write_vtk)
from .snapshots import SnapshotDB, SweepPlan, load_models, save_models

log = logging.getLogger("hemoflow")


def _outdir(args, default="."):
    d = getattr(args, "out_dir", None) or os.environ.get("HEMOFLOW_OUTDIR", default)
    os.makedirs(d, exist_ok=True)
    return d


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([f"{v:.15g}" if isinstance(v, float) else v for v in row])


# -- mesh -----------------------------------------------------------------------

def cmd_mesh(args):
    if args.shape == "pipe":
        mesh = generate_pipe_mesh(args.length, args.diameter,
                                  axial_cells=args.axial,
                                  radial_cells=args.radial)
    elif args.shape == "channel":
        mesh = generate_channel_mesh(args.length, args.height,
                                     nx=args.axial, ny=args.radial)
    else:
        mesh = generate_bifurcation_mesh(args.length, args.diameter,
                                         args.branch_diameter,
                                         args.branch_angle,
                                         resolution=args.resolution)
    write_mesh(mesh, args.out)
    if args.vtk:
        write_vtk(mesh, args.vtk)
    print(mesh_quality(mesh))
    print(f"wrote {args.out}")
    return 0


# -- single run -------------------------------------------------------------------

def _wall_patches(mesh):
    return [n for n, p in mesh.patches.items() if p.kind == "wall"]


def _run_case(case, inflow_lmin=None, observer=None):
    mesh = case.load_mesh()
    bcs = case.build_bcs(mesh, inflow_override_lmin=inflow_lmin)
    solver = PisoSolver(mesh, bcs, case.fluid, case.solver)
    state = solver.initialize()
    if case.initial.get("from_inflow"):
        # start from a uniform velocity matched to the inflow direction
        from .fv import InflowBC
        for name, (vbc, _) in bcs.conditions.items():
            if isinstance(vbc, InflowBC):
                uf = vbc.face_velocities(mesh, mesh.patches[name], 0.0)
                state.u[:] = uf.mean(axis=0)
        state = solver.initialize(u=state.u)
    state = solver.run(state, observer=observer)
    return mesh, solver, state


def cmd_fom_run(args):
    case = load_case(args.case)
    out = _outdir(args, case.output.get("dir", "."))
    times, pavg = [], []
    probes = [tuple(p) for p in case.output.get("probes", [])]
    probe_rows = []

    def observer(st):
        times.append(st.time)
        pavg.append(volume_avg_pressure(st.p, st.mesh))
        if probes:
            row = [st.time]
            for xy in probes:
                c = int(np.argmin(np.linalg.norm(
                    st.mesh.cell_centroid - np.asarray(xy), axis=1)))
                row.append(st.p[c])
                row.extend(st.u[c])
            probe_rows.append(row)

    t0 = time.perf_counter()
    mesh, solver, state = _run_case(case, observer=observer)
    elapsed = time.perf_counter() - t0

    cell_data = {"p": state.p}
    for i, ax in enumerate("xyz"[:mesh.dim]):
        cell_data[f"u_{ax}"] = state.u[:, i]
    write_vtk(mesh, os.path.join(out, "fields.vtk"), cell_data)
    _write_csv(os.path.join(out, "p_avg.csv"), ["t_s", "p_avg_pa"],
               list(zip(times, pavg)))
    if probe_rows:
        hdr = ["t_s"]
        for i in range(len(probes)):
            hdr += [f"p{i}_pa"] + [f"u{i}_{ax}" for ax in "xyz"[:mesh.dim]]
        _write_csv(os.path.join(out, "probes.csv"), hdr, probe_rows)

    series = TimeSeries(np.asarray(times), np.asarray(pavg))
    pas, pad, pam = pas_pad_pam(series)
    lines = [f"time integrated: {state.time:.6g} s  (wall {elapsed:.1f} s)",
             f"PAS = {pas/units.MMHG_TO_PA:.2f} mmHg",
             f"PAD = {pad/units.MMHG_TO_PA:.2f} mmHg",
             f"PAM = {pam/units.MMHG_TO_PA:.2f} mmHg"]
    if abs(pas - pad) < 1e-9 * max(abs(pam), 1.0):
        lines.append("steady solution: PAM = PAD = PAS")
    report = "\n".join(lines)
    with open(os.path.join(out, "report.txt"), "w") as fh:
        fh.write(report + "\n")
    print(report)
    return 0


# -- sweep ------------------------------------------------------------------------

def _steady_fields(mesh, solver, state):
    """Field dict stored per snapshot: p, |WSS| on walls, velocity parts."""
    fields = {"p": state.p}
    wss = []
    for name in _wall_patches(mesh):
        wss.append(wall_shear_stress(state, mesh, solver.fluid, name).magnitude())
    if wss:
        fields["wss"] = np.concatenate(wss)
    for i, ax in enumerate("xyz"[:mesh.dim]):
        fields[f"u_{ax}"] = state.u[:, i]
    return fields


def _sweep_one(case_path, pf, delta_p):
    case = load_case(case_path)
    t0 = time.perf_counter()
    mesh, solver, state = _run_case(case, inflow_lmin=pf)
    elapsed = time.perf_counter() - t0
    omega = pump.pump_speed_for(pump.reference_model(), pf, delta_p)
    return mesh, solver, _steady_fields(mesh, solver, state), omega, elapsed


def cmd_sweep(args):
    plan = SweepPlan(args.lo, args.hi, args.count, delta_p=args.delta_p)
    db = SnapshotDB(args.out)
    workers = int(args.workers or os.environ.get("HEMOFLOW_WORKERS", "1"))
    params = [pf for pf in plan.params() if not db.has_entry(pf)]
    skipped = plan.count - len(params)
    if skipped:
        log.info("resuming sweep: %d entries already complete", skipped)

    def run_one(pf):
        mesh, solver, fields, omega, elapsed = _sweep_one(args.case, pf,
                                                          plan.delta_p)
        return pf, mesh, solver, fields, omega, elapsed

    results = []
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_one, params))
    else:
        results = [run_one(pf) for pf in params]

    for pf, mesh, solver, fields, omega, elapsed in results:
        db.add_entry(pf, fields, omega_rpm=omega, fom_seconds=elapsed)
        log.info("PF=%.3f l/min  omega=%.0f rpm  %.1f s", pf, omega, elapsed)
    if results and not db.manifest["weights"]:
        _, mesh, solver, fields, _, _ = results[0]
        db.set_weights("p", mesh.cell_volume)
        for ax in "xyz"[:mesh.dim]:
            db.set_weights(f"u_{ax}", mesh.cell_volume)
        if "wss" in fields:
            areas = np.concatenate([
                mesh.face_area_mag[mesh.patches[n].face_ids]
                for n in _wall_patches(mesh)])
            db.set_weights("wss", areas)
    print(f"snapshot database: {args.out} ({db.params().size} entries)")
    return 0


# -- ROM --------------------------------------------------------------------------

def cmd_rom_train(args):
    if not 0.0 < args.threshold <= 1.0:
        raise InvalidArgumentError("energy threshold must be in (0, 1]")
    db = SnapshotDB(args.db)
    models = {}
    energy_rows = []
    for name in db.field_names():
        S, params = db.load_matrix(name)
        ss = podi.SnapshotSet(S, params, field_name=name,
                              weight=db.weights(name))
        models[name] = podi.train(ss, args.threshold, args.kind)
        k = models[name].basis.k
        log.info("field %-6s: %d/%d modes retained", name, k, params.size)
        print(f"{name}: retained {k} of {params.size} modes")
        en = podi.cumulative_energy(models[name].basis.singular_values)
        energy_rows += [(name, i + 1, float(e)) for i, e in enumerate(en)]
    save_models(args.out, models,
                meta={"threshold": args.threshold, "kind": args.kind,
                      "db": os.path.abspath(args.db)})
    if args.energy_csv:
        _write_csv(args.energy_csv, ["field", "modes", "cumulative_energy"],
                   energy_rows)
    print(f"wrote {args.out}")
    return 0


def cmd_rom_eval(args):
    models, meta = load_models(args.model)
    params = [float(s) for s in args.params.split(",") if s]
    if not params:
        raise InvalidArgumentError("no evaluation parameters given")
    out = _outdir(args)

    t0 = time.perf_counter()
    predictions = {pi: {name: m.predict(pi, args.allow_extrapolation)
                        for name, m in models.items()}
                   for pi in params}
    rom_seconds = (time.perf_counter() - t0) / len(params)

    for pi, fields in predictions.items():
        for name, values in fields.items():
            _write_csv(os.path.join(out, f"rom_{name}_{pi:g}.csv"),
                       [name], [(float(v),) for v in values])

    lines = [f"ROM evaluation: {rom_seconds:.4g} s per parameter point"]
    if args.db:
        db = SnapshotDB(args.db)
        fom = {}
        for pi in params:
            for name in models:
                fom[(name, pi)] = db.load_field(pi, name)
        weights = {n: db.weights(n) for n in models}
        table = podi.evaluate_rom(models, fom, params, weights)
        txt = podi.format_error_table(table, field_order=sorted(models))
        print(txt)
        rows = [(pi, name, table[pi][name]) for pi in params
                for name in sorted(models)]
        _write_csv(os.path.join(out, "rom_errors.csv"),
                   ["parameter", "field", "E_percent"], rows)
        fom_secs = [db.entry_meta(p).get("fom_seconds")
                    for p in db.params()]
        fom_secs = [s for s in fom_secs if s]
        if fom_secs:
            speedup = float(np.mean(fom_secs)) / max(rom_seconds, 1e-12)
            lines.append(f"FOM solve: {np.mean(fom_secs):.4g} s average; "
                         f"speed-up {speedup:.0f}x")
    report = "\n".join(lines)
    with open(os.path.join(out, "timing.txt"), "w") as fh:
        fh.write(report + "\n")
    print(report)
    return 0


# -- validation report --------------------------------------------------------------

def _pct(a, b):
    return 100.0 * abs(a / b - 1.0)


def cmd_validate(args):
    tol = args.tolerance
    bad = 0
    rows = []

    pre = refdata.PRE_RECORD
    T = windkessel.cardiac_period(pre.SV, pre.CO)
    rows.append(("cardiac period T [s]", refdata.PUBLISHED_PERIOD, T))
    C = windkessel.total_compliance(pre.PAS, pre.PAD, pre.SV)
    rows.append(("total compliance C [cm^5/dyn]",
                 refdata.PUBLISHED_COMPLIANCE, C))
    recs = {"pre": pre, **refdata.POST_RECORDS}
    for key, rec in recs.items():
        rows.append((f"RVS {key} [dyn s/cm^5]", refdata.PUBLISHED_RVS[key],
                     windkessel.systemic_resistance(rec)))

    model = pump.reference_model()
    for key, rec in refdata.POST_RECORDS.items():
        rows.append((f"pump head {key} [mmHg]",
                     refdata.PUBLISHED_PUMP_HEADS[key],
                     pump.pump_delta_p(model, rec.omega, rec.PF)))

    from .fv.piso import FluidProperties
    props = FluidProperties()
    A_oc = refdata.INLET_AREAS["outflow_cannula"] * 1e-4
    for key, rec in refdata.POST_RECORDS.items():
        rows.append((f"inlet Re {key}", refdata.PUBLISHED_REYNOLDS[key],
                     indicators.reynolds_inlet(units.lmin_to_m3s(rec.PF),
                                               A_oc, props)))

    for key, rec in recs.items():
        # the post-surgery records carry no PAS/PAD/SV; the pre-surgery
        # total compliance is reused for them
        est = windkessel.estimate_outlet_set(
            rec, refdata.OUTLETS, total_C=None if key == "pre" else C)
        published = (refdata.PUBLISHED_PRE_COEFFICIENTS if key == "pre"
                     else refdata.PUBLISHED_POST_COEFFICIENTS[key])
        for o in est:
            ref = published[o.name]
            rows.append((f"{key} {o.name} R_p", ref[0], o.R_p))
            rows.append((f"{key} {o.name} R_d", ref[1], o.R_d))
            if key == "pre":
                rows.append((f"{key} {o.name} C", ref[2], o.C))

    print(f"{'quantity':<42s} {'published':>12s} {'computed':>12s} {'dev%':>7s}")
    for label, ref, got in rows:
        dev = _pct(got, ref)
        flag = "" if dev <= tol else "  *"
        if dev > tol:
            bad += 1
        print(f"{label:<42s} {ref:12.6g} {got:12.6g} {dev:7.2f}{flag}")
    print(f"\n{len(rows)} checks, {bad} outside {tol:.1f}% (marked *)")
    return 0 if (bad == 0 or not args.strict) else 1


# -- report -----------------------------------------------------------------------

def cmd_report(args):
    out = _outdir(args)
    lines = []
    if args.db:
        db = SnapshotDB(args.db)
        params = db.params()
        lines.append(f"snapshot database {args.db}: {params.size} entries, "
                     f"fields {db.field_names()}")
        rows = [(p, db.entry_meta(p).get("omega_rpm", float("nan")),
                 db.entry_meta(p).get("fom_seconds", float("nan")))
                for p in params]
        _write_csv(os.path.join(out, "sweep_summary.csv"),
                   ["parameter", "omega_rpm", "fom_seconds"], rows)
    if args.model:
        models, meta = load_models(args.model)
        lines.append(f"model {args.model}: trained with {meta}")
        energy_rows = []
        for name, m in sorted(models.items()):
            lines.append(f"  {name}: k={m.basis.k}, "
                         f"energy={m.basis.energy_fraction:.6f}, "
                         f"box={m.param_box}")
            en = podi.cumulative_energy(m.basis.singular_values)
            energy_rows += [(name, i + 1, float(e)) for i, e in enumerate(en)]
        _write_csv(os.path.join(out, "energy.csv"),
                   ["field", "modes", "cumulative_energy"], energy_rows)
    report = "\n".join(lines) if lines else "nothing to report (give --db/--model)"
    with open(os.path.join(out, "report.txt"), "w") as fh:
        fh.write(report + "\n")
    print(report)
    return 0


# -- parser -----------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="hemoflow",
                                description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    pm = sub.add_parser("mesh", help="generate a test geometry mesh")
    pm.add_argument("shape", choices=["pipe", "channel", "bifurcation"])
    pm.add_argument("--length", type=float, default=0.1)
    pm.add_argument("--diameter", type=float, default=0.02)
    pm.add_argument("--height", type=float, default=0.01)
    pm.add_argument("--branch-diameter", type=float, default=0.012)
    pm.add_argument("--branch-angle", type=float, default=60.0)
    pm.add_argument("--resolution", default="medium")
    pm.add_argument("--axial", type=int, default=30)
    pm.add_argument("--radial", type=int, default=10)
    pm.add_argument("--out", required=True)
    pm.add_argument("--vtk")
    pm.set_defaults(func=cmd_mesh)

    pf = sub.add_parser("fom-run", help="run one transient/steady case")
    pf.add_argument("case")
    pf.add_argument("--out-dir")
    pf.set_defaults(func=cmd_fom_run)

    ps = sub.add_parser("sweep", help="run a parameter sweep into a snapshot db")
    ps.add_argument("case")
    ps.add_argument("--lo", type=float, required=True)
    ps.add_argument("--hi", type=float, required=True)
    ps.add_argument("--count", type=int, required=True)
    ps.add_argument("--delta-p", type=float, default=75.0)
    ps.add_argument("--workers", type=int)
    ps.add_argument("--out", required=True)
    ps.set_defaults(func=cmd_sweep)

    pt = sub.add_parser("rom-train", help="train reduced models from a sweep")
    pt.add_argument("db")
    pt.add_argument("--threshold", type=float, default=0.999)
    pt.add_argument("--kind", choices=list(podi.INTERPOLATION_KINDS),
                    default="linear")
    pt.add_argument("--energy-csv")
    pt.add_argument("--out", required=True)
    pt.set_defaults(func=cmd_rom_train)

    pe = sub.add_parser("rom-eval", help="evaluate a trained model")
    pe.add_argument("model")
    pe.add_argument("--params", required=True,
                    help="comma-separated parameter values")
    pe.add_argument("--db", help="snapshot db with reference solutions")
    pe.add_argument("--allow-extrapolation", action="store_true")
    pe.add_argument("--out-dir")
    pe.set_defaults(func=cmd_rom_eval)

    pv = sub.add_parser("validate",
                        help="reproduce the published clinical tables")
    pv.add_argument("--tolerance", type=float, default=2.0)
    pv.add_argument("--strict", action="store_true",
                    help="exit 1 when any check exceeds the tolerance")
    pv.set_defaults(func=cmd_validate)

    pr = sub.add_parser("report", help="summarize a sweep and/or model")
    pr.add_argument("--db")
    pr.add_argument("--model")
    pr.add_argument("--out-dir")
    pr.set_defaults(func=cmd_report)
    return p


def main(argv=None):
    logging.basicConfig(
        level=os.environ.get("HEMOFLOW_LOG", "INFO").upper(),
        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except HemoflowError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
