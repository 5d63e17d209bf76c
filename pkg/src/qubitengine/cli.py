"""Command-line driver: ``qubitengine {cycle,sweep,protocol,dephase,formulas}``."""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import (ConfigError, check_keys, config_hash, cycle_spec_from, load_config, number,
                     sweep_values)
from .errors import (ConvergenceError, DomainError, InfeasibleProtocolError, InvalidRegimeError,
                     NoFiniteSolutionError, NonContractiveError, QubitEngineError, ValidityError)

EXIT_OK, EXIT_CONFIG, EXIT_CONVERGENCE, EXIT_INFEASIBLE, EXIT_IO = 0, 2, 3, 4, 5


def _fmt(x):
    if isinstance(x, str):
        return x
    return format(float(x), ".12g")


def write_csv(path, header, rows, meta):
    """Header, rows at 12 significant digits, trailing ``# key=value`` block."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    for k in sorted(meta):
        buf.write(f"# {k}={meta[k]}\n")
    Path(path).write_text(buf.getvalue())
    return path


def _meta(cfg, args, command, **extra):
    m = {"command": command, "config_hash": config_hash(cfg), "tol": _fmt(args.tol),
         "units": "model (hbar = k_B = 1)", "version": __version__,
         "strict_validity": int(args.strict_validity)}
    m.update(extra)
    return m


def _load(args):
    if args.config is None:
        raise ConfigError("--config is required")
    cfg = load_config(args.config)
    check_keys(cfg)
    return cfg


def _out(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# commands ----------------------------------------------------------------


def cmd_cycle(args):
    from .cycles import run_cycle
    from .thermo import trajectory_entropy_production

    cfg = _load(args)
    spec = cycle_spec_from(cfg, args.strict_validity)
    lc = run_cycle(spec, tol=args.tol)
    out = _out(args)
    meta = _meta(cfg, args, "cycle", kind=spec.kind, mode=lc.mode)
    rows, t0 = [], 0.0
    for st, res, vs in zip(lc.cycle.strokes, lc.results, lc.corners):
        if res is None:
            rows.append([t0, st.label, *vs, st.Omega_i, float("nan"), float("nan"), float("nan"), 0.0])
        else:
            tr = res.trajectory
            sig = trajectory_entropy_production(tr)
            for i in range(tr.t.size):
                rows.append([t0 + tr.t[i], st.label, *tr.v[i], tr.Omega[i], tr.phi[i], tr.mu[i],
                             tr.Omega[i] * np.sqrt(1 + tr.mu[i] ** 2), sig[i]])
        t0 += st.duration
    write_csv(out / "trajectory.csv", ["t", "stroke", "H", "L", "C", "Omega", "phi", "mu", "alpha", "sigma_u"],
              rows, meta)
    led = lc.ledger
    lrows = [[s.label, s.kind, s.W, s.Q, s.dE, s.dS_vn, s.dS_H, s.sigma, s.duration, s.bath_tag or ""]
             for s in led.strokes]
    lrows.append(["cycle", lc.mode, led.W, led.Q_h + led.Q_c, 0.0, 0.0, 0.0, led.sigma_cycle, led.tau_cycle, ""])
    write_csv(out / "ledger.csv", ["stroke", "kind", "W", "Q", "dE", "dS_vn", "dS_H", "sigma", "duration", "bath"],
              lrows, dict(meta, eta=_fmt(led.efficiency), P=_fmt(led.power), Q_h=_fmt(led.Q_h),
                          Q_c=_fmt(led.Q_c), P_diss=_fmt(lc.dissipated_power)))
    print(f"{spec.kind}: mode={lc.mode} eta={led.efficiency:.6g} P={led.power:.6g} "
          f"tau_cyc={led.tau_cycle:.6g} sigma={led.sigma_cycle:.6g}")
    return EXIT_OK


def cmd_sweep(args):
    from .cycles import SWEEP_COLUMNS, sweep

    cfg = _load(args)
    spec = cycle_spec_from(cfg, args.strict_validity)
    name = cfg.get("sweep_param", "tau_cyc")
    vals = sweep_values(cfg)
    if name == "tau_cyc" and cfg.get("tau_unit", "model") == "omega_min":
        vals = [v * spec.time_unit for v in vals]
    if name == "tau_cyc" and spec.tau_cyc is None:
        spec = replace(spec, tau_cyc=vals[0])
    rows = sweep(spec, name, vals, args.workers, args.tol)
    header = list(SWEEP_COLUMNS) if name == "tau_cyc" else [name, *SWEEP_COLUMNS]
    body = []
    for r in rows:
        line = [r.tau_cyc, r.eta, r.eta_over_etaC, r.P, r.P_diss, r.sigma_cyc, r.mode]
        body.append(line if name == "tau_cyc" else [r.value, *line])
    failures = [r for r in rows if not r.ok]
    meta = _meta(cfg, args, "sweep", kind=spec.kind, param=name, failed=len(failures))
    write_csv(_out(args) / "sweep.csv", header, body, meta)
    for r in failures:
        print(f"{name}={r.value:.6g}: {r.error}", file=sys.stderr)
    print(f"{len(rows)} points, {len(failures)} failed")
    return EXIT_OK


def cmd_protocol(args):
    from .open_dynamics import BathSpec
    from .protocols import STERequest, const_mu_schedule, synthesize_ste
    from .schedule import schedule_export
    from .unitary import feat_schedule

    cfg = _load(args)
    kind = cfg.get("protocol")
    meta = _meta(cfg, args, "protocol", protocol=kind)
    dt = number(cfg.get("dt", "1e-3"))
    g = lambda k, d=None: number(cfg[k]) if k in cfg else (d if d is not None else _missing(k))
    if kind == "ste":
        bath = BathSpec(g("T"), g("A", 0.01))
        req = STERequest(g("Omega_i"), g("Omega_f"), g("tau"), bath, cfg.get("profile", "smoothstep"),
                         g("Phi", np.pi / 2), number(cfg["a"]) if "a" in cfg else None, dt=dt)
        sch = synthesize_ste(req)
        meta.update(phidot_start=_fmt(sch.phidot[0]), phidot_end=_fmt(sch.phidot[-1]))
    elif kind == "const_mu":
        sch = const_mu_schedule(g("Omega_i"), g("Omega_f"), g("phi_i", 0.0), g("phi_f"), g("tau"), dt)
        meta.update(mu=_fmt(sch.mu[0]), mu_spread=_fmt(np.ptp(sch.mu)))
    elif kind == "feat":
        sch, bb = feat_schedule(g("omega_i"), g("omega_f"), g("epsilon"), dt)
        meta.update(tau1=_fmt(bb.tau1), tau2=_fmt(bb.tau2), zeta=_fmt(bb.zeta), tau_total=_fmt(bb.total))
    else:
        raise ConfigError("protocol must be ste, const_mu or feat")
    path = _out(args) / "schedule.csv"
    schedule_export(sch, path, meta, digits=12)
    print(f"{kind}: {sch.t.size} samples, duration {sch.duration:.6g} -> {path}")
    return EXIT_OK


def _missing(key):
    raise ConfigError(f"missing {key!r}")


def cmd_dephase(args):
    from .cycles import sweep

    cfg = _load(args)
    spec = cycle_spec_from(cfg, args.strict_validity)
    kds = sweep_values(cfg, "k_d")
    taus = sweep_values(cfg, "tau") if ("tau_values" in cfg or "tau_min" in cfg) else [spec.tau_cyc]
    if taus[0] is None:
        raise ConfigError("tau_values or tau_cyc required")
    if cfg.get("tau_unit", "model") == "omega_min" and "tau_values" in cfg:
        taus = [t * spec.time_unit for t in taus]
    rows = []
    for tau in taus:
        for r in sweep(replace(spec, tau_cyc=tau), "k_d", kds, args.workers, args.tol):
            rows.append([tau, r.value, r.eta, r.P, r.mode])
    write_csv(_out(args) / "dephase.csv", ["tau_cyc", "k_d", "eta", "P", "mode"], rows,
              _meta(cfg, args, "dephase", kind=spec.kind))
    print(f"{len(rows)} rows")
    return EXIT_OK


def cmd_formulas(args):
    from .formulas import REGISTRY, evaluate

    if args.list or not args.name:
        for name, f in REGISTRY.items():
            print(f"{name}({', '.join(f.params)}): {f.summary}")
        return EXIT_OK
    kw = {}
    for item in args.params:
        key, sep, val = item.partition("=")
        if not sep:
            raise ConfigError(f"expected key=value, got {item!r}")
        kw[key] = number(val)
    print(_fmt(evaluate(args.name, **kw)))
    return EXIT_OK


# entry point -------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="qubitengine", description="Qubit heat-engine simulations.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--workers", type=int, default=None, help="parallel sweep workers (default: cores)")
    common.add_argument("--tol", type=float, default=1e-9, help="limit-cycle tolerance")
    common.add_argument("--strict-validity", action="store_true", help="turn validity warnings into errors")
    sub = p.add_subparsers(dest="command", required=True)
    for name, fn in (("cycle", cmd_cycle), ("sweep", cmd_sweep), ("protocol", cmd_protocol),
                     ("dephase", cmd_dephase)):
        sp = sub.add_parser(name, parents=[common])
        sp.set_defaults(func=fn)
    fp = sub.add_parser("formulas", parents=[common], help="evaluate a registry formula")
    fp.add_argument("name", nargs="?")
    fp.add_argument("params", nargs="*", help="key=value arguments")
    fp.add_argument("--list", action="store_true")
    fp.set_defaults(func=cmd_formulas)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConvergenceError, NonContractiveError) as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (InfeasibleProtocolError, NoFiniteSolutionError, InvalidRegimeError) as exc:
        print(f"protocol infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ConfigError, DomainError, ValidityError, KeyError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QubitEngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
