"""Command line front end: scenario runs, verification suites, convergence
studies. Exit status is 0 iff every executed check passed."""
import argparse
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _kernels, verify
from .decorated import DecoratedPoint, Omega_transport, hatOmega_transport
from .errors import ConfigError, PathTransError
from .paths import horizontal_lift, loop_holonomy, omega_transport
from .scenarios import (parse_scenario, trajectory_header, trajectory_rows,
                        write_csv, write_report)

RUN_COMMANDS = ("lift", "transport", "dec-transport", "hat-transport",
                "holonomy")
VERIFY_SUITES = ("lie", "omega", "Omega", "categorical", "stokes",
                 "reduction", "flat", "abelian", "endpoint", "holonomy",
                 "roundtrip", "variation", "all")

EXPECTED_SLOPES = {
    "stokes": ("range", 2.0, 0.4),
    "endpoint": ("range", 4.0, 0.6),
    "abelian": ("min", 2.0, None),
    "reduction": ("min", 1.6, None),
}


def _threads():
    try:
        return max(1, int(os.environ.get("PATHTRANS_THREADS", "1")))
    except ValueError:
        return 1


def build_parser():
    p = argparse.ArgumentParser(
        prog="pathtrans",
        description="parallel transport on decorated path-space bundles")
    sub = p.add_subparsers(dest="mode", required=True)

    def common(sp):
        sp.add_argument("--scenario", default=None, help="scenario INI file")
        sp.add_argument("--grid-t", type=int, default=None)
        sp.add_argument("--grid-s", type=int, default=None)
        sp.add_argument("--integrator", default=None,
                        choices=("rk4mk", "rk4proj", "euler"))
        sp.add_argument("--b1-mode", default=None,
                        choices=("basic", "full", "proj", "pullback"))
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out", default="out", help="output directory")

    run = sub.add_parser("run", help="run a transport scenario")
    run.add_argument("command", choices=RUN_COMMANDS)
    common(run)

    ver = sub.add_parser("verify", help="run a verification suite")
    ver.add_argument("suite", choices=VERIFY_SUITES)
    common(ver)

    con = sub.add_parser("converge", help="run a convergence study")
    con.add_argument("check", choices=tuple(verify.CONVERGENCE_TARGETS))
    con.add_argument("--refinements", type=int, default=3)
    common(con)
    return p


def _load(args):
    overrides = {
        "grid_t": args.grid_t,
        "grid_s": args.grid_s,
        "integrator": args.integrator,
        "b1_mode": args.b1_mode,
        "seed": args.seed,
    }
    return parse_scenario(args.scenario, overrides)


def _base_report(sc, extra):
    rep = {
        "scenario": sc.echo,
        "grids": {"t": sc.grid_t, "s": sc.grid_s},
        "integrator": sc.integrator,
        "b1_mode": sc.b1_mode,
        "seed": sc.seed,
        "kernel": _kernels.IMPL,
    }
    rep.update(extra)
    return rep


def run_scenario(sc, command, out_dir):
    """Execute one run command; returns the report dict."""
    os.makedirs(out_dir, exist_ok=True)
    G = sc.module.G
    method = sc.integrator
    t0 = time.perf_counter()
    residuals = {}

    if command in ("lift", "holonomy"):
        path = sc.path()
        ovg = horizontal_lift(sc.forms.abar, path, G.identity(), G,
                              method=method)
        rows = trajectory_rows(path, ovg.fiber)
        write_csv(os.path.join(out_dir, "trajectory_lift.csv"),
                  trajectory_header(path.dim, int(np.prod(G.value_shape))),
                  rows)
        residuals["group_constraint"] = G.group_residual(ovg.fiber)
        if command == "holonomy":
            hol = loop_holonomy(sc.forms.abar, path, G.identity(), G,
                                method=method)
            residuals["holonomy_entries"] = np.ravel(hol).tolist()
    else:
        fam = sc.family()
        ovg = horizontal_lift(sc.forms.abar, fam.row(0), G.identity(), G,
                              method=method)
        s_vals = np.linspace(0.0, 1.0, fam.n_s + 1)
        if command == "transport":
            res = omega_transport(sc.forms, fam, ovg, method=method)
            fibers, aux, aux_name = res.tilde_fibers, res.a_s, "a_s"
        elif command == "dec-transport":
            init = DecoratedPoint(sc.module, ovg, sc.module.H.identity())
            res = Omega_transport(sc.forms, fam, init, method=method)
            fibers, aux, aux_name = res.tilde_fibers, res.h_s, "h_s"
        else:
            init = DecoratedPoint(sc.module, ovg, sc.module.H.identity())
            res = hatOmega_transport(sc.forms, fam, init, method=method)
            fibers, aux, aux_name = res.tilde_fibers, res.x_s, "x_s"
        rows = trajectory_rows(fam, fibers, s_values=s_vals)
        write_csv(os.path.join(out_dir, "trajectory_%s.csv" % command),
                  trajectory_header(2, int(np.prod(G.value_shape))), rows)
        aux = np.asarray(aux, dtype=float)
        write_csv(os.path.join(out_dir, "trajectory_%s.csv" % aux_name),
                  ["s"] + ["v%d" % (i + 1)
                           for i in range(int(np.prod(aux.shape[1:])))],
                  [[s_vals[i], *np.ravel(aux[i])] for i in range(len(s_vals))])
        residuals["group_constraint"] = G.group_residual(fibers)

    report = _base_report(sc, {
        "command": command,
        "residuals": residuals,
        "runtime_s": time.perf_counter() - t0,
        "passed": True,
    })
    write_report(os.path.join(out_dir, "report.json"), report)
    return report


def do_verify(sc, suite, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    checks, rep = verify.run_suite(suite, seed=sc.seed, method=sc.integrator)
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        print("%s %-42s value=%.3e tol=%.3e %s"
              % (status, c.name, c.value, c.tol, c.info))
    report = _base_report(sc, rep)
    write_report(os.path.join(out_dir, "report.json"), report)
    return report, verify.checks_pass(checks)


def do_converge(sc, check, refinements, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    fn, default_ns = verify.CONVERGENCE_TARGETS[check]
    ns = list(default_ns)
    while len(ns) < max(refinements, 3):
        ns.append(ns[-1] * 2)
    ns = ns[:max(refinements, 3)]
    workers = _threads()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            errs = list(ex.map(lambda m: float(fn(m, sc.integrator)), ns))
    else:
        errs = [float(fn(m, sc.integrator)) for m in ns]
    floored = min(errs) < verify.FLOOR
    slope = None
    passed = True
    note = ""
    if floored:
        note = "floor reached"
    else:
        from .numerics import loglog_slope
        slope = loglog_slope([1.0 / m for m in ns], errs)
        kind, target, tol = EXPECTED_SLOPES[check]
        if kind == "range":
            passed = abs(slope - target) <= tol
        else:
            passed = slope >= target
    for m, e in zip(ns, errs):
        print("n=%-6d residual=%.6e" % (m, e))
    print("slope=%s %s" % ("%.3f" % slope if slope is not None else "n/a",
                           note))
    report = _base_report(sc, {
        "check": check,
        "grids": ns,
        "residuals": errs,
        "slope": slope,
        "floor_reached": floored,
        "passed": bool(passed),
    })
    write_report(os.path.join(out_dir, "report.json"), report)
    return report, passed


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        sc = _load(args)
        if args.mode == "run":
            run_scenario(sc, args.command, args.out)
            return 0
        if args.mode == "verify":
            _, ok = do_verify(sc, args.suite, args.out)
            return 0 if ok else 1
        _, ok = do_converge(sc, args.check, args.refinements, args.out)
        return 0 if ok else 1
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2
    except PathTransError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
