"""Scenario files, preset resolution, and the CSV/JSON writers.

A scenario is an INI-style file with [scenario], [forms] and [paths]
sections; every referenced object is a named preset so runs are fully
reproducible from the file plus a seed.
"""
import configparser
import json
import os
from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .decorated import make_formset
from .errors import ConfigError
from .integrators import METHODS
from .lie import higher_module_by_id, module_by_id
from .paths import segment_path, sheet_family, square_loop

CSV_FMT = "%.17g"

DEFAULTS = {
    "scenario": {
        "module": "conj:so3",
        "higher_module": "k:r1",
        "chart_half": "3.0",
        "grid_t": "101",
        "grid_s": "101",
        "integrator": "rk4mk",
        "b1_mode": "pullback",
        "seed": "42",
        "margin": "0.05",
    },
    "forms": {
        "abar": "gauss:0:0.5:1.5",
        "a": "same",
        "b0": "zero",
        "b1": "zero",
        "c0l": "zero",
        "c0r": "zero",
        "c1l": "zero",
        "c1r": "zero",
        "c1": "x1dx2:0",
        "c2l": "zero",
        "c2r": "x1dx2:0",
        "d": "zero",
    },
    "paths": {
        "path": "segment:0,0:1,0",
        "family": "sheet:0,0:1,1",
    },
}


@dataclass
class Scenario:
    module: object
    higher: object
    chart: object
    forms: object  # FormSet
    c2L: object
    c2R: object
    Dform: object
    path_spec: str
    family_spec: str
    margin: float
    grid_t: int
    grid_s: int
    integrator: str
    b1_mode: str
    seed: int
    echo: dict = field(default_factory=dict)

    def path(self, n=None):
        return build_path(self.path_spec, n or self.grid_t, self.margin)

    def family(self, n_t=None, n_s=None):
        return build_family(self.family_spec, n_t or self.grid_t,
                            n_s or self.grid_s, self.margin)


def _vec(token, fieldname):
    try:
        return np.array([float(p) for p in token.split(",")], dtype=float)
    except ValueError:
        raise ConfigError("%s: bad vector literal %r" % (fieldname, token)) from None


def build_path(spec, n, margin=0.05):
    parts = str(spec).split(":")
    head = parts[0]
    if head == "segment":
        if len(parts) != 3:
            raise ConfigError("path: segment needs <from>:<to>")
        return segment_path(_vec(parts[1], "path"), _vec(parts[2], "path"),
                            n, margin)
    if head == "square-loop":
        side = float(parts[1])
        corner = _vec(parts[2], "path") if len(parts) > 2 else (0.0, 0.0)
        return square_loop(side, max(n // 4, 8), margin, corner=corner)
    raise ConfigError("path: unknown preset %r" % spec)


def build_family(spec, n_t, n_s, margin=0.05):
    parts = str(spec).split(":")
    if parts[0] == "sheet":
        if len(parts) != 3:
            raise ConfigError("family: sheet needs <corner>:<extent>")
        return sheet_family(_vec(parts[1], "family"), _vec(parts[2], "family"),
                            n_t, n_s, margin)
    raise ConfigError("family: unknown preset %r" % spec)


def _form1(spec, target, chart, fieldname):
    try:
        return geometry.form_preset_1(spec, target, chart)
    except Exception as exc:
        raise ConfigError("%s: %s" % (fieldname, exc)) from None


def _form2(spec, target, chart, fieldname):
    try:
        return geometry.form_preset_2(spec, target, chart)
    except Exception as exc:
        raise ConfigError("%s: %s" % (fieldname, exc)) from None


def parse_scenario(path=None, overrides=None):
    """Load a scenario file (or defaults) and resolve every preset.

    overrides: flat dict of section-less keys (grid_t, seed, integrator,
    b1_mode, grid_s) applied on top, typically from CLI flags.
    """
    cfg = configparser.ConfigParser()
    cfg.read_dict(DEFAULTS)
    if path is not None:
        if not os.path.exists(path):
            raise ConfigError("scenario file %r not found" % path)
        try:
            cfg.read(path)
        except configparser.Error as exc:
            raise ConfigError("scenario parse error: %s" % exc) from None
    sc = cfg["scenario"]
    if overrides:
        for k, v in overrides.items():
            if v is not None:
                sc[k] = str(v)

    try:
        mod = module_by_id(sc["module"])
    except Exception:
        raise ConfigError("module: unknown id %r" % sc["module"]) from None
    try:
        higher = higher_module_by_id(sc["higher_module"], mod)
    except Exception:
        raise ConfigError(
            "higher_module: unknown id %r" % sc["higher_module"]) from None

    chart = geometry.default_chart(dim=2, half=float(sc["chart_half"]))
    integrator = sc["integrator"]
    if integrator not in METHODS:
        raise ConfigError("integrator: unknown id %r" % integrator)
    b1_mode = sc["b1_mode"]
    if b1_mode not in ("basic", "full", "proj", "pullback"):
        raise ConfigError("b1_mode: must be basic|full|proj|pullback")
    grid_t = int(sc["grid_t"])
    grid_s = int(sc["grid_s"])
    if grid_t < 20 or grid_s < 20:
        raise ConfigError("grid_t/grid_s: need at least 21 nodes")

    f = cfg["forms"]
    G, H, K = mod.G, mod.H, higher.K
    abar = _form1(f["abar"], G, chart, "abar")
    a = abar if f["a"] in ("same", "abar") else _form1(f["a"], G, chart, "a")
    forms = make_formset(
        mod, chart, abar=abar, a=a,
        b0=_form2(f["b0"], G, chart, "b0"),
        b1=_form2(f["b1"], H, chart, "b1"),
        c0L=_form1(f["c0l"], G, chart, "c0L"),
        c0R=_form1(f["c0r"], G, chart, "c0R"),
        c1L=_form1(f["c1l"], H, chart, "c1L"),
        c1R=_form1(f["c1r"], H, chart, "c1R"),
        c1=_form1(f["c1"], H, chart, "c1"),
        b1_mode=b1_mode)
    c2L = _form1(f["c2l"], K, chart, "c2L")
    c2R = _form1(f["c2r"], K, chart, "c2R")
    Dform = _form2(f["d"], K, chart, "D")

    p = cfg["paths"]
    echo = {s: dict(cfg[s]) for s in cfg.sections()}
    return Scenario(mod, higher, chart, forms, c2L, c2R, Dform,
                    p["path"], p["family"], float(sc["margin"]),
                    grid_t, grid_s, integrator, b1_mode, int(sc["seed"]),
                    echo=echo)


# ---------------------------------------------------------------------------
# output writers


def write_csv(path, header, rows):
    """Comma-delimited, 17 significant digits, '.' decimal separator."""
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(
                CSV_FMT % v if isinstance(v, (int, float, np.floating))
                else str(v) for v in row) + "\n")


def trajectory_rows(fam_or_path, fibers, s_values=None):
    """Flatten a trajectory to (s, t, x.., g entries row-major) rows."""
    rows = []
    fibers = np.asarray(fibers, dtype=float)
    if fibers.ndim >= 3 and s_values is not None:
        pts = fam_or_path.points
        n_s, n_t = pts.shape[0], pts.shape[1]
        ts = np.linspace(0.0, 1.0, n_t)
        for i in range(n_s):
            for j in range(n_t):
                rows.append([s_values[i], ts[j], *pts[i, j],
                             *np.ravel(fibers[i, j])])
    else:
        pts = fam_or_path.points
        ts = np.linspace(0.0, 1.0, pts.shape[0])
        for j in range(pts.shape[0]):
            rows.append([0.0, ts[j], *pts[j], *np.ravel(fibers[j])])
    return rows


def trajectory_header(dim, fiber_size):
    return (["s", "t"] + ["x%d" % (i + 1) for i in range(dim)]
            + ["g%d" % (i + 1) for i in range(fiber_size)])


def write_report(path, report):
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=False, default=_json_default)
        fh.write("\n")


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError("not JSON serializable: %r" % type(obj))
