"""Command-line driver.

Subcommands
-----------
build      render an example continuum to PGM (+ metadata sidecar)
rotset     rotation-set estimate for an example map (JSONL report)
classify   generator classification of an example continuum (JSONL report)
semiconj   semiconjugacy defect report for an example family (JSONL report)

All numeric work happens before anything touches the filesystem: a failing
run writes no partial outputs.  Reports are line-delimited JSON with sorted
keys, so identical configurations produce byte-identical files.  Exit codes:
0 success, 2 validation failure, 3 numerical failure.

A config file (INI, section [circloids]) may supply any flag value;
command-line flags override the file.
"""

import argparse
import configparser
import json
import sys
from pathlib import Path

import numpy as np

from . import circle, families, semiconj, strips, topology, torus
from .errors import NumericalError, ValidationError
from .grid import GridSpec, RasterSet

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0

_FLAG_TYPES = {
    "example": str,
    "resolution": int,
    "window": float,
    "alpha": float,
    "rho": float,
    "gaps": int,
    "seeds": int,
    "horizon": int,
    "max_width": float,
    "seed": int,
    "out": str,
    "plot": bool,
}


# -- parameter assembly ----------------------------------------------------


def _load_config(path):
    cp = configparser.ConfigParser()
    read = cp.read(path)
    if not read:
        raise ValidationError(f"config file not found: {path}")
    section = "circloids" if cp.has_section("circloids") else "DEFAULT"
    out = {}
    for key, raw in cp[section].items():
        key = key.replace("-", "_")
        if key not in _FLAG_TYPES:
            raise ValidationError(f"unknown config key: {key}")
        typ = _FLAG_TYPES[key]
        out[key] = cp[section].getboolean(key) if typ is bool else typ(raw)
    return out


def _merge(args, defaults):
    """Effective parameters: defaults < config file < explicit flags."""
    params = dict(defaults)
    if args.config:
        for key, val in _load_config(args.config).items():
            params[key] = val
    for key in _FLAG_TYPES:
        val = getattr(args, key, None)
        if val is not None and val is not False:
            params[key] = val
    return params


# -- deferred output writer ------------------------------------------------


class OutputSet:
    """Collects artifacts during computation; nothing is written until
    flush(), so a failure mid-run leaves the output directory untouched."""

    def __init__(self, out_dir):
        self.dir = Path(out_dir)
        self._items = []

    @staticmethod
    def _scalar(obj):
        if isinstance(obj, (np.bool_,)):
            return bool(obj)
        if isinstance(obj, np.integer):
            return int(obj)
        if isinstance(obj, np.floating):
            return float(obj)
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        raise TypeError(f"not JSON serializable: {type(obj)}")

    def add_jsonl(self, name, records):
        text = "".join(json.dumps(r, sort_keys=True, default=self._scalar)
                       + "\n" for r in records)
        self._items.append(("text", name, text))

    def add_raster(self, name, raster):
        self._items.append(("pgm", name, raster))

    def add_figure(self, name, render):
        """render: callable(path) executed at flush time (figures are a
        side channel of the report, not part of the computation)."""
        self._items.append(("fig", name, render))

    def flush(self):
        self.dir.mkdir(parents=True, exist_ok=True)
        written = []
        for kind, name, payload in self._items:
            path = self.dir / name
            if kind == "text":
                path.write_text(payload)
            elif kind == "pgm":
                payload.to_pgm(path)
            else:
                payload(path)
            written.append(str(path))
        return written


# -- example constructors --------------------------------------------------


def _grid(params, y_min, y_max, min_window=3):
    # an explicitly requested window is passed through so the example
    # constructors can reject one that is too small for the resolution
    window = params.get("window")
    window = min_window if window is None else int(round(window))
    return GridSpec(params["resolution"], window, y_min, y_max)


def _hyperbola_window(resolution):
    y_cut = np.sqrt(3.0 / resolution)
    return max(3, int(np.ceil(1.0 / y_cut)) + 2)


def _build_strip(params):
    name = params["example"]
    if name == "hyperbola":
        spec = _grid(params, -0.5, 1.5, _hyperbola_window(params["resolution"]))
        return families.hyperbola_spike_continuum(spec), {}
    if name == "spiral":
        spec = _grid(params, -0.5, 1.5)
        return families.spiral_generator_continuum(spec), {}
    if name == "row":
        spec = _grid(params, -0.5, 1.5)
        return strips.StripRaster(
            RasterSet(spec, families._row_mask(spec, 0.0))), {}
    if name == "fga":
        fga = _make_fga(params)
        return fga["A"], {"retried_s": fga["fmap"].report.retried_s,
                          "alpha": params["alpha"], "rho": params["rho"]}
    raise ValidationError(f"unknown example for this command: {name}")


def _make_fga(params):
    g, gaps = circle.denjoy_map(params["rho"], n_gaps=params["gaps"])
    fga_params = families.FgAlphaParams(g, params["alpha"], gaps=gaps)
    grid = GridSpec(params["resolution"], 3, -0.5, 1.5)
    fmap, A, core = families.f_g_alpha(fga_params, grid)
    return {"params": fga_params, "fmap": fmap, "A": A, "core": core,
            "gaps": gaps}


def _make_rotset_map(params):
    """Returns (fmap, seeds, meta) for the rotation-set examples."""
    rng = np.random.default_rng(params["seed"])
    name = params["example"]
    n_seeds = params["seeds"]
    if name == "product":
        fmap, _ = families.product_example(params["rho"])
        seeds = rng.uniform(0.0, 1.0, size=(n_seeds, 2))
        return fmap, seeds, {"rho": params["rho"]}
    if name == "skew":
        def q(x):
            return 0.3 + 0.1 * np.sin(2 * np.pi * x)
        fmap = families.skew_product(params["rho"], q)
        seeds = rng.uniform(0.0, 1.0, size=(n_seeds, 2))
        return fmap, seeds, {"rho": params["rho"]}
    if name == "fga":
        fga = _make_fga(params)
        seeds = families.fga_seeds(fga["params"], n_row=n_seeds // 4 + 1,
                                   n_leaf=n_seeds, rng=rng)
        return fga["fmap"], seeds, {"alpha": params["alpha"],
                                    "rho": params["rho"]}
    raise ValidationError(f"unknown example for this command: {name}")


def _make_family(params):
    """Semiconjugacy example families over vertical circles."""
    name = params["example"]
    rho = params["rho"]
    P = max(int(round(params.get("window") or 7)), 3)
    spec = GridSpec(params["resolution"], P, 0.0, 1.0)
    ys = np.linspace(0.002, 0.998, 600)

    if name == "rigid":
        G = circle.CircleLift.rigid(rho)
        x0 = P / 2.0
        gaps = None
    elif name in ("denjoy", "corrupted"):
        G, gaps = circle.denjoy_map(rho, n_gaps=params["gaps"])
        a, b = gaps.gap(0)
        x0 = np.floor(P / 2.0) + (a + b) / 2.0
    else:
        raise ValidationError(f"unknown example for this command: {name}")

    base = RasterSet.from_points(spec, np.full_like(ys, x0), ys)

    def fwd(z):
        z = np.asarray(z, dtype=float)
        return np.stack([np.asarray(G(z[..., 0])), z[..., 1]], axis=-1)

    def inv(z):
        z = np.asarray(z, dtype=float)
        return np.stack([np.asarray(G.inverse(z[..., 0])), z[..., 1]],
                        axis=-1)

    fmap = torus.LiftedPlaneMap(fwd, inv, torus=False, name=name)
    N = params["horizon"]
    fam = semiconj.CircloidOrbitFamily(base, fmap, rho,
                                       n_range=(-N, N), angular_axis="y")
    return fam, fmap, {"x0": float(x0), "gaps": gaps, "N": N}


# -- subcommands -----------------------------------------------------------


def cmd_build(params):
    out = OutputSet(params["out"])
    strip, meta = _build_strip(params)
    rs = strip.raster if hasattr(strip, "raster") else strip
    spec = rs.spec
    record = {
        "command": "build",
        "example": params["example"],
        "resolution": spec.resolution,
        "x_period": spec.x_period,
        "y_min": spec.y_min,
        "y_max": spec.y_max,
        "occupied_cells": int(rs.count()),
        **meta,
    }
    out.add_raster(params["example"] + ".pgm", rs)
    out.add_jsonl("report.jsonl", [record])
    if params["plot"]:
        from . import plots
        out.add_figure(params["example"] + ".png",
                       lambda p, rs=rs: plots.plot_raster(
                           rs, p, title=params["example"]))
    return out


def cmd_rotset(params):
    out = OutputSet(params["out"])
    fmap, seeds, meta = _make_rotset_map(params)
    horizon = params["horizon"]
    estimate = torus.rotation_set_estimate(fmap, seeds, horizon)
    sub_horizons = [max(1, horizon // 100), max(1, horizon // 10), horizon]
    probe = torus.uniform_convergence_probe(fmap, seeds[:20], sub_horizons)
    records = [{
        "command": "rotset",
        "example": params["example"],
        "horizon": horizon,
        "n_seeds": int(len(seeds)),
        "hull": [[float(a), float(b)] for a, b in estimate.hull],
        "hull_x": [float(estimate.hull_x[0]), float(estimate.hull_x[1])],
        "spread": float(estimate.spread),
        **meta,
    }]
    for row in probe:
        records.append({"command": "rotset", "kind": "probe", **row})
    out.add_jsonl("report.jsonl", records)
    if params["plot"]:
        from . import plots
        out.add_figure("rotset.png",
                       lambda p, e=estimate: plots.plot_rotation_estimate(
                           e, p, title=params["example"]))
    return out


def cmd_classify(params):
    out = OutputSet(params["out"])
    strip, meta = _build_strip(params)
    result = strips.classify(strip, max_width=params["max_width"])
    record = {"command": "classify", "example": params["example"],
              "resolution": strip.raster.spec.resolution,
              **result.to_dict(), **meta}
    out.add_jsonl("report.jsonl", [record])
    if params["plot"]:
        from . import plots
        gen = result.strip_report.generator or result.core_report.generator
        out.add_figure("classified.png",
                       lambda p, rs=strip.raster, g=gen: plots.plot_raster(
                           rs, p, title=record["verdict"], overlay=g))
    return out


def cmd_semiconj(params):
    out = OutputSet(params["out"])
    fam, fmap, meta = _make_family(params)
    combinatorics = semiconj.check_irrational_combinatorics(fam)
    lift = semiconj.build_semiconjugacy(fam)
    rng = np.random.default_rng(params["seed"])
    n_samples = params["seeds"]
    P = float(params.get("window") or 7)
    samples = np.stack([
        rng.uniform(1.5, P - 1.5, n_samples),
        rng.uniform(0.0, 1.0, n_samples)], axis=-1)
    record = {
        "command": "semiconj",
        "example": params["example"],
        "resolution": params["resolution"],
        "n_range": meta["N"],
        "rho": float(fam.rho),
        "rho_fit": float(combinatorics["rho_fit"]),
        "epsilon": float(lift.epsilon),
    }
    if params["example"] == "rigid":
        # the rigid rotation has the exact closed-form lift H(z) = x - x0;
        # report its defect, plus the distance (mod a rigid offset) between
        # it and the raster-built lift as a pipeline cross-check
        x0 = meta["x0"]

        def exact(z):
            return np.atleast_2d(np.asarray(z, dtype=float))[:, 0] - x0

        exact_lift = semiconj.SemiconjugacyLift(
            evaluate=exact, rho=fam.rho, epsilon=0.0, horizon=lift.horizon)
        report = semiconj.defect_report(exact_lift, fmap, samples)
        record["raster_lift_distance"] = semiconj.modulo_rotation_distance(
            lift.evaluate, exact, samples)
    elif params["example"] == "corrupted":
        # the family and lift are honest; the defect is measured against a
        # deliberately wrong rotation number and must exceed any tolerance
        bad_rho = fam.rho + 0.1
        record["rho"] = bad_rho
        report = {"max_defect": semiconj.check_semiconjugacy(
            lift, fmap, bad_rho, samples), "samples": len(samples)}
    else:
        report = semiconj.defect_report(lift, fmap, samples)
    record["max_defect"] = float(report["max_defect"])
    record["samples"] = int(report["samples"])
    out.add_jsonl("report.jsonl", [record])
    if params["plot"]:
        from . import plots
        out.add_figure("lift.png",
                       lambda p, lf=lift: plots.plot_lift_profile(
                           lf, p, (1.0, P - 1.0), y_value=0.5,
                           title=params["example"]))
    return out


# -- entry point -----------------------------------------------------------

_DEFAULTS = {
    "build": {"example": "hyperbola", "resolution": 128, "window": None,
              "alpha": 0.25, "rho": GOLDEN, "gaps": 60, "out": "out",
              "seed": 0, "plot": False},
    "rotset": {"example": "product", "resolution": 128, "rho": GOLDEN,
               "alpha": 0.25, "gaps": 60, "seeds": 50, "horizon": 2000,
               "out": "out", "seed": 0, "plot": False},
    "classify": {"example": "hyperbola", "resolution": 128, "window": None,
                 "alpha": 0.25, "rho": GOLDEN, "gaps": 60, "max_width": 4.0,
                 "out": "out", "seed": 0, "plot": False},
    "semiconj": {"example": "denjoy", "resolution": 128, "window": 7,
                 "rho": GOLDEN, "gaps": 100, "horizon": 20, "seeds": 2000,
                 "out": "out", "seed": 0, "plot": False},
}

_COMMANDS = {"build": cmd_build, "rotset": cmd_rotset,
             "classify": cmd_classify, "semiconj": cmd_semiconj}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="circloids",
        description="rasterized rotation theory on the annulus and torus")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="INI file; flags override its values")
        p.add_argument("--example")
        p.add_argument("--resolution", type=int)
        p.add_argument("--window", type=float,
                       help="width of the x window in periods "
                            "(stack height for semiconj)")
        p.add_argument("--alpha", type=float)
        p.add_argument("--rho", type=float)
        p.add_argument("--gaps", type=int,
                       help="gap count of the interval-exchange circle map")
        p.add_argument("--seeds", type=int)
        p.add_argument("--horizon", type=int)
        p.add_argument("--max-width", dest="max_width", type=float)
        p.add_argument("--out")
        p.add_argument("--seed", type=int)
        p.add_argument("--plot", action="store_true", default=None)
    return parser


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses code 2 for usage errors already; normalize others
        return 2 if exc.code else 0
    try:
        params = _merge(args, _DEFAULTS[args.command])
        outputs = _COMMANDS[args.command](params)
        for path in outputs.flush():
            print(path)
        return 0
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
