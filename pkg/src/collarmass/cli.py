"""collarmass command-line interface.

Exit status: 0 success or valid, 1 a mathematical condition failed, 2 bad input.
Reports are deterministic JSON (sorted keys, no timestamps) written atomically.
"""

import argparse
import json
import math
import os
import platform
import sys
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .collar import build_collar, certify, analytic_scalar_curvature
from .corner import (CornerManifold, WarpedManifold, check_outer_minimising_proxy,
                     deform_nonstatic, glue_in_collar, verify_pmt_hypotheses,
                     warped_from_dict)
from .errors import (CollarMassError, DegenerateGrid, GridMismatch, HorizonError,
                     InvalidMetric, NotAsymptoticallyFlat)
from .mass import (BoundOptions, cmc_comparison_bound, continuity_sweep, convexity_margin,
                   hawking_mass, scale_data, upper_bound_mass)
from .surface import (AxisymmetricMetric, BartnikData, SurfaceField, bartnik_from_dict,
                      c2tau_distance)
from .svg import render_profiles

EXIT_OK, EXIT_CONDITION, EXIT_INPUT = 0, 1, 2
INPUT_ERRORS = (InvalidMetric, GridMismatch, DegenerateGrid, HorizonError, NotAsymptoticallyFlat)


class InputError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    inputs: dict
    resolution: int = None
    epsilon: float = None
    deltas: tuple = ()
    lam: float = None
    samples: int = 32
    seed: int = 0
    out: str = "."
    svg: bool = False
    extra: dict = field(default_factory=dict)

    def validate(self):
        if self.resolution is not None and self.resolution < 33:
            raise InputError("--resolution must be at least 33")
        if self.epsilon is not None and not self.epsilon > 0:
            raise InputError("--epsilon must be positive (epsilon = 0 is an empty collar)")
        if any(d < 0 for d in self.deltas):
            raise InputError("--deltas must be non-negative")
        if self.lam is not None and not self.lam > 0:
            raise InputError("--lambda must be positive")
        if self.samples < 1:
            raise InputError("--samples must be positive")
        return self


def _clean(obj):
    """JSON-safe copy: numpy to Python, non-finite floats to null."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj) if math.isfinite(obj) else None
    return obj


def _write_atomic(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _versions():
    return {"collarmass": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version()}


def _emit(config, name, body):
    report = {"config": asdict(config), "versions": _versions(), **body}
    report = _clean(report)
    out = Path(config.out)
    _write_atomic(out / f"{name}.json", json.dumps(report, indent=2, sort_keys=True) + "\n")
    if config.svg:
        for stem, text in sorted(render_profiles(report).items()):
            _write_atomic(out / f"{stem}.svg", text)
    return report


def _read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise InputError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from exc


def _resample(data, n):
    if n is None or n == data.metric.n:
        return data
    theta = np.linspace(0, np.pi, n)
    src = data.metric.theta

    def interp(v):
        return np.interp(theta, src, v)

    h = interp(data.metric.h)
    h[0] = h[-1] = 0.0
    metric = AxisymmetricMetric(theta, interp(data.metric.f), h)
    return BartnikData(metric, SurfaceField(interp(data.H.values), data.H.units), data.tau)


def _load_data(config, key="input"):
    path = config.inputs.get(key)
    if not path:
        raise InputError(f"--{key} is required")
    return _resample(bartnik_from_dict(_read_json(path)), config.resolution)


def _load_piece(spec):
    """A warped piece from {"s","rho"} samples or a {"schwarzschild": {...}} recipe."""
    if isinstance(spec, str):
        spec = _read_json(spec)
    if "schwarzschild" in spec:
        p = spec["schwarzschild"]
        return WarpedManifold.schwarzschild(float(p["m"]), float(p["rho_start"]),
                                            float(p.get("rho_end", 1e5)), int(p.get("n", 4001)))
    return warped_from_dict(spec)


# subcommands --------------------------------------------------------------

def cmd_check_data(config):
    data = _load_data(config)
    r0 = data.metric.area_radius()
    round_ = AxisymmetricMetric.round(r0, data.metric.n)
    margin = convexity_margin(data)
    _emit(config, "check-data", {
        "convexity_margin": margin,
        "hawking_mass": hawking_mass(data),
        "area_radius": r0,
        "norms": {"metric_vs_round": c2tau_distance(data.metric, round_, data.tau).to_dict(),
                  "H_c2": c2tau_distance(data.H, SurfaceField(np.zeros(data.metric.n)), data.tau).c2_total},
        "resolution": data.metric.resolution,
    })
    return EXIT_OK if margin > 0 else EXIT_CONDITION


def cmd_build_collar(config):
    data = _load_data(config)
    if config.epsilon is None:
        raise InputError("--epsilon is required")
    if config.inputs.get("target"):
        g2 = _load_data(config, "target").metric
    else:
        g2 = AxisymmetricMetric.round(data.metric.area_radius(), data.metric.n)
    spec = build_collar(data, g2, config.epsilon, m=config.extra.get("mass"))
    cert = certify(spec)
    R = analytic_scalar_curvature(spec)
    _emit(config, "collar", {"collar": spec.to_dict(cert), "valid": cert.valid,
                             "strict": cert.strict, "min_R_per_leaf": R.min(axis=1),
                             "resolution": {"n_s": len(spec.s_grid), **data.metric.resolution}})
    return EXIT_OK if cert.valid else EXIT_CONDITION


def cmd_mass_bound(config):
    data = _load_data(config)
    if config.lam is not None:
        data = scale_data(data, config.lam)
    opts = BoundOptions(check_hypothesis=True)
    report = upper_bound_mass(data, opts)
    cmc = cmc_comparison_bound(data, opts)
    _emit(config, "mass-bound", {"mass": report.to_dict(), "cmc_comparison": cmc.to_dict(),
                                 "options": opts.to_dict(), "resolution": data.metric.resolution})
    return EXIT_OK


def cmd_continuity(config):
    data = _load_data(config)
    if not config.deltas:
        raise InputError("--deltas is required")
    table = continuity_sweep(data, config.deltas, config.samples, config.seed)
    if config.lam is not None:
        table = table.scaled(config.lam)
    _write_atomic(Path(config.out) / "continuity.csv", table.to_csv())
    _emit(config, "continuity", {"continuity": {"base_bound": table.base_bound,
                                                "rows": [asdict(r) for r in table.rows]},
                                 "resolution": data.metric.resolution})
    return EXIT_OK if all(r.failures == 0 for r in table.rows) else EXIT_CONDITION


def _corner_pieces(config):
    if config.inputs.get("input"):
        doc = _read_json(config.inputs["input"])
        if "inner" not in doc or "outer" not in doc:
            raise InputError("corner document needs 'inner' and 'outer'")
        return _load_piece(doc["inner"]), _load_piece(doc["outer"])
    if config.inputs.get("inner") and config.inputs.get("outer"):
        return _load_piece(config.inputs["inner"]), _load_piece(config.inputs["outer"])
    raise InputError("corner-verify needs --input or both --inner and --outer")


def cmd_corner(config):
    inner, outer = _corner_pieces(config)
    cm = CornerManifold(inner, outer)
    rep = verify_pmt_hypotheses(cm)
    _emit(config, "corner", {"pmt": rep.to_dict(), "corner_area_match": cm.corner_area_match,
                             "pieces": [dict(name=p.name, **p.to_dict()) for p in (cm.inner, cm.outer)]})
    return EXIT_OK if rep.passed else EXIT_CONDITION


def cmd_glue(config):
    data = _load_data(config)
    if config.epsilon is None:
        raise InputError("--epsilon is required")
    if not config.inputs.get("exterior"):
        raise InputError("--exterior is required")
    exterior = _load_piece(config.inputs["exterior"])
    composite, params, rep = glue_in_collar(data, exterior, config.epsilon, config.extra.get("delta"))
    proxy = check_outer_minimising_proxy(composite)
    _emit(config, "glue", {"parameters": params.to_dict(), "report": rep.to_dict(),
                           "outer_minimising_proxy": proxy.to_dict(), **composite.to_dict()})
    ok = all(p.passed for p in rep.pmt) and proxy.passed
    return EXIT_OK if ok else EXIT_CONDITION


def cmd_deform(config):
    if not config.inputs.get("input"):
        raise InputError("--input is required")
    w = _load_piece(config.inputs["input"])
    omega = config.extra.get("omega_end")
    if omega is None:
        raise InputError("--omega-end is required")
    d = deform_nonstatic(w, omega, config.extra.get("length") or 0.5)
    _emit(config, "deform", {"min_R_deformed": d.min_R_deformed, "min_increment": d.min_increment,
                             "unresolved_length": d.unresolved_length,
                             "junction_residuals": list(d.junction_residuals),
                             "pieces": [dict(name=d.manifold.name, **d.manifold.to_dict())]})
    return EXIT_OK if d.min_increment > 0 else EXIT_CONDITION


COMMANDS = {
    "check-data": cmd_check_data,
    "build-collar": cmd_build_collar,
    "mass-bound": cmd_mass_bound,
    "continuity": cmd_continuity,
    "corner-verify": cmd_corner,
    "glue": cmd_glue,
    "deform": cmd_deform,
}


def _floats(text):
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def build_parser():
    parser = argparse.ArgumentParser(prog="collarmass", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--input")
        p.add_argument("--out", default=".")
        p.add_argument("--resolution", type=int)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--svg", action="store_true")
        p.add_argument("--epsilon", type=float)
        p.add_argument("--lambda", dest="lam", type=float)
        p.add_argument("--deltas", type=_floats, default=())
        p.add_argument("--samples", type=int, default=32)
        if name == "build-collar":
            p.add_argument("--target", help="target surface data (defaults to the equal-area round sphere)")
            p.add_argument("--mass", type=float, help="override the mass parameter")
        if name == "corner-verify":
            p.add_argument("--inner")
            p.add_argument("--outer")
        if name == "glue":
            p.add_argument("--exterior", required=False)
            p.add_argument("--delta", type=float)
        if name == "deform":
            p.add_argument("--omega-end", type=float)
            p.add_argument("--length", type=float)
    return parser


def config_from_args(args):
    inputs = {k: getattr(args, k) for k in ("input", "target", "inner", "outer", "exterior")
              if getattr(args, k, None)}
    extra = {k: getattr(args, k) for k in ("mass", "delta", "omega_end", "length")
             if getattr(args, k, None) is not None}
    return RunConfig(args.subcommand, inputs, args.resolution, args.epsilon, tuple(args.deltas),
                     args.lam, args.samples, args.seed, args.out, args.svg, extra).validate()


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        config = config_from_args(args)
        return COMMANDS[config.subcommand](config)
    except (InputError, *INPUT_ERRORS) as exc:
        print(f"collarmass: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CollarMassError as exc:
        print(f"collarmass: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONDITION
    except (ValueError, KeyError, TypeError) as exc:
        print(f"collarmass: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
