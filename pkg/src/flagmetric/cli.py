"""Command-line interface: ``flagmetric {synth,invariants,metric,validate,distance}``.

Exit codes: 0 ok, 2 validation failure, 3 degenerate or malformed input,
4 optimizer failure. All numbers are printed as JSON with 17 significant
digits.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import io
from .errors import FlagError, LineSearchFailed
from .geomcore import integrate_curve
from .metrics import MetricParams, TangentVector, flag_metric
from .shapedist import StraightenOptions, linear_path, straighten
from .shapes import SHAPES, make_shape
from .validation import DEFAULT_TOLERANCES, validate_flag

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_DEGENERATE = 3
EXIT_OPTIMIZER = 4

DEFAULTS = {
    "weights": [1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
    "elastic": None,
    "grid": "64x33",
    "K": 16,
    "seed": 0,
    "eps": None,
    "max_iters": 20,
}

log = logging.getLogger("flagmetric")


def _floats(text):
    return [float(x) for x in text.split(",") if x.strip()]


def _grid(text):
    try:
        n_u, n_v = (int(x) for x in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 64x33, got {text!r}") from None
    return n_u, n_v


def _load_config(args):
    cfg = dict(DEFAULTS)
    if args.config:
        cfg.update(json.loads(Path(args.config).read_text()))
    for key in ("weights", "elastic", "grid", "K", "seed", "eps", "max_iters"):
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


def _params(cfg):
    if cfg.get("elastic") is not None:
        el = cfg["elastic"]
        el = _floats(el) if isinstance(el, str) else [float(x) for x in el]
        if len(el) != 5:
            raise ValueError("--elastic needs five weights a,b,a',b',c'")
        return MetricParams.from_elastic(*el)
    w = cfg["weights"]
    return MetricParams.from_sequence(_floats(w) if isinstance(w, str) else w)


def _emit(obj, out=None):
    text = io.write_json(obj, out)
    if out is None:
        sys.stdout.write(text)


def _curve_field(spec, flag):
    u = flag.u
    pts = flag.curve_points
    return _field(spec, u, pts, (flag.n_u,), flag)


def _surface_field(spec, flag):
    U, _ = np.meshgrid(flag.u, flag.v[1:-1], indexing="ij")
    return _field(spec, U, flag.interior, flag.interior_shape, flag)


def _field(spec, U, pts, shape, flag):
    kind, _, arg = spec.partition(":")
    if kind == "const":
        return np.full(shape, float(arg or 1.0))
    if kind == "sin":
        return np.sin(float(arg or 1.0) * U)
    if kind == "cos":
        return np.cos(float(arg or 1.0) * U)
    if kind == "z":
        return pts[..., 2].copy()
    path = Path(spec)
    if not path.exists():
        raise ValueError(f"h-spec {spec!r} is neither const:c, sin:k, cos:k, z nor an existing file")
    if path.suffix == ".npy":
        data = np.load(path)
    elif path.suffix == ".json":
        data = np.asarray(json.loads(path.read_text()), dtype=float)
    else:
        data = np.loadtxt(path)
    if len(shape) == 2 and data.shape == (flag.n_u, flag.n_v):
        data = data[:, 1:-1]
    if data.shape != shape:
        raise ValueError(f"field in {path} has shape {data.shape}, expected {shape}")
    return data


def cmd_synth(args, cfg):
    n_u, n_v = _grid(cfg["grid"]) if isinstance(cfg["grid"], str) else cfg["grid"]
    params = _floats(args.params) if args.params else ()
    flag = make_shape(args.shape, params, n_u, n_v)
    if args.out is None:
        raise ValueError("synth needs --out")
    io.write_flag(flag, args.out, layout=args.layout)
    _emit({"shape": args.shape, "params": list(params), "N_u": n_u, "N_v": n_v,
           "equator_row": flag.equator_row, "out": str(args.out)})
    return EXIT_OK


def _stats(x):
    return {"min": float(np.min(x)), "max": float(np.max(x)), "mean": float(np.mean(x))}


def cmd_invariants(args, cfg):
    flag = io.read_flag(args.flag)
    surf, ci, curve = flag.surface, flag.curvatures, flag.curve
    report = {
        "N_u": flag.n_u,
        "N_v": flag.n_v,
        "equator_row": flag.equator_row,
        "curve": {
            "u": flag.u,
            "kappa_g": ci.kappa_g,
            "kappa_n": ci.kappa_n,
            "tau_g": ci.tau_g,
        },
        "k1": _stats(surf.k1),
        "k2": _stats(surf.k2),
        "area": float(surf.area_weights.sum()),
        "curve_length": integrate_curve(np.ones(flag.n_u), curve),
    }
    _emit(report, args.out)
    return EXIT_OK


def cmd_metric(args, cfg):
    flag = io.read_flag(args.flag)
    params = _params(cfg)
    tv = TangentVector(_curve_field(args.h1, flag), _surface_field(args.h2, flag))
    tv.check(flag)
    value = flag_metric(flag, tv, params)
    _emit({"metric": value, "weights": list(params.as_tuple()), "h1": args.h1, "h2": args.h2}, args.out)
    return EXIT_OK


def cmd_validate(args, cfg):
    flag = io.read_flag(args.flag)
    tols = {}
    for item in args.tol or []:
        name, _, val = item.partition("=")
        if name not in DEFAULT_TOLERANCES:
            raise ValueError(f"unknown tolerance {name!r}; choose from {sorted(DEFAULT_TOLERANCES)}")
        tols[name] = float(val)
    checks = validate_flag(flag, eps=cfg["eps"], tolerances=tols, seed=int(cfg["seed"]), params=_params(cfg))
    ok = all(c.passed for c in checks)
    _emit({"passed": ok, "checks": [c.as_dict() for c in checks]}, args.out)
    return EXIT_OK if ok else EXIT_VALIDATION


def cmd_distance(args, cfg):
    a = io.read_flag(args.flag_a)
    b = io.read_flag(args.flag_b)
    opts = StraightenOptions(max_iters=int(cfg["max_iters"]))
    for key, val in (cfg.get("straighten") or {}).items():
        if not hasattr(opts, key):
            raise ValueError(f"unknown straighten option {key!r}")
        setattr(opts, key, type(getattr(opts, key))(val))
    result = straighten(linear_path(a, b, int(cfg["K"])), _params(cfg), opts)
    d = float(np.sqrt(result.energy))
    if args.frames:
        io.export_path(result.path, args.frames)
    _emit(
        {
            "distance": d,
            "energy_history": result.energy_history,
            "iterations": result.iterations,
            "converged": result.converged,
            "line_search_failed": result.line_search_failed,
            "message": result.message,
            "K": int(cfg["K"]),
        },
        args.out,
    )
    return EXIT_OPTIMIZER if result.line_search_failed else EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="flagmetric", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, weights=False):
        sp.add_argument("--config", help="JSON file with defaults (weights, grid, K, seed, eps, ...)")
        sp.add_argument("--out", help="write the JSON result here instead of stdout")
        sp.add_argument("--seed", type=int)
        if weights:
            sp.add_argument("--weights", type=_floats, help="a1,b1,c1,a2,b2,c2 (default all 1)")
            sp.add_argument("--elastic", help="raw elastic weights a,b,a',b',c' (overrides --weights)")

    sp = sub.add_parser("synth", help="write an analytic flag")
    sp.add_argument("shape", help="one of: " + ", ".join(sorted(SHAPES)))
    sp.add_argument("--params", help="comma-separated shape parameters, e.g. 1,1,2")
    sp.add_argument("--grid", type=_grid, help="NUxNV, default 64x33")
    sp.add_argument("--layout", choices=["inline", "binary"], default="inline")
    common(sp)
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("invariants", help="curve and surface invariants of a flag file")
    sp.add_argument("flag")
    common(sp)
    sp.set_defaults(func=cmd_invariants)

    sp = sub.add_parser("metric", help="evaluate the flag metric on (h1, h2)")
    sp.add_argument("flag")
    sp.add_argument("--h1", default="const:0", help="const:c | sin:k | cos:k | z | file")
    sp.add_argument("--h2", default="const:1", help="const:c | sin:k | cos:k | z | file")
    common(sp, weights=True)
    sp.set_defaults(func=cmd_metric)

    sp = sub.add_parser("validate", help="run the variation, gauge and kernel checks")
    sp.add_argument("flag")
    sp.add_argument("--eps", type=float)
    sp.add_argument("--tol", action="append", metavar="NAME=VALUE")
    common(sp, weights=True)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("distance", help="straighten the linear path between two flags")
    sp.add_argument("flag_a")
    sp.add_argument("flag_b")
    sp.add_argument("--K", type=int, help="number of path steps (default 16)")
    sp.add_argument("--max-iters", dest="max_iters", type=int)
    sp.add_argument("--frames", help="directory for per-frame OBJ export")
    common(sp, weights=True)
    sp.set_defaults(func=cmd_distance)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _load_config(args)
        return args.func(args, cfg)
    except LineSearchFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OPTIMIZER
    except (FlagError, ValueError, OSError, json.JSONDecodeError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
