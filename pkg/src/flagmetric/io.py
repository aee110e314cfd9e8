"""Flag files and visualization export.

A flag file is a JSON manifest::

    {"version": 1, "N_u": 64, "N_v": 33, "equator_row": 16,
     "data_layout": "inline", "data": [[x, y, z], ...]}

with nodes listed row-major (``u`` index outer, ``v`` index inner), or with
``"data_layout": "binary"`` and ``"data_file"`` naming a sidecar of
little-endian float64 triples in the same order. Floats are written with 17
significant digits, so both layouts read back to the identical array.
"""

import json
import math
from pathlib import Path

import numpy as np

from .errors import BadDimensions
from .geomcore import build_flag

__all__ = ["FORMAT_VERSION", "dumps", "write_json", "write_flag", "read_flag", "export_obj", "export_path"]

FORMAT_VERSION = 1


def _fmt_float(x):
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def _emit(obj, out, indent, level):
    pad = "" if indent is None else "\n" + " " * (indent * (level + 1))
    end = "" if indent is None else "\n" + " " * (indent * level)
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        out.append(json.dumps(bool(obj) if obj is not None else None))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_fmt_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{")
        for n, (k, v) in enumerate(obj.items()):
            if n:
                out.append(",")
            out.append(pad + json.dumps(str(k)) + ": ")
            _emit(v, out, indent, level + 1)
        out.append(end + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        seq = obj.tolist() if isinstance(obj, np.ndarray) else obj
        # keep short numeric rows (xyz triples, weights) on one line
        flat = all(not isinstance(v, (list, tuple, dict, np.ndarray)) for v in seq)
        out.append("[")
        for n, v in enumerate(seq):
            if n:
                out.append(", " if flat or indent is None else ",")
            if not flat:
                out.append(pad)
            _emit(v, out, indent, level + 1)
        out.append(("" if flat else end) + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent=None):
    """JSON text with every float printed to 17 significant digits."""
    out = []
    _emit(obj, out, indent, 0)
    return "".join(out)


def write_json(obj, path=None, indent=2):
    text = dumps(obj, indent=indent) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def write_flag(flag, path, layout="inline"):
    """Write ``flag`` to ``path``; ``layout='binary'`` also writes ``<stem>.bin``."""
    path = Path(path)
    manifest = {
        "version": FORMAT_VERSION,
        "N_u": flag.n_u,
        "N_v": flag.n_v,
        "equator_row": flag.equator_row,
        "data_layout": layout,
    }
    if not flag.periodic:
        manifest["periodic"] = False
    nodes = np.ascontiguousarray(flag.grid, dtype="<f8").reshape(-1, 3)
    if layout == "inline":
        manifest["data"] = nodes
    elif layout == "binary":
        sidecar = path.with_suffix(".bin")
        nodes.tofile(sidecar)
        manifest["data_file"] = sidecar.name
    else:
        raise ValueError(f"unknown data_layout {layout!r}")
    write_json(manifest, path, indent=None if layout == "inline" else 2)
    return path


def read_flag(path, validate=True):
    """Load a flag file; raises BadDimensions when the manifest and data disagree."""
    path = Path(path)
    manifest = json.loads(path.read_text())
    if manifest.get("version") != FORMAT_VERSION:
        raise BadDimensions(f"unsupported flag file version {manifest.get('version')!r}")
    try:
        n_u, n_v, row = int(manifest["N_u"]), int(manifest["N_v"]), int(manifest["equator_row"])
        layout = manifest["data_layout"]
    except KeyError as exc:
        raise BadDimensions(f"flag manifest missing field {exc}") from None
    if layout == "inline":
        data = np.asarray(manifest["data"], dtype=float)
    elif layout == "binary":
        data = np.fromfile(path.parent / manifest["data_file"], dtype="<f8")
    else:
        raise BadDimensions(f"unknown data_layout {layout!r}")
    if data.size != n_u * n_v * 3:
        raise BadDimensions(f"manifest declares {n_u}x{n_v} nodes but data holds {data.size / 3:g}")
    grid = data.astype(float).reshape(n_u, n_v, 3)
    periodic = bool(manifest.get("periodic", True))
    if not validate:
        from .geomcore import ParameterizedFlag

        return ParameterizedFlag(grid, row, periodic=periodic)
    return build_flag(grid, row, periodic=periodic)


def export_obj(flag, path):
    """Quad mesh of the grid as OBJ plus ``<stem>_curve.obj`` holding the marked curve.

    Visualization only; pole rows stay as repeated vertices.
    """
    path = Path(path)
    n_u, n_v = flag.n_u, flag.n_v
    idx = np.arange(n_u * n_v).reshape(n_u, n_v) + 1
    lines = [f"v {_fmt_float(x)} {_fmt_float(y)} {_fmt_float(z)}" for x, y, z in flag.grid.reshape(-1, 3)]
    cols = n_u if flag.periodic else n_u - 1
    for i in range(cols):
        i2 = (i + 1) % n_u
        for j in range(n_v - 1):
            lines.append(f"f {idx[i, j]} {idx[i, j + 1]} {idx[i2, j + 1]} {idx[i2, j]}")
    path.write_text("\n".join(lines) + "\n")

    curve_path = path.with_name(path.stem + "_curve.obj")
    pts = flag.curve_points
    cl = [f"v {_fmt_float(x)} {_fmt_float(y)} {_fmt_float(z)}" for x, y, z in pts]
    order = list(range(1, len(pts) + 1)) + ([1] if flag.periodic else [])
    cl.append("l " + " ".join(map(str, order)))
    curve_path.write_text("\n".join(cl) + "\n")
    return path, curve_path


def export_path(path_obj, outdir, prefix="frame"):
    """One OBJ pair per flag of a path, numbered from 0."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    width = len(str(len(path_obj) - 1))
    return [export_obj(f, outdir / f"{prefix}_{k:0{width}d}.obj") for k, f in enumerate(path_obj.flags)]
