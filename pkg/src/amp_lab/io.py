"""Plain-text and JSON (de)serialization of grid functions and results.

Floats are written with ``repr`` (shortest round-trip form), so reading a
file back reproduces every value bit for bit.
"""

import json
from pathlib import Path

import numpy as np

from .errors import MeshMismatchError
from .fem import GridFunction, Mesh1D, WeightFunction


def grid_to_table(u):
    rows = ["# x u"]
    rows += [f"{x!r} {v!r}" for x, v in zip(u.mesh.nodes.tolist(), u.full.tolist())]
    return "\n".join(rows) + "\n"


def _read_table(text):
    xs, vs = [], []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        x, v = line.split()[:2]
        xs.append(float(x))
        vs.append(float(v))
    return np.array(xs), np.array(vs)


def _mesh_from_nodes(xs):
    if xs.size < 4:
        raise MeshMismatchError("table needs at least 4 rows")
    mesh = Mesh1D(xs[0], xs[-1], xs.size - 2)
    if not np.allclose(xs, mesh.nodes, rtol=0, atol=1e-9 * max(1.0, mesh.length)):
        raise MeshMismatchError("table abscissae are not a uniform mesh")
    return mesh


def grid_from_table(text):
    xs, vs = _read_table(text)
    mesh = _mesh_from_nodes(xs)
    if vs[0] != 0.0 or vs[-1] != 0.0:
        raise ValueError("grid function must vanish at both boundary rows")
    return GridFunction(mesh, vs[1:-1])


def weight_from_table(text, nonneg=True):
    xs, vs = _read_table(text)
    return WeightFunction(_mesh_from_nodes(xs), vs, nonneg=nonneg)


def grid_to_dict(u):
    m = u.mesh
    return {"a": m.a, "b": m.b, "n": m.n, "values": u.values.tolist()}


def grid_from_dict(d):
    return GridFunction(Mesh1D(d["a"], d["b"], d["n"]), d["values"])


def grid_to_json(u):
    return json.dumps(grid_to_dict(u))


def grid_from_json(text):
    return grid_from_dict(json.loads(text))


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, GridFunction):
        return grid_to_dict(obj)
    if hasattr(obj, "value") and hasattr(obj, "name"):  # enums
        return obj.value
    return obj


def dump_json(obj, path=None):
    """Deterministic JSON: sorted keys, repr floats, trailing newline."""
    text = json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def write_grid(u, stem, meta=None):
    """Write ``stem.txt`` (table) and ``stem.json`` (values plus metadata)."""
    stem = Path(stem)
    stem.with_suffix(".txt").write_text(grid_to_table(u))
    payload = dict(meta or {})
    payload["grid"] = grid_to_dict(u)
    dump_json(payload, stem.with_suffix(".json"))
