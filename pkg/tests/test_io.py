import json

import numpy as np
import pytest

from amp_lab import weights
from amp_lab.errors import MeshMismatchError
from amp_lab.fem import GridFunction, Mesh1D
from amp_lab.io import (
    dump_json,
    grid_from_json,
    grid_from_table,
    grid_to_json,
    grid_to_table,
    weight_from_table,
    write_grid,
)


@pytest.fixture
def u():
    rng = np.random.default_rng(11)
    return GridFunction(Mesh1D(0.0, np.pi, 17), rng.standard_normal(17) / 3)


def test_table_round_trip_is_exact(u):
    text = grid_to_table(u)
    lines = text.splitlines()
    assert lines[0].startswith("#")
    assert len(lines) == u.mesh.n + 3
    back = grid_from_table(text)
    np.testing.assert_array_equal(back.values, u.values)
    assert back.mesh == u.mesh


def test_json_round_trip_is_exact(u):
    d = json.loads(grid_to_json(u))
    assert set(d) == {"a", "b", "n", "values"}
    np.testing.assert_array_equal(grid_from_json(grid_to_json(u)).values, u.values)


def test_table_rejects_nonuniform_and_nonzero_boundary():
    with pytest.raises(MeshMismatchError):
        grid_from_table("0 0\n0.1 1\n0.5 2\n0.6 1\n1 0\n")
    with pytest.raises(ValueError):
        grid_from_table("0 1\n0.25 1\n0.5 2\n0.75 1\n1 0\n")


def test_weight_table_keeps_boundary_values():
    m = Mesh1D(0, 1, 5)
    f = weights.one_minus_sin(m, 0.1)
    rows = "\n".join(f"{x!r} {v!r}" for x, v in zip(m.nodes.tolist(), f.values.tolist()))
    g = weight_from_table(rows)
    np.testing.assert_array_equal(g.values, f.values)


def test_dump_json_is_deterministic(tmp_path, u):
    payload = {"b": 1.0 / 3.0, "a": np.float64(2.5), "arr": np.arange(3), "grid": u}
    first = dump_json(payload)
    assert first == dump_json(dict(reversed(list(payload.items()))))
    assert json.loads(first)["b"] == 1.0 / 3.0
    write_grid(u, tmp_path / "sol", {"p": 2.0})
    meta = json.loads((tmp_path / "sol.json").read_text())
    assert meta["p"] == 2.0 and meta["grid"]["n"] == 17
    assert grid_from_table((tmp_path / "sol.txt").read_text()).mesh == u.mesh
