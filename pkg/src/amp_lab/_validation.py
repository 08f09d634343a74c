"""Input checks shared by the estimator layer and the CLI."""

import numpy as np
from sklearn.utils.validation import check_array

from .errors import BadExponentError, InvalidIntervalError, MeshMismatchError
from .fem import GridFunction, Mesh1D, WeightFunction


def check_p(p):
    try:
        p = float(p)
    except (TypeError, ValueError):
        raise BadExponentError(f"p must be a real number, got {p!r}") from None
    if not (np.isfinite(p) and p > 1.0):
        raise BadExponentError(f"p must be finite and > 1, got {p}")
    return p


def check_interval(a, b):
    a, b = float(a), float(b)
    if not (np.isfinite(a) and np.isfinite(b) and b > a):
        raise InvalidIntervalError(f"need finite a < b, got ({a}, {b})")
    return a, b


def check_mesh(a, b, n):
    a, b = check_interval(a, b)
    if int(n) != n:
        raise ValueError(f"n must be an integer, got {n!r}")
    return Mesh1D(a, b, int(n))


def check_weight(f, mesh):
    """Coerce ``f`` to a WeightFunction on ``mesh``.

    Accepts a WeightFunction (mesh must match), a callable of x, or nodal
    values at all n + 2 mesh nodes.
    """
    if isinstance(f, WeightFunction):
        if f.mesh != mesh:
            raise MeshMismatchError("weight lives on a different mesh")
        return f
    if callable(f):
        return WeightFunction.from_callable(mesh, f)
    values = check_array(f, ensure_2d=False, dtype=float).ravel()
    if values.size != mesh.n + 2:
        raise MeshMismatchError(
            f"expected {mesh.n + 2} nodal values (boundary included), got {values.size}")
    return WeightFunction(mesh, values)


def check_points(x, mesh):
    """Query points for ``predict``: finite, 1D, inside [a, b]."""
    x = check_array(x, ensure_2d=False, dtype=float)
    if x.ndim == 2:
        if x.shape[1] != 1:
            raise ValueError("predict expects a 1D array or a single column")
        x = x[:, 0]
    if np.any(x < mesh.a) or np.any(x > mesh.b):
        raise ValueError(f"query points must lie in [{mesh.a}, {mesh.b}]")
    return x


def check_grid(u, mesh):
    if not isinstance(u, GridFunction) or u.mesh != mesh:
        raise MeshMismatchError("grid function lives on a different mesh")
    return u
