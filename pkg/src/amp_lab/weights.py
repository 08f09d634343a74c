"""Builders for the weights ``f`` used throughout the examples and the CLI."""

import numpy as np

from .fem import WeightFunction


def _unit(mesh):
    """Node coordinates mapped to (0, pi)."""
    return np.pi * (mesh.nodes - mesh.a) / mesh.length


def constant(mesh, c=1.0):
    return WeightFunction(mesh, np.full(mesh.n + 2, float(c)))


def one_minus_sin(mesh, shift=0.0):
    """``1 - sin x + shift`` on (0, pi), rescaled to other intervals.

    With ``shift = 0`` the weight vanishes at the midpoint; a positive shift
    makes it strictly positive.
    """
    return WeightFunction(mesh, 1.0 - np.sin(_unit(mesh)) + shift)


def sine(mesh):
    """The p = 2 first eigenfunction ``sin`` (max 1), boundary samples zero."""
    values = np.sin(_unit(mesh))
    values[[0, -1]] = 0.0
    return WeightFunction(mesh, values)


def from_grid(u):
    """Weight from a grid function (e.g. a computed phi_1), scaled to max 1."""
    full = u.full
    return WeightFunction(u.mesh, full / np.max(np.abs(full)))


def random_smooth(mesh, seed=0, modes=4, amplitude=0.7):
    """Strictly positive smooth random weight ``exp(sum c_k sin(k x))``."""
    rng = np.random.default_rng(seed)
    c = amplitude * rng.standard_normal(modes)
    t = _unit(mesh)
    k = np.arange(1, modes + 1)
    return WeightFunction(mesh, np.exp(np.sin(np.outer(t, k)) @ c))
