import numpy as np
import pytest

from amp_lab import weights
from amp_lab.fem import GridFunction, Mesh1D
from amp_lab.options import SolverOptions
from amp_lab.solver import spectral_context


def sampled(mesh, fn):
    return GridFunction.from_callable(mesh, fn)


@pytest.fixture(scope="session")
def opts():
    return SolverOptions()


@pytest.fixture(scope="session")
def mesh_pi_400():
    return Mesh1D(0.0, np.pi, 399)


@pytest.fixture(scope="session")
def ctx_p2_shifted(mesh_pi_400, opts):
    f = weights.one_minus_sin(mesh_pi_400, 0.05)
    return spectral_context(2.0, f, mesh_pi_400, opts)


@pytest.fixture(scope="session")
def ctx_p3_shifted(mesh_pi_400, opts):
    f = weights.one_minus_sin(mesh_pi_400, 0.05)
    return spectral_context(3.0, f, mesh_pi_400, opts)
