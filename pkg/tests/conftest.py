import math

import numpy as np
import pytest

import offdiag.classify
import offdiag.measure
import offdiag.writer

from offdiag.model import SpectralModel, Coupling


@pytest.fixture(autouse=True)
def no_writers():
    """ Tests start and end with every writer disabled. """
    for name in offdiag.writer.get_enabled():
        offdiag.writer.disable(name)
    yield
    for name in offdiag.writer.get_enabled():
        offdiag.writer.disable(name)


@pytest.fixture
def single_atom() -> SpectralModel:
    """ m = delta_0, v = 1, a1 = 0: B = [[0, 1], [1, 0]]. """
    return SpectralModel.from_atoms([0.0], [1.0], 1.0, 0.0)


@pytest.fixture
def two_atom() -> SpectralModel:
    """ Atoms at -1 and 1 with weight 1/2; eigenvalues -sqrt(2), 0, sqrt(2). """
    return SpectralModel.from_atoms([-1.0, 1.0], [0.5, 0.5], [1.0, 1.0], 0.0)


@pytest.fixture
def faint_atom() -> SpectralModel:
    """
    A weight 1e-10 atom at 0.3 between atoms at -1 and 1: one eigenvalue sits
    about 1.6e-10 above it, where g2 is near 4e9.
    """
    return SpectralModel.from_atoms([-1.0, 0.3, 1.0], [0.5, 1e-10, 0.5], [1.0, 1.0, 1.0], 0.0)


@pytest.fixture
def uniform() -> SpectralModel:
    """ Lebesgue measure on [0, 1], v = 1. """
    return SpectralModel(offdiag.measure.QuadratureDensity(0.0, 1.0), Coupling(value=1.0), 0.5)


@pytest.fixture
def cantor_gap() -> SpectralModel:
    """ Middle-thirds Cantor measure with p = 0.3; a1 = 1/2 puts an eigenvalue in (1/3, 2/3). """
    m = offdiag.measure.CantorApprox(0.0, 1.0, 1.0 / 3.0, 0.3, depth=12)
    return SpectralModel(m, Coupling(value=1.0), 0.5)


CANTOR_SC_LAMBDA = 0.8


@pytest.fixture
def cantor_sc() -> SpectralModel:
    """
    Cantor measure with ratio 0.2 and p = 0.08 at depth 16, a1 tuned so that
    the boundary equation holds at lambda = 0.8 in the support. g2 diverges
    there under refinement.
    """
    m = offdiag.measure.CantorApprox(0.0, 1.0, 0.2, 0.08, depth=16)
    base = SpectralModel(m, Coupling(value=1.0), 0.0)
    F = offdiag.classify.boundary_value(base.nu, CANTOR_SC_LAMBDA).estimate
    return base.with_a1(CANTOR_SC_LAMBDA + F.real)


def random_atomic_model(seed: int, n_max: int = 200, complex_coupling: bool = True) -> SpectralModel:
    """ Random atomic model with distinct atoms in [-5, 5] and couplings bounded away from 0. """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, n_max + 1))
    points = np.sort(rng.uniform(-5.0, 5.0, n))
    # keep atoms well separated relative to the merge tolerance
    points = np.unique(np.round(points, 9))
    weights = rng.uniform(0.1, 1.0, points.size)
    v = rng.uniform(0.2, 1.0, points.size) * rng.choice([-1.0, 1.0], points.size)
    if complex_coupling:
        v = v * np.exp(1j * rng.uniform(0, 2 * math.pi, points.size))
    a1 = float(rng.uniform(-6.0, 6.0))
    return SpectralModel.from_atoms(points, weights, v, a1)


@pytest.fixture
def random_model():
    """ Factory: random_model(seed, n_max=200) -> SpectralModel. """
    return random_atomic_model


def gapped_model(seed: int, d: float = 2.0, n: int = 8) -> SpectralModel:
    """ a1 = 0, atoms in [-d-1, -d] and [d, d+1] with one atom at each of -d and d. """
    rng = np.random.default_rng(seed)
    left = np.concatenate(([-d], rng.uniform(-d - 1, -d, n)))
    right = np.concatenate(([d], rng.uniform(d, d + 1, n)))
    points = np.concatenate((left, right))
    weights = rng.uniform(0.1, 1.0, points.size)
    v = rng.uniform(-1.0, 1.0, points.size)
    model = SpectralModel.from_atoms(points, weights, v, 0.0)
    # rescale v to sit strictly inside the smallness condition
    target = rng.uniform(0.05, 0.95) * (3 * math.pi - math.sqrt(math.pi ** 2 + 32)) / (math.pi ** 2 - 4) * d
    return model.with_coupling(model.v.scaled(target / model.v_norm))


@pytest.fixture
def gapped():
    return gapped_model
