#
# offdiag/model.py
#
# the spectral model (m, v, a1) of the arrowhead operator and its analytic
# transforms: the Borel transform F of nu = |v|^2 m, the Herglotz function phi
# and the 2x2 matrix function M.
#

import math
import functools
import dataclasses

from dataclasses import dataclass
from typing import (
    Optional,
    Tuple,
    Union
)

import numpy as np

import offdiag.exceptions
import offdiag.measure

from offdiag.measure import Measure


# |(a1 - z) - F(z)| below this is reported as DenominatorVanishes
DENOMINATOR_FLOOR = 1e-300

# atoms x evaluation points per block in vectorized sums
_CHUNK = 1 << 21



@dataclass(frozen=True, eq=False)
class Coupling:
    """
    The coupling function v on the atoms of m. Either a single complex
    :attr:`value` for every atom (survives refinement) or explicit
    :attr:`samples`, one per atom of m in increasing point order.
    """
    value: Optional[complex] = None
    samples: Optional[np.ndarray] = None

    def __post_init__(self):
        if (self.value is None) == (self.samples is None):
            raise offdiag.exceptions.InvalidModel("coupling needs exactly one of value / samples")
        if self.value is not None:
            value = complex(self.value)
            if not (math.isfinite(value.real) and math.isfinite(value.imag)):
                raise offdiag.exceptions.InvalidModel(f"coupling value must be finite, got {value}")
            object.__setattr__(self, 'value', value)
        else:
            samples = np.array(self.samples, dtype=complex).ravel()
            if not np.all(np.isfinite(samples)):
                raise offdiag.exceptions.InvalidModel("coupling samples must be finite")
            samples.setflags(write=False)
            object.__setattr__(self, 'samples', samples)

    @property
    def constant(self) -> bool: return self.value is not None

    def on(self, n: int) -> np.ndarray:
        """ Coupling values for a measure with :attr:`n` atoms. """
        if self.constant:
            return np.full(n, self.value, dtype=complex)
        if self.samples.size != n:
            raise offdiag.exceptions.InvalidModel(
                f"coupling has {self.samples.size} samples but the measure has {n} atoms")
        return self.samples

    def scaled(self, t: float) -> 'Coupling':
        if self.constant: return Coupling(value=t * self.value)
        return Coupling(samples=t * self.samples)



@dataclass(frozen=True, eq=False)
class SpectralModel:
    """
    The triple (m, v, a1). B acts on L2(m) + C as multiplication by mu on the
    first summand, a1 on the second, coupled through v.
    """
    m: Measure
    v: Coupling
    a1: float

    def __post_init__(self):
        if not isinstance(self.m, Measure):
            raise offdiag.exceptions.InvalidModel(f"m must be a measure, got {self.m!r}")
        if not isinstance(self.v, Coupling):
            object.__setattr__(self, 'v', Coupling(value=self.v))
        a1 = float(self.a1)
        if not math.isfinite(a1):
            raise offdiag.exceptions.InvalidModel(f"a1 must be finite, got {self.a1}")
        object.__setattr__(self, 'a1', a1)
        self.couplings  # validates sample count
        if not np.any(self.couplings != 0):
            raise offdiag.exceptions.AllWeightsZero()

    @classmethod
    def from_atoms(cls, points, weights, v, a1: float) -> 'SpectralModel':
        """
        Atomic model from possibly unsorted atoms. :attr:`v` is a scalar or one
        value per atom; coincident atoms are merged keeping w*|v|**2.
        """
        points = np.asarray(points, dtype=float).ravel()
        if np.ndim(v) == 0:
            p, w, _ = offdiag.measure.coalesce(points, weights)
            return cls(offdiag.measure.AtomicMeasure(p, w), Coupling(value=complex(v)), a1)
        p, w, values = offdiag.measure.coalesce(points, weights, v)
        return cls(offdiag.measure.AtomicMeasure(p, w), Coupling(samples=values), a1)

    ## atoms of m and the coupling on them

    @property
    def points(self) -> np.ndarray: return self.m.atoms()[0]

    @property
    def weights(self) -> np.ndarray: return self.m.atoms()[1]

    @functools.cached_property
    def couplings(self) -> np.ndarray:
        values = self.v.on(self.points.size)
        values.setflags(write=False)
        return values

    ## refinement

    @property
    def refinable(self) -> bool:
        return self.m.refinable and self.v.constant

    @property
    def depth(self) -> Optional[int]: return self.m.depth

    def at_depth(self, depth: int) -> 'SpectralModel':
        if not self.v.constant:
            raise offdiag.exceptions.NotRefinable("sampled couplings are tied to one materialization")
        return dataclasses.replace(self, m=self.m.at_depth(depth))

    def with_a1(self, a1: float) -> 'SpectralModel':
        return dataclasses.replace(self, a1=a1)

    def with_coupling(self, v: Union[Coupling, complex]) -> 'SpectralModel':
        if not isinstance(v, Coupling): v = Coupling(value=v)
        return dataclasses.replace(self, v=v)

    ## derived measure

    @functools.cached_property
    def nu(self) -> Measure:
        """ nu = |v|^2 m; constant couplings keep the structure of m. """
        if self.v.constant and not isinstance(self.m, offdiag.measure.AtomicMeasure):
            return offdiag.measure.Mixture(((abs(self.v.value) ** 2, self.m),))
        w = self.weights * np.abs(self.couplings) ** 2
        keep = w > 0
        return offdiag.measure.AtomicMeasure(self.points[keep], w[keep])

    @property
    def v_norm_sq(self) -> float:
        return float(np.sum(self.weights * np.abs(self.couplings) ** 2))

    @property
    def v_norm(self) -> float:
        return math.sqrt(self.v_norm_sq)

    def hull(self) -> Tuple[float, float]:
        return self.m.support_hull()

    def scale(self) -> float:
        return self.m.scale()



def nu_measure(model: SpectralModel) -> Measure:
    return model.nu



def _cauchy_sum(points: np.ndarray, weights: np.ndarray, z: np.ndarray) -> np.ndarray:
    """ sum_i w_i / (mu_i - z) for every entry of :attr:`z`. """
    out = np.empty(z.shape, dtype=complex)
    flat_z, flat_out = z.ravel(), out.reshape(-1)
    block = max(1, _CHUNK // max(1, points.size))
    for start in range(0, flat_z.size, block):
        zz = flat_z[start:start + block]
        flat_out[start:start + block] = np.sum(weights[None, :] / (points[None, :] - zz[:, None]), axis=1)
    return out


def _borel_upper(nu: Measure, z: np.ndarray) -> np.ndarray:
    if isinstance(nu, offdiag.measure.Mixture):
        return sum(c * _borel_upper(m, z) for c, m in nu.components)
    points, weights = nu.atoms()
    return _cauchy_sum(points, weights, z)


def borel_transforms(nu: Measure, z) -> np.ndarray:
    """ Vectorized :func:`borel_transform`; the lower half-plane is served by conjugation. """
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag == 0):
        bad = complex(z.ravel()[np.argmax(z.ravel().imag == 0)])
        raise offdiag.exceptions.OffAxisRequired(bad)
    lower = z.imag < 0
    upper = np.where(lower, np.conj(z), z)
    values = _borel_upper(nu, upper)
    return np.where(lower, np.conj(values), values)


def borel_transform(nu: Measure, z: complex) -> complex:
    """ F(z) = int dnu(mu) / (mu - z), Im z != 0. """
    return complex(borel_transforms(nu, np.array([z]))[0])



def _require_upper(z: complex):
    if not z.imag > 0:
        raise offdiag.exceptions.OffAxisRequired(z, "Im z > 0")


def _denominator(model: SpectralModel, z: complex) -> Tuple[complex, complex]:
    z = complex(z)
    _require_upper(z)
    F = borel_transform(model.nu, z)
    s = (model.a1 - z) - F
    if abs(s) < DENOMINATOR_FLOOR:
        raise offdiag.exceptions.DenominatorVanishes(z)
    return F, s


def phi(model: SpectralModel, z: complex) -> complex:
    """ phi(z) = (1 + (a1 - z) F(z)) / ((a1 - z) - F(z)). """
    F, s = _denominator(model, z)
    return (1 + (model.a1 - complex(z)) * F) / s


def phi_values(model: SpectralModel, z) -> np.ndarray:
    """ Vectorized :func:`phi` over an array of points in the upper half-plane. """
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag <= 0):
        raise offdiag.exceptions.OffAxisRequired(complex(z.ravel()[np.argmin(z.ravel().imag)]), "Im z > 0")
    F = borel_transforms(model.nu, z)
    s = (model.a1 - z) - F
    if np.any(np.abs(s) < DENOMINATOR_FLOOR):
        raise offdiag.exceptions.DenominatorVanishes(complex(z.ravel()[np.argmin(np.abs(s).ravel())]))
    return (1 + (model.a1 - z) * F) / s


def m_matrix(model: SpectralModel, z: complex) -> np.ndarray:
    """
    Closed-form 2x2 matrix function, s = (a1 - z) - F:

        M00 = (a1 - z) F / s,  M11 = 1 / s,  M01 = M10 = -F / s
    """
    F, s = _denominator(model, z)
    M00 = (model.a1 - complex(z)) * F / s
    M01 = -F / s
    return np.array([[M00, M01], [M01, 1 / s]], dtype=complex)
