#
# offdiag/measure.py
#
# compactly supported Borel measures, all reduced to weighted atoms. exact
# atoms, Gauss-Legendre panels of a density, finite-depth Cantor-type measures
# and positive mixtures of these share one atomic code path.
#

import math
import dataclasses
import functools

from dataclasses import dataclass
from typing import (
    Tuple,
    Optional,
    Callable
)

import numpy as np
import scipy.special
from numpy.polynomial import Polynomial

import offdiag.exceptions
import offdiag.util


# atoms closer than MERGE_RTOL * hull width are one atom
MERGE_RTOL = 1e-13

DEFAULT_QUADRATURE_NODES = 64
DEFAULT_QUADRATURE_DEPTH = 4
DEFAULT_CANTOR_DEPTH = 16


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def coalesce(points, weights, values=None, rtol: float = MERGE_RTOL):
    """
    Sorts atoms and merges neighbours closer than :attr:`rtol` times the hull
    width. Weights are summed. Optional per-atom :attr:`values` (a coupling)
    are merged so that w*|v|**2 is additive; the phase of the heaviest member
    is kept. Returns :attr:`(points, weights, values)`.
    """
    points = np.asarray(points, dtype=float).ravel()
    weights = np.asarray(weights, dtype=float).ravel()
    if values is not None:
        values = np.asarray(values, dtype=complex).ravel()
    order = np.argsort(points, kind='stable')
    points, weights = points[order], weights[order]
    if values is not None: values = values[order]
    if points.size < 2:
        return points, weights, values
    tol = rtol * offdiag.util.hull_scale(points[0], points[-1])
    starts = np.concatenate(([True], np.diff(points) > tol))
    if starts.all():
        return points, weights, values
    group = np.cumsum(starts) - 1
    merged_w = np.bincount(group, weights=weights)
    merged_p = points[starts]
    merged_v = None
    if values is not None:
        energy = np.bincount(group, weights=weights * np.abs(values) ** 2)
        heaviest = np.zeros(merged_w.size, dtype=int)
        best = np.full(merged_w.size, -1.0)
        for i, g in enumerate(group):
            score = weights[i] * abs(values[i])
            if score > best[g]: best[g], heaviest[g] = score, i
        phase = np.exp(1j * np.angle(values[heaviest]))
        merged_v = np.sqrt(energy / merged_w) * phase
    return merged_p, merged_w, merged_v



class Measure:
    """ Base class of all measures. Subclasses are immutable. """
    kind: str = 'abstract'

    def atoms(self) -> Tuple[np.ndarray, np.ndarray]:
        """ Returns :attr:`(points, weights)`, points strictly increasing. """
        raise NotImplementedError()

    @property
    def refinable(self) -> bool: return False

    @property
    def depth(self) -> Optional[int]: return None

    def at_depth(self, depth: int) -> 'Measure':
        raise offdiag.exceptions.NotRefinable(f"{self.kind} measures have no depth")

    def resolution(self) -> float:
        """ Smallest length scale on which the atoms represent the measure. """
        return 0.0

    def total_mass(self) -> float:
        return float(np.sum(self.atoms()[1]))

    def support_hull(self) -> Tuple[float, float]:
        points = self.atoms()[0]
        return float(points[0]), float(points[-1])

    def scale(self) -> float:
        return offdiag.util.hull_scale(*self.support_hull())

    def __len__(self) -> int:
        return self.atoms()[0].size



@dataclass(frozen=True, eq=False)
class AtomicMeasure(Measure):
    """ Finitely many atoms; points strictly increasing, weights positive. """
    points: np.ndarray
    weights: np.ndarray
    kind = 'atomic'

    def __post_init__(self):
        points = np.array(self.points, dtype=float).ravel()
        weights = np.array(self.weights, dtype=float).ravel()
        if points.size == 0:
            raise offdiag.exceptions.InvalidMeasure("atomic measure needs at least one atom")
        if points.shape != weights.shape:
            raise offdiag.exceptions.InvalidMeasure(
                f"{points.size} points but {weights.size} weights")
        if not (np.all(np.isfinite(points)) and np.all(np.isfinite(weights))):
            raise offdiag.exceptions.InvalidMeasure("points and weights must be finite")
        if np.any(weights <= 0):
            raise offdiag.exceptions.InvalidMeasure("all weights must be strictly positive")
        if np.any(np.diff(points) <= 0):
            raise offdiag.exceptions.InvalidMeasure("points must be strictly increasing")
        object.__setattr__(self, 'points', _frozen(points))
        object.__setattr__(self, 'weights', _frozen(weights))

    def atoms(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.points, self.weights


def atomic(points, weights) -> AtomicMeasure:
    """ Builds an :class:`AtomicMeasure` from unsorted input, merging near-coincident atoms. """
    points, weights, _ = coalesce(points, weights)
    return AtomicMeasure(points, weights)



@dataclass(frozen=True)
class Density:
    """ Named density rule on [alpha, beta]. """
    name: str = 'uniform'
    coefficients: Tuple[float, ...] = ()

    known = ('uniform', 'semicircle', 'polynomial')

    def __post_init__(self):
        if self.name not in self.known:
            raise offdiag.exceptions.InvalidMeasure(
                f"unknown density '{self.name}' (must be one of {', '.join(self.known)})")
        if self.name == 'polynomial' and len(self.coefficients) == 0:
            raise offdiag.exceptions.InvalidMeasure("polynomial density needs coefficients")

    def __call__(self, x: np.ndarray, alpha: float, beta: float) -> np.ndarray:
        if self.name == 'uniform':
            return np.full_like(x, 1.0 / (beta - alpha))
        if self.name == 'semicircle':
            radius = (beta - alpha) / 2
            centre = (beta + alpha) / 2
            return 2.0 / (math.pi * radius ** 2) * np.sqrt(np.clip(radius ** 2 - (x - centre) ** 2, 0, None))
        return Polynomial(self.coefficients)(x)



@dataclass(frozen=True, eq=False)
class QuadratureDensity(Measure):
    """
    Density on [alpha, beta] reduced to atoms at Gauss-Legendre nodes,
    :attr:`nodes` per panel, 2**depth equal panels. Atom weight = node weight
    times density sample.
    """
    alpha: float
    beta: float
    density: Density = Density()
    depth: int = DEFAULT_QUADRATURE_DEPTH
    nodes: int = DEFAULT_QUADRATURE_NODES
    kind = 'density'

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta) and self.alpha < self.beta):
            raise offdiag.exceptions.InvalidMeasure(f"need finite alpha < beta, got [{self.alpha}, {self.beta}]")
        if self.depth < 0 or self.nodes < 1:
            raise offdiag.exceptions.InvalidMeasure("need depth >= 0 and nodes >= 1")
        if np.any(self.density_samples <= 0):
            raise offdiag.exceptions.InvalidMeasure("density must be strictly positive at every quadrature node")

    @property
    def panels(self) -> int: return 2 ** self.depth

    @functools.cached_property
    def _nodes_and_weights(self) -> Tuple[np.ndarray, np.ndarray]:
        x, w = scipy.special.roots_legendre(self.nodes)
        edges = np.linspace(self.alpha, self.beta, self.panels + 1)
        half = (edges[1:] - edges[:-1]) / 2
        mid = (edges[1:] + edges[:-1]) / 2
        nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        weights = (half[:, None] * w[None, :]).ravel()
        return _frozen(nodes), _frozen(weights)

    @property
    def node_positions(self) -> np.ndarray: return self._nodes_and_weights[0]

    @property
    def node_weights(self) -> np.ndarray: return self._nodes_and_weights[1]

    @functools.cached_property
    def density_samples(self) -> np.ndarray:
        return _frozen(np.asarray(self.density(self.node_positions, self.alpha, self.beta), dtype=float))

    @functools.cached_property
    def _atoms(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.node_positions, _frozen(self.node_weights * self.density_samples)

    def atoms(self) -> Tuple[np.ndarray, np.ndarray]:
        return self._atoms

    @property
    def refinable(self) -> bool: return True

    def at_depth(self, depth: int) -> 'QuadratureDensity':
        return dataclasses.replace(self, depth=depth)

    def resolution(self) -> float:
        return (self.beta - self.alpha) / self.panels / 8



@dataclass(frozen=True, eq=False)
class CantorApprox(Measure):
    """
    Self-similar Cantor-type measure on [lo, hi] with contraction ratio
    :attr:`ratio` and branch weights (p, 1 - p), materialized at :attr:`depth`
    as 2**depth atoms at the midpoints of the surviving subintervals.
    """
    lo: float
    hi: float
    ratio: float = 1.0 / 3.0
    p: float = 0.5
    depth: int = DEFAULT_CANTOR_DEPTH
    kind = 'cantor'

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi) and self.lo < self.hi):
            raise offdiag.exceptions.InvalidMeasure(f"need finite lo < hi, got [{self.lo}, {self.hi}]")
        if not 0 < self.ratio < 0.5:
            raise offdiag.exceptions.InvalidMeasure(f"ratio must be in (0, 1/2), got {self.ratio}")
        if not 0 < self.p < 1:
            raise offdiag.exceptions.InvalidMeasure(f"branch weight p must be in (0, 1), got {self.p}")
        if self.depth < 0:
            raise offdiag.exceptions.InvalidMeasure(f"depth must be >= 0, got {self.depth}")

    @functools.cached_property
    def _atoms(self) -> Tuple[np.ndarray, np.ndarray]:
        d, r, length = self.depth, self.ratio, self.hi - self.lo
        codes = np.arange(2 ** d, dtype=np.int64)
        offsets = np.zeros(codes.size)
        weights = np.ones(codes.size)
        for k in range(d):
            right = ((codes >> (d - 1 - k)) & 1).astype(bool)
            offsets += np.where(right, (1 - r) * length * r ** k, 0.0)
            weights *= np.where(right, 1 - self.p, self.p)
        points = self.lo + offsets + length * r ** d / 2
        return _frozen(points), _frozen(weights)

    def atoms(self) -> Tuple[np.ndarray, np.ndarray]:
        return self._atoms

    @property
    def refinable(self) -> bool: return True

    def at_depth(self, depth: int) -> 'CantorApprox':
        return dataclasses.replace(self, depth=depth)

    def resolution(self) -> float:
        return 4 * self.ratio ** self.depth * (self.hi - self.lo)



@dataclass(frozen=True, eq=False)
class Mixture(Measure):
    """ Positive combination sum_k c_k * measure_k. """
    components: Tuple[Tuple[float, Measure], ...]
    kind = 'mixture'

    def __post_init__(self):
        components = tuple((float(c), m) for c, m in self.components)
        if not components:
            raise offdiag.exceptions.InvalidMeasure("mixture needs at least one component")
        for c, m in components:
            if not (c > 0 and math.isfinite(c)):
                raise offdiag.exceptions.InvalidMeasure(f"mixture coefficient must be positive, got {c}")
            if not isinstance(m, Measure):
                raise offdiag.exceptions.InvalidMeasure(f"mixture component {m!r} is not a measure")
        object.__setattr__(self, 'components', components)

    @functools.cached_property
    def _atoms(self) -> Tuple[np.ndarray, np.ndarray]:
        points = np.concatenate([m.atoms()[0] for _, m in self.components])
        weights = np.concatenate([c * m.atoms()[1] for c, m in self.components])
        points, weights, _ = coalesce(points, weights)
        return _frozen(points), _frozen(weights)

    def atoms(self) -> Tuple[np.ndarray, np.ndarray]:
        return self._atoms

    def total_mass(self) -> float:
        return float(sum(c * m.total_mass() for c, m in self.components))

    @property
    def refinable(self) -> bool:
        return any(m.refinable for _, m in self.components)

    @property
    def depth(self) -> Optional[int]:
        depths = [m.depth for _, m in self.components if m.refinable]
        return max(depths) if depths else None

    def at_depth(self, depth: int) -> 'Mixture':
        if not self.refinable:
            return super().at_depth(depth)
        return Mixture(tuple((c, m.at_depth(depth) if m.refinable else m) for c, m in self.components))

    def resolution(self) -> float:
        return max(m.resolution() for _, m in self.components)



# module-level operations

def total_mass(measure: Measure) -> float:
    return measure.total_mass()

def support_hull(measure: Measure) -> Tuple[float, float]:
    return measure.support_hull()

def cantor_refine(measure: CantorApprox, new_depth: int) -> CantorApprox:
    if not isinstance(measure, CantorApprox):
        raise offdiag.exceptions.NotRefinable(f"cantor_refine needs a cantor measure, got {measure.kind}")
    return measure.at_depth(new_depth)
