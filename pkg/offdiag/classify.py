#
# offdiag/classify.py
#
# boundary values F(lambda + i0), the g2 integral and the pointwise spectral
# classification built on them; eigenvalues as roots of the secular function,
# Stieltjes inversion of phi and the eps-scaling exponent.
#

import enum
import math

from dataclasses import dataclass
from typing import (
    Optional,
    Sequence,
    Tuple,
    Union
)

import numpy as np
import scipy.integrate

import offdiag.exceptions
import offdiag.measure
import offdiag.model
import offdiag.util
import offdiag.writer

from offdiag.measure import Measure
from offdiag.model import SpectralModel
from offdiag.schedule import EpsilonSchedule


ROOT_TOL = 1e-12

TOL_ATOMIC = 1e-8
TOL_REFINABLE = 1e-4
CONVERGENCE_ATOMIC = 1e-10
CONVERGENCE_REFINABLE = 1e-6
G2_GROWTH_RATIO = 1.5

SC_BAND = 0.15

_CHUNK = 1 << 21



## helpers

def _nearest_atom(nu: Measure, lam: float) -> Tuple[float, float]:
    """ (distance, weight) of the atom of nu nearest to lam. """
    points, weights = nu.atoms()
    i = np.searchsorted(points, lam)
    candidates = [j for j in (i - 1, i) if 0 <= j < points.size]
    j = min(candidates, key=lambda k: abs(points[k] - lam))
    return abs(float(points[j]) - lam), float(weights[j])


def _atom_weight_at(nu: Measure, lam: float) -> Optional[float]:
    dist, weight = _nearest_atom(nu, lam)
    if dist <= offdiag.measure.MERGE_RTOL * nu.scale(): return weight
    return None


def _real_sums(points: np.ndarray, weights: np.ndarray, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """ G(x) = sum w / (mu - x) and g2(x) = sum w / (mu - x)**2 for real x off the atoms. """
    G = np.empty(x.size)
    g2 = np.empty(x.size)
    block = max(1, _CHUNK // max(1, points.size))
    for start in range(0, x.size, block):
        inv = 1.0 / (points[None, :] - x[start:start + block, None])
        G[start:start + block] = inv @ weights
        g2[start:start + block] = (inv * inv) @ weights
    return G, g2


def default_schedule(nu: Measure) -> EpsilonSchedule:
    lo, hi = nu.support_hull()
    return EpsilonSchedule(scale=offdiag.util.hull_scale(lo, hi))


def _ladder(nu: Measure, schedule) -> np.ndarray:
    if schedule is None: schedule = default_schedule(nu)
    if isinstance(schedule, EpsilonSchedule):
        return schedule.clipped(nu.resolution())
    eps = np.asarray(schedule, dtype=float).ravel()
    if eps.size < 2 or np.any(eps <= 0) or np.any(np.diff(eps) >= 0):
        raise offdiag.exceptions.InvalidConfigValue("eps", "schedule must be positive and strictly decreasing")
    ratios = eps[:-1] / eps[1:]
    if not np.allclose(ratios, ratios[0], rtol=1e-9):
        raise offdiag.exceptions.InvalidConfigValue("eps", "schedule must be geometric")
    return eps



## boundary values

@dataclass(frozen=True, eq=False)
class BoundaryValue:
    """
    F(lam + i eps) on a geometric ladder and its order-2 Richardson limit.
    :attr:`residuals` are tail maxima of successive extrapolant differences,
    hence non-increasing.
    """
    lam: float
    estimate: complex
    eps: np.ndarray
    values: np.ndarray
    residuals: np.ndarray
    converged: bool
    divergence_exponent: Optional[float] = None
    atom_at_lambda: Optional[float] = None


def _divergence_exponent(eps: np.ndarray, values: np.ndarray) -> Optional[float]:
    tail = slice(-min(8, eps.size), None)
    mags = np.abs(values[tail])
    if eps[tail].size < 2 or np.any(mags <= 0): return None
    slope = offdiag.util.loglog_slope(eps[tail], mags).slope
    if not -slope > 1e-3: return None
    return float(min(1.0, -slope))


def boundary_value(nu: Measure, lam: float, schedule=None, rtol: Optional[float] = None) -> BoundaryValue:
    """
    Richardson-extrapolated F(lam + i0). At an atom of nu the sequence blows
    up like w / eps; that case is reported non-converged with
    :attr:`atom_at_lambda` set to the atom weight.
    """
    lam = float(lam)
    if rtol is None:
        rtol = CONVERGENCE_REFINABLE if nu.refinable else CONVERGENCE_ATOMIC
    eps = _ladder(nu, schedule)
    values = offdiag.model.borel_transforms(nu, lam + 1j * eps)

    atom = _atom_weight_at(nu, lam)
    if atom is not None:
        offdiag.writer.warn(f"boundary value requested at an atom of nu: lambda = {lam!r}, weight {atom!r}")
        return BoundaryValue(lam, complex(values[-1]), eps, values, np.array([np.inf]),
                             False, _divergence_exponent(eps, values), atom)

    columns = offdiag.util.richardson_table(eps, values, order=2)
    final = columns[-1]
    estimate = complex(final[-1])
    steps = np.abs(np.diff(final))
    if steps.size == 0:
        residuals = np.array([np.inf])
    else:
        residuals = np.maximum.accumulate(steps[::-1])[::-1]
    converged = bool(residuals[-1] <= rtol * (1 + abs(estimate)))
    exponent = None
    if not converged:
        exponent = _divergence_exponent(eps, values)
        offdiag.writer.debug(f"boundary value at {lam!r} not converged: residual {residuals[-1]:.3e}, "
                             f"exponent {exponent}")
    return BoundaryValue(lam, estimate, eps, values, residuals, converged, exponent)



## g2

@dataclass(frozen=True)
class Divergent:
    """ g2 = infinity, with the partial sums that showed it. """
    lam: float
    depths: Tuple[int, ...]
    sequence: Tuple[float, ...]
    reason: str

    def __float__(self) -> float: return math.inf


def g2_exact(nu: Measure, lam: float) -> float:
    points, weights = nu.atoms()
    if _atom_weight_at(nu, lam) is not None: return math.inf
    return float(np.sum(weights / (points - lam) ** 2))


def g2_sequence(nu: Measure, lam: float, depths: Sequence[int]) -> Tuple[float, ...]:
    return tuple(g2_exact(nu.at_depth(d), lam) for d in depths)


def g2(nu: Measure, lam: float, depths: Optional[Sequence[int]] = None,
       growth_ratio: float = G2_GROWTH_RATIO) -> Union[float, Divergent]:
    """
    int dnu / |mu - lam|^2. Exact for atomic nu; for refinable nu the sum is
    taken at the last three depths (or :attr:`depths`) and declared divergent
    when it grows by more than :attr:`growth_ratio` per refinement.
    """
    lam = float(lam)
    if not nu.refinable:
        value = g2_exact(nu, lam)
        if math.isinf(value): return Divergent(lam, (), (value,), 'atom')
        return value
    if depths is None:
        d = nu.depth
        depths = tuple(range(max(0, d - 2), d + 1))
    depths = tuple(depths)
    seq = g2_sequence(nu, lam, depths)
    if math.isinf(seq[-1]):
        return Divergent(lam, depths, seq, 'atom')
    if offdiag.util.grows_geometrically(seq, growth_ratio, last=3):
        return Divergent(lam, depths, seq, 'growth')
    return seq[-1]



## classification

class Tag(str, enum.Enum):
    PURE_POINT = 'PurePoint'
    SC_CANDIDATE = 'SingularContinuousCandidate'
    ABSOLUTELY_CONTINUOUS = 'AbsolutelyContinuous'
    REGULAR = 'Regular'

    def __str__(self) -> str: return self.value


@dataclass(frozen=True, eq=False)
class Evidence:
    boundary: BoundaryValue
    g2: Union[float, Divergent]
    residual: float
    re_F: float
    im_F: float
    tol: float

    @property
    def g2_finite(self) -> bool:
        return not isinstance(self.g2, Divergent)

    @property
    def root_step(self) -> float:
        """ Newton step |h| / |h'| to the nearest root of h; inf when g2 diverges. """
        if not self.g2_finite: return math.inf
        return self.residual / (1.0 + float(self.g2))


@dataclass(frozen=True, eq=False)
class PointClass:
    lam: float
    tag: Tag
    evidence: Evidence

    @property
    def in_singular_support(self) -> bool:
        return self.tag in (Tag.PURE_POINT, Tag.SC_CANDIDATE)


def default_tolerance(model: SpectralModel) -> float:
    return TOL_REFINABLE if model.nu.refinable else TOL_ATOMIC


def classify_point(model: SpectralModel, lam: float, tol: Optional[float] = None,
                   schedule=None, growth_ratio: float = G2_GROWTH_RATIO,
                   rtol: Optional[float] = None) -> PointClass:
    """
    PurePoint: a1 - lam = Re F(lam + i0), Im F(lam + i0) = 0, g2 finite.
    SingularContinuousCandidate: same equalities, g2 divergent.
    AbsolutelyContinuous: Im F(lam + i0) > tol. Regular otherwise.
    The equality holds when the residual is within tol * max(1, |a1 - lam|)
    or, g2 being finite, when the Newton step residual / (1 + g2) is within
    root accuracy. Next to an atom h' = -1 - g2 is huge, so a lam exact to
    the last bit still leaves a visible residual.
    For atomic nu off its atoms F(lam + i0) is the real sum G(lam), used
    directly instead of the extrapolated boundary value.
    """
    lam = float(lam)
    if tol is None: tol = default_tolerance(model)
    nu = model.nu
    bv = boundary_value(nu, lam, schedule, rtol)
    if bv.atom_at_lambda is not None:
        raise offdiag.exceptions.AtomAtLambda(lam, bv.atom_at_lambda)
    if nu.refinable:
        re_F, im_F = bv.estimate.real, bv.estimate.imag
    else:
        points, weights = nu.atoms()
        re_F, im_F = float(_real_sums(points, weights, np.array([lam]))[0][0]), 0.0
    residual = abs(model.a1 - lam - re_F)
    g = g2(nu, lam, growth_ratio=growth_ratio)
    evidence = Evidence(bv, g, residual, re_F, im_F, tol)
    root_tol = max(ROOT_TOL, 64 * np.spacing(abs(lam)))

    if im_F > tol:
        tag = Tag.ABSOLUTELY_CONTINUOUS
    elif abs(im_F) <= tol and (residual <= tol * max(1.0, abs(model.a1 - lam))
                               or evidence.root_step <= root_tol):
        tag = Tag.PURE_POINT if evidence.g2_finite else Tag.SC_CANDIDATE
    else:
        tag = Tag.REGULAR
    return PointClass(lam, tag, evidence)



## eigenvalues

def secular_function(model: SpectralModel, x) -> np.ndarray:
    """ h(x) = a1 - x - G(x); strictly decreasing between consecutive atoms of nu. """
    points, weights = model.nu.atoms()
    x = np.atleast_1d(np.asarray(x, dtype=float))
    G, _ = _real_sums(points, weights, x)
    return model.a1 - x - G


def spectral_interval(model: SpectralModel) -> Tuple[float, float]:
    """ Closed interval containing the spectrum of B: the hull of m and a1 widened by ||v||. """
    lo, hi = model.hull()
    lo, hi = min(lo, model.a1), max(hi, model.a1)
    pad = model.v_norm + 1e-9 * offdiag.util.hull_scale(lo, hi)
    return lo - pad, hi + pad


def default_min_gap(model: SpectralModel) -> float:
    """ Refinable models: only gaps above the materialization scale are real. """
    nu = model.nu
    if not nu.refinable: return 0.0
    return max(1e-3 * nu.scale(), 8 * nu.resolution())


def find_eigenvalues(model: SpectralModel, interval: Optional[Tuple[float, float]] = None,
                     min_gap: Optional[float] = None) -> np.ndarray:
    """
    Roots of h in the gaps of supp nu within [l, r], one bisection per gap
    down to ROOT_TOL and a single Newton step with h' = -1 - g2. Gaps
    between two atoms narrower than :attr:`min_gap` are skipped.
    """
    points, weights = model.nu.atoms()
    if points.size == 0:
        raise offdiag.exceptions.EmptyModel("nu")
    l, r = spectral_interval(model) if interval is None else (float(interval[0]), float(interval[1]))
    if not (math.isfinite(l) and math.isfinite(r) and l <= r):
        raise offdiag.exceptions.InvalidConfigValue("interval", f"need finite l <= r, got [{l}, {r}]")
    if min_gap is None: min_gap = default_min_gap(model)

    merge = offdiag.measure.MERGE_RTOL * model.nu.scale()
    inside = points[(points > l + merge) & (points < r - merge)]
    l_atom = bool(np.any(np.abs(points - l) <= merge))
    r_atom = bool(np.any(np.abs(points - r) <= merge))
    lo = np.concatenate(([l], inside))
    hi = np.concatenate((inside, [r]))
    lo_atom = np.concatenate(([l_atom], np.ones(inside.size, dtype=bool)))
    hi_atom = np.concatenate((np.ones(inside.size, dtype=bool), [r_atom]))

    with np.errstate(divide='ignore', invalid='ignore'):
        h_ends = secular_function(model, np.array([l, r]))
    hl = np.where(lo_atom, np.inf, 0.0); hl[0] = np.inf if l_atom else h_ends[0]
    hr = np.where(hi_atom, -np.inf, 0.0); hr[-1] = -np.inf if r_atom else h_ends[1]

    exact = [x for x, hx, atom in ((l, h_ends[0], l_atom), (r, h_ends[1], r_atom)) if not atom and hx == 0]
    keep = (hl > 0) & (hr < 0) & (hi > lo)
    keep &= ~(lo_atom & hi_atom & (hi - lo < min_gap))
    a, b = lo[keep].copy(), hi[keep].copy()
    offdiag.writer.debug(f"find_eigenvalues: {a.size} gaps to search in [{l}, {r}]")

    target = np.maximum(ROOT_TOL, 4 * np.spacing(np.maximum(np.abs(a), np.abs(b))))
    active = np.flatnonzero(b - a > target)
    while active.size:
        mid = 0.5 * (a[active] + b[active])
        hm = model.a1 - mid - _real_sums(points, weights, mid)[0]
        a[active] = np.where(hm >= 0, mid, a[active])
        b[active] = np.where(hm <= 0, mid, b[active])
        active = active[b[active] - a[active] > target[active]]

    # one Newton step
    x = 0.5 * (a + b)
    if x.size:
        G, g2x = _real_sums(points, weights, x)
        polished = x + (model.a1 - x - G) / (1 + g2x)
        x = np.where((polished >= a) & (polished <= b), polished, x)
    return np.unique(np.concatenate((x, exact)))



## stieltjes inversion

@dataclass(frozen=True, eq=False)
class StieltjesResult:
    eps: float
    grid: np.ndarray
    density: np.ndarray
    continuous_density: np.ndarray
    atom_points: np.ndarray
    atom_masses: np.ndarray
    continuous_mass: float

    @property
    def atom_mass(self) -> float:
        return float(np.sum(self.atom_masses))

    @property
    def total_mass(self) -> float:
        return self.atom_mass + self.continuous_mass


def atom_mass(model: SpectralModel, lam: float, eps: float) -> float:
    """ lim eps Im phi(lam + i eps), by two-point extrapolation in eps**2. """
    z = lam + 1j * np.array([eps, eps / 2])
    m = z.imag * offdiag.model.phi_values(model, z).imag
    return float((4 * m[1] - m[0]) / 3)


def stieltjes_invert(model: SpectralModel, interval: Tuple[float, float], eps: float,
                     count: int = 4001, atoms: Optional[Sequence[float]] = None) -> StieltjesResult:
    """
    Samples (1/pi) Im phi(lam + i eps) on [l, r]. Atom masses are estimated at
    the eigenvalues in [l, r] (or at :attr:`atoms`); their Lorentzians are
    subtracted before integrating the continuous remainder.
    """
    if not eps > 0:
        raise offdiag.exceptions.InvalidConfigValue("eps", f"need eps > 0, got {eps}")
    l, r = float(interval[0]), float(interval[1])
    if eps < model.nu.resolution():
        offdiag.writer.debug(f"stieltjes_invert: eps {eps:.3e} below measure resolution {model.nu.resolution():.3e}")
    if atoms is None:
        atoms = find_eigenvalues(model, (l, r))
    atom_points = np.asarray(atoms, dtype=float).ravel()
    atom_masses = np.array([atom_mass(model, lam, eps) for lam in atom_points])

    grid = np.linspace(l, r, count)
    density = offdiag.model.phi_values(model, grid + 1j * eps).imag / math.pi
    lorentz = (eps / math.pi) / ((grid[:, None] - atom_points[None, :]) ** 2 + eps ** 2)
    continuous = density - lorentz @ atom_masses
    continuous_mass = float(scipy.integrate.trapezoid(continuous, grid)) if count > 1 else 0.0
    return StieltjesResult(eps, grid, density, continuous, atom_points, atom_masses, continuous_mass)



## eps-scaling exponent

@dataclass(frozen=True, eq=False)
class ScalingReport:
    """ Local-dimension fit of eps Im(.) ~ eps**s. A heuristic, not a certificate. """
    lam: float
    target: str
    eps: np.ndarray
    values: np.ndarray
    fit: offdiag.util.SlopeFit
    band: str
    heuristic: bool = True

    @property
    def exponent(self) -> float: return self.fit.slope


def _band(s: float) -> str:
    if abs(s) <= SC_BAND: return 'pure-point'
    if abs(s - 1) <= SC_BAND: return 'absolutely-continuous'
    return 'singular-continuous-indication'


def sc_probe(model: SpectralModel, lam: float, schedule=None, target: str = 'omega') -> ScalingReport:
    """
    Least-squares slope s of log(eps Im phi(lam + i eps)) (target 'omega') or
    log(eps Im F(lam + i eps)) (target 'nu') against log eps. s near 0 reads
    as an atom, s near 1 as a density, anything else as a singular
    continuous indication.
    """
    lam = float(lam)
    eps = _ladder(model.nu, schedule)
    z = lam + 1j * eps
    if target == 'omega':
        values = eps * offdiag.model.phi_values(model, z).imag
    elif target == 'nu':
        values = eps * offdiag.model.borel_transforms(model.nu, z).imag
    else:
        raise offdiag.exceptions.InvalidConfigValue("target", f"expected 'omega' or 'nu', got '{target}'")
    ok = values > 0
    if ok.sum() < 3:
        raise offdiag.exceptions.EvaluationError(f"sc_probe at {lam!r}: fewer than three positive samples")
    fit = offdiag.util.loglog_slope(eps[ok], values[ok])
    return ScalingReport(lam, target, eps[ok], values[ok], fit, _band(fit.slope))
