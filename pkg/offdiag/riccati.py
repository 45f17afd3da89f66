#
# offdiag/riccati.py
#
# the boundary-value functional X_lambda phi = sum w conj(v) phi / (mu - lambda)
# and the checks around it: the Riccati residual
#     a1 X phi - X(mu phi) - (X v)(X phi) + <v, phi>,
# invariance of the graph {x + Xx} under B, the eigenvector complementing the
# graph, the smallness bound on bounded solutions and the norm trend under
# refinement.
#

import math

from dataclasses import dataclass
from typing import (
    List,
    Optional,
    Sequence,
    Tuple,
    Union
)

import mpmath
import numpy as np

import offdiag.classify
import offdiag.exceptions
import offdiag.measure
import offdiag.util
import offdiag.writer

from offdiag.classify import Divergent, PointClass, Tag
from offdiag.model import SpectralModel
from offdiag.oracle import ArrowheadMatrix


RESIDUAL_TOL = 1e-10
EIGVEC_TOL = 1e-10
ORTHOGONALITY_TOL = 1e-12
RANDOM_VECTORS = 10
BLOWUP_FACTOR = 1.2
STABLE_RTOL = 1e-6



@dataclass(frozen=True)
class Unbounded:
    """ ||X_lambda|| = infinity, with the norm sequence that showed it. """
    lam: float
    depths: Tuple[int, ...]
    sequence: Tuple[float, ...]
    reason: str

    def __float__(self) -> float: return math.inf


def _unbounded(div: Divergent) -> Unbounded:
    return Unbounded(div.lam, div.depths, tuple(math.sqrt(s) for s in div.sequence), div.reason)


def x_lambda_norm(model: SpectralModel, lam: float) -> Union[float, Unbounded]:
    """ sqrt(g2(nu, lam)), or :class:`Unbounded` with the growth diagnostics. """
    g = offdiag.classify.g2(model.nu, lam)
    if isinstance(g, Divergent): return _unbounded(g)
    return math.sqrt(g)



@dataclass(frozen=True, eq=False)
class RiccatiFunctional:
    """
    X_lambda on L2(m) at the current materialization. :attr:`coefficients`
    c_i = conj(v_i) / (mu_i - lambda) act as X phi = sum w_i c_i phi_i; an
    atom of nu at lambda is kept out of the sum and recorded in :attr:`singular`.
    """
    lam: float
    points: np.ndarray
    weights: np.ndarray
    v: np.ndarray
    coefficients: np.ndarray
    norm: Union[float, Unbounded]
    singular: Optional[int] = None
    perturbation: float = 0.0
    depth: Optional[int] = None

    @property
    def bounded(self) -> bool:
        return not isinstance(self.norm, Unbounded)

    @property
    def row(self) -> np.ndarray:
        """ X as a row vector in the orthonormal basis 1_{mu_i} / sqrt(w_i). """
        return np.sqrt(self.weights) * self.coefficients

    def _check_domain(self, phi: np.ndarray):
        if self.singular is not None and phi[self.singular] * self.v[self.singular] != 0:
            raise offdiag.exceptions.AtAtom(self.lam)

    def apply(self, phi) -> complex:
        phi = np.asarray(phi, dtype=complex)
        self._check_domain(phi)
        return complex(np.sum(self.weights * self.coefficients * phi))

    def perturbed(self, delta: float) -> 'RiccatiFunctional':
        """ X + delta V*, a non-solution control for delta != 0. """
        coefficients = self.coefficients + delta * np.conj(self.v)
        norm = float(np.linalg.norm(np.sqrt(self.weights) * coefficients))
        return RiccatiFunctional(self.lam, self.points, self.weights, self.v, coefficients,
                                 norm, self.singular, self.perturbation + delta, self.depth)

    def derivative(self) -> 'RiccatiFunctional':
        """ d X / d lambda, coefficients c_i / (mu_i - lambda); a delta V* term has none. """
        base = self.coefficients - self.perturbation * np.conj(self.v)
        denom = self.points - self.lam
        if self.singular is not None:
            denom = denom.copy()
            denom[self.singular] = np.inf
        with np.errstate(divide='ignore', invalid='ignore'):
            coefficients = np.where(base != 0, base / denom, 0)
        norm = float(np.linalg.norm(np.sqrt(self.weights) * coefficients))
        return RiccatiFunctional(self.lam, self.points, self.weights, self.v, coefficients,
                                 norm, self.singular, 0.0, self.depth)


def x_lambda(model: SpectralModel, lam: float) -> RiccatiFunctional:
    lam = float(lam)
    points, weights, v = model.points, model.weights, model.couplings
    merge = offdiag.measure.MERGE_RTOL * model.scale()
    singular = None
    hits = np.flatnonzero((np.abs(points - lam) <= merge) & (v != 0))
    denom = points - lam
    if hits.size:
        singular = int(hits[0])
        denom = denom.copy()
        denom[singular] = np.inf
    with np.errstate(divide='ignore', invalid='ignore'):
        coefficients = np.where(v != 0, np.conj(v) / denom, 0)
    norm = x_lambda_norm(model, lam) if singular is None else Unbounded(lam, (), (math.inf,), 'atom')
    return RiccatiFunctional(lam, points, weights, v, coefficients, norm, singular, 0.0, model.depth)


def x_lambda_apply(model: SpectralModel, lam: float, phi) -> complex:
    return x_lambda(model, lam).apply(phi)


def x_lambda_regularized(model: SpectralModel, lam: float, phi, eps: float) -> complex:
    """ sum w conj(v) phi / (mu - lam - i eps). """
    phi = np.asarray(phi, dtype=complex)
    return complex(np.sum(model.weights * np.conj(model.couplings) * phi / (model.points - lam - 1j * eps)))



## test vectors

def random_vectors(model: SpectralModel, count: int = RANDOM_VECTORS, seed: int = 0) -> List[np.ndarray]:
    """ :attr:`count` random complex vectors of unit L2(m) norm. """
    rng = np.random.default_rng(seed)
    n = model.points.size
    out = []
    for _ in range(count):
        y = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        y /= np.linalg.norm(y)
        out.append(y / np.sqrt(model.weights))
    return out


def default_test_vectors(model: SpectralModel, count: int = RANDOM_VECTORS, seed: int = 0) -> List[np.ndarray]:
    """ v itself and random unit vectors; the indicator basis is handled in closed form. """
    return [np.asarray(model.couplings, dtype=complex)] + random_vectors(model, count, seed)


def _basis_terms(X: RiccatiFunctional, a1: float):
    """ Riccati terms for every indicator vector 1_{mu_i} at once. """
    if X.singular is not None:
        raise offdiag.exceptions.AtAtom(X.lam)
    w, c, mu = X.weights, X.coefficients, X.points
    Xv = np.sum(w * c * X.v)
    Xphi = w * c
    XmuPhi = w * c * mu
    inner = w * np.conj(X.v)
    return Xphi, XmuPhi, Xv, inner


def _vector_terms(X: RiccatiFunctional, phi: np.ndarray):
    Xphi = X.apply(phi)
    XmuPhi = X.apply(X.points * phi)
    Xv = X.apply(X.v)
    inner = complex(np.sum(X.weights * np.conj(X.v) * phi))
    return Xphi, XmuPhi, Xv, inner


def _residuals(X: RiccatiFunctional, a1: float, basis: bool,
               vectors: Sequence[np.ndarray]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Per test vector: the Riccati residual, the magnitude of its four terms
    and the magnitude of their lambda-derivatives.
    """
    D = X.derivative()
    res, scale, sens = [], [], []
    if basis:
        Xphi, XmuPhi, Xv, inner = _basis_terms(X, a1)
        Dphi, DmuPhi, Dv, _ = _basis_terms(D, a1)
        res.append(np.abs(a1 * Xphi - XmuPhi - Xv * Xphi + inner))
        scale.append(1 + np.abs(a1 * Xphi) + np.abs(XmuPhi) + np.abs(Xv * Xphi) + np.abs(inner))
        sens.append(np.abs(a1 * Dphi) + np.abs(DmuPhi) + abs(Dv) * np.abs(Xphi) + abs(Xv) * np.abs(Dphi))
    for phi in vectors:
        phi = np.asarray(phi, dtype=complex)
        Xphi, XmuPhi, Xv, inner = _vector_terms(X, phi)
        Dphi, DmuPhi, Dv, _ = _vector_terms(D, phi)
        res.append(np.array([abs(a1 * Xphi - XmuPhi - Xv * Xphi + inner)]))
        scale.append(np.array([1 + abs(a1 * Xphi) + abs(XmuPhi) + abs(Xv * Xphi) + abs(inner)]))
        sens.append(np.array([abs(a1 * Dphi) + abs(DmuPhi) + abs(Dv) * abs(Xphi) + abs(Xv) * abs(Dphi)]))
    if not res: return np.zeros(0), np.zeros(0), np.zeros(0)
    return np.concatenate(res), np.concatenate(scale), np.concatenate(sens)


def lambda_uncertainty(model: SpectralModel, lam: float) -> float:
    """
    How far lam may sit from the root of h it stands for: twice the Newton
    step |h| / (1 + g2), at least a few ulps of lam, at most the root
    accuracy of find_eigenvalues. Rounding moves the computed step by about
    eps * |mu - lam|, so it stays reliable right next to an atom.
    """
    floor = 4 * float(np.spacing(abs(lam)))
    with np.errstate(divide='ignore', invalid='ignore'):
        h = float(offdiag.classify.secular_function(model, lam)[0])
        step = abs(h) / (1 + offdiag.classify.g2_exact(model.nu, lam))
    if not math.isfinite(step): return floor
    return max(floor, min(2 * step, offdiag.classify.ROOT_TOL))



## residual and graph invariance

@dataclass(frozen=True, eq=False)
class ResidualReport:
    lam: float
    residuals: np.ndarray
    scales: np.ndarray
    tol: float
    verdict: str
    domain_ok: bool = True
    sensitivities: Optional[np.ndarray] = None
    lam_error: float = 0.0

    @property
    def max_residual(self) -> float:
        return float(self.residuals.max(initial=0.0))

    @property
    def passed(self) -> bool: return self.verdict == 'solution'


@dataclass(frozen=True, eq=False)
class DefectReport:
    lam: float
    defects: np.ndarray
    tol: float
    verdict: str

    @property
    def max_defect(self) -> float:
        return float(self.defects.max(initial=0.0))

    @property
    def passed(self) -> bool: return self.verdict == 'solution'


def _candidate(model: SpectralModel, lam: float, classification: Optional[PointClass],
               strict: bool) -> bool:
    if classification is None:
        classification = offdiag.classify.classify_point(model, lam)
    if classification.in_singular_support: return True
    if strict:
        raise offdiag.exceptions.NotInSupport(lam, str(classification.tag))
    return False


def _verdict(within: np.ndarray, candidate: bool) -> str:
    if not candidate: return 'not-a-candidate'
    return 'solution' if bool(np.all(within)) else 'not-a-solution'


def riccati_residual(model: SpectralModel, lam: float, vectors: Optional[Sequence[np.ndarray]] = None,
                     basis: bool = True, tol: float = RESIDUAL_TOL,
                     functional: Optional[RiccatiFunctional] = None,
                     classification: Optional[PointClass] = None, strict: bool = False,
                     seed: int = 0) -> ResidualReport:
    """
    |a1 X phi - X(mu phi) - (X v)(X phi) + <v, phi>| for the indicator basis
    (if :attr:`basis`) and :attr:`vectors` (default: v and random vectors).
    A residual passes when it is below tol times one plus the sum of the
    magnitudes of the four terms, plus what the rounding error of lam
    (:func:`lambda_uncertainty`) moves them by. Next to an atom of nu the
    coefficients go like 1 / (mu - lam) and the second part dominates.
    """
    lam = float(lam)
    X = functional if functional is not None else x_lambda(model, lam)
    if vectors is None: vectors = default_test_vectors(model, seed=seed)
    candidate = _candidate(model, lam, classification, strict)
    residuals, scales, sens = _residuals(X, model.a1, basis, vectors)
    lam_error = lambda_uncertainty(model, lam)
    # (A0 + V X) phi must stay in Dom(X); at finite depth that is finiteness of X on it
    domain_ok = X.singular is None and bool(np.all(np.isfinite(X.coefficients)))
    verdict = _verdict(residuals <= tol * scales + lam_error * sens, candidate)
    return ResidualReport(lam, residuals, scales, tol, verdict, domain_ok, sens, lam_error)


def graph_invariance_defect(model: SpectralModel, lam: float, vectors: Optional[Sequence[np.ndarray]] = None,
                            basis: bool = True, tol: float = RESIDUAL_TOL,
                            functional: Optional[RiccatiFunctional] = None,
                            classification: Optional[PointClass] = None, strict: bool = False,
                            seed: int = 0) -> DefectReport:
    """
    For u = x + Xx, the distance of Bu from the graph relative to ||Bu||:
    |(Bu)_1 - X (Bu)_0| / ||Bu||. B is applied as the arrowhead matvec. The
    verdict uses the same allowance as :func:`riccati_residual`.
    """
    lam = float(lam)
    X = functional if functional is not None else x_lambda(model, lam)
    if vectors is None: vectors = default_test_vectors(model, seed=seed)
    candidate = _candidate(model, lam, classification, strict)
    B = ArrowheadMatrix(model.points, model.weights, model.couplings, model.a1)
    sqrt_w = np.sqrt(model.weights)
    numers, norms = [], []

    if basis:
        Xphi, XmuPhi, Xv, inner = _basis_terms(X, model.a1)
        numers.append(np.abs(inner + model.a1 * Xphi - XmuPhi - Xv * Xphi))
        # ||B(1_i + X 1_i)||^2 in closed form
        w, mu, v = model.weights, model.points, model.couplings
        top = np.abs(Xphi) ** 2 * model.v_norm_sq + 2 * w * mu * np.real(v * Xphi) + w * mu ** 2
        bottom = np.abs(inner + model.a1 * Xphi) ** 2
        norms.append(np.sqrt(np.maximum(top, 0) + bottom))

    for phi in vectors:
        phi = np.asarray(phi, dtype=complex)
        Bu = B.matvec(np.concatenate((sqrt_w * phi, [X.apply(phi)])))
        numers.append(np.array([abs(Bu[-1] - X.apply(Bu[:-1] / sqrt_w))]))
        norms.append(np.array([np.linalg.norm(Bu)]))

    if not numers:
        return DefectReport(lam, np.zeros(0), tol, _verdict(np.zeros(0, dtype=bool), candidate))
    numers, norms = np.concatenate(numers), np.concatenate(norms)
    _, scales, sens = _residuals(X, model.a1, basis, vectors)
    within = numers <= tol * scales + lambda_uncertainty(model, lam) * sens
    with np.errstate(divide='ignore', invalid='ignore'):
        defects = np.where(norms > 0, numers / norms, 0.0)
    return DefectReport(lam, defects, tol, _verdict(within, candidate))



## complementary eigenvector

@dataclass(frozen=True, eq=False)
class ComplementaryEigenvector:
    """ u = (-X* 1) + 1 in orthonormal coordinates, unit norm, last entry > 0. """
    lam: float
    vector: np.ndarray
    residual: float
    orthogonality: float
    tol: float = EIGVEC_TOL
    # rounding of lam shows up in the residual as sqrt(1 + g2) times its size
    lam_allowance: float = 0.0

    @property
    def passed(self) -> bool:
        return self.residual <= self.tol + self.lam_allowance and self.orthogonality <= ORTHOGONALITY_TOL


def complementary_eigenvector(model: SpectralModel, lam: float,
                              classification: Optional[PointClass] = None,
                              functional: Optional[RiccatiFunctional] = None) -> ComplementaryEigenvector:
    """
    Eigenvector of B at a pure point lam spanning the orthogonal complement
    of the graph of X_lambda: u_i = v_i / (lam - mu_i) on L2(m), 1 on C.
    :attr:`residual` is ||Bu - lam u|| / ||u||, :attr:`orthogonality` the
    largest |<u, 1_i + X 1_i>| over the indicator basis.
    """
    lam = float(lam)
    if classification is None:
        classification = offdiag.classify.classify_point(model, lam)
    if classification.tag != Tag.PURE_POINT:
        raise offdiag.exceptions.NotPurePoint(lam, str(classification.tag))
    X = functional if functional is not None else x_lambda(model, lam)
    v = model.couplings
    u0 = -np.conj(X.coefficients - X.perturbation * np.conj(v))
    y = np.concatenate((np.sqrt(model.weights) * u0, [1.0]))
    y /= np.linalg.norm(y)

    B = ArrowheadMatrix(model.points, model.weights, v, model.a1)
    residual = float(np.linalg.norm(B.matvec(y) - lam * y))
    # <u, 1_i + X 1_i> = w_i conj(u0_i) + w_i c_i, up to the normalization of y
    scale = y[-1]
    ortho = np.abs(model.weights * (np.conj(u0) + X.coefficients)) * abs(scale)
    orthogonality = float(ortho.max(initial=0.0))
    offdiag.writer.debug(f"complementary eigenvector at {lam!r}: residual {residual:.2e}, "
                         f"orthogonality {orthogonality:.2e}")
    allowance = lambda_uncertainty(model, lam) * math.sqrt(1.0 + float(np.linalg.norm(X.row)) ** 2)
    return ComplementaryEigenvector(lam, y, residual, orthogonality, EIGVEC_TOL, allowance)



## smallness bound

def kmm_constant() -> float:
    """ c_pi = (3 pi - sqrt(pi^2 + 32)) / (pi^2 - 4). """
    return (3 * math.pi - math.sqrt(math.pi ** 2 + 32)) / (math.pi ** 2 - 4)


@dataclass(frozen=True)
class KMMBound:
    applicable: bool
    c_pi: float
    delta_V: float
    bound: float


def _check_gap(d: float, v_norm: float):
    if not d > 0:
        raise offdiag.exceptions.RiccatiError(f"spectral gap d must be positive, got {d}")
    if not v_norm >= 0:
        raise offdiag.exceptions.RiccatiError(f"||V|| must be non-negative, got {v_norm}")


def kmm_bound(d: float, v_norm: float) -> KMMBound:
    """
    For ||V|| < c_pi d the bounded solution X satisfies
    ||X|| / sqrt(1 + ||X||^2) <= (pi / 2) ||V|| / (d - delta_V),
    delta_V = ||V|| tan(arctan(2 ||V|| / d) / 2).
    """
    _check_gap(d, v_norm)
    c_pi = kmm_constant()
    if v_norm >= c_pi * d:
        raise offdiag.exceptions.NotApplicable(v_norm, c_pi * d)
    delta_V = v_norm * math.tan(0.5 * math.atan(2 * v_norm / d))
    bound = (math.pi / 2) * v_norm / (d - delta_V)
    if not bound < 1:
        offdiag.writer.warn(f"kmm bound {bound!r} is not below 1 at d = {d}, ||V|| = {v_norm}")
    return KMMBound(True, c_pi, delta_V, bound)


def kmm_bound_mp(d: float, v_norm: float, dps: int = 50) -> KMMBound:
    """ :func:`kmm_bound` evaluated in mpmath at :attr:`dps` digits. """
    _check_gap(d, v_norm)
    with mpmath.workdps(dps):
        pi = mpmath.pi
        c_pi = (3 * pi - mpmath.sqrt(pi ** 2 + 32)) / (pi ** 2 - 4)
        d_mp, v_mp = mpmath.mpf(d), mpmath.mpf(v_norm)
        if v_mp >= c_pi * d_mp:
            raise offdiag.exceptions.NotApplicable(v_norm, float(c_pi * d_mp))
        delta_V = v_mp * mpmath.tan(mpmath.atan(2 * v_mp / d_mp) / 2)
        bound = (pi / 2) * v_mp / (d_mp - delta_V)
        return KMMBound(True, float(c_pi), float(delta_V), float(bound))


@dataclass(frozen=True, eq=False)
class KMMCheck:
    d: float
    v_norm: float
    bound: KMMBound
    ratios: np.ndarray
    eigenvalues: np.ndarray

    @property
    def min_ratio(self) -> float:
        return float(self.ratios.min(initial=math.inf))

    @property
    def passed(self) -> bool:
        return self.min_ratio <= self.bound.bound


def spectral_gap(model: SpectralModel) -> float:
    """ dist(a1, supp m) over the atoms of m. """
    return float(np.min(np.abs(model.points - model.a1)))


def kmm_check(model: SpectralModel, d: Optional[float] = None) -> KMMCheck:
    """
    Compares the bound with min over bounded solutions X_lambda (one per
    eigenvalue) of ||X|| / sqrt(1 + ||X||^2) = sqrt(g2 / (1 + g2)).
    """
    if d is None: d = spectral_gap(model)
    bound = kmm_bound(d, model.v_norm)
    eigenvalues = offdiag.classify.find_eigenvalues(model)
    ratios = []
    for lam in eigenvalues:
        g = offdiag.classify.g2(model.nu, lam)
        ratios.append(1.0 if isinstance(g, Divergent) else math.sqrt(g / (1 + g)))
    check = KMMCheck(d, model.v_norm, bound, np.array(ratios), eigenvalues)
    offdiag.writer.debug(f"kmm check: d = {d}, ||V|| = {model.v_norm:.6g}, "
                         f"min ratio {check.min_ratio:.6g} vs bound {bound.bound:.6g}")
    return check



## refinement

@dataclass(frozen=True, eq=False)
class BlowupReport:
    lam: float
    depths: Tuple[int, ...]
    norms: Tuple[float, ...]
    lambdas: Tuple[float, ...]
    verdict: str

    @property
    def relative_drift(self) -> float:
        if len(self.norms) < 2: return 0.0
        a, b = self.norms[-2], self.norms[-1]
        return abs(b - a) / max(abs(b), 1e-300)

    @property
    def eigenvalue_drift(self) -> float:
        if len(self.lambdas) < 2: return 0.0
        a, b = self.lambdas[-2], self.lambdas[-1]
        return abs(b - a) / max(abs(b), 1e-300)


def track_eigenvalue(model: SpectralModel, lam: float) -> float:
    """ The root of the secular function in the gap of supp nu that contains lam. """
    points = model.nu.atoms()[0]
    i = int(np.searchsorted(points, lam))
    lo, hi = offdiag.classify.spectral_interval(model)
    left = float(points[i - 1]) if i > 0 else lo
    right = float(points[i]) if i < points.size else hi
    roots = offdiag.classify.find_eigenvalues(model, (left, right), min_gap=0.0)
    if roots.size == 0:
        raise offdiag.exceptions.NotPurePoint(lam, "no eigenvalue in its gap")
    return float(roots[np.argmin(np.abs(roots - lam))])


def refinement_blowup(model: SpectralModel, lam: float, depths: Sequence[int],
                      factor: float = BLOWUP_FACTOR, stable_rtol: float = STABLE_RTOL,
                      track: bool = False) -> BlowupReport:
    """
    ||X_lambda|| at each refinement depth. Verdict 'non-closable-indication'
    when the norms rise by :attr:`factor` per step over the last three depths,
    'stable' when the last relative change is below :attr:`stable_rtol`,
    'inconclusive' otherwise. With :attr:`track` the eigenvalue in lam's gap
    is re-found at every depth.
    """
    lam = float(lam)
    depths = tuple(depths)
    norms, lambdas = [], []
    for d in depths:
        md = model.at_depth(d) if model.refinable else model
        ld = track_eigenvalue(md, lam) if track else lam
        g = offdiag.classify.g2_exact(md.nu, ld)
        norms.append(math.sqrt(g))
        lambdas.append(ld)
    if offdiag.util.grows_geometrically(norms, factor, last=3):
        verdict = 'non-closable-indication'
    elif len(norms) < 2 or abs(norms[-1] - norms[-2]) <= stable_rtol * abs(norms[-1]):
        verdict = 'stable'
    else:
        verdict = 'inconclusive'
    offdiag.writer.info(f"refinement at {lam!r} over depths {depths[0]}..{depths[-1]}: {verdict}")
    return BlowupReport(lam, depths, tuple(norms), tuple(lambdas), verdict)



## injectivity and isolation

@dataclass(frozen=True)
class Separation:
    max_difference: float
    margin: float

    @property
    def distinct(self) -> bool: return self.max_difference > self.margin


def coefficient_separation(model: SpectralModel, lam1: float, lam2: float) -> Separation:
    """ Largest entrywise gap between the coefficients of X_lam1 and X_lam2. """
    c1 = x_lambda(model, lam1).coefficients
    c2 = x_lambda(model, lam2).coefficients
    diff = float(np.abs(c1 - c2).max())
    margin = float(8 * np.spacing(max(np.abs(c1).max(), np.abs(c2).max())))
    return Separation(diff, margin)


def isolation_radius(model: SpectralModel, lam: float,
                     eigenvalues: Optional[Sequence[float]] = None) -> float:
    """ min over other eigenvalues lam' of ||X_lam - X_lam'||. """
    if eigenvalues is None:
        eigenvalues = offdiag.classify.find_eigenvalues(model)
    row = x_lambda(model, lam).row
    scale = offdiag.measure.MERGE_RTOL * model.scale()
    radius = math.inf
    for other in eigenvalues:
        if abs(other - lam) <= scale: continue
        radius = min(radius, float(np.linalg.norm(row - x_lambda(model, other).row)))
    return radius



## certificate

@dataclass(frozen=True, eq=False)
class GraphCertificate:
    lam: float
    tag: Tag
    norm: Union[float, Unbounded]
    residual: ResidualReport
    defect: DefectReport
    eigvec: Optional[ComplementaryEigenvector]
    isolation: Optional[float]
    verdict: str
    warning: Optional[str] = None
    blowup: Optional[BlowupReport] = None

    @property
    def passed(self) -> bool:
        return self.verdict in ('solution', 'indication')


def certify(model: SpectralModel, lam: float, tol: float = RESIDUAL_TOL, fault: float = 0.0,
            count: int = RANDOM_VECTORS, seed: int = 0,
            eigenvalues: Optional[Sequence[float]] = None,
            depths: Optional[Sequence[int]] = None,
            classification: Optional[PointClass] = None,
            factor: float = BLOWUP_FACTOR, stable_rtol: float = STABLE_RTOL) -> GraphCertificate:
    """
    Residual, graph invariance, complementary eigenvector and isolation at
    lam. :attr:`fault` perturbs X_lambda by fault * V* before checking.
    Singular continuous candidates get an indication verdict and, with
    :attr:`depths`, the refinement trend.
    """
    lam = float(lam)
    pc = classification if classification is not None else offdiag.classify.classify_point(model, lam)
    X = x_lambda(model, lam)
    if fault: X = X.perturbed(fault)
    vectors = default_test_vectors(model, count, seed)
    residual = riccati_residual(model, lam, vectors, tol=tol, functional=X, classification=pc)
    defect = graph_invariance_defect(model, lam, vectors, tol=tol, functional=X, classification=pc)

    eigvec, isolation, warning, blowup = None, None, None, None
    if pc.tag == Tag.PURE_POINT:
        eigvec = complementary_eigenvector(model, lam, pc, X)
        if not model.nu.refinable:
            isolation = isolation_radius(model, lam, eigenvalues)
        ok = residual.passed and defect.passed and eigvec.passed
        verdict = 'solution' if ok else 'not-a-solution'
    elif pc.tag == Tag.SC_CANDIDATE:
        verdict = 'indication'
        warning = "singular continuous candidate: residuals hold at finite depth only"
        if depths is not None and model.refinable:
            blowup = refinement_blowup(model, lam, depths, factor, stable_rtol)
            warning += f"; norm under refinement: {blowup.verdict}"
    else:
        verdict = 'not-a-candidate'
    return GraphCertificate(lam, pc.tag, X.norm, residual, defect, eigvec, isolation, verdict, warning, blowup)
