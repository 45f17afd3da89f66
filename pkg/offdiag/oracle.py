#
# offdiag/oracle.py
#
# dense ground truth: B materialized as a Hermitian arrowhead matrix and
# solved with LAPACK. everything here is computed straight from definitions
# and is only used to check the transform-based code paths.
#

import math

from dataclasses import dataclass
from typing import (
    Optional,
    Tuple
)

import numpy as np
import scipy.linalg

import offdiag.exceptions
import offdiag.measure
import offdiag.writer

from offdiag.model import SpectralModel, Coupling


DEFAULT_MAX_ATOMS = 5000

RESIDUAL_RTOL = 1e-12
OVERLAP_THRESHOLD = 1e-12



@dataclass(frozen=True, eq=False)
class ArrowheadMatrix:
    """
    B = [[diag(mu), c], [c^H, a1]] with c_i = sqrt(w_i) v_i, the matrix of B
    in the orthonormal basis {1_{mu_i} / sqrt(w_i)} + {1}. Weights and
    couplings are kept so the model can be rebuilt bit for bit.
    """
    diagonal: np.ndarray
    weights: np.ndarray
    v: np.ndarray
    corner: float

    def __post_init__(self):
        for name, dtype in (('diagonal', float), ('weights', float), ('v', complex)):
            arr = np.array(getattr(self, name), dtype=dtype).ravel()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not self.diagonal.shape == self.weights.shape == self.v.shape:
            raise offdiag.exceptions.OracleFailure("diagonal, weights and couplings differ in length")
        object.__setattr__(self, 'corner', float(self.corner))

    @property
    def n(self) -> int: return self.diagonal.size

    @property
    def dimension(self) -> int: return self.n + 1

    @property
    def coupling(self) -> np.ndarray:
        return np.sqrt(self.weights) * self.v

    @property
    def is_real(self) -> bool:
        return not np.any(self.v.imag)

    def dense(self) -> np.ndarray:
        dtype = float if self.is_real else complex
        c = self.coupling.real if self.is_real else self.coupling
        out = np.zeros((self.dimension, self.dimension), dtype=dtype)
        out[np.arange(self.n), np.arange(self.n)] = self.diagonal
        out[:self.n, self.n] = c
        out[self.n, :self.n] = np.conj(c)
        out[self.n, self.n] = self.corner
        return out

    def matvec(self, y: np.ndarray) -> np.ndarray:
        """ B y in O(n). """
        y = np.asarray(y)
        c = self.coupling
        out = np.empty(self.dimension, dtype=complex)
        out[:self.n] = self.diagonal * y[:self.n] + c * y[self.n]
        out[self.n] = np.vdot(c, y[:self.n]) + self.corner * y[self.n]
        return out

    def frobenius_norm(self) -> float:
        c2 = np.sum(np.abs(self.coupling) ** 2)
        return math.sqrt(np.sum(self.diagonal ** 2) + 2 * c2 + self.corner ** 2)

    def nu(self) -> offdiag.measure.AtomicMeasure:
        w = self.weights * np.abs(self.v) ** 2
        keep = w > 0
        return offdiag.measure.AtomicMeasure(self.diagonal[keep], w[keep])

    def to_model(self) -> SpectralModel:
        m = offdiag.measure.AtomicMeasure(self.diagonal, self.weights)
        return SpectralModel(m, Coupling(samples=self.v), self.corner)



@dataclass(frozen=True, eq=False)
class EigenSystem:
    """ Ascending eigenvalues, eigenvectors as columns, residual norms. """
    eigenvalues: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray

    @property
    def h1_components(self) -> np.ndarray:
        return self.vectors[-1, :]

    def __len__(self) -> int:
        return self.eigenvalues.size



def build_arrowhead(model: SpectralModel, max_atoms: int = DEFAULT_MAX_ATOMS) -> ArrowheadMatrix:
    n = model.points.size
    if n == 0:
        raise offdiag.exceptions.EmptyModel("m")
    if n > max_atoms:
        raise offdiag.exceptions.OracleTooLarge(n, max_atoms)
    return ArrowheadMatrix(model.points, model.weights, model.couplings, model.a1)


def _as_dense(matrix) -> Tuple[np.ndarray, float]:
    if isinstance(matrix, ArrowheadMatrix):
        return matrix.dense(), matrix.frobenius_norm()
    dense = np.asarray(matrix)
    if dense.ndim != 2 or dense.shape[0] != dense.shape[1]:
        raise offdiag.exceptions.OracleFailure(f"expected a square matrix, got shape {dense.shape}")
    if not np.allclose(dense, dense.conj().T, rtol=0, atol=1e-14 * max(1.0, np.abs(dense).max(initial=0))):
        raise offdiag.exceptions.OracleFailure("matrix is not Hermitian")
    return dense, float(np.linalg.norm(dense))


def _fix_phase(vectors: np.ndarray) -> np.ndarray:
    """ Rotates each column so its last entry is real >= 0 (largest entry if the last one vanishes). """
    last = vectors[-1, :]
    pivot = np.where(np.abs(last) > OVERLAP_THRESHOLD, vectors.shape[0] - 1,
                     np.argmax(np.abs(vectors), axis=0))
    entries = vectors[pivot, np.arange(vectors.shape[1])]
    phase = entries / np.abs(entries)
    return vectors * np.conj(phase)[None, :]


def dense_eig(matrix) -> EigenSystem:
    """ Full eigensystem of a Hermitian matrix (an :class:`ArrowheadMatrix` or an array). """
    dense, norm = _as_dense(matrix)
    try:
        eigenvalues, vectors = scipy.linalg.eigh(dense)
    except (scipy.linalg.LinAlgError, ValueError) as e:
        raise offdiag.exceptions.OracleFailure("dense eigensolve failed", e)
    vectors = _fix_phase(vectors)
    residuals = np.linalg.norm(dense @ vectors - vectors * eigenvalues[None, :], axis=0)
    tol = RESIDUAL_RTOL * max(norm, 1.0)
    if residuals.size and residuals.max() > tol:
        raise offdiag.exceptions.OracleFailure(
            f"eigen-residual {residuals.max():.3e} exceeds {tol:.3e}")
    dim = dense.shape[0]
    gram = vectors.conj().T @ vectors
    unitarity = np.abs(gram - np.eye(dim)).max(initial=0)
    if unitarity > RESIDUAL_RTOL * max(1.0, math.sqrt(dim)):
        raise offdiag.exceptions.OracleFailure(f"eigenvectors not orthonormal (defect {unitarity:.3e})")
    offdiag.writer.debug(f"dense_eig: n = {dim}, max residual {residuals.max(initial=0):.2e}, "
                         f"unitarity defect {unitarity:.2e}")
    for arr in (eigenvalues, vectors, residuals): arr.setflags(write=False)
    return EigenSystem(eigenvalues, vectors, residuals)



@dataclass(frozen=True, eq=False)
class OracleMeasure:
    """ The finite-scale measure omega = tr Omega: one atom per eigenvalue of B. """
    points: np.ndarray
    masses: np.ndarray

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.masses))

    def stieltjes(self, z: complex) -> complex:
        return complex(np.sum(self.masses / (self.points - z)))


def _omega_masses(matrix: ArrowheadMatrix, system: EigenSystem) -> np.ndarray:
    top = system.vectors[:matrix.n, :]
    overlap = top.conj().T @ matrix.coupling
    return np.abs(overlap) ** 2 + np.abs(system.h1_components) ** 2


def oracle_spectral_measure(model: SpectralModel, max_atoms: int = DEFAULT_MAX_ATOMS) -> OracleMeasure:
    """ mass_k = |<u_k, c + 0>|^2 + |<u_k, 0 + 1>|^2 over the eigenpairs of B. """
    matrix = build_arrowhead(model, max_atoms)
    system = dense_eig(matrix)
    return OracleMeasure(system.eigenvalues, _omega_masses(matrix, system))


def _embedding(matrix: ArrowheadMatrix) -> np.ndarray:
    """ The (n+1) x 2 map (x, y) -> x c + y e_n. """
    D = np.zeros((matrix.dimension, 2), dtype=complex)
    D[:matrix.n, 0] = matrix.coupling
    D[matrix.n, 1] = 1.0
    return D


def oracle_m_matrix(model: SpectralModel, z: complex, max_atoms: int = DEFAULT_MAX_ATOMS) -> np.ndarray:
    """ D^H (B - z)^-1 D by a direct linear solve. """
    z = complex(z)
    if z.imag == 0:
        raise offdiag.exceptions.OffAxisRequired(z)
    matrix = build_arrowhead(model, max_atoms)
    D = _embedding(matrix)
    shifted = matrix.dense().astype(complex) - z * np.eye(matrix.dimension)
    try:
        X = scipy.linalg.solve(shifted, D)
    except (scipy.linalg.LinAlgError, ValueError) as e:
        raise offdiag.exceptions.OracleFailure(f"resolvent solve failed at z = {z}", e)
    return D.conj().T @ X


def resolvent_via_eig(system: EigenSystem, z: complex) -> np.ndarray:
    """ (B - z)^-1 = U diag(1 / (lambda_k - z)) U^H. """
    U = system.vectors
    return (U * (1.0 / (system.eigenvalues - complex(z)))[None, :]) @ U.conj().T


def oracle_window_mass(model: SpectralModel, lo: float, hi: float,
                       max_atoms: int = DEFAULT_MAX_ATOMS) -> Tuple[float, float]:
    """ (omega([lo, hi]), <0 + 1, E_B([lo, hi]) 0 + 1>). """
    matrix = build_arrowhead(model, max_atoms)
    system = dense_eig(matrix)
    inside = (system.eigenvalues >= lo) & (system.eigenvalues <= hi)
    omega = _omega_masses(matrix, system)[inside].sum()
    h1 = (np.abs(system.h1_components[inside]) ** 2).sum()
    return float(omega), float(h1)



@dataclass(frozen=True)
class CyclicityReport:
    cyclic: bool
    min_eigen_gap: float
    min_overlap: float
    krylov_rank: int
    dimension: int


def krylov_rank(matrix: ArrowheadMatrix, tol: float = 1e-10, start: Optional[np.ndarray] = None) -> int:
    """
    Dimension of the Krylov space of B generated by :attr:`start` (default
    0 + 1), by Lanczos with full re-orthogonalization. A new direction counts
    while its norm after orthogonalization exceeds :attr:`tol` * ||B||_F.
    """
    if start is None:
        start = np.zeros(matrix.dimension, dtype=complex)
        start[-1] = 1.0
    floor = tol * max(matrix.frobenius_norm(), 1.0)
    q = np.asarray(start, dtype=complex) / np.linalg.norm(start)
    basis = [q]
    while len(basis) < matrix.dimension:
        w = matrix.matvec(basis[-1])
        Q = np.array(basis).T
        norm_orig = np.linalg.norm(w)
        w = w - Q @ (Q.conj().T @ w)
        # second pass if cancellation was severe
        if np.linalg.norm(w) < norm_orig / 10:
            w = w - Q @ (Q.conj().T @ w)
        norm = np.linalg.norm(w)
        if norm <= floor: break
        basis.append(w / norm)
    return len(basis)


def cyclicity_check(model: SpectralModel, max_atoms: int = DEFAULT_MAX_ATOMS,
                    threshold: float = OVERLAP_THRESHOLD) -> CyclicityReport:
    """ 0 + 1 is cyclic for B iff the spectrum is simple and every eigenvector overlaps it. """
    matrix = build_arrowhead(model, max_atoms)
    system = dense_eig(matrix)
    gaps = np.diff(system.eigenvalues)
    min_gap = float(gaps.min()) if gaps.size else math.inf
    min_overlap = float(np.abs(system.h1_components).min())
    simple = min_gap > threshold * max(matrix.frobenius_norm(), 1.0)
    rank = krylov_rank(matrix)
    cyclic = bool(simple and min_overlap > threshold)
    if cyclic != (rank == matrix.dimension):
        offdiag.writer.warn(f"cyclicity: eigenvector test says {cyclic}, "
                            f"Krylov rank {rank} of {matrix.dimension}")
    return CyclicityReport(cyclic, min_gap, min_overlap, rank, matrix.dimension)



def oracle_spectrum(model: SpectralModel, max_atoms: int = DEFAULT_MAX_ATOMS) -> np.ndarray:
    """
    Eigenvalues of B that carry omega-mass. Atoms of m with v = 0 split off
    as eigenvectors of B orthogonal to c + 0 and 0 + 1, so they are dropped
    before the eigensolve.
    """
    coupled = model.couplings != 0
    if model.points.size > max_atoms:
        raise offdiag.exceptions.OracleTooLarge(model.points.size, max_atoms)
    matrix = ArrowheadMatrix(model.points[coupled], model.weights[coupled],
                             model.couplings[coupled], model.a1)
    return dense_eig(matrix).eigenvalues
