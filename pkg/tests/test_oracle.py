import math

import numpy as np
import pytest

import offdiag.classify
import offdiag.exceptions
import offdiag.oracle
import offdiag.util

from offdiag.model import SpectralModel
from offdiag.oracle import ArrowheadMatrix


def test_single_atom_matrix(single_atom):
    B = offdiag.oracle.build_arrowhead(single_atom)
    assert B.n == 1 and B.dimension == 2 and B.is_real
    assert B.dense().tolist() == [[0.0, 1.0], [1.0, 0.0]]
    assert B.frobenius_norm() == pytest.approx(math.sqrt(2))


def test_single_atom_eigensystem(single_atom):
    system = offdiag.oracle.dense_eig(offdiag.oracle.build_arrowhead(single_atom))
    assert system.eigenvalues == pytest.approx([-1.0, 1.0], abs=1e-15)
    # last entries real and non-negative
    assert np.all(system.h1_components.real >= 0)
    assert np.all(system.h1_components.imag == 0)
    assert np.abs(system.vectors[:, 0]) == pytest.approx([1 / math.sqrt(2)] * 2)
    assert system.residuals.max() <= 1e-14


def test_dense_eig_rejects_non_hermitian():
    with pytest.raises(offdiag.exceptions.OracleFailure):
        offdiag.oracle.dense_eig(np.array([[0.0, 1.0], [2.0, 0.0]]))
    with pytest.raises(offdiag.exceptions.OracleFailure):
        offdiag.oracle.dense_eig(np.zeros((2, 3)))


def test_two_atom_spectral_measure(two_atom):
    omega = offdiag.oracle.oracle_spectral_measure(two_atom)
    r2 = math.sqrt(2)
    assert omega.points == pytest.approx([-r2, 0.0, r2], abs=1e-12)
    assert omega.total_mass == pytest.approx(2.0, abs=1e-12)
    assert omega.total_mass == pytest.approx(two_atom.v_norm_sq + 1, abs=1e-12)


def test_omega_stieltjes_is_trace_of_m(random_model):
    rng = np.random.default_rng(3)
    for seed in range(20):
        model = random_model(500 + seed, n_max=40)
        z = complex(rng.uniform(-6, 6), rng.uniform(0.1, 2))
        omega = offdiag.oracle.oracle_spectral_measure(model)
        assert omega.stieltjes(z) == pytest.approx(np.trace(offdiag.oracle.oracle_m_matrix(model, z)), rel=1e-9)


def test_oracle_cap(two_atom):
    with pytest.raises(offdiag.exceptions.OracleTooLarge):
        offdiag.oracle.build_arrowhead(two_atom, max_atoms=1)
    with pytest.raises(offdiag.exceptions.OracleTooLarge):
        offdiag.oracle.oracle_spectrum(two_atom, max_atoms=1)


def test_matvec_matches_dense(random_model):
    rng = np.random.default_rng(4)
    model = random_model(42)
    B = offdiag.oracle.build_arrowhead(model)
    y = rng.standard_normal(B.dimension) + 1j * rng.standard_normal(B.dimension)
    assert B.matvec(y) == pytest.approx(B.dense() @ y, rel=1e-12, abs=1e-12)


def test_arrowhead_round_trip(random_model):
    model = random_model(43)
    back = offdiag.oracle.build_arrowhead(model).to_model()
    assert back.points.tolist() == model.points.tolist()
    assert back.couplings.tolist() == model.couplings.tolist()
    assert back.a1 == model.a1


def test_resolvent_via_eig(random_model):
    model = random_model(44, n_max=30)
    B = offdiag.oracle.build_arrowhead(model)
    system = offdiag.oracle.dense_eig(B)
    z = 0.3 + 0.7j
    R = offdiag.oracle.resolvent_via_eig(system, z)
    direct = np.linalg.inv(B.dense() - z * np.eye(B.dimension))
    assert np.abs(R - direct).max() <= 1e-10 * np.abs(direct).max()


def test_window_mass(two_atom):
    omega, h1 = offdiag.oracle.oracle_window_mass(two_atom, -2.0, 2.0)
    assert omega == pytest.approx(2.0, abs=1e-12)
    assert h1 == pytest.approx(1.0, abs=1e-12)
    omega, h1 = offdiag.oracle.oracle_window_mass(two_atom, -0.5, 0.5)
    # the eigenvector at 0 is (c, -c, 1) / sqrt(2), c = 1 / sqrt(2), orthogonal to c + 0
    assert h1 == pytest.approx(0.5, abs=1e-12)
    assert omega == pytest.approx(0.5, abs=1e-12)


def test_cyclicity(single_atom, two_atom):
    for model in (single_atom, two_atom):
        report = offdiag.oracle.cyclicity_check(model)
        assert report.krylov_rank == report.dimension
    # two atoms with v = 0 on one of them: the decoupled atom is not reached from 0 + 1
    B = ArrowheadMatrix([-1.0, 0.5, 1.0], [1.0, 1.0, 1.0], [1.0, 0.0, 1.0], 0.0)
    assert offdiag.oracle.krylov_rank(B) < B.dimension


@pytest.mark.slow
def test_random_models_are_cyclic(random_model):
    for seed in range(200):
        report = offdiag.oracle.cyclicity_check(random_model(seed))
        assert report.cyclic, (seed, report.min_eigen_gap, report.min_overlap)


@pytest.mark.slow
def test_eigenvalues_interlace_atoms(random_model):
    for seed in range(200):
        model = random_model(seed)
        spectrum = offdiag.oracle.oracle_spectrum(model)
        mu = model.points
        assert spectrum.size == mu.size + 1
        slack = 1e-12 * offdiag.util.hull_scale(*model.hull())
        # lam_0 < mu_0 < lam_1 < ... < mu_{n-1} < lam_n
        assert np.all(spectrum[:-1] <= mu + slack), seed
        assert np.all(mu <= spectrum[1:] + slack), seed


def test_oracle_spectrum_drops_decoupled_atoms():
    model = SpectralModel.from_atoms([-1.0, 0.5, 1.0], [1.0, 1.0, 1.0], [1.0, 0.0, 1.0], 0.0)
    spectrum = offdiag.oracle.oracle_spectrum(model)
    assert spectrum.size == 3
    assert not np.any(np.abs(spectrum - 0.5) < 1e-12)
    found = offdiag.classify.find_eigenvalues(model)
    assert found == pytest.approx(spectrum, abs=1e-10)
