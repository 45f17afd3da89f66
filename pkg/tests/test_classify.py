import math

import numpy as np
import pytest

import offdiag.classify
import offdiag.exceptions
import offdiag.measure
import offdiag.oracle
import offdiag.util

from offdiag.classify import Divergent, Tag
from offdiag.model import SpectralModel, Coupling
from offdiag.schedule import EpsilonSchedule

from conftest import CANTOR_SC_LAMBDA


def deep_uniform(depth: int = 10) -> SpectralModel:
    return SpectralModel(offdiag.measure.QuadratureDensity(0.0, 1.0, depth=depth), Coupling(value=1.0), 0.5)


## boundary values

def test_boundary_value_off_support(single_atom):
    bv = offdiag.classify.boundary_value(single_atom.nu, 1.0)
    assert bv.converged
    assert bv.estimate == pytest.approx(-1.0, abs=1e-12)
    assert bv.atom_at_lambda is None
    assert bv.divergence_exponent is None
    # tail maxima never increase
    assert np.all(np.diff(bv.residuals) <= 0)


def test_boundary_value_at_atom(single_atom):
    bv = offdiag.classify.boundary_value(single_atom.nu, 0.0)
    assert not bv.converged
    assert bv.atom_at_lambda == 1.0
    # F(i eps) = i / eps blows up with exponent 1
    assert bv.divergence_exponent == pytest.approx(1.0, abs=1e-6)


def test_boundary_value_uniform_density():
    model = deep_uniform()
    for lam in (0.25, 0.5, 0.75):
        bv = offdiag.classify.boundary_value(model.nu, lam)
        assert bv.estimate.imag == pytest.approx(math.pi, abs=1e-3)
        assert bv.estimate.real == pytest.approx(math.log((1 - lam) / lam), abs=1e-3)


def test_boundary_value_accepts_explicit_ladder(single_atom):
    eps = 2.0 ** -np.arange(5, 20)
    bv = offdiag.classify.boundary_value(single_atom.nu, 2.0, eps)
    assert bv.estimate == pytest.approx(-0.5, abs=1e-12)
    with pytest.raises(offdiag.exceptions.InvalidConfigValue):
        offdiag.classify.boundary_value(single_atom.nu, 2.0, eps[::-1])
    with pytest.raises(offdiag.exceptions.InvalidConfigValue):
        offdiag.classify.boundary_value(single_atom.nu, 2.0, [1.0, 0.5, 0.1])


def test_schedule_is_clipped_to_resolution(uniform):
    bv = offdiag.classify.boundary_value(uniform.nu, 0.5, EpsilonSchedule(10, 40))
    assert bv.eps.min() >= uniform.nu.resolution() * (1 - 1e-12)


## g2

def test_g2_atomic(single_atom, two_atom):
    assert offdiag.classify.g2(single_atom.nu, 1.0) == pytest.approx(1.0)
    assert offdiag.classify.g2(two_atom.nu, 0.0) == pytest.approx(1.0)
    div = offdiag.classify.g2(single_atom.nu, 0.0)
    assert isinstance(div, Divergent) and div.reason == 'atom'
    assert float(div) == math.inf


def test_g2_diverges_on_cantor_support(cantor_sc):
    g = offdiag.classify.g2(cantor_sc.nu, CANTOR_SC_LAMBDA)
    assert isinstance(g, Divergent)
    assert g.reason == 'growth'
    assert g.depths == (14, 15, 16)
    seq = offdiag.classify.g2_sequence(cantor_sc.nu, CANTOR_SC_LAMBDA, (10, 11, 12))
    assert seq[1] / seq[0] > 1.5 and seq[2] / seq[1] > 1.5


def test_g2_finite_in_gap(cantor_gap):
    g = offdiag.classify.g2(cantor_gap.nu, 0.5)
    assert not isinstance(g, Divergent)
    assert g > 0


## classification

def test_classify_single_atom(single_atom):
    for lam in (-1.0, 1.0):
        pc = offdiag.classify.classify_point(single_atom, lam)
        assert pc.tag == Tag.PURE_POINT
        assert pc.in_singular_support
        assert pc.evidence.g2_finite
    assert offdiag.classify.classify_point(single_atom, 0.5).tag == Tag.REGULAR
    with pytest.raises(offdiag.exceptions.AtomAtLambda):
        offdiag.classify.classify_point(single_atom, 0.0)


def test_classify_two_atom(two_atom):
    for lam in (-math.sqrt(2), 0.0, math.sqrt(2)):
        assert offdiag.classify.classify_point(two_atom, lam).tag == Tag.PURE_POINT
    assert offdiag.classify.classify_point(two_atom, 0.5).tag == Tag.REGULAR


def test_classify_absolutely_continuous():
    pc = offdiag.classify.classify_point(deep_uniform(), 0.5)
    assert pc.tag == Tag.ABSOLUTELY_CONTINUOUS
    assert str(pc.tag) == 'AbsolutelyContinuous'
    assert not pc.in_singular_support


def test_classify_singular_continuous_candidate(cantor_sc):
    pc = offdiag.classify.classify_point(cantor_sc, CANTOR_SC_LAMBDA)
    assert pc.tag == Tag.SC_CANDIDATE
    assert pc.in_singular_support
    assert abs(pc.evidence.im_F) <= 1e-4


def test_classify_gap_eigenvalue(cantor_gap):
    roots = offdiag.classify.find_eigenvalues(cantor_gap)
    inside = roots[(roots > 1 / 3) & (roots < 2 / 3)]
    assert inside.size == 1
    assert offdiag.classify.classify_point(cantor_gap, inside[0]).tag == Tag.PURE_POINT


## eigenvalues

def test_find_eigenvalues_single_atom(single_atom):
    assert offdiag.classify.find_eigenvalues(single_atom) == pytest.approx([-1.0, 1.0], abs=1e-12)


def test_find_eigenvalues_two_atom(two_atom):
    r2 = math.sqrt(2)
    assert offdiag.classify.find_eigenvalues(two_atom) == pytest.approx([-r2, 0.0, r2], abs=1e-10)


def test_find_eigenvalues_large_corner():
    model = SpectralModel.from_atoms([0.0], [1.0], 1.0, 10.0)
    r26 = math.sqrt(26)
    assert offdiag.classify.find_eigenvalues(model) == pytest.approx([5 - r26, 5 + r26], abs=1e-10)


def test_find_eigenvalues_interval(two_atom):
    assert offdiag.classify.find_eigenvalues(two_atom, (-0.5, 0.5)) == pytest.approx([0.0], abs=1e-10)
    assert offdiag.classify.find_eigenvalues(two_atom, (0.2, 0.8)).size == 0
    with pytest.raises(offdiag.exceptions.InvalidConfigValue):
        offdiag.classify.find_eigenvalues(two_atom, (1.0, -1.0))


def test_spectral_interval_contains_spectrum(random_model):
    for seed in range(20):
        model = random_model(seed, n_max=50)
        l, r = offdiag.classify.spectral_interval(model)
        spectrum = offdiag.oracle.oracle_spectrum(model)
        assert l <= spectrum.min() and spectrum.max() <= r


def test_secular_function_decreases(two_atom):
    x = np.linspace(0.1, 0.9, 50)
    assert np.all(np.diff(offdiag.classify.secular_function(two_atom, x)) < 0)


def test_eigenvalue_next_to_faint_atom(faint_atom):
    roots = offdiag.classify.find_eigenvalues(faint_atom)
    assert roots == pytest.approx(offdiag.oracle.oracle_spectrum(faint_atom), abs=1e-12)
    lam = float(roots[(roots > 0.3) & (roots < 1.0)][0])
    pc = offdiag.classify.classify_point(faint_atom, lam)
    assert pc.tag == Tag.PURE_POINT
    assert pc.evidence.g2 > 1e9
    # |h| may sit far above TOL_ATOMIC here, the Newton step may not
    assert pc.evidence.root_step <= offdiag.classify.ROOT_TOL
    assert offdiag.classify.classify_point(faint_atom, lam + 1e-6).tag == Tag.REGULAR


def test_secular_function_slope_in_gaps(random_model):
    rng = np.random.default_rng(11)
    models = [random_model(seed, n_max=50) for seed in range(20)]
    for _ in range(1000):
        model = models[rng.integers(len(models))]
        points, _ = model.nu.atoms()
        edges = np.concatenate(([points[0] - 10.0], points, [points[-1] + 10.0]))
        k = rng.integers(edges.size - 1)
        t0 = rng.uniform(0.1, 0.5)
        t = np.array([t0, t0 + rng.uniform(0.05, 0.4)])
        x = edges[k] + t * (edges[k + 1] - edges[k])
        h = offdiag.classify.secular_function(model, x)
        # h' = -1 - g2 <= -1 between atoms
        assert h[0] - h[1] >= (x[1] - x[0]) * (1 - 1e-9), (model.a1, x)


@pytest.mark.slow
def test_eigenvalues_match_dense_eigensolve(random_model):
    for seed in range(200):
        model = random_model(seed)
        found = offdiag.classify.find_eigenvalues(model)
        dense = offdiag.oracle.oracle_spectrum(model)
        assert found.size == dense.size
        lo, hi = model.hull()
        assert np.abs(found - dense).max() <= 1e-9 * offdiag.util.hull_scale(lo, hi)
        for lam in found:
            assert offdiag.classify.classify_point(model, lam).tag == Tag.PURE_POINT


## stieltjes inversion

def test_atom_mass_single_atom(single_atom):
    for lam in (-1.0, 1.0):
        assert offdiag.classify.atom_mass(single_atom, lam, 1e-6) == pytest.approx(1.0, abs=1e-6)


def test_stieltjes_invert_two_atom(two_atom):
    result = offdiag.classify.stieltjes_invert(two_atom, (-3.0, 3.0), 1e-6)
    assert result.atom_points.size == 3
    assert result.atom_masses == pytest.approx([0.75, 0.5, 0.75], abs=1e-4)
    assert result.total_mass == pytest.approx(2.0, abs=1e-4)
    assert abs(result.continuous_mass) <= 1e-4
    with pytest.raises(offdiag.exceptions.InvalidConfigValue):
        offdiag.classify.stieltjes_invert(two_atom, (-3.0, 3.0), 0.0)


def test_stieltjes_invert_away_from_spectrum(two_atom):
    result = offdiag.classify.stieltjes_invert(two_atom, (0.3, 1.0), 1e-6)
    assert result.atom_points.size == 0
    # only Lorentzian tails of the eigenvalues reach in, of order eps
    assert np.abs(result.density).max() <= 1e-5
    assert abs(result.total_mass) <= 1e-5


@pytest.mark.slow
def test_stieltjes_atom_masses_match_oracle(random_model):
    for seed in range(20):
        model = random_model(300 + seed, n_max=50)
        omega = offdiag.oracle.oracle_spectral_measure(model)
        masses = [offdiag.classify.atom_mass(model, lam, 1e-6)
                  for lam in offdiag.classify.find_eigenvalues(model)]
        assert masses == pytest.approx(omega.masses, abs=1e-4)
        assert sum(masses) == pytest.approx(model.v_norm_sq + 1, abs=1e-4)


## eps-scaling exponent

def test_sc_probe_atom(single_atom):
    report = offdiag.classify.sc_probe(single_atom, 1.0)
    assert report.exponent == pytest.approx(0.0, abs=1e-3)
    assert report.band == 'pure-point'
    assert report.heuristic


def test_sc_probe_density():
    report = offdiag.classify.sc_probe(deep_uniform(), 0.5, target='nu')
    assert report.exponent == pytest.approx(1.0, abs=0.05)
    assert report.band == 'absolutely-continuous'


def test_scaling_exponent_at_cantor_endpoint():
    # middle-thirds Cantor with equal weights: nu(0, eps) ~ eps**(log 2 / log 3)
    m = offdiag.measure.CantorApprox(0.0, 1.0, depth=16)
    model = SpectralModel(m, Coupling(value=1.0), 0.5)
    report = offdiag.classify.sc_probe(model, 0.0, EpsilonSchedule(4, 22), target='nu')
    assert 0.5 < report.exponent < 0.75
    assert report.band == 'singular-continuous-indication'


def test_sc_probe_rejects_unknown_target(single_atom):
    with pytest.raises(offdiag.exceptions.InvalidConfigValue):
        offdiag.classify.sc_probe(single_atom, 1.0, target='mu')
