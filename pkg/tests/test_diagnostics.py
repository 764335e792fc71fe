"""Design diagnostics: coherence, restricted eigenvalue estimates, x_*."""

import math

import numpy as np
import pytest

import grouplasso as gl
from grouplasso.model import gram_summary


def design_from_gram(Psi, n):
    """n x K design with X'X/n = Psi exactly (n >= K)."""
    K = Psi.shape[0]
    assert n >= K
    w, V = np.linalg.eigh(Psi)
    root = V @ np.diag(np.sqrt(np.maximum(w, 0.0))) @ V.T
    X = np.zeros((n, K))
    X[:K] = math.sqrt(n) * root
    return X


class TestCoherenceAlpha:
    def test_orthonormal_gives_inf(self):
        part = gl.validate_partition([[0, 2], [1, 3]], 4)
        X = design_from_gram(np.eye(4), 8)
        gram = gram_summary(X, part)
        alpha = gl.coherence_alpha(gram, part, np.ones(2), 1)
        assert math.isinf(alpha)

    def test_singleton_cross_group(self):
        # singleton groups, equal lambda, off-diagonal rho -> alpha = phi/(14 s rho)
        rho, s = 0.01, 2
        Psi = np.eye(3)
        Psi[0, 1] = Psi[1, 0] = rho
        part = gl.singleton_partition(3)
        X = design_from_gram(Psi, 6)
        gram = gram_summary(X, part)
        alpha = gl.coherence_alpha(gram, part, np.ones(3), s)
        assert alpha == pytest.approx(1.0 / (14 * s * rho), rel=1e-8)

    def test_two_groups_of_two_binding_at_two(self):
        # both constraint families bind simultaneously at alpha = 2:
        # aligned cross entries 1/28 = base/alpha, off entries 1/56 = base/(2 alpha)
        Psi = np.eye(4)
        aligned, off = 1.0 / 28.0, 1.0 / 56.0
        # groups [0,1] and [2,3]; aligned pairs (0,2) and (1,3)
        Psi[0, 2] = Psi[2, 0] = aligned
        Psi[1, 3] = Psi[3, 1] = aligned
        Psi[0, 3] = Psi[3, 0] = off
        Psi[1, 2] = Psi[2, 1] = off
        part = gl.validate_partition([[0, 1], [2, 3]], 4)
        X = design_from_gram(Psi, 8)
        gram = gram_summary(X, part)
        alpha = gl.coherence_alpha(gram, part, np.ones(2), 1)
        assert alpha == pytest.approx(2.0, rel=1e-8)

    def test_nonconstant_diagonal(self):
        part = gl.singleton_partition(2)
        gram = gram_summary(np.array([[2.0, 0.0], [0.0, 1.0]]), part)
        with pytest.raises(gl.NonConstantDiagonalError):
            gl.coherence_alpha(gram, part, np.ones(2), 1)


class TestReFromCoherence:
    def test_values(self):
        assert gl.re_from_coherence(2.0, 1.0) == pytest.approx(math.sqrt(0.5), rel=1e-12)
        assert gl.re_from_coherence(1e12, 1.0) == pytest.approx(1.0, rel=1e-9)

    def test_domain(self):
        with pytest.raises(gl.DomainError):
            gl.re_from_coherence(1.0, 1.0)
        with pytest.raises(gl.DomainError):
            gl.re_from_coherence(2.0, 0.0)


class TestReSampled:
    def test_identity_design(self):
        part = gl.validate_partition([[0, 1], [2, 3], [4, 5]], 6)
        X = design_from_gram(np.eye(6), 12)
        k = gl.re_sampled(X, part, np.ones(3), 1, 3.0, 500, 0)
        # ||X d||^2/N = ||d||^2 >= ||d_J||^2, attained at d_{Jc} = 0
        assert k >= 1.0 - 1e-9
        assert k <= 1.0 + 1e-9

    def test_duplicated_group_collapses(self):
        rng = np.random.default_rng(5)
        A = rng.standard_normal((30, 2))
        B = rng.standard_normal((30, 2))
        X = np.hstack([A, A, B])  # groups 0 and 1 identical
        part = gl.validate_partition([[0, 1], [2, 3], [4, 5]], 6)
        k = gl.re_sampled(X, part, np.ones(3), 1, 3.0, 10000, 7)
        assert k <= 0.05

    def test_single_sample_deterministic(self):
        part = gl.validate_partition([[0, 1], [2, 3]], 4)
        X = design_from_gram(np.eye(4), 8)
        k1 = gl.re_sampled(X, part, np.ones(2), 1, 3.0, 1, 42)
        k2 = gl.re_sampled(X, part, np.ones(2), 1, 3.0, 1, 42)
        assert k1 == k2

    def test_monotone_in_cone_factor(self):
        rng = np.random.default_rng(9)
        X = rng.standard_normal((20, 6))
        part = gl.validate_partition([[0, 1], [2, 3], [4, 5]], 6)
        k3 = gl.re_sampled(X, part, np.ones(3), 1, 3.0, 2000, 3)
        k7 = gl.re_sampled(X, part, np.ones(3), 1, 7.0, 2000, 3)
        assert k7 <= k3 + 1e-12


class TestRestrictedEigenvalues:
    def test_identity(self):
        part = gl.singleton_partition(4)
        X = design_from_gram(np.eye(4), 8)
        k1, k2 = gl.restricted_eigenvalues(X, part, 1)
        assert k1 == pytest.approx(1.0, rel=1e-9)
        assert k2 == pytest.approx(1.0, rel=1e-9)

    def test_diagonal_4_1(self):
        part = gl.singleton_partition(2)
        X = design_from_gram(np.diag([4.0, 1.0]), 4)
        k1, k2 = gl.restricted_eigenvalues(X, part, 1)
        assert (k1, k2) == (pytest.approx(1.0, rel=1e-9), pytest.approx(2.0, rel=1e-9))

    def test_rank_deficient(self):
        rng = np.random.default_rng(2)
        X = rng.standard_normal((3, 8))  # rank 3 < 2s * K_j = 8
        part = gl.validate_partition([[0, 1, 2, 3], [4, 5, 6, 7]], 8)
        k1, _ = gl.restricted_eigenvalues(X, part, 1)
        assert k1 == pytest.approx(0.0, abs=1e-6)

    def test_blowup_refused(self):
        part = gl.singleton_partition(60)
        X = np.zeros((4, 60))
        with pytest.raises(gl.CombinatorialBlowupError):
            gl.restricted_eigenvalues(X, part, 15)

    def test_kappa2_below_phi_max(self):
        rng = np.random.default_rng(31)
        X = rng.standard_normal((20, 6))
        part = gl.validate_partition([[0, 1], [2, 3], [4, 5]], 6)
        _, k2 = gl.restricted_eigenvalues(X, part, 1)
        phi_max = float(np.linalg.eigvalsh(X.T @ X / 20)[-1])
        assert k2**2 <= phi_max + 1e-9


class TestXStar:
    def test_sign_matrix(self):
        spec = gl.MultiTaskSpec.create([np.ones((4, 3))], [np.zeros(4)])
        assert gl.x_star(spec) == pytest.approx(1.0)

    def test_two_row_example(self):
        X = np.array([[3.0, 0.0], [0.0, 4.0]])
        spec = gl.MultiTaskSpec.create([X], [np.zeros(2)])
        assert gl.x_star(spec) == pytest.approx(math.sqrt(12.5), rel=1e-12)

    def test_zero_design(self):
        spec = gl.MultiTaskSpec.create([np.zeros((3, 2))], [np.zeros(3)])
        assert gl.x_star(spec) == 0.0


def test_sampled_dominates_certificate():
    # whenever coherence certifies alpha > 1, sampled cone ratios sit above
    # sqrt((1 - 1/alpha) phi)
    rng = np.random.default_rng(17)
    part = gl.validate_partition([[0, 1], [2, 3], [4, 5], [6, 7]], 8)
    for seed in range(5):
        S = rng.standard_normal((8, 8)) * 0.002
        S = (S + S.T) / 2
        np.fill_diagonal(S, 0.0)
        X = design_from_gram(np.eye(8) + S, 16)
        gram = gram_summary(X, part)
        alpha = gl.coherence_alpha(gram, part, np.ones(4), 1)
        assert alpha > 1
        cert = gl.re_from_coherence(alpha, gram.phi)
        sampled = gl.re_sampled(X, part, np.ones(4), 1, 3.0, 1000, seed)
        assert sampled >= cert - 1e-9


def test_diagnose_report_roundtrip():
    X = design_from_gram(np.eye(4), 8)
    part = gl.validate_partition([[0, 1], [2, 3]], 4)
    report = gl.diagnose(X, part, np.ones(2), 1)
    d = report.to_json_dict()
    assert d["coherence_alpha"] == "inf"
    assert report.kappa1 <= report.kappa2 + 1e-12
