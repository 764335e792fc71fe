"""Solver correctness: closed forms, KKT certification, invariances."""

import numpy as np
import pytest

import grouplasso as gl


def orthonormal_problem(seed, N=24, groups=((0, 1), (2, 3, 4), (5,)), lam=(0.2, 0.3, 0.1)):
    rng = np.random.default_rng(seed)
    K = sum(len(g) for g in groups)
    Q, R = np.linalg.qr(rng.standard_normal((N, K)))
    X = np.sqrt(N) * Q * np.sign(np.diag(R))
    y = rng.standard_normal(N)
    part = gl.validate_partition([list(g) for g in groups], K)
    return gl.Problem.create(X, y, part, np.asarray(lam, dtype=float))


def closed_form(problem):
    z = problem.X.T @ problem.y / problem.N
    thresholds = problem.lam.astype(float)
    return gl.group_prox(z, problem.partition, thresholds)


def test_orthonormal_closed_form():
    for seed in range(5):
        prob = orthonormal_problem(seed)
        res = gl.solve_group_lasso(prob, gl.SolveOptions(tol=1e-12))
        expected = closed_form(prob)
        np.testing.assert_allclose(res.beta_hat, expected, rtol=1e-6, atol=1e-10)
        assert res.converged


def test_large_lambda_gives_zero():
    prob = orthonormal_problem(1)
    z = prob.X.T @ prob.y / prob.N
    big = 2.0 * np.array([np.linalg.norm(z[list(g)]) for g in prob.partition.groups])
    prob2 = gl.Problem.create(prob.X, prob.y, prob.partition, big)
    res = gl.solve_group_lasso(prob2)
    np.testing.assert_array_equal(res.beta_hat, 0.0)
    assert res.active_groups == frozenset()


def test_zero_lambda_is_ols():
    rng = np.random.default_rng(4)
    X = rng.standard_normal((6, 6)) + 3 * np.eye(6)
    y = rng.standard_normal(6)
    part = gl.validate_partition([[0, 1, 2], [3, 4, 5]], 6)
    prob = gl.Problem.create(X, y, part, np.zeros(2))
    res = gl.solve_group_lasso(prob, gl.SolveOptions(tol=1e-12, max_iter=200000))
    ols = np.linalg.solve(X, y)
    np.testing.assert_allclose(res.beta_hat, ols, rtol=1e-6, atol=1e-8)


class TestKktResidual:
    def test_exact_stationary_point(self):
        prob = orthonormal_problem(2)
        beta = closed_form(prob)
        assert gl.kkt_residual(prob, beta) <= 1e-12

    def test_zero_with_slack(self):
        prob = orthonormal_problem(3)
        z = prob.X.T @ prob.y / prob.N
        norms = prob.partition.group_norms(z)
        lam = norms + 0.1
        prob2 = gl.Problem.create(prob.X, prob.y, prob.partition, lam)
        assert gl.kkt_residual(prob2, np.zeros(prob.K)) == 0.0

    def test_zero_with_violation(self):
        prob = orthonormal_problem(5)
        y = 100.0 * prob.y  # scale so every group correlation exceeds 0.3
        z = prob.X.T @ y / prob.N
        norms = prob.partition.group_norms(z)
        assert norms.min() > 0.3  # construction sanity
        lam = norms - 0.3
        prob2 = gl.Problem.create(prob.X, y, prob.partition, lam)
        assert gl.kkt_residual(prob2, np.zeros(prob.K)) == pytest.approx(0.3, rel=1e-12)


def test_converged_solutions_satisfy_penalty_bound():
    # every converged beta has ||(X'(y - X beta))^j||/N <= lambda_j + tol
    for seed in range(5):
        rng = np.random.default_rng(100 + seed)
        X = rng.standard_normal((15, 6))
        y = rng.standard_normal(15)
        part = gl.validate_partition([[0, 1], [2, 3], [4, 5]], 6)
        prob = gl.Problem.create(X, y, part, [0.1, 0.2, 0.05])
        res = gl.solve_group_lasso(prob)
        assert res.converged
        g = prob.X.T @ (prob.y - prob.X @ res.beta_hat) / prob.N
        norms = part.group_norms(g)
        tol = 1e-8 * max(1.0, float(prob.lam.max()))
        assert np.all(norms <= prob.lam + tol + 1e-12)


def test_prox_non_expansive():
    rng = np.random.default_rng(8)
    part = gl.validate_partition([[0, 1, 2], [3], [4, 5]], 6)
    t = np.array([0.5, 0.1, 1.5])
    for _ in range(50):
        z1 = rng.standard_normal(6)
        z2 = rng.standard_normal(6)
        d_out = np.linalg.norm(gl.group_prox(z1, part, t) - gl.group_prox(z2, part, t))
        assert d_out <= np.linalg.norm(z1 - z2) + 1e-12


def test_scaling_invariance():
    prob = orthonormal_problem(9)
    res1 = gl.solve_group_lasso(prob, gl.SolveOptions(tol=1e-12))
    c = 3.7
    prob2 = gl.Problem.create(prob.X, c * prob.y, prob.partition, c * prob.lam)
    res2 = gl.solve_group_lasso(prob2, gl.SolveOptions(tol=1e-12))
    np.testing.assert_allclose(res2.beta_hat, c * res1.beta_hat, rtol=1e-6, atol=1e-8)


def test_objective_trace_non_increasing():
    rng = np.random.default_rng(13)
    X = rng.standard_normal((30, 10))
    y = rng.standard_normal(30)
    part = gl.validate_partition([list(range(5)), list(range(5, 10))], 10)
    prob = gl.Problem.create(X, y, part, [0.05, 0.05])
    res = gl.solve_group_lasso(prob)
    trace = np.asarray(res.objective_trace)
    assert np.all(np.diff(trace) <= 1e-12)


def test_solve_lasso_soft_threshold():
    rng = np.random.default_rng(21)
    N, K = 30, 5
    Q, R = np.linalg.qr(rng.standard_normal((N, K)))
    X = np.sqrt(N) * Q
    y = rng.standard_normal(N)
    r = 0.15
    res = gl.solve_lasso(X, y, r, gl.SolveOptions(tol=1e-12))
    z = X.T @ y / N
    expected = np.sign(z) * np.maximum(np.abs(z) - r, 0.0)
    np.testing.assert_allclose(res.beta_hat, expected, rtol=1e-6, atol=1e-10)


def test_solve_lasso_all_zero():
    rng = np.random.default_rng(22)
    X = rng.standard_normal((10, 4))
    y = rng.standard_normal(10)
    r = float(np.abs(X.T @ y).max()) / 10 + 0.01
    res = gl.solve_lasso(X, y, r)
    np.testing.assert_array_equal(res.beta_hat, 0.0)


def test_solve_lasso_negative_r():
    with pytest.raises(gl.DomainError):
        gl.solve_lasso(np.eye(2), np.ones(2), -0.1)


def test_estimate_phi_max():
    rng = np.random.default_rng(30)
    X = rng.standard_normal((40, 12))
    est = gl.estimate_phi_max(X)
    exact = float(np.linalg.eigvalsh(X.T @ X / 40)[-1])
    assert est == pytest.approx(exact, rel=1e-8)
