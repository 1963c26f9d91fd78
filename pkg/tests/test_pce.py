import math

import numpy as np
import pytest
from sklearn.linear_model import lars_path

from activesub.design import SampleSet, make_rng
from activesub.errors import BasisTooLargeError, DataError
from activesub.pce import (
    PceModel,
    _ols_loo,
    candidate_basis,
    design_matrix,
    lars_select,
    legendre_eval,
    pce_fit,
    pce_gradient,
    pce_predict,
)


def test_legendre_known_values():
    u = np.linspace(-1, 1, 7)
    np.testing.assert_array_equal(legendre_eval(0, u), 1.0)
    assert legendre_eval(1, 0.5) == pytest.approx(math.sqrt(3) * 0.5, rel=1e-15)
    assert legendre_eval(2, 1.0) == pytest.approx(math.sqrt(5), rel=1e-15)
    # closed form of P_3
    assert legendre_eval(3, 0.3) == pytest.approx(math.sqrt(7) * 0.5 * (5 * 0.3**3 - 3 * 0.3), rel=1e-14)


def test_legendre_orthonormal_monte_carlo():
    u = make_rng(0).uniform(-1, 1, 10**6)
    phi = np.stack([legendre_eval(d, u) for d in range(6)])
    gram = phi @ phi.T / u.size
    assert np.max(np.abs(gram - np.eye(6))) <= 5e-3


def test_candidate_basis_small_cases():
    assert candidate_basis(2, 1, 1.0) == [(0, 0), (0, 1), (1, 0)]
    full = candidate_basis(2, 2, 1.0)
    assert len(full) == math.comb(4, 2)
    assert full == sorted(full)


@pytest.mark.parametrize("m, p", [(3, 3), (5, 4), (8, 5)])
def test_hyperbolic_subset_and_counts(m, p):
    full = candidate_basis(m, p, 1.0)
    assert len(full) == math.comb(m + p, p)
    sparse = set(candidate_basis(m, p, 0.5))
    assert sparse <= set(full)
    assert (0,) * m in sparse


def test_candidate_basis_too_large(monkeypatch):
    import activesub.pce as pce
    monkeypatch.setattr(pce, "MAX_CANDIDATES", 100)
    with pytest.raises(BasisTooLargeError):
        candidate_basis(10, 3, 1.0)


def stagewise_order(X, y, eps=1e-4, steps=200_000):
    """Forward stagewise regression with tiny steps; its entry order tracks LARS."""
    Z = X - X.mean(0)
    Z /= np.linalg.norm(Z, axis=0)
    r = y - y.mean()
    beta = np.zeros(Z.shape[1])
    order = []
    for _ in range(steps):
        c = Z.T @ r
        j = int(np.argmax(np.abs(c)))
        if abs(c[j]) < 1e-9:
            break
        delta = eps * np.sign(c[j])
        beta[j] += delta
        r -= delta * Z[:, j]
        if j not in order:
            order.append(j)
    return order


def test_lars_perfect_correlate_first():
    rng = make_rng(1)
    X = rng.normal(size=(30, 6))
    assert lars_select(X, X[:, 4])[0] == 4


def test_lars_three_column_synthetic():
    rng = make_rng(2)
    X = rng.uniform(-1, 1, (40, 3))
    y = X @ [5.0, 1.0, 0.0]
    order = lars_select(X, y)
    assert order[:2] == [0, 1]
    assert stagewise_order(X, y)[:2] == [0, 1]


def test_lars_scale_invariance():
    rng = make_rng(3)
    X = rng.normal(size=(25, 8))
    y = X[:, 1] - 0.5 * X[:, 6] + 0.2 * rng.normal(size=25)
    scaled = X * rng.uniform(0.1, 50, 8)
    assert lars_select(X, y) == lars_select(scaled, y)


def test_lars_matches_independent_routes():
    rng = make_rng(4)
    X = rng.normal(size=(60, 12))
    y = X @ (rng.normal(size=12) * (rng.uniform(size=12) > 0.4)) + 0.05 * rng.normal(size=60)
    order = lars_select(X, y)
    Z = X - X.mean(0)
    Z /= np.linalg.norm(Z, axis=0)
    _, active, _ = lars_path(Z, y - y.mean(), method="lar")
    assert order == [int(a) for a in active]
    assert order[:5] == stagewise_order(X, y)[:5]


def test_lars_truncation_and_zero_variance_column():
    rng = make_rng(5)
    X = rng.normal(size=(6, 10))
    X[:, 3] = 2.0
    with pytest.warns(UserWarning):
        order = lars_select(X, rng.normal(size=6))
    assert len(order) <= 5
    assert 3 not in order


def test_fit_linear_exact():
    rng = make_rng(6)
    X = rng.uniform(-1, 1, (50, 2))
    model = pce_fit(SampleSet(X, X[:, 0]))
    T = rng.uniform(-1, 1, (100, 2))
    assert np.max(np.abs(model.predict(T) - T[:, 0])) <= 1e-10


def quadratic(X):
    return 1.5 + 2 * X[:, 0] - X[:, 1] * X[:, 2] + 0.7 * X[:, 3] ** 2 - 0.3 * X[:, 0] * X[:, 3]


@pytest.fixture(scope="module")
def quad_fit():
    X = make_rng(7).uniform(-1, 1, (100, 4))
    return pce_fit(SampleSet(X, quadratic(X)))


def test_fit_quadratic_recovery(quad_fit):
    T = make_rng(8).uniform(-1, 1, (500, 4))
    err = np.linalg.norm(quad_fit.predict(T) - quadratic(T)) / np.linalg.norm(quadratic(T))
    assert err <= 1e-8


def test_fit_argmin_contract(quad_fit):
    assert len(quad_fit.candidates) > 1
    assert all(quad_fit.loo_error <= err for _, _, err in quad_fit.candidates)
    assert len(quad_fit.basis) == len(quad_fit.coeffs)
    zero_rows = np.flatnonzero(quad_fit.basis.sum(1) == 0)
    assert zero_rows.size == 1


def test_exact_recovery_cubic_in_span():
    # degree-3 target in m = 3; candidate count at p = 3, q = 1 is 20, so k = 60 >= 3P
    rng = make_rng(9)
    X = rng.uniform(-1, 1, (60, 3))
    f = lambda X: X[:, 0] ** 3 - 2 * X[:, 1] * X[:, 2] + X[:, 2] ** 2 * X[:, 0] + 0.1
    model = pce_fit(SampleSet(X, f(X)), p_range=[3], q=1.0)
    T = rng.uniform(-1, 1, (300, 3))
    assert np.linalg.norm(model.predict(T) - f(T)) / np.linalg.norm(f(T)) <= 1e-8


def test_fit_deterministic(quad_fit):
    X = make_rng(7).uniform(-1, 1, (100, 4))
    again = pce_fit(SampleSet(X, quadratic(X)))
    assert np.array_equal(again.basis, quad_fit.basis)
    assert again.coeffs.tobytes() == quad_fit.coeffs.tobytes()


def test_fit_requires_enough_samples():
    with pytest.raises(DataError):
        pce_fit(SampleSet(np.zeros((3, 3)), [1.0, 2.0, 3.0]))


def naive_predict(model, x):
    total = 0.0
    for degrees, a in zip(model.basis, model.coeffs):
        term = a
        for j, d in enumerate(degrees):
            term *= legendre_eval(int(d), x[j])
        total += term
    return total


def test_predict_constant_and_naive_sum(quad_fit):
    const = PceModel(np.zeros((1, 3), dtype=int), np.array([2.5]))
    np.testing.assert_array_equal(const.predict(np.zeros((4, 3))), 2.5)
    for x in make_rng(10).uniform(-1, 1, (20, 4)):
        assert pce_predict(quad_fit, x) == pytest.approx(naive_predict(quad_fit, x), abs=1e-12)


def test_predict_linear_in_coefficients():
    basis = np.array(candidate_basis(3, 2, 1.0))
    rng = make_rng(11)
    a, b = rng.normal(size=len(basis)), rng.normal(size=len(basis))
    X = rng.uniform(-1, 1, (10, 3))
    lhs = PceModel(basis, a + b).predict(X)
    rhs = PceModel(basis, a).predict(X) + PceModel(basis, b).predict(X)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_gradient_simple_models():
    const = PceModel(np.zeros((1, 3), dtype=int), np.array([2.5]))
    np.testing.assert_array_equal(const.gradient(np.array([0.1, 0.2, 0.3])), 0.0)
    # u1 = phi_1(u1) / sqrt(3)
    lin = PceModel(np.array([[1, 0, 0]]), np.array([1 / math.sqrt(3)]))
    np.testing.assert_allclose(lin.gradient(np.array([0.4, -0.2, 0.9])), [1.0, 0.0, 0.0], atol=1e-15)


def test_gradient_matches_finite_difference():
    rng = make_rng(12)
    basis = np.array(candidate_basis(4, 5, 0.75))
    model = PceModel(basis, rng.normal(size=len(basis)) / len(basis))
    h = 1e-5
    X = rng.uniform(-1 + h, 1 - h, (100, 4))
    G = pce_gradient(model, X)
    for x, g in zip(X, G):
        fd = [(model.predict(x + h * e) - model.predict(x - h * e)) / (2 * h) for e in np.eye(4)]
        np.testing.assert_allclose(g, fd, atol=1e-8)


def test_design_matrix_columns_orthonormal_on_average():
    basis = np.array(candidate_basis(2, 3, 1.0))
    X = make_rng(13).uniform(-1, 1, (200_000, 2))
    Psi = design_matrix(basis, X)
    gram = Psi.T @ Psi / X.shape[0]
    assert np.max(np.abs(gram - np.eye(len(basis)))) <= 2e-2


def test_loo_matches_brute_force_refits():
    rng = np.random.default_rng(8)
    Psi = np.column_stack([np.ones(30), rng.normal(size=(30, 4))])
    y = Psi @ rng.normal(size=5) + 0.1 * rng.normal(size=30)
    _, err = _ols_loo(Psi, y)
    loo = []
    for i in range(30):
        keep = np.arange(30) != i
        c, *_ = np.linalg.lstsq(Psi[keep], y[keep], rcond=None)
        loo.append(y[i] - Psi[i] @ c)
    k, P = Psi.shape
    expected = np.mean(np.square(loo)) / np.var(y) * k / (k - P) * (1 + np.trace(np.linalg.inv(Psi.T @ Psi)))
    assert err == pytest.approx(expected, rel=1e-10)
