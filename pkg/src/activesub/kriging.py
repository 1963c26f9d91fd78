"""Ordinary Kriging with a Gaussian correlation (exponent fixed at 2).

Correlation hyperparameters are found by maximizing the concentrated
log-likelihood with multi-start Nelder-Mead in log10(theta). Inputs are
expected in normalized coordinates.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import cholesky, solve_triangular
from scipy.optimize import minimize

from .design import STREAM_OPTIMIZER, SampleSet, lhs_unit, make_rng
from .errors import (
    DataError,
    DegenerateResponseError,
    DuplicatePointError,
    IllConditionedError,
)

logger = logging.getLogger(__name__)

THETA_MIN = 1e-3
THETA_MAX = 1e3
NUGGET_START = 1e-10
NUGGET_MAX = 1e-6
N_STARTS = 10
MAX_ITER = 200
SIMPLEX_STEP = 0.5
# max training-point residual tolerated during the search, relative to the response range
INTERP_RTOL = 1e-7
_PENALTY = 1e300


def correlation(theta, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """psi(a, b) = exp(-sum_j theta_j (a_j - b_j)^2) for all row pairs."""
    theta = np.asarray(theta, dtype=float)
    A = A * np.sqrt(theta)
    B = B * np.sqrt(theta)
    d2 = (A * A).sum(1)[:, None] + (B * B).sum(1)[None, :] - 2.0 * A @ B.T
    return np.exp(-np.maximum(d2, 0.0))


def _factor(theta, X: np.ndarray):
    """Cholesky factor of the correlation matrix, escalating the nugget as needed."""
    Psi = correlation(theta, X, X)
    k = X.shape[0]
    tau = NUGGET_START
    while tau <= NUGGET_MAX * (1 + 1e-9):
        try:
            L = cholesky(Psi + tau * np.eye(k), lower=True, check_finite=False)
            return L, tau
        except np.linalg.LinAlgError:
            tau *= 10.0
    raise IllConditionedError("correlation matrix is not positive definite even with the maximal nugget")


def _profile(L: np.ndarray, y: np.ndarray):
    """Closed-form mean and variance given a Cholesky factor."""
    k = y.size
    one = np.ones(k)
    Li1 = solve_triangular(L, one, lower=True, check_finite=False)
    Liy = solve_triangular(L, y, lower=True, check_finite=False)
    mu = float(Li1 @ Liy / (Li1 @ Li1))
    r = Liy - mu * Li1
    sigma2 = float(r @ r / k)
    return mu, sigma2, Li1


def concentrated_log_likelihood(theta, training: SampleSet) -> float:
    """-(k/2) ln(sigma2_hat) - (1/2) ln det(Psi) with mean and variance profiled out."""
    X, y = training.X, training.y
    if training.k < 2:
        raise DataError("likelihood needs at least two samples")
    if np.ptp(y) == 0:
        raise DegenerateResponseError("all responses are identical")
    L, _ = _factor(theta, X)
    _, sigma2, _ = _profile(L, y)
    if sigma2 <= 0:
        raise IllConditionedError("profiled process variance is not positive")
    logdet = 2.0 * np.sum(np.log(np.diag(L)))
    return float(-0.5 * y.size * np.log(sigma2) - 0.5 * logdet)


@dataclass(frozen=True)
class KrigingModel:
    theta: np.ndarray
    mu_hat: float
    sigma2_hat: float
    chol: np.ndarray
    alpha: np.ndarray
    training: SampleSet
    nugget: float = NUGGET_START
    log_likelihood: float = float("nan")

    @classmethod
    def from_theta(cls, training: SampleSet, theta) -> "KrigingModel":
        """Condition a model on ``training`` for fixed correlation weights."""
        theta = np.broadcast_to(np.asarray(theta, dtype=float), (training.m,)).copy()
        X, y = training.X, training.y
        L, tau = _factor(theta, X)
        mu, sigma2, _ = _profile(L, y)
        r = y - mu
        alpha = solve_triangular(L.T, solve_triangular(L, r, lower=True), lower=False)
        loglik = float("nan")
        if sigma2 > 0:
            loglik = float(-0.5 * y.size * np.log(sigma2) - np.sum(np.log(np.diag(L))))
        return cls(theta, mu, sigma2, L, alpha, training, tau, loglik)

    @property
    def m(self) -> int:
        return self.training.m

    @cached_property
    def _chol_ones(self) -> np.ndarray:
        return solve_triangular(self.chol, np.ones(self.chol.shape[0]), lower=True, check_finite=False)

    def _corr(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if np.any(np.abs(X) > 1.0 + 1e-12):
            logger.debug("Kriging query outside the normalized domain (extrapolation)")
        return correlation(self.theta, X, self.training.X)

    def predict(self, X) -> np.ndarray:
        """mu + psi^T Psi^{-1} (y - 1 mu), row-wise; scalar for a single point."""
        X = np.asarray(X, dtype=float)
        out = self.mu_hat + self._corr(X) @ self.alpha
        return float(out[0]) if X.ndim == 1 else out

    def gradient(self, X) -> np.ndarray:
        """Analytic predictor gradient, one row per query point."""
        X = np.asarray(X, dtype=float)
        X2 = np.atleast_2d(X)
        w = self._corr(X2) * self.alpha
        g = -2.0 * self.theta * (X2 * w.sum(1)[:, None] - w @ self.training.X)
        return g[0] if X.ndim == 1 else g

    def variance(self, X) -> np.ndarray:
        """Mean-squared prediction error, clamped at zero."""
        X = np.asarray(X, dtype=float)
        psi = self._corr(X)
        Li1 = self._chol_ones
        V = solve_triangular(self.chol, psi.T, lower=True, check_finite=False)
        quad = (V * V).sum(0)
        cross = Li1 @ V
        s2 = self.sigma2_hat * (1.0 - quad + (1.0 - cross) ** 2 / (Li1 @ Li1))
        s2 = np.maximum(s2, 0.0)
        return float(s2[0]) if X.ndim == 1 else s2


def kriging_predict(model: KrigingModel, x):
    return model.predict(x)


def kriging_variance(model: KrigingModel, x):
    return model.variance(x)


def _check_training(samples: SampleSet) -> None:
    if samples.y is None:
        raise DataError("Kriging needs responses")
    if samples.k < 2:
        raise DataError("Kriging needs at least two samples")
    if np.ptp(samples.y) == 0:
        raise DegenerateResponseError("all responses are identical")
    X = samples.X
    d2 = ((X[:, None, :] - X[None, :, :]) ** 2).sum(-1)
    d2[np.diag_indices_from(d2)] = np.inf
    if np.min(d2) <= 1e-24:
        i, j = np.unravel_index(np.argmin(d2), d2.shape)
        raise DuplicatePointError(f"design rows {min(i, j)} and {max(i, j)} coincide")


def kriging_fit(samples: SampleSet, seed: int = 0, n_starts: int = N_STARTS,
                max_iter: int = MAX_ITER) -> KrigingModel:
    """Maximum-likelihood Kriging fit on normalized samples.

    Starts: log10(theta) = 0, then ``n_starts - 1`` Latin hypercube points in
    [-3, 3]^m. The best likelihood wins; ties go to the earliest start.
    Correlation weights so small that the nugget would spoil interpolation
    are treated as infeasible.
    """
    _check_training(samples)
    m = samples.m
    lo, hi = np.log10(THETA_MIN), np.log10(THETA_MAX)

    limit = INTERP_RTOL * np.ptp(samples.y)

    def neg_loglik(log_theta):
        log_theta = np.clip(log_theta, lo, hi)
        try:
            model = KrigingModel.from_theta(samples, 10.0**log_theta)
        except IllConditionedError:
            return _PENALTY
        # the nugget shifts training predictions by exactly nugget * alpha
        if not np.isfinite(model.log_likelihood) or model.nugget * np.abs(model.alpha).max() > limit:
            return _PENALTY
        return -model.log_likelihood

    starts = [np.zeros(m)]
    if n_starts > 1:
        rng = make_rng(seed, STREAM_OPTIMIZER)
        starts.extend(lo + (hi - lo) * lhs_unit(n_starts - 1, m, rng))

    best_x, best_f = None, np.inf
    for x0 in starts:
        # scipy's default simplex around a zero vector is far too small
        simplex = np.vstack([x0, x0 + np.where(x0 > 0, -SIMPLEX_STEP, SIMPLEX_STEP) * np.eye(m)])
        res = minimize(neg_loglik, x0, method="Nelder-Mead", bounds=[(lo, hi)] * m,
                       options={"maxiter": max_iter, "xatol": 1e-3, "fatol": 1e-6,
                                "initial_simplex": simplex})
        if res.fun < best_f:
            best_x, best_f = np.clip(res.x, lo, hi), res.fun
    if best_x is None or best_f >= _PENALTY:
        raise IllConditionedError("no start produced a well-conditioned correlation matrix")
    return KrigingModel.from_theta(samples, 10.0**best_x)
