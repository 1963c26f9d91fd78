"""Active subspace discovery from gradient samples.

All quantities live in the normalized cube [-1, 1]^m. The pipeline is
gradients -> averaged outer product C -> Jacobi eigendecomposition ->
partition -> projection, plus activity scores and explained variance.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from .design import DesignSpace, SampleSet, uniform_sample
from .errors import (
    ConfigError,
    DataError,
    DegenerateSpectrumError,
    EigensolverError,
    NumericsError,
)

JACOBI_MAX_SWEEPS = 100
JACOBI_TOL = 1e-14


def _evaluate(surrogate, P: np.ndarray) -> np.ndarray:
    if hasattr(surrogate, "predict"):
        return np.asarray(surrogate.predict(P), dtype=float).reshape(-1)
    return np.array([float(surrogate(p)) for p in P])


def estimate_gradient_fd(surrogate, x, h: float = 1e-4) -> np.ndarray:
    """Finite-difference gradient of a surrogate at a normalized point.

    Central differences, falling back to a one-sided step in any coordinate
    where ``x_i +/- h`` would leave [-1, 1]. ``surrogate`` is either a callable
    on vectors or an object with a batched ``predict``.
    """
    if h <= 0:
        raise ConfigError("finite-difference step must be positive")
    x = np.asarray(x, dtype=float).reshape(-1)
    m = x.size
    plus = np.tile(x, (m, 1))
    minus = np.tile(x, (m, 1))
    step_plus = np.full(m, h)
    step_minus = np.full(m, h)
    # one-sided where the stencil exits the cube
    hi = x + h > 1.0
    lo = x - h < -1.0
    step_plus[hi] = 0.0
    step_minus[lo] = 0.0
    idx = np.arange(m)
    plus[idx, idx] += step_plus
    minus[idx, idx] -= step_minus
    values = _evaluate(surrogate, np.vstack([plus, minus]))
    if not np.all(np.isfinite(values)):
        raise NumericsError("surrogate returned a non-finite value during differencing")
    return (values[:m] - values[m:]) / (step_plus + step_minus)


def build_c_matrix(grads) -> np.ndarray:
    """C = (1/M) sum_i g_i g_i^T from an M x m gradient matrix."""
    G = np.atleast_2d(np.asarray(grads, dtype=float))
    if G.shape[0] < 1:
        raise DataError("need at least one gradient")
    if not np.all(np.isfinite(G)):
        raise DataError("gradients must be finite")
    C = G.T @ G / G.shape[0]
    return 0.5 * (C + C.T)


def apply_sign_convention(W: np.ndarray) -> np.ndarray:
    """Flip columns so each one's largest-magnitude entry is positive.

    Ties go to the lowest row index.
    """
    W = np.array(W, dtype=float, copy=True)
    rows = np.argmax(np.abs(W), axis=0)
    signs = np.where(W[rows, np.arange(W.shape[1])] < 0, -1.0, 1.0)
    return W * signs


def eigendecompose_symmetric(C) -> Tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Returns eigenvalues in descending order and the matching orthonormal
    eigenvectors as columns, with :func:`apply_sign_convention` applied.
    Sweeps stop once every off-diagonal entry is at most 1e-14 * ||C||_F.
    """
    A = np.array(C, dtype=float, copy=True)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ConfigError("matrix must be square")
    m = A.shape[0]
    if not np.all(np.isfinite(A)):
        raise NumericsError("matrix has non-finite entries")
    norm = np.linalg.norm(A, "fro")
    if np.max(np.abs(A - A.T), initial=0.0) > 1e-10 * max(norm, 1.0):
        raise ConfigError("matrix is not symmetric")
    A = 0.5 * (A + A.T)
    V = np.eye(m)
    tol = JACOBI_TOL * norm

    for _ in range(JACOBI_MAX_SWEEPS + 1):
        off = np.abs(A - np.diag(np.diag(A)))
        if off.max(initial=0.0) <= tol:
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = A[p, q]
                if abs(apq) <= tol * 1e-3:
                    continue
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                ap = A[:, p].copy()
                aq = A[:, q].copy()
                A[:, p] = c * ap - s * aq
                A[:, q] = s * ap + c * aq
                ap = A[p, :].copy()
                aq = A[q, :].copy()
                A[p, :] = c * ap - s * aq
                A[q, :] = s * ap + c * aq
                A[p, q] = A[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    else:
        raise EigensolverError(f"Jacobi iteration did not converge in {JACOBI_MAX_SWEEPS} sweeps")

    eigenvalues = np.diag(A).copy()
    order = np.argsort(-eigenvalues, kind="stable")
    return eigenvalues[order], apply_sign_convention(V[:, order])


@dataclass(frozen=True)
class ActiveSubspace:
    eigenvalues: np.ndarray
    W: np.ndarray
    n: int
    C: Optional[np.ndarray] = None

    @property
    def m(self) -> int:
        return self.W.shape[0]

    @property
    def W1(self) -> np.ndarray:
        return self.W[:, : self.n]

    @property
    def explained(self) -> np.ndarray:
        """Cumulative eigenvalue fractions for n = 1..m."""
        total = self.eigenvalues.sum()
        if total <= 0:
            raise DegenerateSpectrumError("eigenvalue spectrum is identically zero")
        return np.cumsum(self.eigenvalues) / total


def partition(subspace: ActiveSubspace, n: int) -> Tuple[np.ndarray, np.ndarray]:
    if not 1 <= n <= subspace.m:
        raise ConfigError(f"active dimension must be in 1..{subspace.m}, got {n}")
    return subspace.W[:, :n].copy(), subspace.eigenvalues[:n].copy()


def project(W1, X) -> np.ndarray:
    """Reduced coordinates x_r = W1^T x for each row of X."""
    W1 = np.asarray(W1, dtype=float)
    if W1.ndim == 1:
        W1 = W1[:, None]
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != W1.shape[0]:
        raise DataError(f"points have {X.shape[1]} columns, subspace basis has {W1.shape[0]} rows")
    return X @ W1


def activity_scores(eigenvalues, W, n: int) -> np.ndarray:
    """alpha_i = sum_{j<n} lambda_j * W[i, j]^2."""
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    W = np.asarray(W, dtype=float)
    if not 1 <= n <= W.shape[1]:
        raise ConfigError(f"active dimension must be in 1..{W.shape[1]}, got {n}")
    alpha = (W[:, :n] ** 2) @ eigenvalues[:n]
    return np.maximum(alpha, 0.0)


def explained_variance(eigenvalues, n: int) -> float:
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    if not 1 <= n <= eigenvalues.size:
        raise ConfigError(f"active dimension must be in 1..{eigenvalues.size}, got {n}")
    total = eigenvalues.sum()
    if not total > 0:
        raise DegenerateSpectrumError("eigenvalue spectrum is identically zero")
    return float(min(1.0, max(0.0, eigenvalues[:n].sum() / total)))


def subspace_from_gradients(grads, n: int = 1) -> ActiveSubspace:
    C = build_c_matrix(grads)
    eigenvalues, W = eigendecompose_symmetric(C)
    if not 1 <= n <= W.shape[0]:
        raise ConfigError(f"active dimension must be in 1..{W.shape[0]}, got {n}")
    return ActiveSubspace(eigenvalues, W, n, C)


Mode = Union[str, Tuple[str, int, int]]


def gradient_points(samples: SampleSet, mode: Mode = "training-points") -> np.ndarray:
    """Normalized points at which gradients are taken for a given mode.

    ``mode`` is ``"training-points"`` or ``("monte-carlo", M, seed)``.
    """
    if mode == "training-points":
        return samples.X
    if isinstance(mode, (tuple, list)) and len(mode) == 3 and mode[0] == "monte-carlo":
        _, M, seed = mode
        return uniform_sample(DesignSpace.cube(samples.m), int(M), int(seed)).X
    raise ConfigError(f"unknown gradient mode {mode!r}")


def surrogate_gradients(surrogate, points: np.ndarray, h: float = 1e-4,
                        analytic: bool = True) -> np.ndarray:
    if analytic and hasattr(surrogate, "gradient"):
        return np.atleast_2d(surrogate.gradient(points))
    return np.array([estimate_gradient_fd(surrogate, p, h) for p in points])


def discover(samples: SampleSet, surrogate, n: int = 1, mode: Mode = "training-points",
             h: float = 1e-4, analytic: bool = True) -> ActiveSubspace:
    """Active subspace of a fitted surrogate over normalized ``samples``."""
    if samples.k < 1:
        raise DataError("need at least one sample")
    points = gradient_points(samples, mode)
    return subspace_from_gradients(surrogate_gradients(surrogate, points, h, analytic), n)


def principal_angle(A, B) -> float:
    """Largest principal angle in degrees between the column spans of A and B."""
    Qa, _ = np.linalg.qr(np.asarray(A, dtype=float).reshape(len(A), -1))
    Qb, _ = np.linalg.qr(np.asarray(B, dtype=float).reshape(len(B), -1))
    if Qa.shape[1] < Qb.shape[1]:
        Qa, Qb = Qb, Qa
    # sine form stays accurate for small angles, unlike arccos of the cosines
    resid = Qb - Qa @ (Qa.T @ Qb)
    s = np.linalg.svd(resid, compute_uv=False).max(initial=0.0)
    return float(np.degrees(np.arcsin(np.clip(s, 0.0, 1.0))))
