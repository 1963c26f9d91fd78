"""Sparse polynomial chaos expansion on orthonormal Legendre polynomials.

Terms are ranked by least-angle regression; every prefix of the ranking is
refit by ordinary least squares and scored by the corrected leave-one-out
error, across a sweep of maximal degrees. Inputs are normalized to [-1, 1].
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np
from scipy.linalg import qr, solve_triangular

from .design import SampleSet
from .errors import BasisTooLargeError, DataError, FitFailureError

logger = logging.getLogger(__name__)

MAX_CANDIDATES = 10**6
COND_LIMIT = 1e12


def legendre_table(u, degree: int) -> Tuple[np.ndarray, np.ndarray]:
    """Orthonormal Legendre values and derivatives for degrees 0..degree.

    Returns two arrays shaped ``u.shape + (degree + 1,)`` holding
    sqrt(2d + 1) * P_d(u) and its derivative.
    """
    u = np.asarray(u, dtype=float)
    P = np.empty(u.shape + (degree + 1,))
    D = np.empty_like(P)
    P[..., 0] = 1.0
    D[..., 0] = 0.0
    if degree >= 1:
        P[..., 1] = u
        D[..., 1] = 1.0
    for n in range(1, degree):
        # (n+1) P_{n+1} = (2n+1) u P_n - n P_{n-1};  P'_{n+1} = P'_{n-1} + (2n+1) P_n
        P[..., n + 1] = ((2 * n + 1) * u * P[..., n] - n * P[..., n - 1]) / (n + 1)
        D[..., n + 1] = D[..., n - 1] + (2 * n + 1) * P[..., n]
    scale = np.sqrt(2.0 * np.arange(degree + 1) + 1.0)
    return P * scale, D * scale


def legendre_eval(degree: int, u):
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    val = legendre_table(u, degree)[0][..., degree]
    return float(val) if np.ndim(val) == 0 else val


def candidate_basis(m: int, p_max: int, q: float = 1.0) -> List[Tuple[int, ...]]:
    """All multi-indices with hyperbolic q-norm at most ``p_max``, lexicographic."""
    if p_max < 1 or not 0 < q <= 1:
        raise ValueError("need p_max >= 1 and 0 < q <= 1")
    limit = p_max**q * (1 + 1e-12)
    out: List[Tuple[int, ...]] = []
    current = [0] * m

    def rec(j: int, acc: float) -> None:
        if j == m:
            out.append(tuple(current))
            if len(out) > MAX_CANDIDATES:
                raise BasisTooLargeError(f"more than {MAX_CANDIDATES} candidate terms")
            return
        for d in range(p_max + 1):
            a = acc + d**q
            if a > limit:
                break
            current[j] = d
            rec(j + 1, a)
        current[j] = 0

    rec(0, 0.0)
    return out


def design_matrix(basis: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Tensor-product basis evaluated at each row of X (k x len(basis))."""
    basis = np.asarray(basis, dtype=int).reshape(-1, X.shape[1])
    vals, _ = legendre_table(X, int(basis.max(initial=0)))
    Psi = np.ones((X.shape[0], basis.shape[0]))
    for j in range(X.shape[1]):
        Psi *= vals[:, j, basis[:, j]]
    return Psi


def lars_select(design: np.ndarray, y) -> List[int]:
    """Order in which least-angle regression brings columns into the model.

    Columns are centered and scaled to unit norm first, so the order does not
    depend on column scaling; zero-variance columns are skipped with a
    warning. At most ``min(k - 1, P)`` columns are returned.
    """
    X = np.asarray(design, dtype=float)
    y = np.asarray(y, dtype=float).reshape(-1)
    k, P = X.shape
    if k < 2:
        raise DataError("LARS needs at least two samples")
    Xc = X - X.mean(axis=0)
    norms = np.linalg.norm(Xc, axis=0)
    usable = norms > 1e-12 * max(1.0, np.abs(X).max(initial=0.0)) * np.sqrt(k)
    if not np.all(usable):
        warnings.warn(f"LARS: ignoring {int((~usable).sum())} zero-variance column(s)", stacklevel=2)
    cols = np.flatnonzero(usable)
    Z = Xc[:, cols] / norms[cols]
    r = y - y.mean()
    n_steps = min(k - 1, cols.size)

    active: List[int] = []
    inactive = np.ones(cols.size, dtype=bool)
    corr = Z.T @ r
    if n_steps == 0 or np.max(np.abs(corr), initial=0.0) <= 1e-14 * max(np.linalg.norm(y), 1e-300):
        return []
    nxt = int(np.argmax(np.abs(corr)))
    tiny = np.finfo(float).eps
    while len(active) < n_steps:
        active.append(nxt)
        inactive[nxt] = False
        corr = Z.T @ r
        C = np.max(np.abs(corr[active]))
        if C <= tiny * np.linalg.norm(y):
            break
        signs = np.sign(corr[active])
        XA = Z[:, active] * signs
        G = XA.T @ XA
        try:
            Ginv1 = np.linalg.solve(G, np.ones(len(active)))
        except np.linalg.LinAlgError:
            active.pop()
            break
        s = Ginv1.sum()
        if not s > 0:
            active.pop()
            break
        AA = 1.0 / np.sqrt(s)
        u = XA @ (AA * Ginv1)
        if len(active) == n_steps:
            break
        a = Z.T @ u
        idx = np.flatnonzero(inactive)
        c_in, a_in = corr[idx], a[idx]
        with np.errstate(divide="ignore", invalid="ignore"):
            g1 = (C - c_in) / (AA - a_in)
            g2 = (C + c_in) / (AA + a_in)
        g1[~(g1 > tiny)] = np.inf
        g2[~(g2 > tiny)] = np.inf
        gam = np.minimum(g1, g2)
        j = int(np.argmin(gam))
        if not np.isfinite(gam[j]):
            break
        r = r - gam[j] * u
        nxt = int(idx[j])
    return [int(cols[a]) for a in active]


@dataclass(frozen=True)
class PceModel:
    basis: np.ndarray  # (P, m) integer degrees
    coeffs: np.ndarray
    loo_error: float = float("nan")
    p_selected: int = 0
    candidates: Tuple[Tuple[int, int, float], ...] = field(default=(), repr=False)

    @property
    def m(self) -> int:
        return self.basis.shape[1]

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        out = design_matrix(self.basis, np.atleast_2d(X)) @ self.coeffs
        return float(out[0]) if X.ndim == 1 else out

    def gradient(self, X) -> np.ndarray:
        """Exact gradient of the expansion, one row per point."""
        X = np.asarray(X, dtype=float)
        X2 = np.atleast_2d(X)
        k, m = X2.shape
        vals, ders = legendre_table(X2, int(self.basis.max(initial=0)))
        # factor[i, j, b] = phi_{d_bj}(x_ij)
        factor = np.stack([vals[:, j, self.basis[:, j]] for j in range(m)], axis=1)
        dfactor = np.stack([ders[:, j, self.basis[:, j]] for j in range(m)], axis=1)
        left = np.ones((k, m + 1, self.basis.shape[0]))
        right = np.ones((k, m + 1, self.basis.shape[0]))
        for j in range(m):
            left[:, j + 1] = left[:, j] * factor[:, j]
            right[:, m - j - 1] = right[:, m - j] * factor[:, m - j - 1]
        others = left[:, :m] * right[:, 1:]
        g = np.einsum("kjb,b->kj", dfactor * others, self.coeffs)
        return g[0] if X.ndim == 1 else g


def pce_predict(model: PceModel, x):
    return model.predict(x)


def pce_gradient(model: PceModel, x):
    return model.gradient(x)


def _ols_loo(Psi: np.ndarray, y: np.ndarray):
    """OLS coefficients and corrected leave-one-out error, or None if unusable.

    LOO residuals come from the hat matrix, e_i / (1 - h_i), normalized by the
    response variance and multiplied by the finite-sample correction
    k / (k - P) * (1 + tr((Psi^T Psi / k)^-1) / k).
    """
    k, P = Psi.shape
    if P >= k:
        return None
    Q, R = qr(Psi, mode="economic", check_finite=False)
    diag = np.abs(np.diag(R))
    if diag.min() <= 0 or diag.max() / diag.min() > COND_LIMIT:
        return None
    Rinv = solve_triangular(R, np.eye(P), check_finite=False)
    if np.linalg.cond(R) > COND_LIMIT:
        return None
    coeffs = Rinv @ (Q.T @ y)
    h = (Q * Q).sum(axis=1)
    if np.any(h >= 1.0 - 1e-12):
        return None
    resid = y - Psi @ coeffs
    loo = np.mean((resid / (1.0 - h)) ** 2) / np.var(y)
    correction = k / (k - P) * (1.0 + np.sum(Rinv * Rinv))
    err = loo * correction
    if not np.isfinite(err):
        return None
    return coeffs, float(err)


def pce_fit(samples: SampleSet, p_range: Sequence[int] = range(1, 6), q: float = 0.75,
            seed: int = 0) -> PceModel:
    """Sparse PCE on normalized samples, minimizing corrected LOO error.

    The fit is deterministic; ``seed`` exists for interface symmetry with
    :func:`activesub.kriging.kriging_fit`.
    """
    if samples.y is None:
        raise DataError("PCE needs responses")
    X, y = samples.X, samples.y
    k, m = X.shape
    if k < m + 1:
        raise DataError(f"PCE needs at least m + 1 = {m + 1} samples, got {k}")
    if np.ptp(y) == 0:
        raise DataError("all responses are identical")

    best = None
    tried = []
    for p in p_range:
        basis = np.array(candidate_basis(m, int(p), q), dtype=int)
        # constant term is the first index in lexicographic order
        Psi = design_matrix(basis, X)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            order = lars_select(Psi[:, 1:], y)
        order = [0] + [i + 1 for i in order]
        for n_terms in range(1, len(order) + 1):
            cols = order[:n_terms]
            fit = _ols_loo(Psi[:, cols], y)
            if fit is None:
                continue
            coeffs, err = fit
            tried.append((int(p), n_terms, err))
            if best is None or err < best[0]:
                best = (err, int(p), basis[cols], coeffs)
    if best is None:
        raise FitFailureError("no candidate expansion could be fitted")
    err, p, basis, coeffs = best
    logger.debug("PCE: degree %d, %d terms, corrected LOO %.3e", p, len(coeffs), err)
    return PceModel(basis, coeffs, err, p, tuple(tried))
