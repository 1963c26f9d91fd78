"""Nelder-Mead run on many starting points at once.

All simplices advance in lockstep so the objective is called on whole
batches of points, which is what makes 100-restart acquisition searches
affordable. Vertices are projected onto the box after every move.
"""
from __future__ import annotations

from typing import Callable, Tuple

import numpy as np

REFLECT, EXPAND, CONTRACT, SHRINK = 1.0, 2.0, 0.5, 0.5


def nelder_mead_batch(
    fun: Callable[[np.ndarray], np.ndarray],
    x0: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    step: float = 0.05,
    max_iter: int = 200,
    xatol: float = 1e-6,
    fatol: float = 1e-12,
) -> Tuple[np.ndarray, np.ndarray]:
    """Minimize ``fun`` from each row of ``x0``.

    ``fun`` maps an (n, m) array to n values. Returns the best vertex and
    value for every start.
    """
    x0 = np.atleast_2d(np.asarray(x0, dtype=float))
    R, m = x0.shape
    lower = np.broadcast_to(np.asarray(lower, dtype=float), (m,))
    upper = np.broadcast_to(np.asarray(upper, dtype=float), (m,))

    # initial simplices: step along each axis, pointing inward at the upper bound
    S = np.repeat(x0[:, None, :], m + 1, axis=1)
    offs = np.where(x0 + step > upper, -step, step)
    idx = np.arange(m)
    S[:, idx + 1, idx] += offs
    S = np.clip(S, lower, upper)
    F = fun(S.reshape(-1, m)).reshape(R, m + 1)

    active = np.ones(R, dtype=bool)
    rows = np.arange(R)
    for _ in range(max_iter):
        order = np.argsort(F, axis=1, kind="stable")
        S = S[rows[:, None], order]
        F = F[rows[:, None], order]
        spread_x = np.max(np.abs(S[:, 1:] - S[:, :1]), axis=(1, 2))
        spread_f = np.max(np.abs(F[:, 1:] - F[:, :1]), axis=1)
        active &= ~((spread_x <= xatol) & (spread_f <= fatol))
        act = np.flatnonzero(active)
        if act.size == 0:
            break
        Sa, Fa = S[act], F[act]
        centroid = Sa[:, :-1].mean(axis=1)
        worst = Sa[:, -1]
        xr = np.clip(centroid + REFLECT * (centroid - worst), lower, upper)
        fr = fun(xr)
        best_f, second_worst, worst_f = Fa[:, 0], Fa[:, -2], Fa[:, -1]

        new_x = worst.copy()
        new_f = worst_f.copy()
        shrink = np.zeros(act.size, dtype=bool)

        accept_r = (fr >= best_f) & (fr < second_worst)
        new_x[accept_r], new_f[accept_r] = xr[accept_r], fr[accept_r]

        try_e = fr < best_f
        if np.any(try_e):
            xe = np.clip(centroid[try_e] + EXPAND * (xr[try_e] - centroid[try_e]), lower, upper)
            fe = fun(xe)
            use_e = fe < fr[try_e]
            ex_idx = np.flatnonzero(try_e)
            new_x[ex_idx] = np.where(use_e[:, None], xe, xr[try_e])
            new_f[ex_idx] = np.where(use_e, fe, fr[try_e])

        try_c = fr >= second_worst
        if np.any(try_c):
            c_idx = np.flatnonzero(try_c)
            outside = fr[c_idx] < worst_f[c_idx]
            target = np.where(outside[:, None], xr[c_idx], worst[c_idx])
            target_f = np.where(outside, fr[c_idx], worst_f[c_idx])
            xc = np.clip(centroid[c_idx] + CONTRACT * (target - centroid[c_idx]), lower, upper)
            fc = fun(xc)
            ok = fc <= target_f
            new_x[c_idx[ok]], new_f[c_idx[ok]] = xc[ok], fc[ok]
            shrink[c_idx[~ok]] = True

        Sa[:, -1], Fa[:, -1] = new_x, new_f
        if np.any(shrink):
            s_idx = np.flatnonzero(shrink)
            base = Sa[s_idx, :1]
            moved = np.clip(base + SHRINK * (Sa[s_idx, 1:] - base), lower, upper)
            Sa[s_idx, 1:] = moved
            Fa[s_idx, 1:] = fun(moved.reshape(-1, m)).reshape(s_idx.size, m)
        S[act], F[act] = Sa, Fa

    best = np.argmin(F, axis=1)
    return S[rows, best], F[rows, best]
