"""Rule-based reading of a reduced-coordinate scatter.

The rules turn the usual visual judgement of an x_r-versus-y plot into flags:
a dominant eigenvalue means a ridge, a ridge that a parabola fits well is
probably unimodal, a dominant direction with a poor parabola fit hints at
multiple modes, and a weak top-two spectrum means no low-dimensional view.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np

from .errors import DataError, DegenerateResponseError

RIDGE_LIKE = "ridge-like"
UNIMODAL = "likely-unimodal-1d"
MULTIMODAL = "likely-multimodal"
NO_DOMINANT = "no-dominant-direction"


@dataclass(frozen=True)
class Thresholds:
    ridge: float = 0.8
    unimodal_r2: float = 0.8
    multimodal_explained: float = 0.5
    multimodal_r2: float = 0.5
    dominant_pair: float = 0.5


@dataclass
class DiagnosisReport:
    eigenvalues: List[float]
    explained_1: float
    explained_2: float
    r2_linear_1d: float
    r2_quadratic_1d: float
    flags: List[str]
    recommendation: str
    activity: Optional[List[float]] = None
    thresholds: Thresholds = field(default_factory=Thresholds)

    def to_dict(self) -> dict:
        return asdict(self)


def r_squared(x, y, degree: int) -> float:
    """Coefficient of determination of a least-squares polynomial fit, clipped to [0, 1]."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    sst = np.sum((y - y.mean()) ** 2)
    if sst <= 0:
        raise DegenerateResponseError("response has zero variance")
    # centre and scale x so the Vandermonde matrix stays well conditioned
    scale = np.ptp(x)
    t = (x - x.mean()) / scale if scale > 0 else np.zeros_like(x)
    A = np.vander(t, degree + 1)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    sse = np.sum((y - A @ coef) ** 2)
    return float(np.clip(1.0 - sse / sst, 0.0, 1.0))


def _flags(explained_1: float, explained_2: float, r2q: float, th: Thresholds) -> List[str]:
    flags = []
    ridge = explained_1 >= th.ridge
    if ridge:
        flags.append(RIDGE_LIKE)
    if ridge and r2q >= th.unimodal_r2:
        flags.append(UNIMODAL)
    if explained_1 >= th.multimodal_explained and r2q < th.multimodal_r2:
        flags.append(MULTIMODAL)
    if explained_2 < th.dominant_pair:
        flags.append(NO_DOMINANT)
    return flags


def recommend(flags: List[str]) -> str:
    if UNIMODAL in flags:
        return ("One direction dominates and the response along it is close to a single bowl or slope: "
                "a local or gradient-based optimizer started from the best sample should suffice, "
                "and a low-order polynomial surrogate is a reasonable choice.")
    if MULTIMODAL in flags:
        return ("The response along the dominant direction is scattered or wavy, which points to several "
                "local optima and strong nonlinearity: prefer a global strategy (metaheuristic, multi-start "
                "local search or EGO) and a flexible surrogate such as Kriging.")
    if NO_DOMINANT in flags:
        return ("No one- or two-dimensional view captures most of the gradient energy: treat the problem as "
                "genuinely high-dimensional, use a global optimizer, and inspect activity scores to prune "
                "unimportant variables.")
    if RIDGE_LIKE in flags:
        return ("One direction dominates but the one-dimensional trend is not a clean parabola: inspect the "
                "scatter, and consider a two-dimensional view or a global optimizer if the trend is irregular.")
    return ("A few directions carry most of the variation but none is clearly dominant: the two-dimensional "
            "view is the more informative one; a global optimizer is the safe default.")


def diagnose(reduced, y, eigenvalues, activity=None, thresholds: Optional[Thresholds] = None) -> DiagnosisReport:
    """Fit quality and complexity flags for samples projected on the active subspace."""
    th = thresholds or Thresholds()
    reduced = np.asarray(reduced, dtype=float)
    if reduced.ndim == 1:
        reduced = reduced[:, None]
    y = np.asarray(y, dtype=float).reshape(-1)
    if reduced.shape[0] != y.size:
        raise DataError("reduced coordinates and responses differ in length")
    if y.size < 5:
        raise DataError("diagnosis needs at least five samples")
    lam = np.asarray(eigenvalues, dtype=float)
    total = lam.sum()
    if not total > 0:
        raise DataError("eigenvalue spectrum sums to zero")
    explained_1 = float(np.clip(lam[0] / total, 0.0, 1.0))
    explained_2 = float(np.clip(lam[:2].sum() / total, 0.0, 1.0))
    r2l = r_squared(reduced[:, 0], y, 1)
    r2q = r_squared(reduced[:, 0], y, 2)
    flags = _flags(explained_1, explained_2, r2q, th)
    return DiagnosisReport(
        eigenvalues=[float(v) for v in lam],
        explained_1=explained_1,
        explained_2=explained_2,
        r2_linear_1d=r2l,
        r2_quadratic_1d=r2q,
        flags=flags,
        recommendation=recommend(flags),
        activity=None if activity is None else [float(a) for a in activity],
        thresholds=th,
    )
