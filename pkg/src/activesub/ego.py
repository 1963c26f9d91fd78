"""Efficient global optimization: Kriging plus expected-improvement infill."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Tuple

import numpy as np
from scipy.special import ndtr

from .design import (
    STREAM_JITTER,
    STREAM_OPTIMIZER,
    DesignSpace,
    SampleSet,
    denormalize,
    lhs_sample,
    lhs_unit,
    make_rng,
    normalize,
)
from .errors import ConfigError
from .kriging import KrigingModel, kriging_fit
from .optim import nelder_mead_batch

logger = logging.getLogger(__name__)

_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)
DUPLICATE_TOL = 1e-8
JITTER_RADIUS = 1e-3


def normal_cdf(z):
    """Standard normal CDF (scipy's ``ndtr``, exact to double precision)."""
    return ndtr(z)


def normal_pdf(z):
    z = np.asarray(z, dtype=float)
    return _INV_SQRT_2PI * np.exp(-0.5 * z * z)


def expected_improvement(y_hat, s, y_min):
    """EI = (y_min - y_hat) Phi(z) + s phi(z), z = (y_min - y_hat) / s.

    Vectorized; where ``s == 0`` it reduces to max(y_min - y_hat, 0).
    """
    y_hat = np.asarray(y_hat, dtype=float)
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("standard deviation must be nonnegative")
    improve = y_min - y_hat
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(s > 0, improve / np.where(s > 0, s, 1.0), 0.0)
        ei = np.where(s > 0, improve * normal_cdf(z) + s * normal_pdf(z), np.maximum(improve, 0.0))
    ei = np.maximum(ei, 0.0)
    return float(ei) if ei.ndim == 0 else ei


def _ei_of(model: KrigingModel, U: np.ndarray, y_min: float) -> np.ndarray:
    U = np.atleast_2d(U)
    return expected_improvement(model.predict(U), np.sqrt(model.variance(U)), y_min)


@dataclass(frozen=True)
class EgoConfig:
    init_k: int = 45
    budget: int = 75
    seed: int = 0
    ei_restarts: int = 100
    ei_max_iter: int = 200
    kriging_starts: int = 10

    def __post_init__(self):
        if self.init_k < 2:
            raise ConfigError("init_k must be at least 2")
        if self.budget < self.init_k:
            raise ConfigError("budget must be at least init_k")
        if self.ei_restarts < 1:
            raise ConfigError("ei_restarts must be positive")


@dataclass
class EgoResult:
    history: List[Tuple[np.ndarray, float]] = field(default_factory=list)
    best_x: np.ndarray = None
    best_y: float = np.inf
    error: str = ""

    @property
    def X(self) -> np.ndarray:
        return np.array([h[0] for h in self.history])

    @property
    def y(self) -> np.ndarray:
        return np.array([h[1] for h in self.history])

    def running_best(self) -> np.ndarray:
        return np.minimum.accumulate(self.y)

    def record(self, x, y: float) -> None:
        self.history.append((np.array(x, dtype=float), float(y)))
        if y < self.best_y:
            self.best_x, self.best_y = np.array(x, dtype=float), float(y)


def maximize_ei(model: KrigingModel, rng: np.random.Generator, restarts: int = 100,
                max_iter: int = 200) -> np.ndarray:
    """Normalized point of maximal expected improvement.

    ``restarts`` Latin hypercube candidates in [-1, 1]^m are each polished by
    Nelder-Mead (all restarts batched) with vertices projected onto the cube. If the EI vanishes everywhere
    the candidate with the largest prediction variance is returned instead.
    """
    m = model.m
    y_min = float(np.min(model.training.y))
    cands = 2.0 * lhs_unit(restarts, m, rng) - 1.0
    ei0 = _ei_of(model, cands, y_min)
    if not np.any(ei0 > 0):
        return cands[int(np.argmax(model.variance(cands)))]

    u, f = nelder_mead_batch(lambda P: -_ei_of(model, P, y_min), cands, -1.0, 1.0,
                             step=0.05, max_iter=max_iter)
    j = int(np.argmin(f))
    if -f[j] >= ei0.max():
        return u[j]
    return cands[int(np.argmax(ei0))]


def _dejitter(u: np.ndarray, U: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Nudge ``u`` off any existing design it (nearly) duplicates."""
    for _ in range(100):
        if np.min(np.max(np.abs(U - u), axis=1)) > DUPLICATE_TOL:
            return u
        u = np.clip(u + rng.uniform(-JITTER_RADIUS, JITTER_RADIUS, u.size), -1.0, 1.0)
    return u


def ego_run(objective: Callable, space: DesignSpace, config: EgoConfig) -> EgoResult:
    """Sequential Kriging/EI minimization of ``objective`` over ``space``.

    ``objective`` takes a raw point and returns a float. If it raises, the
    run stops and the partial history is returned with ``error`` set.
    """
    result = EgoResult()
    X0 = lhs_sample(space, config.init_k, config.seed).X
    try:
        for x in X0:
            result.record(x, _call(objective, x))
        infill_rng = make_rng(config.seed, STREAM_OPTIMIZER + 10)
        jitter_rng = make_rng(config.seed, STREAM_JITTER)
        while len(result.history) < config.budget:
            U = normalize(space, result.X)
            model = kriging_fit(SampleSet(U, result.y), seed=config.seed + len(result.history),
                                n_starts=config.kriging_starts)
            u = maximize_ei(model, infill_rng, config.ei_restarts, config.ei_max_iter)
            u = _dejitter(u, U, jitter_rng)
            x = denormalize(space, u)
            result.record(x, _call(objective, x))
            logger.debug("EGO eval %d: y=%.6g best=%.6g", len(result.history), result.history[-1][1], result.best_y)
    except _ObjectiveFailure as exc:
        result.error = str(exc.__cause__ or exc)
        logger.warning("objective failed after %d evaluations: %s", len(result.history), result.error)
    return result


class _ObjectiveFailure(Exception):
    pass


def _call(objective: Callable, x) -> float:
    try:
        y = float(objective(x))
    except Exception as exc:
        raise _ObjectiveFailure(str(exc)) from exc
    if not np.isfinite(y):
        raise _ObjectiveFailure(f"objective returned {y}")
    return y
