"""Bounded design spaces, coordinate normalization and space-filling samples.

Every surrogate and the subspace machinery work in the canonical cube
[-1, 1]^m; raw coordinates appear only at I/O boundaries.

Random streams come from numpy's PCG64 seeded through ``SeedSequence`` with a
fixed per-purpose spawn key, so sampling and optimizer restarts never share
draws and results are identical across platforms for a given seed.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import BoundsViolationError, ConfigError, DataError

# Stream offsets for make_rng.
STREAM_SAMPLING = 0
STREAM_MONTE_CARLO = 1
STREAM_OPTIMIZER = 2
STREAM_JITTER = 3

_BOUND_RTOL = 1e-12


def make_rng(seed: int, stream: int = STREAM_SAMPLING) -> np.random.Generator:
    """PCG64 generator for ``seed`` on an independent, purpose-specific stream."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=(int(stream),))))


@dataclass(frozen=True)
class DesignSpace:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float)).copy()
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float)).copy()
        if lower.ndim != 1 or lower.shape != upper.shape:
            raise ConfigError("lower and upper bounds must be vectors of equal length")
        if lower.size < 1:
            raise ConfigError("design space needs at least one dimension")
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise ConfigError("bounds must be finite")
        if np.any(lower >= upper):
            bad = np.flatnonzero(lower >= upper).tolist()
            raise ConfigError(f"lower bound must be strictly below upper bound (dimensions {bad})")
        lower.flags.writeable = False
        upper.flags.writeable = False
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def cube(cls, m: int, lo: float = -1.0, hi: float = 1.0) -> "DesignSpace":
        return cls(np.full(m, lo), np.full(m, hi))

    @property
    def m(self) -> int:
        return self.lower.size

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, x, rtol: float = _BOUND_RTOL) -> np.ndarray:
        """Row-wise membership test with a tolerance relative to each width."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        tol = rtol * self.width
        return np.all((x >= self.lower - tol) & (x <= self.upper + tol), axis=1)


@dataclass(frozen=True)
class SampleSet:
    """Design matrix ``X`` (k x m) with optional responses ``y`` (k,)."""

    X: np.ndarray
    y: Optional[np.ndarray] = None

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.X, dtype=float))
        if X.ndim != 2:
            raise DataError("design matrix must be two-dimensional")
        object.__setattr__(self, "X", X)
        if self.y is not None:
            y = np.asarray(self.y, dtype=float).reshape(-1)
            if y.size != X.shape[0]:
                raise DataError(f"response length {y.size} does not match {X.shape[0]} designs")
            object.__setattr__(self, "y", y)

    @property
    def k(self) -> int:
        return self.X.shape[0]

    @property
    def m(self) -> int:
        return self.X.shape[1]

    def with_responses(self, y) -> "SampleSet":
        return SampleSet(self.X, y)

    def check_bounds(self, space: DesignSpace) -> None:
        if self.m != space.m:
            raise DataError(f"samples have {self.m} columns, design space has {space.m}")
        inside = space.contains(self.X)
        if not np.all(inside):
            rows = np.flatnonzero(~inside).tolist()
            raise BoundsViolationError(f"rows outside bounds: {rows}")


def _check_inside(x: np.ndarray, lo, hi, width, what: str) -> None:
    tol = _BOUND_RTOL * width
    if np.any(x < lo - tol) or np.any(x > hi + tol):
        raise BoundsViolationError(f"{what} outside bounds")


def normalize(space: DesignSpace, x_raw) -> np.ndarray:
    """Map raw coordinates (vector or k x m matrix) into [-1, 1]^m."""
    x = np.asarray(x_raw, dtype=float)
    _check_inside(x, space.lower, space.upper, space.width, "raw point")
    u = 2.0 * (x - space.lower) / space.width - 1.0
    return np.clip(u, -1.0, 1.0)


def denormalize(space: DesignSpace, u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    _check_inside(u, -1.0, 1.0, 2.0, "normalized point")
    u = np.clip(u, -1.0, 1.0)
    x = space.lower + (u + 1.0) * 0.5 * space.width
    return np.clip(x, space.lower, space.upper)


def normalize_samples(space: DesignSpace, samples: SampleSet) -> SampleSet:
    return SampleSet(normalize(space, samples.X), samples.y)


def gradient_to_normalized(space: DesignSpace, grad_raw) -> np.ndarray:
    """Chain rule: d/du = d/dx * (upper - lower) / 2, row-wise."""
    return np.asarray(grad_raw, dtype=float) * (0.5 * space.width)


def lhs_unit(k: int, m: int, rng: np.random.Generator) -> np.ndarray:
    """Plain Latin hypercube in [0, 1)^m: one point per stratum in every column."""
    if k < 1:
        raise ConfigError("sample count must be at least 1")
    strata = np.stack([rng.permutation(k) for _ in range(m)], axis=1)
    # keep the jitter strictly inside its stratum so the stratum survives round-off
    jitter = 1e-9 + rng.random((k, m)) * (1.0 - 2e-9)
    return (strata + jitter) / k


def lhs_sample(space: DesignSpace, k: int, seed: int) -> SampleSet:
    u01 = lhs_unit(k, space.m, make_rng(seed, STREAM_SAMPLING))
    return SampleSet(space.lower + u01 * space.width)


def uniform_sample(space: DesignSpace, M: int, seed: int) -> SampleSet:
    if M < 1:
        raise ConfigError("sample count must be at least 1")
    u01 = make_rng(seed, STREAM_MONTE_CARLO).random((M, space.m))
    return SampleSet(space.lower + u01 * space.width)


def space_from_bounds(bounds: Sequence[Sequence[float]]) -> DesignSpace:
    """Build a space from ``[[lo, hi], ...]`` pairs."""
    arr = np.asarray(bounds, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ConfigError("bounds must be a list of [lower, upper] pairs")
    return DesignSpace(arr[:, 0], arr[:, 1])
