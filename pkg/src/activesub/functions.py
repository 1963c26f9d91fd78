"""Analytic benchmark problems with closed-form gradients.

Gradients are returned in raw coordinates; use
:func:`activesub.design.gradient_to_normalized` for the [-1, 1] cube.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .design import DesignSpace
from .errors import ConfigError, DataError

# Hartman-6 constants, Dixon & Szego (eds.), "Towards Global Optimisation 2",
# North-Holland, 1978.
HARTMAN6_A = np.array([
    [10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
    [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
    [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
    [17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
])
HARTMAN6_P = 1e-4 * np.array([
    [1312.0, 1696.0, 5569.0, 124.0, 8283.0, 5886.0],
    [2329.0, 4135.0, 8307.0, 3736.0, 1004.0, 9991.0],
    [2348.0, 1451.0, 3522.0, 2883.0, 3047.0, 6650.0],
    [4047.0, 8828.0, 8732.0, 5743.0, 1091.0, 381.0],
])
HARTMAN6_C = np.array([1.0, 1.2, 3.0, 3.2])
HARTMAN6_MIN = -3.32237
HARTMAN6_ARGMIN = np.array([0.20169, 0.150011, 0.476874, 0.275332, 0.311652, 0.6573])

# Four-bar truss constants: force [kN], modulus [kN/cm^2], length [cm], stress [kN/cm^2].
TRUSS_F = 10.0
TRUSS_E = 2.0e5
TRUSS_L = 200.0
TRUSS_SIGMA = 10.0


def _vec(x) -> np.ndarray:
    return np.asarray(x, dtype=float).reshape(-1)


def zakharov(x) -> float:
    x = _vec(x)
    i = np.arange(1, x.size + 1)
    s = np.dot(0.5 * i, x)
    return float(np.dot(x, x) + s**2 + s**4)


def zakharov_grad(x) -> np.ndarray:
    x = _vec(x)
    i = np.arange(1, x.size + 1)
    s = np.dot(0.5 * i, x)
    return 2.0 * x + (2.0 * s + 4.0 * s**3) * 0.5 * i


def _check6(x: np.ndarray) -> None:
    if x.size != 6:
        raise DataError(f"hartman6 expects 6 coordinates, got {x.size}")


def hartman6(x) -> float:
    x = _vec(x)
    _check6(x)
    inner = np.sum(HARTMAN6_A * (x - HARTMAN6_P) ** 2, axis=1)
    return float(-np.dot(HARTMAN6_C, np.exp(-inner)))


def hartman6_grad(x) -> np.ndarray:
    x = _vec(x)
    _check6(x)
    diff = x - HARTMAN6_P
    weights = HARTMAN6_C * np.exp(-np.sum(HARTMAN6_A * diff**2, axis=1))
    return 2.0 * (weights[:, None] * HARTMAN6_A * diff).sum(axis=0)


def _check_truss(x: np.ndarray) -> None:
    if x.size != 4:
        raise DataError(f"fourbar expects 4 coordinates, got {x.size}")
    if np.any(x <= 0.0):
        raise DataError("fourbar is only defined for strictly positive cross sections")


def fourbar(x) -> tuple:
    """Volume ``f1`` and joint displacement ``f2`` of the four-bar truss.

    The third volume term is ``sqrt(x3)`` as printed in the source this
    problem was taken from (the original truss literature has ``sqrt(2)*x3``).
    """
    x = _vec(x)
    _check_truss(x)
    x1, x2, x3, x4 = x
    r2 = math.sqrt(2.0)
    f1 = TRUSS_L * (2.0 * x1 + r2 * x2 + math.sqrt(x3) + x4)
    f2 = (TRUSS_F * TRUSS_L / TRUSS_E) * (2.0 / x1 + 2.0 * r2 / x2 - 2.0 * r2 / x3 + 2.0 / x4)
    return f1, f2


def fourbar_grad(x, objective: int) -> np.ndarray:
    x = _vec(x)
    _check_truss(x)
    x1, x2, x3, x4 = x
    r2 = math.sqrt(2.0)
    if objective == 0:
        return TRUSS_L * np.array([2.0, r2, 0.5 / math.sqrt(x3), 1.0])
    if objective == 1:
        c = TRUSS_F * TRUSS_L / TRUSS_E
        return c * np.array([-2.0 / x1**2, -2.0 * r2 / x2**2, 2.0 * r2 / x3**2, -2.0 / x4**2])
    raise ConfigError(f"fourbar has objectives 0 and 1, not {objective}")


def fourbar_space() -> DesignSpace:
    a = TRUSS_F / TRUSS_SIGMA
    r2 = math.sqrt(2.0)
    return DesignSpace(np.array([a, r2 * a, r2 * a, a]), np.full(4, 3.0 * a))


@dataclass(frozen=True)
class TestFunction:
    """A named benchmark: its box, objective evaluators and raw gradients."""

    __test__ = False  # not a pytest class

    name: str
    space: DesignSpace
    objectives: tuple
    gradients: tuple

    @property
    def m(self) -> int:
        return self.space.m

    @property
    def num_objectives(self) -> int:
        return len(self.objectives)

    def _check_index(self, objective: int) -> None:
        if not 0 <= objective < self.num_objectives:
            raise ConfigError(f"{self.name} has no objective {objective}")

    def evaluate(self, x, objective: int = 0) -> float:
        self._check_index(objective)
        return self.objectives[objective](x)

    def evaluate_many(self, X, objective: int = 0) -> np.ndarray:
        self._check_index(objective)
        f = self.objectives[objective]
        return np.array([f(row) for row in np.atleast_2d(X)])

    def gradient(self, x, objective: int = 0) -> np.ndarray:
        return analytic_gradient(self, objective, x)


def analytic_gradient(fn: TestFunction, objective: int, x) -> np.ndarray:
    """Exact gradient of ``fn`` objective ``objective`` in raw coordinates."""
    fn._check_index(objective)
    return fn.gradients[objective](x)


def make_zakharov(m: int = 20) -> TestFunction:
    if m < 1:
        raise ConfigError("zakharov needs m >= 1")
    return TestFunction("zakharov", DesignSpace(np.full(m, -5.0), np.full(m, 10.0)),
                        (zakharov,), (zakharov_grad,))


def make_hartman6() -> TestFunction:
    return TestFunction("hartman6", DesignSpace(np.zeros(6), np.ones(6)),
                        (hartman6,), (hartman6_grad,))


def make_fourbar() -> TestFunction:
    return TestFunction(
        "fourbar",
        fourbar_space(),
        (lambda x: fourbar(x)[0], lambda x: fourbar(x)[1]),
        (lambda x: fourbar_grad(x, 0), lambda x: fourbar_grad(x, 1)),
    )


REGISTRY: dict = {
    "zakharov": make_zakharov,
    "hartman6": make_hartman6,
    "fourbar": make_fourbar,
}


def get_function(name: str, m: Optional[int] = None) -> TestFunction:
    """Look up a builtin by name; only ``zakharov`` accepts a dimension."""
    try:
        factory = REGISTRY[name]
    except KeyError:
        raise ConfigError(f"unknown builtin problem {name!r}; choose from {sorted(REGISTRY)}") from None
    if name == "zakharov":
        return factory(20 if m is None else m)
    fn = factory()
    if m is not None and m != fn.m:
        raise ConfigError(f"{name} has fixed dimension {fn.m}, got {m}")
    return fn
