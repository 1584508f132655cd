"""Analytic benchmark models.

Every evaluator takes an ``(N, d)`` array of points in the model's native
units and returns ``N`` responses.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .design import Domain, affine_map, unit_box


def rosenbrock(x, y):
    return (1.0 - x) ** 2 + 100.0 * (y - x ** 2) ** 2


def sincos(x, y):
    return np.sin(x ** 2 / 2.0 - y ** 2 / 4.0 + 3.0) * np.cos(2.0 * x + 1.0 - np.exp(y))


def gaussian2d(x, y):
    return 2.0 * np.exp(-3.5 * (x ** 2 + y ** 2))


# name, lower, upper, units
PISTON_VARIABLES = (
    ("M", 30.0, 60.0, "kg"),
    ("S", 0.005, 0.020, "m^2"),
    ("V0", 0.002, 0.010, "m^3"),
    ("k", 1000.0, 5000.0, "N/m"),
    ("P0", 90000.0, 110000.0, "N/m^2"),
    ("Ta", 290.0, 296.0, "K"),
    ("T0", 340.0, 360.0, "K"),
)
PISTON_DOMAIN = Domain([v[1] for v in PISTON_VARIABLES], [v[2] for v in PISTON_VARIABLES])


def piston(x, check: bool = True):
    """Cycle time in seconds; ``x`` holds (M, S, V0, k, P0, Ta, T0) in its last axis."""
    x = np.asarray(x, dtype=float)
    slack = 1e-9 * (PISTON_DOMAIN.hi - PISTON_DOMAIN.lo)
    if check and not np.all(PISTON_DOMAIN.contains(x, tol=slack)):
        raise ValueError("piston input outside its variable ranges")
    M, S, V0, k, P0, Ta, T0 = np.moveaxis(x, -1, 0)
    A = P0 * S + 19.62 * M - k * V0 / S
    V = S / (2.0 * k) * (np.sqrt(A ** 2 + 4.0 * k * (P0 * V0 / T0) * Ta) - A)
    return 2.0 * np.pi * np.sqrt(M / (k + S ** 2 * (P0 * V0 / T0) * (Ta / V ** 2)))


@dataclass(frozen=True)
class TestModel:
    name: str
    dimension: int
    domain: Domain
    evaluator: Callable

    __test__ = False

    def __call__(self, points) -> np.ndarray:
        """Evaluate at native-unit points of shape ``(N, d)``."""
        return self.evaluator(np.atleast_2d(np.asarray(points, dtype=float)))

    def on_unit_box(self, points) -> np.ndarray:
        """Evaluate at points of ``[-1, 1]^d`` mapped onto the native box."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if self.domain == unit_box(self.dimension):
            return self(pts)
        return self(affine_map(pts, unit_box(self.dimension), self.domain))


def _on_columns(f):
    def wrapped(pts):
        return f(pts[:, 0], pts[:, 1])

    return wrapped


MODELS = {
    "rosenbrock": TestModel("rosenbrock", 2, unit_box(2), _on_columns(rosenbrock)),
    "sincos": TestModel("sincos", 2, unit_box(2), _on_columns(sincos)),
    "gaussian": TestModel("gaussian", 2, unit_box(2), _on_columns(gaussian2d)),
    "piston": TestModel("piston", 7, PISTON_DOMAIN, piston),
}


def get_model(name: str) -> TestModel:
    try:
        return MODELS[name]
    except KeyError:
        raise ValueError(f"unknown model {name!r}; choose from {sorted(MODELS)}") from None
