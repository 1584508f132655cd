"""Least-squares polynomial surrogates and their relative max-norm error."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .basis import MultiIndexSet
from .design import Domain, ModelMatrix, basis_matrix, domain_from_dict, unit_box


class RankDeficient(np.linalg.LinAlgError):
    pass


class ZeroDenominator(ZeroDivisionError):
    pass


@dataclass
class Surrogate:
    coefficients: np.ndarray
    index_set: MultiIndexSet
    training_points: np.ndarray | None = None

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=float).ravel()
        if self.coefficients.size != len(self.index_set):
            raise ValueError("one coefficient per basis term is required")

    def __call__(self, points) -> np.ndarray:
        return basis_matrix(points, self.index_set) @ self.coefficients

    def to_json(self) -> str:
        return json.dumps(
            {
                "basis": self.index_set.to_dict(),
                "coefficients": [float(c) for c in self.coefficients],
            },
            indent=1,
        )

    @classmethod
    def from_json(cls, text: str) -> "Surrogate":
        data = json.loads(text)
        return cls(np.asarray(data["coefficients"]), MultiIndexSet.from_dict(data["basis"]))


@dataclass
class TestSet:
    points: np.ndarray
    descriptor: dict

    __test__ = False  # not a pytest class

    @property
    def size(self) -> int:
        return self.points.shape[0]


def uniform_test_set(n_test: int, domain: Domain, seed) -> TestSet:
    rng = np.random.default_rng(seed)
    pts = domain.sample_uniform(n_test, rng)
    return TestSet(pts, {"sampler": "uniform", "seed": seed if isinstance(seed, int) else None,
                         "size": n_test, "domain": domain.to_dict()})


def grid_test_set(n_test: int, lo: float = -1.0, hi: float = 1.0) -> TestSet:
    pts = np.linspace(lo, hi, n_test)[:, None]
    return TestSet(pts, {"sampler": "grid", "size": n_test,
                         "domain": unit_box(1).to_dict() if (lo, hi) == (-1.0, 1.0)
                         else {"kind": "box", "lo": [lo], "hi": [hi]}})


def fit(A: ModelMatrix, y) -> Surrogate:
    """Least-squares coefficients from a column-pivoted QR of the model matrix."""
    M = A.entries
    y = np.asarray(y, dtype=float).ravel()
    n, m = M.shape
    if y.size != n:
        raise ValueError("one response per design point is required")
    if n < m:
        raise RankDeficient(f"{n} points for {m} coefficients")
    Q, R, piv = sla.qr(M, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    if diag[-1] <= max(n, m) * np.finfo(float).eps * diag[0]:
        raise RankDeficient("model matrix is numerically rank deficient")
    c = np.empty(m)
    c[piv] = sla.solve_triangular(R, Q.T @ y)
    return Surrogate(c, A.index_set)


def evaluate(s: Surrogate, x) -> float | np.ndarray:
    """Surrogate value at one point (scalar) or at rows of a 2-D array."""
    x = np.asarray(x, dtype=float)
    vals = s(np.atleast_2d(x))
    return float(vals[0]) if x.ndim == 1 else vals


def rel_error_inf(f, s: Surrogate, testset: TestSet) -> float:
    """``max |f - s| / max |f|`` over the test points; ``f`` maps (N, d) to (N,)."""
    fx = np.asarray(f(testset.points), dtype=float).ravel()
    denom = np.max(np.abs(fx))
    if denom == 0:
        raise ZeroDenominator("model vanishes on the whole test set")
    return float(np.max(np.abs(fx - s(testset.points))) / denom)
