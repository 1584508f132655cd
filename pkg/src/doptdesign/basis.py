"""Chebyshev polynomials and multi-index sets for tensor-product bases."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class BasisFamily(str, Enum):
    CHEBYSHEV = "chebyshev"


def eval_univariate(family: BasisFamily, degree: int, x: float) -> float:
    """Evaluate ``T_degree(x)`` with the three-term recurrence."""
    _check_family(family)
    if degree < 0:
        raise ValueError("degree must be non-negative")
    if degree == 0:
        return 1.0
    t_prev, t = 1.0, float(x)
    for _ in range(degree - 1):
        t_prev, t = t, 2.0 * x * t - t_prev
    return t


def eval_univariate_deriv(family: BasisFamily, degree: int, x: float) -> float:
    """Derivative of ``T_degree`` at ``x`` from the differentiated recurrence."""
    _check_family(family)
    if degree < 0:
        raise ValueError("degree must be non-negative")
    if degree == 0:
        return 0.0
    t_prev, t = 1.0, float(x)
    dt_prev, dt = 0.0, 1.0
    for _ in range(degree - 1):
        dt_prev, dt = dt, 2.0 * t + 2.0 * x * dt - dt_prev
        t_prev, t = t, 2.0 * x * t - t_prev
    return dt


def chebyshev_table(x, max_degree: int, deriv: bool = False):
    """Values (and optionally derivatives) of T_0..T_max_degree at every entry of ``x``.

    Parameters
    ----------
    x : array_like
        Evaluation points of any shape.
    max_degree : int
        Highest degree to tabulate.
    deriv : bool
        Also return the first derivatives.

    Returns
    -------
    values : ndarray, shape ``x.shape + (max_degree + 1,)``
    derivs : ndarray, same shape, only when ``deriv`` is true
    """
    x = np.asarray(x, dtype=float)
    vals = np.empty(x.shape + (max_degree + 1,))
    vals[..., 0] = 1.0
    if max_degree >= 1:
        vals[..., 1] = x
    for i in range(1, max_degree):
        vals[..., i + 1] = 2.0 * x * vals[..., i] - vals[..., i - 1]
    if not deriv:
        return vals
    ders = np.empty_like(vals)
    ders[..., 0] = 0.0
    if max_degree >= 1:
        ders[..., 1] = 1.0
    for i in range(1, max_degree):
        ders[..., i + 1] = 2.0 * vals[..., i] + 2.0 * x * ders[..., i] - ders[..., i - 1]
    return vals, ders


def _check_family(family) -> None:
    if BasisFamily(family) is not BasisFamily.CHEBYSHEV:
        raise ValueError(f"unsupported basis family {family!r}")


@dataclass(frozen=True)
class MultiIndexSet:
    """Ordered set of multi-indices defining a tensor-product polynomial basis.

    The order is graded lexicographic: by total degree first, then
    lexicographically descending in the leading components, so that for
    ``d=2`` the sequence starts ``(0,0), (1,0), (0,1), (2,0), ...``.
    """

    indices: np.ndarray
    dimension: int
    total_degree: int
    qnorm: float = 1.0
    family: BasisFamily = field(default=BasisFamily.CHEBYSHEV)

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64).reshape(-1, self.dimension)
        idx.setflags(write=False)
        object.__setattr__(self, "indices", idx)

    def __len__(self) -> int:
        return self.indices.shape[0]

    def __iter__(self):
        return (tuple(int(v) for v in row) for row in self.indices)

    def __contains__(self, alpha) -> bool:
        alpha = tuple(int(v) for v in alpha)
        return any(alpha == row for row in self)

    @property
    def max_degree(self) -> int:
        return int(self.indices.max()) if len(self) else 0

    def to_dict(self) -> dict:
        return {
            "d": self.dimension,
            "p": self.total_degree,
            "q": self.qnorm,
            "family": self.family.value,
            "indices": self.indices.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "MultiIndexSet":
        return cls(
            indices=np.asarray(data["indices"], dtype=np.int64),
            dimension=int(data["d"]),
            total_degree=int(data["p"]),
            qnorm=float(data["q"]),
            family=BasisFamily(data.get("family", "chebyshev")),
        )

    @classmethod
    def from_json(cls, text: str) -> "MultiIndexSet":
        return cls.from_dict(json.loads(text))


def _graded_lex_key(alpha):
    return (sum(alpha), tuple(-a for a in alpha))


def build_index_set(d: int, p: int, q: float = 1.0) -> MultiIndexSet:
    """All multi-indices with ``sum(alpha_i**q) <= p**q``, graded-lex ordered."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if p < 0:
        raise ValueError("total degree must be >= 0")
    if not 0.0 < q <= 1.0:
        raise ValueError("q must lie in (0, 1]")
    # any component > p already violates the bound for q <= 1
    bound = float(p) ** q * (1.0 + 1e-12)
    powers = np.arange(p + 1, dtype=float) ** q
    keep = []
    for alpha in itertools.product(range(p + 1), repeat=d):
        if sum(alpha) > p:
            continue
        if q == 1.0 or powers[list(alpha)].sum() <= bound:
            keep.append(alpha)
    keep.sort(key=_graded_lex_key)
    return MultiIndexSet(np.array(keep, dtype=np.int64).reshape(-1, d), d, p, q)


def truncate_to_size(index_set: MultiIndexSet, l: int) -> MultiIndexSet:
    """Keep the first ``l`` indices of the graded ordering."""
    if not 1 <= l <= len(index_set):
        raise ValueError(f"l={l} outside [1, {len(index_set)}]")
    return MultiIndexSet(
        index_set.indices[:l].copy(),
        index_set.dimension,
        index_set.total_degree,
        index_set.qnorm,
        index_set.family,
    )


def index_set_for_terms(d: int, l: int, q: float = 1.0) -> MultiIndexSet:
    """Smallest-degree q-norm set with at least ``l`` terms, truncated to ``l``."""
    if l < 1:
        raise ValueError("l must be >= 1")
    p = 0
    while True:
        full = build_index_set(d, p, q)
        if len(full) >= l:
            return truncate_to_size(full, l)
        p += 1
