"""Lebesgue constant of the least-squares projector, estimated on a point set."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .basis import MultiIndexSet
from .design import _points, basis_matrix
from .objective import cholesky_info
from .surrogate import TestSet

CHUNK = 50_000


@dataclass
class LebesgueEstimate:
    value: float
    argmax: np.ndarray
    testset: dict


def lebesgue_constant(X, index_set: MultiIndexSet, testset: TestSet) -> LebesgueEstimate:
    """Max over test points of ``|| Psi(x) (A^T A)^{-1} A^T ||_1``.

    The operator rows come from triangular solves with the Cholesky factor
    of ``A^T A``; the inverse is never formed.
    """
    A = basis_matrix(_points(X), index_set)
    L = cholesky_info(A.T @ A)
    # Psi B^{-1} A^T = (L^{-1} Psi^T)^T (L^{-1} A^T)
    W = sla.solve_triangular(L, A.T, lower=True)
    best, where = -np.inf, 0
    pts = testset.points
    for start in range(0, pts.shape[0], CHUNK):
        chunk = pts[start:start + CHUNK]
        Z = sla.solve_triangular(L, basis_matrix(chunk, index_set).T, lower=True)
        norms = np.abs(Z.T @ W).sum(axis=1)
        i = int(np.argmax(norms))
        if norms[i] > best:
            best, where = float(norms[i]), start + i
    return LebesgueEstimate(best, pts[where].copy(), testset.descriptor)


def chebyshev_roots(n: int) -> np.ndarray:
    """Roots of ``T_n`` in increasing order."""
    k = np.arange(n)
    return np.sort(np.cos((2 * k + 1) * np.pi / (2 * n)))
