"""Negative log-determinant of the information matrix and its gradient."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .basis import MultiIndexSet
from .design import _points, basis_matrix, basis_matrix_with_derivs

PIVOT_TOL = 1e-12
CAPACITANCE_TOL = 1e-12


class SingularInformationMatrix(np.linalg.LinAlgError):
    """``A^T A`` is numerically rank deficient (degenerate design)."""


class UpdateSingular(np.linalg.LinAlgError):
    """The 2x2 capacitance matrix of a row replacement is singular."""


def cholesky_info(B: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor of ``B`` with relative-pivot singularity check."""
    if B.shape[0] == 0:
        raise SingularInformationMatrix("empty information matrix")
    try:
        L = np.linalg.cholesky(B)
    except np.linalg.LinAlgError as exc:
        raise SingularInformationMatrix("information matrix not positive definite") from exc
    pivots = np.diag(L) ** 2
    if not np.all(np.isfinite(pivots)) or pivots.min() < PIVOT_TOL * pivots.max():
        raise SingularInformationMatrix(
            f"pivot ratio {pivots.min() / pivots.max():.3e} below {PIVOT_TOL}"
        )
    return L


def logdet_from_cholesky(L: np.ndarray) -> float:
    return 2.0 * float(np.sum(np.log(np.diag(L))))


@dataclass
class LogDetState:
    """Information matrix ``B = A^T A`` with its inverse and log-determinant.

    ``updates`` counts rank-2 corrections applied since the last full
    factorization.
    """

    model_matrix: np.ndarray
    info_matrix: np.ndarray
    inverse: np.ndarray
    logdet: float
    updates: int = 0

    @classmethod
    def from_model_matrix(cls, A: np.ndarray) -> "LogDetState":
        A = np.array(A, dtype=float)
        B = A.T @ A
        L = cholesky_info(B)
        inv = sla.cho_solve((L, True), np.eye(B.shape[0]))
        inv = 0.5 * (inv + inv.T)
        return cls(A, B, inv, logdet_from_cholesky(L))

    @classmethod
    def from_design(cls, X, index_set: MultiIndexSet) -> "LogDetState":
        return cls.from_model_matrix(basis_matrix(_points(X), index_set))

    @property
    def objective(self) -> float:
        return -self.logdet

    def refactorize(self) -> "LogDetState":
        return LogDetState.from_model_matrix(self.model_matrix)


def objective_value(X, index_set: MultiIndexSet) -> float:
    """``-log det(A^T A)`` for the design ``X`` via a Cholesky factorization."""
    A = basis_matrix(_points(X), index_set)
    if A.shape[0] < A.shape[1]:
        raise SingularInformationMatrix(
            f"{A.shape[0]} points cannot determine {A.shape[1]} coefficients"
        )
    return -logdet_from_cholesky(cholesky_info(A.T @ A))


def gradient(X, index_set: MultiIndexSet, state: LogDetState | None = None) -> np.ndarray:
    """Gradient of ``-log det(A^T A)`` with respect to every design coordinate.

    Entry ``(k, l)`` is

        -sum_ij Binv[j, i] * d(A[k, i] * A[k, j]) / d x[k, l]

    where only row ``k`` of ``A`` depends on point ``k`` and the derivative of
    the product hits the univariate factor in coordinate ``l``.  Contracting
    over ``j`` first gives ``-2 * sum_i (A Binv)[k, i] * dA_l[k, i]``.
    """
    pts = _points(X)
    A, dA = basis_matrix_with_derivs(pts, index_set)
    if state is None:
        state = LogDetState.from_model_matrix(A)
    AB = A @ state.inverse
    return -2.0 * np.einsum("ki,lki->kl", AB, dA)


def gradient_reference(X, index_set: MultiIndexSet, Binv: np.ndarray) -> np.ndarray:
    """Term-by-term double sum over basis pairs; slow, used to cross-check."""
    from .basis import eval_univariate, eval_univariate_deriv

    pts = _points(X)
    fam = index_set.family
    alphas = index_set.indices
    n, d = pts.shape
    m = len(index_set)
    G = np.zeros((n, d))
    for k in range(n):
        psi = np.array([[eval_univariate(fam, int(alphas[i, q]), pts[k, q])
                         for q in range(d)] for i in range(m)])
        dpsi = np.array([[eval_univariate_deriv(fam, int(alphas[i, q]), pts[k, q])
                          for q in range(d)] for i in range(m)])
        for l in range(d):
            total = 0.0
            for i in range(m):
                for j in range(m):
                    bracket = dpsi[i, l] * psi[j, l] + psi[i, l] * dpsi[j, l]
                    rest = 1.0
                    for q in range(d):
                        if q != l:
                            rest *= psi[i, q] * psi[j, q]
                    total += Binv[j, i] * bracket * rest
            G[k, l] = -total
    return G


def smw_update(state: LogDetState, row: int, new_row) -> LogDetState:
    """Replace row ``row`` of the model matrix and update ``B^{-1}`` in O(|A|^2).

    With ``U = [a_new, a_old]`` and ``V = [a_new; -a_old]`` the new
    information matrix is ``B + U V`` and Sherman-Morrison-Woodbury gives the
    inverse through the 2x2 capacitance matrix ``I + V B^{-1} U``, whose
    determinant is also the ratio ``det B_new / det B``.
    """
    a_new = np.asarray(new_row, dtype=float)
    a_old = state.model_matrix[row]
    U = np.column_stack([a_new, a_old])
    V = np.vstack([a_new, -a_old])
    BinvU = state.inverse @ U
    VBinv = V @ state.inverse
    cap = np.eye(2) + V @ BinvU
    det_cap = cap[0, 0] * cap[1, 1] - cap[0, 1] * cap[1, 0]
    if not np.isfinite(det_cap) or det_cap <= CAPACITANCE_TOL:
        raise UpdateSingular(f"capacitance determinant {det_cap:.3e}")
    inv = state.inverse - BinvU @ np.linalg.solve(cap, VBinv)
    inv = 0.5 * (inv + inv.T)
    A = state.model_matrix.copy()
    A[row] = a_new
    B = state.info_matrix + np.outer(a_new, a_new) - np.outer(a_old, a_old)
    return LogDetState(A, B, inv, state.logdet + float(np.log(det_cap)), state.updates + 1)


def logdet_change(state: LogDetState, row: int, new_row) -> float:
    """``log det B_new - log det B`` for a prospective row replacement, or -inf."""
    a_new = np.asarray(new_row, dtype=float)
    a_old = state.model_matrix[row]
    Ba = state.inverse @ a_new
    Bo = state.inverse @ a_old
    # I + V B^{-1} U with U = [a_new, a_old], V = [a_new; -a_old]
    c00 = 1.0 + a_new @ Ba
    c01 = a_new @ Bo
    c10 = -(a_old @ Ba)
    c11 = 1.0 - a_old @ Bo
    det_cap = c00 * c11 - c01 * c10
    if not np.isfinite(det_cap) or det_cap <= CAPACITANCE_TOL:
        return -np.inf
    return float(np.log(det_cap))
