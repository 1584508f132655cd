"""Experimental-design generators: LHS, Sobol, Maxvol and log-det descent."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import numpy as np
import scipy.linalg as sla

from .basis import MultiIndexSet
from .design import Domain, ExperimentalDesign, basis_matrix, unit_box
from .objective import SingularInformationMatrix
from .optimizer import DegenerateStart, DescentConfig, descend

SOBOL_BITS = 32
DIRECTION_FILE = "new-joe-kuo-6.21"
SAMPLER_KINDS = ("lhs", "sobol", "maxvol", "gd")


@dataclass(frozen=True)
class SamplerSpec:
    """Which sampler to use and its knobs.

    ``candidate_factor`` sets the Maxvol pool size as a multiple of the
    number of basis terms unless ``candidate_count`` is given.
    """

    kind: str = "gd"
    seed: int = 0
    skip: int = 1
    candidate_count: int | None = None
    candidate_factor: int = 50
    tol: float = 1e-2
    descent: DescentConfig = field(default_factory=DescentConfig)

    def __post_init__(self):
        if self.kind not in SAMPLER_KINDS:
            raise ValueError(f"unknown sampler {self.kind!r}")
        if self.skip < 0 or self.candidate_factor < 1 or self.tol <= 0:
            raise ValueError("sampler parameters must be positive")


def _into_domain(points, domain: Domain) -> np.ndarray:
    return points if type(domain) is Domain else domain.project(points)


def sample_lhs(n: int, domain: Domain, seed) -> ExperimentalDesign:
    """Latin hypercube sample on the bounding box of ``domain``.

    Each coordinate gets one point per equal-width stratum, jittered
    uniformly inside it; strata are paired across coordinates by independent
    random permutations.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    d = domain.dimension
    u = np.empty((n, d))
    for k in range(d):
        u[:, k] = (rng.permutation(n) + rng.uniform(size=n)) / n
    pts = domain.lo + u * (domain.hi - domain.lo)
    # keep the top edge inside the closed box
    pts = np.minimum(pts, domain.hi)
    return ExperimentalDesign(_into_domain(pts, domain), domain, seed=_seed_int(seed), sampler="lhs")


def _seed_int(seed):
    return seed if isinstance(seed, (int, np.integer)) else None


# ----------------------------------------------------------------------------
# Sobol


def read_direction_numbers(text: str) -> dict[int, tuple[int, int, list[int]]]:
    """Parse a Joe-Kuo table: ``dimension s a m_1 .. m_s`` per line."""
    table = {}
    for line in text.splitlines():
        parts = line.split()
        if not parts or not parts[0].isdigit():
            continue
        dim, s, a = (int(v) for v in parts[:3])
        m = [int(v) for v in parts[3:3 + s]]
        if len(m) != s:
            raise ValueError(f"dimension {dim}: expected {s} initial values")
        table[dim] = (s, a, m)
    return table


@lru_cache(maxsize=None)
def _default_table():
    text = resources.files("doptdesign").joinpath("data", DIRECTION_FILE).read_text()
    return read_direction_numbers(text)


def max_sobol_dimension() -> int:
    return max(_default_table()) if _default_table() else 1


def direction_integers(dim: int, table=None, bits: int = SOBOL_BITS) -> np.ndarray:
    """Direction numbers ``v_k * 2**bits`` for one (1-based) dimension."""
    if dim == 1:
        m = [1] * bits
    else:
        table = _default_table() if table is None else table
        if dim not in table:
            raise ValueError(f"no direction numbers for dimension {dim}")
        s, a, m = table[dim]
        m = list(m)
        for k in range(s, bits):
            new = m[k - s] ^ (m[k - s] << s)
            for j in range(1, s):
                if (a >> (s - 1 - j)) & 1:
                    new ^= m[k - j] << j
            m.append(new)
    return np.array([m[k] << (bits - 1 - k) for k in range(bits)], dtype=np.uint64)


def sobol_unit(n: int, d: int, skip: int = 1, table=None) -> np.ndarray:
    """First ``n`` Sobol points in ``[0, 1)^d`` after dropping ``skip`` points."""
    total = n + skip
    if total >= 2 ** SOBOL_BITS:
        raise ValueError("too many Sobol points requested")
    V = np.stack([direction_integers(j + 1, table) for j in range(d)])  # (d, bits)
    out = np.empty((total, d), dtype=np.uint64)
    x = np.zeros(d, dtype=np.uint64)
    out[0] = x
    for i in range(1, total):
        # Gray-code step: flip direction number of the lowest zero bit of i-1
        x = x ^ V[:, _lowest_zero_bit(i - 1)]
        out[i] = x
    return out[skip:].astype(float) / 2.0 ** SOBOL_BITS


def _lowest_zero_bit(i: int) -> int:
    c = 0
    while i & 1:
        i >>= 1
        c += 1
    return c


def sample_sobol(n: int, domain: Domain, skip: int = 1) -> ExperimentalDesign:
    """Unscrambled Sobol points mapped onto the bounding box of ``domain``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    d = domain.dimension
    if d > max_sobol_dimension():
        raise ValueError(f"Sobol direction numbers only cover d <= {max_sobol_dimension()}")
    u = sobol_unit(n, d, skip)
    pts = domain.lo + u * (domain.hi - domain.lo)
    return ExperimentalDesign(_into_domain(pts, domain), domain, sampler="sobol")


# ----------------------------------------------------------------------------
# Maxvol


def maxvol(A: np.ndarray, tol: float = 1e-2, max_iters: int = 1000) -> np.ndarray:
    """Row indices of a dominant ``r x r`` submatrix of the tall matrix ``A``.

    Starts from the pivots of a partial-pivoting LU and swaps rows while
    some coefficient of ``A @ inv(A[rows])`` exceeds ``1 + tol`` in modulus;
    each swap multiplies ``|det|`` by that coefficient.
    """
    N, r = A.shape
    if N < r:
        raise ValueError("need at least as many rows as columns")
    P, L, U = sla.lu(A)
    rows = np.argmax(P[:, :r], axis=0)
    if np.min(np.abs(np.diag(U))) <= 1e-14 * np.max(np.abs(np.diag(U))):
        raise np.linalg.LinAlgError("candidate matrix is rank deficient")
    rows = np.array(rows)
    for _ in range(max_iters):
        C = np.linalg.solve(A[rows].T, A.T).T  # A @ inv(A[rows])
        i, j = np.unravel_index(np.argmax(np.abs(C)), C.shape)
        if abs(C[i, j]) <= 1.0 + tol:
            break
        rows[j] = i
    return rows


def rect_maxvol(A: np.ndarray, n: int, tol: float = 1e-2) -> np.ndarray:
    """Greedy extension of a square maxvol set to ``n`` rows.

    Each added row ``a`` maximises ``det(S^T S + a a^T) / det(S^T S)
    = 1 + a^T (S^T S)^{-1} a`` for the current selection ``S``.
    """
    N, r = A.shape
    if n < r or n > N:
        raise ValueError(f"n={n} must lie in [{r}, {N}]")
    rows = list(maxvol(A, tol))
    chosen = np.zeros(N, dtype=bool)
    chosen[rows] = True
    S = A[rows]
    Binv = np.linalg.inv(S.T @ S)
    while len(rows) < n:
        AB = A @ Binv
        gain = np.einsum("ij,ij->i", AB, A)
        gain[chosen] = -np.inf
        i = int(np.argmax(gain))
        rows.append(i)
        chosen[i] = True
        v = AB[i]
        Binv = Binv - np.outer(v, v) / (1.0 + gain[i])
    return np.array(rows)


def sample_maxvol(
    index_set: MultiIndexSet,
    n: int,
    domain: Domain,
    candidate_count: int | None = None,
    seed=0,
    tol: float = 1e-2,
    candidates=None,
) -> ExperimentalDesign:
    """Pick ``n`` points from a candidate pool by (rectangular) maxvol.

    The pool is an LHS sample of ``candidate_count`` points unless explicit
    ``candidates`` are supplied.
    """
    m = len(index_set)
    if candidates is None:
        count = candidate_count if candidate_count is not None else 50 * m
        count = max(count, n)
        candidates = sample_lhs(count, domain, seed).points
    candidates = np.asarray(candidates, dtype=float)
    if n > candidates.shape[0]:
        raise ValueError("fewer candidates than requested points")
    if n < m:
        raise ValueError("maxvol needs n >= number of basis terms")
    if n == candidates.shape[0]:
        rows = np.arange(n)
    else:
        A = basis_matrix(candidates, index_set)
        rows = maxvol(A, tol) if n == m else rect_maxvol(A, n, tol)
    return ExperimentalDesign(candidates[rows], domain, seed=_seed_int(seed), sampler="maxvol")


# ----------------------------------------------------------------------------
# Log-det descent


def sample_gd(
    index_set: MultiIndexSet,
    n: int,
    domain: Domain,
    seed=0,
    config: DescentConfig | None = None,
    retries: int = 20,
    return_trace: bool = False,
):
    """D-optimal design by descent from an LHS start.

    Singular starting designs are redrawn with fresh child seeds up to
    ``retries`` times.
    """
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    children = ss.spawn(retries + 1)
    last = None
    for child in children:
        X0 = sample_lhs(n, domain, child)
        try:
            X, trace = descend(X0, index_set, config)
        except DegenerateStart as exc:
            last = exc
            continue
        X.seed, X.sampler = _seed_int(seed), "gd"
        return (X, trace) if return_trace else X
    raise DegenerateStart(f"no nonsingular start after {retries + 1} draws") from last


def sample(
    spec: SamplerSpec,
    index_set: MultiIndexSet,
    n: int,
    domain: Domain | None = None,
) -> ExperimentalDesign:
    """Dispatch on ``spec.kind``."""
    domain = domain or unit_box(index_set.dimension)
    if spec.kind == "lhs":
        return sample_lhs(n, domain, spec.seed)
    if spec.kind == "sobol":
        return sample_sobol(n, domain, spec.skip)
    if spec.kind == "maxvol":
        return sample_maxvol(index_set, n, domain, spec.candidate_count
                             or spec.candidate_factor * len(index_set), spec.seed, spec.tol)
    return sample_gd(index_set, n, domain, spec.seed, spec.descent)


__all__ = [
    "SamplerSpec",
    "SingularInformationMatrix",
    "direction_integers",
    "maxvol",
    "rect_maxvol",
    "read_direction_numbers",
    "sample",
    "sample_gd",
    "sample_lhs",
    "sample_maxvol",
    "sample_sobol",
    "sobol_unit",
]
