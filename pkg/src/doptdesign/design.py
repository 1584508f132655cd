"""Domains, experimental designs and model-matrix assembly."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .basis import MultiIndexSet, chebyshev_table

MEMBERSHIP_TOL = 1e-12


class Domain:
    """Admissible input region: a bounding box plus membership and projection.

    Subclasses override :meth:`contains` and :meth:`project`; both operate
    row-wise on arrays of shape ``(..., d)``.
    """

    kind = "box"

    def __init__(self, lo, hi):
        lo = np.asarray(lo, dtype=float).ravel()
        hi = np.asarray(hi, dtype=float).ravel()
        if lo.shape != hi.shape or np.any(lo >= hi):
            raise ValueError("domain bounds need lo < hi componentwise")
        self.lo, self.hi = lo, hi

    @property
    def dimension(self) -> int:
        return self.lo.size

    def contains(self, points, tol: float = MEMBERSHIP_TOL):
        pts = np.asarray(points, dtype=float)
        return np.all((pts >= self.lo - tol) & (pts <= self.hi + tol), axis=-1)

    def project(self, points):
        return np.clip(np.asarray(points, dtype=float), self.lo, self.hi)

    def sample_uniform(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Uniform points in the domain by rejection from the bounding box."""
        out = np.empty((0, self.dimension))
        while out.shape[0] < n:
            cand = rng.uniform(self.lo, self.hi, size=(2 * n, self.dimension))
            out = np.vstack([out, cand[self.contains(cand)]])
        return out[:n]

    def to_dict(self) -> dict:
        return {"kind": self.kind, "lo": self.lo.tolist(), "hi": self.hi.tolist()}

    def __eq__(self, other):
        return (
            type(self) is type(other)
            and np.array_equal(self.lo, other.lo)
            and np.array_equal(self.hi, other.hi)
        )

    def __repr__(self):
        return f"{type(self).__name__}(lo={self.lo.tolist()}, hi={self.hi.tolist()})"


BoxDomain = Domain


def unit_box(d: int) -> Domain:
    return Domain(-np.ones(d), np.ones(d))


class DiscDomain(Domain):
    """Closed unit disc."""

    kind = "circle"

    def __init__(self):
        super().__init__([-1.0, -1.0], [1.0, 1.0])

    def contains(self, points, tol: float = MEMBERSHIP_TOL):
        pts = np.asarray(points, dtype=float)
        return np.linalg.norm(pts, axis=-1) <= 1.0 + tol

    def project(self, points):
        pts = np.array(points, dtype=float)
        r = np.linalg.norm(pts, axis=-1, keepdims=True)
        # rescaled points may land a few ulps outside; leave those alone
        out = r > 1.0 + 4 * np.finfo(float).eps
        return np.where(out, pts / np.where(out, r, 1.0), pts)


class ThreeQuarterDiscDomain(DiscDomain):
    """Unit disc without the open quadrant ``x > 0, y < 0``."""

    kind = "three_quarters"

    def contains(self, points, tol: float = MEMBERSHIP_TOL):
        pts = np.asarray(points, dtype=float)
        cut = (pts[..., 0] > tol) & (pts[..., 1] < -tol)
        return super().contains(pts, tol) & ~cut

    def project(self, points):
        pts = super().project(points)
        x, y = pts[..., 0], pts[..., 1]
        cut = (x > 0) & (y < 0)
        # nearest boundary ray: positive x axis or negative y axis
        to_xaxis = cut & (-y <= x)
        to_yaxis = cut & ~to_xaxis
        pts[..., 1] = np.where(to_xaxis, 0.0, y)
        pts[..., 0] = np.where(to_yaxis, 0.0, x)
        return pts


class DiamondDomain(Domain):
    """Unit L1 ball ``|x| + |y| <= 1``."""

    kind = "diamond"

    def __init__(self):
        super().__init__([-1.0, -1.0], [1.0, 1.0])

    def contains(self, points, tol: float = MEMBERSHIP_TOL):
        pts = np.asarray(points, dtype=float)
        return np.abs(pts).sum(axis=-1) <= 1.0 + tol

    def project(self, points):
        pts = np.array(points, dtype=float)
        flat = pts.reshape(-1, pts.shape[-1])
        out = np.array([_project_l1_ball(v) for v in flat])
        return out.reshape(pts.shape)


def _project_l1_ball(v, radius: float = 1.0):
    # sort-based Euclidean projection onto the L1 ball
    a = np.abs(v)
    if a.sum() <= radius:
        return v.copy()
    u = np.sort(a)[::-1]
    css = np.cumsum(u)
    k = np.arange(1, u.size + 1)
    rho = np.nonzero(u * k > css - radius)[0][-1]
    theta = (css[rho] - radius) / (rho + 1.0)
    return np.sign(v) * np.maximum(a - theta, 0.0)


DOMAINS = {
    "circle": DiscDomain,
    "three_quarters": ThreeQuarterDiscDomain,
    "diamond": DiamondDomain,
}


def get_domain(name: str) -> Domain:
    try:
        return DOMAINS[name]()
    except KeyError:
        raise ValueError(f"unknown domain {name!r}; choose from {sorted(DOMAINS)}") from None


def domain_from_dict(data: dict) -> Domain:
    if data["kind"] == "box":
        return Domain(data["lo"], data["hi"])
    return get_domain(data["kind"])


@dataclass
class ExperimentalDesign:
    """An ``n x d`` matrix of input points living in ``domain``."""

    points: np.ndarray
    domain: Domain
    seed: int | None = None
    sampler: str | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, self.domain.dimension)
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ValueError("design needs at least one point")
        if pts.shape[1] != self.domain.dimension:
            raise ValueError("design and domain dimension differ")
        if not np.all(np.isfinite(pts)):
            raise ValueError("design contains non-finite entries")
        if not np.all(self.domain.contains(pts, 1e-9)):
            raise ValueError("design has points outside its domain")
        self.points = pts

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    def is_feasible(self, tol: float = MEMBERSHIP_TOL) -> bool:
        return bool(np.all(self.domain.contains(self.points, tol)))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([f"x{k + 1}" for k in range(self.dimension)])
        for row in self.points:
            writer.writerow([repr(float(v)) for v in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, domain: Domain | None = None) -> "ExperimentalDesign":
        rows = list(csv.reader(io.StringIO(text)))
        pts = np.array([[float(v) for v in r] for r in rows[1:] if r])
        if domain is None:
            domain = unit_box(pts.shape[1])
        return cls(pts, domain)

    def to_dict(self) -> dict:
        return {
            "domain": self.domain.to_dict(),
            "seed": self.seed,
            "sampler": self.sampler,
            "points": self.points.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentalDesign":
        data = json.loads(text)
        return cls(
            np.asarray(data["points"], dtype=float),
            domain_from_dict(data["domain"]),
            seed=data.get("seed"),
            sampler=data.get("sampler"),
        )


@dataclass
class ModelMatrix:
    entries: np.ndarray
    index_set: MultiIndexSet = field(repr=False)

    @property
    def shape(self):
        return self.entries.shape


def _points(X) -> np.ndarray:
    if isinstance(X, ExperimentalDesign):
        return X.points
    return np.atleast_2d(np.asarray(X, dtype=float))


def basis_matrix(points, index_set: MultiIndexSet) -> np.ndarray:
    """Raw ``(N, |A|)`` array of tensor-product basis values at ``points``."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != index_set.dimension:
        raise ValueError(
            f"points have dimension {pts.shape[1]}, basis has {index_set.dimension}"
        )
    table = chebyshev_table(pts, index_set.max_degree)  # (N, d, deg+1)
    out = np.ones((pts.shape[0], len(index_set)))
    for k in range(index_set.dimension):
        out *= table[:, k, index_set.indices[:, k]]
    return out


def basis_matrix_with_derivs(points, index_set: MultiIndexSet):
    """Basis values ``(N, |A|)`` and partial derivatives ``(d, N, |A|)``."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != index_set.dimension:
        raise ValueError("dimension mismatch between points and basis")
    vals, ders = chebyshev_table(pts, index_set.max_degree, deriv=True)
    d = index_set.dimension
    factors = [vals[:, k, index_set.indices[:, k]] for k in range(d)]
    dfactors = [ders[:, k, index_set.indices[:, k]] for k in range(d)]
    A = np.prod(factors, axis=0) if d > 1 else factors[0].copy()
    dA = np.empty((d,) + A.shape)
    for l in range(d):
        term = dfactors[l].copy()
        for q in range(d):
            if q != l:
                term *= factors[q]
        dA[l] = term
    return A, dA


def assemble_model_matrix(X, index_set: MultiIndexSet) -> ModelMatrix:
    """Model matrix with ``A[i, j] = prod_k T_{alpha_j[k]}(x_i[k])``."""
    return ModelMatrix(basis_matrix(_points(X), index_set), index_set)


def project_to_domain(point, domain: Domain) -> np.ndarray:
    return domain.project(point)


def affine_map(point, src: Domain, dst: Domain, tol: float = 1e-12) -> np.ndarray:
    """Componentwise linear map from box ``src`` onto box ``dst``.

    ``tol`` is relative to the width of each source interval.
    """
    x = np.asarray(point, dtype=float)
    width = src.hi - src.lo
    slack = tol * width
    if np.any(x < src.lo - slack) or np.any(x > src.hi + slack):
        raise ValueError("point lies outside the source box")
    return dst.lo + (x - src.lo) / width * (dst.hi - dst.lo)
