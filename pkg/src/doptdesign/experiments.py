"""Seeded, repeated accuracy and Lebesgue experiments with CSV/JSON output."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import os
import tempfile
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .basis import MultiIndexSet, build_index_set, index_set_for_terms
from .design import ExperimentalDesign, assemble_model_matrix, get_domain, unit_box
from .lebesgue import chebyshev_roots, lebesgue_constant
from .models import get_model
from .objective import objective_value
from .optimizer import DescentConfig
from .samplers import SamplerSpec, sample
from .surrogate import RankDeficient, TestSet, fit, grid_test_set, rel_error_inf, uniform_test_set

SOBOL_SKIP_RANGE = 1024


def child_seed(master: int, repetition: int, arm: str) -> int:
    """64-bit seed that depends only on (master seed, repetition, arm name)."""
    ss = np.random.SeedSequence(entropy=int(master),
                                spawn_key=(int(repetition), zlib.crc32(arm.encode())))
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return int(hi) << 32 | int(lo)


def design_size(l: int, oversample: float = 1.0, n: int | None = None) -> int:
    if n is not None:
        if n < l:
            raise ValueError(f"n={n} is smaller than the number of terms {l}")
        return n
    if oversample < 1.0:
        raise ValueError("oversampling factor must be >= 1")
    # round first so 1.1 * 40 does not become 45
    return max(l, math.ceil(round(oversample * l, 9)))


def make_sampler_spec(kind: str, seed: int, descent_mode: str = "full",
                      candidate_factor: int = 50, maxvol_tol: float = 1e-2) -> SamplerSpec:
    """Sampler settings for one repetition seeded by ``seed``."""
    skip = 1
    if kind == "sobol":
        # Sobol is deterministic; vary the start point between repetitions
        skip = 1 + int(np.random.default_rng(seed).integers(SOBOL_SKIP_RANGE))
    return SamplerSpec(kind=kind, seed=seed, skip=skip, candidate_factor=candidate_factor,
                       tol=maxvol_tol, descent=DescentConfig(mode=descent_mode, seed=seed))


def boxplot_stats(values) -> dict:
    """Quartiles plus Tukey whiskers (1.5 IQR) of the finite values."""
    v = np.asarray([x for x in values if x is not None and np.isfinite(x)], dtype=float)
    if v.size == 0:
        return {"count": 0}
    q1, med, q3 = np.percentile(v, [25, 50, 75])
    iqr = q3 - q1
    inside = v[(v >= q1 - 1.5 * iqr) & (v <= q3 + 1.5 * iqr)]
    return {
        "count": int(v.size),
        "min": float(v.min()),
        "q1": float(q1),
        "median": float(med),
        "q3": float(q3),
        "max": float(v.max()),
        "whisker_low": float(inside.min()),
        "whisker_high": float(inside.max()),
    }


@dataclass
class ExperimentConfig:
    """One accuracy-experiment arm.

    The basis is either the full ``(dim, degree, qnorm)`` set or, when
    ``terms`` is given, the first ``terms`` indices of the smallest set that
    holds them.  The design size is ``n`` if set, else
    ``ceil(oversample * terms)``.
    """

    model: str = "gaussian"
    sampler: str = "gd"
    dim: int | None = None
    degree: int | None = None
    qnorm: float = 1.0
    terms: int | None = None
    n: int | None = None
    oversample: float = 1.0
    repetitions: int = 50
    n_test: int = 100_000
    seed: int = 0
    out: str | None = None
    descent_mode: str = "full"
    candidate_factor: int = 50
    maxvol_tol: float = 1e-2
    workers: int = 1
    timings: bool = False

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.oversample < 1.0:
            raise ValueError("oversampling factor must be >= 1")
        model = get_model(self.model)
        if self.dim is None:
            self.dim = model.dimension
        elif self.dim != model.dimension:
            raise ValueError(f"model {self.model} has dimension {model.dimension}")
        if self.degree is None and self.terms is None:
            raise ValueError("give a total degree or a number of terms")
        SamplerSpec(kind=self.sampler)

    def index_set(self) -> MultiIndexSet:
        if self.terms is not None:
            return index_set_for_terms(self.dim, self.terms, self.qnorm)
        return build_index_set(self.dim, self.degree, self.qnorm)

    @property
    def n_points(self) -> int:
        return design_size(len(self.index_set()), self.oversample, self.n)

    def sampler_spec(self, seed: int) -> SamplerSpec:
        return make_sampler_spec(self.sampler, seed, self.descent_mode,
                                 self.candidate_factor, self.maxvol_tol)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def echo(self) -> dict:
        """Config fields that influence results (no paths or worker counts)."""
        data = self.to_dict()
        for key in ("out", "workers"):
            data.pop(key)
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)}")
        return cls(**data)


RECORD_FIELDS = ["repetition", "seed", "sampler", "l", "n", "delta_inf", "status"]


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list = field(default_factory=list)

    @property
    def errors(self) -> list:
        return [r["delta_inf"] for r in self.records if r["status"] == "ok"]

    @property
    def aggregates(self) -> dict:
        stats = boxplot_stats(self.errors)
        stats["failures"] = sum(r["status"] != "ok" for r in self.records)
        return stats

    def records_csv(self) -> str:
        fields = RECORD_FIELDS + (["wall_time"] if self.config.timings else [])
        return _records_to_csv(self.records, fields)

    def summary(self) -> dict:
        return {
            "software": {"package": "doptdesign", "version": __version__},
            "config": self.config.echo(),
            "aggregates": self.aggregates,
        }


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


def _records_to_csv(records, fields) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for r in records:
        w.writerow([_fmt(r.get(k)) for k in fields])
    return buf.getvalue()


def write_atomic(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _test_set_for(config: ExperimentConfig) -> TestSet:
    return uniform_test_set(config.n_test, unit_box(config.dim),
                            child_seed(config.seed, 0, "testset"))


def _one_repetition(config: ExperimentConfig, r: int, testset: TestSet) -> dict:
    model = get_model(config.model)
    index_set = config.index_set()
    n = config.n_points
    seed = child_seed(config.seed, r, config.sampler)
    rec = {"repetition": r, "seed": seed, "sampler": config.sampler,
           "l": len(index_set), "n": n, "delta_inf": float("nan"), "status": "ok"}
    t0 = time.perf_counter()
    try:
        X = sample(config.sampler_spec(seed), index_set, n, unit_box(config.dim))
        surrogate = fit(assemble_model_matrix(X, index_set), model.on_unit_box(X.points))
        rec["delta_inf"] = rel_error_inf(model.on_unit_box, surrogate, testset)
    except (np.linalg.LinAlgError, RankDeficient, ValueError) as exc:
        rec["status"] = type(exc).__name__
    rec["wall_time"] = time.perf_counter() - t0
    return rec


def _pool_map(fn, args, workers: int):
    if workers <= 1:
        return [fn(*a) for a in args]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, *zip(*args)))


def run_accuracy_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Sample, fit and score ``config.repetitions`` times; deterministic in the seed."""
    testset = _test_set_for(config)
    args = [(config, r, testset) for r in range(config.repetitions)]
    records = _pool_map(_one_repetition, args, config.workers)
    if all(r["status"] != "ok" for r in records):
        raise RuntimeError(f"every repetition failed: {records[0]['status']}")
    return ExperimentResult(config, records)


def write_experiment(results: list[ExperimentResult], out_dir) -> None:
    out_dir = Path(out_dir)
    for res in results:
        write_atomic(out_dir / f"{res.config.sampler}_records.csv", res.records_csv())
    summary = {
        "software": {"package": "doptdesign", "version": __version__},
        "arms": {res.config.sampler: {"config": res.config.echo(),
                                      "aggregates": res.aggregates} for res in results},
    }
    write_atomic(out_dir / "summary.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")


# ----------------------------------------------------------------------------
# Lebesgue sweep

LEBESGUE_FIELDS = ["l", "sampler", "repetition", "seed", "n", "lebesgue", "status"]


def lebesgue_test_set(dim: int, n_test: int, seed: int) -> TestSet:
    if dim == 1:
        return grid_test_set(n_test)
    return uniform_test_set(n_test, unit_box(dim), child_seed(seed, 0, "testset"))


def run_lebesgue_sweep(
    sizes,
    sampler: str = "gd",
    dim: int = 1,
    qnorm: float = 1.0,
    repetitions: int = 50,
    n_test: int = 1_000_000,
    seed: int = 0,
    oversample: float = 1.0,
    descent_mode: str = "full",
    reference: bool | None = None,
) -> dict:
    """Repeated Lebesgue-constant estimates for every basis size in ``sizes``.

    In one dimension the Chebyshev-roots design is added as a reference arm
    unless ``reference`` is false.  Returns ``{"records", "aggregates"}``.
    """
    sizes = list(sizes)
    if not sizes:
        raise ValueError("sizes must be nonempty")
    if reference is None:
        reference = dim == 1
    testset = lebesgue_test_set(dim, n_test, seed)
    records = []
    for l in sizes:
        index_set = index_set_for_terms(dim, l, qnorm)
        n = design_size(l, oversample)
        for r in range(repetitions):
            s = child_seed(seed, r, f"{sampler}:{l}")
            rec = {"l": l, "sampler": sampler, "repetition": r, "seed": s, "n": n,
                   "lebesgue": float("nan"), "status": "ok"}
            try:
                X = sample(make_sampler_spec(sampler, s, descent_mode), index_set, n, unit_box(dim))
                rec["lebesgue"] = lebesgue_constant(X, index_set, testset).value
            except (np.linalg.LinAlgError, ValueError) as exc:
                rec["status"] = type(exc).__name__
            records.append(rec)
        if reference and dim == 1:
            roots = chebyshev_roots(l)[:, None]
            records.append({"l": l, "sampler": "chebyshev_roots", "repetition": 0,
                            "seed": 0, "n": l, "status": "ok",
                            "lebesgue": lebesgue_constant(roots, index_set, testset).value})
    aggregates = []
    for (l, arm) in dict.fromkeys((r["l"], r["sampler"]) for r in records):
        vals = [r["lebesgue"] for r in records
                if r["l"] == l and r["sampler"] == arm and r["status"] == "ok"]
        aggregates.append({"l": l, "sampler": arm, **boxplot_stats(vals)})
    return {"records": records, "aggregates": aggregates}


def lebesgue_csvs(sweep: dict) -> tuple[str, str]:
    agg_fields = ["l", "sampler", "count", "min", "q1", "median", "q3", "max",
                  "whisker_low", "whisker_high"]
    return (_records_to_csv(sweep["records"], LEBESGUE_FIELDS),
            _records_to_csv(sweep["aggregates"], agg_fields))


# ----------------------------------------------------------------------------
# Non-rectangular domains


def run_domain_demo(name: str, n: int = 50, p: int = 5, seed: int = 0, out=None,
                    descent_mode: str = "full") -> ExperimentalDesign:
    """Log-det descent design inside one of the built-in 2-D domains."""
    domain = get_domain(name)
    index_set = build_index_set(domain.dimension, p)
    spec = SamplerSpec(kind="gd", seed=seed, descent=DescentConfig(mode=descent_mode, seed=seed))
    X = sample(spec, index_set, n, domain)
    if out is not None:
        write_atomic(out, X.to_csv())
    return X


def random_feasible_objective(name: str, n: int, p: int, seed: int) -> float:
    """Objective of ``n`` uniform points in the named domain (a baseline)."""
    domain = get_domain(name)
    rng = np.random.default_rng(seed)
    return objective_value(domain.sample_uniform(n, rng), build_index_set(domain.dimension, p))
