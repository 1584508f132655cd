"""Projected gradient descent on ``-log det(A^T A)``.

Two modes are provided: ``full`` moves every design point along the
projected gradient, ``block_coordinate`` moves only the point with the
largest L1 gradient row and keeps ``B^{-1}`` current through rank-2
updates.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .basis import MultiIndexSet
from .design import ExperimentalDesign, basis_matrix
from .objective import (
    LogDetState,
    SingularInformationMatrix,
    UpdateSingular,
    gradient,
    logdet_change,
    smw_update,
)

MIN_STEP = 1e-14
REFACTOR_EVERY = 32


class DegenerateStart(ValueError):
    """The starting design has a singular information matrix."""


@dataclass(frozen=True)
class DescentConfig:
    max_iterations: int = 5000
    objective_tolerance: float = 1e-8
    gradient_tolerance: float = 1e-7
    initial_step: float = 0.1
    backtracking: float = 0.5
    armijo: float = 1e-4
    mode: str = "full"
    seed: int = 0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.objective_tolerance <= 0 or self.gradient_tolerance <= 0:
            raise ValueError("tolerances must be positive")
        if not 0.0 < self.backtracking < 1.0:
            raise ValueError("backtracking factor must lie in (0, 1)")
        if self.initial_step <= 0 or self.armijo <= 0:
            raise ValueError("initial_step and armijo must be positive")
        if self.mode not in ("full", "block_coordinate"):
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass
class DescentTrace:
    iterations: list = field(default_factory=list)
    objectives: list = field(default_factory=list)
    steps: list = field(default_factory=list)
    rows: list = field(default_factory=list)
    status: str = "max_iterations"

    def record(self, it: int, objective: float, step: float, row: int | None = None):
        self.iterations.append(it)
        self.objectives.append(objective)
        self.steps.append(step)
        self.rows.append(-1 if row is None else row)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["iteration", "objective", "step", "row"])
        for rec in zip(self.iterations, self.objectives, self.steps, self.rows):
            w.writerow([rec[0], repr(float(rec[1])), repr(float(rec[2])), rec[3]])
        return buf.getvalue()


def select_row(G) -> int:
    """Row with the largest L1 norm; ties go to the smallest index."""
    G = np.asarray(G, dtype=float)
    return int(np.argmax(np.abs(G).sum(axis=1)))


def _converged(w_old: float, w_new: float, tol: float) -> bool:
    return (w_old - w_new) < tol * max(abs(w_old), 1.0)


def descend(
    X0: ExperimentalDesign,
    index_set: MultiIndexSet,
    config: DescentConfig | None = None,
) -> tuple[ExperimentalDesign, DescentTrace]:
    """Minimise ``-log det(A^T A)`` starting from ``X0`` within its domain.

    Returns the final design and a trace of accepted iterations.  Every
    iterate is projected onto ``X0.domain``.
    """
    config = config or DescentConfig()
    domain = X0.domain
    X = domain.project(X0.points)
    try:
        state = LogDetState.from_design(X, index_set)
    except SingularInformationMatrix as exc:
        raise DegenerateStart(str(exc)) from exc
    trace = DescentTrace()
    trace.record(0, state.objective, 0.0)
    if config.mode == "full":
        X = _descend_full(X, domain, index_set, state, config, trace)
    else:
        X = _descend_block(X, domain, index_set, state, config, trace)
    return ExperimentalDesign(X, domain, seed=X0.seed, sampler=X0.sampler), trace


def _descend_full(X, domain, index_set, state, config, trace):
    w = state.objective
    step = config.initial_step * config.backtracking
    for it in range(1, config.max_iterations + 1):
        G = gradient(X, index_set, state)
        if np.max(np.abs(X - domain.project(X - G))) < config.gradient_tolerance:
            trace.status = "converged"
            return X
        # start from twice the last accepted step so small gradients still move
        t = step / config.backtracking
        while True:
            Xt = domain.project(X - t * G)
            D = X - Xt
            try:
                trial = LogDetState.from_design(Xt, index_set)
                wt = trial.objective
            except SingularInformationMatrix:
                wt = np.inf
            if wt <= w - config.armijo * float(np.sum(G * D)) and wt < w:
                break
            t *= config.backtracking
            if t < MIN_STEP:
                trace.status = "converged"
                return X
        X, state, w_old, w = Xt, trial, w, wt
        step = t
        trace.record(it, w, t)
        if _converged(w_old, w, config.objective_tolerance):
            trace.status = "converged"
            return X
    trace.status = "max_iterations"
    return X


def _descend_block(X, domain, index_set, state, config, trace):
    X = X.copy()
    w = state.objective
    steps = np.full(X.shape[0], config.initial_step * config.backtracking)
    for it in range(1, config.max_iterations + 1):
        G = gradient(X, index_set, state)
        # rank rows by the feasible part of the gradient so a point pinned
        # at the boundary does not stall the heuristic
        P = X - domain.project(X - G)
        if np.max(np.abs(P)) < config.gradient_tolerance:
            trace.status = "converged"
            return X
        l = select_row(P)
        g = G[l]
        t = steps[l] / config.backtracking
        while True:
            xt = domain.project(X[l] - t * g)
            dx = X[l] - xt
            a_new = basis_matrix(xt[None, :], index_set)[0]
            delta = logdet_change(state, l, a_new)
            wt = w - delta
            if wt <= w - config.armijo * float(g @ dx) and wt < w:
                break
            t *= config.backtracking
            if t < MIN_STEP:
                trace.status = "converged"
                return X
        steps[l] = t
        try:
            state = smw_update(state, l, a_new)
        except UpdateSingular:
            state = None
        X[l] = xt
        if state is None or state.updates >= REFACTOR_EVERY:
            try:
                state = LogDetState.from_design(X, index_set)
            except SingularInformationMatrix as exc:
                raise UpdateSingular("refactorization failed after update") from exc
        w_old, w = w, state.objective
        trace.record(it, w, t, l)
        if _converged(w_old, w, config.objective_tolerance):
            trace.status = "converged"
            return X
    trace.status = "max_iterations"
    return X
