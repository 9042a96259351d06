"""Core experiment types and agent-level (cluster-free) computations.

Indices are 0-based everywhere; agent ``j`` is row ``j`` of every step's
measurement matrix, in the order the agents were declared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError

Vector = tuple[float, ...]
Matrix = tuple[Vector, ...]


def _as_float(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float, np.integer, np.floating)):
        raise ValidationError(f"{where}: expected a number, got {type(value).__name__}")
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(f"{where}: non-finite value {value!r}")
    return value


def _check_unique(names: Sequence[str], kind: str) -> tuple[str, ...]:
    names = tuple(names)
    if not names:
        raise ValidationError(f"at least one {kind} is required")
    seen = set()
    for name in names:
        if not isinstance(name, str):
            raise ValidationError(f"{kind} names must be strings, got {name!r}")
        if name in seen:
            raise ValidationError(f"duplicate {kind} name {name!r}")
        seen.add(name)
    return names


@dataclass(frozen=True)
class Step:
    index: int
    independent_values: Vector
    measurements: Matrix

    def matrix(self) -> np.ndarray:
        return np.array(self.measurements, dtype=float).reshape(len(self.measurements), -1)


@dataclass(frozen=True)
class Experiment:
    """Full measurement record: M agents x N outcomes over T steps.

    Construction normalises all numbers to Python floats and validates the
    shape, naming and finiteness invariants; an invalid record never exists.
    """

    agents: tuple[str, ...]
    outcomes: tuple[str, ...]
    independents: tuple[str, ...]
    steps: tuple[Step, ...]

    def __post_init__(self):
        agents = _check_unique(self.agents, "agent")
        outcomes = _check_unique(self.outcomes, "outcome")
        independents = _check_unique(self.independents, "independent")
        if not self.steps:
            raise ValidationError("at least one step is required")
        m, n, k = len(agents), len(outcomes), len(independents)
        steps = []
        for t, step in enumerate(self.steps):
            if isinstance(step, Step):
                ivs, rows = step.independent_values, step.measurements
            else:
                ivs, rows = step
            ivs = tuple(ivs)
            if len(ivs) != k:
                raise ValidationError(
                    f"step {t}: expected {k} independent values, got {len(ivs)}")
            ivs = tuple(_as_float(v, f"step {t}, independent {independents[i]!r}")
                        for i, v in enumerate(ivs))
            rows = tuple(rows)
            if len(rows) != m:
                raise ValidationError(f"step {t}: expected {m} measurement rows, got {len(rows)}")
            clean = []
            for j, row in enumerate(rows):
                row = tuple(row)
                if len(row) != n:
                    raise ValidationError(
                        f"step {t}: row for agent {agents[j]!r} has {len(row)} values, expected {n}")
                clean.append(tuple(
                    _as_float(v, f"step {t}, agent {agents[j]!r}, outcome {outcomes[i]!r}")
                    for i, v in enumerate(row)))
            steps.append(Step(t, ivs, tuple(clean)))
        object.__setattr__(self, "agents", agents)
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "independents", independents)
        object.__setattr__(self, "steps", tuple(steps))

    @property
    def M(self) -> int:
        return len(self.agents)

    @property
    def N(self) -> int:
        return len(self.outcomes)

    @property
    def K(self) -> int:
        return len(self.independents)

    @property
    def T(self) -> int:
        return len(self.steps)

    def pooled(self) -> np.ndarray:
        """All agent states stacked step by step, shape (M*T, N)."""
        return np.vstack([s.matrix() for s in self.steps])

    def with_measurements(self, matrices, outcomes=None) -> Experiment:
        """Copy with replaced per-step matrices (e.g. projected coordinates)."""
        return Experiment(
            self.agents,
            tuple(outcomes) if outcomes is not None else self.outcomes,
            self.independents,
            tuple((s.independent_values, [list(map(float, r)) for r in mat])
                  for s, mat in zip(self.steps, matrices)),
        )


@dataclass(frozen=True)
class AgentState:
    agent_index: int
    step_index: int
    values: Vector


@dataclass(frozen=True)
class AgentMove:
    agent_index: int
    from_step: int
    to_step: int
    from_values: Vector
    to_values: Vector


def agent_states(exp: Experiment, t: int) -> list[AgentState]:
    if not 0 <= t < exp.T:
        raise IndexError(f"step index {t} out of range [0, {exp.T})")
    return [AgentState(j, t, row) for j, row in enumerate(exp.steps[t].measurements)]


def agent_moves(exp: Experiment, j: int) -> list[AgentMove]:
    if not 0 <= j < exp.M:
        raise IndexError(f"agent index {j} out of range [0, {exp.M})")
    return [
        AgentMove(j, t, t + 1, exp.steps[t].measurements[j], exp.steps[t + 1].measurements[j])
        for t in range(exp.T - 1)
    ]
