"""Group cognitive states (centroid substitution) and the moves between them."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .cluster import ClusterPartition
from .errors import UsageError
from .model import Matrix, Vector


@dataclass(frozen=True)
class GroupState:
    step_index: int
    matrix: Matrix
    partition: ClusterPartition


@dataclass(frozen=True)
class GroupMove:
    agent_index: int
    from_step: int
    to_step: int
    from_row: Vector
    to_row: Vector
    from_membership: frozenset[int]
    to_membership: frozenset[int]


def group_state(partition: ClusterPartition, states) -> GroupState:
    """Replace every agent's vector with the centroid of its cluster."""
    if len(states) != len(partition.assignments):
        raise UsageError(
            f"partition covers {len(partition.assignments)} agents but {len(states)} states given")
    for j, s in enumerate(states):
        if s.step_index != partition.step_index:
            raise UsageError(f"state for agent {j} is from step {s.step_index}, "
                             f"partition is for step {partition.step_index}")
        if s.agent_index != j:
            raise UsageError("states must be in agent order")
    rows = tuple(partition.clusters[c].centroid for c in partition.assignments)
    return GroupState(partition.step_index, rows, partition)


def _check_consecutive(gs):
    for a, b in zip(gs, gs[1:]):
        if b.step_index != a.step_index + 1:
            raise UsageError(f"group states not consecutive: step {a.step_index} then {b.step_index}")
        if len(a.matrix) != len(b.matrix):
            raise UsageError("group states have different agent counts")


def group_moves(gs) -> list[GroupMove]:
    """Per-agent moves, ordered by agent then step."""
    gs = list(gs)
    _check_consecutive(gs)
    moves = []
    m = len(gs[0].matrix) if gs else 0
    for j in range(m):
        for a, b in zip(gs, gs[1:]):
            pa, pb = a.partition, b.partition
            moves.append(GroupMove(
                j, a.step_index, b.step_index, a.matrix[j], b.matrix[j],
                frozenset(pa.clusters[pa.assignments[j]].members),
                frozenset(pb.clusters[pb.assignments[j]].members),
            ))
    return moves


def transition_counts(gs_pair) -> list[tuple[int, int, int]]:
    """Agents flowing from each cluster at one step to each cluster at the next."""
    a, b = gs_pair
    _check_consecutive([a, b])
    counts = Counter(zip(a.partition.assignments, b.partition.assignments))
    return [(f, t, n) for (f, t), n in sorted(counts.items())]
