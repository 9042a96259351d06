"""End-to-end analysis of one experiment: optional PCA, clustering, group states."""

from __future__ import annotations

from dataclasses import dataclass

from .cluster import DEFAULT_CONFIG, ClusterConfig, ClusterPartition, cluster_step
from .encode import DiagramModel, encode
from .errors import ConfigError
from .group import GroupMove, GroupState, group_moves, group_state, transition_counts
from .model import AgentMove, Experiment, agent_moves, agent_states
from .reduce import PcaModel, fit_pca, project

DEFAULT_REDUCE_LIMIT = 3


@dataclass(frozen=True)
class Analysis:
    experiment: Experiment  # the raw input
    space: Experiment  # coordinates actually clustered (raw or projected)
    config: ClusterConfig
    partitions: tuple[ClusterPartition, ...]
    group_states: tuple[GroupState, ...]
    pca: PcaModel | None = None

    @property
    def reduced(self) -> bool:
        return self.pca is not None

    def agent_moves(self) -> list[AgentMove]:
        return [mv for j in range(self.experiment.M) for mv in agent_moves(self.experiment, j)]

    def group_moves(self) -> list[GroupMove]:
        return group_moves(self.group_states)

    def transition_counts(self) -> list[list[tuple[int, int, int]]]:
        gs = self.group_states
        return [transition_counts(pair) for pair in zip(gs, gs[1:])]

    def diagram(self, scheme: int, draw_edges: bool = False) -> DiagramModel:
        exp = self.experiment
        return encode(
            self.group_states, scheme, draw_edges,
            independent_values=[s.independent_values for s in exp.steps],
            axis_names=self.space.outcomes,
            agent_names=exp.agents,
            independent_names=exp.independents,
            reduced=self.reduced,
        )


def reduce_experiment(exp: Experiment, components: int = 2) -> tuple[Experiment, PcaModel]:
    pooled = exp.pooled()
    if pooled.shape[0] < 2:
        raise ConfigError("PCA needs at least two pooled agent states")
    model = fit_pca(pooled, components)
    proj = project(model, pooled)
    m = exp.M
    matrices = [proj[t * m:(t + 1) * m] for t in range(exp.T)]
    names = [f"PC{i + 1}" for i in range(model.k)]
    return exp.with_measurements(matrices, names), model


def analyze(exp: Experiment, config: ClusterConfig = DEFAULT_CONFIG, reduce: str = "auto",
            components: int = 2, reduce_limit: int = DEFAULT_REDUCE_LIMIT) -> Analysis:
    """Cluster every step with one config and substitute centroids.

    ``reduce`` is ``"none"``, ``"pca"`` or ``"auto"``; auto applies PCA only when
    the experiment has more than ``reduce_limit`` outcomes.
    """
    if reduce not in ("none", "pca", "auto"):
        raise ConfigError(f"reduce must be none, pca or auto, got {reduce!r}")
    space, model = exp, None
    if reduce == "pca" or (reduce == "auto" and exp.N > reduce_limit):
        space, model = reduce_experiment(exp, components)
    partitions, gs = [], []
    for t in range(space.T):
        states = agent_states(space, t)
        part = cluster_step(states, config)
        partitions.append(part)
        gs.append(group_state(part, states))
    return Analysis(exp, space, config, tuple(partitions), tuple(gs), model)
