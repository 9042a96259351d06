"""Per-step grouping of agents: threshold agglomerative clustering or k-means."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from typing import Sequence

import numpy as np

from .errors import ConfigError, UsageError

METHODS = ("agglomerative", "kmeans")
LINKAGES = ("single", "complete", "average")
METRICS = ("euclidean", "manhattan")


@dataclass(frozen=True)
class ClusterConfig:
    method: str = "agglomerative"
    linkage: str = "complete"
    threshold: float = 0.15
    k: int = 2
    metric: str = "euclidean"
    seed: int = 0
    max_iterations: int = 100

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.linkage not in LINKAGES:
            raise ConfigError(f"linkage must be one of {LINKAGES}, got {self.linkage!r}")
        if self.metric not in METRICS:
            raise ConfigError(f"metric must be one of {METRICS}, got {self.metric!r}")
        if isinstance(self.threshold, bool) or not isinstance(self.threshold, (int, float)) \
                or not math.isfinite(self.threshold) or self.threshold < 0:
            raise ConfigError(f"threshold must be a finite non-negative number, got {self.threshold!r}")
        for name in ("k", "max_iterations"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError(f"seed must be an unsigned integer, got {self.seed!r}")

    @classmethod
    def from_dict(cls, block: dict) -> ClusterConfig:
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(block) - known)
        if unknown:
            raise ConfigError(f"unknown clustering fields {unknown}")
        return cls(**block)

    def to_dict(self) -> dict:
        return asdict(self)


DEFAULT_CONFIG = ClusterConfig()


@dataclass(frozen=True)
class Cluster:
    members: tuple[int, ...]
    centroid: tuple[float, ...]

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class ClusterPartition:
    step_index: int
    assignments: tuple[int, ...]
    clusters: tuple[Cluster, ...]

    @property
    def num_clusters(self) -> int:
        return len(self.clusters)

    def membership_sets(self) -> list[frozenset[int]]:
        return [frozenset(c.members) for c in self.clusters]


def distance(a: Sequence[float], b: Sequence[float], metric: str = "euclidean") -> float:
    if len(a) != len(b):
        raise UsageError(f"vector lengths differ: {len(a)} vs {len(b)}")
    if metric == "euclidean":
        return math.dist(a, b)
    if metric == "manhattan":
        return math.fsum(abs(x - y) for x, y in zip(a, b))
    raise UsageError(f"unknown metric {metric!r}")


def linkage_distance(c1: Sequence[Sequence[float]], c2: Sequence[Sequence[float]],
                     linkage: str = "complete", metric: str = "euclidean") -> float:
    """Distance between two groups of member vectors.

    ``c1`` and ``c2`` may be ``Cluster`` objects' member vectors or any
    sequences of equal-length vectors.
    """
    pair = [distance(a, b, metric) for a in c1 for b in c2]
    if not pair:
        raise UsageError("linkage needs non-empty clusters")
    if linkage == "single":
        return min(pair)
    if linkage == "complete":
        return max(pair)
    if linkage == "average":
        return math.fsum(pair) / len(pair)
    raise UsageError(f"unknown linkage {linkage!r}")


def centroid(vectors: Sequence[Sequence[float]]) -> tuple[float, ...]:
    n = len(vectors)
    return tuple(math.fsum(col) / n for col in zip(*vectors))


def partition_from_groups(step_index: int, groups, vectors) -> ClusterPartition:
    """Canonical partition: ids ordered by smallest member, centroids from raw vectors."""
    groups = sorted((tuple(sorted(g)) for g in groups if g), key=lambda g: g[0])
    assignments = [-1] * len(vectors)
    clusters = []
    for cid, members in enumerate(groups):
        for j in members:
            assignments[j] = cid
        clusters.append(Cluster(members, centroid([vectors[j] for j in members])))
    if -1 in assignments or sum(len(g) for g in groups) != len(vectors):
        raise UsageError("groups do not partition the agents")
    return ClusterPartition(step_index, tuple(assignments), tuple(clusters))


def _pairwise(vectors, metric) -> np.ndarray:
    m = len(vectors)
    d = np.zeros((m, m))
    pair = math.dist if metric == "euclidean" else (lambda a, b: distance(a, b, metric))
    for i in range(m):
        for j in range(i + 1, m):
            d[i, j] = d[j, i] = pair(vectors[i], vectors[j])
    return d


def _agglomerative(vectors, cfg: ClusterConfig) -> list[list[int]]:
    m = len(vectors)
    d = _pairwise(vectors, cfg.metric)
    # slot i holds the cluster whose smallest member is i; merging j into i (i < j)
    # preserves that, so a row-major argmin over the upper triangle resolves ties
    # toward the smallest, then second-smallest, member index
    link = d.copy() if cfg.linkage != "average" else None
    sums = d.copy() if cfg.linkage == "average" else None
    sizes = np.ones(m)
    active = np.ones(m, dtype=bool)
    members = [[j] for j in range(m)]
    upper = np.triu(np.ones((m, m), dtype=bool), 1)
    for _ in range(m - 1):
        current = sums / np.outer(sizes, sizes) if link is None else link
        mask = upper & active[:, None] & active[None, :]
        masked = np.where(mask, current, np.inf)
        flat = int(np.argmin(masked))
        i, j = divmod(flat, m)
        if masked[i, j] > cfg.threshold:
            break
        if cfg.linkage == "single":
            link[i, :] = link[:, i] = np.minimum(link[i, :], link[j, :])
        elif cfg.linkage == "complete":
            link[i, :] = link[:, i] = np.maximum(link[i, :], link[j, :])
        else:
            sums[i, :] = sums[:, i] = sums[i, :] + sums[j, :]
        sizes[i] += sizes[j]
        active[j] = False
        members[i] = sorted(members[i] + members[j])
    return [members[i] for i in range(m) if active[i]]


def _point_dists(x: np.ndarray, centers: np.ndarray, metric: str) -> np.ndarray:
    diff = x[:, None, :] - centers[None, :, :]
    if metric == "manhattan":
        return np.abs(diff).sum(axis=2)
    return np.sqrt((diff ** 2).sum(axis=2))


def _kmeans(vectors, cfg: ClusterConfig) -> list[list[int]]:
    x = np.asarray(vectors, dtype=float)
    m, k = len(x), cfg.k
    rng = np.random.default_rng(cfg.seed)

    # k-means++ seeding
    chosen = [int(rng.integers(m))]
    for _ in range(1, k):
        d2 = _point_dists(x, x[chosen], cfg.metric).min(axis=1) ** 2
        total = d2.sum()
        if total <= 0:
            rest = [i for i in range(m) if i not in chosen]
            chosen.append(rest[int(rng.integers(len(rest)))])
        else:
            chosen.append(int(rng.choice(m, p=d2 / total)))
    centers = x[chosen].copy()

    labels = None
    for _ in range(cfg.max_iterations):
        dist = _point_dists(x, centers, cfg.metric)
        new = dist.argmin(axis=1)
        # empty cluster repair: move the point farthest from its own center
        for c in range(k):
            if not np.any(new == c):
                own = dist[np.arange(m), new]
                donors = [i for i in np.argsort(-own, kind="stable") if np.sum(new == new[i]) > 1]
                new[donors[0]] = c
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        centers = np.array([x[labels == c].mean(axis=0) for c in range(k)])
    return [list(np.flatnonzero(labels == c)) for c in range(k)]


def cluster_step(states, cfg: ClusterConfig = DEFAULT_CONFIG) -> ClusterPartition:
    """Partition the agents of one step.

    ``states`` is the full list of AgentState objects for the step, in agent order.
    """
    if not states:
        raise UsageError("cluster_step needs at least one agent state")
    steps = {s.step_index for s in states}
    if len(steps) != 1:
        raise UsageError(f"states come from several steps: {sorted(steps)}")
    if [s.agent_index for s in states] != list(range(len(states))):
        raise UsageError("states must cover agents 0..M-1 in order")
    vectors = [s.values for s in states]
    if len({len(v) for v in vectors}) != 1:
        raise UsageError("agent states have different dimensions")
    if cfg.method == "kmeans":
        if cfg.k > len(vectors):
            raise ConfigError(f"k={cfg.k} exceeds the number of agents ({len(vectors)})")
        groups = _kmeans(vectors, cfg)
    else:
        groups = _agglomerative(vectors, cfg)
    return partition_from_groups(steps.pop(), [[int(j) for j in g] for g in groups], vectors)
