"""Synthetic experiments with planted per-step group structure."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .model import Experiment

NOISE_RADIUS_SIGMAS = 3.0


@dataclass(frozen=True)
class SynthSpec:
    M: int
    N: int
    T: int
    planted_partitions: list  # per step: list of agent-index lists
    cluster_centers: list  # per step: one N-vector per planted cluster
    noise_sigma: float = 0.0
    seed: int = 0
    independent_schedule: list | None = None  # T x K; defaults to [[t] for t in range(T)]
    agents: list | None = None
    outcomes: list | None = None
    independents: list | None = None

    def __post_init__(self):
        for name in ("M", "N", "T"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise ConfigError(f"{name} must be a positive integer, got {v!r}")
        if not isinstance(self.noise_sigma, (int, float)) or not math.isfinite(self.noise_sigma) \
                or self.noise_sigma < 0:
            raise ConfigError(f"noise_sigma must be finite and non-negative, got {self.noise_sigma!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError(f"seed must be an unsigned integer, got {self.seed!r}")
        if len(self.planted_partitions) != self.T or len(self.cluster_centers) != self.T:
            raise ConfigError("need one planted partition and one center list per step")
        for t, (part, centers) in enumerate(zip(self.planted_partitions, self.cluster_centers)):
            members = sorted(j for group in part for j in group)
            if members != list(range(self.M)) or any(len(g) == 0 for g in part):
                raise ConfigError(f"step {t}: planted partition does not partition agents 0..{self.M - 1}")
            if len(centers) != len(part):
                raise ConfigError(f"step {t}: {len(part)} clusters but {len(centers)} centers")
            if any(len(c) != self.N for c in centers):
                raise ConfigError(f"step {t}: every center needs {self.N} coordinates")
        schedule = self.schedule()
        if len(schedule) != self.T or len({len(v) for v in schedule}) != 1 or not schedule[0]:
            raise ConfigError("independent_schedule must hold T vectors of one common length K >= 1")
        for name, n in (("agents", self.M), ("outcomes", self.N), ("independents", len(schedule[0]))):
            names = getattr(self, name)
            if names is not None and len(names) != n:
                raise ConfigError(f"{name} must have {n} entries")

    def schedule(self) -> list:
        if self.independent_schedule is None:
            return [[float(t)] for t in range(self.T)]
        return [list(v) for v in self.independent_schedule]

    @classmethod
    def from_dict(cls, doc: dict) -> SynthSpec:
        if not isinstance(doc, dict):
            raise ConfigError("synth spec must be a JSON object")
        try:
            return cls(**doc)
        except TypeError as exc:
            raise ConfigError(f"bad synth spec: {exc}") from None

    def assignments(self, t: int) -> list[int]:
        out = [0] * self.M
        for c, group in enumerate(self.planted_partitions[t]):
            for j in group:
                out[j] = c
        return out


def agent_rng(seed: int, t: int, j: int) -> np.random.Generator:
    """Counter-based stream for (seed, step, agent): Philox keyed by seed, counter (0, 0, t, j)."""
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, t, j]))


class _NoiseSource:
    """Reuses one Philox instance, rewinding its counter per (step, agent).

    Draws equal those of ``agent_rng`` without rebuilding a generator per agent.
    """

    def __init__(self, seed: int):
        self._bits = np.random.Philox(key=seed)
        self._gen = np.random.Generator(self._bits)
        self._key = self._bits.state["state"]["key"]

    def normal(self, t: int, j: int, sigma: float, n: int) -> np.ndarray:
        self._bits.state = {
            "bit_generator": "Philox",
            "state": {"counter": np.array([0, 0, t, j], dtype=np.uint64), "key": self._key},
            "buffer": np.zeros(4, dtype=np.uint64),
            "buffer_pos": 4,
            "has_uint32": 0,
            "uinteger": 0,
        }
        return self._gen.normal(0.0, sigma, n)


def generate(spec: SynthSpec) -> Experiment:
    steps = []
    schedule = spec.schedule()
    noise = _NoiseSource(spec.seed) if spec.noise_sigma > 0 else None
    for t in range(spec.T):
        centers = spec.cluster_centers[t]
        rows = []
        for j, c in enumerate(spec.assignments(t)):
            center = np.asarray(centers[c], dtype=float)
            if noise is not None:
                center = center + noise.normal(t, j, spec.noise_sigma, spec.N)
            rows.append(center.tolist())
        steps.append((schedule[t], rows))
    agents = spec.agents or [f"A{j + 1}" for j in range(spec.M)]
    outcomes = spec.outcomes or [f"y{i + 1}" for i in range(spec.N)]
    independents = spec.independents or [f"v{i + 1}" for i in range(len(schedule[0]))]
    return Experiment(tuple(agents), tuple(outcomes), tuple(independents), tuple(steps))


def min_center_gap(centers) -> float:
    pts = np.asarray(centers, dtype=float)
    if len(pts) < 2:
        return math.inf
    d = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2))
    np.fill_diagonal(d, np.inf)
    return float(d.min())


def noise_radius(sigma: float, n: int) -> float:
    """Radius around a planted center that holds a noisy sample with high probability."""
    return NOISE_RADIUS_SIGMAS * sigma * math.sqrt(n)


def recovery_threshold(spec: SynthSpec) -> float:
    """Agglomerative threshold for recovering planted clusters: half the smallest center gap.

    If every sample lies within ``noise_radius`` of its center and the gap
    exceeds four radii, same-cluster distances stay below half the gap and
    cross-cluster distances stay above it.
    """
    gaps = [min_center_gap(c) for c in spec.cluster_centers]
    finite = [g for g in gaps if math.isfinite(g)]
    if not finite:
        return 2.0 * noise_radius(spec.noise_sigma, spec.N)
    return min(finite) / 2.0


def random_spec(seed: int, M: int, N: int, T: int, separation_ratio: float | None = None,
                max_clusters: int | None = None, sigma: float = 0.0) -> SynthSpec:
    """Random planted spec; centers are spread in the unit cube.

    With ``separation_ratio`` set, ``noise_sigma`` is chosen so that the
    smallest center gap equals ``separation_ratio`` noise radii.
    """
    rng = np.random.default_rng(seed)
    partitions, centers = [], []
    for _ in range(T):
        k = int(rng.integers(1, (max_clusters or M) + 1))
        k = min(k, M)
        labels = np.concatenate([np.arange(k), rng.integers(0, k, M - k)])
        rng.shuffle(labels)
        partitions.append([[int(j) for j in np.flatnonzero(labels == c)] for c in range(k)])
        # best-spread of a few draws; crowded low-dimensional cases cannot all reach 0.05
        best, best_gap = None, -1.0
        for _ in range(20):
            cs = rng.uniform(0.0, 1.0, (k, N))
            gap = min_center_gap(cs)
            if gap > best_gap:
                best, best_gap = cs, gap
            if gap > 0.05:
                break
        centers.append(best.tolist())
    if separation_ratio is not None:
        gaps = [g for g in (min_center_gap(c) for c in centers) if math.isfinite(g)]
        gap = min(gaps) if gaps else 1.0
        sigma = gap / (separation_ratio * NOISE_RADIUS_SIGMAS * math.sqrt(N))
    return SynthSpec(M, N, T, partitions, centers, sigma, seed)
