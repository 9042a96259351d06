"""Turn per-step group states into an encoding-agnostic diagram model.

Three labelling/styling schemes share one topology (columns, nodes, edges):

1. a unique symbol per membership set,
2. the member count,
3. shaded boxes: fill intensity grows with cluster size, border weight with
   the step's (first) independent value.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .errors import UsageError
from .group import GroupState, _check_consecutive, transition_counts

MAX_CANONICAL_LABELS = 26 + 26 * 26
BORDER_FLOOR = 0.25


@dataclass(frozen=True)
class NodeStyle:
    intensity: float
    border_weight: float


@dataclass(frozen=True)
class Node:
    node_id: int  # the cluster id within its column
    members: tuple[int, ...]
    centroid: tuple[float, ...]
    label: str
    size: int
    position: int  # vertical slot, 0 = top
    style: NodeStyle | None = None


@dataclass(frozen=True)
class Column:
    step_index: int
    independent_values: tuple[float, ...]
    nodes: tuple[Node, ...]


@dataclass(frozen=True)
class Edge:
    from_step: int
    from_node: int
    to_step: int
    to_node: int
    agent_count: int


@dataclass(frozen=True)
class DiagramModel:
    scheme: int
    num_agents: int
    columns: tuple[Column, ...]
    edges: tuple[Edge, ...]
    axis_meta: tuple[str, ...]
    agent_names: tuple[str, ...] = ()
    independent_names: tuple[str, ...] = ()
    reduced: bool = False

    @property
    def node_count(self) -> int:
        return sum(len(c.nodes) for c in self.columns)

    def to_dict(self) -> dict:
        def node(n: Node) -> dict:
            d = {
                "id": n.node_id,
                "members": list(n.members),
                "centroid": list(n.centroid),
                "label": n.label,
                "size": n.size,
                "position": n.position,
            }
            if n.style is not None:
                d["style"] = {"intensity": n.style.intensity, "border_weight": n.style.border_weight}
            return d

        return {
            "scheme": self.scheme,
            "num_agents": self.num_agents,
            "agents": list(self.agent_names),
            "independents": list(self.independent_names),
            "axis_meta": list(self.axis_meta),
            "reduced": self.reduced,
            "columns": [
                {
                    "step": c.step_index,
                    "independent_values": list(c.independent_values),
                    "nodes": [node(n) for n in c.nodes],
                }
                for c in self.columns
            ],
            "edges": [
                {"from": [e.from_step, e.from_node], "to": [e.to_step, e.to_node],
                 "agent_count": e.agent_count}
                for e in self.edges
            ],
        }


def symbol(index: int) -> str:
    """0 -> 'a', 25 -> 'z', 26 -> 'aa', 701 -> 'zz', ... (bijective base 26)."""
    if index < 0:
        raise ValueError("symbol index must be non-negative")
    out = []
    index += 1
    while index:
        index, rem = divmod(index - 1, 26)
        out.append(chr(ord("a") + rem))
    return "".join(reversed(out))


def canonical_subsets(m: int) -> list[tuple[int, ...]]:
    """All non-empty subsets of range(m) by size, then lexicographic order."""
    return [c for size in range(1, m + 1) for c in combinations(range(m), size)]


def scheme1_labeler(m: int):
    """Return a function mapping a sorted member tuple to its symbol.

    Canonical enumeration is used while all 2**m - 1 subsets fit in the
    one- and two-letter alphabet; otherwise symbols are handed out in
    first-occurrence order.
    """
    if 2 ** m - 1 <= MAX_CANONICAL_LABELS:
        table = {s: symbol(i) for i, s in enumerate(canonical_subsets(m))}
        return table.__getitem__
    seen: dict[tuple[int, ...], str] = {}

    def lazy(members):
        if members not in seen:
            seen[members] = symbol(len(seen))
        return seen[members]

    return lazy


def _positions(partition) -> dict[int, int]:
    order = sorted(range(partition.num_clusters),
                   key=lambda c: (-partition.clusters[c].centroid[0], c))
    return {c: slot for slot, c in enumerate(order)}


def _build(gs: Sequence[GroupState], scheme, label_fn, style_fn, draw_edges,
           independent_values, axis_names, agent_names, independent_names, reduced):
    gs = list(gs)
    if not gs:
        raise UsageError("need at least one group state")
    _check_consecutive(gs)
    m = len(gs[0].matrix)
    if independent_values is None:
        independent_values = [()] * len(gs)
    independent_values = [tuple(v) for v in independent_values]
    if len(independent_values) != len(gs):
        raise UsageError("need one independent-value vector per step")
    if axis_names is None:
        axis_names = tuple(f"x{i + 1}" for i in range(len(gs[0].matrix[0])))

    columns = []
    for col, (g, ivs) in enumerate(zip(gs, independent_values)):
        pos = _positions(g.partition)
        nodes = tuple(
            Node(cid, c.members, c.centroid, label_fn(c), c.size, pos[cid], style_fn(col, c))
            for cid, c in enumerate(g.partition.clusters)
        )
        columns.append(Column(g.step_index, ivs, nodes))
    edges = []
    if draw_edges:
        for a, b in zip(gs, gs[1:]):
            edges.extend(Edge(a.step_index, f, b.step_index, t, n)
                         for f, t, n in transition_counts((a, b)))
    return DiagramModel(scheme, m, tuple(columns), tuple(edges), tuple(axis_names),
                        tuple(agent_names or ()), tuple(independent_names or ()), reduced)


def encode_scheme1(gs, *, independent_values=None, axis_names=None, agent_names=None,
                   independent_names=None, reduced=False) -> DiagramModel:
    gs = list(gs)
    labeler = scheme1_labeler(len(gs[0].matrix) if gs else 0)
    return _build(gs, 1, lambda c: labeler(c.members), lambda col, c: None, True,
                  independent_values, axis_names, agent_names, independent_names, reduced)


def encode_scheme2(gs, *, independent_values=None, axis_names=None, agent_names=None,
                   independent_names=None, reduced=False) -> DiagramModel:
    return _build(gs, 2, lambda c: str(c.size), lambda col, c: None, True,
                  independent_values, axis_names, agent_names, independent_names, reduced)


def border_weights(first_values: Sequence[float]) -> list[float]:
    """Affine map of the per-step values onto [BORDER_FLOOR, 1]."""
    lo, hi = min(first_values), max(first_values)
    if hi == lo:
        return [1.0] * len(first_values)
    return [BORDER_FLOOR + (1.0 - BORDER_FLOOR) * (v - lo) / (hi - lo) for v in first_values]


def encode_scheme3(gs, draw_edges: bool = False, *, independent_values=None, axis_names=None,
                   agent_names=None, independent_names=None, reduced=False) -> DiagramModel:
    gs = list(gs)
    m = len(gs[0].matrix) if gs else 0
    if independent_values is not None and all(len(v) for v in independent_values):
        weights = border_weights([v[0] for v in independent_values])
    else:
        weights = [1.0] * len(gs)

    def style(col, c):
        return NodeStyle(c.size / m, weights[col])

    return _build(gs, 3, lambda c: str(c.size), style, draw_edges, independent_values, axis_names,
                  agent_names, independent_names, reduced)


def encode(gs, scheme: int, draw_edges: bool = False, **kwargs) -> DiagramModel:
    if scheme == 1:
        return encode_scheme1(gs, **kwargs)
    if scheme == 2:
        return encode_scheme2(gs, **kwargs)
    if scheme == 3:
        return encode_scheme3(gs, draw_edges, **kwargs)
    raise UsageError(f"scheme must be 1, 2 or 3, got {scheme!r}")
