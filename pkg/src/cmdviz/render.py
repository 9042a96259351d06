"""Deterministic SVG and DOT output for diagram models.

Both writers are plain string templating: identical models give identical
bytes. Numbers are printed with two decimals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from html import escape

from .encode import DiagramModel, Node
from .errors import ConfigError

EDGE_MAX_WIDTH = 6.0
BORDER_MAX_WIDTH = 4.0


@dataclass(frozen=True)
class RenderConfig:
    format: str = "svg"
    width_px: int = 960
    height_px: int = 540
    font_size_pt: float = 12.0
    palette: str = "#1f5fbf"

    def __post_init__(self):
        if self.format not in ("svg", "dot"):
            raise ConfigError(f"format must be svg or dot, got {self.format!r}")
        if self.width_px <= 0 or self.height_px <= 0:
            raise ConfigError("canvas dimensions must be positive")
        if not self.font_size_pt > 0:
            raise ConfigError("font size must be positive")


def _f(x: float) -> str:
    s = f"{x:.2f}"
    return "0.00" if s == "-0.00" else s


def _fmt_value(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(v)


def caption(dm: DiagramModel, col) -> str:
    if dm.independent_names and col.independent_values:
        parts = [f"{n}={_fmt_value(v)}" for n, v in zip(dm.independent_names, col.independent_values)]
        return ", ".join(parts)
    if col.independent_values:
        return ", ".join(_fmt_value(v) for v in col.independent_values)
    return f"t={col.step_index}"


class _Layout:
    """Column x-positions evenly spaced; node y-positions by their slot."""

    def __init__(self, dm: DiagramModel, cfg: RenderConfig):
        w, h = cfg.width_px, cfg.height_px
        ncols = max(len(dm.columns), 1)
        max_nodes = max((len(c.nodes) for c in dm.columns), default=1)
        self.margin_top = cfg.font_size_pt * 3.0
        self.margin_bottom = cfg.font_size_pt * 1.5
        self.col_w = w / ncols
        usable = max(h - self.margin_top - self.margin_bottom, 1.0)
        self.slot_h = usable / max_nodes
        self.radius = max(min(self.col_w * 0.18, self.slot_h * 0.38, 60.0), 1.0)
        self.pos = {}
        for ci, col in enumerate(dm.columns):
            x = self.col_w * (ci + 0.5)
            top = self.margin_top + (usable - self.slot_h * len(col.nodes)) / 2
            for node in col.nodes:
                y = top + self.slot_h * (node.position + 0.5)
                self.pos[(col.step_index, node.node_id)] = (x, y)

    def __getitem__(self, key):
        return self.pos[key]


def _node_svg(dm: DiagramModel, node: Node, x: float, y: float, r: float, cfg: RenderConfig,
              step: int) -> list[str]:
    title = escape(", ".join(dm.agent_names[j] if dm.agent_names else str(j) for j in node.members))
    nid = f"s{step}_c{node.node_id}"
    out = []
    if dm.scheme == 3 and node.style is not None:
        bw = BORDER_MAX_WIDTH * node.style.border_weight
        out.append(
            f'<rect class="node" id="{nid}" x="{_f(x - r)}" y="{_f(y - r)}" width="{_f(2 * r)}" '
            f'height="{_f(2 * r)}" fill="{cfg.palette}" fill-opacity="{_f(node.style.intensity)}" '
            f'stroke="#000000" stroke-width="{_f(bw)}"><title>{title}</title></rect>')
    else:
        out.append(
            f'<circle class="node" id="{nid}" cx="{_f(x)}" cy="{_f(y)}" r="{_f(r)}" '
            f'fill="#ffffff" stroke="#000000" stroke-width="1.50"><title>{title}</title></circle>')
    out.append(
        f'<text class="label" x="{_f(x)}" y="{_f(y)}" text-anchor="middle" '
        f'dominant-baseline="central" font-size="{_f(cfg.font_size_pt)}pt">{escape(node.label)}</text>')
    return out


def _edge_svg(x1, y1, x2, y2, r, width) -> list[str]:
    dx, dy = x2 - x1, y2 - y1
    length = math.hypot(dx, dy)
    ux, uy = dx / length, dy / length
    sx, sy = x1 + ux * r, y1 + uy * r
    tx, ty = x2 - ux * r, y2 - uy * r
    head = max(6.0, 2.0 * width)
    bx, by = tx - ux * head, ty - uy * head
    px, py = -uy * head * 0.5, ux * head * 0.5
    return [
        f'<path class="edge" d="M {_f(sx)} {_f(sy)} L {_f(bx)} {_f(by)}" '
        f'stroke="#333333" stroke-width="{_f(width)}" fill="none"/>',
        f'<path class="arrowhead" d="M {_f(tx)} {_f(ty)} L {_f(bx + px)} {_f(by + py)} '
        f'L {_f(bx - px)} {_f(by - py)} Z" fill="#333333"/>',
    ]


def render_svg(dm: DiagramModel, cfg: RenderConfig | None = None) -> bytes:
    cfg = cfg or RenderConfig()
    lay = _Layout(dm, cfg)
    w, h = cfg.width_px, cfg.height_px
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">',
        f'<rect class="background" x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>',
    ]
    axes = ", ".join(dm.axis_meta)
    lines.append(f'<desc>scheme {dm.scheme}; axes: {escape(axes)}</desc>')
    for ci, col in enumerate(dm.columns):
        x = lay.col_w * (ci + 0.5)
        lines.append(
            f'<text class="caption" x="{_f(x)}" y="{_f(cfg.font_size_pt * 1.6)}" '
            f'text-anchor="middle" font-size="{_f(cfg.font_size_pt)}pt">{escape(caption(dm, col))}</text>')
    for e in dm.edges:
        x1, y1 = lay[(e.from_step, e.from_node)]
        x2, y2 = lay[(e.to_step, e.to_node)]
        width = EDGE_MAX_WIDTH * e.agent_count / max(dm.num_agents, 1)
        lines.extend(_edge_svg(x1, y1, x2, y2, lay.radius, width))
    for col in dm.columns:
        for node in col.nodes:
            x, y = lay[(col.step_index, node.node_id)]
            lines.extend(_node_svg(dm, node, x, y, lay.radius, cfg, col.step_index))
    lines.append("</svg>")
    return ("\n".join(lines) + "\n").encode("utf-8")


def _dot_str(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def render_dot(dm: DiagramModel, cfg: RenderConfig | None = None) -> bytes:
    palette = (cfg or RenderConfig()).palette
    lines = ["digraph cmd {", "  rankdir=LR;", "  node [shape=circle];"]
    for col in sorted(dm.columns, key=lambda c: c.step_index):
        t = col.step_index
        lines.append(f"  subgraph cluster_s{t} {{")
        lines.append(f"    label={_dot_str(caption(dm, col))};")
        lines.append("    rank=same;")
        for node in sorted(col.nodes, key=lambda n: n.node_id):
            attrs = [f"label={_dot_str(node.label)}"]
            if dm.scheme == 3 and node.style is not None:
                alpha = round(255 * node.style.intensity)
                attrs += ["shape=box", "style=filled", f'fillcolor="{palette}{alpha:02x}"',
                          f"penwidth={_f(BORDER_MAX_WIDTH * node.style.border_weight)}"]
            lines.append(f"    s{t}_c{node.node_id} [{', '.join(attrs)}];")
        lines.append("  }")
    for e in sorted(dm.edges, key=lambda e: (e.from_step, e.from_node, e.to_step, e.to_node)):
        lines.append(f"  s{e.from_step}_c{e.from_node} -> s{e.to_step}_c{e.to_node} "
                     f'[label="{e.agent_count}"];')
    lines.append("}")
    return ("\n".join(lines) + "\n").encode("utf-8")
