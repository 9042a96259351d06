import math
import re
import xml.etree.ElementTree as ET

import pytest

from cmdviz import RenderConfig, analyze, render_dot, render_svg
from cmdviz.encode import Column, DiagramModel, Node
from cmdviz.synth import generate, random_spec

SVG = "{http://www.w3.org/2000/svg}"


def census(svg_bytes):
    root = ET.fromstring(svg_bytes)
    nodes = [e for e in root.iter() if e.get("class") == "node"]
    labels = [e.text for e in root.iter() if e.get("class") == "label"]
    edges = [e for e in root.iter() if e.tag == SVG + "path" and e.get("class") == "edge"]
    return root, nodes, labels, edges


def coordinates(root):
    for e in root.iter():
        for attr in ("x", "y", "cx", "cy"):
            if e.get(attr) is not None:
                yield float(e.get(attr))
        if e.get("d"):
            yield from (float(v) for v in re.findall(r"-?\d+\.\d+", e.get("d")))


def test_svg_memory_scheme1(memory):
    svg = render_svg(analyze(memory).diagram(1))
    root, nodes, labels, edges = census(svg)
    assert len(nodes) == 6 and all(n.tag == SVG + "circle" for n in nodes)
    assert labels == ["d", "c", "g", "a", "b", "c"]
    # one arrow per (cluster, next cluster) pair: 2 + 3 arrows carrying 6 agent moves
    assert len(edges) == 5
    captions = [e.text for e in root.iter() if e.get("class") == "caption"]
    assert captions == ["noise_hours=0", "noise_hours=1", "noise_hours=2"]
    widths = [float(e.get("stroke-width")) for e in edges]
    assert widths[0] == pytest.approx(2 * widths[1], abs=0.01)


def test_svg_scheme3_boxes_no_edges(memory):
    svg = render_svg(analyze(memory).diagram(3))
    _, nodes, _, edges = census(svg)
    assert edges == []
    assert all(n.tag == SVG + "rect" for n in nodes)
    assert [float(n.get("fill-opacity")) for n in nodes][:3] == [0.67, 0.33, 1.0]
    strokes = [float(n.get("stroke-width")) for n in nodes]
    assert strokes == [1.0, 1.0, 2.5, 4.0, 4.0, 4.0]


def test_svg_deterministic(memory):
    dm = analyze(memory).diagram(1)
    assert render_svg(dm) == render_svg(dm)


@pytest.mark.parametrize("seed", range(10))
def test_svg_census_and_bounds(seed):
    exp = generate(random_spec(seed, 8 + seed, 2, 2 + seed % 5, sigma=0.02))
    cfg = RenderConfig(width_px=400, height_px=300)
    for scheme in (1, 2, 3):
        dm = analyze(exp).diagram(scheme, draw_edges=True)
        root, nodes, labels, edges = census(render_svg(dm, cfg))
        assert len(nodes) == dm.node_count == len(labels)
        assert len(edges) == len(dm.edges)
        for v in coordinates(root):
            assert math.isfinite(v) and 0 <= v <= 400


def test_label_escaping():
    dm = DiagramModel(1, 1, (Column(0, (), (Node(0, (0,), (0.0,), "<&>", 1, 0),)),), (), ("x",))
    svg = render_svg(dm)
    ET.fromstring(svg)
    assert b"&lt;&amp;&gt;" in svg


def test_dot_memory_scheme2(memory):
    dot = render_dot(analyze(memory).diagram(2)).decode()
    assert dot.startswith("digraph cmd {")
    nodes = re.findall(r"^\s+(s\d+_c\d+) \[", dot, re.M)
    edges = re.findall(r"^\s+(s\d+_c\d+) -> (s\d+_c\d+) \[label=\"(\d+)\"\]", dot, re.M)
    assert nodes == ["s0_c0", "s0_c1", "s1_c0", "s2_c0", "s2_c1", "s2_c2"]
    assert len(edges) == 5
    assert sum(int(n) for _, _, n in edges) == 6
    assert ("s0_c0", "s1_c0", "2") in edges
    assert dot.count("subgraph cluster_") == 3 and dot.count("rank=same") == 3
    assert render_dot(analyze(memory).diagram(2)) == render_dot(analyze(memory).diagram(2))


def test_dot_single_node():
    dm = DiagramModel(1, 1, (Column(0, (0.0,), (Node(0, (0,), (1.0,), "a", 1, 0),)),), (), ("x",))
    dot = render_dot(dm).decode()
    assert len(re.findall(r"s\d+_c\d+ \[", dot)) == 1
    assert "->" not in dot


def test_dot_scheme3_styles(memory):
    dot = render_dot(analyze(memory).diagram(3)).decode()
    assert "shape=box" in dot and "penwidth=4.00" in dot and "->" not in dot


def test_render_config_validation():
    from cmdviz import ConfigError
    with pytest.raises(ConfigError):
        RenderConfig(width_px=0)
    with pytest.raises(ConfigError):
        RenderConfig(format="png")
