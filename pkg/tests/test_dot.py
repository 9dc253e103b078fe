from smpds.dot import emit_dot
from smpds.headgraph import HeadGraph, build_head_graph, explore_heads
from smpds.model import reachable_phases
from smpds.presets import sample_bundle
from smpds.prestar import LabeledAutomaton, pre_star_empty

from conftest import config


def _edge_lines(text):
    return [ln for ln in text.splitlines() if "->" in ln]


def test_empty_graph():
    text = emit_dot(HeadGraph())
    assert text.startswith("digraph G {") and text.rstrip().endswith("}")
    assert _edge_lines(text) == []
    assert "legend" not in text


def test_e2_self_loop_is_solid(e2):
    m, theta0 = e2
    phases = reachable_phases(m, theta0)
    g = build_head_graph(m, pre_star_empty(m, phases), phases)
    text = emit_dot(g, m, phases)
    assert '"p0/a/θ0" -> "p0/a/θ0" [style=solid];' in text
    assert '"p0/a/θ0" -> "p1/a/θ0" [style=solid];' in text
    assert "θ0 = {r1 r2}" in text


def test_automaton_bits_pick_the_line_style():
    a = LabeledAutomaton({(("p", 1), "a", 1, "f"), (("p", 1), "b", 0, "f")}, {("p", 1)}, {"f"})
    text = emit_dot(a)
    assert '[label="a/1", style=solid]' in text
    assert '[label="b/0", style=dashed]' in text
    assert "doublecircle" in text
    assert "θ0 = {1}" in text


def test_output_is_deterministic():
    b = sample_bundle()
    first = emit_dot(explore_heads(b.model, b.c0).graph, b.model, (b.theta0,))
    again = emit_dot(explore_heads(b.model, b.c0).graph, b.model, (b.theta0,))
    assert first == again
    assert "legend" in first
    assert len(_edge_lines(first)) > 0


def test_product_controls_are_flattened(e1):
    m, theta0, _ = e1
    g = HeadGraph()
    g.add_edge(config("p0", "a", phase=theta0).head, 0, config("p1", "a", phase=theta0).head, None)
    assert '"p0/a/θ0" -> "p1/a/θ0" [style=dashed];' in emit_dot(g, m)
