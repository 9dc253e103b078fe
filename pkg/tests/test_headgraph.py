import random

import networkx as nx
import pytest

from smpds.generate import random_formula
from smpds.headgraph import (HeadGraph, build_head_graph, explore_heads, has_accepting_run,
                             has_accepting_run_saturation, model_check, repeating_cycle,
                             repeating_heads)
from smpds.ltl import TRUE, parse_ltl
from smpds.model import (BOTTOM, Configuration, Head, NormalRule, SmPds, phase_ids, phase_of,
                         reachable_phases)
from smpds.oracle import replay
from smpds.presets import sample_bundle
from smpds.prestar import pre_star_empty, unfold

from conftest import config, e2_model, permute_rules, small_bundle


def full_graph(m, theta0):
    phases = reachable_phases(m, theta0)
    pop = pre_star_empty(m, phases)
    return build_head_graph(m, pop, phases), pop


def test_e2_graph(e2):
    m, theta0 = e2
    g, _ = full_graph(m, theta0)
    p0a, p1a = Head("p0", "a", theta0), Head("p1", "a", theta0)
    assert set(g.edges) == {(p0a, 1, p1a), (p0a, 1, p0a)}
    assert g.edges[p0a, 1, p0a][0] == "pop"


def test_e1_graph(e1):
    m, theta0, theta1 = e1
    g, _ = full_graph(m, theta0)
    for sym in ("a", "b"):
        assert (Head("p0", sym, theta0), 0, Head("p1", sym, theta1)) in g.edges
    assert (Head("p0", "a", theta0), 0, Head("p1", "a", theta0)) in g.edges
    assert all(bit == 0 for _, bit, _ in g.edges)


def test_only_pop_rules_give_no_edges():
    m = SmPds(("p", "q"), ("a",), (NormalRule("r", "p", "a", "q", ()),), accepting=frozenset({"p"}))
    g, _ = full_graph(m, m.all_rules)
    assert not g.edges


def _graph(edges):
    g = HeadGraph()
    for k, (s, b, d) in enumerate(edges):
        g.add_edge(s, b, d, ("test", k))
    return g


def test_repeating_heads_small_graphs(e2):
    m, theta0 = e2
    g, _ = full_graph(m, theta0)
    assert repeating_heads(g) == {Head("p0", "a", theta0)}
    assert repeating_heads(_graph([("h1", 0, "h2"), ("h2", 0, "h1")])) == set()
    assert repeating_heads(_graph([("h1", 1, "h2")])) == set()
    assert repeating_heads(_graph([("h1", 1, "h2"), ("h2", 0, "h1"), ("h2", 0, "h3")])) == {"h1", "h2"}


def test_sccs_match_networkx():
    for seed in range(60):
        b, _ = small_bundle(seed, "nx")
        g, _ = full_graph(b.model, b.theta0)
        reference = nx.DiGraph()
        reference.add_nodes_from(g.nodes)
        reference.add_edges_from((s, d) for s, _, d in g.edges)
        want = set()
        for comp in nx.strongly_connected_components(reference):
            if any(bit and s in comp and d in comp for s, bit, d in g.edges):
                want |= comp
        assert repeating_heads(g) == want


def test_e2_accepting_run(e2):
    m, theta0 = e2
    v = has_accepting_run(m, config("p0", "a", phase=theta0))
    assert v.accepting and v.answer == "accepting-run-exists"
    assert v.witness == Head("p0", "a", theta0)
    assert v.prefix == []
    assert v.cycle and all(e in full_graph(m, theta0)[0].edges for e in v.cycle)


def test_no_accepting_controls_means_none(e1):
    m, theta0, _ = e1
    assert not has_accepting_run(m, config("p0", "a", phase=theta0)).accepting
    assert not has_accepting_run(e2_model(accepting=()), config("p0", "a", phase=1 | 2)).accepting


def test_empty_stack_start_means_none(e2):
    m, theta0 = e2
    v = has_accepting_run(m, config("p1", phase=theta0))
    assert v.answer == "none" and v.witness is None


def test_sample_program():
    bundle = sample_bundle()
    f = parse_ltl("F call_CopyFileA")
    v = model_check(bundle.model, bundle.theta0, bundle.c0, f)
    assert v.accepting
    assert "mov" in v.trace
    erased = sample_bundle(erased=True)
    assert not model_check(erased.model, erased.theta0, erased.c0, f).accepting


def test_true_on_a_model_with_an_infinite_run(e2):
    m, theta0 = e2
    assert model_check(m, theta0, config("p0", "a", phase=theta0), TRUE).accepting


def test_model_check_needs_exactly_one_property(e2):
    m, theta0 = e2
    with pytest.raises(ValueError):
        model_check(m, theta0, config("p0", "a", phase=theta0))


def test_engines_agree_and_witnesses_replay():
    for seed in range(200):
        b, _ = small_bundle(seed, "engines")
        m = b.model
        fast = has_accepting_run(m, b.c0)
        slow = has_accepting_run_saturation(m, b.c0)
        assert fast.accepting == slow.accepting
        for v in (fast, slow):
            if v.accepting:
                end, _ = replay(m, b.c0, v.prefix)
                assert end.head == v.witness


def _replay_cycle(m, g, pop_rules, h):
    rules = []
    for e in repeating_cycle(g, h):
        why = g.edges[e]
        rules.append(why[1])
        if why[0] == "pop":
            rules.extend(pop_rules(why[2]))
    return replay(m, Configuration(h.control, (h.top, BOTTOM), h.phase), rules)


def test_repeating_cycles_replay_through_an_accepting_control():
    for seed in range(120):
        b, _ = small_bundle(seed, "cycles")
        m = b.model
        g, pop = full_graph(m, b.theta0)
        for h in repeating_heads(g):
            end, visited = _replay_cycle(m, g, lambda t: unfold(pop, t), h)
            assert end.head == h and visited == 1


def test_exploration_matches_the_full_graph():
    for seed in range(150):
        b, _ = small_bundle(seed, "explore")
        m = b.model
        ex = explore_heads(m, b.c0)
        phases = reachable_phases(m, b.theta0)
        pop = pre_star_empty(m, phases)
        reached = set(ex.parent)
        # strongest bit per exit of every reached head
        best = {}
        for (p, th), sym, bit, dst in pop.transitions:
            if Head(p, sym, th) in reached:
                key = ((p, th), sym, dst)
                best[key] = max(best.get(key, 0), bit)
        assert ex.pop_table() == {(s, sym, bit, d) for (s, sym, d), bit in best.items()}

        def strong(edges):
            return {e for e in edges if e[1] or (e[0], 1, e[2]) not in edges}

        full = build_head_graph(m, pop, phases)
        assert strong({e for e in full.edges if e[0] in reached}) == strong(set(ex.graph.edges))
        for h in reached:
            end, _ = replay(m, b.c0, ex.prefix(h))
            assert end.head == h
        for h, exits in ex.exits.items():
            for (q, th), bit in exits.items():
                end, visited = replay(m, Configuration(h.control, (h.top, BOTTOM), h.phase),
                                      ex.unfold_exit(h, (q, th, bit)))
                assert end == Configuration(q, (BOTTOM,), th) and visited == bit


def test_verdict_ignores_rule_order():
    rng = random.Random(9)
    for seed in range(80):
        b, _ = small_bundle(seed, "shuffle")
        f = random_formula(rng, b.atoms, rng.randint(0, 4), 3, nnf=True)
        order = list(range(len(b.model.rules)))
        rng.shuffle(order)
        shuffled, new_id = permute_rules(b.model, order)
        theta = phase_of(new_id[i] for i in phase_ids(b.theta0))
        want = model_check(b.model, b.theta0, b.c0, f).accepting
        assert model_check(shuffled, theta, b.c0._replace(phase=theta), f).accepting == want


def test_stats_are_reported(e2):
    m, theta0 = e2
    v = model_check(m, theta0, config("p0", "a", phase=theta0), TRUE)
    for key in ("phases", "product_rules", "pop_transitions", "graph_nodes", "graph_edges",
                "sccs", "explore_ms", "total_ms"):
        assert key in v.stats


def test_long_pushes_are_normalized_before_checking():
    rules = (NormalRule("r", "p", "a", "p", ("a", "a", "a")),)
    m = SmPds(("p",), ("a",), rules, {"p": frozenset({"x"})})
    c0 = config("p", "a", phase=m.all_rules)
    v = model_check(m, m.all_rules, c0, parse_ltl("G F x"))
    assert v.accepting
    assert set(v.trace) <= {"r", "r_1"}
    # the split push passes through an unlabelled fresh control
    assert not model_check(m, m.all_rules, c0, parse_ltl("G x")).accepting
