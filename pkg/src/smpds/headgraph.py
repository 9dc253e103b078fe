"""Head reachability graph, repeating heads, emptiness and LTL model checking."""
from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field

from .graphs import strongly_connected_components
from .ltl import BuchiAutomaton, Formula, ltl_to_buchi, to_nnf
from .model import (BOTTOM, Configuration, Head, Phase, SmPds, apply_modification, normalize,
                    reachable_phases)
from .prestar import (ACCEPT, LabeledAutomaton, accepting_paths, pre_star_empty, saturate,
                      seed_rep_automaton, unfold)
from .product import build_product, initial_product_config


@dataclass
class HeadGraph:
    # insertion-ordered set (dict keys) so traversal order is reproducible
    nodes: dict = field(default_factory=dict)
    # (src, bit, dst) -> ("mod"|"swap"|"push", rule) or ("pop", rule, pop-table transition)
    edges: dict = field(default_factory=dict)

    def add_edge(self, src, bit, dst, why):
        key = (src, bit, dst)
        if key not in self.edges:
            self.edges[key] = why
            self.nodes.setdefault(src)
            self.nodes.setdefault(dst)

    def successors(self) -> dict:
        out = {v: [] for v in self.nodes}
        for src, bit, dst in self.edges:
            out[src].append((bit, dst))
        return out


def build_head_graph(model: SmPds, pop: LabeledAutomaton, phases) -> HeadGraph:
    """Edges between heads derived from modifying, swap and push rules.

    A push rule ``<p,γ> -> <p0, γ0 γ1>`` also yields, for every pop-table
    transition ``((p0,θ), γ0, b, (p2,θ2))``, the edge to ``((p2, γ1), θ2)``.
    """
    g = HeadGraph()
    B = model.is_accepting
    phases = tuple(phases)
    for i, r in enumerate(model.rules):
        if i in model.masks:
            for theta in phases:
                post = apply_modification(model, i, theta)
                if post is None:
                    continue
                for sym in model.gamma:
                    g.add_edge(Head(r.source, sym, theta), B(r.source),
                               Head(r.target, sym, post), ("mod", i))
            continue
        if not r.push:
            continue
        bit = B(r.source)
        for theta in phases:
            if not theta >> i & 1:
                continue
            src = Head(r.source, r.pop, theta)
            g.add_edge(src, bit, Head(r.target, r.push[0], theta),
                       ("swap" if len(r.push) == 1 else "push", i))
            if len(r.push) == 2:
                for b, (p2, theta2) in pop.out((r.target, theta), r.push[0]):
                    t = ((r.target, theta), r.push[0], b, (p2, theta2))
                    g.add_edge(src, bit | b, Head(p2, r.push[1], theta2), ("pop", i, t))
    return g


@dataclass
class Exploration:
    """Heads reachable from a start configuration, with their pop summaries.

    ``exits[h]`` maps ``(control, phase)`` to the strongest bit seen: 1 when
    some run from ``h`` down to that exit visits an accepting control before
    its last step.  This is the pop table restricted to the reached heads,
    keeping only the dominant bit.  ``graph`` is the head graph on the same
    heads.  ``parent`` and ``why`` record first justifications, enough to
    rebuild concrete runs.
    """

    start: Configuration
    graph: HeadGraph = field(default_factory=HeadGraph)
    exits: dict = field(default_factory=dict)
    parent: dict = field(default_factory=dict)
    # (head, control, phase, bit) -> justification of that exit
    why: dict = field(default_factory=dict)
    # descent node (depth, control, phase) -> (previous node, exit) or None
    descent: dict = field(default_factory=dict)

    def pop_table(self) -> set:
        """Exits as pop-table transitions ``((p,θ), γ, b, (p2,θ2))``."""
        return {((h.control, h.phase), h.top, b, (q, th))
                for h, es in self.exits.items() for (q, th), b in es.items()}

    def unfold_exit(self, h: Head, e) -> list:
        """Rule ids of a run from ``(<p,γ>,θ)`` to the empty-stack exit ``e = (q, θ2, b)``."""
        out = []
        todo = [(h, e)]
        while todo:
            h, (q, theta, b) = todo.pop()
            why = self.why[h, q, theta, b]
            out.append(why[1])
            if why[0] == "seq":
                todo.append((why[2], why[3]))
            elif why[0] == "push":
                todo.append((why[4], why[5]))
                todo.append((why[2], why[3]))
        return out

    def prefix(self, h: Head) -> list:
        """Rule ids of a run from the start to a configuration with head ``h``."""
        parts = []
        while True:
            why = self.parent[h]
            if why[0] == "descent":
                node = why[1]
                while self.descent[node] is not None:
                    prev, e = self.descent[node]
                    parts.append(self.unfold_exit(self._descent_head(prev), e))
                    node = prev
                break
            g, i = why[1], why[2]
            if why[0] == "return":
                parts.append(self.unfold_exit(why[3], why[4]))
            parts.append([i])
            h = g
        return [i for part in reversed(parts) for i in part]

    def _descent_head(self, node) -> Head:
        k, q, theta = node
        return Head(q, self.start.stack[k], theta)


def explore_heads(model: SmPds, c0: Configuration) -> Exploration:
    """Tabulate heads reachable from ``c0`` and their pop summaries on demand.

    A push rule subscribes the pushing head to the exits of its callee head;
    each callee exit reveals the head below and, once that head exits too,
    an exit of the pusher.  Swap and modifying rules pass exits straight
    back.  The symbols of the start stack are uncovered the same way through
    descent nodes ``(k, p, θ)``: the run reached ``<p, stack[k:]>`` at ``θ``.
    """
    ex = Exploration(c0)
    g, exits, parent, why = ex.graph, ex.exits, ex.parent, ex.why
    acc = {p: model.is_accepting(p) for p in model.controls}
    seq_subs, call_subs, after_subs, desc_subs = {}, {}, {}, {}
    work = deque()
    rules, rules_from, modifying_from = model.rules, model.rules_from, model.modifying_from
    stack = c0.stack

    def reach(h, how):
        if h not in parent:
            parent[h] = how
            exits[h] = {}
            seq_subs[h], call_subs[h], after_subs[h], desc_subs[h] = [], [], [], []
            work.append(h)

    def add_exit(h, q, theta, b, how):
        es = exits[h]
        cur = es.get((q, theta))
        if cur is None or b > cur:
            es[q, theta] = b
            why[h, q, theta, b] = how
            work.append((h, q, theta, b))

    def descend(node, how):
        k, q, theta = node
        if node in ex.descent or stack[k] == BOTTOM:
            return
        ex.descent[node] = how
        h = Head(q, stack[k], theta)
        reach(h, ("descent", node))
        desc_subs[h].append(node)
        for (q2, th2), b in list(exits[h].items()):
            descend((k + 1, q2, th2), (node, (q2, th2, b)))

    def on_call(caller, i, cb, callee, q, theta, b):
        r = rules[i]
        below = Head(q, r.push[1], theta)
        g.add_edge(caller, cb | b, below, ("pop", i, ((r.target, caller.phase), r.push[0], b, (q, theta))))
        reach(below, ("return", caller, i, callee, (q, theta, b)))
        sub = (caller, i, cb | b, callee, (q, theta, b))
        after_subs[below].append(sub)
        for (q2, th2), b2 in list(exits[below].items()):
            add_exit(caller, q2, th2, cb | b | b2, ("push", i, callee, (q, theta, b), below, (q2, th2, b2)))

    def expand(h):
        p, sym, theta = h
        cb = acc[p]
        for i in rules_from.get((p, sym), ()):
            if not theta >> i & 1:
                continue
            r = rules[i]
            if not r.push:
                add_exit(h, r.target, theta, cb, ("pop", i))
                continue
            callee = Head(r.target, r.push[0], theta)
            if len(r.push) == 1:
                g.add_edge(h, cb, callee, ("swap", i))
                reach(callee, ("edge", h, i))
                seq_subs[callee].append((h, i, cb))
                for (q, th), b in list(exits[callee].items()):
                    add_exit(h, q, th, cb | b, ("seq", i, callee, (q, th, b)))
            else:
                g.add_edge(h, cb, callee, ("push", i))
                reach(callee, ("edge", h, i))
                call_subs[callee].append((h, i, cb))
                for (q, th), b in list(exits[callee].items()):
                    on_call(h, i, cb, callee, q, th, b)
        for i in modifying_from.get(p, ()):
            post = apply_modification(model, i, theta)
            if post is None:
                continue
            nxt = Head(rules[i].target, sym, post)
            g.add_edge(h, cb, nxt, ("mod", i))
            reach(nxt, ("edge", h, i))
            seq_subs[nxt].append((h, i, cb))
            for (q, th), b in list(exits[nxt].items()):
                add_exit(h, q, th, cb | b, ("seq", i, nxt, (q, th, b)))

    descend((0, c0.control, c0.phase), None)
    while work:
        item = work.popleft()
        if len(item) == 3:
            expand(item)
            continue
        h, q, theta, b = item
        if exits[h][q, theta] != b:
            continue    # superseded by a stronger bit, which has its own event
        e = (q, theta, b)
        key = (q, theta)
        # the two loops below inline add_exit: they dominate the running time
        for caller, i, cb in seq_subs[h]:
            nb = cb | b
            es = exits[caller]
            cur = es.get(key)
            if cur is None or nb > cur:
                es[key] = nb
                why[caller, q, theta, nb] = ("seq", i, h, e)
                work.append((caller, q, theta, nb))
        for caller, i, cb in call_subs[h]:
            on_call(caller, i, cb, h, q, theta, b)
        for caller, i, cbb, callee, e1 in after_subs[h]:
            nb = cbb | b
            es = exits[caller]
            cur = es.get(key)
            if cur is None or nb > cur:
                es[key] = nb
                why[caller, q, theta, nb] = ("push", i, callee, e1, h, e)
                work.append((caller, q, theta, nb))
        for node in desc_subs[h]:
            descend((node[0] + 1, q, theta), (node, e))
    for h in parent:
        g.nodes.setdefault(h)
    return ex


def _components(g: HeadGraph):
    succ = g.successors()
    comps = strongly_connected_components(list(g.nodes),
                                          lambda v: [d for _, d in succ[v]])
    comp_of = {}
    for k, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = k
    return comps, comp_of


def repeating_heads(g: HeadGraph, stats: dict | None = None) -> set:
    """Heads lying in an SCC that contains a 1-labelled edge."""
    comps, comp_of = _components(g)
    if stats is not None:
        stats["sccs"] = len(comps)
    good = {comp_of[s] for s, bit, d in g.edges if bit and comp_of[s] == comp_of[d]}
    return {v for v in g.nodes if comp_of[v] in good}


def _path(succ, src, dst, allowed):
    """Shortest edge path from src to dst inside ``allowed`` (empty if src == dst)."""
    if src == dst:
        return []
    parent = {src: None}
    queue = deque([src])
    while queue:
        v = queue.popleft()
        for bit, w in succ[v]:
            if w in allowed and w not in parent:
                parent[w] = (v, bit)
                if w == dst:
                    path = []
                    while parent[w] is not None:
                        u, b = parent[w]
                        path.append((u, b, w))
                        w = u
                    return path[::-1]
                queue.append(w)
    return None


def repeating_cycle(g: HeadGraph, h: Head, reps=None) -> list:
    """A cycle of edges from ``h`` back to ``h`` that uses a 1-labelled edge."""
    reps = repeating_heads(g) if reps is None else reps
    succ = g.successors()
    for s, bit, d in g.edges:
        if not bit or s not in reps or d not in reps:
            continue
        to_s = _path(succ, h, s, reps)
        back = _path(succ, d, h, reps) if to_s is not None else None
        if back is not None:
            return to_s + [(s, 1, d)] + back
    return []


@dataclass
class Verdict:
    accepting: bool
    witness: Head | None = None
    # prefix: rule ids from c0 to a configuration with the witness head;
    # cycle: head-graph edges returning to the witness through an accepting visit
    prefix: list = field(default_factory=list)
    cycle: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    # prefix as rule names of the checked model (source rules for model_check)
    trace: list = field(default_factory=list)

    @property
    def answer(self) -> str:
        return "accepting-run-exists" if self.accepting else "none"


def has_accepting_run(model: SmPds, c0: Configuration, stats: dict | None = None) -> Verdict:
    """Emptiness by forward exploration: only heads reachable from ``c0`` are built.

    An accepting run exists iff some reached head is repeating, since every
    reached head is the head of a configuration reachable from ``c0``.
    """
    stats = {} if stats is None else stats
    t0 = time.perf_counter()
    ex = explore_heads(model, c0)
    g = ex.graph
    stats["phases"] = len({h.phase for h in g.nodes})
    stats["pop_transitions"] = sum(len(es) for es in ex.exits.values())
    t1 = time.perf_counter()
    reps = repeating_heads(g, stats)
    stats["graph_nodes"] = len(g.nodes)
    stats["graph_edges"] = len(g.edges)
    stats["repeating_heads"] = len(reps)
    t2 = time.perf_counter()
    stats.update(explore_ms=_ms(t0, t1), graph_ms=_ms(t1, t2))
    if not reps:
        return Verdict(False, stats=stats)
    # the first repeating head in discovery order, for a short and stable witness
    witness = next(h for h in ex.parent if h in reps)
    return Verdict(True, witness, ex.prefix(witness), repeating_cycle(g, witness, reps), stats)


def has_accepting_run_saturation(model: SmPds, c0: Configuration, stats: dict | None = None) -> Verdict:
    """Emptiness through the full pop table and a saturated automaton of repeating heads.

    Works over every reachable phase regardless of ``c0``, so it is much
    slower than :func:`has_accepting_run`; kept as an independent engine.
    """
    stats = {} if stats is None else stats
    t0 = time.perf_counter()
    phases = reachable_phases(model, c0.phase)
    stats["phases"] = len(phases)
    t1 = time.perf_counter()
    pop = pre_star_empty(model, phases)
    stats["pop_transitions"] = len(pop.transitions)
    t2 = time.perf_counter()
    g = build_head_graph(model, pop, phases)
    reps = repeating_heads(g, stats)
    stats["graph_nodes"] = len(g.nodes)
    stats["graph_edges"] = len(g.edges)
    stats["repeating_heads"] = len(reps)
    t3 = time.perf_counter()
    rep_auto = saturate(model, seed_rep_automaton(model, reps), phases) if reps else None
    t4 = time.perf_counter()
    stats["rep_transitions"] = len(rep_auto.transitions) if rep_auto else 0
    stats.update(phases_ms=_ms(t0, t1), prestar_ms=_ms(t1, t2), graph_ms=_ms(t2, t3),
                 emptiness_ms=_ms(t3, t4))
    if rep_auto is None:
        return Verdict(False, stats=stats)
    paths = accepting_paths(rep_auto, c0)
    if not paths:
        return Verdict(False, stats=stats)
    path = paths[min(paths)]
    entering = next(t for t in path if t[3] == ACCEPT)
    witness = rep_auto.witness[entering]
    prefix = [i for t in path for i in unfold(rep_auto, t)]
    return Verdict(True, witness, prefix, repeating_cycle(g, witness, reps), stats)


def _ms(a, b):
    return round((b - a) * 1000, 3)


def model_check(model: SmPds, theta0: Phase, c0: Configuration, formula: Formula | None = None,
                ba: BuchiAutomaton | None = None, engine=None) -> Verdict:
    """Does SOME run from ``c0`` satisfy the formula?

    The answer is existential.  To check that every run satisfies ``f``,
    check ``!f`` and negate the answer.  A prebuilt automaton may be given
    instead of a formula.  ``engine`` defaults to :func:`has_accepting_run`.
    """
    if (formula is None) == (ba is None):
        raise ValueError("give exactly one of formula and ba")
    stats = {}
    t0 = time.perf_counter()
    norm = normalize(model)
    theta0 = theta0 | norm.always_on
    if ba is None:
        ba = ltl_to_buchi(to_nnf(formula))
    t1 = time.perf_counter()
    product, prodmap, _ = build_product(norm, ba, theta0)
    start = initial_product_config(Configuration(c0.control, c0.stack, theta0), ba, prodmap)
    t2 = time.perf_counter()
    stats.update(ba_states=len(ba.states), ba_transitions=len(ba.transitions),
                 product_rules=len(product.rules))
    verdict = (engine or has_accepting_run)(product, start, stats)
    verdict.trace = [norm.rules[prodmap.sources[j]].name for j in verdict.prefix]
    t3 = time.perf_counter()
    stats.update(automaton_ms=_ms(t0, t1), product_ms=_ms(t1, t2), total_ms=_ms(t0, t3))
    return verdict
