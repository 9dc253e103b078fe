"""Independent checks: the phase-encoding translation to a plain PDS and a
bounded explicit-state explorer of the step relation."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

from .headgraph import Verdict, model_check
from .ltl import BuchiAutomaton, Formula
from .model import (BOTTOM, Configuration, Head, NormalRule, Phase, SmPds, apply_modification,
                    normalize, reachable_phases, step_rules)


def translate_to_pds(model: SmPds, theta0: Phase) -> SmPds:
    """Encode phases into controls: the result has no modifying rules.

    Controls are ``(p, θ)`` for the phases reachable from ``theta0``.  A
    modifying rule becomes one swap rule per stack symbol, since a plain PDS
    step must pop.  The single phase of the result is ``all_rules``.
    """
    phases = reachable_phases(model, theta0)
    controls = tuple((p, theta) for theta in phases for p in model.controls)
    rules = []
    for k, theta in enumerate(phases):
        for i, r in enumerate(model.rules):
            if i in model.masks:
                post = apply_modification(model, i, theta)
                if post is None:
                    continue
                for sym in model.gamma:
                    rules.append(NormalRule(f"{r.name}@{k}.{sym}", (r.source, theta), sym,
                                            (r.target, post), (sym,)))
            elif theta >> i & 1:
                rules.append(NormalRule(f"{r.name}@{k}", (r.source, theta), r.pop,
                                        (r.target, theta), r.push))
    labels = {(p, theta): model.label(p) for p, theta in controls if model.label(p)}
    accepting = frozenset((g, theta) for g, theta in controls if g in model.accepting)
    return SmPds(controls, model.gamma, tuple(rules), labels, accepting, model.synthetic)


def translated_config(c0: Configuration, pds: SmPds) -> Configuration:
    return Configuration((c0.control, c0.phase), c0.stack, pds.all_rules)


@dataclass
class ExploreFacts:
    """Facts found by :func:`bounded_explore` from one start configuration.

    ``reach`` and ``r_flag`` hold ``(start, c)`` pairs; ``r_flag`` marks
    pairs connected by a run that leaves an accepting control before ending
    in ``c``.  Facts are sound; they are complete only up to the bounds.
    """

    start: Configuration
    reach: set = field(default_factory=set)
    r_flag: set = field(default_factory=set)
    truncated: bool = False
    parent: dict = field(default_factory=dict, repr=False)

    def reached(self, flagged: bool = False) -> set:
        pairs = self.r_flag if flagged else self.reach
        return {c for _, c in pairs}

    def trace(self, c: Configuration, flagged: bool = False) -> list:
        """Rule ids of a run from the start to ``c`` (flagged: through an accepting control)."""
        node = (c, 1 if flagged else 0)
        if node not in self.parent:
            raise KeyError(c)
        rules = []
        while self.parent[node] is not None:
            node, rule = self.parent[node]
            rules.append(rule)
        return rules[::-1]


def _stack_height(stack):
    return len(stack) - (1 if stack and stack[-1] == BOTTOM else 0)


def bounded_explore(model: SmPds, c0: Configuration, max_depth: int, max_stack: int) -> ExploreFacts:
    """Breadth-first closure of the step relation from ``c0``.

    Runs longer than ``max_depth`` steps or with more than ``max_stack``
    symbols above the bottom are cut off, and ``truncated`` records that.
    """
    if max_depth < 1 or max_stack < 1:
        raise ValueError("bounds must be at least 1")
    facts = ExploreFacts(c0)
    start = (c0, 0)
    facts.parent[start] = None
    frontier = [start]
    for _ in range(max_depth):
        nxt = []
        for node in frontier:
            c, flag = node
            flag2 = flag | model.is_accepting(c.control)
            for rule, d in step_rules(model, c):
                if _stack_height(d.stack) > max_stack:
                    facts.truncated = True
                    continue
                key = (d, flag2)
                if key not in facts.parent:
                    facts.parent[key] = (node, rule)
                    nxt.append(key)
        frontier = nxt
        if not frontier:
            break
    else:
        if any(True for c, _ in frontier for _ in step_rules(model, c)):
            facts.truncated = True
    for c, flag in facts.parent:
        facts.reach.add((c0, c))
        if flag:
            facts.r_flag.add((c0, c))
    return facts


def bounded_repeating(model: SmPds, head: Head, max_depth: int, max_stack: int) -> list | None:
    """Rule ids of a run from ``(<p,γ ⊥>,θ)`` back to head ``((p,γ),θ)`` through an
    accepting control, if one exists within the bounds.

    The bottom symbol blocks every rule, so such a run never reads below
    ``γ`` and can be repeated forever on top of any stack.
    """
    start = Configuration(head.control, (head.top, BOTTOM), head.phase)
    facts = bounded_explore(model, start, max_depth, max_stack)
    for _, c in facts.r_flag:
        if c.head == head:
            return facts.trace(c, flagged=True)
    return None


def bounded_lasso(model: SmPds, c0: Configuration, max_depth: int, max_stack: int) -> Head | None:
    """First head reachable from ``c0`` (in breadth-first order) that
    :func:`bounded_repeating` confirms, or None."""
    facts = bounded_explore(model, c0, max_depth, max_stack)
    seen = set()
    for c, _ in facts.parent:
        h = c.head
        if h is None or h in seen:
            continue
        seen.add(h)
        if bounded_repeating(model, h, max_depth, max_stack) is not None:
            return h
    return None


class ReplayError(AssertionError):
    pass


def replay(model: SmPds, c0: Configuration, rules) -> tuple:
    """Fire ``rules`` one by one from ``c0``; return ``(final, visited)``.

    ``visited`` is 1 when some step left an accepting control.  Raises
    :class:`ReplayError` if a rule cannot fire.
    """
    c = c0
    visited = 0
    for rule in rules:
        for i, d in step_rules(model, c):
            if i == rule:
                visited |= model.is_accepting(c.control)
                c = d
                break
        else:
            raise ReplayError(f"rule {model.rules[rule].name} cannot fire in {c}")
    return c, visited


@dataclass
class CrossCheck:
    direct: Verdict
    translated: Verdict
    direct_ms: float
    translate_ms: float
    check_ms: float
    pds: SmPds = field(repr=False, default=None)
    # start configuration of the translated model
    start: Configuration | None = None

    @property
    def agree(self) -> bool:
        return self.direct.accepting == self.translated.accepting


def cross_check(model: SmPds, theta0: Phase, c0: Configuration, formula: Formula | None = None,
                ba: BuchiAutomaton | None = None) -> CrossCheck:
    """Run the direct pipeline and the translate-then-check pipeline; compare."""
    t0 = time.perf_counter()
    direct = model_check(model, theta0, c0, formula, ba)
    t1 = time.perf_counter()
    norm = normalize(model)
    theta = theta0 | norm.always_on
    pds = translate_to_pds(norm, theta)
    start = translated_config(Configuration(c0.control, c0.stack, theta), pds)
    t2 = time.perf_counter()
    translated = model_check(pds, pds.all_rules, start, formula, ba)
    t3 = time.perf_counter()
    ms = lambda a, b: round((b - a) * 1000, 3)  # noqa: E731
    return CrossCheck(direct, translated, ms(t0, t1), ms(t1, t2), ms(t2, t3), pds, start)
