"""Labelled automata over stack symbols and the pre* saturation procedure.

Automaton states are ``(control, phase)`` pairs plus, for seeded automata,
the extra state :data:`ACCEPT`.  A transition ``(src, symbol, bit, dst)``
carries a bit recording whether the backward-reachability witness behind it
passes through an accepting control.  Both bits may coexist for the same
``(src, symbol, dst)``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .model import BOTTOM, Configuration, Head, SmPds, apply_modification, order_key

ACCEPT = "accept"


@dataclass
class LabeledAutomaton:
    transitions: set = field(default_factory=set)
    initial: set = field(default_factory=set)
    final: set = field(default_factory=set)
    # when False, accepts() ignores a trailing bottom symbol
    bottom_explicit: bool = False
    # transition -> justification; see saturate() for the tuple shapes
    provenance: dict = field(default_factory=dict)
    # transition into ACCEPT -> head that the run reaches (seeded automata only)
    witness: dict = field(default_factory=dict)

    def __post_init__(self):
        self._out = {}
        for t in self.transitions:
            self._out.setdefault((t[0], t[1]), []).append((t[2], t[3]))

    def add(self, t, why=None) -> bool:
        if t in self.transitions:
            return False
        self.transitions.add(t)
        self._out.setdefault((t[0], t[1]), []).append((t[2], t[3]))
        if why is not None:
            self.provenance[t] = why
        return True

    def out(self, state, symbol):
        """``(bit, dst)`` pairs leaving ``state`` on ``symbol``."""
        return self._out.get((state, symbol), ())

    def copy(self) -> "LabeledAutomaton":
        return LabeledAutomaton(set(self.transitions), set(self.initial), set(self.final),
                                self.bottom_explicit, dict(self.provenance), dict(self.witness))

    @property
    def states(self) -> set:
        out = set(self.initial) | set(self.final)
        for s, _, _, d in self.transitions:
            out.add(s)
            out.add(d)
        return out


def _word(a: LabeledAutomaton, c: Configuration):
    stack = c.stack
    if not a.bottom_explicit and stack and stack[-1] == BOTTOM:
        stack = stack[:-1]
    return stack


def accepting_paths(a: LabeledAutomaton, c: Configuration) -> dict:
    """bit -> one accepting path (list of transitions) for each achievable bit."""
    start = (c.control, c.phase)
    if start not in a.initial:
        return {}
    # frontier maps (state, bit) -> path so far; one path per pair suffices
    frontier = {(start, 0): ()}
    for sym in _word(a, c):
        nxt = {}
        for (s, b), path in frontier.items():
            for b2, d in a.out(s, sym):
                key = (d, b | b2)
                if key not in nxt:
                    nxt[key] = path + ((s, sym, b2, d),)
        frontier = nxt
        if not frontier:
            return {}
    result = {}
    for (s, b), path in sorted(frontier.items(), key=lambda kv: (kv[0][1], len(kv[1]))):
        if s in a.final and b not in result:
            result[b] = list(path)
    return result


def accepts(a: LabeledAutomaton, c: Configuration) -> set:
    """The set of bits ``b`` such that ``[c, b]`` is accepted."""
    return set(accepting_paths(a, c))


class _Saturation:
    """Worklist engine for the two saturation rules.

    Normal rules are indexed by (target control, first pushed symbol) so each
    new transition only meets the rules that can use it as a premise.  For a
    push rule, the second premise transition may arrive later; such partial
    matches wait in ``pending`` keyed by (mid state, second pushed symbol).
    """

    def __init__(self, model: SmPds, phases, a: LabeledAutomaton):
        self.model = model
        self.phases = tuple(phases)
        self.a = a
        self.work = deque(sorted(a.transitions, key=order_key))
        self.pending = {}
        self.by_first = {}
        self.pops = []
        for i in model.normal:
            r = model.rules[i]
            if r.push:
                self.by_first.setdefault((r.target, r.push[0]), []).append(i)
            else:
                self.pops.append(i)
        # (target control, post phase) -> [(source control, pre phase, rule id)]
        self.mod_pre = {}
        for i in model.modifying:
            r = model.rules[i]
            for theta in self.phases:
                post = apply_modification(model, i, theta)
                if post is not None:
                    self.mod_pre.setdefault((r.target, post), []).append((r.source, theta, i))

    def add(self, t, why):
        a = self.a
        if a.add(t, why):
            src = t[0]
            if src != ACCEPT:
                a.initial.add(src)
            if t[3] == ACCEPT:
                for premise in why[2:]:
                    if premise is not None and premise[3] == ACCEPT and premise in a.witness:
                        a.witness[t] = a.witness[premise]
                        break
            self.work.append(t)

    def run(self) -> LabeledAutomaton:
        model, a = self.model, self.a
        B = model.is_accepting
        for i in self.pops:
            r = model.rules[i]
            for theta in self.phases:
                if theta >> i & 1:
                    self.add(((r.source, theta), r.pop, B(r.source), (r.target, theta)),
                             ("pop", i))
        while self.work:
            t = self.work.popleft()
            s, sym, b, q = t
            for src, gsym, bit, i, first in self.pending.get((s, sym), ()):
                self.add((src, gsym, bit | b, q), ("push", i, first, t))
            if s == ACCEPT:
                continue
            p1, theta = s
            for i in self.by_first.get((p1, sym), ()):
                if not theta >> i & 1:
                    continue
                r = model.rules[i]
                src, bit = (r.source, theta), B(r.source) | b
                if len(r.push) == 1:
                    self.add((src, r.pop, bit, q), ("swap", i, t))
                else:
                    second = r.push[1]
                    self.pending.setdefault((q, second), []).append((src, r.pop, bit, i, t))
                    for b2, q2 in list(a.out(q, second)):
                        self.add((src, r.pop, bit | b2, q2), ("push", i, t, (q, second, b2, q2)))
            if sym == BOTTOM:
                continue
            for p, pre, i in self.mod_pre.get((p1, theta), ()):
                self.add(((p, pre), sym, B(p) | b, q), ("mod", i, t))
        return a


def saturate(model: SmPds, a: LabeledAutomaton, phases) -> LabeledAutomaton:
    """Close a copy of ``a`` under the saturation rules over ``phases``.

    Provenance records one justification per transition:
    ``("pop", rule)``, ``("swap", rule, t)``, ``("push", rule, t1, t2)``,
    ``("mod", rule, t)`` or ``("seed",)``.  Premises always precede the
    transition they justify, so the record unfolds into a finite run.
    """
    a = a.copy()
    for t in a.transitions:
        a.provenance.setdefault(t, ("seed",))
    return _Saturation(model, phases, a).run()


def pre_star_empty(model: SmPds, phases) -> LabeledAutomaton:
    """pre* of every empty-stack configuration ``(<p, ε>, θ)`` at once.

    ``((p,θ), γ, b, (p2,θ2))`` is present iff ``(<p,γ>,θ)`` reaches
    ``(<p2,ε>,θ2)``, and present with ``b = 1`` iff some such run visits an
    accepting control before its last step.
    """
    final = {(p, theta) for p in model.controls for theta in phases}
    return saturate(model, LabeledAutomaton(final=final), phases)


def seed_rep_automaton(model: SmPds, reps) -> LabeledAutomaton:
    """Automaton for ``{(<p, γ v>, θ) : ((p,γ),θ) in reps}`` with explicit bottom."""
    a = LabeledAutomaton(final={ACCEPT}, bottom_explicit=True)
    for h in sorted(reps, key=order_key):
        t = ((h.control, h.phase), h.top, 0, ACCEPT)
        a.add(t, ("seed",))
        a.initial.add(t[0])
        a.witness[t] = Head(*h)
    for sym in tuple(model.gamma) + (BOTTOM,):
        a.add((ACCEPT, sym, 0, ACCEPT), ("seed",))
    return a


def unfold(a: LabeledAutomaton, t) -> list:
    """Rule ids of a concrete run justifying transition ``t``.

    For a pre* transition ``((p,θ), γ, b, (p2,θ2))`` the run leads from
    ``(<p,γ>,θ)`` to ``(<p2,ε>,θ2)``.  Seed transitions contribute no steps,
    so for a transition into :data:`ACCEPT` the run ends at the seeded head.
    """
    out = []
    stack = [t]
    while stack:
        why = a.provenance[stack.pop()]
        if why[0] == "seed":
            continue
        out.append(why[1])
        # premises in reverse so the first premise is unfolded first
        stack.extend(reversed(why[2:]))
    return out
