"""Self-modifying pushdown systems: rules, phases, configurations and the step relation.

A phase is the set of rules currently enabled.  Rules are numbered in
declaration order (normal and modifying rules share one id space) and a phase
is stored as an ``int`` bitmask over those ids, so phases are hashable,
compare by value and support the set algebra the semantics needs with plain
bit operations.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Hashable, Iterable, Iterator, NamedTuple, Union

BOTTOM = "⊥"

Control = Hashable
Symbol = Hashable
Phase = int


class ModelError(ValueError):
    """Raised for ill-formed models (dangling references, forbidden rule shapes)."""


@dataclass(frozen=True)
class NormalRule:
    name: str
    source: Control
    pop: Symbol
    target: Control
    push: tuple = ()

    def __str__(self):
        pushed = " ".join(map(str, self.push)) or "ε"
        return f"{self.name}: <{self.source},{self.pop}> -> <{self.target},{pushed}>"


@dataclass(frozen=True)
class ModifyingRule:
    """``source --(remove, add)--> target``; ``remove``/``add`` hold rule ids."""

    name: str
    source: Control
    remove: frozenset
    add: frozenset
    target: Control

    def __str__(self):
        return (f"{self.name}: {self.source} --({sorted(self.remove)},"
                f"{sorted(self.add)})--> {self.target}")


Rule = Union[NormalRule, ModifyingRule]


class Configuration(NamedTuple):
    control: Control
    stack: tuple
    phase: Phase

    @property
    def head(self):
        if not self.stack or self.stack[0] == BOTTOM:
            return None
        return Head(self.control, self.stack[0], self.phase)


class Head(NamedTuple):
    control: Control
    top: Symbol
    phase: Phase


def order_key(x):
    """Total sort key over nested tuples of ints and strings (phases can be huge ints)."""
    if isinstance(x, tuple):
        return (2, tuple(order_key(y) for y in x))
    if isinstance(x, int):
        return (0, x)
    return (1, str(x))


def phase_of(ids: Iterable[int]) -> Phase:
    ids = list(ids)
    if not ids:
        return 0
    # one pass over a byte buffer; or-ing into a growing int is quadratic
    buf = bytearray((max(ids) >> 3) + 1)
    for i in ids:
        buf[i >> 3] |= 1 << (i & 7)
    return int.from_bytes(buf, "little")


def phase_ids(phase: Phase) -> list:
    # bin() is linear for any width; shifting bit by bit is quadratic
    if phase <= 0:
        return []
    digits = bin(phase)[:1:-1]
    return [i for i, d in enumerate(digits) if d == "1"]


@dataclass(frozen=True)
class SmPds:
    """An SM-PDS; with a non-empty ``accepting`` set it doubles as an SM-BPDS.

    ``labels`` is the labelling of control points by atomic propositions,
    ``synthetic`` records controls/symbols introduced by :func:`normalize` and
    ``always_on`` is the mask of synthetic rules that every phase must contain.
    """

    controls: tuple
    gamma: tuple
    rules: tuple
    labels: dict = field(default_factory=dict)
    accepting: frozenset = frozenset()
    synthetic: frozenset = frozenset()
    always_on: Phase = 0

    def __post_init__(self):
        ctrl = set(self.controls)
        gam = set(self.gamma)
        if BOTTOM in gam:
            raise ModelError("the bottom symbol is reserved and cannot be declared")
        n = len(self.rules)
        names = set()
        for i, r in enumerate(self.rules):
            if r.name in names:
                raise ModelError(f"duplicate rule id {r.name}")
            names.add(r.name)
            if r.source not in ctrl or r.target not in ctrl:
                raise ModelError(f"rule {r.name} references an undeclared control")
            if isinstance(r, NormalRule):
                if r.pop not in gam or any(s not in gam for s in r.push):
                    raise ModelError(f"rule {r.name} references an undeclared stack symbol")
            else:
                if any(not 0 <= j < n for j in r.remove | r.add):
                    raise ModelError(f"rule {r.name} references an unknown rule id")
        if not self.accepting <= ctrl:
            raise ModelError("accepting controls must be declared controls")

    @cached_property
    def modifying(self) -> list:
        return [i for i, r in enumerate(self.rules) if isinstance(r, ModifyingRule)]

    @cached_property
    def normal(self) -> list:
        return [i for i, r in enumerate(self.rules) if isinstance(r, NormalRule)]

    @property
    def all_rules(self) -> Phase:
        return (1 << len(self.rules)) - 1

    @cached_property
    def rule_index(self) -> dict:
        return {r.name: i for i, r in enumerate(self.rules)}

    @cached_property
    def masks(self) -> dict:
        """rule id -> (remove mask, add mask) for modifying rules."""
        return {i: (phase_of(self.rules[i].remove), phase_of(self.rules[i].add))
                for i in self.modifying}

    @cached_property
    def rules_from(self) -> dict:
        """(control, top) -> normal rule ids popping ``top`` in ``control``."""
        out = {}
        for i in self.normal:
            r = self.rules[i]
            out.setdefault((r.source, r.pop), []).append(i)
        return out

    @cached_property
    def modifying_from(self) -> dict:
        out = {}
        for i in self.modifying:
            out.setdefault(self.rules[i].source, []).append(i)
        return out

    def label(self, control) -> frozenset:
        return self.labels.get(control, frozenset())

    def is_accepting(self, control) -> int:
        return 1 if control in self.accepting else 0

    def phase(self, names: Iterable[str]) -> Phase:
        try:
            return phase_of(self.rule_index[n] for n in names)
        except KeyError as exc:
            raise ModelError(f"unknown rule {exc.args[0]}") from None

    def phase_names(self, phase: Phase) -> list:
        return [self.rules[i].name for i in phase_ids(phase)]

    def with_accepting(self, accepting: Iterable) -> "SmPds":
        return replace(self, accepting=frozenset(accepting))


SmBpds = SmPds


def apply_modification(model: SmPds, rule_id: int, phase: Phase) -> Phase | None:
    """Phase after firing modifying rule ``rule_id`` in ``phase``, or None if it cannot fire."""
    if not phase >> rule_id & 1:
        return None
    remove, add = model.masks[rule_id]
    if not phase & remove:
        return None
    return (phase & ~remove) | add


def step_rules(model: SmPds, c: Configuration) -> Iterator[tuple]:
    """Yield ``(rule_id, successor)`` for every single step from ``c``."""
    if not c.stack or c.stack[0] == BOTTOM:
        return
    top, rest = c.stack[0], c.stack[1:]
    for i in model.rules_from.get((c.control, top), ()):
        if c.phase >> i & 1:
            r = model.rules[i]
            yield i, Configuration(r.target, r.push + rest, c.phase)
    for i in model.modifying_from.get(c.control, ()):
        nxt = apply_modification(model, i, c.phase)
        if nxt is not None:
            yield i, Configuration(model.rules[i].target, c.stack, nxt)


def successors(model: SmPds, c: Configuration) -> set:
    return {nxt for _, nxt in step_rules(model, c)}


def reachable_phases(model: SmPds, theta0: Phase) -> tuple:
    """Closure of ``theta0`` under every modifying rule, ignoring controls and stack.

    The result over-approximates the phases any run can visit.  It is a tuple
    in discovery order, so the position of a phase doubles as a stable id.
    """
    if theta0 & ~model.all_rules:
        raise ModelError("initial phase references unknown rules")
    seen = {theta0: None}
    queue = deque([theta0])
    mods = model.modifying
    while queue:
        theta = queue.popleft()
        for i in mods:
            nxt = apply_modification(model, i, theta)
            if nxt is not None and nxt not in seen:
                seen[nxt] = None
                queue.append(nxt)
    return tuple(seen)


def normalize(model: SmPds) -> SmPds:
    """Split pushes longer than two symbols into chains through fresh controls.

    ``<p,g> -> <q, w1..wn>`` (n > 2) becomes ``<p,g> -> <m1, x1 wn>``,
    ``<m1,x1> -> <m2, x2 w(n-1)>`` ... ``<mk,xk> -> <q, w1 w2>``.  The first
    link keeps the original rule id so phase membership is unchanged; later
    links are added to ``always_on`` and never appear in a modifying rule.
    Models that are already normalized are returned as is.
    """
    for i in model.modifying:
        r = model.rules[i]
        if i in r.remove:
            raise ModelError(f"modifying rule {r.name} removes itself")
    long_rules = [i for i in model.normal if len(model.rules[i].push) > 2]
    if not long_rules:
        return model

    controls = list(model.controls)
    gamma = list(model.gamma)
    rules = list(model.rules)
    fresh = set(model.synthetic)
    taken = set(map(str, controls)) | set(map(str, gamma))
    always_on = model.always_on
    counter = 0

    def fresh_name(prefix):
        nonlocal counter
        while True:
            counter += 1
            name = f"{prefix}{counter}"
            if name not in taken:
                taken.add(name)
                return name

    for i in long_rules:
        r = rules[i]
        w = r.push
        links = []
        src, pop = r.source, r.pop
        # push one original symbol per link, bottom-most first, until two remain
        for k in range(len(w) - 1, 1, -1):
            m, x = fresh_name("_m"), fresh_name("_x")
            controls.append(m)
            gamma.append(x)
            fresh.update((m, x))
            links.append((src, pop, m, (x, w[k])))
            src, pop = m, x
        links.append((src, pop, r.target, w[:2]))
        s, g, t, pw = links[0]
        rules[i] = NormalRule(r.name, s, g, t, pw)
        for j, (s, g, t, pw) in enumerate(links[1:], 1):
            always_on |= 1 << len(rules)
            rules.append(NormalRule(f"{r.name}_{j}", s, g, t, pw))

    return SmPds(tuple(controls), tuple(gamma), tuple(rules), dict(model.labels),
                 model.accepting, frozenset(fresh), always_on)
