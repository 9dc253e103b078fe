"""Line-oriented model file format.

::

    # comment
    states: p0 p1 p2
    gamma: a b
    atoms: x y
    label p0 { x }
    rule r1: p0 a -> p1 a
    rule r3: p1 a -> p2
    crule c1: p0 ( r2 | r3 ) p1
    phase0: r1 r2 c1
    init: p0 a

Rules may be referenced before they are declared.  Two optional
directives extend the format: ``accepting: p ...`` marks accepting controls
and ``seed: N`` records the generator seed of a random model.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .model import BOTTOM, Configuration, ModelError, ModifyingRule, NormalRule, Phase, SmPds, phase_ids


class ModelSyntaxError(ValueError):
    def __init__(self, message, line, column=1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass
class ModelBundle:
    model: SmPds
    theta0: Phase
    c0: Configuration
    atoms: tuple = ()
    seed: int | None = None


_TOKEN = re.compile(r"->|[(){}|:]|[^\s(){}|:]+")
_DIRECTIVES = ("states", "gamma", "atoms", "accepting", "phase0", "init", "seed")


def _tokens(line):
    return [(m.group(), m.start() + 1) for m in _TOKEN.finditer(line)]


class _Line:
    def __init__(self, number, toks):
        self.number = number
        self.toks = toks
        self.pos = 0

    def error(self, message, column=None):
        if column is None:
            column = self.toks[min(self.pos, len(self.toks) - 1)][1] if self.toks else 1
        return ModelSyntaxError(message, self.number, column)

    def take(self, expected=None, what=None):
        if self.pos >= len(self.toks):
            raise self.error(f"expected {what or repr(expected)}" if what or expected
                             else "unexpected end of line")
        tok, col = self.toks[self.pos]
        if expected is not None and tok != expected:
            raise self.error(f"expected '{expected}', found '{tok}'")
        self.pos += 1
        return tok, col

    def name(self, what):
        tok, col = self.take(what=what)
        if tok in "(){}|:" or tok == "->":
            raise self.error(f"expected {what}, found '{tok}'", col)
        return tok, col

    def rest(self):
        out = self.toks[self.pos:]
        self.pos = len(self.toks)
        return out

    def until(self, stop):
        out = []
        while self.pos < len(self.toks) and self.toks[self.pos][0] != stop:
            out.append(self.name("name"))
        return out

    def done(self):
        if self.pos < len(self.toks):
            raise self.error(f"unexpected '{self.toks[self.pos][0]}'")


def parse_model(text: str) -> ModelBundle:
    """Parse and validate a model file; errors carry line and column."""
    sections = {}
    labels = {}
    rules = []        # (kind, name, line, payload)
    for number, raw in enumerate(text.splitlines(), 1):
        toks = _tokens(raw.split("#", 1)[0])
        if not toks:
            continue
        ln = _Line(number, toks)
        head, _ = ln.take()
        if head in _DIRECTIVES:
            ln.take(":")
            if head in sections:
                raise ln.error(f"duplicate {head} directive", toks[0][1])
            sections[head] = (ln, ln.rest())
        elif head == "label":
            p = ln.name("state")
            ln.take("{")
            atoms = ln.until("}")
            ln.take("}")
            ln.done()
            labels.setdefault(p[0], (ln, p, []))[2].extend(atoms)
        elif head == "rule":
            name = ln.name("rule id")
            ln.take(":")
            src, pop = ln.name("state"), ln.name("stack symbol")
            ln.take("->")
            tgt = ln.name("state")
            push = ln.rest()
            if len(push) > 2:
                raise ln.error("push length exceeds 2", push[2][1])
            for tok, col in push:
                if tok in "(){}|:" or tok == "->":
                    raise ln.error(f"unexpected '{tok}'", col)
            rules.append(("rule", name, ln, (src, pop, tgt, push)))
        elif head == "crule":
            name = ln.name("rule id")
            ln.take(":")
            src = ln.name("state")
            ln.take("(")
            remove = ln.until("|")
            ln.take("|")
            add = ln.until(")")
            ln.take(")")
            tgt = ln.name("state")
            ln.done()
            rules.append(("crule", name, ln, (src, remove, tgt, add)))
        else:
            raise ln.error(f"unknown directive '{head}'", toks[0][1])

    for required in ("states", "gamma", "phase0", "init"):
        if required not in sections:
            raise ModelSyntaxError(f"missing {required}", len(text.splitlines()) + 1)

    def declared(key, what):
        ln, toks = sections[key]
        seen = {}
        for tok, col in toks:
            if tok in "(){}|:" or tok == "->":
                raise ln.error(f"unexpected '{tok}'", col)
            if tok in seen:
                raise ln.error(f"duplicate {what} {tok}", col)
            seen[tok] = None
        return tuple(seen)

    controls = declared("states", "state")
    gamma = declared("gamma", "stack symbol")
    if BOTTOM in gamma:
        ln, toks = sections["gamma"]
        raise ln.error(f"{BOTTOM} is reserved", toks[gamma.index(BOTTOM)][1])
    atoms = declared("atoms", "atom") if "atoms" in sections else ()
    cset, gset, aset = set(controls), set(gamma), set(atoms)

    def check(ln, item, pool, what):
        if item[0] not in pool:
            raise ln.error(f"unknown {what} {item[0]}", item[1])
        return item[0]

    index = {}
    for k, (_, name, ln, _) in enumerate(rules):
        if name[0] in index:
            raise ln.error(f"duplicate rule id {name[0]}", name[1])
        index[name[0]] = k

    built = []
    for kind, name, ln, payload in rules:
        if kind == "rule":
            src, pop, tgt, push = payload
            built.append(NormalRule(name[0], check(ln, src, cset, "state"), check(ln, pop, gset, "symbol"),
                                    check(ln, tgt, cset, "state"),
                                    tuple(check(ln, s, gset, "symbol") for s in push)))
        else:
            src, remove, tgt, add = payload
            ids = lambda items: frozenset(index[check(ln, r, index, "rule")] for r in items)  # noqa: E731
            built.append(ModifyingRule(name[0], check(ln, src, cset, "state"), ids(remove), ids(add),
                                       check(ln, tgt, cset, "state")))

    label_map = {}
    for p, (ln, item, items) in labels.items():
        check(ln, item, cset, "state")
        got = frozenset(check(ln, a, aset, "atom") for a in items)
        if got:
            label_map[p] = got

    accepting = frozenset()
    if "accepting" in sections:
        ln, toks = sections["accepting"]
        accepting = frozenset(check(ln, t, cset, "state") for t in toks)

    ln, toks = sections["phase0"]
    theta0 = 0
    for tok in toks:
        theta0 |= 1 << index[check(ln, tok, index, "rule")]

    ln, toks = sections["init"]
    if not toks:
        raise ln.error("init needs a control")
    p0 = check(ln, toks[0], cset, "state")
    stack = tuple(check(ln, t, gset, "symbol") for t in toks[1:]) + (BOTTOM,)

    seed = None
    if "seed" in sections:
        ln, toks = sections["seed"]
        if len(toks) != 1 or not re.fullmatch(r"-?\d+", toks[0][0]):
            raise ln.error("seed must be one integer")
        seed = int(toks[0][0])

    try:
        model = SmPds(controls, gamma, tuple(built), label_map, accepting)
    except ModelError as exc:
        raise ModelSyntaxError(str(exc), 1) from None
    return ModelBundle(model, theta0, Configuration(p0, stack, theta0), atoms, seed)


def flat_name(x) -> str:
    if isinstance(x, tuple):
        return "@".join(map(flat_name, x))
    return str(x)


def format_model(bundle: ModelBundle) -> str:
    """Inverse of :func:`parse_model` for bundles with string names.

    Non-string controls (pairs from the product or the translation) are
    flattened with ``@`` so the output still parses.
    """
    m = bundle.model
    names = [flat_name(p) for p in m.controls]
    out = []
    if bundle.seed is not None:
        out.append(f"seed: {bundle.seed}")
    out.append("states: " + " ".join(names))
    out.append("gamma: " + " ".join(map(str, m.gamma)))
    atoms = tuple(bundle.atoms) or tuple(sorted({a for s in m.labels.values() for a in s}))
    if atoms:
        out.append("atoms: " + " ".join(atoms))
    if m.accepting:
        out.append("accepting: " + " ".join(flat_name(p) for p in m.controls if p in m.accepting))
    for p in m.controls:
        if m.label(p):
            out.append(f"label {flat_name(p)} {{ {' '.join(sorted(m.label(p)))} }}")
    for r in m.rules:
        if isinstance(r, NormalRule):
            line = f"rule {r.name}: {flat_name(r.source)} {r.pop} -> {flat_name(r.target)}"
            out.append(" ".join([line, *map(str, r.push)]))
        else:
            rm = " ".join(m.rules[j].name for j in sorted(r.remove))
            ad = " ".join(m.rules[j].name for j in sorted(r.add))
            out.append(f"crule {r.name}: {flat_name(r.source)} ( {rm} | {ad} ) {flat_name(r.target)}")
    out.append("phase0: " + " ".join(m.rules[i].name for i in phase_ids(bundle.theta0)))
    stack = [s for s in bundle.c0.stack if s != BOTTOM]
    out.append("init: " + " ".join([flat_name(bundle.c0.control), *map(str, stack)]))
    return "\n".join(out) + "\n"
