"""LTL formulas: parsing, negation normal form, lasso semantics and Büchi translation.

Büchi automata here read one atom-set per transition.  Transition letters are
described by a :class:`Guard` (atoms that must hold, atoms that must not)
instead of enumerating ``2^At``.
"""
from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from .graphs import strongly_connected_components


class LTLSyntaxError(ValueError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


# -- AST ---------------------------------------------------------------------

class Formula:
    __slots__ = ()

    def children(self):
        return ()

    def size(self):
        """Number of operators (atoms and constants count zero)."""
        return sum(c.size() for c in self.children()) + (1 if self.children() else 0)

    def atoms(self):
        out = set()
        for c in self.children():
            out |= c.atoms()
        return out


@dataclass(frozen=True)
class Atom(Formula):
    name: str

    def atoms(self):
        return {self.name}

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Const(Formula):
    value: bool

    def __str__(self):
        return "true" if self.value else "false"


TRUE = Const(True)
FALSE = Const(False)


@dataclass(frozen=True)
class Unary(Formula):
    arg: Formula
    symbol = "?"

    def children(self):
        return (self.arg,)

    def __str__(self):
        return f"{self.symbol}{_wrap(self.arg)}" if self.symbol == "!" else f"{self.symbol} {_wrap(self.arg)}"


@dataclass(frozen=True)
class Binary(Formula):
    left: Formula
    right: Formula
    symbol = "?"

    def children(self):
        return (self.left, self.right)

    def __str__(self):
        return f"{_wrap(self.left)} {self.symbol} {_wrap(self.right)}"


class Not(Unary):
    symbol = "!"


class Next(Unary):
    symbol = "X"


class Eventually(Unary):
    symbol = "F"


class Globally(Unary):
    symbol = "G"


class And(Binary):
    symbol = "&&"


class Or(Binary):
    symbol = "||"


class Until(Binary):
    symbol = "U"


class Release(Binary):
    symbol = "R"


def _wrap(f):
    return str(f) if isinstance(f, (Atom, Const)) else f"({f})"


# -- parsing -------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(&&|&|\|\||\||!|~|\(|\))|([A-Za-z_][A-Za-z0-9_.]*))")
_UNARY = {"!": Not, "~": Not, "X": Next, "F": Eventually, "G": Globally}
_KEYWORDS = {"X", "F", "G", "U", "R", "true", "false"}


def _tokenize(text):
    pos = 0
    out = []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise LTLSyntaxError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(1) if m.group(1) else m.start(2)
        out.append((m.group(1) or m.group(2), start))
        pos = m.end()
    out.append((None, len(text)))
    return out


class _Parser:
    # precedence, loosest first: || < && < U,R (right assoc) < unary
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i][0]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def parse(self):
        f = self.disjunction()
        tok, pos = self.tokens[self.i]
        if tok is not None:
            raise LTLSyntaxError(f"unexpected token {tok!r}", pos)
        return f

    def disjunction(self):
        f = self.conjunction()
        while self.peek() in ("||", "|"):
            self.take()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self):
        f = self.temporal()
        while self.peek() in ("&&", "&"):
            self.take()
            f = And(f, self.temporal())
        return f

    def temporal(self):
        f = self.unary()
        if self.peek() in ("U", "R"):
            op = Until if self.take()[0] == "U" else Release
            return op(f, self.temporal())
        return f

    def unary(self):
        tok, pos = self.take()
        if tok in _UNARY:
            return _UNARY[tok](self.unary())
        if tok == "(":
            f = self.disjunction()
            close, cpos = self.take()
            if close != ")":
                raise LTLSyntaxError("expected ')'", cpos)
            return f
        if tok == "true":
            return TRUE
        if tok == "false":
            return FALSE
        if tok is None:
            raise LTLSyntaxError("unexpected end of formula", pos)
        if tok in _KEYWORDS or not (tok[0].isalpha() or tok[0] == "_"):
            raise LTLSyntaxError(f"unexpected token {tok!r}", pos)
        return Atom(tok)


def parse_ltl(text: str, atoms: Iterable[str] | None = None) -> Formula:
    """Parse ``text``; warn about atoms outside ``atoms`` when it is given."""
    f = _Parser(text).parse()
    if atoms is not None:
        unknown = f.atoms() - set(atoms)
        if unknown:
            warnings.warn(f"formula uses undeclared atoms: {', '.join(sorted(unknown))}",
                          stacklevel=2)
    return f


# -- normal form and semantics ------------------------------------------------

def to_nnf(f: Formula, negate: bool = False) -> Formula:
    """Push negations to atoms; F and G become U and R."""
    if isinstance(f, Atom):
        return Not(f) if negate else f
    if isinstance(f, Const):
        return Const(f.value != negate)
    if isinstance(f, Not):
        return to_nnf(f.arg, not negate)
    if isinstance(f, Next):
        return Next(to_nnf(f.arg, negate))
    if isinstance(f, Eventually):
        inner = to_nnf(f.arg, negate)
        return Release(FALSE, inner) if negate else Until(TRUE, inner)
    if isinstance(f, Globally):
        inner = to_nnf(f.arg, negate)
        return Until(TRUE, inner) if negate else Release(FALSE, inner)
    left, right = to_nnf(f.left, negate), to_nnf(f.right, negate)
    dual = {And: Or, Or: And, Until: Release, Release: Until}
    cls = dual[type(f)] if negate else type(f)
    return cls(left, right)


def eval_lasso(f: Formula, prefix: Sequence, cycle: Sequence) -> bool:
    """Truth of ``f`` on the word ``prefix . cycle^omega`` (letters are atom sets)."""
    if not cycle:
        raise ValueError("lasso cycle must be non-empty")
    word = [frozenset(a) for a in prefix] + [frozenset(a) for a in cycle]
    n = len(word)
    succ = list(range(1, n)) + [len(prefix)]
    return _eval(f, word, succ)[0]


def _eval(f, word, succ):
    n = len(word)
    if isinstance(f, Atom):
        return [f.name in letter for letter in word]
    if isinstance(f, Const):
        return [f.value] * n
    if isinstance(f, Not):
        return [not v for v in _eval(f.arg, word, succ)]
    if isinstance(f, Next):
        a = _eval(f.arg, word, succ)
        return [a[succ[i]] for i in range(n)]
    if isinstance(f, Eventually):
        return _eval(Until(TRUE, f.arg), word, succ)
    if isinstance(f, Globally):
        return _eval(Release(FALSE, f.arg), word, succ)
    a, b = _eval(f.left, word, succ), _eval(f.right, word, succ)
    if isinstance(f, And):
        return [x and y for x, y in zip(a, b)]
    if isinstance(f, Or):
        return [x or y for x, y in zip(a, b)]
    # U is the least and R the greatest fixpoint over the n suffix positions
    until = isinstance(f, Until)
    val = [not until] * n
    for _ in range(n + 1):
        if until:
            new = [b[i] or (a[i] and val[succ[i]]) for i in range(n)]
        else:
            new = [b[i] and (a[i] or val[succ[i]]) for i in range(n)]
        if new == val:
            break
        val = new
    return val


# -- automata ------------------------------------------------------------------

class Guard(NamedTuple):
    positive: frozenset = frozenset()
    negative: frozenset = frozenset()

    def __str__(self):
        parts = []
        if self.positive:
            parts.append("[pos: " + " ".join(sorted(self.positive)) + "]")
        if self.negative:
            parts.append("[neg: " + " ".join(sorted(self.negative)) + "]")
        return " ".join(parts)


def guard_matches(g: Guard, atoms) -> bool:
    return g.positive <= atoms and not (g.negative & atoms)


@dataclass
class BuchiAutomaton:
    """State-based Büchi automaton; ``transitions`` holds ``(src, Guard, dst)``."""

    states: list
    transitions: list
    initial: object
    accepting: set = field(default_factory=set)

    def __post_init__(self):
        known = set(self.states)
        if self.initial not in known:
            raise ValueError("initial state is not declared")
        for src, _, dst in self.transitions:
            if src not in known or dst not in known:
                raise ValueError(f"transition {src} -> {dst} references an undeclared state")


@dataclass
class GeneralizedBuchi:
    states: list
    transitions: list
    initial: object
    acceptance_sets: list


def _nnf_negation(f):
    if isinstance(f, Atom):
        return Not(f)
    if isinstance(f, Not):
        return f.arg
    return Const(not f.value)


def _is_literal(f):
    return isinstance(f, (Atom, Const)) or (isinstance(f, Not) and isinstance(f.arg, Atom))


def ltl_to_gba(f: Formula) -> GeneralizedBuchi:
    """Tableau expansion of an NNF formula into a generalized Büchi automaton.

    Nodes are (old, next) sets of formulas.  A transition into a node reads a
    letter satisfying the node's literals, and each Until subformula
    contributes one acceptance set.  State 0 is the initial state.
    """
    init = "init"
    nodes = {}      # (old, next) -> incoming set
    order = []

    # explicit stack instead of recursion; entries are (incoming, new, old, next)
    stack = [(frozenset([init]), frozenset([f]), frozenset(), frozenset())]
    pending_succ = []
    while stack or pending_succ:
        if not stack:
            key = pending_succ.pop()
            stack.append((frozenset([key]), key[1], frozenset(), frozenset()))
            continue
        incoming, new, old, nxt = stack.pop()
        if not new:
            key = (old, nxt)
            if key in nodes:
                nodes[key] |= incoming
            else:
                nodes[key] = set(incoming)
                order.append(key)
                pending_succ.append(key)
            continue
        eta = min(new, key=str)
        new = new - {eta}
        if _is_literal(eta):
            if eta == FALSE or _nnf_negation(eta) in old:
                continue
            stack.append((incoming, new, old | {eta}, nxt))
        elif isinstance(eta, And):
            stack.append((incoming, new | ({eta.left, eta.right} - old), old | {eta}, nxt))
        elif isinstance(eta, Next):
            stack.append((incoming, new, old | {eta}, nxt | {eta.arg}))
        elif isinstance(eta, (Or, Until, Release)):
            if isinstance(eta, Or):
                first = ({eta.left}, set())
                second = {eta.right}
            elif isinstance(eta, Until):
                first = ({eta.left}, {eta})
                second = {eta.right}
            else:
                first = ({eta.right}, {eta})
                second = {eta.left, eta.right}
            old2 = old | {eta}
            stack.append((incoming, new | (frozenset(first[0]) - old), old2, nxt | first[1]))
            stack.append((incoming, new | (frozenset(second) - old), old2, nxt))
        else:
            raise ValueError(f"formula is not in negation normal form: {eta}")

    index = {key: i + 1 for i, key in enumerate(order)}
    states = [0] + list(range(1, len(order) + 1))
    transitions = set()
    for key in order:
        old = key[0]
        pos = frozenset(x.name for x in old if isinstance(x, Atom))
        neg = frozenset(x.arg.name for x in old if isinstance(x, Not))
        g = Guard(pos, neg)
        for src in nodes[key]:
            transitions.add((0 if src == init else index[src], g, index[key]))

    untils = sorted({u for key in order for u in key[0] if isinstance(u, Until)}, key=str)
    acc_sets = []
    for u in untils:
        acc_sets.append({index[k] for k in order if u not in k[0] or u.right in k[0]})
    return GeneralizedBuchi(states, sorted(transitions, key=_transition_key), 0, acc_sets)


def _transition_key(t):
    src, g, dst = t
    return (src, dst, sorted(g.positive), sorted(g.negative))


def degeneralize(gba: GeneralizedBuchi) -> BuchiAutomaton:
    """Counter construction: ``(s, i)`` advances ``i`` when ``s`` is in set ``i``."""
    k = len(gba.acceptance_sets)
    if k == 0:
        return BuchiAutomaton(list(gba.states), list(gba.transitions), gba.initial,
                              set(gba.states))
    out_edges = {}
    for src, g, dst in gba.transitions:
        out_edges.setdefault(src, []).append((g, dst))
    start = (gba.initial, 0)
    ids = {start: 0}
    work = [start]
    transitions = []
    accepting = set()
    while work:
        s, i = work.pop()
        sid = ids[(s, i)]
        if i == 0 and s in gba.acceptance_sets[0]:
            accepting.add(sid)
        j = (i + 1) % k if s in gba.acceptance_sets[i] else i
        for g, dst in out_edges.get(s, ()):
            key = (dst, j)
            if key not in ids:
                ids[key] = len(ids)
                work.append(key)
            transitions.append((sid, g, ids[key]))
    return BuchiAutomaton(list(range(len(ids))), sorted(transitions, key=_transition_key),
                          0, accepting)


def _merge_equivalent(ba: BuchiAutomaton) -> BuchiAutomaton:
    # states with the same acceptance flag and the same outgoing transitions
    # accept the same language; merge them until nothing changes
    rep = {s: s for s in ba.states}
    trans = set(ba.transitions)
    while True:
        out = {s: set() for s in rep.values()}
        for src, g, dst in trans:
            out[src].add((g, dst))
        groups = {}
        for s in sorted(out, key=lambda s: (s != ba.initial, s)):
            groups.setdefault((s in ba.accepting, frozenset(out[s])), []).append(s)
        merged = {}
        for members in groups.values():
            for s in members[1:]:
                merged[s] = members[0]
        if not merged:
            break
        rep = {s: merged.get(r, r) for s, r in rep.items()}
        trans = {(merged.get(s, s), g, merged.get(d, d)) for s, g, d in trans}

    # keep only states reachable from the initial one, renumbered from 0
    initial = rep[ba.initial]
    by_src = {}
    for src, g, dst in trans:
        by_src.setdefault(src, []).append((g, dst))
    ids = {initial: 0}
    work = [initial]
    while work:
        s = work.pop()
        for g, d in sorted(by_src.get(s, ()), key=lambda t: (str(t[0]), t[1])):
            if d not in ids:
                ids[d] = len(ids)
                work.append(d)
    transitions = sorted({(ids[s], g, ids[d]) for s, g, d in trans if s in ids},
                         key=_transition_key)
    accepting = {ids[s] for s in ids if s in ba.accepting}
    return BuchiAutomaton(list(range(len(ids))), transitions, 0, accepting)


def ltl_to_buchi(f: Formula) -> BuchiAutomaton:
    """Büchi automaton for an NNF formula (apply :func:`to_nnf` first)."""
    return _merge_equivalent(degeneralize(ltl_to_gba(f)))


def accepts_lasso(automaton, prefix: Sequence, cycle: Sequence) -> bool:
    """Whether a (generalized) Büchi automaton accepts ``prefix . cycle^omega``."""
    if not cycle:
        raise ValueError("lasso cycle must be non-empty")
    if isinstance(automaton, BuchiAutomaton):
        acc_sets = [set(automaton.accepting)]
    else:
        acc_sets = [set(s) for s in automaton.acceptance_sets]
    word = [frozenset(a) for a in prefix] + [frozenset(a) for a in cycle]
    n = len(word)
    loop = len(prefix)
    by_src = {}
    for src, g, dst in automaton.transitions:
        by_src.setdefault(src, []).append((g, dst))

    start = (automaton.initial, 0)
    succ = {}
    seen = {start}
    work = [start]
    while work:
        node = work.pop()
        q, i = node
        nxt_pos = i + 1 if i + 1 < n else loop
        out = [(dst, nxt_pos) for g, dst in by_src.get(q, ()) if guard_matches(g, word[i])]
        succ[node] = out
        for m in out:
            if m not in seen:
                seen.add(m)
                work.append(m)

    for comp in strongly_connected_components(seen, lambda v: succ[v]):
        if len(comp) == 1:
            (v,) = comp
            if v not in succ[v]:
                continue
        # only the looping part of the word can repeat forever
        qs = {q for q, i in comp}
        if all(qs & s for s in acc_sets):
            return True
    return False


# -- automaton file format -----------------------------------------------------

def parse_buchi(text: str) -> BuchiAutomaton:
    """Read ``state NAME [init] [accept]`` and ``SRC -> DST [pos: a b] [neg: c]`` lines."""
    states, transitions, accepting = [], [], set()
    initial = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.replace("[", " ").replace("]", " ").split()
        if words[0] == "state":
            if len(words) < 2:
                raise ValueError(f"line {lineno}: state name missing")
            name = words[1]
            states.append(name)
            for flag in words[2:]:
                if flag == "init":
                    initial = name
                elif flag == "accept":
                    accepting.add(name)
                else:
                    raise ValueError(f"line {lineno}: unknown state flag {flag!r}")
        elif len(words) >= 3 and words[1] == "->":
            src, dst = words[0], words[2]
            pos, neg, current = set(), set(), None
            for w in words[3:]:
                if w in ("pos:", "neg:"):
                    current = pos if w == "pos:" else neg
                elif current is None:
                    raise ValueError(f"line {lineno}: expected 'pos:' or 'neg:'")
                else:
                    current.add(w)
            if pos & neg:
                raise ValueError(f"line {lineno}: guard is contradictory")
            transitions.append((src, Guard(frozenset(pos), frozenset(neg)), dst))
        else:
            raise ValueError(f"line {lineno}: cannot parse {raw.strip()!r}")
    if initial is None:
        raise ValueError("no initial state")
    return BuchiAutomaton(states, transitions, initial, accepting)


def format_buchi(ba: BuchiAutomaton) -> str:
    lines = []
    for s in ba.states:
        flags = (" init" if s == ba.initial else "") + (" accept" if s in ba.accepting else "")
        lines.append(f"state {s}{flags}")
    for src, g, dst in ba.transitions:
        lines.append(f"{src} -> {dst} {g}".rstrip())
    return "\n".join(lines) + "\n"
