"""Seeded random models and formulas for campaigns and benchmarks."""
from __future__ import annotations

import random
import string
from dataclasses import dataclass

from .io import ModelBundle
from .ltl import (FALSE, TRUE, And, Atom, Eventually, Formula, Globally, Next, Not, Or, Release,
                  Until, to_nnf)
from .model import BOTTOM, Configuration, ModifyingRule, NormalRule, SmPds


@dataclass(frozen=True)
class GenParams:
    n_controls: int = 3
    n_symbols: int = 2
    n_normal: int = 5
    n_modifying: int = 2
    max_push: int = 2
    p_accepting: float = 0.3
    seed: int = 0
    n_atoms: int = 2
    p_label: float = 0.5

    def __post_init__(self):
        if min(self.n_controls, self.n_symbols, self.n_normal) < 1 or self.n_modifying < 0:
            raise ValueError("counts must be at least 1 (modifying rules at least 0)")
        if not 0 <= self.max_push <= 2:
            raise ValueError("max_push must be between 0 and 2")


def _symbols(n):
    if n <= len(string.ascii_lowercase):
        return tuple(string.ascii_lowercase[:n])
    return tuple(f"g{k}" for k in range(n))


def _subset(rng, pool):
    return frozenset(rng.sample(pool, min(len(pool), rng.randint(1, 2))))


def gen_random(params: GenParams) -> ModelBundle:
    """Random model with every rule enabled initially.

    Normal rules take their ``(source, popped symbol)`` from a shuffled list
    of all such pairs, one pair per control first, so every control gets an
    outgoing rule when there are enough rules and, with at least
    ``|P|*|Γ|`` rules, every head has one.  Modifying rules start at random
    controls and remove and add one or two other rules.
    """
    rng = random.Random(params.seed)
    controls = tuple(f"p{k}" for k in range(params.n_controls))
    gamma = _symbols(params.n_symbols)
    atoms = tuple(f"x{k}" for k in range(params.n_atoms))
    total = params.n_normal + params.n_modifying

    first = [(p, rng.choice(gamma)) for p in controls]
    rng.shuffle(first)
    chosen = set(first)
    rest = [(p, a) for p in controls for a in gamma if (p, a) not in chosen]
    rng.shuffle(rest)
    pairs = first + rest

    rules = []
    for k in range(params.n_normal):
        src, pop = pairs[k] if k < len(pairs) else (rng.choice(controls), rng.choice(gamma))
        push = tuple(rng.choice(gamma) for _ in range(rng.randint(0, params.max_push)))
        rules.append(NormalRule(f"r{k + 1}", src, pop, rng.choice(controls), push))
    for k in range(params.n_modifying):
        me = params.n_normal + k
        others = [i for i in range(total) if i != me]
        # controls left without a normal rule get the modifying rules first
        src = first[me][0] if me < len(first) else rng.choice(controls)
        rules.append(ModifyingRule(f"c{k + 1}", src, _subset(rng, others),
                                   _subset(rng, others), rng.choice(controls)))

    labels = {}
    for p in controls:
        got = frozenset(a for a in atoms if rng.random() < params.p_label)
        if got:
            labels[p] = got
    accepting = frozenset(p for p in controls if rng.random() < params.p_accepting)
    model = SmPds(controls, gamma, tuple(rules), labels, accepting)
    theta0 = model.all_rules
    stack = tuple(rng.choice(gamma) for _ in range(rng.randint(1, 2))) + (BOTTOM,)
    return ModelBundle(model, theta0, Configuration(controls[0], stack, theta0), atoms, params.seed)


_UNARY_OPS = (Not, Next, Eventually, Globally)
_BINARY_OPS = (And, Or, Until, Release)
_TEMPORAL = (Next, Eventually, Globally, Until, Release)


def random_formula(rng: random.Random, atoms, n_ops: int, max_temporal: int | None = None,
                   nnf: bool = False) -> Formula:
    """Random formula with exactly ``n_ops`` operators before NNF conversion.

    ``max_temporal`` caps the number of temporal operators.  With ``nnf``
    the result is passed through :func:`to_nnf`, which keeps the temporal
    count.
    """
    atoms = tuple(atoms)
    budget = [max_temporal if max_temporal is not None else n_ops]

    def leaf():
        return TRUE if rng.random() < 0.05 else FALSE if rng.random() < 0.05 else Atom(rng.choice(atoms))

    def pick(pool):
        allowed = [op for op in pool if op not in _TEMPORAL or budget[0] > 0]
        op = rng.choice(allowed)
        if op in _TEMPORAL:
            budget[0] -= 1
        return op

    def build(n):
        if n == 0:
            return leaf()
        if n == 1 or rng.random() < 0.4:
            return pick(_UNARY_OPS)(build(n - 1))
        op = pick(_BINARY_OPS)
        left = rng.randint(0, n - 1)
        return op(build(left), build(n - 1 - left))

    f = build(n_ops)
    return to_nnf(f) if nnf else f
