import random
import sys

import pytest

from smpds.generate import GenParams, gen_random
from smpds.model import BOTTOM, Configuration, ModifyingRule, NormalRule, SmPds


def e1_model(accepting=()):
    """Three normal rules and one modifying rule that swaps r2 for r3."""
    rules = (
        NormalRule("r1", "p0", "a", "p1", ("a",)),
        NormalRule("r2", "p1", "a", "p0", ("a",)),
        NormalRule("r3", "p1", "a", "p2", ()),
        ModifyingRule("c1", "p0", frozenset({1}), frozenset({2}), "p1"),
    )
    return SmPds(("p0", "p1", "p2"), ("a", "b"), rules, accepting=frozenset(accepting))


def e2_model(accepting=("p0",)):
    """p0 pushes, p1 pops: an infinite run that keeps returning to p0."""
    rules = (
        NormalRule("r1", "p0", "a", "p1", ("a", "a")),
        NormalRule("r2", "p1", "a", "p0", ()),
    )
    return SmPds(("p0", "p1"), ("a",), rules, accepting=frozenset(accepting))


@pytest.fixture
def e1():
    m = e1_model()
    theta0 = m.phase(["r1", "r2", "c1"])
    theta1 = m.phase(["r1", "r3", "c1"])
    return m, theta0, theta1


@pytest.fixture
def e2():
    m = e2_model()
    return m, m.all_rules


def config(control, *stack, phase):
    return Configuration(control, tuple(stack) + (BOTTOM,), phase)


def small_bundle(seed, tag="t"):
    """A random bundle from the small size class used throughout the tests."""
    rng = random.Random(f"{tag}:{seed}")
    params = GenParams(n_controls=rng.randint(1, 5), n_symbols=rng.randint(1, 4),
                       n_normal=rng.randint(1, 8), n_modifying=rng.randint(0, 3), seed=seed)
    return gen_random(params), rng


def permute_rules(model, order):
    """The same model with rules listed in ``order``; returns it and the old -> new id map."""
    new_id = {old: new for new, old in enumerate(order)}
    rules = []
    for old in order:
        r = model.rules[old]
        if isinstance(r, ModifyingRule):
            r = ModifyingRule(r.name, r.source, frozenset(new_id[i] for i in r.remove),
                              frozenset(new_id[i] for i in r.add), r.target)
        rules.append(r)
    return SmPds(model.controls, model.gamma, tuple(rules), model.labels, model.accepting), new_id


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
