"""Product of an SM-PDS with a Büchi automaton, giving an SM-BPDS."""
from __future__ import annotations

from dataclasses import dataclass

from .ltl import BuchiAutomaton, guard_matches
from .model import (Configuration, ModelError, ModifyingRule, NormalRule, Phase,
                    SmPds, phase_ids, phase_of)


@dataclass(frozen=True)
class ProdMap:
    """Source rule id -> ids of the product rules built from it, and back."""

    images: tuple
    sources: tuple

    def image(self, phase: Phase) -> Phase:
        return phase_of(j for i in phase_ids(phase) for j in self.images[i])

    def rules(self, rule_id: int) -> set:
        return set(self.images[rule_id])


def _ordered_transitions(ba: BuchiAutomaton):
    return sorted(ba.transitions, key=lambda t: (str(t[0]), str(t[2]),
                                                 sorted(t[1].positive), sorted(t[1].negative)))


def build_product(model: SmPds, ba: BuchiAutomaton, theta0: Phase):
    """Return ``(product, prodmap, prod(theta0))``.

    Product controls are pairs ``(p, q)``; rule ``r`` combines with every
    automaton transition from ``q`` whose guard accepts the label of ``r``'s
    source control.  Accepting controls are ``P x F``.

    A source rule with no image that some modifying rule removes gets one
    inert tracker rule (a modifying rule with an empty remove set, which can
    never fire).  Without it ``prod(sigma)`` could be empty while ``sigma``
    still intersects the source phase, and the product would lose steps.
    """
    if theta0 & ~model.all_rules:
        raise ModelError("initial phase references unknown rules")
    transitions = _ordered_transitions(ba)
    controls = tuple((p, q) for p in model.controls for q in ba.states)

    plan = []        # (source rule id, q, q')
    images = [[] for _ in model.rules]
    for i, r in enumerate(model.rules):
        atoms = model.label(r.source)
        for q, g, q2 in transitions:
            if guard_matches(g, atoms):
                images[i].append(len(plan))
                plan.append((i, q, q2))

    removed = set()
    for i in model.modifying:
        removed |= model.rules[i].remove
    trackers = [i for i in sorted(removed) if not images[i]]
    if trackers and not controls:
        raise ModelError("cannot track removable rules in an empty product")
    for k, i in enumerate(trackers):
        images[i].append(len(plan) + k)
    sources = tuple([i for i, _, _ in plan] + trackers)
    prodmap = ProdMap(tuple(tuple(x) for x in images), sources)

    def image_ids(ids):
        return frozenset(phase_ids(prodmap.image(phase_of(ids))))

    rules = []
    for k, (i, q, q2) in enumerate(plan):
        r = model.rules[i]
        name = f"{r.name}.{k}"
        if isinstance(r, NormalRule):
            rules.append(NormalRule(name, (r.source, q), r.pop, (r.target, q2), r.push))
        else:
            rules.append(ModifyingRule(name, (r.source, q), image_ids(r.remove),
                                       image_ids(r.add), (r.target, q2)))
    for i in trackers:
        anchor = controls[0]
        rules.append(ModifyingRule(f"{model.rules[i].name}.track", anchor,
                                   frozenset(), frozenset(), anchor))

    accepting = frozenset((p, q) for p in model.controls for q in ba.accepting)
    product = SmPds(controls, model.gamma, tuple(rules), {}, accepting,
                    model.synthetic, prodmap.image(model.always_on))
    return product, prodmap, prodmap.image(theta0)


def initial_product_config(c0: Configuration, ba: BuchiAutomaton, prodmap: ProdMap) -> Configuration:
    return Configuration((c0.control, ba.initial), c0.stack, prodmap.image(c0.phase))
