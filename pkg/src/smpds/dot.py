"""Graphviz export for head graphs and labelled automata.

Bit-1 edges are solid, bit-0 edges dashed.  Phases are shown by a short id
(``θ0``, ``θ1`` ... in order of first appearance) and listed in a legend.
"""
from __future__ import annotations

from .headgraph import HeadGraph
from .io import flat_name
from .model import SmPds, order_key
from .prestar import LabeledAutomaton


def _quote(s) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


class _Phases:
    def __init__(self):
        self.ids = {}

    def __call__(self, theta) -> str:
        return f"θ{self.ids.setdefault(theta, len(self.ids))}"

    def legend(self, model: SmPds | None) -> list:
        if not self.ids:
            return []
        rows = []
        for theta, k in self.ids.items():
            names = " ".join(model.phase_names(theta)) if model is not None else format(theta, "b")
            rows.append(f"θ{k} = {{{names}}}")
        text = "\\l".join(r.replace('"', '\\"') for r in rows) + "\\l"
        return [f'  legend [shape=note, label="{text}"];']


def _style(bit) -> str:
    return "solid" if bit else "dashed"


def emit_dot(g: HeadGraph | LabeledAutomaton, model: SmPds | None = None, phases=()) -> str:
    """DOT text for ``g``.

    ``model`` spells out phases by rule name in the legend; ``phases`` fixes
    the numbering (for instance the output of ``reachable_phases``, so the
    initial phase is ``θ0``).
    """
    phase = _Phases()
    for theta in phases:
        phase(theta)
    lines = ["digraph G {", "  rankdir=LR;"]
    if isinstance(g, HeadGraph):
        nodes = sorted(g.nodes, key=lambda h: order_key((h.phase, h.control, h.top)))
        names = {}
        for h in nodes:
            names[h] = f"{flat_name(h.control)}/{h.top}/{phase(h.phase)}"
            lines.append(f"  {_quote(names[h])};")
        for src, bit, dst in sorted(g.edges, key=lambda e: (names[e[0]], e[1], names[e[2]])):
            lines.append(f"  {_quote(names[src])} -> {_quote(names[dst])} [style={_style(bit)}];")
    else:
        def state(s):
            if isinstance(s, tuple):
                return f"{flat_name(s[0])}/{phase(s[1])}"
            return str(s)

        states = sorted(g.states, key=lambda s: order_key((s[1], s[0]) if isinstance(s, tuple) else (s,)))
        for s in states:
            shape = "doublecircle" if s in g.final else "circle"
            lines.append(f"  {_quote(state(s))} [shape={shape}];")
        for src, sym, bit, dst in sorted(g.transitions, key=lambda t: (state(t[0]), str(t[1]), t[2], state(t[3]))):
            lines.append(f"  {_quote(state(src))} -> {_quote(state(dst))} "
                         f"[label={_quote(f'{sym}/{bit}')}, style={_style(bit)}];")
    lines.extend(phase.legend(model))
    lines.append("}")
    return "\n".join(lines) + "\n"
