"""Seeded campaigns comparing the direct pipeline with translate-then-check.

A campaign is described by a JSON object; every numeric field is either a
number, a ``[lo, hi]`` inclusive range, or ``{"choice": [...]}``::

    {"seed": 0, "instances": 500,
     "controls": [1, 5], "symbols": [1, 4], "s1": [1, 8], "s2": [0, 3],
     "atoms": [1, 2], "formula_ops": [0, 5], "max_temporal": 3}

``controls`` may also be ``{"div": k}`` for ``max(1, s1 // k)``.  Instance
``k`` draws its parameters from ``random.Random(f"{seed}:{k}")``, so rows do
not depend on how many instances run before them.
"""
from __future__ import annotations

import csv
import io
import json
import random
from dataclasses import dataclass

from .generate import GenParams, gen_random, random_formula
from .io import ModelBundle, format_model
from .ltl import Formula
from .oracle import CrossCheck, cross_check

CSV_HEADER = ("s1", "s2", "ltl_size", "direct_ms", "translate_ms", "check_ms", "agree")
TIME_COLUMNS = ("direct_ms", "translate_ms", "check_ms")

_DEFAULTS = {"seed": 0, "instances": 10, "controls": [1, 5], "symbols": [1, 4], "s1": [1, 8],
             "s2": [0, 3], "atoms": [1, 2], "formula_ops": [0, 5], "max_temporal": 3,
             "max_push": 2, "p_accepting": 0.3}


def _draw(rng, value, s1=None):
    if isinstance(value, dict):
        if "choice" in value:
            return rng.choice(value["choice"])
        if "div" in value:
            return max(1, s1 // value["div"])
        raise ValueError(f"unknown campaign value {value!r}")
    if isinstance(value, list):
        lo, hi = value
        return rng.randint(lo, hi)
    return value


def load_campaign(text: str) -> dict:
    spec = dict(_DEFAULTS)
    spec.update(json.loads(text))
    unknown = set(spec) - set(_DEFAULTS)
    if unknown:
        raise ValueError(f"unknown campaign keys: {', '.join(sorted(unknown))}")
    return spec


@dataclass
class Instance:
    index: int
    bundle: ModelBundle
    formula: Formula


def instances(spec: dict):
    """Yield the campaign's instances in order."""
    for k in range(spec["instances"]):
        rng = random.Random(f"{spec['seed']}:{k}")
        s1 = _draw(rng, spec["s1"])
        params = GenParams(n_controls=_draw(rng, spec["controls"], s1), n_symbols=_draw(rng, spec["symbols"]),
                           n_normal=s1, n_modifying=_draw(rng, spec["s2"]), max_push=spec["max_push"],
                           p_accepting=spec["p_accepting"], seed=rng.randrange(2 ** 31),
                           n_atoms=_draw(rng, spec["atoms"]))
        bundle = gen_random(params)
        f = random_formula(rng, bundle.atoms, _draw(rng, spec["formula_ops"]), spec["max_temporal"], nnf=True)
        yield Instance(k, bundle, f)


def row(inst: Instance, report: CrossCheck) -> dict:
    m = inst.bundle.model
    return {"s1": len(m.normal), "s2": len(m.modifying), "ltl_size": inst.formula.size(),
            "direct_ms": report.direct_ms, "translate_ms": report.translate_ms,
            "check_ms": report.check_ms, "agree": int(report.agree)}


def failure_artifact(inst: Instance, report: CrossCheck) -> str:
    """Both models plus formula and seed, in the model file format."""
    b = inst.bundle
    lines = [f"# campaign instance {inst.index}: direct={report.direct.answer} "
             f"translated={report.translated.answer}",
             f"# formula: {inst.formula}", format_model(b).rstrip(),
             "", "# translated model (controls are control@phase)"]
    translated = ModelBundle(report.pds, report.pds.all_rules, report.start, b.atoms, b.seed)
    lines.extend("# " + ln for ln in format_model(translated).splitlines())
    return "\n".join(lines) + "\n"


def run_campaign(spec: dict, on_row=None):
    """Cross-check every instance; return ``(rows, failures)``.

    ``failures`` holds ``(instance, artifact text)`` for disagreements.
    """
    rows, failures = [], []
    for inst in instances(spec):
        report = cross_check(inst.bundle.model, inst.bundle.theta0, inst.bundle.c0, inst.formula)
        r = row(inst, report)
        rows.append(r)
        if on_row is not None:
            on_row(r)
        if not report.agree:
            failures.append((inst, failure_artifact(inst, report)))
    return rows, failures


def rows_to_csv(rows) -> str:
    out = io.StringIO()
    w = csv.DictWriter(out, fieldnames=CSV_HEADER, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return out.getvalue()
