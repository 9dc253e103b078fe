"""LTL model checking for pushdown systems whose rule set changes at run time."""
from .headgraph import (Exploration, HeadGraph, Verdict, build_head_graph, explore_heads,
                        has_accepting_run, has_accepting_run_saturation, model_check, repeating_heads)
from .io import ModelBundle, ModelSyntaxError, format_model, parse_model
from .ltl import (BuchiAutomaton, LTLSyntaxError, accepts_lasso, eval_lasso, ltl_to_buchi, parse_ltl,
                  to_nnf)
from .model import (BOTTOM, Configuration, Head, ModelError, ModifyingRule, NormalRule, SmPds,
                    apply_modification, phase_ids, phase_of, reachable_phases)
from .oracle import bounded_explore, cross_check, replay, translate_to_pds
from .prestar import pre_star_empty

__all__ = [
    "BOTTOM", "BuchiAutomaton", "Configuration", "Exploration", "Head", "HeadGraph",
    "LTLSyntaxError", "ModelBundle", "ModelError", "ModelSyntaxError", "ModifyingRule",
    "NormalRule", "SmPds", "Verdict", "accepts_lasso", "apply_modification", "bounded_explore",
    "build_head_graph", "cross_check", "eval_lasso", "explore_heads", "format_model",
    "has_accepting_run", "has_accepting_run_saturation", "ltl_to_buchi", "model_check",
    "parse_ltl", "parse_model", "phase_ids", "phase_of", "pre_star_empty", "reachable_phases",
    "repeating_heads", "replay", "to_nnf", "translate_to_pds",
]
__version__ = "0.1.0"
