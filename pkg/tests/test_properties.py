import random

from hypothesis import given, settings
from hypothesis import strategies as st

from smpds.generate import GenParams, gen_random, random_formula
from smpds.io import format_model, parse_model
from smpds.ltl import Not, accepts_lasso, eval_lasso, ltl_to_buchi, parse_ltl, to_nnf
from smpds.model import phase_ids, phase_of

ids = st.sets(st.integers(0, 5000), max_size=60)
letters = st.lists(st.frozensets(st.sampled_from(["x", "y"])), min_size=1, max_size=3)


@given(ids)
def test_phase_round_trip(s):
    assert set(phase_ids(phase_of(s))) == s
    assert list(phase_ids(phase_of(s))) == sorted(s)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(1, 4), st.integers(1, 10), st.integers(0, 4), st.integers(0, 10 ** 6))
def test_model_text_round_trip(controls, symbols, normal, modifying, seed):
    b = gen_random(GenParams(n_controls=controls, n_symbols=symbols, n_normal=normal,
                             n_modifying=modifying, seed=seed))
    assert parse_model(format_model(b)) == b


@st.composite
def formulas(draw):
    rng = random.Random(draw(st.integers(0, 10 ** 6)))
    return random_formula(rng, ("x", "y"), draw(st.integers(0, 6)))


@settings(max_examples=200, deadline=None)
@given(formulas())
def test_printed_formulas_parse_back(f):
    assert parse_ltl(str(f)) == f


@settings(max_examples=200, deadline=None)
@given(formulas(), letters, letters)
def test_nnf_keeps_meaning(f, prefix, cycle):
    assert eval_lasso(to_nnf(f), prefix, cycle) == eval_lasso(f, prefix, cycle)
    assert eval_lasso(to_nnf(Not(f)), prefix, cycle) != eval_lasso(f, prefix, cycle)


@settings(max_examples=150, deadline=None)
@given(formulas(), letters, letters)
def test_automaton_agrees_with_the_formula(f, prefix, cycle):
    assert accepts_lasso(ltl_to_buchi(to_nnf(f)), prefix, cycle) == eval_lasso(f, prefix, cycle)
