# %% [markdown]
# # A self-modifying program that reaches CopyFileA
#
# The program at address 0x4 overwrites the `push` at 0x2 with a `jmp 0x9`.
# A control flow graph built from the original bytes never sees the jump,
# so it concludes that `call CopyFileA` at 0x9 is dead code.  Modelling the
# overwrite as a rule that changes which transitions are enabled shows
# otherwise.

# %%
from pathlib import Path

from smpds import model_check, parse_ltl, parse_model
from smpds.dot import emit_dot
from smpds.headgraph import explore_heads

here = Path(__file__).parent
program = parse_model((here / "copyfile_sample.smpds").read_text())
erased = parse_model((here / "copyfile_sample_erased.smpds").read_text())
print(f"{len(program.model.normal)} normal rules, {len(program.model.modifying)} modifying rule")

# %% [markdown]
# The checker answers an existential question: is there a run that
# satisfies the formula?  For `F call_CopyFileA` it returns the run.

# %%
reach_copy = parse_ltl("F call_CopyFileA")
verdict = model_check(program.model, program.theta0, program.c0, reach_copy)
print(verdict.answer)
print("run:", " ".join(verdict.trace))

# %% [markdown]
# Reading `mov` as an ordinary instruction loses the call.

# %%
print(model_check(erased.model, erased.theta0, erased.c0, reach_copy).answer)

# %% [markdown]
# To ask whether *every* run avoids the call, check the negation and flip
# the answer.

# %%
avoid = parse_ltl("G !call_CopyFileA")
for name, b in (("with mov", program), ("mov erased", erased)):
    some_run_avoids = model_check(b.model, b.theta0, b.c0, avoid).accepting
    print(f"{name}: every run calls CopyFileA = {not some_run_avoids}")

# %% [markdown]
# The heads the search visited, as Graphviz.  Solid edges pass through an
# accepting control.

# %%
ex = explore_heads(program.model, program.c0)
(here / "copyfile_heads.dot").write_text(emit_dot(ex.graph, program.model, (program.theta0,)))
print(f"{len(ex.graph.nodes)} heads, {len(ex.graph.edges)} edges written to copyfile_heads.dot")
