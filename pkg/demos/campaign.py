# %% [markdown]
# # Checking directly versus translating first
#
# A self-modifying model can be turned into an ordinary pushdown system by
# pairing every control with the set of enabled rules.  That translation is
# exact but its size grows with the number of reachable rule sets.  This
# script runs both pipelines on random models and compares verdicts and
# times.

# %%
import statistics
from pathlib import Path

from smpds.bench import load_campaign, rows_to_csv, run_campaign

here = Path(__file__).parent

# %% [markdown]
# Small models first: the two pipelines must agree on every instance.

# %%
small = load_campaign('{"seed": 1, "instances": 200}')
rows, failures = run_campaign(small)
print(f"{sum(r['agree'] for r in rows)}/{len(rows)} agree, {len(failures)} failure artifacts")

# %% [markdown]
# Larger models: 110 or 255 normal rules and 8 modifying rules.  This takes
# under a minute; the translation dominates.

# %%
large = load_campaign((here / "large_models_campaign.json").read_text())
rows, failures = run_campaign(large, lambda r: print(r))
faster = sum(r["direct_ms"] < r["translate_ms"] + r["check_ms"] for r in rows)
print(f"direct faster on {faster}/{len(rows)} instances")
for s1 in (110, 255):
    sel = [r for r in rows if r["s1"] == s1]
    if sel:
        print(f"S1={s1}: median direct {statistics.median(r['direct_ms'] for r in sel):.1f} ms, "
              f"median translate+check "
              f"{statistics.median(r['translate_ms'] + r['check_ms'] for r in sel):.1f} ms")

# %%
(here / "large_models.csv").write_text(rows_to_csv(rows))
