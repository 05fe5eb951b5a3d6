# %% [markdown]
# # Metric sweeps
#
# `run_sweep` runs every (eps, seed) pair, scores it against the brute-force
# oracle and writes one CSV row per run. Failed runs are kept with a status
# naming the error and the stage it came from.

# %%
from cpca.harness import ExperimentSpec, run_sweep

spec = ExperimentSpec(family="logisticlog", n_agents=30, seeds=[1, 2, 3], eps_list=[1e-2, 1e-4, 1e-6])
records = run_sweep(spec, output="sweep.csv")
for r in records:
    print(r)

# %%
print(open("sweep.csv").read())
