# %% [markdown]
# # Consensus that knows when to stop
#
# Agents average their vectors with lazy-Metropolis weights. Alongside,
# max and min consensus on copies of the current estimate is restarted every
# U rounds; when the spread max(r - s) falls below delta every agent sees it
# in the same round.

# %%
import numpy as np

from cpca import diameter, erdos_renyi_connected, run_average_consensus_with_stopping

g = erdos_renyi_connected(30, 0.4, seed=42)
U = diameter(g)
print("edges:", len(g.edges), " diameter:", U)

rng = np.random.default_rng(0)
init = [rng.standard_normal(rng.integers(3, 12)) for _ in range(g.n)]  # ragged on purpose

# %%
out = run_average_consensus_with_stopping(g, init, eps2=1e-6, U=U, record_trace=True)
print("rounds:", out.rounds, " delta:", out.delta_used, " aligned length:", out.aligned_degree + 1)
print("max deviation from the exact mean:", np.abs(out.final_vectors - out.mean).max())

# %%
# the stopping checks fire every U rounds
print([t for t, ok in out.checks][-5:], [ok for _, ok in out.checks][-5:])

# %%
# tighter tolerance, proportionally more rounds
for eps2 in (1e-2, 1e-4, 1e-6, 1e-8, 1e-10):
    print(f"{eps2:.0e}", run_average_consensus_with_stopping(g, init, eps2, U).rounds)
