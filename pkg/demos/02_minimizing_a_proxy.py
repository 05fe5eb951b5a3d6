# %% [markdown]
# # Minimizing a proxy two ways
#
# The stationary-point backend takes the real eigenvalues of the colleague
# matrix of p' together with the endpoints. The SDP backend certifies a
# lower bound t with p - t a weighted sum of squares and returns a matching
# upper bound.

# %%
import numpy as np

from cpca import ChebProxy, Interval, build_reformulation, minimize_by_stationary_points, solve_sdp

rng = np.random.default_rng(1)
c = rng.standard_normal(10) * 0.8 ** np.arange(10)
p = ChebProxy(Interval(-1, 1), c)

f_sp, xs = minimize_by_stationary_points(p)
print("stationary:", f_sp, "at", xs)

# %%
sol = solve_sdp(build_reformulation(c), eps3=1e-8)
print(f"sdp: {sol.t_lower:.10f} <= min p <= {sol.t_upper:.10f}  ({sol.status.value}, {sol.iterations} iterations)")

# %%
# the bounds tighten monotonically toward the true value
for k, (lo, up) in enumerate(sol.history[::3]):
    print(k * 3, f"{up - lo:.2e}")

# %%
# Q and Q' are the Gram matrices of the two squares; both are PSD
print(np.linalg.eigvalsh(sol.Q).min(), np.linalg.eigvalsh(sol.Q2).min())
