# %% [markdown]
# # Chebyshev proxies
#
# A smooth function on an interval is replaced by a truncated Chebyshev
# series. The fit doubles its degree until the interpolant agrees with the
# function at the points the next grid would add.

# %%
import numpy as np

from cpca import ChebProxy, Interval, adaptive_fit, cheb_points, eval_clenshaw, max_error_on_grid
from cpca.errors import DegreeCapExceeded

iv = Interval(-1.0, 1.0)
print(cheb_points(4, iv))  # extrema grid, right to left

# %%
# x^2 = (T0 + T2) / 2
p, rep = adaptive_fit(lambda x: x * x, iv, 1e-12)
print(p.coeffs, rep)

# %% [markdown]
# Degree grows slowly with the accuracy asked for when the function is
# analytic. Every fit costs exactly 2m + 1 evaluations.

# %%
for eps in (1e-2, 1e-6, 1e-10, 1e-14):
    p, rep = adaptive_fit(np.exp, iv, eps)
    print(f"eps={eps:.0e}  degree={rep.degree:3d}  evals={rep.evals_used:3d}  grid error={max_error_on_grid(np.exp, p):.1e}")

# %%
# A kink is a different story: |x| converges only like 1/m
try:
    adaptive_fit(np.abs, iv, 1e-6, m_max=2048)
except DegreeCapExceeded as exc:
    print(exc)

# %%
# Proxies live on any interval; evaluation maps back to [-1, 1] internally
q = ChebProxy(Interval(0.0, 4.0), np.array([2.0, 2.0]))  # the identity map on [0, 4]
print(eval_clenshaw(q, np.array([0.0, 1.5, 4.0])))
