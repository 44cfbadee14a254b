"""
Rate curve of a weighted Rademacher sum
=======================================

Tabulates the Cramér transform of ``X = eps_1 + 0.5 eps_2 + 0.25 eps_3``
across its domain by both solvers, next to the Hoeffding lower bound
``alpha^2 / (2 ||t||_2^2)``.
"""

# %%
# Set up the weights. The domain of the rate function is the open interval
# ``(-||t||_1, ||t||_1)``.
import numpy as np

from radcramer import as_weights, cramer_transform, minimize_entropy

t = as_weights([1.0, 0.5, 0.25])
print(f"||t||_1 = {t.l1_norm}, ||t||_2^2 = {t.l2_norm ** 2}")

# %%
# Both routes agree to solver precision. The tilt ``s*`` grows without bound
# as alpha approaches the edge of the domain.
alphas = np.linspace(0.0, 0.99 * t.l1_norm, 12)
print(f"{'alpha':>8} {'legendre':>12} {'variational':>12} {'|diff|':>9} {'tilt':>9} {'hoeffding':>10}")
for a in alphas:
    rp = cramer_transform(t, a)
    sol = minimize_entropy(t, a)
    hoeff = a * a / (2 * t.l2_norm ** 2)
    print(f"{a:8.4f} {rp.value:12.8f} {sol.value:12.8f} {abs(rp.value - sol.value):9.1e} "
          f"{rp.s_star:9.4f} {hoeff:10.6f}")

# %%
# At the endpoint the value is ``n ln 2``: every sign must point the same way,
# an event of probability ``2^-n``. Past it the rate is infinite.
for a in (t.l1_norm, 2.0):
    rp = cramer_transform(t, a)
    print(f"alpha={a}: {rp.status}, value={rp.value}")
print(f"3 ln 2 = {3 * np.log(2)}")
