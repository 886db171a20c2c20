"""
Resolvents of the catalog mappings
==================================

Every mapping in the catalog is evaluated through its resolvent
J = (I + lam B)^{-1}. Fixed points of J are the zeros of B, and J is firmly
nonexpansive. This script pokes at both facts numerically.
"""

import numpy as np

from scnpp import (
    AffineMonotone,
    AffineVI,
    Ball,
    Box,
    Halfspace,
    NormalCone,
    ResolventParams,
    SubdiffL1,
    fixed_point_residual,
    resolve,
)

params = ResolventParams(lam=1.0)

# %%
# The normal cone of a set resolves to the metric projection onto it,
# whatever lam is.
box = NormalCone(Box([0.0, 0.0], [1.0, 1.0]))
print("P_box(2, -3)      =", resolve(box, ResolventParams(lam=0.5), [2.0, -3.0]))
print("P_ball(3, 4)      =", resolve(NormalCone(Ball([0.0, 0.0], 1.0)), params, [3.0, 4.0]))
print("P_halfspace(2, 5) =", resolve(NormalCone(Halfspace([1.0, 0.0], 0.0)), params, [2.0, 5.0]))

# %%
# The l1 subdifferential gives soft thresholding, an affine monotone map a
# linear solve.
print("soft-threshold(3) =", resolve(SubdiffL1(1, 1.0), params, [3.0]))
print("(I + I)^{-1} 4    =", resolve(AffineMonotone([[1.0]], [0.0]), params, [4.0]))

# %%
# A variational inequality on the half-line v >= 0: the resolvent at -2 is 0.
vi = AffineVI([[1.0]], [0.0], Halfspace([-1.0], 0.0))
print("AffineVI at -2    =", resolve(vi, params, [-2.0]))

# %%
# The residual ||x - J(x)|| vanishes exactly on the zero set.
for x in ([0.5, 0.5], [2.0, 0.5]):
    print(f"box residual at {x}: {fixed_point_residual(box, params, x):.3f}")

# %%
# Firm nonexpansiveness: <Jx - Jy, x - y> >= ||Jx - Jy||^2, sampled.
rng = np.random.default_rng(0)
S = rng.normal(size=(3, 3))
m = AffineVI(np.eye(3) + S - S.T, rng.normal(size=3), Box(-np.ones(3), np.ones(3)))
gap = np.inf
for _ in range(500):
    x, y = 3 * rng.normal(size=3), 3 * rng.normal(size=3)
    d = resolve(m, params, x) - resolve(m, params, y)
    gap = min(gap, d @ (x - y) - d @ d)
print(f"smallest slack in the firm nonexpansive inequality over 500 pairs: {gap:.3e}")
