"""
Many sets at once: the product-space step
=========================================

With several domain sets C_i and image sets Q_j the product step averages all
corrections at once. It is forward-backward applied to the lifted (1, 1)
problem, which stacks the identity p times on top of the A_j.
"""

import numpy as np

from scnpp import Ball, Box, Halfspace, SolverConfig, feasibility_instance, fb_step, lift_to_product, product_step, run
from scnpp.schemes import lipschitz_bound

rng = np.random.default_rng(11)
n = 4
u = rng.uniform(-1, 1, n)
A1 = rng.normal(size=(3, n)) / 2
A2 = rng.normal(size=(2, n)) / 2
c = rng.normal(size=n)
C = [Box(u - 0.5, u + 0.2), Ball(u + 0.1, 0.6), Halfspace(c, c @ u + 0.2)]
Q = [Ball(A1 @ u, 0.4), Box(A2 @ u - 0.1, A2 @ u + 0.3)]
inst = feasibility_instance(C, Q, [A1, A2], certified_solution=u)
print(f"p = {inst.p}, r = {inst.r}, L = p + sum ||A_j||^2 = {lipschitz_bound(inst, 'product'):.3f}")

x0 = 2 * rng.normal(size=n)
trace = run(inst, SolverConfig(algorithm="product"), x0)
print("product space:", trace.status, "after", trace.iterations_used, "iterations")

# %%
# Same iterates as forward-backward on the lift, up to rounding.
lifted = lift_to_product(inst)
gamma = 0.5 * trace.gamma
xp = xf = x0
for _ in range(50):
    xp = product_step(inst, SolverConfig(algorithm="product", gamma=gamma), xp)
    xf = fb_step(lifted, SolverConfig(gamma=gamma), xf)
print("gap between the two sequences after 50 steps:", np.max(np.abs(xp - xf)))
