"""
Forward-backward on a split feasibility problem
===============================================

Find x in C with A x in Q. The one-dimensional case C = [0, 1], Q = [2, 3],
A = 2 has the single solution x = 1, and one step with gamma = 1/4 reaches it.
A random instance in R^5 shows the distance to a solution shrinking at every
step (Fejer monotonicity).
"""

import numpy as np

from scnpp import Box, Halfspace, SolverConfig, feasibility_instance, fb_step, run

inst = feasibility_instance([Box([0.0], [1.0])], [Box([2.0], [3.0])], [[[2.0]]], certified_solution=[1.0])
print("one step from 0 with gamma = 0.25:", fb_step(inst, SolverConfig(gamma=0.25), [0.0]))

trace = run(inst, SolverConfig(), np.array([0.0]))
print(f"auto step size gamma = {trace.gamma:.4f} (L = {trace.lipschitz:.1f}):",
      trace.status, "after", trace.iterations_used, "iterations at", trace.final_point)

# %%
# A halfspace and a thin box meeting at a common point u.
rng = np.random.default_rng(3)
u = rng.uniform(-1, 1, 5)
A = rng.normal(size=(4, 5)) / np.sqrt(5)
a = rng.normal(size=5)
inst = feasibility_instance(
    [Halfspace(a, a @ u)], [Box(A @ u - 0.01, A @ u + 0.01)], [A], certified_solution=u
)
trace = run(inst, SolverConfig(record_every=1), 3 * rng.normal(size=5))
print(trace.status, "after", trace.iterations_used, "iterations")

dist = np.linalg.norm(trace.iterate_array() - u, axis=1)
print("distance to u, first steps:", np.round(dist[:6], 4))
print("largest increase of the distance:", np.max(np.diff(dist)))

# %%
# The relaxed map S_c = c I + (1 - c) S has the same fixed points and takes
# shorter, asymptotically regular steps.
relaxed = run(inst, SolverConfig(relaxation_c=0.5), trace.iterates[0][1])
print("relaxed run:", relaxed.status, "after", relaxed.iterations_used, "iterations")
