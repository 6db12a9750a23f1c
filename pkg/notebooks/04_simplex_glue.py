"""Retractions of a simplex and the stagewise glue.

Each stage blends the current map toward the identity, processes vertex
groups until they are eps-dense, retracts the rest onto them and lifts the
new vertices into a fresh coordinate.  Displacements then sum to a finite
tail, so the maps converge to an injective limit on the processed part.
"""

import numpy as np

from zdm.glue import GlueState, Schedule, glue_run
from zdm.simplex import FiniteSimplex, decompose, prefix_splitter, retract
from zdm.suites import clustered_simplex

tri = FiniteSimplex(np.array([[0.0, 0.0], [1.0, 0.0], [0.5, 0.05]]))
r = retract(tri, tri.face([0, 1]), eps=0.1)
print("retraction images:\n", r.images)

print(decompose([["000", "001"], ["001", "010", "011"], ["100", "011"]], prefix_splitter(2)))

rng = np.random.default_rng(3)
K, groups = clustered_simplex(rng, groups=4, per_group=2)
state = GlueState.start(K, groups, Schedule.parse("geometric:0.5"))
result = glue_run(state, 6)
for c in result.stages:
    print(f"stage {c.k}: eps={c.eps:.4f} displacement={c.displacement:.4f} < {c.bound:.4f}  added={c.added}")
print("tail bound", result.tail_bound, " injective", result.injective, " ok", result.ok)
