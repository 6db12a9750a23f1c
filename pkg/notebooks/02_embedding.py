"""Dense embedding of a host subshift into a stacked array system.

Thue-Morse is the host and Fibonacci the target.  Between consecutive
marker hits we copy a certified generic block of the target into fresh
rows, so the pattern frequencies of the output sit close to the target's.
"""

import numpy as np

from zdm.embedding import build_phi, host_window, plan_embedding, verify_density
from zdm.shifts import fibonacci, thue_morse

host, target = thue_morse(), fibonacci()
rng = np.random.default_rng(0)

for eps in (0.5, 0.25):
    plan = plan_embedding(host, target, eps, [(1, 1), (1, 2)])
    cols = int(20 * plan.N0 / eps)
    outputs = [build_phi(plan, host_window(plan, host.sample_word(cols, rng))) for _ in range(5)]
    report = verify_density(plan, outputs)
    print(f"eps={eps}: N0={plan.N0} marker N={plan.marker.N} radius={plan.radius}")
    print(f"  worst deviation {report.worst_deviation:.4f}  inside={report.inside}")
    for shape, pattern, dev in list(report.rows())[:4]:
        print(f"  {shape} {pattern}: {dev:.4f}")

# the first few rows of one output, unfilled cells shown as '.'
plan = plan_embedding(host, target, 0.5, [(1, 1), (1, 2)])
y = build_phi(plan, host_window(plan, host.sample_word(60, rng)))
for row in y.cells[:6]:
    print("".join("." if c < 0 else str(c) for c in row))
