"""Ball labels, boundary mass and the Cantor selector.

A circle rotation is covered by balls whose radius moves with a parameter
t.  Labels change only where an orbit point crosses a sphere, so choosing t
where the spheres carry little mass keeps the names stable.
"""

from zdm.encoder import (
    BoundaryEstimatorConfig,
    CircleRotation,
    LebesgueMeasure,
    array_name,
    cover_schedule,
    parse_alpha,
    psi_estimate,
)
from zdm.selector import check_selector, selector_build, synthetic_measures

system = CircleRotation(parse_alpha("golden"))
fams = cover_schedule(system, 4)
cfg = BoundaryEstimatorConfig(d=0.01)
leb = LebesgueMeasure(system, size=20000)

for fam in fams:
    est = psi_estimate(system, fam, leb, 0.5, cfg)
    print(f"level {fam.k}: m={fam.m}  psi(0.5) = {est.value:.5f} +- {est.tolerance:.1e}")

name = array_name(system, fams, 0.5, 0.123, depth=3, halfwidth=6)
for row in name.rows():
    print(row)

# atoms parked on chosen spheres force the selector away from those parameters
bad = [[(1, 0.25)], [(2, 0.75)]]
measures = synthetic_measures(system, fams, bad=bad)
table = selector_build(measures, fams, 4, cfg)
print("selected parameters:", [float(table.limit_value(i)) for i in range(table.count)])
print("selector checks pass:", check_selector(table, measures, fams, cfg).ok)
