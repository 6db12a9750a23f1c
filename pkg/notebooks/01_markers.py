"""Markers in minimal subshifts.

A set of words is an n-marker when occurrences are at least n apart and
every long enough window contains one.  We search greedily, certify the
result exhaustively, and watch the full shift fail as it must.
"""

from zdm.errors import MarkerNotFound
from zdm.markers import find_marker, gap_statistics, verify_marker
from zdm.shifts import fibonacci, full_shift, thue_morse

for name, shift in (("fibonacci", fibonacci()), ("thue-morse", thue_morse())):
    for n in (2, 5, 9):
        m = find_marker(shift, n, max_L=4 * n)
        lo, hi = gap_statistics(m)
        print(f"{name:10s} n={n:2d}  L={m.L:2d}  words={m.words()}  N={m.N}  gaps {lo}..{hi}")

# an independent re-check of one certificate
m = find_marker(fibonacci(), 5, max_L=20)
cert = verify_marker(fibonacci(), m.W, 5)
print("re-verified:", cert.valid, "covering bound", cert.N)

# the full shift has periodic points, so no marker can be separated
try:
    find_marker(full_shift(2), 2, max_L=8)
except MarkerNotFound as exc:
    print("full shift:", exc)
