"""
Habit formation and behavioral inertia in a log
===============================================

How does the chance of showing up depend on how often someone came before
(history q) and on how long they have been away (absence d)?
"""
import numpy as np

from hfbikit import HfbiParams, simulate
from hfbikit.evidence import prop_by_absence, prop_by_history, smooth

for alpha in (1.0, 0.0):
    log = simulate(HfbiParams(n=731, c=4, m=33, alpha=alpha), seed=11).log
    h = prop_by_history(log)
    a = prop_by_absence(log)
    print("alpha =", alpha)
    # keep points with enough exposures to be meaningful
    for c, name in ((h, "q"), (a, "d")):
        keep = c.n_exposed >= 30
        xs, ps = c.x[keep], c.proportion[keep]
        at = [x for x in (1, 2, 5, 10, 20, 50, 100) if x in xs]
        print("  %s:" % name, "  ".join("%d->%.2f" % (x, ps[xs == x][0]) for x in at))

# raw curves are noisy at large q; a centered moving average helps
s = smooth(h, window=20)
print("smoothed history curve, first points:", np.round(s.proportion[:5], 3))
