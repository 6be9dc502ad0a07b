"""
Calibrating alpha
=================

Given a log, derive (n, c, m) from it and search the alpha grid for the
simulations whose frequency distribution best matches the log's (highest
two-sample KS p-value, averaged over runs).
"""
from hfbikit import HfbiParams, derive_params, simulate
from hfbikit.calibration import calibrate_alpha

# a "real" log whose alpha we pretend not to know
log = simulate(HfbiParams(n=731, c=4, m=33, alpha=0.7), seed=99).log
print(derive_params(log, alpha=0.5))

cal = calibrate_alpha(log, grid_step=0.05, runs=5, seed=1)
for a, p in zip(cal.grid, cal.mean_p):
    print("%.2f  %s" % (a, "#" * int(40 * p)))
print("best alpha %.2f (mean p %.2f)" % (cal.best_alpha, cal.best_p))

# the exponential kernel forgets absences much faster
cal_e = calibrate_alpha(log, kernel="exponential", grid_step=0.1, runs=3, seed=1)
print("exponential kernel: best alpha %.2f" % cal_e.best_alpha)
