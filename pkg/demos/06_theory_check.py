"""
Checking the habit-only exponent
================================

With alpha = 1 the model is a rich-get-richer process and its participation
counts should follow a power law with exponent 2 + c/m. The fit uses a
finite x_min, and the stationary law bends away from a pure power law near
the head, so the estimate sits somewhat below the asymptotic value.
"""
from hfbikit import validate_theory

for c, m in [(1, 1), (1, 2), (4, 33)]:
    r = validate_theory(c, m, n=20000, seed=1, n_boot=200)
    print("c=%d m=%d  theory %.3f  fitted %.3f  (x_min=%d, tail %d)" % (
        c, m, r.gamma_theory, r.gamma_hat, r.fit.x_min, r.fit.n_tail))
