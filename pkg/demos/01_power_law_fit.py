"""
Fitting a discrete power law
============================

Draw counts from a known discrete power law, then recover the exponent,
pick x_min and ask whether the power law is plausible at all.
"""
import numpy as np

from hfbikit.powerlaw import (ccdf, fit_power_law, lorenz_curve, mle_gamma,
                              sample_discrete_power_law, select_xmin, top_share)

# 5000 counts with exponent 2.2, starting at 1
x = sample_discrete_power_law(2.2, 1, 5000, seed=7)
print("largest count:", x.max())

# the maximum-likelihood exponent at a fixed x_min
print("MLE at x_min=1: %.3f" % mle_gamma(x, 1))

# bootstrap goodness of fit; p well above 0.1 means "not rejected"
fit = fit_power_law(x, x_min=1, n_boot=200, seed=1)
print("KS distance %.4f, p = %.2f" % (fit.ks_stat, fit.p_value))

# geometric data of the same size gets rejected
g = np.random.default_rng(3).geometric(0.3, 5000)
print("geometric data, p = %.2f" % fit_power_law(g, 1, n_boot=200, seed=1).p_value)

# when the head of the distribution is not power-law, x_min moves up
mixed = np.concatenate([np.random.default_rng(4).integers(1, 6, 3000), x[x >= 6]])
best = select_xmin(mixed, n_boot=200, seed=2)
print("mixed data: x_min=%d, gamma=%.3f, tail=%d" % (best.x_min, best.gamma, best.n_tail))

# concentration: what share of all activity do the top 20% produce?
print("top 20%% share: %.2f" % top_share(x, 0.2))
t = ccdf(x)
print("P(X >= 10) = %.4f" % t[t[:, 0] >= 10][0, 1])
L = lorenz_curve(x)
print("Lorenz curve has %d points, ends at %s" % (len(L), L[-1]))
