"""
Simulating the habit/inertia participation model
================================================

Each round, m existing users and c newcomers take part. Existing users are
chosen by a mix of habit (how often they came before) and inertia (how
recently they came), weighted by alpha.
"""
import numpy as np

from hfbikit import HfbiParams, frequency_sequence, simulate
from hfbikit.powerlaw import select_xmin, top_share

params = HfbiParams(n=731, c=4, m=33, alpha=0.9)
res = simulate(params, seed=2015)
log = res.log
print(log)
print("users:", params.total_users, "records:", len(log))

# the frequency sequence: how many activities each user attended
f = frequency_sequence(log)
print("most active user attended", f.max(), "of", log.activity_count)
print("users who came once: %.0f%%" % (100 * np.mean(f == 1)))
print("top 20%% of users produce %.0f%% of participation" % (100 * top_share(f, 0.2)))

# a power law fits the heavy tail
fit = select_xmin(f, n_boot=200, seed=1)
print("gamma=%.2f from x_min=%d (p=%.2f)" % (fit.gamma, fit.x_min, fit.p_value))

# same seed, same log
assert simulate(params, seed=2015).log == log

# pure inertia produces a much lighter tail
f0 = simulate(HfbiParams(n=731, c=4, m=33, alpha=0.0), seed=2015).frequencies
print("alpha=0: max attendance", f0.max(), "vs", f.max())
