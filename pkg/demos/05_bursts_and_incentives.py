"""
Bursts and incentives
=====================

A burst is a run of attendances with every gap below delta. Where in the
burst does the first incentivized activity sit? If incentives trigger
bursts, it should be near the start.
"""
import numpy as np

from hfbikit import ActivityLog
from hfbikit.bursts import burst_baseline, burst_table, detect_bursts, loyal_users

rng = np.random.default_rng(5)
T = 600
incentives = set(np.flatnonzero(rng.random(T) < 0.15).tolist())

# 40 users who mostly come in short streaks that begin at an incentive
part, act = [], []
for u in range(40):
    t = int(rng.integers(0, 20))
    while t < T:
        if t in incentives or rng.random() < 0.2:
            for k in range(int(rng.integers(2, 7))):
                if t + k < T:
                    part.append(u); act.append(t + k)
            t += int(rng.integers(8, 40))
        else:
            t += 1
# one background user keeps every activity id in use
part += [99] * T
act += list(range(T))
log = ActivityLog(part, act, incentive_activities=incentives)

print("burst example:", detect_bursts(log, 0, 8)[:2])
users = loyal_users(log, 50)
print(len(users), "users attended more than 50 activities")
for delta in (8, 9, 10):
    t = burst_table(log, [u for u in users if u != 99], delta)
    print("delta=%d: %d bursts, first incentive within 1/2/3: %.0f%% %.0f%% %.0f%%" % (
        delta, t.total_bursts, *(100 * t.share_within(k) for k in (1, 2, 3))))
print("share of incentivized activities: %.0f%%" % (100 * burst_baseline(log)))
