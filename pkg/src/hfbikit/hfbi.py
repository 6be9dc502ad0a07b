"""The habit-formation / behavioral-inertia (HFBI) participation model.

Each round (activity) ``c`` brand-new users join and ``m`` distinct existing
users are selected with probability

    phi_i = alpha * q_i / sum(q) + (1 - alpha) * w(d_i) / sum(w(d))

where ``q_i`` counts past participations, ``d_i`` is the number of rounds
since user ``i`` last took part and ``w`` is a decreasing kernel
(``1/d`` or ``exp(-d)``).
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ._seeding import derive_seed
from .event_log import ActivityLog, newcomer_counts
from .powerlaw import DEFAULT_N_BOOT, PowerLawFit, select_xmin

KERNELS = ("reciprocal", "exponential")


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class HfbiParams:
    n: int
    c: int
    m: int
    alpha: float
    kernel: str = "reciprocal"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.c < 0:
            raise ValueError(f"c must be >= 0, got {self.c}")
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.kernel not in KERNELS:
            raise ValueError(f"kernel must be one of {KERNELS}, got {self.kernel!r}")

    @property
    def total_users(self) -> int:
        return self.m + self.n * self.c

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def derive_params(log: ActivityLog, alpha: float, kernel: str = "reciprocal") -> HfbiParams:
    """Model parameters matched to an observed log.

    ``c`` and ``m`` are the rounded mean numbers of first-time and returning
    participants per activity; ``n`` is chosen so the simulated population
    ``m + n*c`` matches the observed user count.
    """
    if len(log) == 0:
        raise ValueError("cannot derive parameters from an empty log")
    new, returning = newcomer_counts(log)
    c = _round_half_up(new.mean())
    m = _round_half_up(returning.mean())
    users = log.user_count
    if m < 1:
        raise ValueError("mean number of returning participants rounds to 0")
    if c == 0:
        if users > m:
            raise ValueError("mean number of newcomers rounds to 0; population is unreachable")
        n = log.activity_count
    else:
        n = max(_round_half_up((users - m) / c), 1)
    return HfbiParams(n=n, c=c, m=m, alpha=alpha, kernel=kernel)


# ---------------------------------------------------------------------------
# state and probabilities
# ---------------------------------------------------------------------------
@dataclass
class SimState:
    """Per-user participation counts ``q`` and last-participation rounds ``last``.

    Only the first ``size`` entries are live; arrays are preallocated to the
    final population. ``urn`` lists one user id per past participation, so a
    uniform draw from ``urn[:urn_size]`` selects user ``i`` with probability
    ``q_i / sum(q)``.
    """
    q: np.ndarray
    last: np.ndarray
    size: int
    round: int = 0
    urn: np.ndarray = field(default=None, repr=False)
    urn_size: int = 0

    @classmethod
    def initial(cls, m: int, capacity: int | None = None, urn_capacity: int = 0) -> "SimState":
        capacity = max(capacity or m, m)
        return cls(
            q=np.zeros(capacity, dtype=np.int64),
            last=np.zeros(capacity, dtype=np.int64),
            size=m,
            urn=np.empty(max(urn_capacity, 0), dtype=np.int64),
        )

    @classmethod
    def from_arrays(cls, q, last, round: int) -> "SimState":
        """State for an explicit pool; mostly for tests and inspection."""
        q = np.asarray(q, dtype=np.int64).copy()
        last = np.asarray(last, dtype=np.int64).copy()
        urn = np.repeat(np.arange(q.size), q)
        return cls(q=q, last=last, size=q.size, round=round, urn=urn, urn_size=urn.size)

    def gaps(self) -> np.ndarray:
        return np.maximum(self.round - self.last[:self.size], 1)


def _kernel_weights(d: np.ndarray, kernel: str) -> np.ndarray:
    if kernel == "reciprocal":
        return 1.0 / d
    # shifting by the smallest gap only rescales the weights; it keeps the
    # most recent participants at weight 1 so the sum never underflows
    return np.exp(-(d - d.min()).astype(float))


def participation_probabilities(state: SimState, alpha: float, kernel: str = "reciprocal") -> np.ndarray:
    """Selection probability of every existing user for the current round."""
    if state.size == 0:
        raise ValueError("no existing users")
    q = state.q[:state.size].astype(float)
    total = q.sum()
    habit = q / total if total > 0 else np.full(state.size, 1.0 / state.size)
    w = _kernel_weights(state.gaps(), kernel)
    inertia = w / w.sum()
    return alpha * habit + (1.0 - alpha) * inertia


# ---------------------------------------------------------------------------
# one round
# ---------------------------------------------------------------------------
_MAX_REJECTION_BATCHES = 64


def _select_existing(state: SimState, m: int, alpha: float, kernel: str,
                     rng: np.random.Generator) -> np.ndarray:
    """Pick ``m`` distinct users by repeated draws from phi, skipping repeats."""
    size = state.size
    if m > size:
        raise ValueError(f"cannot select {m} users from a pool of {size}")
    if m == size:
        return np.arange(size)

    use_habit = alpha > 0.0
    use_inertia = alpha < 1.0
    habit_uniform = state.urn_size == 0
    if use_inertia:
        w = _kernel_weights(state.gaps(), kernel)
        cum_w = np.cumsum(w)
    else:
        w = None
    positive = np.zeros(size, dtype=bool)
    if use_habit:
        positive |= True if habit_uniform else state.q[:size] > 0
    if use_inertia:
        positive |= w > 0
    if positive.sum() < m:
        raise ValueError(f"only {positive.sum()} users have nonzero probability, need {m}")

    chosen = np.zeros(size, dtype=bool)
    picked: list[int] = []
    for _ in range(_MAX_REJECTION_BATCHES):
        need = m - len(picked)
        k = 2 * need + 4
        cand = np.empty(k, dtype=np.int64)
        from_habit = rng.random(k) < alpha
        nh = int(from_habit.sum())
        if nh:
            if habit_uniform:
                cand[from_habit] = rng.integers(0, size, nh)
            else:
                cand[from_habit] = state.urn[rng.integers(0, state.urn_size, nh)]
        ni = k - nh
        if ni:
            r = rng.random(ni) * cum_w[-1]
            cand[~from_habit] = np.minimum(np.searchsorted(cum_w, r, side="right"), size - 1)
        for u in cand.tolist():
            if not chosen[u]:
                chosen[u] = True
                picked.append(u)
                if len(picked) == m:
                    return np.array(picked, dtype=np.int64)

    # Most of the mass sits on users already picked; finish with explicit
    # renormalized draws over the remaining users.
    phi = participation_probabilities(state, alpha, kernel)
    phi[chosen] = 0.0
    while len(picked) < m:
        total = phi.sum()
        u = int(np.searchsorted(np.cumsum(phi), rng.random() * total, side="right"))
        u = min(u, size - 1)
        while phi[u] == 0.0:
            u -= 1
        phi[u] = 0.0
        picked.append(u)
    return np.array(picked, dtype=np.int64)


def step(state: SimState, params: HfbiParams, rng: np.random.Generator) -> np.ndarray:
    """Advance ``state`` by one round in place.

    Returns the ids of this round's participants: the ``m`` selected existing
    users in draw order, then the ``c`` new users.
    """
    j = state.round
    existing = _select_existing(state, params.m, params.alpha, params.kernel, rng)
    new = np.arange(state.size, state.size + params.c, dtype=np.int64)
    if state.size + params.c > state.q.size:
        grow = max(state.q.size, params.c)
        state.q = np.concatenate((state.q, np.zeros(grow, dtype=np.int64)))
        state.last = np.concatenate((state.last, np.zeros(grow, dtype=np.int64)))
    state.size += params.c
    participants = np.concatenate((existing, new))
    state.q[participants] += 1
    state.last[participants] = j
    need = state.urn_size + participants.size
    if need > state.urn.size:
        state.urn = np.concatenate((state.urn, np.empty(max(need, 2 * state.urn.size), dtype=np.int64)))
    state.urn[state.urn_size:need] = participants
    state.urn_size = need
    state.round = j + 1
    return participants


# ---------------------------------------------------------------------------
# full runs
# ---------------------------------------------------------------------------
@dataclass
class SimulationResult:
    params: HfbiParams
    seed: int | None
    frequencies: np.ndarray
    log: ActivityLog | None = None


def simulate(params: HfbiParams, seed=None, keep_log: bool = True) -> SimulationResult:
    """Run ``params.n`` rounds starting from ``m`` users with no history.

    Returns the positive participation counts (ordered by user id) and,
    when ``keep_log`` is set, the synthetic log whose activity ids are round
    indices and whose participant ids are ``0..m-1`` for the initial pool
    followed by newcomers in order of arrival.
    """
    rng = np.random.default_rng(seed)
    per_round = params.m + params.c
    state = SimState.initial(params.m, capacity=params.total_users,
                             urn_capacity=params.n * per_round)
    if keep_log:
        who = np.empty(params.n * per_round, dtype=np.int64)
        when = np.repeat(np.arange(params.n, dtype=np.int64), per_round)
    for j in range(params.n):
        sel = step(state, params, rng)
        if keep_log:
            who[j * per_round:(j + 1) * per_round] = sel
    q = state.q[:state.size]
    freqs = q[q > 0].copy()
    log = ActivityLog(who, when) if keep_log else None
    return SimulationResult(params, seed, freqs, log)


def habit_only_exponent(c: int, m: int) -> float:
    """Asymptotic power-law exponent of the habit-only model, ``2 + c/m``."""
    if m < 1 or c < 1:
        raise ValueError("c and m must both be >= 1")
    return 2.0 + c / m


@dataclass(frozen=True)
class TheoryCheck:
    gamma_hat: float
    gamma_theory: float
    abs_error: float
    fit: PowerLawFit

    def to_dict(self) -> dict:
        d = asdict(self)
        d["fit"] = self.fit.to_dict()
        return d


def validate_theory(c: int, m: int, n: int, seed=0, n_boot: int = DEFAULT_N_BOOT,
                    p_threshold: float = 0.1) -> TheoryCheck:
    """Simulate the habit-only model and compare the fitted exponent with ``2 + c/m``."""
    params = HfbiParams(n=n, c=c, m=m, alpha=1.0)
    res = simulate(params, seed=seed, keep_log=False)
    fit = select_xmin(res.frequencies, p_threshold=p_threshold, n_boot=n_boot,
                      seed=derive_seed(seed, 1))
    theory = habit_only_exponent(c, m)
    return TheoryCheck(fit.gamma, theory, abs(fit.gamma - theory), fit)
