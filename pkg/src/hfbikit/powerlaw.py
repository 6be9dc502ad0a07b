"""Discrete power-law estimation and related heavy-tail statistics.

The model is ``p(q) = q**(-gamma) / zeta(gamma, x_min)`` for integers
``q >= x_min``. Fitting follows the usual recipe: maximum likelihood for
the exponent at fixed ``x_min``, a KS distance to measure agreement, a
parametric bootstrap for the goodness-of-fit p-value, and the smallest
``x_min`` whose p-value clears a threshold.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .zeta import hurwitz_zeta

GAMMA_LOW = 1.01
GAMMA_HIGH = 6.0
GAMMA_TOL = 1e-6
MIN_TAIL = 10
DEFAULT_N_BOOT = 1000
MIN_N_BOOT = 100

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class FitError(ValueError):
    """Raised when a power law cannot be fitted to the given data."""


class DegenerateTailError(FitError):
    """All tail observations are identical; the likelihood has no interior maximum."""


@dataclass(frozen=True)
class PowerLawFit:
    gamma: float
    x_min: int
    ks_stat: float
    p_value: float
    n_tail: int
    n_total: int = 0
    seed: int | None = None
    n_boot: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


@dataclass(frozen=True)
class TwoSampleKs:
    statistic: float
    p_value: float


# --------------------------------------------------------------------------
# helpers on (value, count) tables
# --------------------------------------------------------------------------
def _as_positive_ints(values) -> np.ndarray:
    arr = np.asarray(values)
    if arr.size == 0:
        return arr.astype(np.int64)
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise ValueError("values must be integers")
        arr = arr.astype(np.int64)
    if np.any(arr < 1):
        raise ValueError("values must be positive integers")
    return arr.astype(np.int64, copy=False)


def _tail_table(values, x_min: int) -> tuple[np.ndarray, np.ndarray]:
    arr = _as_positive_ints(values)
    if x_min < 1 or int(x_min) != x_min:
        raise ValueError(f"x_min must be a positive integer, got {x_min}")
    tail = arr[arr >= x_min]
    if tail.size < 2:
        raise FitError(f"need at least 2 observations >= x_min={x_min}, got {tail.size}")
    u, c = np.unique(tail, return_counts=True)
    return u, c


def _mle_from_stats(n: int, sum_log: float, x_min: int) -> float:
    """Golden-section maximization of the discrete tail log-likelihood."""
    x_min = float(x_min)

    def neg_ll(g):
        return n * math.log(hurwitz_zeta(g, x_min)) + g * sum_log

    lo, hi = GAMMA_LOW, GAMMA_HIGH
    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)
    f1, f2 = neg_ll(x1), neg_ll(x2)
    while hi - lo > GAMMA_TOL:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INV_PHI * (hi - lo)
            f1 = neg_ll(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INV_PHI * (hi - lo)
            f2 = neg_ll(x2)
    # the likelihood is concave, so an endpoint optimum shows up as a collapse
    # onto the boundary; compare against the endpoint itself
    best = 0.5 * (lo + hi)
    if neg_ll(GAMMA_HIGH) < neg_ll(best):
        best = GAMMA_HIGH
    return best


def _model_cdf(points: np.ndarray, gamma: float, x_min: int) -> np.ndarray:
    """P(X <= q) for the discrete power law, evaluated at integer ``points >= x_min``."""
    z = hurwitz_zeta(gamma, float(x_min))
    return 1.0 - hurwitz_zeta(gamma, points.astype(float) + 1.0) / z


def _ks_from_table(u: np.ndarray, c: np.ndarray, gamma: float, x_min: int) -> float:
    n = c.sum()
    emp = np.cumsum(c) / n
    model_at = _model_cdf(u, gamma, x_min)
    d = np.max(np.abs(emp - model_at))
    # just below each observed value the empirical CDF still holds its
    # previous level while the model has grown to F(u - 1)
    below = u - 1
    ok = below >= x_min
    if np.any(ok):
        prev_emp = np.concatenate(([0.0], emp[:-1]))[ok]
        d = max(d, np.max(np.abs(prev_emp - _model_cdf(below[ok], gamma, x_min))))
    return float(min(d, 1.0))


# --------------------------------------------------------------------------
# sampling
# --------------------------------------------------------------------------
class DiscretePowerLawSampler:
    """Exact sampler for ``p(q) ∝ q**(-gamma)``, ``q >= x_min``.

    Values below ``x_min + table_size`` come from an inverse-CDF table. The
    remaining tail mass is sampled exactly by rejection from a floored
    continuous Pareto proposal, which stays efficient because the table
    pushes the tail far out where consecutive integers have nearly equal mass.
    """

    def __init__(self, gamma: float, x_min: int = 1, table_size: int = 4096):
        if gamma <= 1:
            raise ValueError("gamma must exceed 1")
        if x_min < 1:
            raise ValueError("x_min must be >= 1")
        self.gamma = float(gamma)
        self.x_min = int(x_min)
        self.cap = self.x_min + int(table_size)
        support = np.arange(self.x_min, self.cap, dtype=float)
        z = hurwitz_zeta(self.gamma, float(self.x_min))
        self.support = support.astype(np.int64)
        self.pmf = support ** (-self.gamma) / z
        self.tail_mass = hurwitz_zeta(self.gamma, float(self.cap)) / z
        self.cdf = np.cumsum(self.pmf)
        # bound on target / proposal over q >= cap
        self._envelope = (1.0 + 1.0 / self.cap) ** self.gamma

    def _tail(self, size: int, rng: np.random.Generator) -> np.ndarray:
        g1 = self.gamma - 1.0
        out = np.empty(size, dtype=np.int64)
        filled = 0
        while filled < size:
            want = size - filled
            batch = int(want * 1.1) + 4
            y = self.cap * rng.random(batch) ** (-1.0 / g1)
            y = y[np.isfinite(y) & (y < 9.0e18)]
            q = np.floor(y)
            # target q^-g versus proposal mass of [q, q+1), both up to the same constant
            cell = -np.expm1(-g1 * np.log1p(1.0 / q)) * q ** (-g1) / g1
            accept = q ** (-self.gamma) / (self._envelope * cell)
            keep = q[rng.random(q.size) < accept].astype(np.int64)[:want]
            out[filled:filled + keep.size] = keep
            filled += keep.size
        return out

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        u = rng.random(size)
        idx = np.searchsorted(self.cdf, u, side="right")
        out = np.empty(size, dtype=np.int64)
        in_table = idx < self.support.size
        out[in_table] = self.support[idx[in_table]]
        n_tail = int(size - in_table.sum())
        if n_tail:
            out[~in_table] = self._tail(n_tail, rng)
        return out

    def sample_table(self, size: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        """Draw ``size`` values and return them as sorted (value, count) pairs.

        Equivalent in distribution to ``np.unique(self.sample(size), return_counts=True)``
        but costs O(table_size) rather than O(size log size).
        """
        probs = np.append(self.pmf, self.tail_mass)
        probs = probs / probs.sum()
        counts = rng.multinomial(size, probs)
        n_tail = int(counts[-1])
        body = counts[:-1]
        nz = body > 0
        u, c = self.support[nz], body[nz]
        if n_tail:
            tu, tc = np.unique(self._tail(n_tail, rng), return_counts=True)
            u = np.concatenate((u, tu))
            c = np.concatenate((c, tc))
        return u, c


def sample_discrete_power_law(gamma: float, x_min: int, size: int, seed=None) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return DiscretePowerLawSampler(gamma, x_min).sample(size, rng)


# --------------------------------------------------------------------------
# public estimation API
# --------------------------------------------------------------------------
def mle_gamma(values, x_min: int = 1) -> float:
    """Maximum-likelihood exponent of the discrete power law fitted above ``x_min``.

    Parameters
    ----------
    values : array_like of int
        Observations; only those ``>= x_min`` enter the likelihood.
    x_min : int
        Lower truncation point.

    Returns
    -------
    float
        Exponent in ``(1.01, 6.0]`` located to within 1e-6.

    Raises
    ------
    FitError
        Fewer than two tail observations.
    DegenerateTailError
        All tail observations share one value.
    """
    u, c = _tail_table(values, x_min)
    if u.size == 1:
        raise DegenerateTailError(f"all {c[0]} tail values equal {u[0]}")
    return _mle_from_stats(int(c.sum()), float(np.dot(c, np.log(u))), x_min)


def ks_distance(values, gamma: float, x_min: int = 1) -> float:
    """Sup-norm distance between the empirical tail CDF and the fitted model CDF."""
    u, c = _tail_table(values, x_min)
    return _ks_from_table(u, c, gamma, x_min)


def _replicate_rng(seed, index: int) -> np.random.Generator:
    base = 0 if seed is None else int(seed)
    return np.random.default_rng([base, index])


def _bootstrap_exceedances(gamma, x_min, n_tail, observed, n_boot, seed, stop_below=None):
    """Count synthetic KS distances >= ``observed``.

    When ``stop_below`` is given, returns early (with ``None``) as soon as the
    final count can no longer exceed it.
    """
    sampler = DiscretePowerLawSampler(gamma, x_min)
    exceed = 0
    for i in range(n_boot):
        rng = _replicate_rng(seed, i)
        u, c = sampler.sample_table(n_tail, rng)
        if u.size == 1:
            # a one-point synthetic tail has no interior MLE; the fit sits at
            # the upper bound and the KS distance is computed there
            g = GAMMA_HIGH
        else:
            g = _mle_from_stats(n_tail, float(np.dot(c, np.log(u))), x_min)
        if _ks_from_table(u, c, g, x_min) >= observed:
            exceed += 1
        if stop_below is not None and exceed + (n_boot - i - 1) <= stop_below:
            return None
    return exceed


def gof_p_value(values, fit: PowerLawFit, n_boot: int = DEFAULT_N_BOOT, seed=0) -> float:
    """Parametric-bootstrap goodness-of-fit p-value for ``fit``.

    Each replicate draws ``fit.n_tail`` values from the fitted law, refits
    the exponent at the same ``x_min`` and records its KS distance. The
    p-value is the fraction of replicate distances at least as large as
    the observed one. Replicate ``i`` uses its own generator seeded from
    ``(seed, i)``.
    """
    if n_boot < MIN_N_BOOT:
        raise ValueError(f"n_boot must be >= {MIN_N_BOOT}, got {n_boot}")
    exceed = _bootstrap_exceedances(fit.gamma, fit.x_min, fit.n_tail, fit.ks_stat, n_boot, seed)
    return exceed / n_boot


def fit_power_law(values, x_min: int = 1, n_boot: int = DEFAULT_N_BOOT, seed=0) -> PowerLawFit:
    """MLE, KS distance and bootstrap p-value at a fixed ``x_min``."""
    arr = _as_positive_ints(values)
    u, c = _tail_table(arr, x_min)
    if u.size == 1:
        raise DegenerateTailError(f"all {c[0]} tail values equal {u[0]}")
    n_tail = int(c.sum())
    gamma = _mle_from_stats(n_tail, float(np.dot(c, np.log(u))), x_min)
    ks = _ks_from_table(u, c, gamma, x_min)
    fit = PowerLawFit(gamma, int(x_min), ks, float("nan"), n_tail, int(arr.size), seed, n_boot)
    p = gof_p_value(arr, fit, n_boot=n_boot, seed=seed)
    return PowerLawFit(gamma, int(x_min), ks, p, n_tail, int(arr.size), seed, n_boot)


def select_xmin(values, p_threshold: float = 0.1, n_boot: int = DEFAULT_N_BOOT, seed=0,
                min_tail: int = MIN_TAIL) -> PowerLawFit:
    """Fit with the smallest ``x_min`` whose bootstrap p-value exceeds ``p_threshold``.

    Candidates are tried in ascending order starting at 1. Candidates whose
    tail is degenerate (a single distinct value) are skipped as failures.

    Raises
    ------
    FitError
        If the tail drops below ``min_tail`` observations before any
        candidate passes.
    """
    if not 0.0 < p_threshold < 1.0:
        raise ValueError("p_threshold must lie in (0, 1)")
    if n_boot < MIN_N_BOOT:
        raise ValueError(f"n_boot must be >= {MIN_N_BOOT}, got {n_boot}")
    arr = _as_positive_ints(values)
    if arr.size == 0:
        raise ValueError("values must be nonempty")
    u_all, c_all = np.unique(arr, return_counts=True)
    # tail size for x_min = k is the count of values >= k
    tail_sizes = np.cumsum(c_all[::-1])[::-1]
    sum_logs = np.cumsum((c_all * np.log(u_all))[::-1])[::-1]
    stop_below = math.floor(p_threshold * n_boot + 1e-9)

    x_min = 1
    while True:
        start = int(np.searchsorted(u_all, x_min))
        if start >= u_all.size or tail_sizes[start] < min_tail:
            raise FitError(f"no x_min with p > {p_threshold} before the tail fell below {min_tail}")
        u, c = u_all[start:], c_all[start:]
        if u.size > 1:
            n_tail = int(tail_sizes[start])
            gamma = _mle_from_stats(n_tail, float(sum_logs[start]), x_min)
            ks = _ks_from_table(u, c, gamma, x_min)
            exceed = _bootstrap_exceedances(gamma, x_min, n_tail, ks, n_boot,
                                            _xmin_seed(seed, x_min), stop_below=stop_below)
            if exceed is not None and exceed / n_boot > p_threshold:
                return PowerLawFit(gamma, x_min, ks, exceed / n_boot, n_tail, int(arr.size),
                                   seed, n_boot)
        # x_min values with no observations give the same tail as the next
        # observed value, but a different normalization, so each is tried
        x_min += 1


def _xmin_seed(seed, x_min: int) -> int:
    base = 0 if seed is None else int(seed)
    return int(np.random.SeedSequence([base, x_min]).generate_state(1)[0])


# --------------------------------------------------------------------------
# two-sample comparison
# --------------------------------------------------------------------------
def kolmogorov_sf(lam: float) -> float:
    """Survival function of the asymptotic Kolmogorov distribution, Q(lam)."""
    if lam <= 0:
        return 1.0
    if lam < 1.18:
        # theta-function form converges fast for small arguments
        s = 0.0
        c = math.pi ** 2 / (8.0 * lam * lam)
        for k in range(1, 20, 2):
            term = math.exp(-k * k * c)
            s += term
            if term < 1e-17:
                break
        return min(1.0, max(0.0, 1.0 - math.sqrt(2.0 * math.pi) / lam * s))
    s = 0.0
    for k in range(1, 101):
        term = math.exp(-2.0 * k * k * lam * lam)
        s += term if k % 2 else -term
        if term < 1e-17:
            break
    return min(1.0, max(0.0, 2.0 * s))


def two_sample_ks(a, b) -> TwoSampleKs:
    """Two-sample KS test with the asymptotic p-value and Stephens' small-sample correction."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be nonempty")
    grid = np.union1d(a, b)
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    d = float(np.max(np.abs(fa - fb)))
    ne = a.size * b.size / (a.size + b.size)
    sq = math.sqrt(ne)
    lam = (sq + 0.12 + 0.11 / sq) * d
    return TwoSampleKs(d, kolmogorov_sf(lam))


# --------------------------------------------------------------------------
# descriptive curves
# --------------------------------------------------------------------------
def ccdf(values) -> np.ndarray:
    """Empirical CCDF, F(q) = fraction of values >= q, at each distinct q.

    Returns an ``(k, 2)`` array of ``(q, F(q))`` rows with ``q`` increasing.
    """
    arr = np.asarray(values)
    if arr.size == 0:
        raise ValueError("ccdf of an empty sample")
    u, c = np.unique(arr, return_counts=True)
    at_least = np.cumsum(c[::-1])[::-1]
    return np.column_stack((u, at_least / arr.size))


def top_share(values, p: float) -> float:
    """Fraction of the total held by the top ``ceil(p * n)`` values."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValueError("top_share of an empty sample")
    if not 0.0 < p <= 1.0:
        raise ValueError("p must lie in (0, 1]")
    k = math.ceil(p * arr.size - 1e-12)
    desc = np.sort(arr)[::-1]
    return float(desc[:k].sum() / desc.sum())


def lorenz_curve(values) -> np.ndarray:
    """Concentration curve: rows ``(p, P)`` where the top fraction p holds fraction P.

    Starts at ``(0, 0)`` and ends at ``(1, 1)``.
    """
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValueError("lorenz_curve of an empty sample")
    desc = np.sort(arr)[::-1]
    share = np.concatenate(([0.0], np.cumsum(desc) / desc.sum()))
    frac = np.arange(arr.size + 1) / arr.size
    return np.column_stack((frac, share))
