"""Grid-search calibration of the habit/inertia mixture weight, and
per-activity-node analyses over growing log prefixes."""
from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field, replace

import numpy as np

from ._seeding import derive_seed
from .event_log import ActivityLog, frequency_sequence, prefix, users_reaching
from .hfbi import HfbiParams, derive_params, simulate
from .powerlaw import DEFAULT_N_BOOT, FitError, PowerLawFit, select_xmin, two_sample_ks


@dataclass(frozen=True)
class AlphaCalibration:
    grid: np.ndarray
    mean_p: np.ndarray
    best_alpha: float
    runs: int
    kernel: str
    params: HfbiParams
    seed: int | None = None
    p_values: np.ndarray = field(default=None, repr=False)  # shape (len(grid), runs)

    @property
    def best_p(self) -> float:
        return float(self.mean_p[int(np.argmax(self.grid == self.best_alpha))])

    def to_dict(self) -> dict:
        return {
            "grid": self.grid.tolist(),
            "mean_p": self.mean_p.tolist(),
            "best_alpha": self.best_alpha,
            "best_p": self.best_p,
            "runs": self.runs,
            "kernel": self.kernel,
            "params": {k: v for k, v in self.params.to_dict().items() if k != "alpha"},
            "seed": self.seed,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def alpha_grid(step: float) -> np.ndarray:
    """``0, step, 2*step, ...`` up to 1, always ending at exactly 1."""
    if not 0 < step <= 1:
        raise ValueError("grid_step must lie in (0, 1]")
    k = int(math.floor(1.0 / step + 1e-9))
    grid = np.round(np.arange(k + 1) * step, 12)
    if grid[-1] < 1.0:
        grid = np.append(grid, 1.0)
    return grid


def calibrate_alpha(log: ActivityLog, kernel: str = "reciprocal", grid_step: float = 0.01,
                    runs: int = 5, seed=0, grid=None) -> AlphaCalibration:
    """Pick the mixture weight whose simulations best match the log's frequencies.

    For every alpha on the grid the model (with ``n``, ``c``, ``m`` derived
    from the log) is simulated ``runs`` times and each synthetic frequency
    sequence is compared with the empirical one by a two-sample KS test.
    The alpha with the highest mean p-value wins; ties go to the smaller
    alpha. Run ``r`` uses the same seed for every alpha, so the grid points
    are compared under common random numbers.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    base = derive_params(log, alpha=0.0, kernel=kernel)
    observed = frequency_sequence(log)
    grid = alpha_grid(grid_step) if grid is None else np.asarray(grid, dtype=float)
    p = np.empty((grid.size, runs))
    for a, alpha in enumerate(grid):
        params = replace(base, alpha=float(alpha))
        for r in range(runs):
            sim = simulate(params, seed=derive_seed(seed, r), keep_log=False)
            p[a, r] = two_sample_ks(sim.frequencies, observed).p_value
    mean_p = p.mean(axis=1)
    best = int(np.argmax(mean_p))  # first maximum, i.e. the smallest alpha
    return AlphaCalibration(grid, mean_p, float(grid[best]), runs, kernel, base, seed, p)


# ---------------------------------------------------------------------------
# per-node series
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class NodeSeries:
    """One value per analysed activity node (``gamma`` or ``best_alpha``)."""
    kind: str
    activity_ids: np.ndarray
    values: np.ndarray
    p_values: np.ndarray
    results: list = field(default_factory=list, repr=False)

    def __len__(self) -> int:
        return int(self.activity_ids.size)

    def to_csv(self, dest) -> None:
        if isinstance(dest, (str, os.PathLike)):
            with open(dest, "w", newline="", encoding="utf-8") as fh:
                return self.to_csv(fh)
        w = csv.writer(dest, lineterminator="\n")
        w.writerow(("activity_id", self.kind, "p_value"))
        for a, v, p in zip(self.activity_ids.tolist(), self.values.tolist(), self.p_values.tolist()):
            w.writerow((a, repr(v), repr(p)))


def _nodes(log: ActivityLog, population_threshold: int, stride: int) -> list[int]:
    if stride < 1:
        raise ValueError("stride must be >= 1")
    if log.user_count < population_threshold:
        raise ValueError(f"log has {log.user_count} users, below the threshold {population_threshold}")
    start = users_reaching(log, population_threshold)
    nodes = list(range(start, log.activity_count, stride))
    if nodes[-1] != log.activity_count - 1:
        nodes.append(log.activity_count - 1)
    return nodes


def per_node_fits(log: ActivityLog, population_threshold: int = 1000, stride: int = 1,
                  p_threshold: float = 0.1, n_boot: int = DEFAULT_N_BOOT, seed=0) -> NodeSeries:
    """Power-law fit of the frequency sequence up to each activity node.

    Nodes run from the first activity at which the population reaches
    ``population_threshold`` to the last activity (always included).
    A node whose fit fails is recorded with NaN values and ``None`` result.
    """
    ids, gammas, ps, fits = [], [], [], []
    for node in _nodes(log, population_threshold, stride):
        try:
            fit: PowerLawFit | None = select_xmin(frequency_sequence(log, upto=node),
                                                  p_threshold=p_threshold, n_boot=n_boot, seed=seed)
        except FitError:
            fit = None
        ids.append(node)
        gammas.append(fit.gamma if fit else math.nan)
        ps.append(fit.p_value if fit else math.nan)
        fits.append(fit)
    return NodeSeries("gamma", np.array(ids), np.array(gammas), np.array(ps), fits)


def per_node_calibration(log: ActivityLog, kernel: str = "reciprocal", population_threshold: int = 1000,
                         stride: int = 1, grid_step: float = 0.01, runs: int = 5, seed=0) -> NodeSeries:
    """Alpha calibration on the prefix ending at each activity node.

    Model sizes are re-derived from each prefix. Every node uses the same
    master seed, so the last node reproduces ``calibrate_alpha`` on the full log.
    """
    ids, alphas, ps, cals = [], [], [], []
    for node in _nodes(log, population_threshold, stride):
        cal = calibrate_alpha(prefix(log, node), kernel=kernel, grid_step=grid_step, runs=runs, seed=seed)
        ids.append(node)
        alphas.append(cal.best_alpha)
        ps.append(cal.best_p)
        cals.append(cal)
    return NodeSeries("best_alpha", np.array(ids), np.array(alphas), np.array(ps), cals)
