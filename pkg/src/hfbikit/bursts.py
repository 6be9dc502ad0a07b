"""Individual-level participation patterns: intervals, bursts and incentives.

A burst is a maximal run of one user's attendances in which every gap
between consecutive attended activity ids is strictly below ``delta``.
Single isolated attendances are not bursts.
"""
from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .event_log import ActivityLog, frequency_sequence, interval_sequence
from .powerlaw import DEFAULT_N_BOOT, PowerLawFit, select_xmin


@dataclass(frozen=True)
class Burst:
    user_id: int
    activity_ids: tuple
    first_incentive_position: int = 0  # 1-based; 0 means no incentive activity

    @property
    def start(self) -> int:
        return self.activity_ids[0]

    @property
    def end(self) -> int:
        return self.activity_ids[-1]

    def __len__(self) -> int:
        return len(self.activity_ids)


def loyal_users(log: ActivityLog, min_count: int = 100) -> np.ndarray:
    """Users who attended strictly more than ``min_count`` activities."""
    if len(log) == 0:
        return np.empty(0, dtype=np.int64)
    users = log.users
    return users[frequency_sequence(log) > min_count]


def fit_intervals(log: ActivityLog, user: int, p_threshold: float = 0.1,
                  n_boot: int = DEFAULT_N_BOOT, seed=0) -> PowerLawFit:
    return select_xmin(interval_sequence(log, user), p_threshold=p_threshold,
                       n_boot=n_boot, seed=seed)


def burst_spans(attended, delta: int) -> list[tuple[int, int]]:
    """Index ranges ``[i, j]`` (inclusive) of bursts within a sorted attendance array."""
    if delta < 2:
        raise ValueError(f"delta must be >= 2, got {delta}")
    acts = np.asarray(attended)
    if acts.size < 2:
        return []
    close = np.diff(acts) < delta
    # edges of runs of consecutive "close" gaps
    padded = np.concatenate(([False], close, [False])).astype(np.int8)
    edges = np.diff(padded)
    starts = np.flatnonzero(edges == 1)
    stops = np.flatnonzero(edges == -1)
    return [(int(s), int(e)) for s, e in zip(starts, stops)]


def detect_bursts(log: ActivityLog, user: int, delta: int) -> list[Burst]:
    acts = log.attendances(user)
    mask = log.incentive_mask
    out = []
    for i, j in burst_spans(acts, delta):
        run = acts[i:j + 1]
        hits = np.flatnonzero(mask[run])
        pos = int(hits[0]) + 1 if hits.size else 0
        out.append(Burst(int(user), tuple(int(a) for a in run), pos))
    return out


@dataclass(frozen=True)
class BurstTable:
    delta: int
    total_bursts: int
    position_counts: dict  # position -> number of bursts, 0 = no incentive
    bursts: tuple = ()

    def within(self, k: int) -> int:
        """Bursts whose first incentive activity sits in one of the first ``k`` positions."""
        return sum(n for pos, n in self.position_counts.items() if 1 <= pos <= k)

    def share_within(self, k: int) -> float:
        return self.within(k) / self.total_bursts if self.total_bursts else 0.0

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "total_bursts": self.total_bursts,
            "position_counts": {str(k): v for k, v in sorted(self.position_counts.items())},
            "first_1": {"count": self.within(1), "share": self.share_within(1)},
            "first_2": {"count": self.within(2), "share": self.share_within(2)},
            "first_3": {"count": self.within(3), "share": self.share_within(3)},
        }


def burst_table(log: ActivityLog, users: Iterable[int], delta: int) -> BurstTable:
    bursts = []
    for u in sorted(int(u) for u in users):
        bursts.extend(detect_bursts(log, u, delta))
    counts: dict[int, int] = {}
    for b in bursts:
        counts[b.first_incentive_position] = counts.get(b.first_incentive_position, 0) + 1
    return BurstTable(int(delta), len(bursts), counts, tuple(bursts))


def burst_baseline(log: ActivityLog) -> float:
    """Share of all activities that carry an incentive."""
    if log.activity_count == 0:
        raise ValueError("empty log")
    return len(log.incentive_set) / log.activity_count


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------
def write_table_csv(tables: list[BurstTable], dest) -> None:
    """Rows of counts and percentages by first-incentive position, one column per delta."""
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", newline="", encoding="utf-8") as fh:
            return write_table_csv(tables, fh)
    w = csv.writer(dest, lineterminator="\n")
    w.writerow(["type"] + [f"delta={t.delta}" for t in tables])
    for k in (1, 2, 3):
        w.writerow([f"first_incentive_within_{k}"]
                   + [f"{t.within(k)} ({100 * t.share_within(k):.1f}%)" for t in tables])
    w.writerow(["total_bursts"] + [t.total_bursts for t in tables])


def write_details_csv(tables: list[BurstTable], dest) -> None:
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", newline="", encoding="utf-8") as fh:
            return write_details_csv(tables, fh)
    w = csv.writer(dest, lineterminator="\n")
    w.writerow(("delta", "user_id", "start_activity", "end_activity", "length", "first_incentive_position"))
    for t in tables:
        for b in t.bursts:
            w.writerow((t.delta, b.user_id, b.start, b.end, len(b), b.first_incentive_position))


def tables_to_json(tables: list[BurstTable], **kwargs) -> str:
    return json.dumps([t.to_dict() for t in tables], **kwargs)
