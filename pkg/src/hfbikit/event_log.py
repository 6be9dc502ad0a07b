"""Participation records: CSV ingestion, validation and per-user views.

Activity ids are consecutive integers starting at 0 in order of occurrence,
so an "interval" between two attendances is a difference of activity ids.
"""
from __future__ import annotations

import csv
import io
import os
from typing import Iterable, NamedTuple

import numpy as np

CSV_HEADER = ("participant_id", "activity_id", "team_id", "incentive")
_TRUE = {"1", "true"}
_FALSE = {"0", "false"}
NO_TEAM = -1


class LogError(ValueError):
    """Base class for invalid participation logs."""


class LogFormatError(LogError):
    """Malformed CSV content."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class DuplicateRecordError(LogError):
    pass


class NonContiguousError(LogError):
    pass


class IncentiveConflictError(LogError):
    pass


class ParticipationRecord(NamedTuple):
    participant_id: int
    activity_id: int
    team_id: int | None = None
    incentive: bool = False


class ActivityLog:
    """Immutable, validated collection of participation records.

    Records are held column-wise and sorted by ``(activity_id, participant_id)``.
    Use :meth:`from_records` or :meth:`from_arrays` to build one.
    """

    __slots__ = ("participant", "activity", "team", "activity_count", "incentive_set",
                 "_incentive_mask", "_by_user")

    def __init__(self, participant, activity, team=None, incentive_activities: Iterable[int] = ()):
        participant = np.asarray(participant, dtype=np.int64)
        activity = np.asarray(activity, dtype=np.int64)
        if participant.shape != activity.shape or participant.ndim != 1:
            raise LogError("participant and activity columns must be 1-d and equally long")
        team = (np.full(participant.shape, NO_TEAM, dtype=np.int64) if team is None
                else np.asarray(team, dtype=np.int64))
        if team.shape != participant.shape:
            raise LogError("team column has the wrong length")
        if participant.size and (participant.min() < 0 or activity.min() < 0):
            raise LogError("ids must be non-negative")

        order = np.lexsort((participant, activity))
        participant, activity, team = participant[order], activity[order], team[order]

        if participant.size > 1:
            same = (np.diff(activity) == 0) & (np.diff(participant) == 0)
            if same.any():
                k = int(np.flatnonzero(same)[0])
                raise DuplicateRecordError(
                    f"participant {participant[k]} appears twice in activity {activity[k]}")
        ids = np.unique(activity)
        if ids.size and (ids[0] != 0 or ids[-1] != ids.size - 1):
            missing = np.setdiff1d(np.arange(ids[-1] + 1), ids)
            raise NonContiguousError(
                f"activity ids must be contiguous from 0; missing {missing[:5].tolist()}")

        incentive_set = frozenset(int(a) for a in incentive_activities)
        count = int(ids.size)
        bad = [a for a in incentive_set if not 0 <= a < count]
        if bad:
            raise IncentiveConflictError(f"incentive activities {sorted(bad)[:5]} have no records")

        for arr in (participant, activity, team):
            arr.setflags(write=False)
        self.participant, self.activity, self.team = participant, activity, team
        self.activity_count = count
        self.incentive_set = incentive_set
        mask = np.zeros(count, dtype=bool)
        if incentive_set:
            mask[list(incentive_set)] = True
        mask.setflags(write=False)
        self._incentive_mask = mask
        self._by_user = None

    # -- construction -------------------------------------------------------
    @classmethod
    def from_records(cls, records: Iterable) -> "ActivityLog":
        """Build from ``ParticipationRecord``-like tuples.

        Raises
        ------
        IncentiveConflictError
            If one activity is flagged both with and without incentive.
        """
        rows = [ParticipationRecord(*r) for r in records]
        flags: dict[int, bool] = {}
        for r in rows:
            prev = flags.setdefault(r.activity_id, bool(r.incentive))
            if prev != bool(r.incentive):
                raise IncentiveConflictError(
                    f"activity {r.activity_id} has inconsistent incentive flags")
        return cls(
            [r.participant_id for r in rows],
            [r.activity_id for r in rows],
            [NO_TEAM if r.team_id is None else r.team_id for r in rows],
            [a for a, f in flags.items() if f],
        )

    @classmethod
    def from_arrays(cls, participant, activity, team=None, incentive_activities=()) -> "ActivityLog":
        return cls(participant, activity, team, incentive_activities)

    # -- views ---------------------------------------------------------------
    def __len__(self) -> int:
        return int(self.participant.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ActivityLog):
            return NotImplemented
        return (self.activity_count == other.activity_count
                and self.incentive_set == other.incentive_set
                and np.array_equal(self.participant, other.participant)
                and np.array_equal(self.activity, other.activity)
                and np.array_equal(self.team, other.team))

    __hash__ = None

    def __repr__(self) -> str:
        return (f"ActivityLog(records={len(self)}, users={self.user_count}, "
                f"activities={self.activity_count}, incentives={len(self.incentive_set)})")

    @property
    def records(self) -> list[ParticipationRecord]:
        mask = self._incentive_mask
        return [ParticipationRecord(int(p), int(a), None if t == NO_TEAM else int(t), bool(mask[a]))
                for p, a, t in zip(self.participant, self.activity, self.team)]

    @property
    def incentive_mask(self) -> np.ndarray:
        """Boolean array indexed by activity id."""
        return self._incentive_mask

    @property
    def users(self) -> np.ndarray:
        return np.unique(self.participant)

    @property
    def user_count(self) -> int:
        return int(np.unique(self.participant).size)

    def _user_index(self):
        if self._by_user is None:
            order = np.lexsort((self.activity, self.participant))
            users, starts = np.unique(self.participant[order], return_index=True)
            bounds = np.append(starts, order.size)
            acts = self.activity[order]
            self._by_user = (users, bounds, acts)
        return self._by_user

    def attendances(self, user: int) -> np.ndarray:
        """Sorted activity ids attended by ``user``."""
        users, bounds, acts = self._user_index()
        k = int(np.searchsorted(users, user))
        if k >= users.size or users[k] != user:
            raise KeyError(f"unknown participant {user}")
        return acts[bounds[k]:bounds[k + 1]]

    def attendance_lists(self) -> dict[int, np.ndarray]:
        users, bounds, acts = self._user_index()
        return {int(u): acts[bounds[i]:bounds[i + 1]] for i, u in enumerate(users)}


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------
def _parse_int(text: str, field: str, line: int) -> int:
    try:
        value = int(text)
    except ValueError:
        raise LogFormatError(f"{field} is not an integer: {text!r}", line) from None
    if value < 0:
        raise LogFormatError(f"{field} must be non-negative, got {value}", line)
    return value


def read_csv(source) -> ActivityLog:
    """Read a participation log from a path or text stream."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, newline="", encoding="utf-8") as fh:
            return read_csv(fh)

    reader = csv.reader(source)
    header = next(reader, None)
    if header is None:
        raise LogFormatError("empty file", 1)
    if tuple(h.strip() for h in header) != CSV_HEADER:
        raise LogFormatError(f"expected header {','.join(CSV_HEADER)}", 1)
    records = []
    for line, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 4:
            raise LogFormatError(f"expected 4 fields, got {len(row)}", line)
        pid = _parse_int(row[0].strip(), "participant_id", line)
        aid = _parse_int(row[1].strip(), "activity_id", line)
        team_text = row[2].strip()
        team = _parse_int(team_text, "team_id", line) if team_text else None
        flag = row[3].strip().lower()
        if flag in _TRUE:
            inc = True
        elif flag in _FALSE:
            inc = False
        else:
            raise LogFormatError(f"incentive must be one of 0,1,true,false; got {row[3]!r}", line)
        records.append(ParticipationRecord(pid, aid, team, inc))
    return ActivityLog.from_records(records)


parse_csv = read_csv


def write_csv(log: ActivityLog, dest) -> None:
    """Write ``log`` in the canonical CSV layout (rows sorted, ``0``/``1`` incentive flags)."""
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", newline="", encoding="utf-8") as fh:
            write_csv(log, fh)
        return
    buf = io.StringIO()
    buf.write(",".join(CSV_HEADER) + "\n")
    mask = log.incentive_mask
    for p, a, t in zip(log.participant.tolist(), log.activity.tolist(), log.team.tolist()):
        buf.write(f"{p},{a},{'' if t == NO_TEAM else t},{1 if mask[a] else 0}\n")
    dest.write(buf.getvalue())


# ---------------------------------------------------------------------------
# derived sequences
# ---------------------------------------------------------------------------
def _check_upto(log: ActivityLog, upto: int) -> int:
    upto = int(upto)
    if not 0 <= upto < log.activity_count:
        raise IndexError(f"activity {upto} outside [0, {log.activity_count - 1}]")
    return upto


def frequency_sequence(log: ActivityLog, upto: int | None = None) -> np.ndarray:
    """Attendance count per user over activities ``0..upto``, ordered by participant id.

    Users with no attendance in the window are omitted.
    """
    if upto is None:
        participant = log.participant
    else:
        upto = _check_upto(log, upto)
        participant = log.participant[log.activity <= upto]
    _, counts = np.unique(participant, return_counts=True)
    return counts


def interval_sequence(log: ActivityLog, user: int) -> np.ndarray:
    """First differences of the activity ids attended by ``user``."""
    acts = log.attendances(user)
    if acts.size < 2:
        raise ValueError(f"participant {user} attended {acts.size} activity; need at least 2")
    return np.diff(acts)


def prefix(log: ActivityLog, upto: int) -> ActivityLog:
    upto = _check_upto(log, upto)
    keep = log.activity <= upto
    return ActivityLog(log.participant[keep], log.activity[keep], log.team[keep],
                       [a for a in log.incentive_set if a <= upto])


def users_reaching(log: ActivityLog, population: int) -> int:
    """Smallest activity id whose prefix includes at least ``population`` distinct users."""
    first_seen = first_appearance(log)
    if population > first_seen.size:
        raise ValueError(f"log has only {first_seen.size} users, fewer than {population}")
    if population < 1:
        return 0
    return int(np.sort(first_seen)[population - 1])


def first_appearance(log: ActivityLog) -> np.ndarray:
    """Activity id of each user's first attendance, ordered by participant id."""
    users, bounds, acts = log._user_index()
    return acts[bounds[:-1]] if users.size else np.empty(0, dtype=np.int64)


def newcomer_counts(log: ActivityLog) -> tuple[np.ndarray, np.ndarray]:
    """Per-activity counts of first-time and returning participants."""
    total = np.bincount(log.activity, minlength=log.activity_count)
    new = np.bincount(first_appearance(log), minlength=log.activity_count)
    return new, total - new
