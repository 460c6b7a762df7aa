"""Sender-side belief state and the simulator's ground truth.

The feedback matrix stores one of three states per (user, packet) pair
together with the number of unacknowledged attempts made since the last
feedback heard from that user.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np


class EntryState(IntEnum):
    HAS = 0
    WANTS = 1
    UNCERTAIN = 2


_SYMBOLS = {EntryState.HAS: "0", EntryState.WANTS: "1", EntryState.UNCERTAIN: "x"}
_FROM_SYMBOL = {v: k for k, v in _SYMBOLS.items()}


@dataclass
class GroundTruth:
    """Which packets each user really holds (hidden from the sender)."""

    has: np.ndarray  # (M, N) bool

    @classmethod
    def empty(cls, n_users: int, n_packets: int) -> GroundTruth:
        return cls(np.zeros((n_users, n_packets), dtype=bool))

    def missing(self, i: int) -> set[int]:
        return {int(j) for j in np.flatnonzero(~self.has[i])}

    def wants_nonempty(self) -> np.ndarray:
        return ~self.has.all(axis=1)

    def receive(self, i: int, j: int) -> None:
        self.has[i, j] = True

    def is_complete(self) -> bool:
        return bool(self.has.all())

    def copy(self) -> GroundTruth:
        return GroundTruth(self.has.copy())


@dataclass
class FeedbackMatrix:
    entries: np.ndarray  # (M, N) int8 holding EntryState values
    attempts: np.ndarray  # (M, N) int, nonzero only on UNCERTAIN entries

    @classmethod
    def all_wanted(cls, n_users: int, n_packets: int) -> FeedbackMatrix:
        return cls(
            np.full((n_users, n_packets), EntryState.WANTS, dtype=np.int8),
            np.zeros((n_users, n_packets), dtype=np.int64),
        )

    @classmethod
    def from_rows(cls, rows: list[str], attempts=None) -> FeedbackMatrix:
        """Build a matrix from strings such as ``"1x0"``.

        Uncertain entries get one attempt unless ``attempts`` is given.
        """
        if not rows:
            return cls.all_wanted(0, 0)
        entries = np.array([[_FROM_SYMBOL[c] for c in r] for r in rows], dtype=np.int8)
        if attempts is None:
            att = (entries == EntryState.UNCERTAIN).astype(np.int64)
        else:
            att = np.asarray(attempts, dtype=np.int64).copy()
        fm = cls(entries, att)
        fm.check()
        return fm

    @property
    def n_users(self) -> int:
        return self.entries.shape[0]

    @property
    def n_packets(self) -> int:
        return self.entries.shape[1]

    def state(self, i: int, j: int) -> EntryState:
        return EntryState(int(self.entries[i, j]))

    def wants_set(self, i: int) -> set[int]:
        return {int(j) for j in np.flatnonzero(self.entries[i] != EntryState.HAS)}

    def uncertain_set(self, i: int) -> set[int]:
        return {int(j) for j in np.flatnonzero(self.entries[i] == EntryState.UNCERTAIN)}

    def record_attempt(self, i: int, j: int) -> None:
        """Count one unacknowledged attempt of packet ``j`` at user ``i``.

        A certainly-wanted entry becomes uncertain: once the packet has been
        sent, silence no longer tells the sender whether it arrived.
        """
        if self.entries[i, j] == EntryState.HAS:
            raise ValueError(f"attempt on acknowledged entry ({i}, {j})")
        self.entries[i, j] = EntryState.UNCERTAIN
        self.attempts[i, j] += 1

    def resolve_from_feedback(self, i: int, truth: GroundTruth) -> None:
        self.entries[i] = np.where(truth.has[i], EntryState.HAS, EntryState.WANTS)
        self.attempts[i] = 0

    def is_bs_complete(self) -> bool:
        return bool((self.entries == EntryState.HAS).all())

    def check(self) -> None:
        unc = self.entries == EntryState.UNCERTAIN
        if (self.attempts[~unc] != 0).any():
            raise ValueError("attempt counters set on certain entries")
        if (self.attempts[unc] < 1).any():
            raise ValueError("uncertain entry without a recorded attempt")

    def copy(self) -> FeedbackMatrix:
        return FeedbackMatrix(self.entries.copy(), self.attempts.copy())

    def dump(self) -> str:
        return "\n".join(
            "".join(_SYMBOLS[EntryState(int(s))] for s in row) for row in self.entries
        )
