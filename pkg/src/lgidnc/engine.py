"""One broadcast episode: uncoded initial phase, then coded recovery rounds
until the sender has heard every packet acknowledged."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelParams
from .clique import Transmission, clique_to_transmission, greedy_max_weight_clique
from .graph import GraphMode, build_graph
from .state import EntryState, FeedbackMatrix, GroundTruth

log = logging.getLogger(__name__)

ROUND_CAP_PER_PACKET = 50


@dataclass
class EpisodeConfig:
    n_users: int
    n_packets: int
    params: ChannelParams
    mode: GraphMode = GraphMode.LGIDNC
    round_cap: int | None = None
    seed: int = 0
    # Acknowledge only after a successful decode instead of on every reception.
    feedback_on_decode: bool = False
    trace: bool = False

    def __post_init__(self):
        if self.n_users < 1 or self.n_packets < 0:
            raise ValueError("need at least one user and a non-negative frame size")
        if self.params.n_users != self.n_users:
            raise ValueError("channel parameters do not match the number of users")
        self.mode = GraphMode(self.mode)

    @property
    def cap(self) -> int:
        if self.round_cap is not None:
            return self.round_cap
        return ROUND_CAP_PER_PACKET * self.n_packets


@dataclass
class DelayLedger:
    per_user: np.ndarray

    @classmethod
    def zeros(cls, n_users: int) -> DelayLedger:
        return cls(np.zeros(n_users, dtype=np.int64))

    @property
    def total(self) -> int:
        return int(self.per_user.sum())


@dataclass
class RoundOutcome:
    transmission: Transmission
    received: tuple[bool, ...]
    decoded: tuple[int | None, ...]
    delayed: tuple[bool, ...]
    feedback_heard: tuple[bool, ...]

    def __str__(self) -> str:
        targets = ",".join(f"{u}:{p}" for u, p in sorted(self.transmission.targets.items()))
        bits = lambda xs: "".join("1" if x else "0" for x in xs)
        dec = ",".join("-" if d is None else str(d) for d in self.decoded)
        return (
            f"packets={sorted(self.transmission.packets)} targets={{{targets}}} "
            f"rx={bits(self.received)} dec=[{dec}] delay={bits(self.delayed)} "
            f"fb={bits(self.feedback_heard)}"
        )


@dataclass
class EpisodeResult:
    ledger: DelayLedger
    rounds: int
    truncated: bool
    trace: list[RoundOutcome] = field(default_factory=list)


def run_initial_phase(
    cfg: EpisodeConfig, truth: GroundTruth, F: FeedbackMatrix, rng: np.random.Generator
) -> None:
    """Send every packet once, uncoded; only heard acknowledgements become Has."""
    shape = (cfg.n_packets, cfg.n_users)
    received = (rng.random(shape) >= cfg.params.p).T
    acked = (rng.random(shape) >= cfg.params.q).T & received
    truth.has |= received
    F.entries[:] = np.where(acked, EntryState.HAS, EntryState.UNCERTAIN)
    F.attempts[:] = np.where(acked, 0, 1)


def attempt_decode(truth: GroundTruth, i: int, packets) -> int | None:
    missing = [j for j in packets if not truth.has[i, j]]
    return missing[0] if len(missing) == 1 else None


def account_delay(truth: GroundTruth, i: int, received: bool, decoded: int | None) -> int:
    """Definition of decoding delay, evaluated on the state before decoding."""
    if not received or truth.has[i].all():
        return 0
    return int(decoded is None)


def run_recovery_round(
    cfg: EpisodeConfig,
    truth: GroundTruth,
    F: FeedbackMatrix,
    rng: np.random.Generator,
    ledger: DelayLedger,
) -> RoundOutcome:
    g = build_graph(F, cfg.params, cfg.mode)
    tx = clique_to_transmission(greedy_max_weight_clique(g), g)
    packets = sorted(tx.packets)

    # Fixed number of draws per round keeps the two graph modes on the same stream.
    rx_draw = rng.random(cfg.n_users)
    fb_draw = rng.random(cfg.n_users)
    received = rx_draw >= cfg.params.p

    decoded: list[int | None] = []
    delayed: list[bool] = []
    for i in range(cfg.n_users):
        d = attempt_decode(truth, i, packets) if received[i] else None
        hit = account_delay(truth, i, bool(received[i]), d)
        ledger.per_user[i] += hit
        decoded.append(d)
        delayed.append(bool(hit))
    for i, d in enumerate(decoded):
        if d is not None:
            truth.receive(i, d)

    heard = [False] * cfg.n_users
    for i, j in tx.targets.items():
        F.record_attempt(i, j)
        if received[i] and fb_draw[i] >= cfg.params.q[i]:
            if cfg.feedback_on_decode and decoded[i] is None:
                continue
            F.resolve_from_feedback(i, truth)
            heard[i] = True

    return RoundOutcome(
        transmission=tx,
        received=tuple(bool(x) for x in received),
        decoded=tuple(decoded),
        delayed=tuple(delayed),
        feedback_heard=tuple(heard),
    )


def run_episode(cfg: EpisodeConfig, rng: np.random.Generator | None = None) -> EpisodeResult:
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    truth = GroundTruth.empty(cfg.n_users, cfg.n_packets)
    F = FeedbackMatrix.all_wanted(cfg.n_users, cfg.n_packets)
    ledger = DelayLedger.zeros(cfg.n_users)
    result = EpisodeResult(ledger, 0, False)
    if cfg.n_packets == 0:
        return result

    run_initial_phase(cfg, truth, F, rng)
    while not F.is_bs_complete():
        if result.rounds >= cfg.cap:
            result.truncated = True
            log.warning("episode truncated after %d rounds", result.rounds)
            break
        outcome = run_recovery_round(cfg, truth, F, rng, ledger)
        result.rounds += 1
        if cfg.trace:
            result.trace.append(outcome)
            log.debug("round %d %s", result.rounds, outcome)
    return result
