"""Memoryless erasure channels for packets and feedback."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ChannelConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ChannelParams:
    """Per-user forward (``p``) and feedback (``q``) erasure probabilities."""

    p: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        q = np.asarray(self.q, dtype=float)
        if p.shape != q.shape or p.ndim != 1:
            raise ChannelConfigError("p and q must be 1-D arrays of equal length")
        for name, arr in (("p", p), ("q", q)):
            if ((arr < 0) | (arr >= 1)).any():
                raise ChannelConfigError(f"{name} values must lie in [0, 1)")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @classmethod
    def uniform(cls, n_users: int, p: float, q: float) -> ChannelParams:
        return cls(np.full(n_users, p), np.full(n_users, q))

    @property
    def n_users(self) -> int:
        return len(self.p)


def episode_rng(*key: int) -> np.random.Generator:
    """Stream for one episode; the key is typically (root_seed, point, iteration)."""
    return np.random.default_rng(np.random.SeedSequence([int(k) for k in key]))


def sample_reception(p_i: float, rng: np.random.Generator) -> bool:
    return bool(rng.random() >= p_i)


def sample_feedback(q_i: float, rng: np.random.Generator) -> bool:
    return bool(rng.random() >= q_i)


def draw_user_probabilities(
    P: float, Q: float, halfwidth: float, n_users: int, rng: np.random.Generator
) -> ChannelParams:
    """Draw p_i ~ U(P - h, P + h) and q_i ~ U(Q - h, Q + h) for every user."""
    for name, mean in (("P", P), ("Q", Q)):
        if mean - halfwidth < 0 or mean + halfwidth >= 1:
            raise ChannelConfigError(
                f"{name}={mean} with halfwidth {halfwidth} leaves [0, 1)"
            )
    p = rng.uniform(P - halfwidth, P + halfwidth, size=n_users)
    q = rng.uniform(Q - halfwidth, Q + halfwidth, size=n_users)
    return ChannelParams(p, q)
