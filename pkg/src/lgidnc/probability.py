"""Closed-form innovativeness, finish and expected-delay probabilities.

Notation used below: ``phat`` is the probability that a packet is still
missing at a user given the sender's belief (0 for acknowledged packets,
1 for certainly wanted ones), and ``pbar`` is the probability the user
still needs at least one packet.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .channel import ChannelParams
from .state import EntryState, FeedbackMatrix


class ProbabilityDomainError(ValueError):
    pass


def innovative_probability(p: float, q: float, lam: int) -> float:
    """Posterior that a packet is still missing after ``lam`` silent attempts."""
    if lam == 0:
        return 1.0
    silent = p + (1.0 - p) * q
    if silent == 0.0:
        raise ProbabilityDomainError(
            "p = q = 0 makes an unacknowledged attempt impossible"
        )
    return (p / silent) ** lam


def effective_innovative_probability(
    state: EntryState, p: float, q: float, lam: int
) -> float:
    if state == EntryState.HAS:
        return 0.0
    if state == EntryState.WANTS:
        return 1.0
    return innovative_probability(p, q, lam)


def innovative_matrix(F: FeedbackMatrix, params: ChannelParams) -> np.ndarray:
    """Vectorised ``phat`` over the whole matrix, shape (M, N)."""
    out = (F.entries == EntryState.WANTS).astype(float)
    ii, jj = np.nonzero(F.entries == EntryState.UNCERTAIN)
    if ii.size:
        p = params.p[ii]
        silent = p + (1.0 - p) * params.q[ii]
        if (silent == 0.0).any():
            raise ProbabilityDomainError(
                "p = q = 0 makes an unacknowledged attempt impossible"
            )
        out[ii, jj] = (p / silent) ** F.attempts[ii, jj]
    return out


def still_needs_vector(phat: np.ndarray) -> np.ndarray:
    return 1.0 - np.prod(1.0 - phat, axis=1)


def still_needs_probability(F: FeedbackMatrix, i: int, params: ChannelParams) -> float:
    row = [
        effective_innovative_probability(
            F.state(i, j), params.p[i], params.q[i], int(F.attempts[i, j])
        )
        for j in range(F.n_packets)
    ]
    return float(1.0 - np.prod([1.0 - x for x in row]))


# Per-user terms.  They accept scalars or broadcastable arrays so the graph
# builder evaluates the exact same arithmetic as the scalar API.


def user_delay_single(p_i, phat_m, pbar_i):
    return (1.0 - p_i) * (1.0 - phat_m) * pbar_i


def user_delay_xor(p_i, phat_j, phat_l, pbar_i):
    both_or_neither = phat_j * phat_l + (1.0 - phat_j) * (1.0 - phat_l)
    return (1.0 - p_i) * both_or_neither * pbar_i


def _phat(F: FeedbackMatrix, params: ChannelParams, i: int, j: int) -> float:
    return effective_innovative_probability(
        F.state(i, j), params.p[i], params.q[i], int(F.attempts[i, j])
    )


def expected_pair_delay_single(
    vij: tuple[int, int],
    vkl: tuple[int, int],
    m: int,
    F: FeedbackMatrix,
    params: ChannelParams,
) -> float:
    """Expected delay for the two vertex owners when packet ``m`` is sent alone."""
    (i, j), (k, l) = vij, vkl
    if i == k or j == l:
        raise ValueError("pairwise delay needs distinct users and packets")
    if m not in (j, l):
        raise ValueError(f"packet {m} is not one of the pair ({j}, {l})")
    total = 0.0
    for u in (i, k):
        pbar = still_needs_probability(F, u, params)
        total += user_delay_single(params.p[u], _phat(F, params, u, m), pbar)
    return float(total)


def expected_pair_delay_xor(
    vij: tuple[int, int],
    vkl: tuple[int, int],
    F: FeedbackMatrix,
    params: ChannelParams,
) -> float:
    (i, j), (k, l) = vij, vkl
    if i == k or j == l:
        raise ValueError("pairwise delay needs distinct users and packets")
    total = 0.0
    for u in (i, k):
        pbar = still_needs_probability(F, u, params)
        total += user_delay_xor(
            params.p[u], _phat(F, params, u, j), _phat(F, params, u, l), pbar
        )
    return float(total)


def exactly_one_probability(probs: Iterable[float]) -> float:
    """P(exactly one success) for independent Bernoulli trials."""
    none, one = 1.0, 0.0
    for x in probs:
        none, one = none * (1.0 - x), one * (1.0 - x) + none * x
    return one


def expected_delay_combination(
    kappa: Iterable[int], i: int, F: FeedbackMatrix, params: ChannelParams
) -> float:
    """Expected delay of user ``i`` for the XOR of the packets in ``kappa``.

    Generalises the pairwise formula: the user is delayed when it receives
    the combination, it is not exactly one packet short of it, and it still
    needs something.
    """
    kappa = sorted(set(kappa))
    if not kappa:
        raise ValueError("empty packet combination")
    one = exactly_one_probability(_phat(F, params, i, j) for j in kappa)
    pbar = still_needs_probability(F, i, params)
    return float((1.0 - params.p[i]) * (1.0 - one) * pbar)


def expected_total_delay(
    kappa: Iterable[int], F: FeedbackMatrix, params: ChannelParams
) -> float:
    """Sum of :func:`expected_delay_combination` over users the sender still serves."""
    kappa = list(kappa)
    return float(
        sum(
            expected_delay_combination(kappa, i, F, params)
            for i in range(F.n_users)
            if F.wants_set(i)
        )
    )
