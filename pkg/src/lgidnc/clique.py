"""Transmission selection: greedy and exact maximum-weight cliques, plus an
exhaustive search over every XOR combination for small frames."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelParams
from .graph import CodingGraph
from .probability import innovative_matrix, expected_total_delay
from .state import FeedbackMatrix

EXACT_VERTEX_CAP = 20
EXHAUSTIVE_PACKET_CAP = 12


class SearchTooLarge(ValueError):
    pass


Clique = tuple[int, ...]


@dataclass(frozen=True)
class Transmission:
    packets: frozenset[int]
    targets: dict[int, int]

    def __post_init__(self):
        if not self.packets:
            raise ValueError("a transmission needs at least one packet")
        stray = set(self.targets.values()) - self.packets
        if stray:
            raise ValueError(f"intended packets {sorted(stray)} not in the combination")


def clique_weight(g: CodingGraph, c) -> float:
    return math.fsum(float(g.weights[v]) for v in c)


def is_clique(g: CodingGraph, c) -> bool:
    c = list(c)
    return all(g.adjacent(a, np.array(c[n + 1 :])).all() for n, a in enumerate(c))


def is_maximal(g: CodingGraph, c) -> bool:
    members = np.array(sorted(c), dtype=np.intp)
    rest = np.setdiff1d(np.arange(len(g)), members)
    for v in rest:
        if members.size == 0 or g.adjacent(v, members).all():
            return False
    return True


def greedy_max_weight_clique(g: CodingGraph) -> Clique:
    """Grow a maximal clique by repeatedly adding the heaviest compatible vertex.

    Ties go to the lowest vertex index.
    """
    cand = np.arange(len(g))
    chosen = []
    while cand.size:
        v = int(cand[np.argmax(g.weights[cand])])
        chosen.append(v)
        cand = cand[g.adjacent(v, cand)]
    return tuple(sorted(chosen))


def exact_max_weight_clique(g: CodingGraph, cap: int = EXACT_VERTEX_CAP) -> Clique:
    """Maximum total-weight clique; ties resolved to the lexicographically
    smallest member tuple."""
    n = len(g)
    if n > cap:
        raise SearchTooLarge(f"{n} vertices exceeds the exact-solver cap of {cap}")
    if n == 0:
        return ()
    adj = g.adjacency
    w = [float(x) for x in g.weights]
    best: list = [-1.0, ()]

    def expand(current: list[int], cand: list[int]):
        weight = math.fsum(w[v] for v in current)
        key = tuple(current)
        if key and (weight > best[0] or (weight == best[0] and key < best[1])):
            best[0], best[1] = weight, key
        if weight + math.fsum(w[v] for v in cand) < best[0] - 1e-9:
            return
        for pos, v in enumerate(cand):
            expand(current + [v], [u for u in cand[pos + 1 :] if adj[v, u]])

    expand([], list(range(n)))
    return best[1]


def clique_to_transmission(c: Clique, g: CodingGraph) -> Transmission:
    if not c:
        raise ValueError("cannot encode an empty clique")
    targets = {}
    for v in c:
        user, packet = g.vertex(v)
        if user in targets:
            raise ValueError(f"user {user} appears twice in the clique")
        targets[user] = packet
    return Transmission(frozenset(targets.values()), targets)


def exhaustive_best_combination(
    F: FeedbackMatrix, params: ChannelParams, cap: int = EXHAUSTIVE_PACKET_CAP
) -> Transmission:
    """Minimise the expected total delay over every non-empty packet subset.

    Ties (relative 1e-9) prefer fewer packets, then the lexicographically
    smallest subset.  Each user is targeted with the packet of the subset it
    most probably lacks, if it lacks any according to the sender.
    """
    n = F.n_packets
    if n > cap:
        raise SearchTooLarge(f"{n} packets exceeds the exhaustive cap of {cap}")
    if n == 0:
        raise ValueError("empty frame")
    scored = []
    for size in range(1, n + 1):
        for subset in itertools.combinations(range(n), size):
            scored.append((expected_total_delay(subset, F, params), subset))
    lowest = min(d for d, _ in scored)
    ties = [s for d, s in scored if d <= lowest + 1e-9 * max(lowest, d)]
    best = min(ties, key=lambda s: (len(s), s))

    phat = innovative_matrix(F, params)
    targets = {}
    for i in range(F.n_users):
        wanted = [j for j in best if j in F.wants_set(i)]
        if wanted:
            targets[i] = max(wanted, key=lambda j: (phat[i, j], -j))
    return Transmission(frozenset(best), targets)
