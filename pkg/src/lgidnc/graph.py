"""G-IDNC and lossy G-IDNC (LG-IDNC) coding graphs.

A vertex ``v_ij`` exists for every (user, packet) entry the sender has not
seen acknowledged.  Vertices are ordered row-major (user, then packet).
Two vertices of distinct users are adjacent when they ask for the same
packet, or when XOR-ing their packets is acceptable:

* G-IDNC: each packet is acknowledged by the other vertex's user;
* LG-IDNC: the expected pairwise delay of ``j ^ l`` does not exceed the
  expected delay of sending either packet alone.

Adjacency rows are computed on demand so that a greedy search over a large
graph never materialises the full matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .channel import ChannelParams
from .probability import (
    innovative_matrix,
    still_needs_vector,
    user_delay_single,
    user_delay_xor,
)
from .state import EntryState, FeedbackMatrix

DELAY_RTOL = 1e-9


class GraphMode(str, Enum):
    GIDNC = "GIDNC"
    LGIDNC = "LGIDNC"


def vertex_weight(v: tuple[int, int], F: FeedbackMatrix, params: ChannelParams) -> float:
    i, j = v
    phat = innovative_matrix(F, params)[i, j]
    return float((1.0 - params.p[i]) * phat)


@dataclass
class CodingGraph:
    users: np.ndarray
    packets: np.ndarray
    weights: np.ndarray
    mode: GraphMode
    entries: np.ndarray
    p: np.ndarray
    phat: np.ndarray
    pbar: np.ndarray
    _adjacency: np.ndarray | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.users)

    def vertex(self, v: int) -> tuple[int, int]:
        return int(self.users[v]), int(self.packets[v])

    def index_of(self, user: int, packet: int) -> int:
        hit = np.flatnonzero((self.users == user) & (self.packets == packet))
        if hit.size == 0:
            raise KeyError((user, packet))
        return int(hit[0])

    def adjacent(self, v: int, others: np.ndarray) -> np.ndarray:
        """Boolean mask: which vertices in ``others`` are adjacent to ``v``."""
        others = np.asarray(others, dtype=np.intp)
        i, j = self.users[v], self.packets[v]
        k, l = self.users[others], self.packets[others]
        same_packet = j == l
        if self.mode is GraphMode.GIDNC:
            combinable = (self.entries[k, j] == EntryState.HAS) & (
                self.entries[i, l] == EntryState.HAS
            )
        else:
            combinable = _lossy_combinable(self, i, j, k, l)
        return (i != k) & (same_packet | combinable)

    @property
    def adjacency(self) -> np.ndarray:
        if self._adjacency is None:
            n = len(self)
            adj = np.zeros((n, n), dtype=bool)
            idx = np.arange(n)
            for v in range(n):
                adj[v] = self.adjacent(v, idx)
            self._adjacency = adj
        return self._adjacency

    def edges(self) -> list[tuple[int, int]]:
        a, b = np.nonzero(np.triu(self.adjacency, 1))
        return list(zip(a.tolist(), b.tolist()))

    def edge_set(self) -> set[tuple[tuple[int, int], tuple[int, int]]]:
        """Edges keyed by (user, packet) pairs, comparable across graphs."""
        return {(self.vertex(a), self.vertex(b)) for a, b in self.edges()}

    def to_edge_list(self) -> str:
        lines = [f"# {self.mode.value} {len(self)} vertices; id user packet"]
        lines += [f"# {v} {u} {p}" for v, (u, p) in enumerate(zip(self.users, self.packets))]
        lines += [f"{a} {b}" for a, b in self.edges()]
        return "\n".join(lines) + "\n"


def _lossy_combinable(g: CodingGraph, i, j, k, l) -> np.ndarray:
    phat, pbar, p = g.phat, g.pbar, g.p
    d_j = user_delay_single(p[i], phat[i, j], pbar[i]) + user_delay_single(
        p[k], phat[k, j], pbar[k]
    )
    d_l = user_delay_single(p[i], phat[i, l], pbar[i]) + user_delay_single(
        p[k], phat[k, l], pbar[k]
    )
    d_x = user_delay_xor(p[i], phat[i, j], phat[i, l], pbar[i]) + user_delay_xor(
        p[k], phat[k, j], phat[k, l], pbar[k]
    )
    best_single = np.minimum(d_j, d_l)
    return d_x <= best_single + DELAY_RTOL * np.maximum(best_single, d_x)


def build_graph(F: FeedbackMatrix, params: ChannelParams, mode: GraphMode) -> CodingGraph:
    mode = GraphMode(mode)
    users, packets = np.nonzero(F.entries != EntryState.HAS)
    phat = innovative_matrix(F, params)
    weights = (1.0 - params.p[users]) * phat[users, packets]
    return CodingGraph(
        users=users,
        packets=packets,
        weights=weights,
        mode=mode,
        entries=F.entries,
        p=params.p,
        phat=phat,
        pbar=still_needs_vector(phat),
    )


def build_gidnc_graph(F: FeedbackMatrix, params: ChannelParams) -> CodingGraph:
    return build_graph(F, params, GraphMode.GIDNC)


def build_lgidnc_graph(F: FeedbackMatrix, params: ChannelParams) -> CodingGraph:
    return build_graph(F, params, GraphMode.LGIDNC)
