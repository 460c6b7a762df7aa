import numpy as np
import pytest

from lgidnc.channel import ChannelParams
from lgidnc.graph import CodingGraph, GraphMode
from lgidnc.state import EntryState, FeedbackMatrix

STATES = (EntryState.HAS, EntryState.WANTS, EntryState.UNCERTAIN)


def random_matrix(rng, n_users, n_packets, states=STATES, max_attempts=3):
    entries = rng.choice(np.array(states, dtype=np.int8), size=(n_users, n_packets))
    attempts = np.where(
        entries == EntryState.UNCERTAIN,
        rng.integers(1, max_attempts + 1, size=entries.shape),
        0,
    )
    return FeedbackMatrix(entries.astype(np.int8), attempts.astype(np.int64))


def random_params(rng, n_users, low=0.05, high=0.8):
    return ChannelParams(
        rng.uniform(low, high, n_users), rng.uniform(low, high, n_users)
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# Reconstructed motivating example: user 0 certainly wants packet 0 and is
# uncertain about packet 1, user 1 only needs packet 1; packet 2 is held by both.
SECTION4_ROWS = ["1x0", "010"]


def section4(p=0.3, q=0.6, attempts=1):
    F = FeedbackMatrix.from_rows(SECTION4_ROWS, attempts=[[0, attempts, 0], [0, 0, 0]])
    return F, ChannelParams.uniform(2, p, q)


class AbstractGraph(CodingGraph):
    """A CodingGraph with an arbitrary adjacency matrix, for solver tests."""

    def __init__(self, adj, weights):
        n = len(weights)
        super().__init__(
            users=np.arange(n), packets=np.arange(n), weights=np.asarray(weights, float),
            mode=GraphMode.GIDNC, entries=np.zeros((n, n), np.int8),
            p=np.zeros(n), phat=np.zeros((n, n)), pbar=np.zeros(n),
        )
        self._adjacency = np.asarray(adj, dtype=bool)

    def adjacent(self, v, others):
        return self._adjacency[v, np.asarray(others, dtype=np.intp)]


def random_graph(rng, n, density=None):
    density = rng.uniform(0.2, 0.9) if density is None else density
    upper = np.triu(rng.random((n, n)) < density, 1)
    return AbstractGraph(upper | upper.T, rng.random(n))


# acceptance criteria record a one-line verdict here; printed at session end
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {k}: {ACCEPTANCE[k]}")
