"""Time-varying communication topologies and their row-stochastic matrices.

Neighbor sets are generated per iteration k; `build_matrix` turns them into
the equal-weight row-stochastic averaging matrix with entries 1/(deg_i + 1)
for each in-neighbor and the matching strictly positive diagonal.
"""

from dataclasses import dataclass

import networkx as nx
import numpy as np

from .errors import DegenerateInput, InvalidSpec

ROW_SUM_TOL = 1e-12


@dataclass(frozen=True)
class ErgodicityReport:
    """Union-graph strong-connectivity check over an iteration window.

    This is a practical proxy for strong ergodicity of the matrix sequence,
    not a proof of it.
    """

    connected: bool
    k_start: int
    window: int
    note: str = "union-graph strong connectivity; proxy, not a proof"


class TopologySequence:
    """Base class: deterministic neighbor sets N_k^i given (model, seed).

    neighbors(k, i) is the set of agents whose speed agent i receives at
    iteration k; no self-loops.
    """

    def __init__(self, n_agents, seed=0):
        if n_agents < 1:
            raise DegenerateInput(f"n_agents must be >= 1, got {n_agents}")
        self.n_agents = int(n_agents)
        self.seed = int(seed)

    def neighbors(self, k, i):
        raise NotImplementedError

    def _check_agent(self, i):
        if not 0 <= i < self.n_agents:
            raise IndexError(f"agent index {i} out of range [0, {self.n_agents})")

    def record_speeds(self, k, speeds):
        """Hook for models whose graph depends on agent motion; default no-op."""

    def build_matrix(self, k):
        """Row-stochastic P(k): eta = 1/(|N_k^i|+1) per row, diagonal 1 - deg*eta."""
        n = self.n_agents
        P = np.zeros((n, n))
        for i in range(n):
            nbrs = self.neighbors(k, i)
            eta = 1.0 / (len(nbrs) + 1)
            for j in nbrs:
                P[i, j] = eta
            P[i, i] = 1.0 - len(nbrs) * eta
        return P

    def check_ergodicity_window(self, k_start, window):
        """Strong connectivity of the directed union graph over the window."""
        if window < 1:
            raise DegenerateInput(f"window must be >= 1, got {window}")
        G = nx.DiGraph()
        G.add_nodes_from(range(self.n_agents))
        for k in range(k_start, k_start + window):
            for i in range(self.n_agents):
                for j in self.neighbors(k, i):
                    G.add_edge(j, i)  # i hears j: information flows j -> i
        connected = self.n_agents == 1 or nx.is_strongly_connected(G)
        return ErgodicityReport(connected=connected, k_start=k_start, window=window)


class CompleteTopology(TopologySequence):
    """Everyone hears everyone, at every k."""

    def neighbors(self, k, i):
        self._check_agent(i)
        return set(range(self.n_agents)) - {i}


class FixedTopology(TopologySequence):
    """Constant graph from an explicit edge list.

    Edges are undirected pairs (i, j) unless `directed`, in which case
    (src, dst) means dst hears src.
    """

    def __init__(self, n_agents, edges, directed=False, seed=0):
        super().__init__(n_agents, seed)
        self._in = [set() for _ in range(self.n_agents)]
        for a, b in edges:
            if a == b:
                raise DegenerateInput(f"self-loop ({a}, {b}) not allowed")
            if not (0 <= a < n_agents and 0 <= b < n_agents):
                raise DegenerateInput(f"edge ({a}, {b}) out of range")
            self._in[b].add(a)
            if not directed:
                self._in[a].add(b)

    def neighbors(self, k, i):
        self._check_agent(i)
        return set(self._in[i])


class LeaderStarTopology(TopologySequence):
    """Leader (agent 0) hears all; every other agent hears only the leader."""

    def neighbors(self, k, i):
        self._check_agent(i)
        if i == 0:
            return set(range(1, self.n_agents))
        return {0}


class RandomFailureTopology(TopologySequence):
    """Base graph whose links are up independently per iteration.

    Each undirected base edge is up at iteration k with probability
    `link_up_probability`, drawn from a stream derived from (seed, k) so
    replays are bit-identical and queries at distinct k are independent.
    """

    def __init__(self, n_agents, link_up_probability, base=None, seed=0):
        super().__init__(n_agents, seed)
        if not 0.0 <= link_up_probability <= 1.0:
            raise DegenerateInput(
                f"link_up_probability must be in [0, 1], got {link_up_probability}"
            )
        self.p = float(link_up_probability)
        if base is None:
            base = [
                (i, j) for i in range(n_agents) for j in range(i + 1, n_agents)
            ]
        self.base_edges = sorted(tuple(sorted(e)) for e in base)

    def _alive_edges(self, k):
        rng = np.random.default_rng([self.seed, int(k)])
        draws = rng.random(len(self.base_edges))
        return [e for e, u in zip(self.base_edges, draws) if u < self.p]

    def neighbors(self, k, i):
        self._check_agent(i)
        out = set()
        for a, b in self._alive_edges(k):
            if a == i:
                out.add(b)
            elif b == i:
                out.add(a)
        return out

    def build_matrix(self, k):
        # one failure draw per k shared by all rows
        n = self.n_agents
        alive = self._alive_edges(k)
        nbrs = [set() for _ in range(n)]
        for a, b in alive:
            nbrs[a].add(b)
            nbrs[b].add(a)
        P = np.zeros((n, n))
        for i in range(n):
            eta = 1.0 / (len(nbrs[i]) + 1)
            for j in nbrs[i]:
                P[i, j] = eta
            P[i, i] = 1.0 - len(nbrs[i]) * eta
        return P


class ProximityTopology(TopologySequence):
    """Agents on a 1-D route; links between agents within `radius` km.

    Positions advance each iteration from the speeds the simulation records
    via `record_speeds`; until a speed vector is recorded for some k the
    positions simply stay at their k=0 values. Replays that feed the same
    speed sequence reproduce the same graphs.
    """

    def __init__(self, n_agents, radius=0.05, route_span=0.5, dt_hours=1.0 / 360.0, seed=0):
        super().__init__(n_agents, seed)
        if radius <= 0:
            raise DegenerateInput(f"radius must be positive, got {radius}")
        rng = np.random.default_rng(seed)
        self.radius = float(radius)
        self.dt_hours = float(dt_hours)
        self._positions = {0: rng.uniform(0.0, route_span, n_agents)}

    def record_speeds(self, k, speeds):
        speeds = np.asarray(speeds, dtype=float)
        if len(speeds) != self.n_agents:
            raise DegenerateInput("speed vector length mismatch")
        pos = self._positions_at(k)
        self._positions[k + 1] = pos + speeds * self.dt_hours

    def _positions_at(self, k):
        kk = max(key for key in self._positions if key <= k)
        return self._positions[kk]

    def neighbors(self, k, i):
        self._check_agent(i)
        pos = self._positions_at(k)
        close = np.abs(pos - pos[i]) <= self.radius
        return {int(j) for j in np.nonzero(close)[0] if j != i}


def make_topology(spec, n_agents, seed=0):
    """Build a TopologySequence from a scenario topology spec dict."""
    model = spec.get("model")
    if model == "complete":
        return CompleteTopology(n_agents, seed=seed)
    if model == "fixed":
        if "edges" not in spec:
            raise InvalidSpec("fixed topology requires an 'edges' list")
        return FixedTopology(
            n_agents, spec["edges"], directed=spec.get("directed", False), seed=seed
        )
    if model == "leader_star":
        return LeaderStarTopology(n_agents, seed=seed)
    if model == "random_failure":
        if "link_up_probability" not in spec:
            raise InvalidSpec("random_failure topology requires 'link_up_probability'")
        base = spec.get("base")  # None means complete base graph
        return RandomFailureTopology(
            n_agents, spec["link_up_probability"], base=base, seed=seed
        )
    if model == "proximity":
        return ProximityTopology(
            n_agents,
            radius=spec.get("radius", 0.05),
            route_span=spec.get("route_span", 0.5),
            dt_hours=spec.get("dt_hours", 1.0 / 360.0),
            seed=seed,
        )
    raise InvalidSpec(f"unknown topology model {model!r}")
