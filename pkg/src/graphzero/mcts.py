"""PUCT tree search guided by the graph network, with subgraph-sampled
prior refinement.

Action indexing matches the policy head: slot ``i`` is board cell ``i``
and the last slot (the dummy node's) is Pass. On expansion the full board
graph and k sampled subgraphs are evaluated in one network call; the
subgraph policies are scatter-aggregated back onto board cells (mean or
max over the times each node was sampled, zero for never-sampled nodes)
and combined with the full-graph prior as (p1 + p1*p2)/2 before masking
to legal actions and renormalizing. The two ablation modes keep only one
side: ``full-only`` uses p1, ``subgraphs-only`` uses p2.

Values are backed up mover-relative: an edge's Q is from the perspective
of the player who chose it, so the leaf value is sign-flipped wherever the
mover changes along the path (Othello's forced skips can keep the same
mover for consecutive edges).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .encode import BoardGraph, Subgraph, encode, sample_subgraph
from .errors import ParameterError, RuleViolation, StateError
from .games import BoardState, canonical_key, legal_actions, terminal_value

COMBINE_MODES = ("full+subgraphs", "full-only", "subgraphs-only")
SCATTER_MODES = ("mean", "max")


@dataclass
class SearchConfig:
    n_sim: int = 100
    c_puct: float = 1.5
    k_subgraphs: int | None = None   # None: round(n / 2)
    m: int | None = None             # None: n - 1
    combine_mode: str = "full+subgraphs"
    scatter: str = "mean"
    temp_moves: int = 25             # tau = 1 while ply < temp_moves, else 0
    subgraph_upper: str = "m^2"      # or "(m+1)^2"
    tree_reuse: bool = False
    dirichlet_eps: float = 0.0       # 0 disables root noise
    dirichlet_alpha: float = 0.3

    def __post_init__(self):
        if self.n_sim < 1:
            raise ParameterError(f"n_sim must be >= 1, got {self.n_sim}")
        if self.c_puct <= 0:
            raise ParameterError(f"c_puct must be > 0, got {self.c_puct}")
        if self.combine_mode not in COMBINE_MODES:
            raise ParameterError(f"combine_mode must be one of {COMBINE_MODES}")
        if self.scatter not in SCATTER_MODES:
            raise ParameterError(f"scatter must be one of {SCATTER_MODES}")
        if self.k_subgraphs is not None and self.k_subgraphs < 0:
            raise ParameterError("k_subgraphs must be >= 0")

    def resolved_k(self, n: int) -> int:
        """Subgraph count for an n x n board; sampling needs m >= 3."""
        if self.resolved_m(n) < 3:
            return 0
        if self.k_subgraphs is None:
            return round(n / 2)
        return self.k_subgraphs

    def resolved_m(self, n: int) -> int:
        return (n - 1) if self.m is None else self.m

    def tau_for_ply(self, ply: int) -> float:
        return 1.0 if ply < self.temp_moves else 0.0


def puct_score(q: float, p: float, n_sa: float, n_total: float, c_puct: float) -> float:
    """Q(s,a) plus the prior-weighted exploration bonus U(s,a)."""
    return q + c_puct * p * np.sqrt(n_total) / (1.0 + n_sa)


def q_update(q: float, n: float, v: float) -> float:
    """Running-mean action value update."""
    return (n * q + v) / (n + 1.0)


def combine_priors(p1: np.ndarray, p2: np.ndarray, mode: str) -> np.ndarray:
    """Raw (unmasked) prior from the full-graph and subgraph policies."""
    if mode == "full+subgraphs":
        return (p1 + p1 * p2) / 2.0
    if mode == "full-only":
        return p1.copy()
    if mode == "subgraphs-only":
        return p2.copy()
    raise ParameterError(f"unknown combine mode {mode!r}")


def scatter_subgraph_policies(subs: list[Subgraph], probs: list[np.ndarray],
                              action_count: int, mode: str) -> np.ndarray:
    """Aggregate per-subgraph policies onto parent action slots.

    Each subgraph's board nodes scatter to their parent cells and its fresh
    dummy scatters to the pass slot. ``mean`` averages over the occurrences
    of each node, ``max`` keeps the largest; unsampled nodes stay 0.
    """
    if mode == "mean":
        total = np.zeros(action_count)
        count = np.zeros(action_count)
        for sub, p in zip(subs, probs):
            slots = np.append(sub.node_map, action_count - 1)
            total[slots] += p
            count[slots] += 1
        out = np.zeros(action_count)
        hit = count > 0
        out[hit] = total[hit] / count[hit]
        return out
    out = np.zeros(action_count)
    for sub, p in zip(subs, probs):
        slots = np.append(sub.node_map, action_count - 1)
        np.maximum.at(out, slots, p)
    return out


def masked_normalize(raw: np.ndarray, legal_mask: np.ndarray) -> np.ndarray:
    """Zero illegal slots and renormalize; uniform fallback on zero mass."""
    p = np.where(legal_mask, raw, 0.0)
    total = p.sum()
    if total <= 0.0 or not np.isfinite(total):
        p = legal_mask.astype(np.float64)
        total = p.sum()
    return p / total


@dataclass
class NodeStats:
    prior: np.ndarray   # (A,) normalized over legal actions
    q: np.ndarray       # (A,) mover-relative action values
    n: np.ndarray       # (A,) visit counts
    legal: np.ndarray   # (A,) bool
    value: float        # network value estimate at expansion


@dataclass
class SearchResult:
    action: int
    pi: np.ndarray
    root_q: np.ndarray
    root_n: np.ndarray
    value: float
    tau: float


class SearchTree:
    """Statistics for one search, keyed by canonical state."""

    def __init__(self):
        self.nodes: dict[bytes, NodeStats] = {}

    def __len__(self) -> int:
        return len(self.nodes)

    def get(self, s: BoardState) -> NodeStats | None:
        return self.nodes.get(canonical_key(s))


class MctsSearch:
    """Drives simulations for one player; may keep its tree across moves."""

    def __init__(self, evaluator, cfg: SearchConfig, rng: np.random.Generator):
        self.evaluator = evaluator
        self.cfg = cfg
        self.rng = rng
        self.tree = SearchTree()

    # -- expansion -----------------------------------------------------

    def _expand(self, s: BoardState) -> NodeStats:
        cfg = self.cfg
        n = s.n
        action_count = n * n + 1
        graph = encode(s)
        k = cfg.resolved_k(n)
        m = cfg.resolved_m(n)
        subs: list[Subgraph] = []
        if cfg.combine_mode != "full-only" and k > 0:
            subs = [sample_subgraph(graph, m, self.rng, cfg.subgraph_upper)
                    for _ in range(k)]
        probs, values = self.evaluator.evaluate([graph] + [sub.graph for sub in subs])

        p1 = probs[0].astype(np.float64)
        p2 = scatter_subgraph_policies(subs, [p.astype(np.float64) for p in probs[1:]],
                                       action_count, cfg.scatter)
        raw = combine_priors(p1, p2, cfg.combine_mode)

        legal_mask = np.zeros(action_count, dtype=bool)
        legal_mask[legal_actions(s)] = True
        node = NodeStats(
            prior=masked_normalize(raw, legal_mask),
            q=np.zeros(action_count),
            n=np.zeros(action_count),
            legal=legal_mask,
            value=float(values[0]),
        )
        self.tree.nodes[canonical_key(s)] = node
        return node

    # -- selection -----------------------------------------------------

    def _select(self, node: NodeStats) -> int:
        u = self.cfg.c_puct * node.prior * np.sqrt(node.n.sum()) / (1.0 + node.n)
        scores = np.where(node.legal, node.q + u, -np.inf)
        best = scores.max()
        candidates = np.flatnonzero(scores == best)
        if len(candidates) == 1:
            return int(candidates[0])
        # break exact score ties by prior (fresh nodes have all-zero scores)
        return int(candidates[np.argmax(node.prior[candidates])])

    # -- one simulation ------------------------------------------------

    def simulate(self, root: BoardState) -> None:
        path: list[tuple[NodeStats, int, int]] = []
        s = root
        while True:
            z = terminal_value(s)
            if z is not None:
                v, leaf_mover = float(z), s.to_move
                break
            node = self.tree.get(s)
            if node is None:
                node = self._expand(s)
                v, leaf_mover = node.value, s.to_move
                break
            a = self._select(node)
            try:
                child = s.game.apply(s, a)
            except RuleViolation:
                # stored mask can be stale for Go transpositions whose
                # superko history differs; drop the action and repick
                node.legal[a] = False
                node.prior[a] = 0.0
                if not node.legal.any():
                    v, leaf_mover = float(terminal_value(s) or 0), s.to_move
                    break
                continue
            path.append((node, a, s.to_move))
            s = child
        for node, a, mover in path:
            v_edge = v if mover == leaf_mover else -v
            node.q[a] = q_update(node.q[a], node.n[a], v_edge)
            node.n[a] += 1.0

    # -- full search ---------------------------------------------------

    def ensure_root(self, root: BoardState) -> NodeStats:
        node = self.tree.get(root)
        if node is None:
            node = self._expand(root)
        if self.cfg.dirichlet_eps > 0.0:
            legal = np.flatnonzero(node.legal)
            noise = self.rng.dirichlet(np.full(len(legal), self.cfg.dirichlet_alpha))
            node.prior[legal] = ((1.0 - self.cfg.dirichlet_eps) * node.prior[legal]
                                 + self.cfg.dirichlet_eps * noise)
        return node

    def policy(self, root: BoardState, tau: float) -> np.ndarray:
        node = self.tree.get(root)
        if node is None or node.n.sum() <= 0:
            raise StateError("policy requested for an unexplored root")
        if tau == 0.0:
            pi = np.zeros_like(node.n)
            pi[int(np.argmax(node.n))] = 1.0
            return pi
        w = node.n ** (1.0 / tau)
        return w / w.sum()

    def search(self, root: BoardState) -> SearchResult:
        if terminal_value(root) is not None:
            raise StateError("search called on a terminal state")
        if not self.cfg.tree_reuse:
            self.tree = SearchTree()
        node = self.ensure_root(root)
        for _ in range(self.cfg.n_sim):
            self.simulate(root)
        tau = self.cfg.tau_for_ply(root.ply)
        pi = self.policy(root, tau)
        action = int(self.rng.choice(len(pi), p=pi))
        return SearchResult(action=action, pi=pi, root_q=node.q.copy(),
                            root_n=node.n.copy(), value=node.value, tau=tau)


def best_action(s: BoardState, evaluator, cfg: SearchConfig,
                rng: np.random.Generator) -> int:
    """One-shot search returning only the selected action."""
    return MctsSearch(evaluator, cfg, rng).search(s).action


class NetEvaluator:
    """Adapts a GinNetwork to the search's batch-evaluation interface."""

    def __init__(self, net):
        self.net = net

    def evaluate(self, graphs: list[BoardGraph]) -> tuple[list[np.ndarray], list[float]]:
        from .nn.network import GraphBatch

        batch = GraphBatch.build(graphs, dtype=self.net.cfg.np_dtype)
        out = self.net.evaluate(batch)
        probs = batch.split_per_graph(np.exp(out.log_policy))
        return probs, [float(v) for v in out.value]


class UniformEvaluator:
    """Prior-free fallback: uniform policies, zero values (for tests/play)."""

    def evaluate(self, graphs: list[BoardGraph]) -> tuple[list[np.ndarray], list[float]]:
        probs = [np.full(g.num_nodes, 1.0 / g.num_nodes) for g in graphs]
        return probs, [0.0 for _ in graphs]
