"""Board-to-graph encoding and subgraph sampling.

A board becomes a grid graph: one node per cell with feature -1/0/+1 taken
from the canonical state (mover normalized to +1), edges between horizontal
and vertical neighbors only, plus one dummy node (feature 0, appended last)
connected to every other node for long-range information flow. Every
undirected adjacency is stored as two directed entries.

Subgraphs are induced over d uniformly sampled board nodes, d itself uniform
in [(m-1)^2, m^2]; the parent dummy is never sampled and each subgraph gets
a fresh dummy of its own so the network's input contract (exactly one dummy)
holds for every graph it sees.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .games import BoardState, canonical


@dataclass(frozen=True)
class BoardGraph:
    """Graph form of a board. Node ids 0..n*n-1 are cells, the last id is the
    dummy. ``edges`` is (2, E) int32 with both directions present."""

    n: int
    num_nodes: int
    features: np.ndarray  # (num_nodes,) float32 in {-1, 0, 1}
    edges: np.ndarray     # (2, E) int32, symmetric
    dummy_index: int

    def pos_of_node(self, node: int) -> tuple[int, int]:
        if node == self.dummy_index:
            raise ValueError("dummy node has no board position")
        return divmod(node, self.n)


@dataclass(frozen=True)
class Subgraph:
    """Induced subgraph over sampled board nodes plus a fresh dummy.

    ``node_map[i]`` is the parent node id of local board node ``i``; the
    local dummy (last id) maps to the parent dummy.
    """

    parent: BoardGraph
    node_map: np.ndarray  # (d,) int32 parent ids of the sampled board nodes
    graph: BoardGraph


def _grid_edges(n: int) -> np.ndarray:
    """Directed edge list of the n x n 4-neighbor grid (both directions)."""
    idx = np.arange(n * n, dtype=np.int32).reshape(n, n)
    right = np.stack([idx[:, :-1].ravel(), idx[:, 1:].ravel()])
    down = np.stack([idx[:-1, :].ravel(), idx[1:, :].ravel()])
    one_way = np.concatenate([right, down], axis=1)
    return np.concatenate([one_way, one_way[::-1]], axis=1)


def encode(s: BoardState) -> BoardGraph:
    """Full board graph of the canonical form of ``s``."""
    n = s.n
    n2 = n * n
    feats = np.zeros(n2 + 1, dtype=np.float32)
    feats[:n2] = canonical(s).cells.ravel()
    dummy = n2
    spokes_out = np.stack([np.full(n2, dummy, dtype=np.int32),
                           np.arange(n2, dtype=np.int32)])
    edges = np.concatenate([_grid_edges(n), spokes_out, spokes_out[::-1]], axis=1)
    return BoardGraph(n=n, num_nodes=n2 + 1, features=feats, edges=edges,
                      dummy_index=dummy)


def subgraph_size_range(m: int, upper: str = "m^2") -> tuple[int, int]:
    """Inclusive [d_lo, d_hi] for subgraph sizes given the size parameter m.

    ``upper`` selects the bound: the default ``"m^2"`` or the looser
    ``"(m+1)^2"`` variant, exposed as a config override.
    """
    if upper == "m^2":
        return (m - 1) ** 2, m * m
    if upper == "(m+1)^2":
        return (m - 1) ** 2, (m + 1) ** 2
    raise ParameterError(f"unknown subgraph upper bound {upper!r}")


def sample_subgraph(g: BoardGraph, m: int, rng: np.random.Generator,
                    upper: str = "m^2") -> Subgraph:
    """Sample one induced subgraph of ``g`` with a fresh dummy appended."""
    n2 = g.num_nodes - 1
    lo, hi = subgraph_size_range(m, upper)
    if lo < 4:
        raise ParameterError(f"subgraph size parameter m={m} gives lower bound {lo} < 4")
    if hi > n2:
        raise ParameterError(f"subgraph size parameter m={m} exceeds the board ({hi} > {n2})")
    d = int(rng.integers(lo, hi + 1))
    node_map = np.sort(rng.choice(n2, size=d, replace=False)).astype(np.int32)

    # induced edges: keep parent board-to-board edges with both ends sampled
    src, dst = g.edges
    board_edge = (src != g.dummy_index) & (dst != g.dummy_index)
    local = np.full(g.num_nodes, -1, dtype=np.int32)
    local[node_map] = np.arange(d, dtype=np.int32)
    keep = board_edge & (local[src] >= 0) & (local[dst] >= 0)
    induced = np.stack([local[src[keep]], local[dst[keep]]])

    dummy = d
    spokes_out = np.stack([np.full(d, dummy, dtype=np.int32),
                           np.arange(d, dtype=np.int32)])
    edges = np.concatenate([induced, spokes_out, spokes_out[::-1]], axis=1)
    feats = np.zeros(d + 1, dtype=np.float32)
    feats[:d] = g.features[node_map]
    sub = BoardGraph(n=g.n, num_nodes=d + 1, features=feats, edges=edges,
                     dummy_index=dummy)
    return Subgraph(parent=g, node_map=node_map, graph=sub)


def dump_graph(g: BoardGraph) -> str:
    """Edge-list debug dump: one ``u v`` line per directed edge, then a
    ``# features`` block with one value per node."""
    lines = [f"{int(u)} {int(v)}" for u, v in g.edges.T]
    lines.append("# features")
    lines.extend(f"{v:g}" for v in g.features)
    return "\n".join(lines) + "\n"
