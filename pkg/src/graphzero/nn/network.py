"""Two-headed GIN policy/value network over packed graph batches.

Architecture, in order: three GIN layers (MLP = affine-ReLU-affine, then
ReLU, then layer normalization), concatenation of the input features with
every intermediate representation, a two-stage fully-connected trunk with
batch normalization, ReLU and dropout, then a per-node policy head
(log-softmax within each graph) and a value head (per-node affine, mean
over each graph's nodes, tanh).

The parameter count is independent of board size; only activations scale,
so one trained network runs on any board the games accept.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ..encode import BoardGraph
from ..errors import ShapeError
from . import autodiff as ad
from .autodiff import Tensor

_LN_EPS = 1e-5
_BN_EPS = 1e-5
_BN_MOMENTUM = 0.9  # running = momentum * running + (1 - momentum) * batch


@dataclass
class NetConfig:
    embed_dim: int = 512
    num_layers: int = 3
    dropout: float = 0.3
    eps_learnable: bool = False
    dtype: str = "float32"  # float64 supported for gradient checking

    @property
    def np_dtype(self):
        return np.dtype(self.dtype)

    @property
    def trunk_in(self) -> int:
        # input feature plus every GIN layer's output, concatenated
        return 1 + self.num_layers * self.embed_dim


@dataclass
class GraphBatch:
    """One or more graphs packed into contiguous node ranges."""

    features: np.ndarray      # (N, 1)
    adjacency: sp.csr_matrix  # (N, N) float64, symmetric, no self loops
    offsets: np.ndarray       # (G+1,) node range boundaries
    dummy_indices: np.ndarray  # (G,) packed dummy node ids

    @property
    def num_nodes(self) -> int:
        return self.features.shape[0]

    @property
    def num_graphs(self) -> int:
        return len(self.offsets) - 1

    @staticmethod
    def build(graphs: list[BoardGraph], dtype=np.float32) -> "GraphBatch":
        offsets = np.zeros(len(graphs) + 1, dtype=np.int64)
        for i, g in enumerate(graphs):
            offsets[i + 1] = offsets[i] + g.num_nodes
        total = int(offsets[-1])
        feats = np.concatenate([g.features for g in graphs]).astype(dtype).reshape(-1, 1)
        rows = np.concatenate([g.edges[0] + offsets[i] for i, g in enumerate(graphs)])
        cols = np.concatenate([g.edges[1] + offsets[i] for i, g in enumerate(graphs)])
        data = np.ones(len(rows), dtype=np.float64)
        adj = sp.csr_matrix((data, (rows, cols)), shape=(total, total))
        dummies = np.array([g.dummy_index + offsets[i] for i, g in enumerate(graphs)],
                           dtype=np.int64)
        return GraphBatch(feats, adj, offsets, dummies)

    def split_per_graph(self, flat: np.ndarray) -> list[np.ndarray]:
        return [flat[self.offsets[i]:self.offsets[i + 1]] for i in range(self.num_graphs)]


@dataclass
class NetOutput:
    log_policy: np.ndarray  # (N,) log-probabilities, normalized per graph
    value: np.ndarray       # (G,) in [-1, 1]


def _affine_init(rng: np.random.Generator, fan_in: int, fan_out: int, dtype) -> tuple[np.ndarray, np.ndarray]:
    bound = 1.0 / np.sqrt(fan_in)
    w = rng.uniform(-bound, bound, size=(fan_in, fan_out)).astype(dtype)
    b = rng.uniform(-bound, bound, size=(fan_out,)).astype(dtype)
    return w, b


class GinNetwork:
    """Holds all learnable parameters; forward works on any GraphBatch."""

    def __init__(self, cfg: NetConfig, rng: np.random.Generator | None = None):
        self.cfg = cfg
        rng = rng or np.random.default_rng(0)
        dt = cfg.np_dtype
        E = cfg.embed_dim
        self.params: dict[str, Tensor] = {}
        self.buffers: dict[str, np.ndarray] = {}

        def par(name: str, arr: np.ndarray) -> None:
            self.params[name] = ad.parameter(arr)

        in_dim = 1
        for i in range(cfg.num_layers):
            w1, b1 = _affine_init(rng, in_dim, E, dt)
            w2, b2 = _affine_init(rng, E, E, dt)
            par(f"gin{i}.w1", w1)
            par(f"gin{i}.b1", b1)
            par(f"gin{i}.w2", w2)
            par(f"gin{i}.b2", b2)
            par(f"gin{i}.ln_scale", np.ones(E, dtype=dt))
            par(f"gin{i}.ln_shift", np.zeros(E, dtype=dt))
            if cfg.eps_learnable:
                par(f"gin{i}.eps", np.zeros(1, dtype=dt))
            in_dim = E

        dims = [(cfg.trunk_in, E), (E, E)]
        for i, (fi, fo) in enumerate(dims, start=1):
            w, b = _affine_init(rng, fi, fo, dt)
            par(f"trunk{i}.w", w)
            par(f"trunk{i}.b", b)
            par(f"trunk{i}.bn_scale", np.ones(fo, dtype=dt))
            par(f"trunk{i}.bn_shift", np.zeros(fo, dtype=dt))
            self.buffers[f"trunk{i}.bn_mean"] = np.zeros(fo, dtype=dt)
            self.buffers[f"trunk{i}.bn_var"] = np.ones(fo, dtype=dt)

        wp, bp = _affine_init(rng, E, 1, dt)
        par("policy.w", wp)
        par("policy.b", bp)
        wv, bv = _affine_init(rng, E, 1, dt)
        par("value.w", wv)
        par("value.b", bv)

    # ------------------------------------------------------------------

    def zero_grad(self) -> None:
        for p in self.params.values():
            p.zero_grad()

    def copy(self) -> "GinNetwork":
        other = GinNetwork(self.cfg)
        for name, p in self.params.items():
            other.params[name].data = p.data.copy()
        for name, b in self.buffers.items():
            other.buffers[name] = b.copy()
        return other

    def _affine(self, x: Tensor, prefix: str) -> Tensor:
        return ad.add(ad.matmul(x, self.params[f"{prefix}.w"]), self.params[f"{prefix}.b"])

    def _gin_mlp(self, x: Tensor, i: int) -> Tensor:
        h = ad.relu(ad.add(ad.matmul(x, self.params[f"gin{i}.w1"]), self.params[f"gin{i}.b1"]))
        return ad.add(ad.matmul(h, self.params[f"gin{i}.w2"]), self.params[f"gin{i}.b2"])

    def _layer_norm(self, x: Tensor, i: int) -> Tensor:
        mu = ad.tmean(x, axis=1, keepdims=True)
        xc = ad.sub(x, mu)
        var = ad.tmean(ad.mul(xc, xc), axis=1, keepdims=True)
        y = ad.div(xc, ad.sqrt(ad.add(var, _LN_EPS)))
        return ad.add(ad.mul(y, self.params[f"gin{i}.ln_scale"]), self.params[f"gin{i}.ln_shift"])

    def _gin_layer(self, h: Tensor, adj: sp.csr_matrix, i: int) -> Tensor:
        neighbor = ad.spmm(adj, h)
        if self.cfg.eps_learnable:
            scaled = ad.mul(h, ad.add(self.params[f"gin{i}.eps"], 1.0))
        else:
            scaled = h  # eps fixed at 0
        pre = ad.add(scaled, neighbor)
        return self._layer_norm(ad.relu(self._gin_mlp(pre, i)), i)

    def _batch_norm(self, x: Tensor, stage: int, train_mode: bool) -> Tensor:
        scale = self.params[f"trunk{stage}.bn_scale"]
        shift = self.params[f"trunk{stage}.bn_shift"]
        if train_mode:
            mu = ad.tmean(x, axis=0, keepdims=True)
            xc = ad.sub(x, mu)
            var = ad.tmean(ad.mul(xc, xc), axis=0, keepdims=True)
            y = ad.div(xc, ad.sqrt(ad.add(var, _BN_EPS)))
            rm = self.buffers[f"trunk{stage}.bn_mean"]
            rv = self.buffers[f"trunk{stage}.bn_var"]
            rm *= _BN_MOMENTUM
            rm += (1.0 - _BN_MOMENTUM) * mu.data.ravel()
            rv *= _BN_MOMENTUM
            rv += (1.0 - _BN_MOMENTUM) * var.data.ravel()
        else:
            rm = self.buffers[f"trunk{stage}.bn_mean"]
            rv = self.buffers[f"trunk{stage}.bn_var"]
            y = ad.div(ad.sub(x, Tensor(rm)), Tensor(np.sqrt(rv + _BN_EPS)))
        return ad.add(ad.mul(y, scale), shift)

    def _trunk_input(self, batch: GraphBatch) -> Tensor:
        if batch.features.shape[1] != 1:
            raise ShapeError(f"expected single-channel node features, got {batch.features.shape}")
        h = Tensor(batch.features.astype(self.cfg.np_dtype, copy=False))
        hs = [h]
        for i in range(self.cfg.num_layers):
            h = self._gin_layer(h, batch.adjacency, i)
            hs.append(h)
        return ad.concat(hs, axis=1)

    def forward(self, batch: GraphBatch, train_mode: bool = False,
                rng: np.random.Generator | None = None) -> tuple[Tensor, Tensor]:
        """Returns (log_policy (N,), value (G,)) as tensors on the tape."""
        t = self._trunk_input(batch)
        for stage in (1, 2):
            t = self._affine(t, f"trunk{stage}")
            t = self._batch_norm(t, stage, train_mode)
            t = ad.relu(t)
            if train_mode and self.cfg.dropout > 0.0:
                if rng is None:
                    raise ShapeError("train-mode forward with dropout needs an rng")
                t = ad.dropout(t, self.cfg.dropout, rng)
        logits = ad.reshape(self._affine(t, "policy"), (batch.num_nodes,))
        log_policy = ad.segment_log_softmax(logits, batch.offsets)
        v_node = self._affine(t, "value")
        value = ad.reshape(ad.tanh(ad.segment_mean(v_node, batch.offsets)), (batch.num_graphs,))
        return log_policy, value

    def evaluate(self, batch: GraphBatch) -> NetOutput:
        """Inference forward: no tape, eval-mode normalization."""
        with ad.no_grad():
            log_policy, value = self.forward(batch, train_mode=False)
        return NetOutput(log_policy.data, value.data)

    def export_embeddings(self, graph: BoardGraph) -> np.ndarray:
        """Per-node concatenated representations (the trunk's input)."""
        with ad.no_grad():
            t = self._trunk_input(GraphBatch.build([graph], dtype=self.cfg.np_dtype))
        return t.data


def loss(net: GinNetwork, batch: GraphBatch, pi: np.ndarray, z: np.ndarray,
         train_mode: bool = True, rng: np.random.Generator | None = None) -> Tensor:
    """Mean over graphs of (z - v)^2 - sum_nodes pi * log_policy.

    No parameter regularization term is added (c = 0).
    """
    if pi.shape[0] != batch.num_nodes:
        raise ShapeError(f"pi has {pi.shape[0]} entries for {batch.num_nodes} nodes")
    if z.shape[0] != batch.num_graphs:
        raise ShapeError(f"z has {z.shape[0]} entries for {batch.num_graphs} graphs")
    log_policy, value = net.forward(batch, train_mode=train_mode, rng=rng)
    dt = net.cfg.np_dtype
    pi_t = Tensor(pi.astype(dt, copy=False))
    z_t = Tensor(z.astype(dt, copy=False))
    ce = ad.mul(ad.segment_sum(ad.mul(pi_t, log_policy), batch.offsets), -1.0)
    err = ad.sub(z_t, value)
    return ad.tmean(ad.add(ad.mul(err, err), ce))
