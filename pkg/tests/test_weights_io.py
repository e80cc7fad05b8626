from __future__ import annotations

import numpy as np
import pytest

from graphzero import games
from graphzero.encode import encode
from graphzero.errors import ShapeError
from graphzero.nn import GinNetwork, GraphBatch, NetConfig, load_weights, save_weights


def test_save_load_round_trip(tmp_path, rng):
    cfg = NetConfig(embed_dim=8, num_layers=3, dropout=0.25)
    net = GinNetwork(cfg, rng)
    net.buffers["trunk1.bn_mean"][:] = rng.normal(size=8)
    path = tmp_path / "w.sazw"
    save_weights(net, path)
    back = load_weights(path)
    assert back.cfg.embed_dim == 8 and back.cfg.num_layers == 3
    for name, p in net.params.items():
        assert np.array_equal(back.params[name].data, p.data), name
    for name, b in net.buffers.items():
        assert np.array_equal(back.buffers[name], b), name
    # loaded network computes identical outputs
    batch = GraphBatch.build([encode(games.initial_state("othello", 6))])
    a, b = net.evaluate(batch), back.evaluate(batch)
    assert np.array_equal(a.log_policy, b.log_policy)
    assert np.array_equal(a.value, b.value)


def test_magic_and_checksum_rejected(tmp_path, rng):
    net = GinNetwork(NetConfig(embed_dim=4), rng)
    path = tmp_path / "w.sazw"
    save_weights(net, path)
    blob = bytearray(path.read_bytes())
    assert blob[:4] == b"SAZW"

    bad_magic = tmp_path / "bad_magic.sazw"
    bad_magic.write_bytes(b"XXXX" + bytes(blob[4:]))
    with pytest.raises(ShapeError, match="magic"):
        load_weights(bad_magic)

    corrupt = bytearray(blob)
    corrupt[len(corrupt) // 2] ^= 0xFF
    bad_sum = tmp_path / "corrupt.sazw"
    bad_sum.write_bytes(bytes(corrupt))
    with pytest.raises(ShapeError, match="checksum"):
        load_weights(bad_sum)


def test_architecture_mismatch_rejected(tmp_path, rng):
    net = GinNetwork(NetConfig(embed_dim=4, num_layers=2), rng)
    path = tmp_path / "w.sazw"
    save_weights(net, path)
    with pytest.raises(ShapeError, match="embed_dim"):
        load_weights(path, expect=NetConfig(embed_dim=8, num_layers=2))
    load_weights(path, expect=NetConfig(embed_dim=4, num_layers=2, dropout=0.3))


def test_float64_weights_round_trip(tmp_path, rng):
    net = GinNetwork(NetConfig(embed_dim=4, dtype="float64"), rng)
    path = tmp_path / "w64.sazw"
    save_weights(net, path)
    back = load_weights(path)
    assert back.cfg.dtype == "float64"
    assert back.params["policy.w"].data.dtype == np.float64
