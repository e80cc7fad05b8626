"""Versioned binary container for network weights.

Layout (all little-endian):
  magic "SAZW" | u16 version | arch {u32 embed_dim, u32 num_layers,
  f32 dropout, u8 eps_learnable} | u32 record count | records | checksum.

Each record: u8 kind (0 = parameter, 1 = buffer) | u16 name length | name
utf-8 | u8 dtype (0 = float32, 1 = float64) | u8 ndim | u32 dims... |
raw row-major data. The checksum is an 8-byte blake2b digest of everything
before it. The reader rejects bad magic, unknown versions, corrupt files
and mismatched architectures.
"""

from __future__ import annotations

import hashlib
import struct
from pathlib import Path

import numpy as np

from ..errors import ShapeError
from .network import GinNetwork, NetConfig

MAGIC = b"SAZW"
VERSION = 1
_DTYPES = {0: np.dtype("<f4"), 1: np.dtype("<f8")}
_DTYPE_CODES = {np.dtype("float32"): 0, np.dtype("float64"): 1}


def save_weights(net: GinNetwork, path: str | Path) -> None:
    cfg = net.cfg
    out = bytearray()
    out += MAGIC
    out += struct.pack("<H", VERSION)
    out += struct.pack("<IIfB", cfg.embed_dim, cfg.num_layers, cfg.dropout,
                       1 if cfg.eps_learnable else 0)
    records = [(0, name, p.data) for name, p in net.params.items()]
    records += [(1, name, b) for name, b in net.buffers.items()]
    out += struct.pack("<I", len(records))
    for kind, name, arr in records:
        encoded = name.encode()
        out += struct.pack("<BH", kind, len(encoded))
        out += encoded
        out += struct.pack("<BB", _DTYPE_CODES[arr.dtype], arr.ndim)
        out += struct.pack(f"<{arr.ndim}I", *arr.shape)
        out += np.ascontiguousarray(arr).astype(arr.dtype.newbyteorder("<")).tobytes()
    out += hashlib.blake2b(bytes(out), digest_size=8).digest()
    Path(path).write_bytes(bytes(out))


def _read_records(blob: bytes) -> tuple[dict, list[tuple[int, str, np.ndarray]]]:
    if len(blob) < 8 or blob[:4] != MAGIC:
        raise ShapeError("not a weights file (bad magic)")
    body, checksum = blob[:-8], blob[-8:]
    if hashlib.blake2b(body, digest_size=8).digest() != checksum:
        raise ShapeError("weights file corrupt (checksum mismatch)")
    off = 4
    (version,) = struct.unpack_from("<H", body, off)
    off += 2
    if version != VERSION:
        raise ShapeError(f"unsupported weights version {version}")
    embed_dim, num_layers, dropout, eps_learnable = struct.unpack_from("<IIfB", body, off)
    off += struct.calcsize("<IIfB")
    arch = {"embed_dim": embed_dim, "num_layers": num_layers,
            "dropout": dropout, "eps_learnable": bool(eps_learnable)}
    (count,) = struct.unpack_from("<I", body, off)
    off += 4
    records = []
    for _ in range(count):
        kind, name_len = struct.unpack_from("<BH", body, off)
        off += 3
        name = body[off:off + name_len].decode()
        off += name_len
        dtype_code, ndim = struct.unpack_from("<BB", body, off)
        off += 2
        shape = struct.unpack_from(f"<{ndim}I", body, off)
        off += 4 * ndim
        dtype = _DTYPES[dtype_code]
        nbytes = int(np.prod(shape)) * dtype.itemsize if ndim else dtype.itemsize
        arr = np.frombuffer(body, dtype=dtype, count=max(1, int(np.prod(shape))),
                            offset=off).reshape(shape).copy()
        off += nbytes
        records.append((kind, name, arr))
    return arch, records


def load_weights(path: str | Path, expect: NetConfig | None = None) -> GinNetwork:
    """Rebuild a network from a weights file.

    If ``expect`` is given, its architecture fields must match the header.
    """
    arch, records = _read_records(Path(path).read_bytes())
    if expect is not None:
        mismatches = [k for k in ("embed_dim", "num_layers", "eps_learnable")
                      if getattr(expect, k) != arch[k]]
        if abs(expect.dropout - arch["dropout"]) > 1e-6:
            mismatches.append("dropout")
        if mismatches:
            raise ShapeError(f"weights architecture mismatch on: {', '.join(mismatches)}")
    dtype = "float32"
    for kind, _name, arr in records:
        if kind == 0:
            dtype = str(arr.dtype)
            break
    cfg = NetConfig(embed_dim=arch["embed_dim"], num_layers=arch["num_layers"],
                    dropout=arch["dropout"], eps_learnable=arch["eps_learnable"],
                    dtype=dtype)
    net = GinNetwork(cfg)
    for kind, name, arr in records:
        if kind == 0:
            if name not in net.params:
                raise ShapeError(f"unexpected parameter record '{name}'")
            if net.params[name].data.shape != arr.shape:
                raise ShapeError(f"shape mismatch for '{name}'")
            net.params[name].data = arr.astype(cfg.np_dtype)
        else:
            if name not in net.buffers:
                raise ShapeError(f"unexpected buffer record '{name}'")
            net.buffers[name] = arr.astype(cfg.np_dtype)
    return net
