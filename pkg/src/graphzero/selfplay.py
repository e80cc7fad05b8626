"""Selfplay example generation and the on-disk example format.

Each move of a selfplay game contributes one (canonical state, search
policy, outcome) triple; the final result is assigned to every example from
that example's mover's perspective once the game ends. No rotation or
reflection augmentation is generated: the network is already invariant to
those symmetries, so synthetic copies would add nothing.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .games import BoardState, Game, apply, canonical, from_text, terminal_value, to_text
from .mcts import MctsSearch, SearchConfig


@dataclass
class TrainingExample:
    state: BoardState   # canonical: mover is always +1
    pi: np.ndarray      # (n*n + 1,) float32 over action slots
    z: int              # {-1, 0, +1} from the canonical mover's perspective


def selfplay_game(game: Game, evaluator, search_cfg: SearchConfig,
                  rng: np.random.Generator) -> list[TrainingExample]:
    """Play one game where both sides share the same searcher and network."""
    search = MctsSearch(evaluator, search_cfg, rng)
    moves: list[tuple[BoardState, np.ndarray, int]] = []
    s = game.initial_state()
    while terminal_value(s) is None:
        result = search.search(s)
        moves.append((canonical(s), result.pi.astype(np.float32), s.to_move))
        s = apply(s, result.action)
    z_dark = int(terminal_value(s)) * s.to_move
    return [TrainingExample(state, pi, int(z_dark * mover))
            for state, pi, mover in moves]


# -- length-prefixed binary example records ---------------------------------

def write_examples(path: str | Path, examples: list[TrainingExample]) -> None:
    with open(path, "wb") as fh:
        fh.write(struct.pack("<I", len(examples)))
        for ex in examples:
            state_bytes = to_text(ex.state).encode()
            pi = np.asarray(ex.pi, dtype="<f4")
            payload = struct.pack("<H", len(state_bytes)) + state_bytes
            payload += struct.pack("<I", pi.size) + pi.tobytes()
            payload += struct.pack("<b", ex.z)
            fh.write(struct.pack("<I", len(payload)))
            fh.write(payload)


def read_examples(path: str | Path) -> list[TrainingExample]:
    blob = Path(path).read_bytes()
    (count,) = struct.unpack_from("<I", blob, 0)
    off = 4
    out = []
    for _ in range(count):
        (length,) = struct.unpack_from("<I", blob, off)
        off += 4
        payload = blob[off:off + length]
        off += length
        (state_len,) = struct.unpack_from("<H", payload, 0)
        pos = 2
        state = from_text(payload[pos:pos + state_len].decode())
        pos += state_len
        (pi_len,) = struct.unpack_from("<I", payload, pos)
        pos += 4
        pi = np.frombuffer(payload, dtype="<f4", count=pi_len, offset=pos).copy()
        pos += 4 * pi_len
        (z,) = struct.unpack_from("<b", payload, pos)
        out.append(TrainingExample(state, pi, int(z)))
    return out
