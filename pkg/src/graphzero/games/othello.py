"""Othello (Reversi) rules at any even board size >= 4.

Legal-move generation is vectorized with directional shift masks; flip
application walks the eight rays from the placed stone. A mover with no
flipping placement is skipped internally inside ``apply`` (the turn swaps
back), so every non-terminal state offers at least one placement and the
action set always maps onto board cells.
"""

from __future__ import annotations

import numpy as np

from ..errors import RuleViolation, SizeError, StateError
from .base import DARK, LIGHT, BoardState, Game

# (dr, dc) for the eight rays
DIRECTIONS = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)]


def _shift(mask: np.ndarray, dr: int, dc: int) -> np.ndarray:
    """Translate a boolean grid by (dr, dc) without wraparound."""
    n = mask.shape[0]
    out = np.zeros_like(mask)
    rs_src = slice(max(0, -dr), n - max(0, dr))
    cs_src = slice(max(0, -dc), n - max(0, dc))
    rs_dst = slice(max(0, dr), n - max(0, -dr))
    cs_dst = slice(max(0, dc), n - max(0, -dc))
    out[rs_dst, cs_dst] = mask[rs_src, cs_src]
    return out


def _legal_mask(cells: np.ndarray, mover: int) -> np.ndarray:
    """Boolean grid of cells where ``mover`` has at least one flip."""
    n = cells.shape[0]
    own = cells == mover
    opp = cells == -mover
    empty = cells == 0
    legal = np.zeros_like(own)
    for dr, dc in DIRECTIONS:
        run = _shift(own, dr, dc) & opp
        for _ in range(n - 2):
            grown = run | (_shift(run, dr, dc) & opp)
            if grown.sum() == run.sum():
                break
            run = grown
        legal |= _shift(run, dr, dc) & empty
    return legal


class Othello(Game):
    kind = "othello"

    def __init__(self, n: int):
        if n < 4 or n % 2 != 0:
            raise SizeError(f"othello needs an even size >= 4, got {n}")
        super().__init__(n)

    def initial_state(self) -> BoardState:
        n = self.n
        cells = np.zeros((n, n), dtype=np.int8)
        h = n // 2
        cells[h - 1, h - 1] = LIGHT
        cells[h, h] = LIGHT
        cells[h - 1, h] = DARK
        cells[h, h - 1] = DARK
        return self._make_state(cells, DARK)

    def _masks(self, s: BoardState) -> tuple[np.ndarray, np.ndarray]:
        if "masks" not in s._memo:
            s._memo["masks"] = (_legal_mask(s.cells, s.to_move),
                                _legal_mask(s.cells, -s.to_move))
        return s._memo["masks"]

    def legal_actions(self, s: BoardState) -> list[int]:
        mine, theirs = self._masks(s)
        if not mine.any():
            # apply() normalizes states, so no moves for the mover means
            # neither side can move
            raise StateError("no legal actions: state is terminal")
        return [int(i) for i in np.flatnonzero(mine.ravel())]

    def _flips(self, cells: np.ndarray, a: int, mover: int) -> list[int]:
        """Flat indices of stones flipped by ``mover`` placing at ``a``."""
        n = self.n
        r0, c0 = divmod(a, n)
        flips: list[int] = []
        for dr, dc in DIRECTIONS:
            ray: list[int] = []
            r, c = r0 + dr, c0 + dc
            while 0 <= r < n and 0 <= c < n and cells[r, c] == -mover:
                ray.append(r * n + c)
                r, c = r + dr, c + dc
            if ray and 0 <= r < n and 0 <= c < n and cells[r, c] == mover:
                flips.extend(ray)
        return flips

    def apply(self, s: BoardState, a: int) -> BoardState:
        self._check_place_basic(s, a)
        flips = self._flips(s.cells, a, s.to_move)
        if not flips:
            raise RuleViolation("no-flip", f"placement {a} flips no stones")
        cells = s.cells.copy()
        flat = cells.ravel()
        flat[a] = s.to_move
        flat[flips] = s.to_move
        nxt = self._make_state(cells, -s.to_move, s.ply + 1)
        # forced internal skip: if the new mover has no flip but the old one
        # does, the turn swaps back without consuming a ply
        mine, theirs = self._masks(nxt)
        if not mine.any() and theirs.any():
            nxt = self._make_state(nxt.cells, -nxt.to_move, nxt.ply)
        return nxt

    def terminal_value(self, s: BoardState) -> int | None:
        mine, theirs = self._masks(s)
        if mine.any() or theirs.any():
            return None
        diff = int(np.sum(s.cells == s.to_move)) - int(np.sum(s.cells == -s.to_move))
        return int(np.sign(diff))

    def greedy_score(self, s: BoardState) -> float:
        return float(np.sum(s.cells == s.to_move) - np.sum(s.cells == -s.to_move))
