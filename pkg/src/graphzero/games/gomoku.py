"""Gomoku (five in a row, generalized to k) on any board of size n >= k.

A run of k or more stones in a row, column or diagonal wins; a full board
with no run is a tie.
"""

from __future__ import annotations

import numpy as np

from ..errors import SizeError, StateError
from .base import BoardState, Game
from .othello import _shift

# one representative per line orientation
_LINE_DIRS = [(0, 1), (1, 0), (1, 1), (1, -1)]


def _has_run(mask: np.ndarray, k: int) -> bool:
    """True if ``mask`` contains k aligned True cells in any orientation."""
    for dr, dc in _LINE_DIRS:
        window = mask
        for i in range(1, k):
            window = window & _shift(mask, -i * dr, -i * dc)
            if not window.any():
                break
        else:
            if window.any():
                return True
    return False


def _max_run(mask: np.ndarray) -> int:
    """Length of the longest aligned run of True cells."""
    best = 0
    for dr, dc in _LINE_DIRS:
        window = mask
        length = 0
        while window.any():
            length += 1
            window = window & _shift(mask, -length * dr, -length * dc)
        best = max(best, length)
    return best


class Gomoku(Game):
    kind = "gomoku"

    def __init__(self, n: int, k: int = 5):
        if k < 3:
            raise SizeError(f"gomoku needs k >= 3, got {k}")
        if n < k:
            raise SizeError(f"gomoku board must be at least k={k} wide, got {n}")
        super().__init__(n)
        self.k = k

    def kind_token(self) -> str:
        return "gomoku" if self.k == 5 else f"gomoku:{self.k}"

    def initial_state(self) -> BoardState:
        return self._make_state(np.zeros((self.n, self.n), dtype=np.int8), 1)

    def legal_actions(self, s: BoardState) -> list[int]:
        if self.terminal_value(s) is not None:
            raise StateError("no legal actions: state is terminal")
        return [int(i) for i in np.flatnonzero(s.cells.ravel() == 0)]

    def apply(self, s: BoardState, a: int) -> BoardState:
        self._check_place_basic(s, a)
        cells = s.cells.copy()
        cells.ravel()[a] = s.to_move
        return self._make_state(cells, -s.to_move, s.ply + 1)

    def terminal_value(self, s: BoardState) -> int | None:
        if "terminal" not in s._memo:
            s._memo["terminal"] = self._terminal_uncached(s)
        return s._memo["terminal"]

    def _terminal_uncached(self, s: BoardState) -> int | None:
        if _has_run(s.cells == s.to_move, self.k):
            return 1
        if _has_run(s.cells == -s.to_move, self.k):
            return -1
        if not (s.cells == 0).any():
            return 0
        return None

    def greedy_score(self, s: BoardState) -> float:
        return float(_max_run(s.cells == s.to_move) - _max_run(s.cells == -s.to_move))
