"""Go under Tromp-Taylor rules: area scoring, positional superko, suicide
illegal, game over after two consecutive passes. Komi defaults to 5.5 at
every size and is charged to dark.

``history`` stores one position hash per ply (plus the initial position),
which makes the superko check a simple membership test.
"""

from __future__ import annotations

import numpy as np

from ..errors import RuleViolation, SizeError, StateError
from .base import BoardState, Game

MIN_SIZE = 5


class Go(Game):
    kind = "go"

    def __init__(self, n: int, komi: float = 5.5):
        if n < MIN_SIZE:
            raise SizeError(f"go board must be at least {MIN_SIZE}, got {n}")
        super().__init__(n)
        self.komi = komi

    def kind_token(self) -> str:
        return "go" if self.komi == 5.5 else f"go:{self.komi:g}"

    def has_pass(self) -> bool:
        return True

    def initial_state(self) -> BoardState:
        cells = np.zeros((self.n, self.n), dtype=np.int8)
        return self._make_state(cells, 1, history=(cells.tobytes(),))

    def _neighbors(self, i: int) -> list[int]:
        n = self.n
        r, c = divmod(i, n)
        out = []
        if r > 0:
            out.append(i - n)
        if r < n - 1:
            out.append(i + n)
        if c > 0:
            out.append(i - 1)
        if c < n - 1:
            out.append(i + 1)
        return out

    def _group(self, flat: np.ndarray, start: int) -> tuple[list[int], bool]:
        """Connected group containing ``start`` and whether it has a liberty."""
        color = flat[start]
        stack = [start]
        seen = {start}
        group = []
        has_liberty = False
        while stack:
            i = stack.pop()
            group.append(i)
            for j in self._neighbors(i):
                v = flat[j]
                if v == 0:
                    has_liberty = True
                elif v == color and j not in seen:
                    seen.add(j)
                    stack.append(j)
        return group, has_liberty

    def _place(self, s: BoardState, a: int) -> np.ndarray:
        """Board after ``s.to_move`` plays ``a``, captures applied.

        Raises RuleViolation on occupied cells, suicide, or superko.
        """
        self._check_place_basic(s, a)
        cells = s.cells.copy()
        flat = cells.ravel()
        flat[a] = s.to_move
        for j in self._neighbors(a):
            if flat[j] == -s.to_move:
                group, alive = self._group(flat, j)
                if not alive:
                    flat[group] = 0
        _, alive = self._group(flat, a)
        if not alive:
            raise RuleViolation("suicide", f"placement {a} leaves own group without liberties")
        if "history_set" not in s._memo:
            s._memo["history_set"] = frozenset(s.history)
        if cells.tobytes() in s._memo["history_set"]:
            raise RuleViolation("superko", f"placement {a} recreates a previous position")
        return cells

    def legal_actions(self, s: BoardState) -> list[int]:
        if self.terminal_value(s) is not None:
            raise StateError("no legal actions: state is terminal")
        if "legal" not in s._memo:
            actions = []
            for a in np.flatnonzero(s.cells.ravel() == 0):
                try:
                    self._place(s, int(a))
                except RuleViolation:
                    continue
                actions.append(int(a))
            actions.append(self.pass_action)
            s._memo["legal"] = actions
        return list(s._memo["legal"])

    def apply(self, s: BoardState, a: int) -> BoardState:
        if a == self.pass_action:
            return self._make_state(s.cells, -s.to_move, s.ply + 1, s.passes + 1,
                                    s.history + (s.cells.tobytes(),))
        cells = self._place(s, a)
        return self._make_state(cells, -s.to_move, s.ply + 1, 0,
                                s.history + (cells.tobytes(),))

    def _area(self, cells: np.ndarray) -> tuple[int, int]:
        """Tromp-Taylor area (stones + exclusive territory) for dark, light."""
        flat = cells.ravel()
        n2 = flat.size
        dark = int(np.sum(flat == 1))
        light = int(np.sum(flat == -1))
        seen = np.zeros(n2, dtype=bool)
        for start in np.flatnonzero(flat == 0):
            if seen[start]:
                continue
            stack = [int(start)]
            seen[start] = True
            region = []
            touches = set()
            while stack:
                i = stack.pop()
                region.append(i)
                for j in self._neighbors(i):
                    v = flat[j]
                    if v == 0:
                        if not seen[j]:
                            seen[j] = True
                            stack.append(j)
                    else:
                        touches.add(int(v))
            if touches == {1}:
                dark += len(region)
            elif touches == {-1}:
                light += len(region)
        return dark, light

    def terminal_value(self, s: BoardState) -> int | None:
        if s.passes < 2:
            return None
        dark, light = self._area(s.cells)
        diff = dark - light - self.komi
        z_dark = 0 if diff == 0 else (1 if diff > 0 else -1)
        return z_dark * s.to_move

    def greedy_score(self, s: BoardState) -> float:
        dark, light = self._area(s.cells)
        return float((dark - light) * s.to_move)
