"""Exhaustive negamax solver used as a ground-truth oracle for tiny games.

Only suitable for games without position-repetition rules (Othello and
Gomoku); memoizes on (cells, to_move).
"""

from __future__ import annotations

from functools import lru_cache

from graphzero import games


def solve(s) -> int:
    """Game value from s.to_move's perspective under perfect play."""
    return _solve(s.game, s.cells.tobytes(), s.to_move, s)


def _solve(game, key_cells, to_move, s) -> int:
    memo = _memo(game)
    key = (key_cells, to_move)
    if key in memo:
        return memo[key]
    z = game.terminal_value(s)
    if z is not None:
        memo[key] = z
        return z
    best = -2
    for a in game.legal_actions(s):
        child = game.apply(s, a)
        v = _solve(game, child.cells.tobytes(), child.to_move, child)
        if child.to_move != s.to_move:
            v = -v
        best = max(best, v)
        if best == 1:
            break
    memo[key] = best
    return best


def optimal_actions(s) -> set[int]:
    """All actions achieving the minimax value at s."""
    game = s.game
    best = solve(s)
    out = set()
    for a in game.legal_actions(s):
        child = game.apply(s, a)
        v = solve(child)
        if child.to_move != s.to_move:
            v = -v
        if v == best:
            out.add(a)
    return out


_memos: dict[int, dict] = {}


def _memo(game) -> dict:
    return _memos.setdefault(id(game), {})
