"""Rule engines for Othello, Gomoku and Go plus the reference opponents.

The functional surface below delegates to the per-game engine attached to
each state; it is what the rest of the package uses.
"""

from __future__ import annotations

from ..errors import SizeError
from .base import (BoardState, Game, canonical, canonical_key, from_text,
                   to_text, DARK, LIGHT)
from .go import Go
from .gomoku import Gomoku
from .othello import Othello
from .players import greedy_player, random_player

KINDS = ("othello", "gomoku", "go")


def make_game(kind: str, n: int, *, k: int | None = None, komi: float | None = None) -> Game:
    """Build a rule engine from a kind token like ``othello``, ``gomoku:4``
    or ``go:6.5`` (suffix overrides the ``k``/``komi`` keyword)."""
    name, _, suffix = kind.partition(":")
    if name == "othello":
        return Othello(n)
    if name == "gomoku":
        if suffix:
            k = int(suffix)
        return Gomoku(n, k=5 if k is None else k)
    if name == "go":
        if suffix:
            komi = float(suffix)
        return Go(n, komi=5.5 if komi is None else komi)
    raise SizeError(f"unknown game kind {kind!r}")


def initial_state(kind: str, n: int, **params) -> BoardState:
    return make_game(kind, n, **params).initial_state()


def legal_actions(s: BoardState) -> list[int]:
    return s.game.legal_actions(s)


def apply(s: BoardState, a: int) -> BoardState:
    return s.game.apply(s, a)


def terminal_value(s: BoardState) -> int | None:
    return s.game.terminal_value(s)


def greedy_score(s: BoardState) -> float:
    return s.game.greedy_score(s)


__all__ = [
    "BoardState", "Game", "Othello", "Gomoku", "Go", "KINDS",
    "make_game", "initial_state", "legal_actions", "apply",
    "terminal_value", "greedy_score", "canonical", "canonical_key",
    "to_text", "from_text", "random_player", "greedy_player",
    "DARK", "LIGHT",
]
