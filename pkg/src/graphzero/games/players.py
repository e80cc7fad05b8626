"""The two reference opponents: uniform random and one-ply greedy.

Both work unchanged at any board size. Greedy scores each child with the
game's tactical heuristic from the perspective of the player who moved and
breaks ties uniformly at random, so repeated matches do not replay one line.
"""

from __future__ import annotations

import numpy as np

from .base import BoardState


def random_player(s: BoardState, rng: np.random.Generator) -> int:
    actions = s.game.legal_actions(s)
    return int(actions[rng.integers(len(actions))])


def greedy_player(s: BoardState, rng: np.random.Generator) -> int:
    game = s.game
    actions = game.legal_actions(s)
    best_score = -np.inf
    best: list[int] = []
    for a in actions:
        child = game.apply(s, a)
        # greedy_score is mover-relative; flip unless the turn bounced back
        score = game.greedy_score(child) * (1 if child.to_move == s.to_move else -1)
        if score > best_score:
            best_score, best = score, [a]
        elif score == best_score:
            best.append(a)
    return int(best[rng.integers(len(best))])
