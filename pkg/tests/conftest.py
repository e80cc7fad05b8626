from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

# test-only helper modules (oracles) live next to the tests
sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)


def random_othello_board(rng: np.random.Generator, n: int) -> np.ndarray:
    """Random (not necessarily reachable) Othello position for oracle checks."""
    density = rng.uniform(0.2, 0.9)
    cells = rng.choice(np.array([-1, 0, 1], dtype=np.int8), size=(n, n),
                       p=[density / 2, 1 - density, density / 2])
    return cells


def random_othello_playout(rng: np.random.Generator, n: int, max_plies: int) -> "BoardState":
    """Reachable Othello position after a random number of random moves."""
    from graphzero import games

    s = games.initial_state("othello", n)
    for _ in range(int(rng.integers(0, max_plies + 1))):
        if games.terminal_value(s) is not None:
            break
        acts = games.legal_actions(s)
        s = games.apply(s, int(acts[rng.integers(len(acts))]))
    return s
