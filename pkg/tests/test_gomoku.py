from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from graphzero import games
from graphzero.errors import RuleViolation, SizeError, StateError


def test_empty_initial_board():
    s = games.initial_state("gomoku", 9)
    assert int(np.sum(s.cells != 0)) == 0
    assert s.to_move == 1
    assert len(games.legal_actions(s)) == 81


def test_size_and_k_validation():
    with pytest.raises(SizeError):
        games.initial_state("gomoku", 4)  # below default k=5
    with pytest.raises(SizeError):
        games.make_game("gomoku", 5, k=2)
    games.make_game("gomoku", 3, k=3)  # tic-tac-toe sized variant is fine


def test_apply_places_single_stone():
    s = games.initial_state("gomoku", 9)
    nxt = games.apply(s, 40)
    assert nxt.cells.ravel()[40] == 1
    assert int(np.sum(nxt.cells != 0)) == 1
    assert nxt.to_move == -1 and nxt.ply == 1
    with pytest.raises(RuleViolation) as e:
        games.apply(nxt, 40)
    assert e.value.rule == "occupied"


def test_five_in_row_loses_for_the_mover_facing_it():
    g = games.make_game("gomoku", 9)
    cells = np.zeros((9, 9), dtype=np.int8)
    cells[0, :5] = 1
    s = g._make_state(cells, -1)
    assert games.terminal_value(s) == -1
    s_winner_view = g._make_state(cells, 1)
    assert games.terminal_value(s_winner_view) == 1
    with pytest.raises(StateError):
        games.legal_actions(s)


def test_run_longer_than_k_still_wins():
    g = games.make_game("gomoku", 9)
    cells = np.zeros((9, 9), dtype=np.int8)
    cells[3, 1:8] = -1  # run of 7
    s = g._make_state(cells, -1)
    assert games.terminal_value(s) == 1


def test_diagonal_and_column_runs_detected():
    g = games.make_game("gomoku", 7)
    for dr, dc in [(1, 0), (1, 1), (1, -1)]:
        cells = np.zeros((7, 7), dtype=np.int8)
        r, c = (0, 0) if dc >= 0 else (0, 6)
        for i in range(5):
            cells[r + i * dr, c + i * dc] = 1
        s = g._make_state(cells, 1)
        assert games.terminal_value(s) == 1


def test_full_board_without_run_is_tie():
    g = games.make_game("gomoku", 3, k=3)
    # x o x / x o o / o x x has no 3-run for either player
    cells = np.array([[1, -1, 1], [1, -1, -1], [-1, 1, 1]], dtype=np.int8)
    s = g._make_state(cells, 1)
    assert games.terminal_value(s) == 0


def test_greedy_score_is_run_difference():
    g = games.make_game("gomoku", 9)
    cells = np.zeros((9, 9), dtype=np.int8)
    cells[0, :3] = 1
    cells[8, :2] = -1
    s = g._make_state(cells, 1)
    assert games.greedy_score(s) == 1
    assert games.greedy_score(g._make_state(cells, -1)) == -1


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_random_playouts_keep_invariants(seed):
    rng = np.random.default_rng(seed)
    s = games.initial_state("gomoku", 7)
    stones = 0
    while games.terminal_value(s) is None:
        acts = games.legal_actions(s)
        assert acts == sorted(acts)
        a = int(acts[rng.integers(len(acts))])
        before_cells = s.cells.copy()
        s = games.apply(s, a)
        stones += 1
        assert int(np.sum(s.cells != 0)) == stones
        changed = np.flatnonzero(s.cells.ravel() != before_cells.ravel())
        assert list(changed) == [a]
    # zero-sum at the end
    z = games.terminal_value(s)
    flipped = s.game._make_state(s.cells, -s.to_move)
    assert games.terminal_value(flipped) == -z
