"""Head-to-head evaluation: agents, matches and the suite runner.

The match metric is the average outcome: 1 per win, 0.5 per tie, 0 per
loss, from agent A's perspective. Colors alternate exactly half/half, each
game runs on its own derived RNG stream (so results do not depend on
execution order), and suites report mean and standard error over fully
independent repeated matches.
"""

from __future__ import annotations

import csv
import io
import json
import subprocess
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import MatchError, StateError
from .games import (BoardState, Game, apply, from_text, greedy_player,
                    legal_actions, make_game, random_player, terminal_value,
                    to_text, greedy_score)
from .mcts import MctsSearch, NetEvaluator, SearchConfig, SearchResult


class Agent:
    """A move-selection policy. Subclasses override select()."""

    name = "agent"

    def select(self, s: BoardState, rng: np.random.Generator) -> int:
        raise NotImplementedError

    def start_game(self, game: Game) -> None:
        """Called before each game; stateful agents reset here."""

    def last_search(self) -> SearchResult | None:
        return None


class RandomAgent(Agent):
    name = "random"

    def select(self, s, rng):
        return random_player(s, rng)


class GreedyAgent(Agent):
    name = "greedy"

    def select(self, s, rng):
        return greedy_player(s, rng)


class MctsAgent(Agent):
    """Network-guided searcher. Arena play defaults to greedy move choice
    (temp_moves=0); selfplay passes its own exploration schedule."""

    def __init__(self, net, cfg: SearchConfig | None = None, name: str = "mcts",
                 trace_path: str | Path | None = None):
        self.net = net
        self.cfg = cfg or SearchConfig(temp_moves=0)
        self.name = name
        self.trace_path = trace_path
        self._search: MctsSearch | None = None
        self._last: SearchResult | None = None

    def start_game(self, game: Game) -> None:
        self._search = None

    def select(self, s, rng):
        if self._search is None:
            self._search = MctsSearch(NetEvaluator(self.net), self.cfg, rng)
        result = self._search.search(s)
        self._last = result
        if self.trace_path is not None:
            record = {"ply": s.ply, "pi": result.pi.tolist(),
                      "q": result.root_q.tolist(), "n": result.root_n.tolist(),
                      "value": result.value}
            with open(self.trace_path, "a") as fh:
                fh.write(json.dumps(record) + "\n")
        return result.action

    def last_search(self) -> SearchResult | None:
        return self._last


class ExternalAgent(Agent):
    """Line-protocol subprocess: we send ``STATE\\n<board text>``, it answers
    ``MOVE <cell index | pass>``."""

    def __init__(self, command: list[str] | str, timeout: float = 30.0,
                 name: str = "external"):
        self.command = command if isinstance(command, list) else command.split()
        self.timeout = timeout
        self.name = name
        self._proc: subprocess.Popen | None = None

    def start_game(self, game: Game) -> None:
        self.close()
        self._proc = subprocess.Popen(
            self.command, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
            text=True, bufsize=1)

    def select(self, s, rng):
        if self._proc is None:
            self.start_game(s.game)
        try:
            self._proc.stdin.write("STATE\n" + to_text(s))
            self._proc.stdin.flush()
            line = self._proc.stdout.readline()
        except (BrokenPipeError, OSError) as e:
            raise MatchError(self.name, -1, f"protocol failure: {e}") from e
        if not line.startswith("MOVE "):
            raise MatchError(self.name, -1, f"bad reply {line!r}")
        token = line.split(maxsplit=1)[1].strip()
        return s.game.pass_action if token == "pass" else int(token)

    def close(self) -> None:
        if self._proc is not None:
            self._proc.terminate()
            self._proc = None


@dataclass
class MatchReport:
    games: int
    wins: int
    ties: int
    losses: int
    per_color: dict = field(default_factory=dict)
    move_logs: list | None = None

    @property
    def average_outcome(self) -> float:
        return (self.wins + 0.5 * self.ties) / self.games

    def to_dict(self) -> dict:
        return {"games": self.games, "wins": self.wins, "ties": self.ties,
                "losses": self.losses, "average_outcome": self.average_outcome,
                "per_color": self.per_color}


def play_game(dark: Agent, light: Agent, game: Game, rng: np.random.Generator,
              move_limit: int | None = None, record_moves: bool = False
              ) -> tuple[int, list[int]]:
    """One game; returns (dark-perspective result, move list).

    Games exceeding the move limit (default 4 * n^2 plies) are adjudicated
    by the sign of the tactical score.
    """
    limit = move_limit or 4 * game.n * game.n
    dark.start_game(game)
    light.start_game(game)
    s = game.initial_state()
    moves: list[int] = []
    while True:
        z = terminal_value(s)
        if z is not None:
            return z * s.to_move, moves
        if s.ply >= limit:
            score = greedy_score(s)
            adj = 0 if score == 0 else (1 if score > 0 else -1)
            return adj * s.to_move, moves
        agent = dark if s.to_move == 1 else light
        a = agent.select(s, rng)
        s = apply(s, a)
        if record_moves:
            moves.append(a)


def play_match(agent_a: Agent, agent_b: Agent, kind: str, n: int, games: int,
               rng: np.random.Generator, move_limit: int | None = None,
               game_opts: dict | None = None, record_moves: bool = False
               ) -> MatchReport:
    """Alternating-color match reported from agent A's perspective."""
    if games % 2 != 0:
        raise StateError(f"match length must be even to balance colors, got {games}")
    game = make_game(kind, n, **(game_opts or {}))
    streams = rng.spawn(games)
    wins = ties = losses = 0
    per_color = {"dark": {"wins": 0, "ties": 0, "losses": 0},
                 "light": {"wins": 0, "ties": 0, "losses": 0}}
    logs = [] if record_moves else None
    for i in range(games):
        a_is_dark = i % 2 == 0
        dark, light = (agent_a, agent_b) if a_is_dark else (agent_b, agent_a)
        try:
            z_dark, moves = play_game(dark, light, game, streams[i],
                                      move_limit, record_moves)
        except MatchError:
            raise
        except Exception as e:
            current = dark.name if a_is_dark else light.name
            raise MatchError(current, i, str(e)) from e
        z_a = z_dark if a_is_dark else -z_dark
        bucket = per_color["dark" if a_is_dark else "light"]
        if z_a > 0:
            wins += 1
            bucket["wins"] += 1
        elif z_a < 0:
            losses += 1
            bucket["losses"] += 1
        else:
            ties += 1
            bucket["ties"] += 1
        if record_moves:
            logs.append(moves)
    return MatchReport(games, wins, ties, losses, per_color, logs)


@dataclass
class SuiteRow:
    agent: str
    opponent: str
    game: str
    n: int
    games: int
    repeats: int
    mean: float
    stderr: float | None
    outcomes: tuple[float, ...]


def run_suite(manifest: list[dict], agent_factory, rng: np.random.Generator
              ) -> list[SuiteRow]:
    """Run every manifest row: repeated independent matches per board size.

    Rows carry {agent, opponent, game, sizes, games, repeats}; agent
    specifications are resolved through ``agent_factory(spec) -> Agent``.
    """
    rows: list[SuiteRow] = []
    for entry in manifest:
        sizes = entry.get("sizes") or [entry["n"]]
        repeats = int(entry.get("repeats", 1))
        games = int(entry["games"])
        for n in sizes:
            outcomes = []
            for _rep in range(repeats):
                a = agent_factory(entry["agent"])
                b = agent_factory(entry["opponent"])
                report = play_match(a, b, entry["game"], int(n), games, rng,
                                    game_opts=entry.get("game_opts"))
                outcomes.append(report.average_outcome)
            mean = float(np.mean(outcomes))
            stderr = (float(np.std(outcomes, ddof=1) / np.sqrt(repeats))
                      if repeats > 1 else None)
            rows.append(SuiteRow(agent=str(entry["agent"]), opponent=str(entry["opponent"]),
                                 game=entry["game"], n=int(n), games=games,
                                 repeats=repeats, mean=mean, stderr=stderr,
                                 outcomes=tuple(outcomes)))
    return rows


def suite_csv(rows: list[SuiteRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["agent", "opponent", "game", "n", "games", "repeats",
                     "mean", "stderr"])
    for r in rows:
        writer.writerow([r.agent, r.opponent, r.game, r.n, r.games, r.repeats,
                         f"{r.mean:.4f}", "" if r.stderr is None else f"{r.stderr:.4f}"])
    return buf.getvalue()


def suite_text(rows: list[SuiteRow]) -> str:
    lines = [f"{'agent':<24} {'opponent':<12} {'game':<8} {'n':>3} "
             f"{'games':>5} {'mean':>7} {'stderr':>7}"]
    for r in rows:
        err = "-" if r.stderr is None else f"{r.stderr:.3f}"
        lines.append(f"{r.agent:<24} {r.opponent:<12} {r.game:<8} {r.n:>3} "
                     f"{r.games:>5} {r.mean:>7.3f} {err:>7}")
    return "\n".join(lines)
