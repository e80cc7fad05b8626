"""Core board-game abstractions shared by all rule engines.

States are immutable values: ``apply`` returns a new state and never touches
its input, so states can be shared freely between search workers.

Actions are flat integers. Cell ``i`` means placing a stone at
``(i // n, i % n)``; the extra index ``n * n`` is the pass action (Go only),
which deliberately coincides with the dummy node's policy slot.
"""

from __future__ import annotations

import hashlib
from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import numpy as np

from ..errors import RuleViolation, SizeError, StateError

DARK = 1
LIGHT = -1


@dataclass(frozen=True, eq=False, repr=False)
class BoardState:
    """One position of a game. ``cells`` is an (n, n) int8 grid, read-only.

    ``history`` holds position hashes (one per ply, Go only) for superko;
    ``passes`` counts consecutive passes (Go only).
    """

    game: "Game"
    cells: np.ndarray
    to_move: int
    ply: int = 0
    passes: int = 0
    history: tuple[bytes, ...] = ()
    # memo for expensive derived values (legal actions, terminal result)
    _memo: dict = field(default_factory=dict, compare=False)

    @property
    def n(self) -> int:
        return self.game.n

    def __repr__(self) -> str:
        return f"<BoardState {self.game.kind_token()} n={self.n} to_move={self.to_move} ply={self.ply}>"


class Game(ABC):
    """Rule engine for one game at one board size."""

    kind: str = ""

    def __init__(self, n: int):
        self.n = n
        # board cells plus the pass/dummy slot
        self.action_count = n * n + 1

    @property
    def pass_action(self) -> int:
        return self.n * self.n

    def kind_token(self) -> str:
        """Identifier used in text serialization and config files."""
        return self.kind

    def has_pass(self) -> bool:
        return False

    def _make_state(self, cells: np.ndarray, to_move: int, ply: int = 0,
                    passes: int = 0, history: tuple[bytes, ...] = ()) -> BoardState:
        cells = np.asarray(cells, dtype=np.int8)
        cells.setflags(write=False)
        return BoardState(self, cells, to_move, ply, passes, history)

    @abstractmethod
    def initial_state(self) -> BoardState: ...

    @abstractmethod
    def legal_actions(self, s: BoardState) -> list[int]:
        """Sorted list of legal actions. Raises StateError on terminal states."""

    @abstractmethod
    def apply(self, s: BoardState, a: int) -> BoardState:
        """Apply ``a`` and return the successor. Raises RuleViolation if illegal."""

    @abstractmethod
    def terminal_value(self, s: BoardState) -> int | None:
        """Game result {-1, 0, +1} from ``s.to_move``'s perspective, or None."""

    @abstractmethod
    def greedy_score(self, s: BoardState) -> float:
        """Hand-coded tactical score of ``s`` from ``s.to_move``'s perspective."""

    # -- shared helpers -------------------------------------------------

    def _check_place_basic(self, s: BoardState, a: int) -> tuple[int, int]:
        if not (0 <= a < self.n * self.n):
            if a == self.pass_action and not self.has_pass():
                raise RuleViolation("pass-unsupported", f"{self.kind} has no pass action")
            raise RuleViolation("out-of-range", f"action {a} out of range for n={self.n}")
        r, c = divmod(a, self.n)
        if s.cells[r, c] != 0:
            raise RuleViolation("occupied", f"cell ({r}, {c}) is occupied")
        return r, c


def canonical(s: BoardState) -> BoardState:
    """State with the mover normalized to +1 (the network's perspective)."""
    if s.to_move == DARK:
        return s
    return s.game._make_state(s.cells * np.int8(-1), DARK, s.ply, s.passes, s.history)


def canonical_key(s: BoardState) -> bytes:
    """128-bit key of the canonical state, safe across games and sizes."""
    c = canonical(s)
    h = hashlib.blake2b(digest_size=16)
    h.update(s.game.kind_token().encode())
    h.update(np.int32(s.n).tobytes())
    h.update(np.int32(c.passes).tobytes())
    h.update(c.cells.tobytes())
    return h.digest()


_STONE_CHARS = {0: ".", DARK: "x", LIGHT: "o"}
_CHAR_STONES = {v: k for k, v in _STONE_CHARS.items()}


def to_text(s: BoardState) -> str:
    """Text form: ``<game> <n> <to_move> <ply>`` then n rows of ``.xo``.

    Go states carry a trailing ``passes=<k>`` token when nonzero. Superko
    history does not round-trip; replay move logs to reconstruct it.
    """
    head = f"{s.game.kind_token()} {s.n} {s.to_move} {s.ply}"
    if s.passes:
        head += f" passes={s.passes}"
    rows = ["".join(_STONE_CHARS[int(v)] for v in row) for row in s.cells]
    return "\n".join([head] + rows) + "\n"


def from_text(text: str) -> BoardState:
    """Parse the ``to_text`` format. Inverse of ``to_text`` up to Go history."""
    from . import make_game  # cycle: factory lives in the package root

    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty board text")
    fields = lines[0].split()
    if len(fields) < 4:
        raise ValueError(f"bad header line: {lines[0]!r}")
    kind, n, to_move, ply = fields[0], int(fields[1]), int(fields[2]), int(fields[3])
    passes = 0
    for extra in fields[4:]:
        k, _, v = extra.partition("=")
        if k == "passes":
            passes = int(v)
        else:
            raise ValueError(f"unknown header token {extra!r}")
    game = make_game(kind, n)
    if len(lines) != 1 + n:
        raise ValueError(f"expected {n} board rows, got {len(lines) - 1}")
    cells = np.zeros((n, n), dtype=np.int8)
    for r, ln in enumerate(lines[1:]):
        if len(ln) != n:
            raise ValueError(f"row {r} has length {len(ln)}, expected {n}")
        for c, ch in enumerate(ln):
            try:
                cells[r, c] = _CHAR_STONES[ch]
            except KeyError:
                raise ValueError(f"bad cell character {ch!r} at ({r}, {c})") from None
    history = ()
    if game.has_pass():
        history = (cells.tobytes(),)
    return game._make_state(cells, to_move, ply, passes, history)
