"""Exception types shared across the package."""

from __future__ import annotations


class GraphZeroError(Exception):
    """Base class for all package-specific errors."""


class SizeError(GraphZeroError):
    """Board size incompatible with the game's rules."""


class StateError(GraphZeroError):
    """Operation applied to a state that cannot accept it (e.g. terminal)."""


class RuleViolation(GraphZeroError):
    """Illegal action. ``rule`` names the violated rule."""

    def __init__(self, rule: str, message: str):
        super().__init__(message)
        self.rule = rule


class ShapeError(GraphZeroError):
    """Tensor/graph dimension mismatch."""


class TrainingError(GraphZeroError):
    """Non-finite gradients or other unrecoverable optimization failures."""


class ParameterError(GraphZeroError):
    """Invalid algorithm parameter (e.g. subgraph size out of range)."""


class ConfigError(GraphZeroError):
    """Configuration parse or validation failure, with source location."""

    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        loc = ""
        if key is not None:
            loc += f" (key: {key}"
            loc += f", line {line})" if line is not None else ")"
        elif line is not None:
            loc += f" (line {line})"
        super().__init__(message + loc)
        self.key = key
        self.line = line


class MatchError(GraphZeroError):
    """An agent failed during a match. Carries agent name and game index."""

    def __init__(self, agent: str, game_index: int, message: str):
        super().__init__(f"agent '{agent}' failed in game {game_index}: {message}")
        self.agent = agent
        self.game_index = game_index
