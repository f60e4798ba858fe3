"""Exceptions shared by strategies, adversaries and the referee."""


class Forfeit(Exception):
    """A strategy cannot follow its prescribed rule and gives up the game."""

    def __init__(self, reason: str, stage: str | None = None):
        super().__init__(f"[{stage}] {reason}" if stage else reason)
        self.reason = reason
        self.stage = stage


class BoardTooLarge(ValueError):
    pass


class ScriptExhausted(Exception):
    pass
