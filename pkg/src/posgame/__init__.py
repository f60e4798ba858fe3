"""Maker-Breaker and strong k-vertex-connectivity games on the edges of K_n."""

from .board import Board, Owner, edge
from .engine import GameSpec, Transcript, replay, run_game, run_strong_game, run_weak_game
from .errors import BoardTooLarge, Forfeit
from .kconn import GameConstants, KConnMaker
from .kconn_strong import KConnStrongRed

__all__ = [
    "Board",
    "BoardTooLarge",
    "Forfeit",
    "GameConstants",
    "GameSpec",
    "KConnMaker",
    "KConnStrongRed",
    "Owner",
    "Transcript",
    "edge",
    "replay",
    "run_game",
    "run_strong_game",
    "run_weak_game",
]

__version__ = "0.1.0"
