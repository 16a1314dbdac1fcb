"""Uncoupled and completely uncoupled learning dynamics in repeated normal-form games."""

from . import engine, games, regret, rules
from .engine import SimConfig, Trace, batch, run, simulate
from .games import Game, builtin, load_game, save_game

__all__ = [
    "Game", "SimConfig", "Trace", "batch", "builtin", "engine", "games", "load_game",
    "regret", "rules", "run", "save_game", "simulate",
]
