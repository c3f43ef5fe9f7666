"""Recursive games: values, strategy synthesis and verification."""

from ._rgame import (
    Game,
    RGameError,
    __version__,
    builtin,
    builtin_names,
    criterion,
    criterion_ids,
    discounted,
    load_game,
    parse_game,
    signal_builtin_names,
    signal_image,
    signal_values,
    simulate,
    synthesize,
    values,
    wasserstein,
)

__all__ = [
    "Game",
    "RGameError",
    "builtin",
    "builtin_names",
    "criterion",
    "criterion_ids",
    "discounted",
    "load_game",
    "parse_game",
    "signal_builtin_names",
    "signal_image",
    "signal_values",
    "simulate",
    "synthesize",
    "values",
    "wasserstein",
]
