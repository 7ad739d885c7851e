"""Local-global search for extremal combinatorics.

Alternates problem-specific greedy local search with sampling from a small
autoregressive transformer trained on the best constructions found so far.
"""

from .core import (
    Construction,
    Pool,
    ScoredConstruction,
    ScoreOverflowError,
    ShapeError,
    pool_insert,
    pool_load,
    pool_save,
)
from .loop import GenerationStats, RunConfig, run, resume, seed_database
from .problems import PROBLEM_KINDS, make_problem

__all__ = [
    "Construction",
    "GenerationStats",
    "Pool",
    "PROBLEM_KINDS",
    "RunConfig",
    "ScoreOverflowError",
    "ScoredConstruction",
    "ShapeError",
    "make_problem",
    "pool_insert",
    "pool_load",
    "pool_save",
    "resume",
    "run",
    "seed_database",
]

__version__ = "0.1.0"
