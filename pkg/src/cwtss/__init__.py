"""Exact target set selection parameterized by clique-width and maximum threshold."""

from .cwexpr import evaluate, parse_expr, to_text
from .dp import Solver, reconstruct_target_set, solve
from .graph import Graph, ThresholdMap
from .oracle import brute_force_min_target, simulate_activation

__all__ = [
    "Graph",
    "Solver",
    "ThresholdMap",
    "brute_force_min_target",
    "evaluate",
    "parse_expr",
    "reconstruct_target_set",
    "simulate_activation",
    "solve",
    "to_text",
]
