"""Brute-force semantics for tope sequents, independent of the solver.

A sequent over interval variables is valid iff it holds under every
assignment of chain values to its variables.  A chain with n + 2 points
realizes every weak order of n variables together with the endpoints, so
exhausting such a grid is a complete decision procedure.
"""

from __future__ import annotations

import numpy as np

from sstt.cube import CVar, CZero, COne
from sstt.tope import Sequent, TAnd, TBot, TEq, TLe, TOr, TTop, Tope


def chain(points: int) -> np.ndarray:
    return np.linspace(0.0, 1.0, points)


def _eval_point(c, names: list[str], grid: np.ndarray) -> np.ndarray:
    match c:
        case CZero():
            return np.zeros(grid.shape[0])
        case COne():
            return np.ones(grid.shape[0])
        case CVar(name):
            return grid[:, names.index(name)]
    raise ValueError(f"oracle only handles interval points, got {c!r}")


def eval_tope(t: Tope, names: list[str], grid: np.ndarray) -> np.ndarray:
    """Truth value of the tope at every row of the valuation grid."""
    match t:
        case TTop():
            return np.ones(grid.shape[0], dtype=bool)
        case TBot():
            return np.zeros(grid.shape[0], dtype=bool)
        case TAnd(l, r):
            return eval_tope(l, names, grid) & eval_tope(r, names, grid)
        case TOr(l, r):
            return eval_tope(l, names, grid) | eval_tope(r, names, grid)
        case TLe(l, r):
            return _eval_point(l, names, grid) <= _eval_point(r, names, grid)
        case TEq(l, r):
            return _eval_point(l, names, grid) == _eval_point(r, names, grid)
    raise ValueError(f"unknown tope {t!r}")


def valuation_grid(n_vars: int, points: int) -> np.ndarray:
    """All assignments of chain values to n_vars variables, one per row."""
    values = chain(points)
    grids = np.meshgrid(*([values] * n_vars), indexing="ij") if n_vars else []
    if not grids:
        return np.zeros((1, 0))
    return np.stack([g.ravel() for g in grids], axis=1)


def oracle_entails(seq: Sequent, points: int | None = None) -> bool:
    names = [n for n, _ in seq.ctx]
    pts = points if points is not None else max(5, len(names) + 2)
    grid = valuation_grid(len(names), pts)
    hyp = eval_tope(seq.hyp, names, grid)
    goal = eval_tope(seq.goal, names, grid)
    return bool(np.all(goal[hyp]))
