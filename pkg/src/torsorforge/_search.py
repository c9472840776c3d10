"""Depth-first assignment search shared by homomorphism and crossed-morphism
enumeration, with optional process-level partitioning on the first generator.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

from .errors import CapacityError


class HomChecker:
    """Evaluates a word under plain generator images."""

    def __init__(self, table, inverse):
        self.table = table
        self.inverse = inverse

    def __call__(self, w, values) -> int:
        t, inv = self.table, self.inverse
        acc = 0
        for x in w:
            acc = t[acc][values[x - 1] if x > 0 else inv[values[-x - 1]]]
        return acc


class CrossedChecker:
    """Evaluates a word under the crossed extension rho(xw) = rho(x) * x.rho(w).

    ``actions[k]`` is the image array of generator k's automorphism. Inverse
    letters use rho(x^-1) = x^-1.(rho(x)^-1).
    """

    def __init__(self, table, inverse, actions, inv_actions):
        self.table = table
        self.inverse = inverse
        self.actions = actions
        self.inv_actions = inv_actions

    def __call__(self, w, values) -> int:
        t, inv = self.table, self.inverse
        acc = 0
        for x in reversed(w):
            if x > 0:
                a = self.actions[x - 1]
                r = values[x - 1]
            else:
                a = self.inv_actions[-x - 1]
                r = a[inv[values[-x - 1]]]
            acc = t[r][a[acc]]
        return acc


def search_size(candidates: Sequence[Sequence[int]]) -> int:
    size = 1
    for c in candidates:
        size *= len(c)
    return size


def search_assignments(candidates: Sequence[Sequence[int]], relators, checker, budget: int,
                       workers: int = 1) -> list[tuple[int, ...]]:
    """All value tuples (one per generator, drawn from ``candidates``) killing every relator.

    Output is in lexicographic order of candidate positions regardless of
    ``workers``.
    """
    size = search_size(candidates)
    if size > budget:
        raise CapacityError(f"search needs {size} assignments (budget {budget})", required=size)
    n = len(candidates)
    if n == 0:
        return [()] if all(checker(r, ()) == 0 for r in relators) else []
    by_level: list[list] = [[] for _ in range(n)]
    for r in relators:
        by_level[max(abs(x) for x in r) - 1].append(r)
    if workers <= 1 or len(candidates[0]) < 2:
        return _dfs(candidates, by_level, checker, None)
    jobs = [(candidates, by_level, checker, v) for v in candidates[0]]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_dfs_job, jobs))
    return [vals for part in parts for vals in part]


def _dfs_job(args):
    return _dfs(*args)


def _dfs(candidates, by_level, checker, first):
    n = len(candidates)
    values = [0] * n
    out: list[tuple[int, ...]] = []

    def rec(level):
        if level == n:
            out.append(tuple(values))
            return
        choices = candidates[level] if level or first is None else (first,)
        checks = by_level[level]
        for v in choices:
            values[level] = v
            if all(checker(r, values) == 0 for r in checks):
                rec(level + 1)

    rec(0)
    return out
