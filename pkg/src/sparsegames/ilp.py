"""Exact minimum-density extraction by branch-and-bound over the LP
relaxation.

Best-first search on nodes carrying variable fixings.  Each node's bound
is its LP optimum; a node is pruned once the bound rounded up reaches
the incumbent density.  Branching picks the most fractional variable
(fractional part closest to one half, smallest index on ties) and
explores the fix-to-0 child first.  The incumbent starts from the greedy
local-search heuristic, so the search is an anytime algorithm whose
candidate is always a valid winning strategy.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import TimeoutExceededError
from .game import (
    MostPermissiveStrategy,
    PositionalStrategy,
    SafetyGame,
    density,
)
from .heuristics import smart_random_extract
from .lp import (
    INTEGRALITY_EPS,
    build_relaxation,
    decode_support,
    lp_solve,
    pruned_context,
)

DEFAULT_NODE_BUDGET = 10**6


@dataclass(eq=False)
class ExactResult:
    """Outcome of an exact engine: the best strategy found, its density,
    whether optimality was certified (budget not exhausted), and how much
    work was spent."""

    strategy: PositionalStrategy
    density: int
    certified: bool
    work: int


def _ceil_eps(x: float) -> int:
    return math.ceil(x - INTEGRALITY_EPS)


def ilp_exact_extract(
    game: SafetyGame,
    mp: MostPermissiveStrategy,
    *,
    node_budget: int = DEFAULT_NODE_BUDGET,
    warm_seed: int = 0,
    deadline: float | None = None,
    stats: dict | None = None,
) -> ExactResult:
    """Minimum-density positional strategy via branch-and-bound.

    ``work`` counts LP solves.  When the node budget (or deadline) is
    exhausted the incumbent is returned with ``certified=False``.  When a
    ``stats`` dict is supplied, every expanded node is recorded there as
    (bound, zero-fixed variable indices, one-fixed variable indices).
    """
    pruned, mp2 = pruned_context(game, mp)
    problem = build_relaxation(pruned, mp2)
    n = len(problem.var_names)
    eps = INTEGRALITY_EPS

    incumbent = smart_random_extract(game, mp.winning, warm_seed)
    incumbent_density = density(game, incumbent)

    lp_solves = 0
    certified = True

    def node_bound(lo: np.ndarray, hi: np.ndarray):
        nonlocal lp_solves
        lp_solves += 1
        return lp_solve(problem.with_bounds(lo, hi))

    root_sol = node_bound(problem.lo, problem.hi)
    if root_sol.status == "infeasible":
        raise AssertionError("relaxation of a winnable game cannot be infeasible")

    # Heap entries: (bound, -depth, tiebreak counter, lo, hi, solution).
    counter = 0
    heap = [(root_sol.objective_value, 0, counter, problem.lo, problem.hi, root_sol)]
    node_log = [] if stats is not None else None
    while heap:
        bound, neg_depth, _, lo, hi, sol = heapq.heappop(heap)
        if _ceil_eps(bound) >= incumbent_density:
            break  # best-first: every remaining node is at least as bad
        if deadline is not None and time.monotonic() > deadline:
            raise TimeoutExceededError("branch-and-bound deadline expired")
        if node_log is not None:
            node_log.append(
                (
                    bound,
                    frozenset(int(i) for i in np.nonzero(hi <= 0.0)[0]),
                    frozenset(int(i) for i in np.nonzero(lo >= 1.0)[0]),
                )
            )
        v = sol.values
        fractional = [i for i in range(n) if eps < v[i] < 1.0 - eps]
        if not fractional:
            support = {i for i in range(n) if v[i] >= 1.0 - eps}
            candidate = decode_support(pruned, support)
            cand_density = density(game, candidate)
            if cand_density < incumbent_density:
                incumbent, incumbent_density = candidate, cand_density
            continue
        branch = min(fractional, key=lambda i: (abs(v[i] - 0.5), i))
        for fix_value in (0.0, 1.0):
            if lp_solves >= node_budget:
                certified = False
                break
            c_lo = lo.copy()
            c_hi = hi.copy()
            if fix_value == 0.0:
                c_hi[branch] = 0.0
            else:
                c_lo[branch] = 1.0
            child = node_bound(c_lo, c_hi)
            if child.status == "infeasible":
                continue
            if _ceil_eps(child.objective_value) >= incumbent_density:
                continue
            counter += 1
            heapq.heappush(
                heap,
                (child.objective_value, neg_depth - 1, counter, c_lo, c_hi, child),
            )
        if not certified:
            break
    if stats is not None:
        stats["nodes"] = node_log
        stats["pruned_positions"] = problem.var_names
    return ExactResult(incumbent, incumbent_density, certified, lp_solves)
