"""Randomized strategy extraction.

Two methods with very different cost/quality trade-offs:

* :func:`random_extract` picks one allowed action per winning player-0
  position uniformly at random and drops everything that becomes
  unreachable.
* :func:`smart_random_extract` walks the winning player-0 positions in a
  seeded random permutation and greedily leaves positions undefined
  (deletes their outgoing edges) whenever the game stays won, producing
  a locally optimal strategy in polynomial time.

Both are fully determined by the seed: permutations and draws use the
package RNG over positions sorted by id, so parse order never leaks into
results.
"""

from __future__ import annotations

import time
from collections import deque

from .errors import InitLosingError, TimeoutExceededError
from .game import (
    Arena,
    MostPermissiveStrategy,
    PositionalStrategy,
    SafetyGame,
    restrict_to_reachable,
)
from .rng import SplitMix64


def random_extract(
    game: SafetyGame, mp: MostPermissiveStrategy, seed: int
) -> PositionalStrategy:
    """Uniform random specialization of the most-permissive strategy,
    restricted to its reachable domain."""
    if game.init not in mp.winning:
        raise InitLosingError("cannot extract a strategy for a losing game")
    rng = SplitMix64(seed)
    choice: dict[str, str] = {}
    for pos in sorted(mp.allowed):
        acts = sorted(mp.allowed[pos])
        choice[pos] = acts[rng.below(len(acts))]
    return restrict_to_reachable(game, PositionalStrategy(choice))


def smart_random_extract(
    game: SafetyGame,
    winning: frozenset[str],
    seed: int,
    *,
    deadline: float | None = None,
) -> PositionalStrategy:
    """Greedy local search for a maximal set of undefined positions.

    Visits the winning player-0 positions in a seeded uniform random
    permutation; for each, tentatively deletes all its outgoing edges and
    keeps the deletion exactly when the initial position stays winning.
    Removing edges never enlarges the winning region, so each tentative
    check cascades from the current region instead of re-solving from
    scratch; a rejected deletion is rolled back.  The result is the
    smallest-action specialization of what remains, restricted to its
    reachable domain, and is locally optimal.
    """
    if game.init not in winning:
        raise InitLosingError("cannot extract a strategy for a losing game")
    rng = SplitMix64(seed)
    arena = Arena(game)
    # Indices are assigned in sorted-name order, so sorting indices is
    # sorting by id.
    order = [
        game.pos_index[p]
        for p in sorted(winning)
        if game.pos_owner[game.pos_index[p]] == 0
    ]
    rng.shuffle(order)
    for step, v in enumerate(order):
        if deadline is not None and step % 256 == 0 and time.monotonic() > deadline:
            raise TimeoutExceededError("local search deadline expired")
        arena.try_delete(v)

    alive = arena.alive
    owner = game.pos_owner
    out = game.out_edges
    choice: dict[str, str] = {}
    seen = {game.init_index}
    queue = deque([game.init_index])
    while queue:
        v = queue.popleft()
        if owner[v] == 0:
            for a, d in out[v]:
                if alive[d]:
                    choice[game.pos_names[v]] = game.act_names[a]
                    if d not in seen:
                        seen.add(d)
                        queue.append(d)
                    break
        else:
            for _, d in out[v]:
                if d not in seen:
                    seen.add(d)
                    queue.append(d)
    return PositionalStrategy(choice)


def is_locally_optimal(game: SafetyGame, strat: PositionalStrategy) -> bool:
    """True iff no reachable choice of ``strat`` can be left undefined.

    A position v of the reachable domain can be dropped when the game is
    still won from init after removing the outgoing edges of v *and* of
    every player-0 position outside the strategy's reachable domain (the
    positions the strategy already leaves undefined).  A strategy with an
    empty reachable domain is vacuously locally optimal.
    """
    domain = {game.pos_index[p] for p in strat.choice}
    undefined = [
        v
        for v in range(len(game.pos_names))
        if game.pos_owner[v] == 0 and v not in domain
    ]
    arena = Arena(game)
    for u in undefined:
        if not arena.try_delete(u):
            # The undefined set itself is not jointly deletable, so no
            # superset of it is; nothing in the domain can be dropped.
            return True
    return not any(arena.peek_delete(v) for v in sorted(domain))
