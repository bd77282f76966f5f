"""Brute-force ground truth for the extraction engines.

These routines are exhaustive and guarded: they refuse instances beyond
a hard size limit instead of approximating, because every other engine
is tested against them.
"""

from __future__ import annotations

from collections import deque

from .errors import InitLosingError, SearchSpaceTooLargeError
from .game import (
    Arena,
    MostPermissiveStrategy,
    PositionalStrategy,
    SafetyGame,
    compute_winning_region,
    most_permissive,
    prune_reachable,
    restrict_to_reachable,
    search_space_bits,
)

BRUTE_FORCE_BITS_GUARD = 24.0
LOCAL_OPTIMA_POSITION_GUARD = 18


def brute_force_min_density(
    game: SafetyGame, mp: MostPermissiveStrategy
) -> tuple[int, PositionalStrategy]:
    """Minimum density over every specialization of the most-permissive
    strategy, by exhaustive reachability-aware enumeration.

    Returns the minimum and the first witness found when branching over
    positions in index order and actions in sorted order (deterministic).
    Raises :class:`SearchSpaceTooLargeError` above the 24-bit guard.
    """
    pruned = prune_reachable(game, mp)
    mp2 = most_permissive(pruned, compute_winning_region(pruned))
    bits = search_space_bits(pruned, mp2)
    if bits > BRUTE_FORCE_BITS_GUARD:
        raise SearchSpaceTooLargeError(
            f"search space is {bits:.2f} bits, guard is {BRUTE_FORCE_BITS_GUARD}"
        )
    n = len(pruned.pos_names)
    owner = pruned.pos_owner
    out = pruned.out_edges
    init = pruned.init_index

    allowed_acts: list[tuple[tuple[int, int], ...]] = [out[v] for v in range(n)]

    best_density = n + 1
    best_choice: dict[int, int] | None = None

    def closure(choice: dict[int, int]) -> tuple[set[int], list[int]]:
        """Reachable set under partial choices plus undecided frontier."""
        seen = {init}
        queue = deque([init])
        frontier: list[int] = []
        while queue:
            v = queue.popleft()
            if owner[v] == 0:
                act = choice.get(v)
                if act is None:
                    frontier.append(v)
                    continue
                targets = [d for a, d in out[v] if a == act]
                for d in targets:
                    if d not in seen:
                        seen.add(d)
                        queue.append(d)
            else:
                for _, d in out[v]:
                    if d not in seen:
                        seen.add(d)
                        queue.append(d)
        return seen, frontier

    def rec(choice: dict[int, int]) -> None:
        nonlocal best_density, best_choice
        seen, frontier = closure(choice)
        count = sum(1 for v in seen if owner[v] == 0)
        if count >= best_density:
            return
        if not frontier:
            best_density = count
            best_choice = dict(choice)
            return
        v = min(frontier)
        for act, _ in allowed_acts[v]:
            choice[v] = act
            rec(choice)
        del choice[v]

    rec({})
    assert best_choice is not None
    witness = PositionalStrategy(
        {
            pruned.pos_names[v]: pruned.act_names[a]
            for v, a in best_choice.items()
        }
    )
    # The recorded choice map may include frontier decisions that became
    # unreachable under later decisions; trim to the reachable domain.
    return best_density, restrict_to_reachable(pruned, witness)


def _deletable_checker(game: SafetyGame, candidates: list[int]):
    """Membership oracle for 'the game stays won from init after removing
    all outgoing edges of the candidate subset', memoized by bitmask."""
    base = Arena(game)
    base_alive = base.alive
    base_cnt = base.cnt
    owner = game.pos_owner
    in_sources = game.in_sources
    init = game.init_index
    memo: dict[int, bool] = {}

    def deletable(mask: int) -> bool:
        cached = memo.get(mask)
        if cached is not None:
            return cached
        alive = base_alive.copy()
        cnt = base_cnt.copy()
        queue = deque()
        for idx, v in enumerate(candidates):
            if mask >> idx & 1 and alive[v]:
                alive[v] = False
                queue.append(v)
        ok = alive[init]
        while ok and queue:
            t = queue.popleft()
            for s in in_sources[t]:
                if not alive[s]:
                    continue
                if owner[s] == 0:
                    cnt[s] -= 1
                    if cnt[s]:
                        continue
                alive[s] = False
                if s == init:
                    ok = False
                    break
                queue.append(s)
        memo[mask] = ok
        return ok

    return deletable


def _residual_density(game: SafetyGame, deleted: set[int]) -> int:
    """Density of the smallest-action specialization once the positions
    in ``deleted`` have lost their outgoing edges."""
    arena = Arena(game)
    for v in sorted(deleted):
        if not arena.try_delete(v):
            raise AssertionError("residual density requested for an unkept deletion")
    alive = arena.alive
    owner = game.pos_owner
    out = game.out_edges
    seen = {game.init_index}
    queue = deque([game.init_index])
    count = 0
    while queue:
        v = queue.popleft()
        if owner[v] == 0:
            count += 1
            for _, d in out[v]:
                if alive[d]:
                    if d not in seen:
                        seen.add(d)
                        queue.append(d)
                    break
        else:
            for _, d in out[v]:
                if d not in seen:
                    seen.add(d)
                    queue.append(d)
    return count


def enumerate_local_optima(game: SafetyGame) -> set[int]:
    """Densities of all maximal deletable sets Z of player-0 positions.

    Z is deletable when the game stays won from init after removing all
    outgoing edges of every member; maximal means no single position can
    be added.  Guarded to at most 18 winning player-0 positions.
    """
    winning = compute_winning_region(game)
    if game.init not in winning:
        raise InitLosingError("local optima are only defined for winnable games")
    candidates = sorted(
        game.pos_index[p]
        for p in winning
        if game.pos_owner[game.pos_index[p]] == 0
    )
    n = len(candidates)
    if n > LOCAL_OPTIMA_POSITION_GUARD:
        raise SearchSpaceTooLargeError(
            f"{n} winning player-0 positions, guard is {LOCAL_OPTIMA_POSITION_GUARD}"
        )
    deletable = _deletable_checker(game, candidates)
    densities: set[int] = set()
    seen_masks: set[int] = set()

    def dfs(mask: int, start: int) -> None:
        if mask in seen_masks:
            return
        seen_masks.add(mask)
        is_maximal = True
        for idx in range(n):
            bit = 1 << idx
            if mask & bit:
                continue
            if deletable(mask | bit):
                is_maximal = False
                if idx >= start:
                    dfs(mask | bit, idx + 1)
        if is_maximal:
            deleted = {candidates[idx] for idx in range(n) if mask >> idx & 1}
            densities.add(_residual_density(game, deleted))

    dfs(0, 0)
    return densities
