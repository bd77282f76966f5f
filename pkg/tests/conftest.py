"""Shared test helpers: independent reference implementations and game
corpora used as oracles across the suite."""

from __future__ import annotations

import sparsegames as sg
from sparsegames.lp import pruned_context


def naive_winning_region(game: sg.SafetyGame) -> frozenset[str]:
    """Reference fixpoint: rescan all positions every pass, removing any
    that violates one of the three safety conditions."""
    alive = set(range(len(game.pos_names)))
    changed = True
    while changed:
        changed = False
        for v in sorted(alive):
            out_alive = [d for _, d in game.out_edges[v] if d in alive]
            if game.pos_owner[v] == 0:
                bad = not out_alive
            else:
                bad = any(d not in alive for _, d in game.out_edges[v])
            if bad:
                alive.discard(v)
                changed = True
    return frozenset(game.pos_names[v] for v in alive)


def solvable_random_games(count, n0=5, n1=5, k=2, start_seed=0, max_bits=None):
    """Deterministic stream of (game, winning, mp) with init winning,
    optionally filtered by pruned search-space bits."""
    out = []
    seed = start_seed
    while len(out) < count:
        game = sg.gen_random(seed, n0, n1, k)
        seed += 1
        winning = sg.compute_winning_region(game)
        if game.init not in winning:
            continue
        mp = sg.most_permissive(game, winning)
        if max_bits is not None:
            pruned, mp2 = pruned_context(game, mp)
            if sg.search_space_bits(pruned, mp2) > max_bits:
                continue
        out.append((game, winning, mp))
    return out


def unchecked_most_permissive(game: sg.SafetyGame, winning: frozenset[str]):
    """Most-permissive structure without the init-winning check, so tests
    can exercise losing games."""
    win_idx = {game.pos_index[p] for p in winning}
    allowed = {}
    for v in sorted(win_idx):
        if game.pos_owner[v] != 0:
            continue
        allowed[game.pos_names[v]] = tuple(
            game.act_names[a] for a, d in game.out_edges[v] if d in win_idx
        )
    return sg.MostPermissiveStrategy(winning=frozenset(winning), allowed=allowed)


def full_product_min_density(game: sg.SafetyGame, mp: sg.MostPermissiveStrategy) -> int:
    """Second, independent enumeration order: the plain cartesian product
    over all allowed sets, without reachability-guided branching."""
    import itertools

    positions = sorted(mp.allowed)
    pools = [sorted(mp.allowed[p]) for p in positions]
    best = None
    for combo in itertools.product(*pools):
        strat = sg.PositionalStrategy(dict(zip(positions, combo)))
        d = sg.density(game, strat)
        best = d if best is None else min(best, d)
    return best


FIG_GAME = sg.SafetyGame.build(
    {"g0": 1, "g1": 0, "g2": 1, "g3": 0},
    {
        ("g0", "u"): "g1",
        ("g0", "v"): "g1",
        ("g1", "y"): "g2",
        ("g1", "z"): "g2",
        ("g2", "u"): "g3",
        ("g2", "v"): "g1",
        ("g3", "x"): "g0",
    },
    "g0",
)

FIG_DFA_TEXT = b"""
pos q0 1
pos q1 0
pos q2 1
pos q3 0
init q0
accepting q0
accepting q1
accepting q2
accepting q3
edge q0 u q1
edge q0 v q1
edge q1 y q2
edge q1 z q2
edge q2 u q3
edge q2 v q1
edge q3 x q0
"""
