import itertools

import numpy as np
import pytest

import sparsegames as sg
from sparsegames.lp import build_relaxation, pruned_context

from conftest import solvable_random_games

# gen_random(63, 6, 6, 3) has a fractional root relaxation, so the
# branch-and-bound actually branches (11 LP solves when found).
BRANCHING_SEED = 63


def _branching_game():
    game = sg.gen_random(BRANCHING_SEED, 6, 6, 3)
    winning = sg.compute_winning_region(game)
    assert game.init in winning
    return game, sg.most_permissive(game, winning)


def test_integral_relaxation_means_no_branching():
    game = sg.gen_chain(4)
    mp = sg.most_permissive(game, sg.compute_winning_region(game))
    res = sg.ilp_exact_extract(game, mp)
    assert res.density == 4 and res.certified
    assert res.work == 1  # root LP only


def test_branching_game_is_exact():
    game, mp = _branching_game()
    res = sg.ilp_exact_extract(game, mp)
    best, _ = sg.brute_force_min_density(game, mp)
    assert res.work > 1
    assert res.density == best and res.certified


def test_oracle_equality_on_small_games():
    for game, winning, mp in solvable_random_games(120, 5, 5, 2, max_bits=16):
        res = sg.ilp_exact_extract(game, mp)
        best, _ = sg.brute_force_min_density(game, mp)
        assert res.certified and res.density == best
        assert sg.validate_strategy(game, mp, res.strategy).winning


def test_budget_exhaustion_returns_uncertified_incumbent():
    game, mp = _branching_game()
    res = sg.ilp_exact_extract(game, mp, node_budget=1)
    assert not res.certified
    assert sg.validate_strategy(game, mp, res.strategy).winning
    full = sg.ilp_exact_extract(game, mp)
    assert res.density >= full.density


def test_deadline_raises():
    game, mp = _branching_game()
    with pytest.raises(sg.TimeoutExceededError):
        sg.ilp_exact_extract(game, mp, deadline=0.0)


def test_deterministic_result():
    game, mp = _branching_game()
    a = sg.ilp_exact_extract(game, mp)
    b = sg.ilp_exact_extract(game, mp)
    assert a.strategy == b.strategy and a.density == b.density and a.work == b.work


def _enumerate_feasible_min(problem, fixed0, fixed1):
    """Exhaustively minimize the objective over feasible 0/1 vectors that
    respect the node's fixings (test-side completion oracle)."""
    n = len(problem.var_names)
    best = None
    for bits in itertools.product((0.0, 1.0), repeat=n):
        x = np.array(bits)
        if any(x[i] != 0.0 for i in fixed0):
            continue
        if any(x[i] != 1.0 for i in fixed1):
            continue
        if np.any(x < problem.lo - 1e-9) or np.any(x > problem.hi + 1e-9):
            continue
        if np.any(problem.rows @ x < problem.rhs - 1e-9):
            continue
        val = float(problem.objective @ x)
        best = val if best is None else min(best, val)
    return best


def test_node_bounds_are_valid_lower_bounds():
    game, mp = _branching_game()
    pruned, mp2 = pruned_context(game, mp)
    problem = build_relaxation(pruned, mp2)
    if len(problem.var_names) > 14:
        pytest.skip("completion enumeration too large")
    stats = {}
    sg.ilp_exact_extract(game, mp, stats=stats)
    assert stats["nodes"], "expected at least the root node"
    for bound, fixed0, fixed1 in stats["nodes"]:
        best = _enumerate_feasible_min(problem, fixed0, fixed1)
        if best is not None:
            assert bound <= best + 1e-6


def test_incumbent_always_valid_anytime():
    for budget in (1, 2, 3, 5, 8):
        game, mp = _branching_game()
        res = sg.ilp_exact_extract(game, mp, node_budget=budget)
        assert sg.validate_strategy(game, mp, res.strategy).winning
