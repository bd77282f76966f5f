import pytest

import sparsegames as sg
from sparsegames.rng import SplitMix64

from conftest import solvable_random_games


def test_splitmix_reference_vectors():
    # Canonical splitmix64 outputs for state 0.
    rng = SplitMix64(0)
    assert [rng.next_u64() for _ in range(3)] == [
        0xE220A8397B1DCDAF,
        0x6E789E6AA1B965F4,
        0x06C45D188009454F,
    ]


def test_below_rejects_bad_n():
    with pytest.raises(ValueError):
        SplitMix64(1).below(0)


def _binary_choice_game():
    return sg.SafetyGame.build(
        {"v": 0, "w1": 1, "w2": 1},
        {("v", "x"): "w1", ("v", "y"): "w2", ("w1", "z"): "w1", ("w2", "z"): "w2"},
        "v",
    )


def test_random_extract_uniform_over_binary_choice():
    game = _binary_choice_game()
    mp = sg.most_permissive(game, sg.compute_winning_region(game))
    counts = {"x": 0, "y": 0}
    for seed in range(10_000):
        strat = sg.random_extract(game, mp, seed)
        counts[strat.choice["v"]] += 1
    assert abs(counts["x"] / 10_000 - 0.5) < 0.05


def test_random_extract_singletons_ignore_seed():
    game = sg.gen_chain(4)
    mp = sg.most_permissive(game, sg.compute_winning_region(game))
    strategies = {tuple(sorted(sg.random_extract(game, mp, s).choice.items()))
                  for s in range(20)}
    assert len(strategies) == 1


def test_random_extract_validates_on_adversarial():
    game = sg.gen_adversarial(3)
    winning = sg.compute_winning_region(game)
    mp = sg.most_permissive(game, winning)
    for seed in (11, 12):
        strat = sg.random_extract(game, mp, seed)
        assert sg.validate_strategy(game, mp, strat).winning


def test_random_extract_deterministic():
    game = sg.gen_adversarial(2)
    mp = sg.most_permissive(game, sg.compute_winning_region(game))
    assert sg.random_extract(game, mp, 99) == sg.random_extract(game, mp, 99)


def test_random_extract_raises_on_losing_game():
    game = sg.SafetyGame.build({"v": 0, "p": 1}, {("p", "z"): "p"}, "v")
    winning = sg.compute_winning_region(game)
    mp = sg.MostPermissiveStrategy(winning=winning, allowed={})
    with pytest.raises(sg.InitLosingError):
        sg.random_extract(game, mp, 0)


def test_smart_deterministic():
    game = sg.gen_adversarial(3)
    winning = sg.compute_winning_region(game)
    assert sg.smart_random_extract(game, winning, 5) == sg.smart_random_extract(
        game, winning, 5
    )


def test_smart_saturated_game_keeps_all_positions():
    # Chains admit exactly one winning strategy, so nothing is deletable.
    game = sg.gen_chain(4)
    winning = sg.compute_winning_region(game)
    strat = sg.smart_random_extract(game, winning, 3)
    assert sg.density(game, strat) == 4
    assert set(strat.choice) == set(game.positions0)


def test_smart_outputs_locally_optimal():
    for idx, (game, winning, mp) in enumerate(solvable_random_games(120, 6, 5, 3)):
        strat = sg.smart_random_extract(game, winning, idx)
        assert sg.validate_strategy(game, mp, strat).winning
        assert sg.is_locally_optimal(game, strat)


def test_smart_densities_bounded_by_oracle():
    for idx, (game, winning, mp) in enumerate(
        solvable_random_games(60, 5, 5, 2, max_bits=16)
    ):
        best, _ = sg.brute_force_min_density(game, mp)
        assert sg.density(game, sg.smart_random_extract(game, winning, idx)) >= best


def test_random_extract_sometimes_not_locally_optimal():
    game = sg.gen_adversarial(4)
    winning = sg.compute_winning_region(game)
    mp = sg.most_permissive(game, winning)
    found = False
    for seed in range(60):
        strat = sg.random_extract(game, mp, seed)
        if not sg.is_locally_optimal(game, strat):
            found = True
            break
    assert found, "no seed produced a non-locally-optimal random strategy"


def test_adversarial1_lock_outcomes_are_local_optima():
    game = sg.gen_adversarial(1)
    winning = sg.compute_winning_region(game)
    mp = sg.most_permissive(game, winning)
    best, _ = sg.brute_force_min_density(game, mp)
    densities = set()
    for seed in range(200):
        strat = sg.smart_random_extract(game, winning, seed)
        assert sg.is_locally_optimal(game, strat)
        densities.add(sg.density(game, strat))
    assert densities == {2, 3}
    assert best == 2
    assert max(densities) > best


def test_local_optimality_is_relative_to_the_undefined_set():
    # Two interchangeable mid positions u and v: either alone can be left
    # undefined, but not both.  When the search drops u first, the final
    # strategy routes through v.  Judging v by deleting it *alone* would
    # call that strategy improvable (the u route still exists in the full
    # game), yet no strategy that also avoids the already-dropped u can
    # do better, so the output is locally optimal.
    game = sg.SafetyGame.build(
        {"i": 0, "mu": 1, "mv": 1, "u": 0, "v": 0, "s": 1},
        {
            ("i", "a"): "mu",
            ("i", "b"): "mv",
            ("mu", "t"): "u",
            ("mv", "t"): "v",
            ("u", "x"): "s",
            ("v", "x"): "s",
            ("s", "z"): "s",
        },
        "i",
    )
    winning = sg.compute_winning_region(game)
    mp = sg.most_permissive(game, winning)
    through_v = None
    for seed in range(64):
        strat = sg.smart_random_extract(game, winning, seed)
        assert sg.is_locally_optimal(game, strat)
        assert sg.density(game, strat) == 2
        if "v" in strat.choice:
            through_v = strat
    assert through_v is not None
    # single-position deletion in the full game would judge v droppable
    from sparsegames.game import Arena

    arena = Arena(game)
    assert arena.peek_delete(game.pos_index["v"])


def test_empty_domain_strategy_vacuously_locally_optimal():
    game = sg.SafetyGame.build({"p": 1}, {("p", "z"): "p"}, "p")
    assert sg.is_locally_optimal(game, sg.PositionalStrategy({}))


def _literal_smart(game, winning, seed):
    """Reference implementation of the local search: rebuild the game and
    re-solve the fixpoint from scratch for every tentative deletion."""
    rng = SplitMix64(seed)
    order = [p for p in sorted(winning) if p in game.positions0]
    rng.shuffle(order)
    owners = {p: game.pos_owner[game.pos_index[p]] for p in game.pos_names}
    edges = dict(game.edges)
    for pos in order:
        trimmed = {e: d for e, d in edges.items() if e[0] != pos}
        candidate = sg.SafetyGame.build(owners, trimmed, game.init)
        if game.init in sg.compute_winning_region(candidate):
            edges = trimmed
    residual = sg.SafetyGame.build(owners, edges, game.init)
    res_winning = sg.compute_winning_region(residual)
    choice = {}
    for pos in sorted(res_winning & game.positions0):
        v = residual.pos_index[pos]
        for a, d in residual.out_edges[v]:
            if residual.pos_names[d] in res_winning:
                choice[pos] = residual.act_names[a]
                break
    return sg.restrict_to_reachable(game, sg.PositionalStrategy(choice))


def test_smart_matches_literal_resolve_implementation():
    # The production cascade-with-rollback must be observationally
    # identical to deleting edges and re-solving from scratch.
    cases = [(sg.gen_adversarial(2), 17), (sg.gen_adversarial(3), 4)]
    for idx, (game, winning, mp) in enumerate(solvable_random_games(60, 6, 5, 3)):
        cases.append((game, idx))
    for game, seed in cases:
        winning = sg.compute_winning_region(game)
        fast = sg.smart_random_extract(game, winning, seed)
        literal = _literal_smart(game, winning, seed)
        assert fast == literal


def test_smart_respects_deadline():
    game = sg.gen_adversarial(50)
    winning = sg.compute_winning_region(game)
    with pytest.raises(sg.TimeoutExceededError):
        sg.smart_random_extract(game, winning, 0, deadline=0.0)
