import itertools

import pytest

import sparsegames as sg
from sparsegames.lp import pruned_context
from sparsegames.sat import _luby

from conftest import solvable_random_games, unchecked_most_permissive


def _truth_table_sat(num_vars: int, clauses) -> bool:
    for bits in itertools.product([False, True], repeat=num_vars):
        if all(any((l > 0) == bits[abs(l) - 1] for l in c) for c in clauses):
            return True
    return not clauses


def _model_satisfies(clauses, model) -> bool:
    return all(any((l > 0) == model[abs(l) - 1] for l in c) for c in clauses)


def _random_cnf(rng, max_vars=12, max_clauses=40):
    nv = 1 + rng.below(max_vars)
    nc = 1 + rng.below(max_clauses)
    clauses = []
    for _ in range(nc):
        width = 1 + rng.below(3)
        clause = []
        for _ in range(width):
            v = 1 + rng.below(nv)
            clause.append(v if rng.below(2) else -v)
        clauses.append(clause)
    return sg.Cnf(nv, clauses)


def test_empty_cnf_is_sat_with_empty_model():
    out = sg.sat_solve(sg.Cnf(0, []))
    assert out.status == "sat" and out.model == ()


def test_unit_contradiction_is_unsat():
    assert sg.sat_solve(sg.Cnf(1, [[1], [-1]])).status == "unsat"


def test_empty_clause_is_unsat():
    assert sg.sat_solve(sg.Cnf(0, [[]])).status == "unsat"


def test_random_cnfs_match_truth_tables():
    rng = sg.SplitMix64(2024)
    for _ in range(300):
        cnf = _random_cnf(rng)
        out = sg.sat_solve(cnf)
        expected = _truth_table_sat(cnf.num_vars, cnf.clauses)
        assert (out.status == "sat") == expected
        if out.status == "sat":
            assert _model_satisfies(cnf.clauses, out.model)


def test_sat_solve_deterministic():
    rng = sg.SplitMix64(55)
    cnf = _random_cnf(rng, max_vars=15, max_clauses=60)
    a = sg.sat_solve(cnf)
    b = sg.sat_solve(cnf)
    assert a.status == b.status and a.model == b.model


def test_conflict_budget_raises_distinct_error():
    # A pigeonhole-flavored unsat core that needs more than one conflict.
    clauses = [[1, 2], [1, -2], [-1, 2], [-1, -2]]
    with pytest.raises(sg.BudgetExhaustedError):
        sg.sat_solve(sg.Cnf(2, clauses), max_conflicts=1)
    assert sg.sat_solve(sg.Cnf(2, clauses)).status == "unsat"


def test_luby_sequence():
    assert [_luby(i) for i in range(1, 16)] == [
        1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8,
    ]


def test_at_most_zero_is_unit_negations():
    clauses, naux = sg.encode_at_most_k([3, 5, 9], 0, 10)
    assert clauses == [[-3], [-5], [-9]] and naux == 0


def test_at_most_vacuous_when_k_covers_all():
    clauses, naux = sg.encode_at_most_k([1, 2, 3], 3, 4)
    assert clauses == [] and naux == 0
    clauses, naux = sg.encode_at_most_k([1, 2], 7, 3)
    assert clauses == []


def test_at_most_k_exhaustive_six_vars():
    variables = list(range(1, 7))
    for k in range(0, 8):
        clauses, naux = sg.encode_at_most_k(variables, k, 7)
        for bits in itertools.product([False, True], repeat=6):
            units = [[v if b else -v] for v, b in zip(variables, bits)]
            cnf = sg.Cnf(6 + naux, [list(c) for c in clauses] + units)
            got = sg.sat_solve(cnf).status == "sat"
            assert got == (sum(bits) <= k), (k, bits)


def test_at_most_k_size_linear():
    clauses, naux = sg.encode_at_most_k(list(range(1, 51)), 5, 51)
    assert naux == 49 * 5
    assert len(clauses) <= 50 * 5 * 2 + 50


def test_build_cnf_player1_selfloop():
    game = sg.SafetyGame.build({"p": 1}, {("p", "z"): "p"}, "p")
    mp = sg.most_permissive(game, sg.compute_winning_region(game))
    cnf, var_map = sg.build_cnf(game, mp)
    assert var_map == {"p": 1}
    assert cnf.clauses == [[1], [-1, 1]]
    assert sg.sat_solve(cnf).status == "sat"


def test_build_cnf_flow_clause():
    game = sg.SafetyGame.build(
        {"v": 0, "a": 1, "b": 1},
        {("v", "x"): "a", ("v", "y"): "b", ("a", "z"): "a", ("b", "z"): "b"},
        "v",
    )
    mp = sg.most_permissive(game, sg.compute_winning_region(game))
    cnf, var_map = sg.build_cnf(game, mp)
    v, a, b = var_map["v"], var_map["a"], var_map["b"]
    assert [v] in cnf.clauses
    assert sorted([-v, a, b]) in [sorted(c) for c in cnf.clauses]


def test_cnf_satisfiable_iff_init_winning():
    solvable = 0
    losing = 0
    seed = 0
    while solvable < 100 or losing < 100:
        game = sg.gen_random(seed, 5, 5, 2)
        seed += 1
        winning = sg.compute_winning_region(game)
        mp = unchecked_most_permissive(game, winning)
        cnf, _ = sg.build_cnf(game, mp)
        out = sg.sat_solve(cnf)
        if game.init in winning:
            if solvable >= 100:
                continue
            solvable += 1
            assert out.status == "sat"
        else:
            if losing >= 100:
                continue
            losing += 1
            assert out.status == "unsat"


def test_cardinality_monotone_in_k():
    for game, winning, mp in solvable_random_games(20, 5, 5, 2):
        pruned, mp2 = pruned_context(game, mp)
        base, var_map = sg.build_cnf(pruned, mp2)
        p0_vars = sorted(var_map[p] for p in pruned.positions0)
        if not p0_vars:
            continue
        for k in range(len(p0_vars)):
            low, n_low = sg.encode_at_most_k(p0_vars, k, base.num_vars + 1)
            hi, n_hi = sg.encode_at_most_k(p0_vars, k + 1, base.num_vars + 1)
            sat_low = sg.sat_solve(
                sg.Cnf(base.num_vars + n_low, [list(c) for c in base.clauses] + low)
            ).status == "sat"
            sat_hi = sg.sat_solve(
                sg.Cnf(base.num_vars + n_hi, [list(c) for c in base.clauses] + hi)
            ).status == "sat"
            if sat_low:
                assert sat_hi


def test_model_decodes_to_winning_strategy():
    from sparsegames.lp import decode_support

    for game, winning, mp in solvable_random_games(60, 6, 6, 3):
        pruned, mp2 = pruned_context(game, mp)
        cnf, var_map = sg.build_cnf(pruned, mp2)
        out = sg.sat_solve(cnf)
        assert out.status == "sat"
        support = {
            pruned.pos_index[p] for p, var in var_map.items() if out.model[var - 1]
        }
        strat = decode_support(pruned, support)
        assert sg.validate_strategy(game, mp, strat).winning


def test_sat_exact_matches_ilp_on_random_games():
    for game, winning, mp in solvable_random_games(200, 5, 5, 2):
        a = sg.sat_exact_extract(game, mp)
        b = sg.ilp_exact_extract(game, mp)
        assert a.certified and b.certified
        assert a.density == b.density
        assert sg.validate_strategy(game, mp, a.strategy).winning


def test_sat_exact_budget_exhaustion_returns_uncertified():
    game = sg.gen_adversarial(3)
    mp = sg.most_permissive(game, sg.compute_winning_region(game))
    res = sg.sat_exact_extract(game, mp, max_conflicts=1)
    assert not res.certified
    assert sg.validate_strategy(game, mp, res.strategy).winning
    full = sg.sat_exact_extract(game, mp)
    assert full.certified
    assert res.density >= full.density


def test_density_zero_game_across_engines():
    game = sg.SafetyGame.build(
        {"p": 1, "q": 1}, {("p", "z"): "q", ("q", "z"): "p"}, "p"
    )
    winning = sg.compute_winning_region(game)
    mp = sg.most_permissive(game, winning)
    assert sg.smart_random_extract(game, winning, 0).choice == {}
    assert sg.replp_extract(game, mp).choice == {}
    ilp = sg.ilp_exact_extract(game, mp)
    sat = sg.sat_exact_extract(game, mp)
    assert ilp.density == sat.density == 0
    assert ilp.certified and sat.certified


def test_sat_exact_unique_strategy_collapses_search():
    game = sg.gen_chain(4)
    mp = sg.most_permissive(game, sg.compute_winning_region(game))
    for warm in (0, 7, 99):
        res = sg.sat_exact_extract(game, mp, warm_seed=warm)
        assert res.density == 4 and res.certified
        # warm start already matches the LP bound, no SAT call is needed
        assert res.work == 0


def test_to_dimacs_format():
    cnf = sg.Cnf(3, [[1, -2], [2, 3]])
    text = sg.to_dimacs(cnf, comments=("hello",))
    lines = text.splitlines()
    assert lines[0] == "c hello"
    assert lines[1] == "p cnf 3 2"
    assert lines[2] == "1 -2 0" and lines[3] == "2 3 0"
