"""Boolean engine: CNF encoding of the strategy constraints, an internal
CDCL solver, cardinality constraints, and binary-search minimization.

Read as Boolean formulas, the relaxation rows become clauses: a flow row
``-v + t1 + t2 >= 0`` is ``!v | t1 | t2``.  Minimization is a binary
search on the number of true player-0 variables, constrained with a
sequential-counter at-most-k encoding, between an LP-derived lower bound
and the density of a greedy warm start.

The solver is a conventional CDCL: two watched literals per clause,
first-UIP conflict learning, decaying variable activities with
deterministic index tie-breaking, phase saving, and Luby restarts.  It
has no randomized component, so identical input yields an identical
model or refutation.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field

from .errors import BudgetExhaustedError, TimeoutExceededError
from .game import (
    MostPermissiveStrategy,
    SafetyGame,
    density,
)
from .heuristics import smart_random_extract
from .ilp import ExactResult
from .lp import (
    INTEGRALITY_EPS,
    build_relaxation,
    decode_support,
    lp_solve,
    pruned_context,
)

DEFAULT_CONFLICT_BUDGET = 10**7


@dataclass
class Cnf:
    """Clauses over variables 1..num_vars; literals are signed ints."""

    num_vars: int
    clauses: list[list[int]] = field(default_factory=list)

    def copy(self) -> "Cnf":
        return Cnf(self.num_vars, [list(c) for c in self.clauses])


@dataclass(eq=False)
class SatOutcome:
    status: str  # "sat" | "unsat"
    model: tuple[bool, ...] | None = None


def to_dimacs(cnf: Cnf, comments: tuple[str, ...] = ()) -> str:
    """Standard DIMACS rendering, clauses terminated by 0."""
    lines = [f"c {c}" for c in comments]
    lines.append(f"p cnf {cnf.num_vars} {len(cnf.clauses)}")
    lines.extend(" ".join(str(l) for l in clause) + " 0" for clause in cnf.clauses)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# CDCL solver


def _luby(i: int) -> int:
    # Luby sequence (1-indexed): 1 1 2 1 1 2 4 1 1 2 1 1 2 4 8 ...
    # luby(2^k - 1) = 2^(k-1); otherwise recurse on the position within
    # the current block.
    while True:
        k = 1
        while (1 << k) - 1 < i:
            k += 1
        if (1 << k) - 1 == i:
            return 1 << (k - 1)
        i -= (1 << (k - 1)) - 1


class _Solver:
    _RESTART_BASE = 100
    _ACT_DECAY = 0.95
    _ACT_LIMIT = 1e100

    def __init__(self, num_vars: int):
        n = num_vars
        self.nvars = n
        self.clauses: list[list[int]] = []
        self.watches: dict[int, list[int]] = {}
        self.assign = [0] * (n + 1)  # 0 unknown, 1 true, -1 false
        self.level = [0] * (n + 1)
        self.reason = [-1] * (n + 1)
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.activity = [0.0] * (n + 1)
        self.var_inc = 1.0
        self.polarity = [False] * (n + 1)
        # Lazy max-heap over (-activity, var): entries are re-pushed on
        # every bump and unassignment so priorities stay fresh; stale
        # duplicates are skipped at pop time.
        self.order = [(0.0, v) for v in range(1, n + 1)]
        heapq.heapify(self.order)
        self.seen = bytearray(n + 1)
        self.unsat_at_root = False

    # -- clause management

    def add_clause(self, lits: list[int]) -> None:
        unique = sorted(set(lits), key=abs)
        for q in unique:
            if -q in unique:
                return  # tautology
        if not unique:
            self.unsat_at_root = True
            return
        if len(unique) == 1:
            lit = unique[0]
            v = abs(lit)
            cur = self.assign[v]
            want = 1 if lit > 0 else -1
            if cur == -want:
                self.unsat_at_root = True
            elif cur == 0:
                self._enqueue(lit, -1)
            return
        ci = len(self.clauses)
        self.clauses.append(unique)
        self.watches.setdefault(unique[0], []).append(ci)
        self.watches.setdefault(unique[1], []).append(ci)

    # -- assignment primitives

    def _value(self, lit: int) -> int:
        v = self.assign[lit if lit > 0 else -lit]
        return v if lit > 0 else -v

    def _enqueue(self, lit: int, reason: int) -> None:
        v = lit if lit > 0 else -lit
        self.assign[v] = 1 if lit > 0 else -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _propagate(self) -> int:
        """Unit propagation; returns a conflicting clause index or -1."""
        clauses = self.clauses
        watches = self.watches
        assign = self.assign
        trail = self.trail
        level = self.level
        reason = self.reason
        while self.qhead < len(trail):
            lit = trail[self.qhead]
            self.qhead += 1
            false_lit = -lit
            ws = watches.get(false_lit)
            if not ws:
                continue
            kept: list[int] = []
            conflict = -1
            cur_level = len(self.trail_lim)
            for pos, ci in enumerate(ws):
                cl = clauses[ci]
                if cl[0] == false_lit:
                    cl[0] = cl[1]
                    cl[1] = false_lit
                first = cl[0]
                fv = assign[first] if first > 0 else -assign[-first]
                if fv == 1:
                    kept.append(ci)
                    continue
                for k in range(2, len(cl)):
                    q = cl[k]
                    if (assign[q] if q > 0 else -assign[-q]) != -1:
                        cl[1] = q
                        cl[k] = false_lit
                        wq = watches.get(q)
                        if wq is None:
                            watches[q] = [ci]
                        else:
                            wq.append(ci)
                        break
                else:
                    kept.append(ci)
                    if fv == -1:
                        kept.extend(ws[pos + 1 :])
                        self.qhead = len(trail)
                        conflict = ci
                        break
                    v = first if first > 0 else -first
                    assign[v] = 1 if first > 0 else -1
                    level[v] = cur_level
                    reason[v] = ci
                    trail.append(first)
            watches[false_lit] = kept
            if conflict >= 0:
                return conflict
        return -1

    # -- activities

    def _bump(self, v: int) -> None:
        self.activity[v] += self.var_inc
        if self.activity[v] > self._ACT_LIMIT:
            scale = 1.0 / self._ACT_LIMIT
            for u in range(1, self.nvars + 1):
                self.activity[u] *= scale
            self.var_inc *= scale
            self.order = [
                (-self.activity[u], u)
                for u in range(1, self.nvars + 1)
                if self.assign[u] == 0
            ]
            heapq.heapify(self.order)
            return
        if self.assign[v] == 0:
            heapq.heappush(self.order, (-self.activity[v], v))

    # -- conflict analysis

    def _analyze(self, confl: int) -> tuple[list[int], int]:
        learned: list[int] = [0]
        seen = self.seen
        counter = 0
        lit = 0
        index = len(self.trail) - 1
        cur_level = len(self.trail_lim)
        while True:
            cl = self.clauses[confl]
            for k in range(1 if lit else 0, len(cl)):
                q = cl[k]
                v = abs(q)
                if not seen[v] and self.level[v] > 0:
                    seen[v] = 1
                    self._bump(v)
                    if self.level[v] >= cur_level:
                        counter += 1
                    else:
                        learned.append(q)
            while not seen[abs(self.trail[index])]:
                index -= 1
            lit = self.trail[index]
            v = abs(lit)
            index -= 1
            seen[v] = 0
            counter -= 1
            if counter == 0:
                break
            confl = self.reason[v]
        learned[0] = -lit
        # Self-subsumption minimization: a tail literal is redundant when
        # every other literal of its reason clause is already in the
        # learned clause (seen) or fixed at level 0, since resolving with
        # that reason removes it without adding anything.  A reason can
        # mention the asserting variable only as the asserting literal
        # itself, so it counts as present.
        uip_var = abs(lit)
        seen[uip_var] = 1
        kept = [learned[0]]
        for q in learned[1:]:
            v = abs(q)
            r = self.reason[v]
            if r < 0:
                kept.append(q)
                continue
            for other in self.clauses[r]:
                u = abs(other)
                if u != v and not seen[u] and self.level[u] > 0:
                    kept.append(q)
                    break
        seen[uip_var] = 0
        for q in learned[1:]:
            seen[abs(q)] = 0
        learned = kept
        if len(learned) == 1:
            return learned, 0
        max_i = max(range(1, len(learned)), key=lambda i: self.level[abs(learned[i])])
        learned[1], learned[max_i] = learned[max_i], learned[1]
        return learned, self.level[abs(learned[1])]

    def _backjump(self, bj_level: int) -> None:
        trail = self.trail
        level = self.level
        order = self.order
        activity = self.activity
        assign = self.assign
        polarity = self.polarity
        reason = self.reason
        push = heapq.heappush
        while trail:
            lit = trail[-1]
            v = lit if lit > 0 else -lit
            if level[v] <= bj_level:
                break
            trail.pop()
            polarity[v] = lit > 0
            assign[v] = 0
            reason[v] = -1
            push(order, (-activity[v], v))
        del self.trail_lim[bj_level:]
        self.qhead = min(self.qhead, len(trail))

    def _decide(self) -> int:
        order = self.order
        assign = self.assign
        activity = self.activity
        while order:
            neg_act, v = heapq.heappop(order)
            if assign[v] == 0 and -neg_act == activity[v]:
                return v if self.polarity[v] else -v
        for v in range(1, self.nvars + 1):
            if assign[v] == 0:
                return v if self.polarity[v] else -v
        return 0

    def solve(
        self, max_conflicts: int, deadline: float | None = None
    ) -> SatOutcome:
        if self.unsat_at_root:
            return SatOutcome("unsat")
        if self._propagate() >= 0:
            return SatOutcome("unsat")
        conflicts = 0
        restart_count = 1
        restart_limit = self._RESTART_BASE * _luby(1)
        since_restart = 0
        while True:
            confl = self._propagate()
            if confl >= 0:
                conflicts += 1
                since_restart += 1
                if conflicts > max_conflicts:
                    raise BudgetExhaustedError(
                        f"conflict budget of {max_conflicts} exhausted"
                    )
                if deadline is not None and conflicts % 512 == 0:
                    if time.monotonic() > deadline:
                        raise TimeoutExceededError("SAT deadline expired")
                if not self.trail_lim:
                    return SatOutcome("unsat")
                learned, bj_level = self._analyze(confl)
                self._backjump(bj_level)
                if len(learned) == 1:
                    self._enqueue(learned[0], -1)
                else:
                    ci = len(self.clauses)
                    self.clauses.append(learned)
                    self.watches.setdefault(learned[0], []).append(ci)
                    self.watches.setdefault(learned[1], []).append(ci)
                    self._enqueue(learned[0], ci)
                self.var_inc /= self._ACT_DECAY
            else:
                if since_restart >= restart_limit:
                    restart_count += 1
                    restart_limit = self._RESTART_BASE * _luby(restart_count)
                    since_restart = 0
                    self._backjump(0)
                    continue
                lit = self._decide()
                if lit == 0:
                    model = tuple(
                        self.assign[v] == 1 for v in range(1, self.nvars + 1)
                    )
                    return SatOutcome("sat", model)
                self.trail_lim.append(len(self.trail))
                self._enqueue(lit, -1)


def sat_solve(
    cnf: Cnf,
    max_conflicts: int = DEFAULT_CONFLICT_BUDGET,
    deadline: float | None = None,
) -> SatOutcome:
    """Complete CDCL check; raises :class:`BudgetExhaustedError` when the
    conflict budget runs out (distinct from unsat)."""
    solver = _Solver(cnf.num_vars)
    for clause in cnf.clauses:
        solver.add_clause(clause)
    return solver.solve(max_conflicts, deadline)


# ---------------------------------------------------------------------------
# Encodings


def encode_at_most_k(
    variables: list[int], k: int, first_aux: int
) -> tuple[list[list[int]], int]:
    """Sequential-counter encoding of 'at most k of these variables are
    true'.  Auxiliary registers take indices first_aux, first_aux+1, ...;
    returns the clause list and the number of auxiliaries used.  Size is
    O(len(variables) * k) clauses."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    n = len(variables)
    if k == 0:
        return [[-x] for x in variables], 0
    if k >= n:
        return [], 0

    def reg(i: int, j: int) -> int:
        return first_aux + i * k + (j - 1)

    x = variables
    clauses: list[list[int]] = [[-x[0], reg(0, 1)]]
    for j in range(2, k + 1):
        clauses.append([-reg(0, j)])
    for i in range(1, n - 1):
        clauses.append([-x[i], reg(i, 1)])
        clauses.append([-reg(i - 1, 1), reg(i, 1)])
        for j in range(2, k + 1):
            clauses.append([-x[i], -reg(i - 1, j - 1), reg(i, j)])
            clauses.append([-reg(i - 1, j), reg(i, j)])
        clauses.append([-x[i], -reg(i - 1, k)])
    clauses.append([-x[n - 1], -reg(n - 2, k)])
    return clauses, (n - 1) * k


def build_cnf(
    game: SafetyGame, mp: MostPermissiveStrategy
) -> tuple[Cnf, dict[str, int]]:
    """Boolean strategy constraints over the winning positions.

    Unit clause for init; per winning player-0 position v the clause
    (!v | allowed targets); per winning player-1 position and successor
    the clause (!v | succ).  When init is losing the instance is a single
    empty clause, trivially unsatisfiable.
    """
    if game.init not in mp.winning:
        return Cnf(0, [[]]), {}
    names = sorted(mp.winning)
    var_map = {name: i + 1 for i, name in enumerate(names)}
    clauses: list[list[int]] = [[var_map[game.init]]]
    for name in names:
        v = game.pos_index[name]
        lit = var_map[name]
        if game.pos_owner[v] == 0:
            targets = sorted(
                {
                    var_map[game.edges[(name, act)]]
                    for act in mp.allowed.get(name, ())
                }
            )
            clauses.append([-lit] + targets)
        else:
            for _, d in game.out_edges[v]:
                succ = game.pos_names[d]
                if succ not in var_map:
                    raise ValueError(
                        "winning player-1 position has a losing successor; "
                        "the most-permissive strategy is inconsistent"
                    )
            for succ_var in sorted(
                {var_map[game.pos_names[d]] for _, d in game.out_edges[v]}
            ):
                clauses.append([-lit, succ_var])
    return Cnf(len(names), clauses), var_map


def sat_exact_extract(
    game: SafetyGame,
    mp: MostPermissiveStrategy,
    *,
    max_conflicts: int = DEFAULT_CONFLICT_BUDGET,
    warm_seed: int = 0,
    deadline: float | None = None,
) -> ExactResult:
    """Minimum-density extraction by binary search on a cardinality bound.

    The lower end starts at the LP relaxation optimum rounded up, the
    upper end at a greedy warm start's density.  Each probe solves the
    base constraints plus at-most-k over the player-0 variables; a model
    tightens the upper end to its decoded density, a refutation raises
    the lower end.  ``work`` counts SAT calls.  On budget exhaustion the
    best strategy so far is returned uncertified.
    """
    pruned, mp2 = pruned_context(game, mp)
    base, var_map = build_cnf(pruned, mp2)
    p0_vars = sorted(var_map[p] for p in pruned.positions0)

    best = smart_random_extract(game, mp.winning, warm_seed)
    ub = density(game, best)
    relax = lp_solve(build_relaxation(pruned, mp2))
    lb = max(0, math.ceil(relax.objective_value - INTEGRALITY_EPS))

    work = 0
    while lb < ub:
        if deadline is not None and time.monotonic() > deadline:
            raise TimeoutExceededError("sat extraction deadline expired")
        # Plain bisection.  Probing midpoints keeps slack in the
        # cardinality constraint; models found there usually decode to a
        # density at the lower bound, so the zero-slack instances (the
        # hardest ones) are rarely solved at all.
        mid = (lb + ub) // 2
        card, n_aux = encode_at_most_k(p0_vars, mid, base.num_vars + 1)
        cnf = Cnf(base.num_vars + n_aux, [list(c) for c in base.clauses] + card)
        work += 1
        try:
            outcome = sat_solve(cnf, max_conflicts, deadline)
        except BudgetExhaustedError:
            return ExactResult(best, ub, False, work)
        if outcome.status == "sat":
            model = outcome.model
            support = {
                pruned.pos_index[name]
                for name, var in var_map.items()
                if model[var - 1]
            }
            candidate = decode_support(pruned, support)
            cand_density = density(game, candidate)
            best, ub = candidate, cand_density
        else:
            lb = mid + 1
    return ExactResult(best, ub, True, work)
