"""Linear-programming engine: relaxation builder, bounded-variable
simplex, and the repetitive rounding heuristic.

The relaxation has one [0,1] variable per position of the pruned winning
game.  A feasible 0/1 point is exactly the indicator of a position set
containing init that is closed under player-1 moves and offers every
player-0 member an allowed successor inside the set, so minimizing the
player-0 mass lower-bounds the minimum strategy density.

The solver is a dense two-phase primal simplex with variable bounds and
Bland's rule, which makes it deterministic and cycle-free.  Dense
tableaus are acceptable at the scale this package targets (pruned games
up to roughly ten thousand positions); no attempt is made at sparse or
revised variants.
"""

from __future__ import annotations

import logging
import time
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleAfterFixError, TimeoutExceededError
from .game import (
    MostPermissiveStrategy,
    PositionalStrategy,
    SafetyGame,
    compute_winning_region,
    most_permissive,
    prune_reachable,
)

logger = logging.getLogger(__name__)

#: treat |v| <= EPS as 0 and |v - 1| <= EPS as 1 when rounding LP values
INTEGRALITY_EPS = 1e-9

_FEAS_TOL = 1e-7
_PIVOT_TOL = 1e-9


@dataclass(eq=False)
class LpProblem:
    """Minimize ``objective @ x`` subject to ``rows @ x >= rhs`` and
    ``lo <= x <= hi`` with all bounds inside [0, 1]."""

    var_names: tuple[str, ...]
    objective: np.ndarray
    rows: np.ndarray
    rhs: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    row_labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        n = len(self.var_names)
        self.objective = np.asarray(self.objective, dtype=float)
        self.rows = np.asarray(self.rows, dtype=float).reshape(-1, n)
        self.rhs = np.asarray(self.rhs, dtype=float)
        self.lo = np.asarray(self.lo, dtype=float)
        self.hi = np.asarray(self.hi, dtype=float)
        if self.objective.shape != (n,):
            raise ValueError("objective length does not match variables")
        if self.rhs.shape[0] != self.rows.shape[0]:
            raise ValueError("rhs length does not match rows")
        if self.lo.shape != (n,) or self.hi.shape != (n,):
            raise ValueError("bound vectors do not match variables")
        if not self.row_labels:
            self.row_labels = tuple(f"c{i}" for i in range(self.rows.shape[0]))
        if np.any(self.lo < -0.0) or np.any(self.hi > 1.0) or np.any(self.lo > self.hi):
            raise ValueError("bounds must satisfy 0 <= lo <= hi <= 1")

    def with_bounds(self, lo: np.ndarray, hi: np.ndarray) -> "LpProblem":
        return LpProblem(
            self.var_names, self.objective, self.rows, self.rhs,
            lo.copy(), hi.copy(), self.row_labels,
        )


@dataclass(eq=False)
class LpSolution:
    status: str  # "optimal" | "infeasible"
    values: np.ndarray | None = None
    objective_value: float = 0.0


def build_relaxation(game: SafetyGame, mp: MostPermissiveStrategy) -> LpProblem:
    """Real relaxation of minimum-density extraction over a pruned game.

    One variable per position, bounds [0,1] with init fixed to 1, an
    explicit ``init >= 1`` row, one flow row per player-0 position (the
    position implies some allowed successor; duplicate targets accumulate
    coefficients), and one row per (player-1 position, distinct
    successor) pair.
    """
    if set(game.pos_names) != set(mp.winning):
        raise ValueError("build_relaxation expects a game pruned to its winning part")
    n = len(game.pos_names)
    objective = np.array(
        [1.0 if o == 0 else 0.0 for o in game.pos_owner], dtype=float
    )
    rows: list[np.ndarray] = []
    rhs: list[float] = []
    labels: list[str] = []

    init_row = np.zeros(n)
    init_row[game.init_index] = 1.0
    rows.append(init_row)
    rhs.append(1.0)
    labels.append("init")

    for v in range(n):
        name = game.pos_names[v]
        if game.pos_owner[v] == 0:
            row = np.zeros(n)
            row[v] -= 1.0
            for act in mp.allowed.get(name, ()):
                dst = game.edges[(name, act)]
                row[game.pos_index[dst]] += 1.0
            rows.append(row)
            rhs.append(0.0)
            labels.append(f"flow_{name}")
        else:
            for dst in sorted({d for _, d in game.out_edges[v]}):
                row = np.zeros(n)
                row[v] -= 1.0
                row[dst] += 1.0
                rows.append(row)
                rhs.append(0.0)
                labels.append(f"succ_{name}_{game.pos_names[dst]}")

    lo = np.zeros(n)
    hi = np.ones(n)
    lo[game.init_index] = 1.0
    return LpProblem(
        var_names=game.pos_names,
        objective=objective,
        rows=np.array(rows).reshape(len(rows), n),
        rhs=np.array(rhs),
        lo=lo,
        hi=hi,
        row_labels=tuple(labels),
    )


_AT_LOWER, _AT_UPPER, _BASIC = 0, 1, 2


def _pivot_loop(T, beta, d, basis, status, lo_ext, hi_ext, val, max_pivots):
    """Run primal simplex pivots until optimal; Bland's smallest-index
    rule for entering and leaving choices (anti-cycling)."""
    m, num_cols = T.shape
    tol = _PIVOT_TOL
    for _ in range(max_pivots):
        enter = -1
        direction = 0.0
        for j in range(num_cols):
            st = status[j]
            if st == _BASIC or hi_ext[j] - lo_ext[j] <= 0.0:
                continue
            if st == _AT_LOWER and d[j] < -tol:
                enter, direction = j, 1.0
                break
            if st == _AT_UPPER and d[j] > tol:
                enter, direction = j, -1.0
                break
        if enter < 0:
            return
        col = T[:, enter]
        ci = direction * col
        basis_arr = np.asarray(basis)
        lo_b = lo_ext[basis_arr]
        hi_b = hi_ext[basis_arr]
        with np.errstate(divide="ignore", invalid="ignore"):
            dec = np.where(ci > tol, (beta - lo_b) / np.where(ci > tol, ci, 1.0), np.inf)
            inc = np.where(
                ci < -tol, (hi_b - beta) / np.where(ci < -tol, -ci, 1.0), np.inf
            )
        ratios = np.maximum(np.minimum(dec, inc), 0.0)
        min_ratio = ratios.min() if m else np.inf
        flip_cap = hi_ext[enter] - lo_ext[enter]
        t_star = min(min_ratio, flip_cap)
        if not np.isfinite(t_star):
            raise RuntimeError("LP is unbounded; this cannot happen with [0,1] bounds")
        tie = t_star + 1e-12 * (1.0 + abs(t_star))
        if flip_cap <= tie:
            # Bound flip: the entering variable crosses to its other bound.
            beta -= ci * flip_cap
            if status[enter] == _AT_LOWER:
                status[enter] = _AT_UPPER
                val[enter] = hi_ext[enter]
            else:
                status[enter] = _AT_LOWER
                val[enter] = lo_ext[enter]
            continue
        candidates = np.nonzero(ratios <= tie)[0]
        leave_row = min(candidates, key=lambda i: basis[i])
        piv = col[leave_row]
        leaving = basis[leave_row]
        new_enter_val = val[enter] + direction * t_star
        beta -= ci * t_star
        if ci[leave_row] > 0:
            status[leaving] = _AT_LOWER
            val[leaving] = lo_ext[leaving]
        else:
            status[leaving] = _AT_UPPER
            val[leaving] = hi_ext[leaving]
        row = T[leave_row] / piv
        T[leave_row] = row
        colv = T[:, enter].copy()
        colv[leave_row] = 0.0
        T -= np.outer(colv, row)
        d -= d[enter] * row
        basis[leave_row] = enter
        status[enter] = _BASIC
        beta[leave_row] = new_enter_val
    raise RuntimeError("simplex pivot budget exhausted")


def lp_solve(problem: LpProblem) -> LpSolution:
    """Deterministic two-phase simplex returning a vertex optimum or
    infeasibility."""
    n = len(problem.var_names)
    m = problem.rows.shape[0]
    lo = problem.lo
    hi = problem.hi
    if m == 0:
        x = np.where(problem.objective > 0, lo, hi)
        return LpSolution("optimal", x, float(problem.objective @ x))

    # Columns: structural | surplus (one per row) | artificial (one per row).
    num_cols = n + 2 * m
    A_ext = np.zeros((m, num_cols))
    A_ext[:, :n] = problem.rows
    A_ext[:, n : n + m] = -np.eye(m)
    x0 = lo.copy()
    residual = problem.rhs - problem.rows @ x0
    sigma = np.where(residual >= 0, 1.0, -1.0)
    A_ext[:, n + m :] = np.diag(sigma)

    lo_ext = np.concatenate([lo, np.zeros(m), np.zeros(m)])
    hi_ext = np.concatenate([hi, np.full(m, np.inf), np.full(m, np.inf)])
    T = A_ext * sigma[:, None]
    beta = np.abs(residual).astype(float)
    basis = [n + m + i for i in range(m)]
    status = np.full(num_cols, _AT_LOWER, dtype=np.int8)
    status[basis] = _BASIC
    val = lo_ext.copy()
    val[n : n + m] = 0.0

    max_pivots = 20000 + 200 * (m + n)

    # Phase 1: minimize the artificial mass.
    c1 = np.zeros(num_cols)
    c1[n + m :] = 1.0
    d = c1 - T.sum(axis=0)
    _pivot_loop(T, beta, d, basis, status, lo_ext, hi_ext, val, max_pivots)
    # Artificials leave the basis only at their lower bound 0, so the
    # remaining infeasibility is carried entirely by basic ones.
    infeas = sum(beta[i] for i in range(m) if basis[i] >= n + m)
    if infeas > _FEAS_TOL:
        return LpSolution("infeasible")

    # Phase 2: ban artificials and optimize the real objective.
    lo_ext[n + m :] = 0.0
    hi_ext[n + m :] = 0.0
    c2 = np.zeros(num_cols)
    c2[:n] = problem.objective
    d = c2 - c2[np.asarray(basis)] @ T
    _pivot_loop(T, beta, d, basis, status, lo_ext, hi_ext, val, max_pivots)

    values = val.copy()
    values[np.asarray(basis)] = beta
    x = np.clip(values[:n], lo, hi)
    return LpSolution("optimal", x, float(problem.objective @ x))


def format_lp(problem: LpProblem) -> str:
    """Debug dump in a conventional text LP layout (objective, rows,
    bounds), for cross-checking against external solvers by hand."""
    lines = ["Minimize", " obj: " + _linear_expr(problem.objective, problem.var_names)]
    lines.append("Subject To")
    for label, row, b in zip(problem.row_labels, problem.rows, problem.rhs):
        lines.append(f" {label}: {_linear_expr(row, problem.var_names)} >= {b:g}")
    lines.append("Bounds")
    for name, l, h in zip(problem.var_names, problem.lo, problem.hi):
        lines.append(f" {l:g} <= {name} <= {h:g}")
    lines.append("End")
    return "\n".join(lines) + "\n"


def _linear_expr(coefs: np.ndarray, names: tuple[str, ...]) -> str:
    parts: list[str] = []
    for coef, name in zip(coefs, names):
        if coef == 0:
            continue
        mag = abs(coef)
        coef_txt = "" if abs(mag - 1.0) < 1e-12 else f"{mag:g} "
        if not parts:
            parts.append(f"{'- ' if coef < 0 else ''}{coef_txt}{name}")
        else:
            parts.append(f"{'-' if coef < 0 else '+'} {coef_txt}{name}")
    return " ".join(parts) if parts else "0"


def pruned_context(
    game: SafetyGame, mp: MostPermissiveStrategy
) -> tuple[SafetyGame, MostPermissiveStrategy]:
    """Restrict to the reachable winning part and recompute the allowed
    sets there; every engine encodes over this context."""
    pruned = prune_reachable(game, mp)
    mp2 = most_permissive(pruned, compute_winning_region(pruned))
    return pruned, mp2


def decode_support(game: SafetyGame, support: set[int]) -> PositionalStrategy:
    """Read a strategy off an integral solution's support set: breadth
    first from init, picking per player-0 position the smallest allowed
    action whose target is in the support."""
    choice: dict[str, str] = {}
    seen = {game.init_index}
    queue = deque([game.init_index])
    while queue:
        v = queue.popleft()
        if game.pos_owner[v] == 0:
            for a, dst in game.out_edges[v]:
                if dst in support:
                    choice[game.pos_names[v]] = game.act_names[a]
                    if dst not in seen:
                        seen.add(dst)
                        queue.append(dst)
                    break
            else:
                raise AssertionError(
                    "integral solution offers no supported successor"
                )
        else:
            for _, dst in game.out_edges[v]:
                if dst not in seen:
                    seen.add(dst)
                    queue.append(dst)
    return PositionalStrategy(choice)


def replp_extract(
    game: SafetyGame,
    mp: MostPermissiveStrategy,
    *,
    deadline: float | None = None,
    stats: dict | None = None,
) -> PositionalStrategy:
    """Iterated LP rounding.

    Solve the relaxation; fix every 0-valued variable to 0 and every
    1-valued variable to 1; additionally fix one variable attaining the
    largest non-1 value to 1 (smallest index on ties); repeat until the
    solution is integral, then decode.  Each round turns at least one
    fractional variable into a fixed 1, so the loop runs at most once per
    position.  If a round's zero-fixings make the LP infeasible the round
    is retried without them (this is recorded); feasibility with the
    upward fixings alone always holds because the all-ones point over the
    winning region satisfies every constraint.
    """
    pruned, mp2 = pruned_context(game, mp)
    problem = build_relaxation(pruned, mp2)
    n = len(problem.var_names)
    lo = problem.lo.copy()
    hi = problem.hi.copy()
    eps = INTEGRALITY_EPS
    pending_zero: list[int] | None = None
    rounds = 0
    retries = 0
    fixed_sizes: list[tuple[int, int]] = []
    for _ in range(n + 2):
        if deadline is not None and time.monotonic() > deadline:
            raise TimeoutExceededError("replp deadline expired")
        sol = lp_solve(problem.with_bounds(lo, hi))
        if sol.status == "infeasible":
            if pending_zero:
                for i in pending_zero:
                    hi[i] = 1.0
                retries += 1
                logger.warning(
                    "replp round became infeasible; retrying without %d zero-fixings",
                    len(pending_zero),
                )
                pending_zero = None
                continue
            raise InfeasibleAfterFixError(
                "LP infeasible after a fixing round without zero-fixings"
            )
        rounds += 1
        v = sol.values
        fractional = [i for i in range(n) if eps < v[i] < 1.0 - eps]
        if not fractional:
            if stats is not None:
                stats["rounds"] = rounds
                stats["zero_fix_retries"] = retries
                stats["fixed_sizes"] = fixed_sizes
            support = {i for i in range(n) if v[i] >= 1.0 - eps}
            return decode_support(pruned, support)
        pending_zero = [i for i in range(n) if v[i] <= eps and hi[i] > 0.0]
        for i in pending_zero:
            hi[i] = 0.0
        for i in range(n):
            if v[i] >= 1.0 - eps:
                lo[i] = 1.0
        max_frac = max(v[i] for i in fractional)
        target = min(i for i in fractional if v[i] >= max_frac - eps)
        lo[target] = 1.0
        fixed_sizes.append(
            (int(np.sum(hi <= 0.0)), int(np.sum(lo >= 1.0)))
        )
    raise AssertionError("replp failed to converge within the round bound")
