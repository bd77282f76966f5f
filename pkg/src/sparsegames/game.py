"""Safety-game model, text format, solving, and strategy metrics.

A safety game is played on a finite graph whose positions are split
between player 0 and player 1.  Each player moves via her own action
alphabet along a partial edge function.  A finite play ending in a
player-0 position is lost by player 0; every infinite play and every
finite play ending in a player-1 position is won by player 0.

Position and action identifiers are free-form tokens.  At construction
they are interned into dense integer indices in lexicographic order, so
index order never depends on declaration order and all engines can work
on flat arrays.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

from .errors import GameFormatError, InitLosingError


class SafetyGame:
    """Immutable two-player safety game over explicit positions.

    Construct via :func:`parse_game` or :meth:`SafetyGame.build`.  The
    instance exposes both a name-based view (``positions0``, ``edges``,
    ...) and an index-based view (``pos_names``, ``out_edges``, ...) used
    by the solving engines.
    """

    def __init__(
        self,
        owners: dict[str, int],
        edges: dict[tuple[str, str], str],
        init: str,
    ):
        if init not in owners:
            raise GameFormatError(f"initial position {init!r} is not declared")
        for (src, act), dst in edges.items():
            if src not in owners:
                raise GameFormatError(f"edge source {src!r} is not declared")
            if dst not in owners:
                raise GameFormatError(f"edge target {dst!r} is not declared")
        act_owner: dict[str, int] = {}
        for (src, act) in edges:
            o = owners[src]
            prev = act_owner.setdefault(act, o)
            if prev != o:
                raise GameFormatError(
                    f"action {act!r} is used from positions of both players"
                )

        self.pos_names: tuple[str, ...] = tuple(sorted(owners))
        self.pos_index: dict[str, int] = {p: i for i, p in enumerate(self.pos_names)}
        self.pos_owner: tuple[int, ...] = tuple(owners[p] for p in self.pos_names)
        self.act_names: tuple[str, ...] = tuple(sorted(act_owner))
        self.act_index: dict[str, int] = {a: i for i, a in enumerate(self.act_names)}
        self.act_owner: tuple[int, ...] = tuple(act_owner[a] for a in self.act_names)
        self.init: str = init
        self.init_index: int = self.pos_index[init]
        self.edges: dict[tuple[str, str], str] = dict(edges)

        n = len(self.pos_names)
        out: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        incoming: list[list[int]] = [[] for _ in range(n)]
        for (src, act), dst in edges.items():
            s = self.pos_index[src]
            d = self.pos_index[dst]
            out[s].append((self.act_index[act], d))
        for s in range(n):
            out[s].sort()
            for _, d in out[s]:
                incoming[d].append(s)
        self.out_edges: tuple[tuple[tuple[int, int], ...], ...] = tuple(
            tuple(lst) for lst in out
        )
        # One entry per incoming edge (multiplicity matters for the
        # successor counters used by the fixpoint).
        self.in_sources: tuple[tuple[int, ...], ...] = tuple(
            tuple(lst) for lst in incoming
        )

    @classmethod
    def build(
        cls,
        positions: dict[str, int],
        edges: dict[tuple[str, str], str],
        init: str,
    ) -> "SafetyGame":
        """Build a game from owner and edge maps, validating invariants."""
        for p, o in positions.items():
            if o not in (0, 1):
                raise GameFormatError(f"position {p!r} has owner {o!r}, expected 0 or 1")
        return cls(positions, edges, init)

    @property
    def positions0(self) -> frozenset[str]:
        return frozenset(p for p, o in zip(self.pos_names, self.pos_owner) if o == 0)

    @property
    def positions1(self) -> frozenset[str]:
        return frozenset(p for p, o in zip(self.pos_names, self.pos_owner) if o == 1)

    @property
    def actions0(self) -> frozenset[str]:
        return frozenset(a for a, o in zip(self.act_names, self.act_owner) if o == 0)

    @property
    def actions1(self) -> frozenset[str]:
        return frozenset(a for a, o in zip(self.act_names, self.act_owner) if o == 1)

    def successors(self, pos: str) -> tuple[str, ...]:
        i = self.pos_index[pos]
        return tuple(sorted({self.pos_names[d] for _, d in self.out_edges[i]}))

    def num_edges(self) -> int:
        return len(self.edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SafetyGame):
            return NotImplemented
        return (
            self.pos_names == other.pos_names
            and self.pos_owner == other.pos_owner
            and self.init == other.init
            and self.edges == other.edges
        )

    def __hash__(self) -> int:
        return hash((self.pos_names, self.pos_owner, self.init))

    def __repr__(self) -> str:
        return (
            f"SafetyGame(|V0|={len(self.positions0)}, |V1|={len(self.positions1)}, "
            f"edges={len(self.edges)}, init={self.init!r})"
        )


@dataclass(frozen=True)
class MostPermissiveStrategy:
    """Winning region plus, per winning player-0 position, every action
    that keeps the play inside the winning region."""

    winning: frozenset[str]
    allowed: dict[str, tuple[str, ...]]


@dataclass(frozen=True)
class PositionalStrategy:
    """Partial map from player-0 positions to the single action taken
    there.  Extractors restrict the domain to the positions reachable
    when the strategy is followed."""

    choice: dict[str, str]

    def domain(self) -> frozenset[str]:
        return frozenset(self.choice)


@dataclass(frozen=True)
class PlayWitness:
    """A finite play (position trace plus decision sequence) exhibiting a
    violation found by :func:`validate_strategy`."""

    trace: tuple[str, ...]
    decisions: tuple[str, ...]


@dataclass(frozen=True)
class ValidationVerdict:
    winning: bool
    witness: PlayWitness | None = None


# ---------------------------------------------------------------------------
# Text format


def parse_game(text: bytes | str) -> SafetyGame:
    """Parse the one-record-per-line game format.

    Records: ``pos <id> <owner>``, ``init <id>`` (exactly once, after the
    position's declaration), ``edge <src> <action> <dst>``.  ``#`` starts
    a comment; blank lines are ignored.  Action alphabets are inferred
    from the owner of the source position of each edge.
    """
    if isinstance(text, (bytes, bytearray)):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise GameFormatError(f"input is not valid UTF-8: {exc}") from exc
    owners: dict[str, int] = {}
    edges: dict[tuple[str, str], str] = {}
    act_owner: dict[str, int] = {}
    init: str | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "pos":
            if len(parts) != 3:
                raise GameFormatError("expected 'pos <id> <owner>'", lineno)
            name, owner_tok = parts[1], parts[2]
            if owner_tok not in ("0", "1"):
                raise GameFormatError(f"owner must be 0 or 1, got {owner_tok!r}", lineno)
            if name in owners:
                raise GameFormatError(f"duplicate position {name!r}", lineno)
            owners[name] = int(owner_tok)
        elif kind == "init":
            if len(parts) != 2:
                raise GameFormatError("expected 'init <id>'", lineno)
            if init is not None:
                raise GameFormatError("init is declared more than once", lineno)
            if parts[1] not in owners:
                raise GameFormatError(
                    f"init names undeclared position {parts[1]!r}", lineno
                )
            init = parts[1]
        elif kind == "edge":
            if len(parts) != 4:
                raise GameFormatError("expected 'edge <src> <action> <dst>'", lineno)
            src, act, dst = parts[1], parts[2], parts[3]
            if src not in owners:
                raise GameFormatError(f"edge from undeclared position {src!r}", lineno)
            if dst not in owners:
                raise GameFormatError(f"edge to undeclared position {dst!r}", lineno)
            if (src, act) in edges:
                raise GameFormatError(
                    f"duplicate edge for ({src!r}, {act!r})", lineno
                )
            o = owners[src]
            prev = act_owner.setdefault(act, o)
            if prev != o:
                raise GameFormatError(
                    f"action {act!r} is used by both players", lineno
                )
            edges[(src, act)] = dst
        else:
            raise GameFormatError(f"unknown record {kind!r}", lineno)
    if init is None:
        raise GameFormatError("missing init record")
    return SafetyGame(owners, edges, init)


def serialize_game(game: SafetyGame) -> bytes:
    """Render a game to the text format, deterministically.

    Position lines come first sorted by id, then the init line, then edge
    lines sorted lexicographically.  ``parse_game`` of the output is
    structurally equal to the input.
    """
    lines = [
        f"pos {p} {o}" for p, o in zip(game.pos_names, game.pos_owner)
    ]
    lines.append(f"init {game.init}")
    lines.extend(
        sorted(f"edge {src} {act} {dst}" for (src, act), dst in game.edges.items())
    )
    return ("\n".join(lines) + "\n").encode("utf-8")


def serialize_strategy(strat: PositionalStrategy) -> bytes:
    """Render ``choice <pos> <action>`` lines sorted by position id."""
    lines = [f"choice {p} {a}" for p, a in sorted(strat.choice.items())]
    return ("\n".join(lines) + ("\n" if lines else "")).encode("utf-8")


# ---------------------------------------------------------------------------
# Solving


class Arena:
    """Mutable fixpoint state over a game, with tentative edge deletion.

    ``alive`` tracks the current winning region.  For each live player-0
    position, ``cnt`` holds the number of outgoing edges whose target is
    live; the position dies when the counter hits zero.  A live player-1
    position dies as soon as any successor dies.  Player-1 dead ends are
    winning for player 0 and are never removed.

    ``try_delete`` removes all outgoing edges of a player-0 position and
    propagates removals.  If the initial position survives, the deletion
    is kept; otherwise every change is rolled back.  Deleting edges never
    enlarges the winning region, so cascading from the current region is
    equivalent to recomputing the fixpoint from scratch on the mutated
    game (cross-checked in the test suite against a naive rescan).
    """

    def __init__(self, game: SafetyGame):
        self.game = game
        n = len(game.pos_names)
        self.alive = [True] * n
        self.cnt = [len(game.out_edges[v]) for v in range(n)]
        owner = game.pos_owner
        queue = deque()
        for v in range(n):
            if owner[v] == 0 and self.cnt[v] == 0:
                self.alive[v] = False
                queue.append(v)
        self._cascade(queue, None, None)

    def _cascade(
        self,
        queue: deque,
        killed: list[int] | None,
        decremented: list[int] | None,
    ) -> bool:
        """Propagate deaths; returns False if the initial position died."""
        alive = self.alive
        cnt = self.cnt
        owner = self.game.pos_owner
        in_sources = self.game.in_sources
        init = self.game.init_index
        ok = True
        while queue:
            t = queue.popleft()
            if t == init:
                ok = False
                if killed is not None:
                    # Tentative deletion: the caller rolls back, no need
                    # to finish draining.
                    break
            for s in in_sources[t]:
                if not alive[s]:
                    continue
                if owner[s] == 0:
                    cnt[s] -= 1
                    if decremented is not None:
                        decremented.append(s)
                    if cnt[s] == 0:
                        alive[s] = False
                        if killed is not None:
                            killed.append(s)
                        queue.append(s)
                else:
                    alive[s] = False
                    if killed is not None:
                        killed.append(s)
                    queue.append(s)
        return ok

    def _delete(self, v: int) -> tuple[bool, list[int], list[int]]:
        killed = [v]
        decremented: list[int] = []
        self.alive[v] = False
        if v == self.game.init_index:
            ok = False
        else:
            ok = self._cascade(deque([v]), killed, decremented)
        return ok, killed, decremented

    def _rollback(self, killed: list[int], decremented: list[int]) -> None:
        for s in decremented:
            self.cnt[s] += 1
        for s in killed:
            self.alive[s] = True

    def try_delete(self, v: int) -> bool:
        """Tentatively delete all outgoing edges of player-0 position ``v``.

        Returns True (and keeps the deletion) when the initial position is
        still winning afterwards; returns False and restores the previous
        state otherwise.  Deleting an already-dead position is a no-op
        that trivially succeeds.
        """
        if not self.alive[v]:
            return True
        ok, killed, decremented = self._delete(v)
        if not ok:
            self._rollback(killed, decremented)
        return ok

    def peek_delete(self, v: int) -> bool:
        """Like :meth:`try_delete`, but never keeps the deletion."""
        if not self.alive[v]:
            return True
        ok, killed, decremented = self._delete(v)
        self._rollback(killed, decremented)
        return ok

    def winning_indices(self) -> list[int]:
        return [v for v, a in enumerate(self.alive) if a]


def compute_winning_region(game: SafetyGame) -> frozenset[str]:
    """Greatest set of positions from which player 0 keeps the play safe.

    Uses a worklist with per-position counters of live successors, O(|E|)
    total work.  The empty set is a valid result.
    """
    arena = Arena(game)
    return frozenset(game.pos_names[v] for v in arena.winning_indices())


def most_permissive(game: SafetyGame, winning: frozenset[str]) -> MostPermissiveStrategy:
    """All actions per winning player-0 position whose target stays in
    ``winning``.  Raises :class:`InitLosingError` when the initial
    position is losing, since extraction is then meaningless.
    """
    if game.init not in winning:
        raise InitLosingError(
            f"initial position {game.init!r} is not in the winning region"
        )
    win_idx = {game.pos_index[p] for p in winning}
    allowed: dict[str, tuple[str, ...]] = {}
    for v in sorted(win_idx):
        if game.pos_owner[v] != 0:
            continue
        acts = tuple(
            game.act_names[a] for a, d in game.out_edges[v] if d in win_idx
        )
        allowed[game.pos_names[v]] = acts
    return MostPermissiveStrategy(winning=frozenset(winning), allowed=allowed)


def prune_reachable(game: SafetyGame, mp: MostPermissiveStrategy) -> SafetyGame:
    """Restrict the game to positions reachable from init when player 0
    ranges over the most-permissive actions and player 1 moves freely.

    Every position of the result is winning and reachable, so downstream
    encodings need no explicit winning-region filter.  Idempotent.
    """
    win_idx = {game.pos_index[p] for p in mp.winning}
    allowed_idx: dict[int, set[int]] = {
        game.pos_index[p]: {game.act_index[a] for a in acts}
        for p, acts in mp.allowed.items()
    }
    seen = {game.init_index}
    queue = deque([game.init_index])
    while queue:
        v = queue.popleft()
        ok_actions = allowed_idx.get(v)
        for a, d in game.out_edges[v]:
            if game.pos_owner[v] == 0 and (ok_actions is None or a not in ok_actions):
                continue
            if d not in seen:
                seen.add(d)
                queue.append(d)
    keep = seen & win_idx
    keep_names = {game.pos_names[v] for v in keep}
    positions = {p: game.pos_owner[game.pos_index[p]] for p in keep_names}
    edges = {
        (src, act): dst
        for (src, act), dst in game.edges.items()
        if src in keep_names
        and dst in keep_names
        and (
            game.pos_owner[game.pos_index[src]] == 1
            or act in mp.allowed.get(src, ())
        )
    }
    return SafetyGame(positions, edges, game.init)


def validate_strategy(
    game: SafetyGame,
    mp: MostPermissiveStrategy,
    strat: PositionalStrategy,
) -> ValidationVerdict:
    """Check by breadth-first exploration that following ``strat`` from
    init never reaches an undefined player-0 choice, never leaves the
    winning region, and hits no player-0 dead end.  On failure the
    verdict carries a shortest violating play.
    """
    if game.init not in mp.winning:
        return ValidationVerdict(False, PlayWitness((game.init,), ()))
    init = game.init_index
    win_idx = {game.pos_index[p] for p in mp.winning}
    parent: dict[int, tuple[int, str] | None] = {init: None}
    queue = deque([init])

    def play_to(v: int, extra: tuple[int | None, str | None]) -> PlayWitness:
        trace: list[str] = []
        decisions: list[str] = []
        cur: int | None = v
        while cur is not None:
            trace.append(game.pos_names[cur])
            step = parent[cur]
            if step is None:
                break
            cur, act = step
            decisions.append(act)
        trace.reverse()
        decisions.reverse()
        tail_pos, tail_act = extra
        if tail_act is not None:
            decisions.append(tail_act)
        if tail_pos is not None:
            trace.append(game.pos_names[tail_pos])
        return PlayWitness(tuple(trace), tuple(decisions))

    while queue:
        v = queue.popleft()
        name = game.pos_names[v]
        if game.pos_owner[v] == 0:
            act = strat.choice.get(name)
            if act is None:
                return ValidationVerdict(False, play_to(v, (None, None)))
            dst_name = game.edges.get((name, act))
            if dst_name is None:
                return ValidationVerdict(False, play_to(v, (None, None)))
            d = game.pos_index[dst_name]
            if d not in win_idx:
                return ValidationVerdict(False, play_to(v, (d, act)))
            if d not in parent:
                parent[d] = (v, act)
                queue.append(d)
        else:
            for a, d in game.out_edges[v]:
                if d not in win_idx:
                    return ValidationVerdict(
                        False, play_to(v, (d, game.act_names[a]))
                    )
                if d not in parent:
                    parent[d] = (v, game.act_names[a])
                    queue.append(d)
    return ValidationVerdict(True, None)


def reachable_under(game: SafetyGame, strat: PositionalStrategy) -> frozenset[str]:
    """Positions visited by some play where player 0 follows ``strat``
    and player 1 moves freely."""
    seen = {game.init_index}
    queue = deque([game.init_index])
    while queue:
        v = queue.popleft()
        name = game.pos_names[v]
        if game.pos_owner[v] == 0:
            act = strat.choice.get(name)
            if act is None:
                continue
            dst = game.edges.get((name, act))
            if dst is None:
                continue
            d = game.pos_index[dst]
            if d not in seen:
                seen.add(d)
                queue.append(d)
        else:
            for _, d in game.out_edges[v]:
                if d not in seen:
                    seen.add(d)
                    queue.append(d)
    return frozenset(game.pos_names[v] for v in seen)


def density(game: SafetyGame, strat: PositionalStrategy) -> int:
    """Number of player-0 positions reachable from init under ``strat``.

    Defined choices at unreachable positions do not count.
    """
    reach = reachable_under(game, strat)
    p0 = game.positions0
    return sum(1 for p in reach if p in p0)


def search_space_bits(game: SafetyGame, mp: MostPermissiveStrategy) -> float:
    """Sum of log2 of the allowed-action count over winning player-0
    positions; positions with a single allowed action contribute 0.

    The benchmark harness reports this on the pruned game.
    """
    return sum(math.log2(len(acts)) for acts in mp.allowed.values() if acts)


def restrict_to_reachable(
    game: SafetyGame, strat: PositionalStrategy
) -> PositionalStrategy:
    """Drop choices at positions that no play consistent with the
    strategy can visit."""
    reach = reachable_under(game, strat)
    return PositionalStrategy({p: a for p, a in strat.choice.items() if p in reach})
