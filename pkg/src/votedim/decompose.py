"""Rewriting boolean combinations of weighted games as intersections.

The central operation turns a union of two weighted games into an
equivalent intersection of weighted games.  The union fails to be weighted
exactly because of its *gap set*: coalitions that lose the first game but
win the second.  When every gap coalition contains a common core of
players, boosting each core player's weight by a fixed amount yields games
that admit all gap coalitions; the coalitions the boosted intersection
over-admits are then fenced off one veto game apiece.
"""

from dataclasses import dataclass
from typing import Optional

from .games import (
    AND,
    Coalition,
    ExprLike,
    GameExpr,
    Leaf,
    Node,
    WeightedGame,
    all_of,
    any_of,
    as_expr,
)
from . import sweep

# Gap-set members are materialized only up to this count; the summary
# statistics (count, core, minimum weight) are exact regardless.
GAP_MEMBER_CAP = 10**6

METHOD_CORE_BOOST = "core-boost"
METHOD_VETO_FENCE = "veto-fence"
METHOD_FIRST_GAME = "first-game"


class EmptyCoreError(ValueError):
    """The gap coalitions share no player, so no core boost can cover them."""

    def __init__(self, gap: "GapSummary") -> None:
        super().__init__(
            f"the {gap.count} gap coalitions have an empty intersection; "
            "the core-boost rewrite is inapplicable"
        )
        self.gap = gap


class ContainmentError(ValueError):
    """The candidate intersection rejects a coalition the target admits."""

    def __init__(self, witness: Coalition) -> None:
        members = ",".join(str(j) for j in witness)
        super().__init__(
            f"candidate is not a winning-superset of the target: "
            f"coalition {{{members}}} wins the target but loses the candidate"
        )
        self.witness = witness


@dataclass(frozen=True)
class GapSummary:
    """Exact statistics of the gap set between two weighted games.

    The gap set of ``(first, second)`` holds every coalition that loses
    ``first`` but wins ``second``; it is empty iff the union of the two
    games already equals ``first``.

    Attributes
    ----------
    count:
        Number of gap coalitions.
    common_core:
        Intersection of all gap coalitions.  By convention the full player
        set when the gap is empty (the core is then never used).
    min_weight:
        Smallest ``first``-weight among gap coalitions, None when empty.
    boost:
        ``first.quota - min_weight``: the weight increment that makes the
        heaviest-missing gap coalition win ``first``'s quota.  At least 1
        whenever the gap is non-empty, because gap members sit strictly
        below the quota.  None when empty.
    members:
        The gap coalitions themselves, ascending by mask, or None when
        ``count`` exceeded the materialization cap.
    """

    count: int
    common_core: Coalition
    min_weight: Optional[int]
    boost: Optional[int]
    members: Optional[tuple[Coalition, ...]]

    def __post_init__(self) -> None:
        if self.count < 0:
            raise ValueError(f"gap count must be >= 0, got {self.count}")
        if self.count > 0:
            if self.boost is None or self.boost < 1:
                raise ValueError(
                    f"a non-empty gap must carry a boost >= 1, got {self.boost}"
                )
            if self.members is not None:
                core = self.common_core.mask
                for s in self.members:
                    if core & ~s.mask:
                        raise ValueError(
                            f"common core is not contained in gap member {s}"
                        )


@dataclass(frozen=True)
class Decomposition:
    """An intersection of weighted games equivalent to the rewritten input.

    ``games`` intersect to the input; ``frontier`` lists the coalitions
    that the pre-veto stage over-admits, one veto game each.  ``gap`` is
    populated by the union rewrite and None for the veto-only refinement.
    """

    games: tuple[WeightedGame, ...]
    gap: Optional[GapSummary]
    frontier: tuple[Coalition, ...]
    method: str

    def __post_init__(self) -> None:
        if not self.games:
            raise ValueError("a decomposition must contain at least one game")
        if self.method not in (METHOD_CORE_BOOST, METHOD_VETO_FENCE, METHOD_FIRST_GAME):
            raise ValueError(f"unknown method tag {self.method!r}")
        if self.method == METHOD_CORE_BOOST:
            assert self.gap is not None
            core_size = len(self.common_core_players())
            if len(self.games) != core_size + len(self.frontier):
                raise ValueError(
                    "core-boost must emit one game per core player plus one "
                    f"per frontier coalition: {len(self.games)} != "
                    f"{core_size} + {len(self.frontier)}"
                )

    def common_core_players(self) -> tuple[int, ...]:
        if self.gap is None:
            return ()
        return tuple(self.gap.common_core.members())

    def intersection(self) -> GameExpr:
        """The emitted games as a single AND expression."""
        if len(self.games) == 1:
            return as_expr(self.games[0])
        return all_of(*self.games)


def veto_game(blocked: Coalition) -> WeightedGame:
    """The quota-1 game whose losing coalitions are exactly subsets of ``blocked``.

    Every player outside ``blocked`` carries weight 1, so a coalition loses
    iff it avoids all of them.  ``blocked`` must not be the full player
    set: that would leave no player with weight.
    """
    if blocked.mask == Coalition.grand(blocked.n).mask:
        raise ValueError("cannot veto the grand coalition: no player would carry weight")
    weights = tuple(0 if j in blocked else 1 for j in range(blocked.n))
    return WeightedGame(weights, 1)


def gap_summary(
    first: WeightedGame,
    second: WeightedGame,
    member_cap: int = GAP_MEMBER_CAP,
    workers: int = 1,
) -> GapSummary:
    """Exact survey of the coalitions losing ``first`` but winning ``second``."""
    if first.n != second.n:
        raise ValueError(f"player counts differ: {first.n} vs {second.n}")
    n = first.n
    table = (sweep.full_table(n) ^ sweep.win_table(first, workers)) & sweep.win_table(
        second, workers
    )
    count = sweep.table_count(table)
    core = Coalition(sweep.players_in_all(table, n), n)
    if count == 0:
        return GapSummary(0, core, None, None, ())
    min_weight = sweep.min_member_weight(first, table)
    assert min_weight is not None
    members: Optional[tuple[Coalition, ...]] = None
    if count <= member_cap:
        members = tuple(Coalition(m, n) for m in sweep.table_members(table, n))
    return GapSummary(count, core, min_weight, first.quota - min_weight, members)


def _boosted_games(
    base: WeightedGame, core: Coalition, boost: int
) -> tuple[WeightedGame, ...]:
    games = []
    for k in core.members():
        weights = list(base.weights)
        weights[k] += boost
        games.append(WeightedGame(tuple(weights), base.quota))
    return tuple(games)


def union_as_intersection(
    first: WeightedGame,
    second: WeightedGame,
    member_cap: int = GAP_MEMBER_CAP,
    workers: int = 1,
    boost_offset: int = 0,
) -> Decomposition:
    """Rewrite ``first OR second`` as an intersection of weighted games.

    When the gap set is empty the union already equals ``first`` and is
    returned alone.  Otherwise each common-core player gets one copy of
    ``first`` with its weight boosted; the intersection of those copies
    admits every union winner, and its excess winners (the frontier) are
    removed by one veto game each.

    ``boost_offset`` shifts the derived boost and exists solely for
    fault-injection in verification tests; any non-zero value breaks the
    rewrite.

    Raises
    ------
    EmptyCoreError
        When the gap coalitions share no player, carrying the gap summary
        for diagnostics.
    """
    gap = gap_summary(first, second, member_cap, workers)
    if gap.count == 0:
        return Decomposition((first,), gap, (), METHOD_FIRST_GAME)
    if gap.common_core.mask == 0:
        raise EmptyCoreError(gap)
    assert gap.boost is not None
    boosted = _boosted_games(first, gap.common_core, gap.boost + boost_offset)
    up: ExprLike = boosted[0] if len(boosted) == 1 else all_of(*boosted)
    frontier = sweep.maximal_satisfying(
        sweep.IntervalPredicate(up=as_expr(up), down=any_of(first, second)),
        workers,
    )
    for s in frontier:
        # A frontier member loses the union, so it cannot be the grand
        # coalition and veto_game cannot reject it.
        assert s.mask != Coalition.grand(s.n).mask
    games = boosted + tuple(veto_game(s) for s in frontier)
    return Decomposition(games, gap, tuple(frontier), METHOD_CORE_BOOST)


def refine_by_vetoes(
    target: ExprLike, candidate: ExprLike, workers: int = 1
) -> Decomposition:
    """Cut a winning-superset ``candidate`` down to ``target`` with veto games.

    ``candidate`` must be an intersection of weighted games (a single game
    or an AND-only tree) admitting every winner of ``target``; the result
    appends one veto game per inclusion-maximal coalition that wins
    ``candidate`` but loses ``target``.

    Raises
    ------
    ContainmentError
        When some coalition wins ``target`` but loses ``candidate``.
    ValueError
        When ``candidate`` contains a union node.
    """
    target = as_expr(target)
    candidate = as_expr(candidate)
    if not _and_only(candidate):
        raise ValueError("candidate must be a single game or an AND-only tree")
    # W(target) is contained in W(candidate) iff target == target AND candidate.
    check = sweep.equivalent(target, all_of(target, candidate), workers)
    if not check:
        assert check.counterexample is not None
        raise ContainmentError(check.counterexample)
    frontier = sweep.maximal_satisfying(
        sweep.IntervalPredicate(up=candidate, down=target), workers
    )
    games = tuple(candidate.leaves()) + tuple(veto_game(s) for s in frontier)
    return Decomposition(games, None, tuple(frontier), METHOD_VETO_FENCE)


def _and_only(expr: GameExpr) -> bool:
    if isinstance(expr, Leaf):
        return True
    assert isinstance(expr, Node)
    return expr.op == AND and all(_and_only(c) for c in expr.children)
