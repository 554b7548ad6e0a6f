"""Core domain types: coalitions, weighted games, and boolean game expressions.

Players are indexed 0..n-1 internally; report and I/O layers translate to the
1-based ranks used in published population tables.  A coalition is a bit-set
packed into a single int (bit j set = player j present), which caps the player
count at 32 so that every coalition fits one machine word and a full sweep
over all 2^n coalitions stays addressable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

MAX_PLAYERS = 32

# Exactness envelope for the sweep engine's int64 arithmetic: any weight sum,
# quota, or boosted weight derived from a valid game must stay below 2^63.
MAX_TOTAL_WEIGHT = 1 << 61


class UniverseMismatchError(ValueError):
    """Raised when coalitions or games from different player universes meet."""


def _check_universe(n_left: int, n_right: int) -> None:
    if n_left != n_right:
        raise UniverseMismatchError(
            f"player universes differ: {n_left} vs {n_right} players"
        )


@dataclass(frozen=True, order=True)
class Coalition:
    """A subset of the n players, as a bit-set of 0-based player indices."""

    mask: int
    n: int

    def __post_init__(self) -> None:
        if not 1 <= self.n <= MAX_PLAYERS:
            raise ValueError(f"player count must be in 1..{MAX_PLAYERS}, got {self.n}")
        if not 0 <= self.mask < (1 << self.n):
            raise ValueError(
                f"coalition mask {self.mask:#x} has members outside 0..{self.n - 1}"
            )

    @classmethod
    def from_members(cls, members: Iterable[int], n: int) -> "Coalition":
        mask = 0
        for j in members:
            if not 0 <= j < n:
                raise ValueError(f"player index {j} outside 0..{n - 1}")
            mask |= 1 << j
        return cls(mask, n)

    @classmethod
    def empty(cls, n: int) -> "Coalition":
        return cls(0, n)

    @classmethod
    def grand(cls, n: int) -> "Coalition":
        return cls((1 << n) - 1, n)

    def members(self) -> tuple[int, ...]:
        return tuple(j for j in range(self.n) if self.mask >> j & 1)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __contains__(self, j: int) -> bool:
        return 0 <= j < self.n and bool(self.mask >> j & 1)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members())

    def _binary(self, other: "Coalition") -> None:
        if not isinstance(other, Coalition):
            raise TypeError(f"expected Coalition, got {type(other).__name__}")
        _check_universe(self.n, other.n)

    def union(self, other: "Coalition") -> "Coalition":
        self._binary(other)
        return Coalition(self.mask | other.mask, self.n)

    def intersection(self, other: "Coalition") -> "Coalition":
        self._binary(other)
        return Coalition(self.mask & other.mask, self.n)

    def difference(self, other: "Coalition") -> "Coalition":
        self._binary(other)
        return Coalition(self.mask & ~other.mask, self.n)

    def symmetric_difference(self, other: "Coalition") -> "Coalition":
        self._binary(other)
        return Coalition(self.mask ^ other.mask, self.n)

    def complement(self) -> "Coalition":
        return Coalition(~self.mask & ((1 << self.n) - 1), self.n)

    def issubset(self, other: "Coalition") -> bool:
        self._binary(other)
        return self.mask & ~other.mask == 0

    def add(self, j: int) -> "Coalition":
        if not 0 <= j < self.n:
            raise ValueError(f"player index {j} outside 0..{self.n - 1}")
        return Coalition(self.mask | (1 << j), self.n)

    def __repr__(self) -> str:
        return f"Coalition({{{', '.join(map(str, self.members()))}}}, n={self.n})"


@dataclass(frozen=True)
class WeightedGame:
    """A weighted majority game [quota; w_1, ..., w_n] over integer weights.

    A coalition wins iff its weight sum meets the quota (>=, no tie layer).
    Quotas that arise as a fraction of the total weight must be rescaled to
    exact integers by the caller (see ``votedim.data``); this type never
    touches floating point.
    """

    weights: tuple[int, ...]
    quota: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        n = len(self.weights)
        if not 1 <= n <= MAX_PLAYERS:
            raise ValueError(f"player count must be in 1..{MAX_PLAYERS}, got {n}")
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must be non-negative")
        if self.quota < 1:
            raise ValueError(f"quota must be >= 1, got {self.quota}")
        total = sum(self.weights)
        if self.quota > total:
            raise ValueError(
                f"quota {self.quota} exceeds total weight {total}: grand coalition would lose"
            )
        if total + self.quota >= MAX_TOTAL_WEIGHT:
            raise ValueError(
                "weights too large for the exact integer engine "
                f"(total weight + quota must stay below 2^61, got {total + self.quota})"
            )

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def total_weight(self) -> int:
        return sum(self.weights)

    def weight_sum(self, s: Coalition) -> int:
        """Exact integer weight of coalition ``s``."""
        _check_universe(self.n, s.n)
        m = s.mask
        total = 0
        while m:
            low = m & -m
            total += self.weights[low.bit_length() - 1]
            m ^= low
        return total

    def wins(self, s: Coalition) -> bool:
        return self.weight_sum(s) >= self.quota

    def rescaled(self, factor: int) -> "WeightedGame":
        """The same game with all weights and the quota multiplied by ``factor``."""
        if factor < 1:
            raise ValueError("scale factor must be a positive integer")
        return WeightedGame(tuple(w * factor for w in self.weights), self.quota * factor)

    def __repr__(self) -> str:
        ws = ",".join(map(str, self.weights))
        return f"[{self.quota}; {ws}]"


def unit_game(quota: int, n: int) -> WeightedGame:
    """The counting game [quota; 1, ..., 1]: wins iff at least ``quota`` players."""
    return WeightedGame((1,) * n, quota)


# --- boolean combinations -------------------------------------------------

AND = "and"
OR = "or"


class GameExpr:
    """A boolean combination of weighted games: leaves joined by AND / OR.

    Every expression is a simple game: evaluation is monotone (leaves are
    monotone and both connectives preserve monotonicity), the empty coalition
    loses and the grand coalition wins.  The boundary condition is asserted
    at construction of every node.
    """

    __slots__ = ("n",)

    def evaluate(self, s: Coalition) -> bool:
        raise NotImplementedError

    def leaves(self) -> Iterator[WeightedGame]:
        raise NotImplementedError

    @property
    def leaf_count(self) -> int:
        return sum(1 for _ in self.leaves())

    def _assert_boundary(self) -> None:
        if self.evaluate(Coalition.empty(self.n)):
            raise ValueError("empty coalition must lose")
        if not self.evaluate(Coalition.grand(self.n)):
            raise ValueError("grand coalition must win")


class Leaf(GameExpr):
    __slots__ = ("game",)

    def __init__(self, game: WeightedGame):
        self.game = game
        self.n = game.n
        self._assert_boundary()

    def evaluate(self, s: Coalition) -> bool:
        return self.game.wins(s)

    def leaves(self) -> Iterator[WeightedGame]:
        yield self.game

    def __repr__(self) -> str:
        return f"leaf({self.game!r})"


class Node(GameExpr):
    __slots__ = ("op", "children")

    def __init__(self, op: str, children: tuple[GameExpr, ...]):
        if op not in (AND, OR):
            raise ValueError(f"unknown connective {op!r}")
        if len(children) < 2:
            raise ValueError(f"{op} node needs at least 2 children, got {len(children)}")
        n = children[0].n
        for child in children[1:]:
            _check_universe(n, child.n)
        self.op = op
        self.children = children
        self.n = n
        self._assert_boundary()

    def evaluate(self, s: Coalition) -> bool:
        _check_universe(self.n, s.n)
        if self.op == AND:
            return all(c.evaluate(s) for c in self.children)
        return any(c.evaluate(s) for c in self.children)

    def leaves(self) -> Iterator[WeightedGame]:
        for child in self.children:
            yield from child.leaves()

    def __repr__(self) -> str:
        sep = " & " if self.op == AND else " | "
        return "(" + sep.join(repr(c) for c in self.children) + ")"


ExprLike = Union[GameExpr, WeightedGame]


def as_expr(x: ExprLike) -> GameExpr:
    """Wrap a bare WeightedGame as a leaf; pass expressions through."""
    if isinstance(x, GameExpr):
        return x
    if isinstance(x, WeightedGame):
        return Leaf(x)
    raise TypeError(f"expected GameExpr or WeightedGame, got {type(x).__name__}")


def leaf(game: WeightedGame) -> GameExpr:
    return Leaf(game)


def all_of(*exprs: ExprLike) -> GameExpr:
    """Intersection: wins iff every child wins."""
    return Node(AND, tuple(as_expr(e) for e in exprs))


def any_of(*exprs: ExprLike) -> GameExpr:
    """Union: wins iff at least one child wins."""
    return Node(OR, tuple(as_expr(e) for e in exprs))
