"""Lower-bound certificates from pairwise-incompatible losing coalitions.

Two losing coalitions ``a`` and ``b`` are incompatible when the players
outside their intersection can be split so that both halves, each joined
to the intersection, win.  Any weighted game that admits every winning
coalition then gives ``weight(p) + weight(q) = weight(a) + weight(b)``
with both sides of the split at or above the quota, so at least one of
``a``, ``b`` reaches the quota too and cannot stay losing.  A set of k
pairwise-incompatible losing coalitions therefore needs k distinct games
in any intersection representation: the game's dimension is at least k.
"""

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .games import Coalition, ExprLike, GameExpr, as_expr
from . import sweep

# Symmetric differences beyond this size are not searched (2^(size-1)
# candidate splits); callers may widen the cap explicitly.
DELTA_CAP = 30

_CHUNK = 1 << 18

STATUS_CERTIFIED = "certified"
STATUS_NO_CERTIFICATE = "no-certificate"
STATUS_NOT_ATTEMPTED = "not-attempted"


class DeltaTooLarge(ValueError):
    """The symmetric difference exceeds the search cap; search not attempted."""

    def __init__(self, size: int, cap: int) -> None:
        super().__init__(
            f"symmetric difference has {size} players, above the search cap "
            f"{cap}; certificate search not attempted"
        )
        self.size = size
        self.cap = cap


@dataclass(frozen=True)
class IncompatibilityCertificate:
    """A witness that no single weighted game keeps both ``a`` and ``b`` losing.

    ``x`` selects part of the symmetric difference; ``p`` and ``q`` are the
    two halves of the split, each extended by the common intersection.  The
    set identities below force ``weight(p) + weight(q) =
    weight(a) + weight(b)`` under any weight assignment, which is what
    makes two winning halves contradict two losing originals.
    """

    a: Coalition
    b: Coalition
    x: Coalition
    p: Coalition
    q: Coalition

    def __post_init__(self) -> None:
        base = self.a.intersection(self.b)
        delta = self.a.union(self.b).difference(base)
        if self.x.mask & ~delta.mask:
            raise ValueError("x must be a subset of the symmetric difference")
        if self.p.mask != base.mask | self.x.mask:
            raise ValueError("p must equal (a ∩ b) ∪ x")
        if self.q.mask != base.mask | (delta.mask ^ self.x.mask):
            raise ValueError("q must equal (a ∩ b) ∪ (Δ \\ x)")
        # The two-sided identities follow, but assert them as stated.
        if self.p.union(self.q).mask != self.a.union(self.b).mask:
            raise ValueError("p ∪ q must equal a ∪ b")
        if self.p.intersection(self.q).mask != base.mask:
            raise ValueError("p ∩ q must equal a ∩ b")


@dataclass(frozen=True)
class PairOutcome:
    """Certificate search result for the coalition pair at indices (i, j)."""

    i: int
    j: int
    status: str
    certificate: Optional[IncompatibilityCertificate]


@dataclass(frozen=True)
class CertificateSetReport:
    """Outcome of checking a coalition set for pairwise incompatibility.

    ``lower_bound`` is the set size when every coalition is losing and
    every pair is certified, and None otherwise: an uncertified pair means
    "unknown", never "compatible".
    """

    coalitions: tuple[Coalition, ...]
    losing: tuple[bool, ...]
    pairs: tuple[PairOutcome, ...]
    lower_bound: Optional[int]

    @property
    def all_losing(self) -> bool:
        return all(self.losing)

    @property
    def fully_certified(self) -> bool:
        return self.all_losing and all(
            p.status == STATUS_CERTIFIED for p in self.pairs
        )


def _expand_selector(r: np.ndarray, positions: Sequence[int]) -> np.ndarray:
    """Spread selector bits of ``r`` onto the given mask positions."""
    out = np.zeros_like(r)
    for i, d in enumerate(positions):
        out |= ((r >> i) & 1) << d
    return out


def find_certificate(
    game: ExprLike, a: Coalition, b: Coalition, delta_cap: int = DELTA_CAP
) -> Optional[IncompatibilityCertificate]:
    """Search the canonical splits of the symmetric difference of (a, b).

    Restricting to splits ``p, q ⊇ a ∩ b`` that partition the
    symmetric difference loses nothing: any winning pair with
    ``p ∪ q ⊆ a ∪ b`` and ``p ∩ q ⊇ a ∩ b``
    can be enlarged player by player into this family, and enlarging never
    turns a winning coalition losing.  Splits are tried in ascending order
    of their binary encoding over the sorted difference, skipping those
    that contain its largest player (the swap ``x ↔ Δ \\ x``
    yields the same pair), so the first hit is deterministic.

    Returns None when no split certifies; raises DeltaTooLarge when the
    difference exceeds ``delta_cap`` players.
    """
    expr = as_expr(game)
    if a.n != expr.n or b.n != expr.n:
        raise ValueError("coalitions must live in the game's player universe")
    if expr.evaluate(a):
        raise ValueError(f"coalition {set(a.members()) or '{}'} is not losing")
    if expr.evaluate(b):
        raise ValueError(f"coalition {set(b.members()) or '{}'} is not losing")
    if b.mask < a.mask:
        a, b = b, a
    base = a.mask & b.mask
    delta = (a.mask | b.mask) ^ base
    t = delta.bit_count()
    if t == 0:
        return None
    if t > delta_cap:
        raise DeltaTooLarge(t, delta_cap)
    positions = [j for j in range(expr.n) if delta >> j & 1]
    free = positions[:-1]
    total = 1 << len(free)
    for start in range(0, total, _CHUNK):
        r = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        xm = _expand_selector(r, free)
        ok = sweep.evaluate_many(expr, base | xm)
        ok &= sweep.evaluate_many(expr, base | (delta ^ xm))
        hits = np.flatnonzero(ok)
        if hits.size:
            x_mask = int(xm[hits[0]])
            cert = IncompatibilityCertificate(
                a=a,
                b=b,
                x=Coalition(x_mask, expr.n),
                p=Coalition(base | x_mask, expr.n),
                q=Coalition(base | (delta ^ x_mask), expr.n),
            )
            assert expr.evaluate(cert.p) and expr.evaluate(cert.q)
            assert not expr.evaluate(cert.a) and not expr.evaluate(cert.b)
            return cert
    return None


def verify_certificate_set(
    game: ExprLike,
    coalitions: Sequence[Coalition],
    delta_cap: int = DELTA_CAP,
    workers: int = 1,
) -> CertificateSetReport:
    """Check a coalition set: all losing and pairwise certified.

    Pairs are searched independently (concurrently when ``workers`` > 1)
    and reported in index order.  Pairs whose symmetric difference exceeds
    the cap, or that involve a non-losing coalition, are reported as
    not attempted.
    """
    expr = as_expr(game)
    coalitions = tuple(coalitions)
    if not coalitions:
        raise ValueError("coalition set must be non-empty")
    seen: set[int] = set()
    for s in coalitions:
        if s.n != expr.n:
            raise ValueError("coalitions must live in the game's player universe")
        if s.mask in seen:
            raise ValueError(f"duplicate coalition {set(s.members()) or '{}'}")
        seen.add(s.mask)
    losing = tuple(not expr.evaluate(s) for s in coalitions)
    index_pairs = [
        (i, j) for i in range(len(coalitions)) for j in range(i + 1, len(coalitions))
    ]

    def attempt(pair: tuple[int, int]) -> PairOutcome:
        i, j = pair
        if not (losing[i] and losing[j]):
            return PairOutcome(i, j, STATUS_NOT_ATTEMPTED, None)
        try:
            cert = find_certificate(expr, coalitions[i], coalitions[j], delta_cap)
        except DeltaTooLarge:
            return PairOutcome(i, j, STATUS_NOT_ATTEMPTED, None)
        if cert is None:
            return PairOutcome(i, j, STATUS_NO_CERTIFICATE, None)
        return PairOutcome(i, j, STATUS_CERTIFIED, cert)

    if workers > 1 and len(index_pairs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = tuple(pool.map(attempt, index_pairs))
    else:
        outcomes = tuple(attempt(p) for p in index_pairs)
    certified = all(losing) and all(o.status == STATUS_CERTIFIED for o in outcomes)
    return CertificateSetReport(
        coalitions=coalitions,
        losing=losing,
        pairs=outcomes,
        lower_bound=len(coalitions) if certified else None,
    )


def search_certificate_set(
    game: ExprLike,
    pool_budget: int = 64,
    pair_budget: int = 2000,
    seed: int = 0,
    delta_cap: int = DELTA_CAP,
    workers: int = 1,
) -> CertificateSetReport:
    """Best-effort search for a large pairwise-incompatible losing set.

    The candidate pool starts from the inclusion-maximal losing coalitions
    (the heaviest losers certify most easily) topped up with random
    subsets of them, which stay losing by monotonicity.  A greedy pass
    grows a clique in the incompatibility graph, spending at most
    ``pair_budget`` pair searches, and the final set is re-verified so the
    returned report carries full pair evidence.  No optimality claim.
    """
    if pool_budget < 1 or pair_budget < 1:
        raise ValueError("budgets must be positive")
    expr = as_expr(game)
    n = expr.n
    losing_table = sweep.full_table(n) ^ sweep.expr_table(expr, workers)
    maximal = sweep.maximal_elements(losing_table, n)
    # Big coalitions first; ascending mask breaks ties deterministically.
    pool = sorted(maximal, key=lambda m: (-m.bit_count(), m))[:pool_budget]
    rng = random.Random(seed)
    members = set(pool)
    attempts = 0
    while len(pool) < pool_budget and attempts < 8 * pool_budget and maximal:
        attempts += 1
        source = rng.choice(maximal)
        drop = rng.sample(
            [j for j in range(n) if source >> j & 1],
            k=min(rng.randint(1, 2), source.bit_count()),
        )
        candidate = source
        for j in drop:
            candidate &= ~(1 << j)
        if candidate and candidate not in members:
            members.add(candidate)
            pool.append(candidate)
    clique: list[int] = []
    searches = 0
    for cand in pool:
        compatible = True
        for kept in clique:
            if searches >= pair_budget:
                compatible = False
                break
            searches += 1
            try:
                cert = find_certificate(
                    expr, Coalition(cand, n), Coalition(kept, n), delta_cap
                )
            except DeltaTooLarge:
                cert = None
            if cert is None:
                compatible = False
                break
        if compatible:
            clique.append(cand)
        if searches >= pair_budget:
            break
    if not clique:
        # A simple game always has a losing coalition: the empty one.
        clique = [maximal[0]] if maximal else [0]
    return verify_certificate_set(
        expr, [Coalition(m, n) for m in clique], delta_cap, workers
    )
