"""Core types: coalitions, weighted games, boolean combinations."""

import random

import pytest
from hypothesis import given, strategies as st

import oracles
from votedim.games import (
    AND,
    OR,
    Coalition,
    Leaf,
    Node,
    UniverseMismatchError,
    WeightedGame,
    all_of,
    any_of,
    as_expr,
    leaf,
    unit_game,
)

members_and_n = st.integers(1, 12).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.sets(st.integers(0, n - 1)),
        st.sets(st.integers(0, n - 1)),
    )
)


class TestCoalition:
    def test_from_members_round_trip(self):
        s = Coalition.from_members([0, 3, 5], 6)
        assert s.members() == (0, 3, 5)
        assert s.mask == 0b101001
        assert len(s) == 3
        assert 3 in s and 1 not in s
        assert list(s) == [0, 3, 5]

    def test_empty_and_grand(self):
        assert Coalition.empty(4).mask == 0
        assert Coalition.grand(4).mask == 0b1111

    def test_mask_bounds(self):
        with pytest.raises(ValueError):
            Coalition(1 << 5, 5)
        with pytest.raises(ValueError):
            Coalition.from_members([5], 5)
        with pytest.raises(ValueError):
            Coalition(0, 0)

    @given(members_and_n)
    def test_set_operations_match_python_sets(self, arg):
        n, xs, ys = arg
        a, b = Coalition.from_members(xs, n), Coalition.from_members(ys, n)
        assert set(a.union(b).members()) == xs | ys
        assert set(a.intersection(b).members()) == xs & ys
        assert set(a.difference(b).members()) == xs - ys
        assert set(a.symmetric_difference(b).members()) == xs ^ ys
        assert set(a.complement().members()) == set(range(n)) - xs
        assert a.issubset(b) == (xs <= ys)

    def test_add(self):
        s = Coalition.empty(3).add(1).add(2)
        assert s.members() == (1, 2)

    def test_universe_mismatch(self):
        with pytest.raises(UniverseMismatchError):
            Coalition.empty(3).union(Coalition.empty(4))


class TestWeightedGame:
    def test_validation(self):
        with pytest.raises(ValueError):
            WeightedGame((1, -1), 1)
        with pytest.raises(ValueError):
            WeightedGame((1, 1), 0)
        with pytest.raises(ValueError):
            WeightedGame((1, 1), 3)  # grand coalition would lose
        with pytest.raises(ValueError):
            WeightedGame((), 1)
        with pytest.raises(ValueError):
            WeightedGame((1 << 61, 1), 2)

    def test_wins(self):
        g = WeightedGame((1, 1, 0), 2)
        assert g.wins(Coalition.from_members([0, 1], 3))
        assert not g.wins(Coalition.from_members([0, 2], 3))

    @given(st.integers(1, 10).flatmap(lambda n: st.tuples(
        st.lists(st.integers(0, 9), min_size=n, max_size=n),
        st.integers(0, (1 << n) - 1),
    )))
    def test_weight_sum_matches_definition(self, arg):
        weights, mask = arg
        n = len(weights)
        if sum(weights) < 1:
            weights[0] = 1
        g = WeightedGame(tuple(weights), max(1, sum(weights) // 2))
        assert g.weight_sum(Coalition(mask, n)) == oracles.weight_of(g.weights, mask)

    @given(
        st.integers(2, 10),
        st.integers(0, 2**32 - 1).map(random.Random),
    )
    def test_monotone(self, n, rng):
        g = oracles.random_game(rng, n)
        sub = rng.randint(0, (1 << n) - 1)
        sup = sub | rng.randint(0, (1 << n) - 1)
        assert g.wins(Coalition(sub, n)) <= g.wins(Coalition(sup, n))

    def test_rescaled_preserves_winners(self):
        g = WeightedGame((3, 2, 1, 1), 4)
        h = g.rescaled(7)
        for m in range(1 << 4):
            assert g.wins(Coalition(m, 4)) == h.wins(Coalition(m, 4))
        with pytest.raises(ValueError):
            g.rescaled(0)

    def test_unit_game(self):
        g = unit_game(2, 4)
        for m in range(1 << 4):
            assert g.wins(Coalition(m, 4)) == (m.bit_count() >= 2)


class TestExpressions:
    def test_evaluate_matches_connectives(self):
        a = WeightedGame((1, 1, 1), 2)
        b = WeightedGame((1, 0, 0), 1)
        c = WeightedGame((1, 1, 1), 3)
        expr = all_of(a, any_of(b, c))
        for m in range(8):
            s = Coalition(m, 3)
            expected = a.wins(s) and (b.wins(s) or c.wins(s))
            assert expr.evaluate(s) == expected

    def test_leaves_in_construction_order(self):
        a, b, c = unit_game(1, 2), unit_game(2, 2), WeightedGame((2, 1), 2)
        expr = any_of(all_of(a, b), c)
        assert list(expr.leaves()) == [a, b, c]
        assert expr.leaf_count == 3

    def test_as_expr(self):
        g = unit_game(1, 3)
        wrapped = as_expr(g)
        assert isinstance(wrapped, Leaf)
        assert as_expr(wrapped) is wrapped
        assert leaf(g).game is g
        with pytest.raises(TypeError):
            as_expr(42)

    def test_node_arity_and_universe(self):
        g = unit_game(1, 3)
        with pytest.raises(ValueError):
            Node(AND, (as_expr(g),))
        with pytest.raises(UniverseMismatchError):
            all_of(g, unit_game(1, 4))
        with pytest.raises(ValueError):
            Node("xor", (as_expr(g), as_expr(g)))

    @given(st.integers(2, 8), st.integers(0, 2**32 - 1).map(random.Random))
    def test_expr_monotone_and_bounded(self, n, rng):
        expr = oracles.random_expr(rng, n)
        assert not expr.evaluate(Coalition.empty(n))
        assert expr.evaluate(Coalition.grand(n))
        sub = rng.randint(0, (1 << n) - 1)
        sup = sub | rng.randint(0, (1 << n) - 1)
        assert expr.evaluate(Coalition(sub, n)) <= expr.evaluate(Coalition(sup, n))
