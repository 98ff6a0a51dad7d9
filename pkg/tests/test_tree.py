import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hppswitch.errors import TreeSpecError
from hppswitch.tree import (
    PAIR,
    TRIPLE,
    balanced_pair_tree,
    balanced_triple_tree,
    chain_pair_tree,
    enumerate_trees,
    pair,
    parse_tree,
    random_tree,
    triple,
    twoperm,
)
from oracles import tree_count


@pytest.mark.parametrize("text", [
    "pair",
    "triple",
    "twoperm(5)",
    "pair(slot1:pair)",
    "pair(slot0:pair,slot1:pair)",
    "pair(slot1:pair(slot0:triple))",
    "triple(slot0:pair,slot2:triple(slot1:pair))",
])
def test_parse_spec_round_trip(text):
    assert parse_tree(text).spec() == text


def test_parse_normalizes_whitespace_and_slot_order():
    t = parse_tree(" pair ( slot1 : triple , slot0 : pair ) ")
    assert t.spec() == "pair(slot0:pair,slot1:triple)"


@pytest.mark.parametrize("text", [
    "", "pear", "pair(", "pair(slot2:pair)", "pair(slot0:pair,slot0:pair)",
    "twoperm(1)", "pair(slot0:twoperm(3))", "twoperm(3)(slot0:pair)", "pair extra",
    "pair(slot0 pair)",
])
def test_parse_errors(text):
    with pytest.raises(TreeSpecError):
        parse_tree(text)


def test_keyword_constructors():
    assert pair(slot1=pair()) == parse_tree("pair(slot1:pair)")
    assert triple(slot0=pair(), slot2=triple()).spec() == "triple(slot0:pair,slot2:triple)"
    with pytest.raises(TreeSpecError):
        pair(left=pair())


def test_block_structure():
    t = parse_tree("triple(slot0:pair,slot2:triple(slot1:pair))")
    assert t.n_leaves == 2 + 1 + 4
    assert [t.block_size(s) for s in range(3)] == [2, 1, 4]
    assert t.block_offsets() == [0, 2, 3]
    assert t.k_max == 3
    assert t.n_nodes == 4
    assert not t.is_fundamental
    assert twoperm(7).k_max == 7


@pytest.mark.parametrize("n", range(2, 7))
def test_enumeration_count_matches_oracle(n):
    trees = list(enumerate_trees(n))
    assert len(trees) == tree_count(n)
    assert len({t.spec() for t in trees}) == len(trees)
    assert all(t.n_leaves == n for t in trees)


def test_enumeration_frozen_counts():
    # derived with the independent counting oracle
    assert [tree_count(n) for n in range(2, 9)] == [1, 3, 10, 38, 154, 654, 2871]
    assert sum(1 for _ in enumerate_trees(5, kinds=(PAIR,))) == 14  # Catalan(4)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 14), st.integers(0, 2**31 - 1))
def test_random_tree_leaf_count(n, seed):
    t = random_tree(n, np.random.default_rng(seed))
    assert t.n_leaves == n
    assert parse_tree(t.spec()) == t


@pytest.mark.parametrize("n", range(2, 17))
def test_balanced_and_chain_pair_trees(n):
    b = balanced_pair_tree(n)
    c = chain_pair_tree(n)
    assert b.n_leaves == c.n_leaves == n
    assert b.k_max == c.k_max == 2
    # balanced depth is ceil(log2 n)
    def depth(t):
        return 1 + max([depth(ch) for _, ch in t.children], default=0)
    assert depth(b) == int(np.ceil(np.log2(n)))
    assert depth(c) == n - 1


@pytest.mark.parametrize("n", [3, 5, 7, 9, 11])
def test_balanced_triple_tree(n):
    t = balanced_triple_tree(n)
    assert t.n_leaves == n
    assert "pair" not in t.spec()


def test_balanced_triple_tree_rejects_even():
    with pytest.raises(ValueError):
        balanced_triple_tree(4)
    with pytest.raises(ValueError):
        random_tree(1, np.random.default_rng(0))
