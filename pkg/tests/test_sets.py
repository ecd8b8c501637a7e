"""Enumeration, disjoint collections, and their invariants."""

from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bracketdyn import (
    EMPTY,
    DisjointCollection,
    FiniteSet,
    d_tuples,
    embed_union,
    fset,
    induced_collection,
    nonempty_subsets,
    partitions_into,
    subcollections,
)


def test_finite_set_normalizes_and_sorts():
    assert FiniteSet([3, 1, 3, 2]).elements == (1, 2, 3)
    assert not EMPTY
    assert fset(2, 1) == fset(1, 2)
    with pytest.raises(ValueError):
        FiniteSet([0, 1])


def test_nonempty_subsets_r1():
    assert list(nonempty_subsets(1)) == [fset(1)]


def test_nonempty_subsets_r2_order():
    assert list(nonempty_subsets(2)) == [fset(1), fset(2), fset(1, 2)]


def test_nonempty_subsets_r3_maxcard2():
    got = list(nonempty_subsets(3, max_card=2))
    assert got == [fset(1), fset(2), fset(3), fset(1, 2), fset(1, 3), fset(2, 3)]
    assert len(got) == 6


@pytest.mark.parametrize("r", [1, 2, 3, 4, 5, 6])
def test_subset_count(r):
    assert len(list(nonempty_subsets(r))) == 2**r - 1


def test_d_tuples_examples():
    assert list(d_tuples([1, 2], 2)) == [(1, 1), (1, 2), (2, 1), (2, 2)]
    assert list(d_tuples([5], 3)) == [(5, 5, 5)]
    assert len(list(d_tuples([1, 2, 3], 2))) == 9


@given(st.integers(1, 4), st.integers(1, 3))
def test_d_tuples_count(n, d):
    assert len(list(d_tuples(range(n), d))) == n**d


def test_embed_union_examples():
    b = DisjointCollection([[1, 2], [4]])
    assert embed_union(b, [fset(1, 2)]) == fset(1, 2)
    assert embed_union(b, [fset(1, 2), fset(4)]) == fset(1, 2, 4)
    b3 = DisjointCollection([[1], [2], [3]])
    assert embed_union(b3, []) == EMPTY


def test_embed_union_rejects_foreign_block():
    b = DisjointCollection([[1, 2], [4]])
    with pytest.raises(ValueError):
        embed_union(b, [fset(1)])


def test_embed_union_injective_exhaustively():
    # over every collection with up to 5 blocks drawn from a fixed partition
    blocks = [fset(1), fset(2, 3), fset(4), fset(5, 6), fset(7)]
    coll = DisjointCollection(blocks)
    seen = {}
    for size in range(len(blocks) + 1):
        for gamma in combinations(blocks, size):
            u = embed_union(coll, gamma)
            assert u not in seen or seen[u] == gamma
            seen[u] = gamma
    assert len(seen) == 2 ** len(blocks)


def test_collection_rejects_overlap_and_empty():
    with pytest.raises(ValueError):
        DisjointCollection([[1, 2], [2, 3]])
    with pytest.raises(ValueError):
        DisjointCollection([[1], []])


def test_collection_sorted_by_min():
    c = DisjointCollection([[5, 6], [1, 9], [3]])
    assert [b.elements[0] for b in c] == [1, 3, 5]
    assert c.union_of_indices(fset(1, 3)) == fset(1, 9, 5, 6)
    assert c.index_of(fset(3)) == 2


def test_induced_collection_disjoint():
    inner1 = DisjointCollection([[1], [2]])
    inner2 = DisjointCollection([[4, 5]])
    ind = induced_collection([inner1, inner2])
    assert ind.blocks == (fset(1, 2), fset(4, 5))
    with pytest.raises(ValueError):
        induced_collection([inner1, DisjointCollection([[2, 7]])])


def test_partitions_into_counts():
    # Stirling numbers of the second kind
    assert len(list(partitions_into(range(1, 5), 2))) == 7
    assert len(list(partitions_into(range(1, 6), 3))) == 25
    assert list(partitions_into(range(1, 4), 3)) == [(fset(1), fset(2), fset(3))]


def test_subcollections_canonical_head():
    first = next(subcollections(5, 3))
    assert first.blocks == (fset(1), fset(2), fset(3))
    # the ground-size-s layer enumerates exactly the s-subsets as singletons
    layer = [c for c in subcollections(4, 2) if len(c.ground()) == 2]
    assert len(layer) == 6


def test_subcollections_all_disjoint_and_complete():
    seen = set()
    for c in subcollections(4, 2):
        assert c.size == 2
        key = tuple(b.elements for b in c)
        assert key not in seen
        seen.add(key)
    # crosscheck with a direct double loop over disjoint pairs of subsets
    subs = list(nonempty_subsets(4))
    expected = sum(
        1 for i, a in enumerate(subs) for b in subs[i + 1 :] if a.isdisjoint(b)
    )
    assert len(seen) == expected


def test_json_round_trip():
    s = fset(2, 9)
    assert FiniteSet.from_json(s.to_json()) == s
    c = DisjointCollection([[1, 2], [4]])
    assert DisjointCollection.from_json(c.to_json()) == c
