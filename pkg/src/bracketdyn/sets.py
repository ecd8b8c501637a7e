"""Finite index sets, disjoint block collections, and canonical enumerations.

Ground sets are always initial intervals {1, ..., r}.  Every enumeration in
this module has a fixed deterministic order (cardinality first, then
lexicographic) so that the searches built on top of these streams are
reproducible run to run.  Streams are lazy; callers are responsible for
bounding the 2^r blow-up with explicit budgets.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterable, Iterator, Sequence, Union


@dataclass(frozen=True)
class FiniteSet:
    """An immutable set of positive integers; the empty set is a legal value."""

    elements: tuple[int, ...] = ()

    def __init__(self, elements: Iterable[int] = ()) -> None:
        elems = tuple(sorted(set(int(e) for e in elements)))
        if elems and elems[0] < 1:
            raise ValueError(f"set elements must be positive, got {elems[0]}")
        object.__setattr__(self, "elements", elems)

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __bool__(self) -> bool:
        return bool(self.elements)

    def __contains__(self, item: int) -> bool:
        return item in self.elements

    def __str__(self) -> str:
        return "{" + ",".join(str(e) for e in self.elements) + "}"

    def union(self, other: "FiniteSet") -> "FiniteSet":
        return FiniteSet(self.elements + other.elements)

    __or__ = union

    def difference(self, other: "FiniteSet") -> "FiniteSet":
        drop = set(other.elements)
        return FiniteSet(e for e in self.elements if e not in drop)

    def isdisjoint(self, other: "FiniteSet") -> bool:
        return not set(self.elements) & set(other.elements)

    def issubset(self, other: "FiniteSet") -> bool:
        return set(self.elements) <= set(other.elements)

    def within(self, r: int) -> bool:
        """True when all elements lie in the interval [1, r]."""
        return not self.elements or self.elements[-1] <= r

    def key(self) -> tuple:
        """Canonical sort key: cardinality, then lexicographic."""
        return (len(self.elements), self.elements)

    def subsets(
        self, max_card: int | None = None, include_empty: bool = False
    ) -> Iterator["FiniteSet"]:
        """All subsets in canonical order (cardinality, then lexicographic)."""
        top = len(self.elements) if max_card is None else min(max_card, len(self.elements))
        lo = 0 if include_empty else 1
        for card in range(lo, top + 1):
            for combo in combinations(self.elements, card):
                yield FiniteSet(combo)

    def to_json(self) -> list[int]:
        return list(self.elements)

    @classmethod
    def from_json(cls, data: Sequence[int]) -> "FiniteSet":
        return cls(data)


EMPTY = FiniteSet()


def fset(*elements: int) -> FiniteSet:
    return FiniteSet(elements)


def interval(r: int) -> FiniteSet:
    """The ground interval {1, ..., r}."""
    if r < 1:
        raise ValueError(f"interval length must be >= 1, got {r}")
    return FiniteSet(range(1, r + 1))


BlockLike = Union[FiniteSet, Iterable[int]]


@dataclass(frozen=True)
class DisjointCollection:
    """A family of pairwise disjoint nonempty finite sets, ordered by minimum."""

    blocks: tuple[FiniteSet, ...] = ()

    def __init__(self, blocks: Iterable[BlockLike] = ()) -> None:
        norm = tuple(b if isinstance(b, FiniteSet) else FiniteSet(b) for b in blocks)
        for b in norm:
            if not b:
                raise ValueError("collection blocks must be nonempty")
        norm = tuple(sorted(norm, key=lambda b: b.elements[0]))
        seen: set[int] = set()
        for b in norm:
            if seen & set(b.elements):
                raise ValueError(f"blocks are not pairwise disjoint at {b}")
            seen |= set(b.elements)
        object.__setattr__(self, "blocks", norm)

    @property
    def size(self) -> int:
        return len(self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self) -> Iterator[FiniteSet]:
        return iter(self.blocks)

    def __getitem__(self, i: int) -> FiniteSet:
        return self.blocks[i]

    def __contains__(self, block: FiniteSet) -> bool:
        return block in self.blocks

    def __str__(self) -> str:
        return "{" + ", ".join(str(b) for b in self.blocks) + "}"

    def ground(self) -> FiniteSet:
        out = EMPTY
        for b in self.blocks:
            out = out | b
        return out

    def index_of(self, block: FiniteSet) -> int:
        """1-based index of a block in the canonical block order."""
        try:
            return self.blocks.index(block) + 1
        except ValueError:
            raise ValueError(f"{block} is not a block of this collection") from None

    def union_of_indices(self, indices: FiniteSet | Iterable[int]) -> FiniteSet:
        """Union of the blocks selected by 1-based indices."""
        idx = indices if isinstance(indices, FiniteSet) else FiniteSet(indices)
        if idx and max(idx.elements) > self.size:
            raise ValueError(f"block index out of range in {idx}")
        out = EMPTY
        for i in idx:
            out = out | self.blocks[i - 1]
        return out

    def to_json(self) -> list[list[int]]:
        return [b.to_json() for b in self.blocks]

    @classmethod
    def from_json(cls, data: Sequence[Sequence[int]]) -> "DisjointCollection":
        return cls(FiniteSet(b) for b in data)


def embed_union(collection: DisjointCollection, gamma: Iterable[FiniteSet]) -> FiniteSet:
    """Map a subfamily of blocks to the union of its members.

    Injective in gamma for a fixed collection because blocks are pairwise
    disjoint.  Blocks outside the collection are rejected.
    """
    out = EMPTY
    for block in gamma:
        if block not in collection:
            raise ValueError(f"{block} is not a block of {collection}")
        out = out | block
    return out


def induced_collection(collections: Iterable[DisjointCollection]) -> DisjointCollection:
    """Collapse a family of collections into one block per member collection.

    The member collections must have pairwise disjoint grounds; the result is
    again a disjoint collection (validated on construction).
    """
    return DisjointCollection(c.ground() for c in collections)


def nonempty_subsets(r: int, max_card: int | None = None) -> Iterator[FiniteSet]:
    """Every nonempty subset of {1..r} (of cardinality <= max_card if given).

    Canonical order: cardinality ascending, lexicographic within a cardinality.
    """
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    if max_card is not None and max_card > r:
        raise ValueError(f"max_card {max_card} exceeds r = {r}")
    yield from interval(r).subsets(max_card=max_card)


def d_tuples(domain: Sequence | FiniteSet, d: int) -> Iterator[tuple]:
    """All ordered d-tuples (with repetition) over the domain, in product order."""
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    items = tuple(domain)
    yield from product(items, repeat=d)


def partitions_into(elements: Sequence[int], s: int) -> Iterator[tuple[FiniteSet, ...]]:
    """Partitions of the given elements into exactly s nonempty blocks.

    Blocks come out ordered by first occurrence (equivalently by minimum, since
    elements are consumed in sorted order), so each unordered partition appears
    exactly once, in restricted-growth-string order.
    """
    elems = tuple(sorted(elements))
    n = len(elems)
    if s < 1 or n < s:
        return

    blocks: list[list[int]] = []

    def rec(i: int) -> Iterator[tuple[FiniteSet, ...]]:
        if i == n:
            if len(blocks) == s:
                yield tuple(FiniteSet(b) for b in blocks)
            return
        remaining = n - i
        # place into an existing block only if the rest can still open enough
        if len(blocks) + remaining - 1 >= s:
            for b in blocks:
                b.append(elems[i])
                yield from rec(i + 1)
                b.pop()
        if len(blocks) < s:
            blocks.append([elems[i]])
            yield from rec(i + 1)
            blocks.pop()

    yield from rec(0)


def subcollections(
    r: int, s: int, max_ground: int | None = None
) -> Iterator[DisjointCollection]:
    """All disjoint s-subcollections of {1..r} in canonical order.

    Order: total ground size ascending, ground set lexicographic, then
    partition order within a ground.  The very first item is the collection of
    the first s singletons.
    """
    if s < 1:
        raise ValueError(f"s must be >= 1, got {s}")
    top = r if max_ground is None else min(r, max_ground)
    for g in range(s, top + 1):
        for ground in combinations(range(1, r + 1), g):
            for parts in partitions_into(ground, s):
                yield DisjointCollection(parts)
