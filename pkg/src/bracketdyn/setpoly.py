"""Polynomial mappings on finite subsets of {1..r}, in producing-function form.

A mapping phi on finite subsets is polynomial of degree <= d when every
iterated difference along d+1 pairwise disjoint nonempty sets vanishes:
D_beta phi(alpha) = phi(alpha u beta) - phi(alpha).  Every such mapping with
phi(empty) = 0 is the sum of a unique "t-table": phi(alpha) is the sum of
table values over the nonempty subsets of alpha of cardinality <= d.  A
"q-table" over ordered d-tuples represents the same mapping non-uniquely;
summing the q-table over tuples with a common entry set recovers the t-table.

Arithmetic in this module is exact: values are ints, fractions, tuples of
those, or fractions mod 1.  Floating-point data only enters through the orbit
simulators, never here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable, Iterator, Mapping, Sequence, Union

from .sets import (
    EMPTY,
    DisjointCollection,
    FiniteSet,
    induced_collection,
    interval,
    nonempty_subsets,
)

Scalar = Union[int, Fraction]
Value = Union[Scalar, tuple]

_KINDS = ("integers", "rationals", "integer_vectors", "rational_vectors", "torus")


def _frac_mod1(x: Scalar) -> Fraction:
    f = Fraction(x)
    return f - math.floor(f)


@dataclass(frozen=True)
class ValueGroup:
    """One of the five supported abelian value groups."""

    kind: str
    dim: int = 1

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown value group kind {self.kind!r}")
        if self.dim < 1:
            raise ValueError("vector dimension must be >= 1")
        if self.kind in ("integers", "rationals", "torus") and self.dim != 1:
            raise ValueError(f"{self.kind} group is one-dimensional")

    @property
    def is_vector(self) -> bool:
        return self.kind in ("integer_vectors", "rational_vectors")

    def zero(self) -> Value:
        if self.kind == "integers":
            return 0
        if self.kind == "rationals":
            return Fraction(0)
        if self.kind == "torus":
            return Fraction(0)
        base = 0 if self.kind == "integer_vectors" else Fraction(0)
        return tuple(base for _ in range(self.dim))

    def normalize(self, v: Value) -> Value:
        if self.kind == "integers":
            if isinstance(v, Fraction):
                if v.denominator != 1:
                    raise ValueError(f"{v} is not an integer")
                return int(v)
            return int(v)
        if self.kind == "rationals":
            return Fraction(v)
        if self.kind == "torus":
            return _frac_mod1(v)
        if not isinstance(v, (tuple, list)) or len(v) != self.dim:
            raise ValueError(f"expected a vector of length {self.dim}, got {v!r}")
        if self.kind == "integer_vectors":
            out = []
            for c in v:
                c = Fraction(c)
                if c.denominator != 1:
                    raise ValueError(f"{c} is not an integer")
                out.append(int(c))
            return tuple(out)
        return tuple(Fraction(c) for c in v)

    def add(self, a: Value, b: Value) -> Value:
        if self.is_vector:
            return tuple(x + y for x, y in zip(a, b))
        if self.kind == "torus":
            return _frac_mod1(a + b)
        return a + b

    def neg(self, a: Value) -> Value:
        if self.is_vector:
            return tuple(-x for x in a)
        if self.kind == "torus":
            return _frac_mod1(-a)
        return -a

    def sub(self, a: Value, b: Value) -> Value:
        return self.add(a, self.neg(b))

    def is_zero(self, a: Value) -> bool:
        if self.is_vector:
            return all(x == 0 for x in a)
        return a == 0

    def format_value(self, v: Value) -> object:
        if self.is_vector:
            return [str(c) for c in v]
        return str(v)

    def parse_value(self, data: object) -> Value:
        if isinstance(data, (list, tuple)):
            return self.normalize([Fraction(str(c)) for c in data])
        return self.normalize(Fraction(str(data)))

    def to_json(self) -> dict:
        return {"kind": self.kind, "dim": self.dim}

    @classmethod
    def from_json(cls, data: Mapping) -> "ValueGroup":
        return cls(data["kind"], int(data.get("dim", 1)))


INTEGERS = ValueGroup("integers")
RATIONALS = ValueGroup("rationals")
TORUS = ValueGroup("torus")


def integer_vectors(dim: int) -> ValueGroup:
    return ValueGroup("integer_vectors", dim)


def rational_vectors(dim: int) -> ValueGroup:
    return ValueGroup("rational_vectors", dim)


def _infer_group(values: Iterable[object]) -> ValueGroup:
    for v in values:
        if isinstance(v, (list, tuple)):
            return rational_vectors(len(v))
        break
    return RATIONALS


class TProducing:
    """The unique sparse t-table of a zero-at-empty polynomial mapping.

    Keys are nonempty subsets of {1..r} of cardinality <= degree; absent keys
    mean zero.  Zero values are dropped on construction, so two t-tables are
    equal exactly when they define the same mapping.
    """

    __slots__ = ("group", "degree", "r", "table", "_rows")

    def __init__(
        self,
        group: ValueGroup,
        degree: int,
        r: int,
        table: Mapping[FiniteSet, Value] | Iterable[tuple[FiniteSet, Value]],
    ) -> None:
        if degree < 1:
            raise ValueError(f"degree must be >= 1, got {degree}")
        if r < 1:
            raise ValueError(f"r must be >= 1, got {r}")
        items = table.items() if isinstance(table, Mapping) else table
        norm: dict[FiniteSet, Value] = {}
        for key, val in items:
            key = key if isinstance(key, FiniteSet) else FiniteSet(key)
            if not key or len(key) > degree or not key.within(r):
                raise ValueError(f"illegal t-table key {key} for degree {degree}, r {r}")
            val = group.normalize(val)
            if not group.is_zero(val):
                norm[key] = val
        self.group = group
        self.degree = degree
        self.r = r
        self.table = norm
        self._rows = tuple((frozenset(k.elements), v) for k, v in norm.items())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TProducing):
            return NotImplemented
        return (
            self.group == other.group
            and self.degree == other.degree
            and self.r == other.r
            and self.table == other.table
        )

    def __repr__(self) -> str:
        return f"TProducing(d={self.degree}, r={self.r}, {len(self.table)} keys)"

    def items(self) -> Iterator[tuple[FiniteSet, Value]]:
        return iter(sorted(self.table.items(), key=lambda kv: kv[0].key()))

    def value(self, key: FiniteSet) -> Value:
        return self.table.get(key, self.group.zero())

    def eval(self, alpha: FiniteSet) -> Value:
        if not alpha.within(self.r):
            raise ValueError(f"{alpha} is not a subset of [1,{self.r}]")
        members = frozenset(alpha.elements)
        total = self.group.zero()
        for keyset, val in self._rows:
            if keyset <= members:
                total = self.group.add(total, val)
        return total

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "r": self.r,
            "group": self.group.to_json(),
            "entries": [
                {"key": k.to_json(), "value": self.group.format_value(v)}
                for k, v in self.items()
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "TProducing":
        if "group" in data:
            group = ValueGroup.from_json(data["group"])
        else:
            group = _infer_group(e["value"] for e in data["entries"])
        entries = [
            (FiniteSet(e["key"]), group.parse_value(e["value"])) for e in data["entries"]
        ]
        return cls(group, int(data["degree"]), int(data["r"]), entries)


class QProducing:
    """A sparse q-table over ordered d-tuples; one of many for its mapping."""

    __slots__ = ("group", "degree", "r", "table")

    def __init__(
        self,
        group: ValueGroup,
        degree: int,
        r: int,
        table: Mapping[tuple[int, ...], Value] | Iterable[tuple[tuple[int, ...], Value]],
    ) -> None:
        if degree < 1:
            raise ValueError(f"degree must be >= 1, got {degree}")
        if r < 1:
            raise ValueError(f"r must be >= 1, got {r}")
        items = table.items() if isinstance(table, Mapping) else table
        norm: dict[tuple[int, ...], Value] = {}
        for key, val in items:
            key = tuple(int(a) for a in key)
            if len(key) != degree or any(a < 1 or a > r for a in key):
                raise ValueError(f"illegal q-table key {key} for degree {degree}, r {r}")
            val = group.normalize(val)
            if not group.is_zero(val):
                norm[key] = val
        self.group = group
        self.degree = degree
        self.r = r
        self.table = norm

    def __repr__(self) -> str:
        return f"QProducing(d={self.degree}, r={self.r}, {len(self.table)} keys)"

    def eval(self, alpha: FiniteSet) -> Value:
        """Sum of table values over all d-tuples with entries in alpha."""
        if not alpha.within(self.r):
            raise ValueError(f"{alpha} is not a subset of [1,{self.r}]")
        members = frozenset(alpha.elements)
        total = self.group.zero()
        for key, val in self.table.items():
            if members.issuperset(key):
                total = self.group.add(total, val)
        return total


def t_from_q(qp: QProducing) -> TProducing:
    """Collapse a q-table to the canonical t-table.

    The t-value at a key is the sum of q-values over all tuples whose entry
    set is exactly that key; evaluation is preserved at every subset.
    """
    acc: dict[FiniteSet, Value] = {}
    group = qp.group
    for key, val in qp.table.items():
        u = FiniteSet(key)
        acc[u] = group.add(acc.get(u, group.zero()), val)
    return TProducing(group, qp.degree, qp.r, acc)


def q_from_t(tp: TProducing) -> QProducing:
    """One valid q-table for a t-table: pad each key to a d-tuple.

    The chosen tuple for a key repeats the key's maximum; any choice with the
    right entry set works, and t_from_q inverts this one exactly.
    """
    table: dict[tuple[int, ...], Value] = {}
    group = tp.group
    for key, val in tp.table.items():
        elems = key.elements
        padded = elems + (elems[-1],) * (tp.degree - len(elems))
        table[padded] = group.add(table.get(padded, group.zero()), val)
    return QProducing(group, tp.degree, tp.r, table)


class SetMapping:
    """Adapter giving an arbitrary function on finite sets the mapping surface.

    The shared mapping protocol is: callable on a FiniteSet, with attributes
    ``r`` (ground interval size), ``group``, and ``excluded`` (elements removed
    from the domain, used by derivatives).
    """

    __slots__ = ("func", "r", "group", "excluded")

    def __init__(
        self,
        func: Callable[[FiniteSet], Value],
        r: int,
        group: ValueGroup = RATIONALS,
        excluded: frozenset[int] = frozenset(),
    ) -> None:
        self.func = func
        self.r = r
        self.group = group
        self.excluded = excluded

    def __call__(self, alpha: FiniteSet) -> Value:
        return self.func(alpha)


class SetPolynomial:
    """A zero-at-empty polynomial mapping, canonically stored as its t-table."""

    __slots__ = ("tprod",)

    def __init__(self, tprod: TProducing) -> None:
        self.tprod = tprod

    @property
    def group(self) -> ValueGroup:
        return self.tprod.group

    @property
    def degree(self) -> int:
        return self.tprod.degree

    @property
    def r(self) -> int:
        return self.tprod.r

    @property
    def excluded(self) -> frozenset[int]:
        return frozenset()

    def __call__(self, alpha: FiniteSet) -> Value:
        return self.tprod.eval(alpha)

    def eval(self, alpha: FiniteSet) -> Value:
        return self.tprod.eval(alpha)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SetPolynomial):
            return NotImplemented
        return self.tprod == other.tprod

    def __repr__(self) -> str:
        return f"SetPolynomial({self.tprod!r})"

    def __add__(self, other: "SetPolynomial") -> "SetPolynomial":
        if self.group != other.group or self.r != other.r:
            raise ValueError("mismatched value groups or ground intervals")
        group = self.group
        table = dict(self.tprod.table)
        for key, val in other.tprod.table.items():
            table[key] = group.add(table.get(key, group.zero()), val)
        return SetPolynomial(
            TProducing(group, max(self.degree, other.degree), self.r, table)
        )

    def __neg__(self) -> "SetPolynomial":
        group = self.group
        table = {k: group.neg(v) for k, v in self.tprod.table.items()}
        return SetPolynomial(TProducing(group, self.degree, self.r, table))

    @classmethod
    def linear(cls, seeds: Sequence[Value], group: ValueGroup = RATIONALS) -> "SetPolynomial":
        """Degree-1 mapping alpha -> sum of seeds[i-1] over i in alpha."""
        r = len(seeds)
        table = {FiniteSet([i + 1]): seeds[i] for i in range(r)}
        return cls(TProducing(group, 1, r, table))

    @classmethod
    def from_tproducing(cls, tp: TProducing) -> "SetPolynomial":
        return cls(tp)

    @classmethod
    def from_qproducing(cls, qp: QProducing) -> "SetPolynomial":
        return cls(t_from_q(qp))

    @classmethod
    def from_values(
        cls,
        func: Callable[[FiniteSet], Value],
        r: int,
        degree: int,
        group: ValueGroup = RATIONALS,
    ) -> "SetPolynomial":
        """Recover the unique t-table of a mapping by subset-lattice inversion.

        The alternating sum over sub-subsets isolates each table entry; this
        inverts evaluation for every polynomial mapping of degree <= `degree`
        and is used as an independent reconstruction path in verification.
        """
        table: dict[FiniteSet, Value] = {}
        for u in nonempty_subsets(r, max_card=degree):
            total = group.zero()
            for card in range(0, len(u) + 1):
                for sub in combinations(u.elements, card):
                    v = func(FiniteSet(sub))
                    if (len(u) - card) % 2:
                        v = group.neg(v)
                    total = group.add(total, v)
            if not group.is_zero(total):
                table[u] = total
        return cls(TProducing(group, degree, r, table))

    def homogeneous_components(self) -> list["SetPolynomial"]:
        """Split by key cardinality; the nonzero components sum back to self."""
        by_card: dict[int, dict[FiniteSet, Value]] = {}
        for key, val in self.tprod.table.items():
            by_card.setdefault(len(key), {})[key] = val
        return [
            SetPolynomial(TProducing(self.group, card, self.r, table))
            for card, table in sorted(by_card.items())
        ]

    def vip_image(self) -> set:
        """The image over all nonempty subsets, duplicates merged."""
        if self.group.kind not in ("integers", "integer_vectors"):
            raise ValueError("image sets are defined for integer-valued mappings")
        return {self.eval(alpha) for alpha in nonempty_subsets(self.r)}

    def restricted(self, B: DisjointCollection | Iterable[DisjointCollection]) -> "SetPolynomial":
        return restrict(self, B)

    def to_json(self) -> dict:
        return self.tprod.to_json()

    @classmethod
    def from_json(cls, data: Mapping) -> "SetPolynomial":
        return cls(TProducing.from_json(data))


def linear_producing(phi: SetPolynomial) -> list[Value]:
    """The values at singletons, which determine a degree-1 mapping."""
    return [phi.eval(FiniteSet([i])) for i in range(1, phi.r + 1)]


def derive(mapping, beta: FiniteSet) -> SetMapping:
    """The beta-derivative alpha -> phi(alpha u beta) - phi(alpha).

    Returned as a first-class mapping on the ground interval with beta removed
    from its domain; evaluating at a set meeting beta is a domain error.
    """
    if not beta:
        raise ValueError("derivative direction must be nonempty")
    group = getattr(mapping, "group", RATIONALS)
    excluded = frozenset(getattr(mapping, "excluded", frozenset())) | set(beta.elements)

    def f(alpha: FiniteSet) -> Value:
        if not alpha.isdisjoint(beta):
            raise ValueError(f"{alpha} meets the derivative direction {beta}")
        return group.sub(mapping(alpha | beta), mapping(alpha))

    return SetMapping(f, mapping.r, group, excluded)


@dataclass(frozen=True)
class DegreeCheck:
    """Result of a derivative-criterion degree check."""

    ok: bool
    exhaustive: bool
    families_checked: int
    counterexample: tuple | None = None

    def __bool__(self) -> bool:
        return self.ok


def _disjoint_families(
    pool: Sequence[int], count: int, max_block_card: int | None = None
) -> Iterator[tuple[FiniteSet, ...]]:
    """Unordered families of `count` pairwise disjoint nonempty subsets of pool."""
    elems = tuple(sorted(pool))
    n = len(elems)
    blocks: list[list[int]] = []

    def rec(i: int) -> Iterator[tuple[FiniteSet, ...]]:
        if i == n:
            if len(blocks) == count:
                yield tuple(FiniteSet(b) for b in blocks)
            return
        if len(blocks) < count:
            blocks.append([elems[i]])
            yield from rec(i + 1)
            blocks.pop()
        for b in blocks:
            if max_block_card is None or len(b) < max_block_card:
                b.append(elems[i])
                yield from rec(i + 1)
                b.pop()
        # leave elems[i] unused
        yield from rec(i + 1)

    yield from rec(0)


def iterated_difference(mapping, family: Sequence[FiniteSet], alpha: FiniteSet) -> Value:
    """Alternating sum realizing the iterated derivative along the family."""
    group = getattr(mapping, "group", RATIONALS)
    k = len(family)
    total = group.zero()
    for mask in range(1 << k):
        s = alpha
        bits = 0
        for i in range(k):
            if mask >> i & 1:
                s = s | family[i]
                bits += 1
        v = mapping(s)
        if (k - bits) % 2:
            v = group.neg(v)
        total = group.add(total, v)
    return total


def degree_verify(
    mapping,
    d: int,
    max_families: int | None = None,
    max_block_card: int | None = None,
) -> DegreeCheck:
    """Check the degree-<= d criterion over the mapping's ground interval.

    Exhaustive over all families of d+1 pairwise disjoint nonempty subsets and
    all evaluation points when the effective ground has at most 8 elements.
    For larger grounds the default caps the family count and block size and
    reports exhaustive=False; pass explicit caps (or None) to override.
    """
    if d < 0:
        raise ValueError(f"d must be >= 0, got {d}")
    group = getattr(mapping, "group", RATIONALS)
    excluded = frozenset(getattr(mapping, "excluded", frozenset()))
    pool = [i for i in range(1, mapping.r + 1) if i not in excluded]
    capped = False
    if len(pool) > 8 and max_families is None:
        max_families = 20000
        max_block_card = 2 if max_block_card is None else max_block_card
        capped = True
    rest_cache: dict[frozenset[int], list[FiniteSet]] = {}
    families = 0
    for family in _disjoint_families(pool, d + 1, max_block_card):
        if max_families is not None and families >= max_families:
            return DegreeCheck(True, False, families)
        used = frozenset(e for b in family for e in b)
        if used not in rest_cache:
            rest = [e for e in pool if e not in used]
            rest_cache[used] = [
                FiniteSet(combo)
                for card in range(len(rest) + 1)
                for combo in combinations(rest, card)
            ]
        for alpha in rest_cache[used]:
            val = iterated_difference(mapping, family, alpha)
            if not group.is_zero(val):
                return DegreeCheck(False, not capped, families, (family, alpha, val))
        families += 1
    return DegreeCheck(True, not capped, families)


def restrict(
    phi: SetPolynomial, B: DisjointCollection | Iterable[DisjointCollection]
) -> SetPolynomial:
    """The subpolynomial on a disjoint collection, over block indices {1..s}.

    A q-table for the result assigns to a block tuple the sum of the source
    q-table over element tuples drawn from those blocks; it is converted to
    the canonical t-table.  For every index set gamma, the result at gamma
    equals phi at the union of the selected blocks.

    A family of collections is first collapsed to its induced collection (one
    block per member).
    """
    if not isinstance(B, DisjointCollection):
        B = induced_collection(B)
    if not B.ground().within(phi.r):
        raise ValueError(f"collection ground exceeds [1,{phi.r}]")
    group = phi.group
    owner = {e: i for i, block in enumerate(B.blocks, 1) for e in block}
    qp = q_from_t(phi.tprod)
    table: dict[tuple[int, ...], Value] = {}
    for key, val in qp.table.items():
        idx = tuple(owner.get(a, 0) for a in key)
        if 0 in idx:
            continue
        table[idx] = group.add(table.get(idx, group.zero()), val)
    restricted_q = QProducing(group, phi.degree, B.size, table)
    return SetPolynomial(t_from_q(restricted_q))
