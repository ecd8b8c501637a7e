"""Bracket (generalized) polynomials: exact evaluation and attribute calculus.

A generalized polynomial is built from conventional polynomials by addition,
multiplication, and the integer-part bracket [.] (floor, rounding toward
minus infinity, so that [x] = -[-x] - 1 for non-integers).  Three attributes
of a representation are tracked:

* height   - the maximum nesting depth of brackets (0 for conventional);
* width    - over the top-level sum of products, the total count of bracketed
  factors plus one per summand carrying a conventional factor, maximized with
  the widths inside each bracket;
* degree   - total degree, computed with deg[f] = deg f, summing over the
  factors of a product and maximizing over summands.

Attributes describe the representation at hand; no attempt is made to search
for an equivalent representation with smaller attributes.  Width in
particular admits a second reading when a sum appears under a bracket; this
module follows the recursive sum-of-(factor counts) rule, which reproduces
the pinned example ([[x^2+1]x][x^3+2x]x + [x^2](x+1) + x^3 has height 2,
width 6, degree 7), and documents the alternative in the README.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iter_product
from typing import Iterable, Mapping, Sequence, Union

from .sets import FiniteSet
from .setpoly import RATIONALS, SetPolynomial, ValueGroup

Scalar = Union[int, Fraction, float]


def fractional_norm(x: Scalar):
    """Distance from x to the nearest integer, in [0, 1/2]; exact on rationals."""
    if isinstance(x, float):
        f = x - math.floor(x)
        return min(f, 1.0 - f)
    f = Fraction(x)
    f = f - math.floor(f)
    return min(f, 1 - f)


class Poly:
    """A conventional multivariate polynomial with exact rational coefficients.

    Stored as a sorted tuple of (exponent-tuple, coefficient) terms with zero
    coefficients dropped, so equality and hashing agree with mathematical
    equality.
    """

    __slots__ = ("nvars", "terms")

    def __init__(
        self,
        nvars: int,
        terms: Mapping[tuple[int, ...], Scalar] | Iterable[tuple[tuple[int, ...], Scalar]],
    ) -> None:
        if nvars < 1:
            raise ValueError("a polynomial needs at least one variable")
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[tuple[int, ...], Fraction] = {}
        for exps, coeff in items:
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent tuple {exps} for {nvars} variables")
            c = acc.get(exps, Fraction(0)) + Fraction(coeff)
            if c == 0:
                acc.pop(exps, None)
            else:
                acc[exps] = c
        self.nvars = nvars
        self.terms = tuple(sorted(acc.items()))

    @classmethod
    def zero(cls, nvars: int = 1) -> "Poly":
        return cls(nvars, {})

    @classmethod
    def const(cls, c: Scalar, nvars: int = 1) -> "Poly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, i: int = 0, nvars: int = 1, power: int = 1, coeff: Scalar = 1) -> "Poly":
        """coeff * x_i ** power."""
        exps = [0] * nvars
        exps[i] = power
        return cls(nvars, {tuple(exps): coeff})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.nvars, self.terms))

    def __repr__(self) -> str:
        if not self.terms:
            return "Poly(0)"

        def mono(exps, c):
            parts = [str(c)] if (c != 1 or not any(exps)) else []
            for i, e in enumerate(exps):
                if e == 1:
                    parts.append(f"x{i}")
                elif e > 1:
                    parts.append(f"x{i}^{e}")
            return "*".join(parts)

        return "Poly(" + " + ".join(mono(e, c) for e, c in self.terms) + ")"

    def __add__(self, other: "Poly") -> "Poly":
        if self.nvars != other.nvars:
            raise ValueError("variable count mismatch")
        return Poly(self.nvars, list(self.terms) + list(other.terms))

    def __neg__(self) -> "Poly":
        return Poly(self.nvars, [(e, -c) for e, c in self.terms])

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        if self.nvars != other.nvars:
            raise ValueError("variable count mismatch")
        out: list[tuple[tuple[int, ...], Fraction]] = []
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                out.append((tuple(a + b for a, b in zip(e1, e2)), c1 * c2))
        return Poly(self.nvars, out)

    def scale(self, c: Scalar) -> "Poly":
        return Poly(self.nvars, [(e, Fraction(c) * k) for e, k in self.terms])

    def eval(self, point: Sequence[Scalar]) -> Fraction:
        if len(point) != self.nvars:
            raise ValueError(f"expected {self.nvars} coordinates, got {len(point)}")
        total = Fraction(0)
        for exps, coeff in self.terms:
            term = coeff
            for x, e in zip(point, exps):
                if e:
                    term *= Fraction(x) ** e
            total += term
        return total

    @property
    def total_degree(self) -> int:
        """Total degree; 0 for the zero polynomial by convention."""
        if not self.terms:
            return 0
        return max(sum(e) for e, _ in self.terms)

    @property
    def constant_term(self) -> Fraction:
        for exps, coeff in self.terms:
            if not any(exps):
                return coeff
        return Fraction(0)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def to_json(self) -> dict:
        return {
            "op": "poly",
            "vars": self.nvars,
            "coeffs": {
                ",".join(str(e) for e in exps): str(c) for exps, c in self.terms
            },
        }


@dataclass(frozen=True)
class GPAttributes:
    height: int
    width: int
    degree: int


class GenPoly:
    """Base of the bracket-polynomial AST; immutable and freely shareable."""

    __slots__ = ()

    @property
    def nvars(self) -> int:
        raise NotImplementedError

    def eval(self, point: Sequence[Scalar] | Scalar) -> Fraction:
        if not isinstance(point, (tuple, list)):
            point = (point,)
        return self._eval(tuple(point))

    def _eval(self, point: tuple) -> Fraction:
        raise NotImplementedError

    def __add__(self, other: "GenPoly") -> "GenPoly":
        return gp_sum([self, other])

    def __mul__(self, other: "GenPoly") -> "GenPoly":
        return gp_prod([self, other])

    def __neg__(self) -> "GenPoly":
        return gp_prod([GPPoly(Poly.const(-1, self.nvars)), self])

    def attributes(self) -> GPAttributes:
        return GPAttributes(_height(self), _width(self), _degree(self))

    def is_constant_free(self) -> bool:
        """True when every polynomial leaf of this representation vanishes at 0."""
        return _constant_free(self)

    def is_open(self) -> bool:
        """True when no top-level summand is a bare product of brackets."""
        return all(_conventional_part(factors) is not None for factors in _summands(self))

    def normal_form(self) -> "NormalForm":
        return to_normal_form(self)

    def to_json(self) -> dict:
        raise NotImplementedError


class GPPoly(GenPoly):
    __slots__ = ("poly",)

    def __init__(self, poly: Poly) -> None:
        self.poly = poly

    @property
    def nvars(self) -> int:
        return self.poly.nvars

    def _eval(self, point: tuple) -> Fraction:
        return self.poly.eval(point)

    def __repr__(self) -> str:
        return repr(self.poly)

    def __eq__(self, other) -> bool:
        return isinstance(other, GPPoly) and self.poly == other.poly

    def __hash__(self) -> int:
        return hash(("gp", self.poly))

    def to_json(self) -> dict:
        return self.poly.to_json()


class GPSum(GenPoly):
    __slots__ = ("args",)

    def __init__(self, args: Sequence[GenPoly]) -> None:
        args = tuple(args)
        if not args:
            raise ValueError("empty sum")
        if len({a.nvars for a in args}) != 1:
            raise ValueError("variable count mismatch in sum")
        self.args = args

    @property
    def nvars(self) -> int:
        return self.args[0].nvars

    def _eval(self, point: tuple) -> Fraction:
        return sum((a._eval(point) for a in self.args), Fraction(0))

    def __repr__(self) -> str:
        return "(" + " + ".join(repr(a) for a in self.args) + ")"

    def __eq__(self, other) -> bool:
        return isinstance(other, GPSum) and self.args == other.args

    def __hash__(self) -> int:
        return hash(("sum", self.args))

    def to_json(self) -> dict:
        return {"op": "sum", "args": [a.to_json() for a in self.args]}


class GPProd(GenPoly):
    __slots__ = ("args",)

    def __init__(self, args: Sequence[GenPoly]) -> None:
        args = tuple(args)
        if not args:
            raise ValueError("empty product")
        if len({a.nvars for a in args}) != 1:
            raise ValueError("variable count mismatch in product")
        self.args = args

    @property
    def nvars(self) -> int:
        return self.args[0].nvars

    def _eval(self, point: tuple) -> Fraction:
        total = Fraction(1)
        for a in self.args:
            total *= a._eval(point)
        return total

    def __repr__(self) -> str:
        return "*".join(
            repr(a) if not isinstance(a, GPSum) else f"({a!r})" for a in self.args
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, GPProd) and self.args == other.args

    def __hash__(self) -> int:
        return hash(("prod", self.args))

    def to_json(self) -> dict:
        return {"op": "prod", "args": [a.to_json() for a in self.args]}


class GPBracket(GenPoly):
    __slots__ = ("inner",)

    def __init__(self, inner: GenPoly) -> None:
        self.inner = inner

    @property
    def nvars(self) -> int:
        return self.inner.nvars

    def _eval(self, point: tuple) -> Fraction:
        return Fraction(math.floor(self.inner._eval(point)))

    def __repr__(self) -> str:
        return f"[{self.inner!r}]"

    def __eq__(self, other) -> bool:
        return isinstance(other, GPBracket) and self.inner == other.inner

    def __hash__(self) -> int:
        return hash(("bracket", self.inner))

    def to_json(self) -> dict:
        return {"op": "bracket", "arg": self.inner.to_json()}


def gp_poly(poly: Poly) -> GenPoly:
    return GPPoly(poly)


def gp_sum(args: Sequence[GenPoly]) -> GenPoly:
    flat: list[GenPoly] = []
    for a in args:
        flat.extend(a.args if isinstance(a, GPSum) else (a,))
    return flat[0] if len(flat) == 1 else GPSum(flat)


def gp_prod(args: Sequence[GenPoly]) -> GenPoly:
    flat: list[GenPoly] = []
    for a in args:
        flat.extend(a.args if isinstance(a, GPProd) else (a,))
    return flat[0] if len(flat) == 1 else GPProd(flat)


def gp_bracket(arg: GenPoly) -> GenPoly:
    return GPBracket(arg)


def _bracket_free(gp: GenPoly) -> bool:
    if isinstance(gp, GPPoly):
        return True
    if isinstance(gp, GPBracket):
        return False
    return all(_bracket_free(a) for a in gp.args)


def _as_poly(gp: GenPoly) -> Poly:
    """Fold a bracket-free subtree into one conventional polynomial."""
    if isinstance(gp, GPPoly):
        return gp.poly
    if isinstance(gp, GPSum):
        out = Poly.zero(gp.nvars)
        for a in gp.args:
            out = out + _as_poly(a)
        return out
    if isinstance(gp, GPProd):
        out = Poly.const(1, gp.nvars)
        for a in gp.args:
            out = out * _as_poly(a)
        return out
    raise ValueError("subtree contains a bracket")


def _summands(gp: GenPoly) -> list[list[GenPoly]]:
    """Top-level sum-of-products view, distributing only around brackets.

    Each summand is a list of factors, where a factor is either a bracket or a
    bracket-free subtree (kept atomic: a conventional factor such as x + x^2
    is one factor, not two summands).  Products are distributed over sums
    exactly where a sum contains a bracket, which is the minimum flattening
    that brings the representation into sum-of-products shape.
    """
    if _bracket_free(gp):
        return [[gp]]
    if isinstance(gp, GPBracket):
        return [[gp]]
    if isinstance(gp, GPSum):
        out: list[list[GenPoly]] = []
        for a in gp.args:
            out.extend(_summands(a))
        return out
    # product: cross the summand lists of its factors
    factor_expansions = [_summands(a) for a in gp.args]
    out = []
    for choice in iter_product(*factor_expansions):
        merged: list[GenPoly] = []
        for factors in choice:
            merged.extend(factors)
        out.append(merged)
    return out


def _conventional_part(factors: Sequence[GenPoly]) -> Poly | None:
    """Product of the bracket-free factors of a summand, or None if absent."""
    conv = [f for f in factors if not isinstance(f, GPBracket)]
    if not conv:
        return None
    out = Poly.const(1, factors[0].nvars)
    for f in conv:
        out = out * _as_poly(f)
    return out


def _height(gp: GenPoly) -> int:
    if isinstance(gp, GPPoly):
        return 0
    if isinstance(gp, GPBracket):
        return 1 + _height(gp.inner)
    return max(_height(a) for a in gp.args)


def _degree(gp: GenPoly) -> int:
    if isinstance(gp, GPPoly):
        return gp.poly.total_degree
    if isinstance(gp, GPBracket):
        return _degree(gp.inner)
    if isinstance(gp, GPSum):
        return max(_degree(a) for a in gp.args)
    return sum(_degree(a) for a in gp.args)


def _width(gp: GenPoly) -> int:
    if _bracket_free(gp):
        return 1
    top = 0
    inner = 1
    for factors in _summands(gp):
        brackets = [f for f in factors if isinstance(f, GPBracket)]
        top += len(brackets) + (1 if len(brackets) < len(factors) else 0)
        for b in brackets:
            inner = max(inner, _width(b.inner))
    return max(top, inner)


def _constant_free(gp: GenPoly) -> bool:
    if isinstance(gp, GPPoly):
        return gp.poly.constant_term == 0
    if isinstance(gp, GPBracket):
        return _constant_free(gp.inner)
    return all(_constant_free(a) for a in gp.args)


def attributes(gp: GenPoly) -> GPAttributes:
    return gp.attributes()


def is_constant_free(gp: GenPoly) -> bool:
    return gp.is_constant_free()


def is_open(gp: GenPoly) -> bool:
    return gp.is_open()


class NotOpenError(ValueError):
    """Raised when a closed summand blocks the sum-of-products normal form."""

    def __init__(self, summand: Sequence[GenPoly]) -> None:
        self.summand = tuple(summand)
        pretty = "*".join(f"[{f.inner!r}]" for f in self.summand)
        super().__init__(f"closed summand {pretty} has no conventional factor")


@dataclass(frozen=True)
class NFSummand:
    """One summand [f_1]...[f_l] * p with p a conventional polynomial."""

    closed_factors: tuple[GenPoly, ...]
    open_factor: Poly

    def eval(self, point: Sequence[Scalar]) -> Fraction:
        total = self.open_factor.eval(point)
        for f in self.closed_factors:
            total *= Fraction(math.floor(f.eval(point)))
        return total


@dataclass(frozen=True)
class NormalForm:
    summands: tuple[NFSummand, ...]

    def eval(self, point: Sequence[Scalar] | Scalar) -> Fraction:
        if not isinstance(point, (tuple, list)):
            point = (point,)
        return sum((s.eval(point) for s in self.summands), Fraction(0))

    def to_genpoly(self) -> GenPoly:
        parts: list[GenPoly] = []
        for s in self.summands:
            factors: list[GenPoly] = [GPBracket(f) for f in s.closed_factors]
            factors.append(GPPoly(s.open_factor))
            parts.append(gp_prod(factors))
        return gp_sum(parts)


def to_normal_form(gp: GenPoly) -> NormalForm:
    """Rewrite an open constant-free representation as closed-products-times-open.

    The contract is evaluation equality, not syntactic uniqueness: a summand's
    conventional factors are folded into a single open factor and nothing else
    is simplified.
    """
    if not gp.is_constant_free():
        raise ValueError("representation is not constant-free")
    out = []
    for factors in _summands(gp):
        conv = _conventional_part(factors)
        if conv is None:
            raise NotOpenError([f for f in factors if isinstance(f, GPBracket)])
        closed = tuple(f.inner for f in factors if isinstance(f, GPBracket))
        out.append(NFSummand(closed, conv))
    return NormalForm(tuple(out))


class ComposedMapping:
    """A bracket polynomial precomposed with an integer-valued set mapping.

    Behaves as a mapping on finite sets (callable, with ``r``, ``group``,
    ``excluded``) and carries the attribute budget of the composition: the
    degree bound multiplies, height and width are inherited.
    """

    __slots__ = ("gp", "phi", "r", "group", "excluded", "degree_bound", "height", "width")

    def __init__(self, gp: GenPoly, phi: SetPolynomial) -> None:
        if phi.group.kind not in ("integers", "integer_vectors"):
            raise ValueError("composition requires an integer-valued set mapping")
        dim = phi.group.dim if phi.group.is_vector else 1
        if dim != gp.nvars:
            raise ValueError(
                f"dimension mismatch: mapping produces {dim} coordinates, "
                f"bracket polynomial expects {gp.nvars}"
            )
        if not gp.is_constant_free():
            raise ValueError("composition requires a constant-free representation")
        attrs = gp.attributes()
        self.gp = gp
        self.phi = phi
        self.r = phi.r
        self.group = RATIONALS
        self.excluded: frozenset[int] = frozenset()
        self.degree_bound = attrs.degree * phi.degree
        self.height = attrs.height
        self.width = attrs.width

    def __call__(self, alpha: FiniteSet) -> Fraction:
        v = self.phi.eval(alpha)
        if not isinstance(v, tuple):
            v = (v,)
        return self.gp.eval(v)

    def is_constant_free(self) -> bool:
        return self.gp.is_constant_free()

    def is_open(self) -> bool:
        return self.gp.is_open()


def compose(gp: GenPoly, phi: SetPolynomial) -> ComposedMapping:
    """The mapping alpha -> gp(phi(alpha)) on finite subsets of [1, r]."""
    return ComposedMapping(gp, phi)


def poly_from_json(data: Mapping) -> Poly:
    coeffs = data.get("coeffs", {})
    keys = [tuple(int(p) for p in key.split(",")) for key in coeffs]
    nvars = int(data.get("vars", max((len(k) for k in keys), default=1)))
    terms = {}
    for key, c in zip(keys, coeffs.values()):
        if len(key) != nvars:
            raise ValueError(f"exponent key {key} does not match vars={nvars}")
        terms[key] = Fraction(str(c))
    return Poly(nvars, terms)


def from_json(data: Mapping) -> GenPoly:
    op = data.get("op")
    if op == "poly":
        return GPPoly(poly_from_json(data))
    if op == "sum":
        return GPSum([from_json(a) for a in data["args"]])
    if op == "prod":
        return GPProd([from_json(a) for a in data["args"]])
    if op == "bracket":
        return GPBracket(from_json(data["arg"]))
    raise ValueError(f"unknown bracket-polynomial op {op!r}")
