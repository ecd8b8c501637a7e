"""Concrete small dynamical systems with exact orbits and return sets.

Three system families are provided: affine skew products on the k-torus, the
translation action on the 3-dimensional 2-step unipotent quotient (upper
triangular 3x3 matrices modulo the integer lattice) in its box coordinates,
and multi-parameter polynomial sequences of such translations.

Rational parameters run exactly via fractions; float parameters run in float
mode and return sets then report a crude accumulated-error budget alongside
their members.  The metric is the maximum of coordinatewise circle distances
in box coordinates.  This is NOT the quotient of a left-invariant metric on
the group; near the base point it is bi-continuous with any compatible
metric, so recurrence-to-the-base-point statements are unaffected up to a
rescaling of the radius.  Distances between arbitrary pairs of points should
be read with that caveat.
"""

from __future__ import annotations

import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .genpoly import (
    GenPoly,
    GPBracket,
    GPPoly,
    Poly,
    fractional_norm,
    gp_prod,
    gp_sum,
)
from .sets import FiniteSet, nonempty_subsets
from .search import (
    BUDGET_HIT,
    DEFAULT_BUDGET,
    EXHAUSTED,
    FOUND,
    SearchBudget,
    SearchStats,
    WitnessReport,
    _Clock,
)
from .setpoly import SetPolynomial

Scalar = Union[int, Fraction, float]


def _mod1(x: Scalar) -> Scalar:
    return x - math.floor(x)


def circle_dist(a: Scalar, b: Scalar) -> Scalar:
    f = _mod1(a - b)
    return min(f, 1 - f)


@dataclass(frozen=True)
class TorusPoint:
    """A point of the k-torus, coordinates reduced into [0, 1)."""

    coords: tuple[Scalar, ...]

    def __init__(self, coords: Iterable[Scalar]) -> None:
        object.__setattr__(self, "coords", tuple(_mod1(c) for c in coords))

    @property
    def k(self) -> int:
        return len(self.coords)


def torus_metric(p: TorusPoint, q: TorusPoint) -> Scalar:
    if p.k != q.k:
        raise ValueError("dimension mismatch")
    return max(circle_dist(a, b) for a, b in zip(p.coords, q.coords))


@dataclass(frozen=True)
class AffineSkew:
    """x -> (x1 + a1, x2 + c21 x1 + a2, ...) with integer lower coefficients.

    ``rows[i]`` holds the i coefficients feeding coordinate i (0-based), so
    ``rows[0]`` is empty and coordinate i updates from the *input* coordinates
    0..i-1 simultaneously.
    """

    k: int
    shifts: tuple[Scalar, ...]
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.k < 1 or len(self.shifts) != self.k or len(self.rows) != self.k:
            raise ValueError("inconsistent skew dimensions")
        for i, row in enumerate(self.rows):
            if len(row) != i:
                raise ValueError(f"row {i} must have {i} coefficients")

    @classmethod
    def rotation(cls, alpha: Scalar) -> "AffineSkew":
        return cls(1, (alpha,), ((),))

    @classmethod
    def make(cls, shifts: Sequence[Scalar], rows: Sequence[Sequence[int]] | None = None) -> "AffineSkew":
        k = len(shifts)
        if rows is None:
            rows = [[0] * i for i in range(k)]
        return cls(k, tuple(shifts), tuple(tuple(int(c) for c in r) for r in rows))

    def step(self, x: TorusPoint) -> TorusPoint:
        c = x.coords
        new = []
        for i in range(self.k):
            v = c[i] + self.shifts[i]
            for j, a in enumerate(self.rows[i]):
                if a:
                    v += a * c[j]
            new.append(v)
        return TorusPoint(new)

    def inverse_step(self, y: TorusPoint) -> TorusPoint:
        c = y.coords
        out: list[Scalar] = []
        for i in range(self.k):
            v = c[i] - self.shifts[i]
            for j, a in enumerate(self.rows[i]):
                if a:
                    v -= a * out[j]
            out.append(_mod1(v))
        return TorusPoint(out)

    def iterate(self, x: TorusPoint, n: int) -> TorusPoint:
        step = self.step if n >= 0 else self.inverse_step
        for _ in range(abs(n)):
            x = step(x)
        return x


def skew_step(T: AffineSkew, x: TorusPoint) -> TorusPoint:
    return T.step(x)


def skew_iterate(T: AffineSkew, x: TorusPoint, n: int) -> TorusPoint:
    return T.iterate(x, n)


@dataclass(frozen=True)
class HeisenbergElement:
    """The three free entries of an upper unipotent 3x3 matrix.

    Group law: (x,y,z)(x',y',z') = (x+x', y+y', z+z'+x y'); identity (0,0,0).
    """

    x: Scalar = 0
    y: Scalar = 0
    z: Scalar = 0

    def mul(self, other: "HeisenbergElement") -> "HeisenbergElement":
        return HeisenbergElement(
            self.x + other.x, self.y + other.y, self.z + other.z + self.x * other.y
        )

    __matmul__ = mul

    def inverse(self) -> "HeisenbergElement":
        return HeisenbergElement(-self.x, -self.y, -self.z + self.x * self.y)

    def pow(self, n: int) -> "HeisenbergElement":
        """Closed form (n x, n y, n z + binom(n,2) x y); agrees with iteration."""
        binom = n * (n - 1) // 2
        return HeisenbergElement(n * self.x, n * self.y, n * self.z + binom * self.x * self.y)

    def is_lattice(self) -> bool:
        return all(Fraction(c).denominator == 1 for c in (self.x, self.y, self.z))

    def to_json(self) -> list[str]:
        return [str(self.x), str(self.y), str(self.z)]


IDENTITY = HeisenbergElement(0, 0, 0)


def heis_mul(g: HeisenbergElement, h: HeisenbergElement) -> HeisenbergElement:
    return g.mul(h)


def heis_pow(g: HeisenbergElement, n: int) -> HeisenbergElement:
    return g.pow(n)


@dataclass(frozen=True)
class NilPoint:
    """Box coordinates in [0,1)^3 of a lattice coset."""

    coords: tuple[Scalar, Scalar, Scalar]

    def __init__(self, coords: Iterable[Scalar]) -> None:
        coords = tuple(coords)
        if len(coords) != 3:
            raise ValueError("expected three coordinates")
        if any(c < 0 or c >= 1 for c in coords):
            raise ValueError("coordinates must lie in [0,1)")
        object.__setattr__(self, "coords", coords)


BASE_POINT = NilPoint((0, 0, 0))


def malcev_reduce(g: HeisenbergElement) -> tuple[NilPoint, HeisenbergElement]:
    """Factor g = gamma * q with gamma in the integer lattice, q in [0,1)^3.

    Reduction proceeds left to right (x, then y, then z), carrying the group
    law's correction term into the z slot; the returned pair satisfies
    gamma.mul(q) == g exactly in rational mode.
    """
    a = math.floor(g.x)
    b = math.floor(g.y)
    t = g.z - a * (g.y - b)
    c = math.floor(t)
    q = NilPoint((g.x - a, g.y - b, t - c))
    return q, HeisenbergElement(a, b, c)


def nil_metric(p: NilPoint, q: NilPoint) -> Scalar:
    return max(circle_dist(a, b) for a, b in zip(p.coords, q.coords))


@dataclass(frozen=True)
class PolySequence:
    """g(n) = T1^(p1(n)) ... Tb^(pb(n)) with integer-valued zero-at-0 exponents."""

    generators: tuple[HeisenbergElement, ...]
    exponents: tuple[Poly, ...]
    nvars: int = 1

    def __post_init__(self) -> None:
        if len(self.generators) != len(self.exponents):
            raise ValueError("one exponent polynomial per generator is required")
        for p in self.exponents:
            if p.nvars != self.nvars:
                raise ValueError("exponent variable count mismatch")
            if p.constant_term != 0:
                raise ValueError("exponent polynomials must vanish at 0")

    @property
    def naive_degree(self) -> int:
        return max((p.total_degree for p in self.exponents), default=0)

    def eval(self, n: Sequence[int] | int) -> HeisenbergElement:
        if not isinstance(n, (tuple, list)):
            n = (n,)
        out = IDENTITY
        for T, p in zip(self.generators, self.exponents):
            e = p.eval(n)
            if e.denominator != 1:
                raise ValueError(f"exponent {p!r} is not integer-valued at {n}")
            out = out.mul(T.pow(int(e)))
        return out


def poly_sequence_eval(g: PolySequence, n: Sequence[int] | int) -> HeisenbergElement:
    return g.eval(n)


def _has_float(*values: Scalar) -> bool:
    return any(isinstance(v, float) for v in values)


class SkewSystem:
    """An affine skew product acting on the k-torus, with a marked point."""

    def __init__(self, T: AffineSkew, x0: TorusPoint | None = None) -> None:
        self.T = T
        self.x0 = x0 if x0 is not None else TorusPoint((0,) * T.k)
        if self.x0.k != T.k:
            raise ValueError("dimension mismatch")
        self.float_mode = _has_float(*T.shifts, *self.x0.coords)

    def system_id(self) -> str:
        return f"skew(k={self.T.k})"

    metric = staticmethod(torus_metric)

    def orbit_from(self, start: TorusPoint, n: int) -> TorusPoint:
        return self.T.iterate(start, n)

    def orbit_point(self, n: int) -> TorusPoint:
        return self.T.iterate(self.x0, n)

    def orbit_range(self, horizon: int) -> Iterator[tuple[int, TorusPoint]]:
        """(n, T^n x0) for n = -horizon..horizon, by cumulative stepping."""
        back = []
        x = self.x0
        for n in range(1, horizon + 1):
            x = self.T.inverse_step(x)
            back.append((-n, x))
        yield from reversed(back)
        yield (0, self.x0)
        x = self.x0
        for n in range(1, horizon + 1):
            x = self.T.step(x)
            yield (n, x)

    def growth_factor(self, horizon: int) -> float:
        coeff = max([1] + [abs(a) for row in self.T.rows for a in row])
        return float((1 + coeff * horizon) ** (self.T.k - 1)) if self.T.k > 1 else 1.0


class HeisenbergSystem:
    """Left translation by a fixed group element, viewed in box coordinates."""

    def __init__(self, T: HeisenbergElement, x0: NilPoint = BASE_POINT) -> None:
        self.T = T
        self.x0 = x0
        self.float_mode = _has_float(T.x, T.y, T.z, *x0.coords)

    def system_id(self) -> str:
        return "heisenberg"

    metric = staticmethod(nil_metric)

    def orbit_from(self, start: NilPoint, n: int) -> NilPoint:
        g = self.T.pow(n).mul(HeisenbergElement(*start.coords))
        return malcev_reduce(g)[0]

    def orbit_point(self, n: int) -> NilPoint:
        return self.orbit_from(self.x0, n)

    def orbit_range(self, horizon: int) -> Iterator[tuple[int, NilPoint]]:
        for n in range(-horizon, horizon + 1):
            yield (n, self.orbit_point(n))

    def growth_factor(self, horizon: int) -> float:
        m = max(1.0, abs(float(self.T.x)), abs(float(self.T.y)), abs(float(self.T.z)))
        return m * m * float(horizon)


class PolySeqSystem:
    """A multi-parameter polynomial sequence of translations with a marked point."""

    def __init__(self, g: PolySequence, x0: NilPoint = BASE_POINT) -> None:
        self.g = g
        self.x0 = x0
        self.float_mode = _has_float(
            *(c for T in g.generators for c in (T.x, T.y, T.z)), *x0.coords
        )

    def system_id(self) -> str:
        return f"polyseq(l={self.g.nvars})"

    metric = staticmethod(nil_metric)

    def orbit_point(self, n: Sequence[int] | int) -> NilPoint:
        elem = self.g.eval(n).mul(HeisenbergElement(*self.x0.coords))
        return malcev_reduce(elem)[0]

    def orbit_range(self, horizon: int) -> Iterator[tuple[tuple[int, ...], NilPoint]]:
        axis = range(-horizon, horizon + 1)
        for n in product(axis, repeat=self.g.nvars):
            yield (n, self.orbit_point(n))

    def growth_factor(self, horizon: int) -> float:
        m = max(
            [1.0]
            + [abs(float(c)) for T in self.g.generators for c in (T.x, T.y, T.z)]
        )
        return m * m * float(horizon) ** max(1, self.g.naive_degree)


System = Union[SkewSystem, HeisenbergSystem, PolySeqSystem]


@dataclass
class ReturnSet:
    """All horizon-box times whose orbit point lies within eps of the base."""

    system_id: str
    x0: tuple
    eps: Scalar
    horizon: int
    members: tuple
    distances: dict
    float_error_budget: float | None = None

    def __contains__(self, n) -> bool:
        return n in self.distances

    def __iter__(self):
        return iter(self.members)

    def to_json(self) -> dict:
        out = {
            "system": self.system_id,
            "x0": [str(c) for c in self.x0],
            "eps": str(self.eps),
            "horizon": self.horizon,
            "members": [list(n) if isinstance(n, tuple) else n for n in self.members],
        }
        if self.float_error_budget is not None:
            out["float_error_budget"] = self.float_error_budget
        return out

    def csv_rows(self) -> Iterator[str]:
        first = self.members[0] if self.members else 0
        width = len(first) if isinstance(first, tuple) else 1
        header = ",".join(f"n{i+1}" for i in range(width)) if width > 1 else "n"
        yield f"{header},distance"
        for n in self.members:
            cell = ",".join(str(c) for c in n) if isinstance(n, tuple) else str(n)
            yield f"{cell},{self.distances[n]}"


def return_set(
    system: System, eps: Scalar, horizon: int, threads: int = 1
) -> ReturnSet:
    """Collect the orbit's eps-returns to the marked point over the horizon box.

    Assembly is an order-preserving filter; with threads > 1 the distance
    computations for closed-form systems run on a worker pool and are merged
    back in canonical order, so the result never depends on scheduling.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    x0 = system.x0
    members = []
    distances = {}
    pairs = system.orbit_range(horizon)
    if threads > 1 and not isinstance(system, SkewSystem):
        items = list(pairs)
        with ThreadPoolExecutor(max_workers=threads) as ex:
            dists = list(
                ex.map(lambda np: system.metric(np[1], x0), items, chunksize=256)
            )
        scan = ((n, d) for (n, _), d in zip(items, dists))
    else:
        scan = ((n, system.metric(p, x0)) for n, p in pairs)
    for n, dist in scan:
        if dist < eps:
            members.append(n)
            distances[n] = dist
    budget = None
    if system.float_mode:
        budget = horizon * sys.float_info.epsilon * system.growth_factor(horizon)
    return ReturnSet(
        system.system_id(),
        tuple(x0.coords),
        eps,
        horizon,
        tuple(members),
        distances,
        budget,
    )


def distality_probe(system: System, x, y, horizon: int) -> Scalar:
    """Minimum orbit-pair distance over |n| <= horizon; a truncated infimum."""
    if x == y:
        raise ValueError("probe points must be distinct")
    best = system.metric(x, y)
    for n in range(-horizon, horizon + 1):
        if n == 0:
            continue
        d = system.metric(system.orbit_from(x, n), system.orbit_from(y, n))
        if d < best:
            best = d
    return best


def vip_return_test(
    system: System,
    g: PolySequence | None,
    phi: SetPolynomial,
    eps: Scalar,
    budget: SearchBudget = DEFAULT_BUDGET,
) -> WitnessReport:
    """First nonempty subset alpha with the g(phi(alpha)) image eps-close to base.

    With no polynomial sequence, phi must be integer-valued and the subset is
    fed to the system's own iteration.  phi vanishes at the empty set, so the
    identity time is excluded by construction.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    clock = _Clock(budget)
    x0 = system.x0

    def distance(alpha: FiniteSet) -> Scalar:
        n = phi.eval(alpha)
        if g is not None:
            elem = g.eval(n).mul(HeisenbergElement(*x0.coords))
            return nil_metric(malcev_reduce(elem)[0], x0)
        if isinstance(n, tuple):
            raise ValueError("vector times need a polynomial sequence")
        return system.metric(system.orbit_point(int(n)), x0)

    for alpha in nonempty_subsets(phi.r):
        if not clock.tick(budget.max_subsets):
            return clock.report(BUDGET_HIT)
        if distance(alpha) < eps:
            verified = distance(alpha) < eps
            return clock.report(FOUND, witness=alpha, verified=verified)
    return clock.report(EXHAUSTED)


@dataclass
class DeltaReport:
    outcome: str
    all_hit: bool
    first_miss: tuple | None
    sequences_checked: int


def delta_hit_test(
    system: System,
    eps: Scalar,
    diff_pool: Sequence[int],
    m: int,
    budget: SearchBudget = DEFAULT_BUDGET,
) -> DeltaReport:
    """Check every increasing m-sequence from the pool for a returning difference.

    A sequence hits when some pairwise difference n_i - n_j (j < i) is an
    eps-return of the marked point.
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    clock = _Clock(budget)
    x0 = system.x0
    checked = 0
    cache: dict[int, bool] = {}

    def returns(n: int) -> bool:
        if n not in cache:
            cache[n] = system.metric(system.orbit_point(n), x0) < eps
        return cache[n]

    for seq in combinations(sorted(set(diff_pool)), m):
        if not clock.tick(budget.max_subsets):
            return DeltaReport(BUDGET_HIT, False, None, checked)
        checked += 1
        if not any(returns(b - a) for a, b in combinations(seq, 2)):
            return DeltaReport(FOUND, False, seq, checked)
    return DeltaReport(EXHAUSTED, True, None, checked)


def _neg(gp: GenPoly) -> GenPoly:
    return gp_prod([GPPoly(Poly.const(-1, gp.nvars)), gp])


def _frac_gp(gp: GenPoly) -> GenPoly:
    return gp_sum([gp, _neg(GPBracket(gp))])


def heisenberg_coordinate_gps(T: HeisenbergElement) -> tuple[GenPoly, GenPoly, GenPoly]:
    """Bracket polynomials in n giving the box coordinates of the n-th orbit point.

    Built from the closed form of powers and the left-to-right reduction: with
    A = a n, B = b n, and Z the z entry of the n-th power, the third
    coordinate is the fractional part of Z - [A] B + [A][B].  Validity is
    checked against the simulator, not assumed; requires exact translation
    parameters.
    """
    for c in (T.x, T.y, T.z):
        if isinstance(c, float):
            raise ValueError("coordinate construction requires rational parameters")
    a, b, c = Fraction(T.x), Fraction(T.y), Fraction(T.z)
    A = Poly(1, {(1,): a})
    B = Poly(1, {(1,): b})
    half_ab = a * b / 2
    Z = Poly(1, {(1,): c - half_ab, (2,): half_ab})
    gp1 = _frac_gp(GPPoly(A))
    gp2 = _frac_gp(GPPoly(B))
    w = gp_sum(
        [
            GPPoly(Z),
            gp_prod([GPPoly(Poly.const(-1, 1)), GPBracket(GPPoly(A)), GPPoly(B)]),
            gp_prod([GPBracket(GPPoly(A)), GPBracket(GPPoly(B))]),
        ]
    )
    gp3 = _frac_gp(w)
    return gp1, gp2, gp3


def _parse_scalar(v, float_mode: bool) -> Scalar:
    x = Fraction(str(v))
    return float(x) if float_mode else x


def system_from_json(data: Mapping, float_mode: bool = False) -> System:
    """Build a system from its JSON description.

    Schemas: {"type":"skew","k":...,"alpha":["p/q",...],"a":[[...]],"x0":[...]},
    {"type":"heisenberg","t":["x","y","z"],"x0":[...]}, and
    {"type":"polyseq","generators":[["x","y","z"],...],
     "exponents":[{"vars":l,"coeffs":{...}},...],"x0":[...]}.
    """
    kind = data.get("type")
    if kind == "skew":
        shifts = [_parse_scalar(v, float_mode) for v in data["alpha"]]
        k = int(data.get("k", len(shifts)))
        if k != len(shifts):
            raise ValueError("k does not match the number of shifts")
        rows = data.get("a")
        rows = None if rows is None else [[int(c) for c in row] for row in rows]
        T = AffineSkew.make(shifts, rows)
        x0 = data.get("x0")
        start = TorusPoint([_parse_scalar(v, float_mode) for v in x0]) if x0 else None
        return SkewSystem(T, start)
    if kind == "heisenberg":
        t = [_parse_scalar(v, float_mode) for v in data["t"]]
        T = HeisenbergElement(*t)
        x0 = data.get("x0")
        start = NilPoint([_parse_scalar(v, float_mode) for v in x0]) if x0 else BASE_POINT
        return HeisenbergSystem(T, start)
    if kind == "polyseq":
        from .genpoly import poly_from_json

        gens = tuple(
            HeisenbergElement(*[_parse_scalar(v, float_mode) for v in t])
            for t in data["generators"]
        )
        exps = tuple(poly_from_json(p) for p in data["exponents"])
        nvars = exps[0].nvars if exps else 1
        seq = PolySequence(gens, exps, nvars)
        x0 = data.get("x0")
        start = NilPoint([_parse_scalar(v, float_mode) for v in x0]) if x0 else BASE_POINT
        return PolySeqSystem(seq, start)
    raise ValueError(f"unknown system type {kind!r}")
