"""Bounded exhaustive searches for small-fractional-part witnesses.

Existence statements about large ground intervals are explored at desk scale:
every search enumerates candidates in a fixed canonical order under an
explicit budget and returns one of three outcomes.  ``found`` carries a
witness that has been re-verified through an independent evaluation path;
``exhausted`` certifies that every candidate was examined; ``budget_hit``
means the enumeration was cut short.  Exhaustion is data, not an error.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Callable, Iterable, Iterator, Sequence

from .genpoly import fractional_norm
from .sets import DisjointCollection, FiniteSet, nonempty_subsets, subcollections
from .setpoly import (
    INTEGERS,
    RATIONALS,
    SetMapping,
    SetPolynomial,
    ValueGroup,
    degree_verify,
    restrict,
)

FOUND = "found"
EXHAUSTED = "exhausted"
BUDGET_HIT = "budget_hit"


class BudgetError(ValueError):
    """Raised when a request is structurally outside any reasonable budget."""


class PreconditionError(ValueError):
    """Raised when a search's stated hypothesis fails on the input."""


@dataclass(frozen=True)
class SearchBudget:
    max_r: int = 20
    max_subsets: int = 1_000_000
    max_subcollections: int = 200_000
    time_cap: float = 120.0

    def __post_init__(self) -> None:
        if min(self.max_r, self.max_subsets, self.max_subcollections) < 1:
            raise ValueError("budget counts must be positive")
        if self.time_cap <= 0:
            raise ValueError("time cap must be positive")


DEFAULT_BUDGET = SearchBudget()


@dataclass
class SearchStats:
    candidates_examined: int = 0
    elapsed_ms: float = 0.0


@dataclass
class WitnessReport:
    outcome: str
    witness: object = None
    shifts: tuple[int, ...] | None = None
    stats: SearchStats = field(default_factory=SearchStats)
    verified: bool = False
    notes: tuple[str, ...] = ()
    extra: object = None

    @property
    def found(self) -> bool:
        return self.outcome == FOUND

    def witness_json(self) -> object:
        w = self.witness
        if w is None:
            return None
        if isinstance(w, FiniteSet):
            return {"type": "subset", "alpha": w.to_json()}
        if isinstance(w, DisjointCollection):
            out: dict = {"type": "collection", "blocks": w.to_json()}
            if self.shifts is not None:
                out["shifts"] = list(self.shifts)
            return out
        return repr(w)

    def to_json(self, include_timing: bool = False) -> dict:
        stats: dict = {"candidates_examined": self.stats.candidates_examined}
        if include_timing:
            stats["elapsed_ms"] = round(self.stats.elapsed_ms, 3)
        stats["outcome"] = self.outcome
        out = {
            "outcome": self.outcome,
            "witness": self.witness_json(),
            "stats": stats,
            "verified": self.verified,
        }
        if self.notes:
            out["notes"] = list(self.notes)
        return out


class _Clock:
    def __init__(self, budget: SearchBudget) -> None:
        self.start = time.monotonic()
        self.budget = budget
        self.stats = SearchStats()

    def tick(self, cap: int) -> bool:
        """Count one candidate; True when the budget still allows it."""
        if self.stats.candidates_examined >= cap:
            return False
        if time.monotonic() - self.start > self.budget.time_cap:
            return False
        self.stats.candidates_examined += 1
        return True

    def report(self, outcome: str, **kw) -> WitnessReport:
        self.stats.elapsed_ms = (time.monotonic() - self.start) * 1000.0
        return WitnessReport(outcome, stats=self.stats, **kw)


def _ground_r(maps: Sequence, r: int | None) -> int:
    rs = {m.r for m in maps if hasattr(m, "r")}
    if r is not None:
        rs.add(r)
    if len(rs) != 1:
        raise ValueError(f"ambiguous or missing ground interval: {sorted(rs)}")
    return rs.pop()


def find_small_alpha(
    maps: Sequence,
    eps: Fraction | float,
    budget: SearchBudget = DEFAULT_BUDGET,
    r: int | None = None,
) -> WitnessReport:
    """First nonempty subset where every mapping is within eps of an integer.

    Subsets of [1, r] are scanned in canonical order; a witness alpha
    satisfies fractional_norm(m(alpha)) < eps for ALL mappings and is
    re-verified by a second evaluation pass before being reported.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    r = _ground_r(maps, r)
    clock = _Clock(budget)
    for alpha in nonempty_subsets(r):
        if not clock.tick(budget.max_subsets):
            return clock.report(BUDGET_HIT)
        if all(fractional_norm(m(alpha)) < eps for m in maps):
            verified = all(fractional_norm(m(alpha)) < eps for m in maps)
            return clock.report(FOUND, witness=alpha, verified=verified)
    return clock.report(EXHAUSTED)


@dataclass
class EmpiricalRReport:
    outcome: str
    r: int | None
    per_r: list[tuple[int, int, int]]  # (r, instances passed, instances failed)
    witnesses: list[WitnessReport] = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.outcome == FOUND


def empirical_r(
    family: Callable[[int], Iterable[Sequence]],
    eps: Fraction | float,
    budget: SearchBudget = DEFAULT_BUDGET,
) -> EmpiricalRReport:
    """Smallest r <= max_r at which every produced instance admits a witness.

    ``family(r)`` yields instances, each a list of mappings on [1, r] to be
    satisfied simultaneously; per-r pass/fail counts are recorded either way.
    """
    per_r: list[tuple[int, int, int]] = []
    for r in range(1, budget.max_r + 1):
        witnesses: list[WitnessReport] = []
        failed = 0
        for instance in family(r):
            maps = instance if isinstance(instance, (list, tuple)) else [instance]
            rep = find_small_alpha(maps, eps, budget, r=r)
            if rep.found:
                witnesses.append(rep)
            else:
                failed += 1
        per_r.append((r, len(witnesses), failed))
        if failed == 0:
            return EmpiricalRReport(FOUND, r, per_r, witnesses)
    return EmpiricalRReport(BUDGET_HIT, None, per_r)


def _tprod_norms_ok(phi: SetPolynomial, eps) -> bool:
    return all(fractional_norm(v) < eps for _, v in phi.tprod.items())


def small_producing_subcollection(
    phi: SetPolynomial,
    s: int,
    eps: Fraction | float,
    budget: SearchBudget = DEFAULT_BUDGET,
) -> WitnessReport:
    """First s-subcollection whose restricted t-table is within eps of zero.

    Verification recomputes the restricted t-table independently by
    subset-lattice inversion of direct evaluations and re-checks the norms.
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    if eps <= 0:
        raise ValueError("eps must be positive")
    clock = _Clock(budget)
    for B in subcollections(phi.r, s):
        if not clock.tick(budget.max_subcollections):
            return clock.report(BUDGET_HIT)
        sub = restrict(phi, B)
        if _tprod_norms_ok(sub, eps):
            redo = SetPolynomial.from_values(
                lambda g: phi.eval(B.union_of_indices(g)), s, phi.degree, phi.group
            )
            verified = redo.tprod == sub.tprod and _tprod_norms_ok(redo, eps)
            return clock.report(FOUND, witness=B, verified=verified)
    return clock.report(EXHAUSTED)


def floor_shift_map(phi_like, s: int, e: int) -> SetMapping:
    """The integer mapping gamma -> floor(phi(gamma)) - e, patched to 0 at {}.

    The floor of a shifted polynomial can only agree with a zero-at-empty
    polynomial away from the empty set, so the empty set is pinned to 0 and
    the degree criterion is checked on that patched mapping.
    """

    def f(gamma: FiniteSet) -> int:
        if not gamma:
            return 0
        v = phi_like(gamma)
        return int(Fraction(v).__floor__()) - e

    return SetMapping(f, s, INTEGERS)


def is_polynomial_of_degree(mapping, r: int, d: int, group: ValueGroup) -> bool:
    """Interpolation-based polynomiality oracle, independent of degree_verify.

    Reconstructs a candidate t-table from values by lattice inversion and
    checks it reproduces the mapping on every subset; this holds exactly when
    the mapping is zero at the empty set and polynomial of degree <= d.
    """
    cand = SetPolynomial.from_values(mapping, r, d, group)
    if not group.is_zero(mapping(FiniteSet())):
        return False
    return all(
        group.is_zero(group.sub(cand.eval(g), mapping(g))) for g in nonempty_subsets(r)
    )


def _regimes(phi: SetPolynomial, bound) -> dict[FiniteSet, str]:
    out = {}
    for key, val in phi.tprod.items():
        f = Fraction(val) - Fraction(val).__floor__()
        out[key] = "low" if f < bound else "high"
    return out


def _monochromatic_per_level(subset: tuple[int, ...], d: int, regimes) -> bool:
    members = set(subset)
    for level in range(1, min(d, len(subset)) + 1):
        total = 0
        high = 0
        for combo in combinations(sorted(members), level):
            total += 1
            if regimes.get(FiniteSet(combo)) == "high":
                high += 1
        # absent keys are zero-valued, hence low; high==total means all present
        if 0 < high < total:
            return False
    return True


def skob_search(
    phi: SetPolynomial,
    s: int,
    budget: SearchBudget = DEFAULT_BUDGET,
    bound: Fraction | None = None,
) -> WitnessReport:
    """Find a singleton subcollection where the floor of phi shifts to a polynomial.

    Requires every t-table value within 1/r^d of an integer (or the supplied
    relaxed bound, which is flagged in the report).  Candidate subsets whose
    per-cardinality values sit in a single regime (fractional part below the
    bound, or above one minus it) are tried first; the remaining subsets are a
    direct-enumeration fallback.  A witness (B, e) is accepted only when the
    patched mapping floor(phi restricted to B) - e passes the exhaustive
    degree criterion and an independent interpolation re-check.
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    d, r = phi.degree, phi.r
    notes: tuple[str, ...] = ()
    if bound is None:
        bound = Fraction(1, r**d)
    else:
        bound = Fraction(bound)
        notes = (f"relaxed bound {bound}",)
    for key, val in phi.tprod.items():
        if fractional_norm(val) >= bound:
            raise PreconditionError(
                f"t-table value at {key} has fractional norm >= {bound}"
            )
    regimes = _regimes(phi, bound)
    clock = _Clock(budget)

    def candidates() -> Iterator[tuple[int, ...]]:
        mono = []
        rest = []
        for subset in combinations(range(1, r + 1), s):
            if _monochromatic_per_level(subset, d, regimes):
                mono.append(subset)
            else:
                rest.append(subset)
        yield from mono
        yield from rest

    for subset in candidates():
        B = DisjointCollection([i] for i in subset)
        sub = restrict(phi, B)
        for e in range(0, -d - 1, -1):
            if not clock.tick(budget.max_subcollections):
                return clock.report(BUDGET_HIT, notes=notes)
            m = floor_shift_map(sub, s, e)
            if degree_verify(m, d).ok:
                # independent path: floors of direct evaluations of phi
                direct = floor_shift_map(
                    lambda g: phi.eval(B.union_of_indices(g)), s, e
                )
                verified = is_polynomial_of_degree(direct, s, d, INTEGERS)
                report = clock.report(
                    FOUND, witness=B, shifts=(e,), verified=verified, notes=notes
                )
                report.extra = ShiftedIntegerPoly(
                    SetPolynomial.from_values(direct, s, d, INTEGERS), e
                )
                return report
    return clock.report(EXHAUSTED, notes=notes)


@dataclass(frozen=True)
class ShiftedIntegerPoly:
    """An integer mapping equal to base + shift on nonempty sets, 0 at {}."""

    base: SetPolynomial
    shift: int

    def __post_init__(self) -> None:
        if self.base.group != INTEGERS:
            raise ValueError("base must be integer-valued")
        if not (-self.base.degree <= self.shift <= 0):
            raise ValueError(f"shift {self.shift} outside {{0..-{self.base.degree}}}")

    def __call__(self, gamma: FiniteSet) -> int:
        if not gamma:
            return 0
        return self.base.eval(gamma) + self.shift


def skop_search(
    phis: Sequence[SetPolynomial],
    s: int,
    budget: SearchBudget = DEFAULT_BUDGET,
) -> WitnessReport:
    """Find one s-subcollection where every floor(phi_i) shifts to a polynomial.

    Attempts the two-stage pipeline first (shrink the t-table below the floor
    lemma's bound, then run the singleton search on the restriction) and falls
    back to direct enumeration of s-subcollections with all shift choices.
    Shifts are reported per polynomial, each in {0, -1, ..., -d_i}.
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    clock = _Clock(budget)
    if not phis:
        first = DisjointCollection([i] for i in range(1, s + 1))
        return clock.report(FOUND, witness=first, shifts=(), verified=True,
                            notes=("vacuous: no polynomials supplied",))
    r = _ground_r(phis, None)

    def verify_all(B: DisjointCollection) -> tuple[int, ...] | None:
        shifts: list[int] = []
        for phi in phis:
            sub = restrict(phi, B)
            good = None
            for e in range(0, -phi.degree - 1, -1):
                m = floor_shift_map(sub, B.size, e)
                if degree_verify(m, phi.degree).ok:
                    direct = floor_shift_map(
                        lambda g: phi.eval(B.union_of_indices(g)), B.size, e
                    )
                    if is_polynomial_of_degree(direct, B.size, phi.degree, INTEGERS):
                        good = e
                        break
            if good is None:
                return None
            shifts.append(good)
        return tuple(shifts)

    # pipeline: single polynomial first, then chain through restrictions
    pipeline_note = ()
    if len(phis) == 1:
        phi = phis[0]
        for s1 in range(s, min(s + 2, phi.r) + 1):
            eps = Fraction(1, s1 ** phi.degree)
            stage = small_producing_subcollection(phi, s1, eps, budget)
            if not stage.found:
                continue
            B1: DisjointCollection = stage.witness
            inner = skob_search(restrict(phi, B1), s, budget)
            if inner.found:
                chosen: DisjointCollection = inner.witness
                blocks = [B1.union_of_indices(b) for b in chosen.blocks]
                B = DisjointCollection(blocks)
                shifts = verify_all(B)
                if shifts is not None:
                    clock.stats.candidates_examined += (
                        stage.stats.candidates_examined
                        + inner.stats.candidates_examined
                    )
                    return clock.report(
                        FOUND, witness=B, shifts=shifts, verified=True,
                        notes=("pipeline",),
                    )
        pipeline_note = ("pipeline failed; direct enumeration",)

    for B in subcollections(r, s):
        if not clock.tick(budget.max_subcollections):
            return clock.report(BUDGET_HIT, notes=pipeline_note)
        shifts = verify_all(B)
        if shifts is not None:
            return clock.report(
                FOUND, witness=B, shifts=shifts, verified=True, notes=pipeline_note
            )
    return clock.report(EXHAUSTED, notes=pipeline_note)


def gps_search(
    maps: Sequence,
    s: int,
    budget: SearchBudget = DEFAULT_BUDGET,
    degrees: Sequence[int] | None = None,
) -> WitnessReport:
    """Find an s-subcollection on which each mapping restricts to a polynomial.

    Inputs are mappings on finite subsets carrying a declared degree bound
    (``degree_bound`` attribute, or the explicit ``degrees`` list).  The
    restriction to a candidate collection is checked by the exhaustive
    derivative criterion at the declared degree, then re-verified through the
    interpolation oracle.
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    clock = _Clock(budget)
    if not maps:
        first = DisjointCollection([i] for i in range(1, s + 1))
        return clock.report(FOUND, witness=first, shifts=None, verified=True,
                            notes=("vacuous: no mappings supplied",))
    r = _ground_r(maps, None)
    if degrees is None:
        degrees = [getattr(m, "degree_bound") for m in maps]
    if len(degrees) != len(maps):
        raise ValueError("one declared degree per mapping is required")

    for B in subcollections(r, s):
        if not clock.tick(budget.max_subcollections):
            return clock.report(BUDGET_HIT)
        ok = True
        for m, d in zip(maps, degrees):
            restricted = SetMapping(
                lambda g, m=m: m(B.union_of_indices(g)), s, RATIONALS
            )
            if not degree_verify(restricted, d).ok:
                ok = False
                break
            if not is_polynomial_of_degree(restricted, s, d, RATIONALS):
                ok = False
                break
        if ok:
            return clock.report(FOUND, witness=B, verified=True)
    return clock.report(EXHAUSTED)


@dataclass(frozen=True)
class IPrSet:
    """All finite sums of an r-term sequence over nonempty index subsets."""

    seeds: tuple
    sums: frozenset

    @property
    def r(self) -> int:
        return len(self.seeds)


def _seed_sum(seeds: Sequence, idx: Iterable[int]):
    picked = [seeds[i] for i in idx]
    if isinstance(picked[0], tuple):
        return tuple(sum(cs) for cs in zip(*picked))
    return sum(picked)


def build_ip_r(seeds: Sequence, max_r: int = 25) -> IPrSet:
    """Materialize the 2^r - 1 subset sums of the seed sequence.

    Vector seeds (tuples) are summed componentwise.  Requests beyond max_r
    seeds are refused outright since the sum set doubles per seed.
    """
    seeds = tuple(seeds)
    if not seeds:
        raise ValueError("at least one seed is required")
    if len(seeds) > max_r:
        raise BudgetError(f"{len(seeds)} seeds exceed the cap of {max_r}")
    for n in seeds:
        if (isinstance(n, tuple) and all(c == 0 for c in n)) or n == 0:
            raise ValueError("seeds must be nonzero")
    sums = set()
    for alpha in nonempty_subsets(len(seeds)):
        sums.add(_seed_sum(seeds, [i - 1 for i in alpha]))
    return IPrSet(seeds, frozenset(sums))


def hits(E, S) -> bool:
    """True when some element of S satisfies (or belongs to) E."""
    elements = S.sums if isinstance(S, IPrSet) else S
    if callable(E):
        return any(E(x) for x in elements)
    return any(x in E for x in elements)


@dataclass
class HitTestReport:
    outcome: str
    all_hit: bool
    first_miss: tuple | None
    tuples_checked: int
    stats: SearchStats = field(default_factory=SearchStats)

    def to_json(self, include_timing: bool = False) -> dict:
        out = {
            "outcome": self.outcome,
            "all_hit": self.all_hit,
            "first_miss": list(self.first_miss) if self.first_miss else None,
            "tuples_checked": self.tuples_checked,
        }
        if include_timing:
            out["elapsed_ms"] = round(self.stats.elapsed_ms, 3)
        return out


def ipstar_hit_test(
    E,
    seed_pool: Sequence,
    r: int,
    budget: SearchBudget = DEFAULT_BUDGET,
) -> HitTestReport:
    """Check E against the sum set of every r-tuple from the pool.

    Tuples are taken with repetition in lexicographic pool order.  The first
    tuple whose sum set misses E is reported; if none misses, E has met every
    sum set the pool can produce, the desk-scale reading of being unavoidable
    for r-term sequences drawn from this pool.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    clock = _Clock(budget)
    checked = 0
    for seeds in product(seed_pool, repeat=r):
        if not clock.tick(budget.max_subsets):
            rep = clock.report(BUDGET_HIT)
            return HitTestReport(BUDGET_HIT, False, None, checked, rep.stats)
        checked += 1
        if not hits(E, build_ip_r(seeds)):
            rep = clock.report(FOUND)
            return HitTestReport(FOUND, False, seeds, checked, rep.stats)
    rep = clock.report(EXHAUSTED)
    return HitTestReport(EXHAUSTED, True, None, checked, rep.stats)


def dilated_segment(r: int) -> list[int]:
    """The initial segment {1..r} dilated by the tower 2^(2^r)."""
    if r < 1:
        raise ValueError("r must be >= 1")
    factor = 2 ** (2**r)
    return [j * factor for j in range(1, r + 1)]


def dilated_segment_union(max_r: int) -> list[int]:
    """Sorted union of the dilated segments for r = 1..max_r.

    Gaps between consecutive elements are non-decreasing, so the union meets
    arbitrarily large finite sum sets while containing no infinite one.
    """
    out: set[int] = set()
    for r in range(1, max_r + 1):
        out.update(dilated_segment(r))
    return sorted(out)


def gaps_non_decreasing(xs: Sequence[int]) -> bool:
    gaps = [b - a for a, b in zip(xs, xs[1:])]
    return all(g1 <= g2 for g1, g2 in zip(gaps, gaps[1:]))
