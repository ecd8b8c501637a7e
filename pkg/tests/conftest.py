"""Shared seeded instance generators for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

import pytest

from bracketdyn import (
    RATIONALS,
    GPBracket,
    GPPoly,
    Poly,
    QProducing,
    SetPolynomial,
    TProducing,
    gp_prod,
    gp_sum,
)


@pytest.fixture
def rng():
    return random.Random(20260809)


def random_fraction(rng, num=9, den=9, nonzero=False) -> Fraction:
    while True:
        f = Fraction(rng.randint(-num, num), rng.randint(1, den))
        if f or not nonzero:
            return f


def random_tproducing(
    rng,
    d: int,
    r: int,
    group=RATIONALS,
    n_keys: int | None = None,
    near_integer_denom: int | None = None,
) -> TProducing:
    """Sparse random t-table; optionally with values near integers.

    With ``near_integer_denom`` = q, every value is an integer plus a
    perturbation of absolute value < 16/q.
    """
    pool = [c for card in range(1, d + 1) for c in combinations(range(1, r + 1), card)]
    if n_keys is None:
        n_keys = rng.randint(min(2, len(pool)), min(8, len(pool)))
    keys = rng.sample(pool, min(n_keys, len(pool)))
    table = {}
    for key in keys:
        if near_integer_denom is None:
            table[key] = random_fraction(rng, nonzero=True)
        else:
            base = rng.randint(-3, 3)
            eta = Fraction(rng.randint(-15, 15), near_integer_denom)
            table[key] = base + eta
    return TProducing(group, d, r, table)


def random_setpoly(rng, d, r, **kw) -> SetPolynomial:
    return SetPolynomial(random_tproducing(rng, d, r, **kw))


def random_setpoly_with_top(rng, d, r, group=RATIONALS) -> SetPolynomial:
    """Random polynomial guaranteed to have a nonzero cardinality-d key."""
    tp = random_tproducing(rng, d, r, group)
    table = dict(tp.table)
    top_keys = [k for k in table if len(k) == d]
    if not top_keys:
        from bracketdyn import FiniteSet

        key = FiniteSet(rng.sample(range(1, r + 1), d))
        table[key] = random_fraction(rng, nonzero=True)
    return SetPolynomial(TProducing(group, d, r, table))


def random_qproducing(rng, d, r, group=RATIONALS, n_keys: int | None = None) -> QProducing:
    if n_keys is None:
        n_keys = rng.randint(2, 8)
    table = {}
    for _ in range(n_keys):
        key = tuple(rng.randint(1, r) for _ in range(d))
        table[key] = random_fraction(rng, nonzero=True)
    return QProducing(group, d, r, table)


def random_zero_constant_poly(rng, nvars=1, max_degree=3) -> Poly:
    terms = {}
    for _ in range(rng.randint(1, 3)):
        exps = [0] * nvars
        total = rng.randint(1, max_degree)
        for _ in range(total):
            exps[rng.randrange(nvars)] += 1
        terms[tuple(exps)] = terms.get(tuple(exps), 0) + random_fraction(rng, nonzero=True)
    if not any(terms.values()):
        terms[(1,) + (0,) * (nvars - 1)] = Fraction(1)
    return Poly(nvars, terms)


def random_open_cf_gp(rng, nvars=1, height=2, max_summands=3, max_degree=3):
    """Random open constant-free bracket polynomial, built in sum-of-products shape."""
    summands = []
    for _ in range(rng.randint(1, max_summands)):
        factors = []
        if height > 0:
            for _ in range(rng.randint(0, 2)):
                inner = random_open_cf_gp(
                    rng, nvars, rng.randint(0, height - 1), 2, max_degree
                )
                factors.append(GPBracket(inner))
        factors.append(GPPoly(random_zero_constant_poly(rng, nvars, max_degree)))
        summands.append(gp_prod(factors) if len(factors) > 1 else factors[0])
    return gp_sum(summands) if len(summands) > 1 else summands[0]
