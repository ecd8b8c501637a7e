"""Bracket polynomial evaluation, attributes, classification, normal form."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bracketdyn import genpoly
from bracketdyn import (
    INTEGERS,
    GPBracket,
    GPPoly,
    NotOpenError,
    Poly,
    SetPolynomial,
    compose,
    fractional_norm,
    fset,
    gp_bracket,
    gp_poly,
    gp_prod,
    gp_sum,
    to_normal_form,
)
from conftest import random_open_cf_gp


def poly1(**monos) -> Poly:
    """One-variable polynomial from {exponent: coefficient} keywords e0, e1, ..."""
    return Poly(1, {(int(k[1:]),): v for k, v in monos.items()})


X = poly1(e1=1)


def paper_example():
    """[[x^2+1]x][x^3+2x]x + [x^2](x+1) + x^3"""
    s1 = gp_prod(
        [
            gp_bracket(gp_prod([gp_bracket(gp_poly(poly1(e2=1, e0=1))), gp_poly(X)])),
            gp_bracket(gp_poly(poly1(e3=1, e1=2))),
            gp_poly(X),
        ]
    )
    s2 = gp_prod([gp_bracket(gp_poly(poly1(e2=1))), gp_poly(poly1(e1=1, e0=1))])
    s3 = gp_poly(poly1(e3=1))
    return gp_sum([s1, s2, s3])


class TestPoly:
    def test_arithmetic(self):
        p = poly1(e2=1, e0=3)
        q = poly1(e1=2)
        assert (p + q).eval((2,)) == 4 + 3 + 4
        assert (p * q).eval((2,)) == 7 * 4
        assert (p - p).is_zero

    def test_degree_and_constant(self):
        assert poly1(e3=1, e1=2).total_degree == 3
        assert poly1(e0=5).constant_term == 5
        assert Poly.zero().total_degree == 0

    def test_multivariate_eval(self):
        p = Poly(2, {(1, 1): 1, (2, 0): Fraction(1, 2)})
        assert p.eval((3, 4)) == 12 + Fraction(9, 2)


class TestEval:
    def test_conventional_square(self):
        assert gp_poly(poly1(e2=1)).eval(3) == 9

    def test_floor_times_x(self):
        # [x/2] * x at 5: floor(5/2) = 2
        gp = gp_prod([gp_bracket(gp_poly(poly1(e1=Fraction(1, 2)))), gp_poly(X)])
        assert gp.eval(5) == 10

    def test_constant_free_vanishes_at_zero(self, rng):
        for _ in range(20):
            gp = random_open_cf_gp(rng, nvars=1, height=2)
            assert gp.eval(0) == 0
        gp2 = random_open_cf_gp(rng, nvars=2, height=2)
        assert gp2.eval((0, 0)) == 0

    def test_bracket_is_floor_not_truncation(self):
        gp = gp_bracket(gp_poly(poly1(e1=Fraction(1, 2))))
        assert gp.eval(-1) == -1  # floor(-1/2), not 0

    def test_floor_reflection_identity(self):
        # [x] = -[-x] - 1 away from integers
        inner = poly1(e1=Fraction(3, 7))
        pos = gp_bracket(gp_poly(inner))
        neg = gp_bracket(gp_poly(poly1(e1=Fraction(-3, 7))))
        for n in range(-15, 15):
            if (Fraction(3, 7) * n).denominator != 1:
                assert pos.eval(n) == -neg.eval(n) - 1


class TestAttributes:
    def test_paper_worked_example(self):
        a = paper_example().attributes()
        assert (a.height, a.width, a.degree) == (2, 6, 7)

    def test_conventional_cube(self):
        a = gp_poly(poly1(e3=1)).attributes()
        assert (a.height, a.width, a.degree) == (0, 1, 3)

    def test_bracket_times_x(self):
        # hand application of the recursive rules: one summand, one closed
        # factor of width 1 plus an open factor, degrees 1 + 1
        gp = gp_prod([gp_bracket(gp_poly(X)), gp_poly(X)])
        a = gp.attributes()
        assert (a.height, a.width, a.degree) == (1, 2, 2)

    def test_closed_product(self):
        gp = gp_prod([gp_bracket(gp_poly(X)), gp_bracket(gp_poly(X))])
        a = gp.attributes()
        assert (a.height, a.width, a.degree) == (1, 2, 2)

    def test_conventional_sum_factor_is_one_open_factor(self):
        # [x](x + x^2) keeps a single open factor: width 2, not 4
        gp = gp_prod([gp_bracket(gp_poly(X)), gp_poly(poly1(e1=1, e2=1))])
        assert gp.attributes().width == 2

    def test_distribution_around_brackets(self):
        # ([x] + x) * x must split: summands [x]x and x^2
        gp = gp_prod([gp_sum([gp_bracket(gp_poly(X)), gp_poly(X)]), gp_poly(X)])
        a = gp.attributes()
        assert a.width == 3 and a.degree == 2 and a.height == 1


class TestClassification:
    def test_open_constant_free(self):
        gp = gp_prod([gp_bracket(gp_poly(poly1(e2=1))), gp_poly(X)])
        assert gp.is_open() and gp.is_constant_free()

    def test_closed_summand_not_open(self):
        gp = gp_prod([gp_bracket(gp_poly(X)), gp_bracket(gp_poly(X))])
        assert not gp.is_open()

    def test_constant_term_not_constant_free(self):
        assert not gp_poly(poly1(e1=1, e0=1)).is_constant_free()

    def test_worked_example_flags(self):
        # leaves x^2+1 and x+1 carry constants, so this representation is
        # open but not constant-free
        gp = paper_example()
        assert gp.is_open() and not gp.is_constant_free()


class TestNormalForm:
    def test_single_summand_with_sum_open_factor(self):
        gp = gp_prod([gp_bracket(gp_poly(X)), gp_poly(poly1(e1=1, e2=1))])
        nf = to_normal_form(gp)
        for n in range(-10, 11):
            assert nf.eval(n) == gp.eval(n)

    def test_conventional_is_single_open_summand(self):
        nf = to_normal_form(gp_poly(poly1(e2=3)))
        assert len(nf.summands) == 1 and not nf.summands[0].closed_factors

    def test_distributes_bracket_sums(self):
        gp = gp_prod([gp_sum([gp_bracket(gp_poly(X)), gp_poly(X)]), gp_poly(X)])
        nf = to_normal_form(gp)
        assert len(nf.summands) == 2
        for n in range(-10, 11):
            assert nf.eval(n) == gp.eval(n)

    def test_rejects_closed_summand(self):
        gp = gp_prod([gp_bracket(gp_poly(X)), gp_bracket(gp_poly(X))])
        with pytest.raises(NotOpenError):
            to_normal_form(gp)

    def test_rejects_constants(self):
        with pytest.raises(ValueError):
            to_normal_form(gp_poly(poly1(e1=1, e0=1)))

    def test_round_trip_genpoly(self, rng):
        gp = random_open_cf_gp(rng, nvars=1, height=2)
        nf = to_normal_form(gp)
        back = nf.to_genpoly()
        for n in range(-12, 13):
            assert back.eval(n) == gp.eval(n)

    def test_random_equivalence_exhaustive_window(self, rng):
        for _ in range(20):
            gp = random_open_cf_gp(rng, nvars=1, height=3, max_degree=4)
            nf = to_normal_form(gp)
            for n in range(-20, 21):
                assert nf.eval(n) == gp.eval(n)

    def test_random_equivalence_two_variables(self, rng):
        for _ in range(6):
            gp = random_open_cf_gp(rng, nvars=2, height=2, max_degree=3)
            nf = to_normal_form(gp)
            for a in range(-20, 21, 4):
                for b in range(-20, 21, 4):
                    assert nf.eval((a, b)) == gp.eval((a, b))


class TestFractionalNorm:
    def test_examples(self):
        assert fractional_norm(Fraction(7, 3)) == Fraction(1, 3)
        assert fractional_norm(Fraction(-1, 10)) == Fraction(1, 10)
        assert fractional_norm(4) == 0

    @given(st.fractions(max_denominator=50), st.integers(-20, 20))
    @settings(max_examples=80, deadline=None)
    def test_integer_shift_invariance(self, x, k):
        assert fractional_norm(x + k) == fractional_norm(x)

    @given(st.fractions(max_denominator=50))
    @settings(max_examples=80, deadline=None)
    def test_symmetry_and_range(self, x):
        assert fractional_norm(-x) == fractional_norm(x)
        assert 0 <= fractional_norm(x) <= Fraction(1, 2)

    def test_float_mode(self):
        assert abs(fractional_norm(2.25) - 0.25) < 1e-12


class TestCompose:
    def test_identity_composition(self):
        phi = SetPolynomial.linear([1, 2], INTEGERS)
        m = compose(gp_poly(X), phi)
        for alpha in (fset(1), fset(2), fset(1, 2)):
            assert m(alpha) == phi.eval(alpha)

    def test_bracket_composition_example(self):
        # [x/2] * x composed with the all-ones linear map at {1,2}: [1] * 2
        gp = gp_prod([gp_bracket(gp_poly(poly1(e1=Fraction(1, 2)))), gp_poly(X)])
        phi = SetPolynomial.linear([1, 1], INTEGERS)
        m = compose(gp, phi)
        assert m(fset(1, 2)) == 2

    def test_empty_set_maps_to_zero(self, rng):
        gp = random_open_cf_gp(rng, nvars=1, height=2)
        phi = SetPolynomial.linear([3, -1, 4], INTEGERS)
        m = compose(gp, phi)
        from bracketdyn import EMPTY

        assert m(EMPTY) == 0

    def test_dimension_mismatch_rejected(self):
        gp = gp_poly(Poly(2, {(1, 0): 1}))
        phi = SetPolynomial.linear([1, 2], INTEGERS)
        with pytest.raises(ValueError):
            compose(gp, phi)

    def test_classification_carries_over(self, rng):
        gp = random_open_cf_gp(rng, nvars=1, height=2)
        phi = SetPolynomial.linear([2, 5], INTEGERS)
        m = compose(gp, phi)
        assert m.is_constant_free() == gp.is_constant_free()
        assert m.is_open() == gp.is_open()

    def test_degree_budget(self):
        gp = gp_prod([gp_bracket(gp_poly(poly1(e2=1))), gp_poly(X)])  # degree 3
        phi = SetPolynomial.linear([1, 2], INTEGERS)
        assert compose(gp, phi).degree_bound == 3


class TestJson:
    def test_round_trip(self, rng):
        gp = random_open_cf_gp(rng, nvars=1, height=2)
        again = genpoly.from_json(gp.to_json())
        for n in range(-8, 9):
            assert again.eval(n) == gp.eval(n)

    def test_schema_ops(self):
        gp = gp_sum([gp_bracket(gp_poly(X)), gp_poly(X)])
        data = gp.to_json()
        assert data["op"] == "sum"
        assert data["args"][0]["op"] == "bracket"
        assert data["args"][1]["op"] == "poly"

    def test_unknown_op_rejected(self):
        with pytest.raises(ValueError):
            genpoly.from_json({"op": "integral", "arg": {}})
