"""Curve-layer tests: charts, local expansions, divisors, exact calculus.

Frozen anchors below were derived by hand from the chart conventions:
at a branch point over lambda_j the parameter is t with x = lambda_j + t^2
and y = t * u * (1 + ...) where u^2 = prod_{k != j}(lambda_j - lambda_k).
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from planarends.algebra import (
    AlgebraError,
    ExtScalar,
    GaussianRational,
    Poly,
    RationalFunction,
)
from planarends.curve import (
    Differential,
    Divisor,
    FieldElement,
    HyperellipticCurve,
    UnrepresentablePointError,
    canonical_order_sum,
    differential_divisor,
    differential_of,
    divisor,
    holomorphic_basis,
    local_expansion,
    ord_at,
    polar_degree,
    residue_at,
)


@pytest.fixture(scope="module")
def g1():
    return HyperellipticCurve([0, 1, 2, 3])


@pytest.fixture(scope="module")
def g2():
    return HyperellipticCurve([0, 1, 2, 3, 4, 5])


def dx_over_y(curve, numerator=None):
    num = RationalFunction(Poly.one() if numerator is None else numerator)
    return Differential(FieldElement(curve, 0, num / RationalFunction(curve.R)))


class TestCurveBasics:
    def test_genus(self, g1, g2):
        assert g1.genus == 1
        assert g2.genus == 2

    def test_rejects_repeated_branch_values(self):
        with pytest.raises(AlgebraError):
            HyperellipticCurve([0, 1, 1, 3])

    def test_rejects_odd_count(self):
        with pytest.raises(AlgebraError):
            HyperellipticCurve([0, 1, 2])

    def test_affine_point_must_lie_on_curve(self, g1):
        with pytest.raises(AlgebraError):
            g1.affine(5, 1)

    def test_engineered_affine_point(self):
        # R(3) = 3 * 2 * 1 * (3 - 9) = -36 = (6i)^2
        curve = HyperellipticCurve([0, 1, 2, 9])
        pt = curve.affine(3, GaussianRational(0, 6))
        assert pt.x0 == GaussianRational(3)
        assert pt.involution() == curve.affine(3, GaussianRational(0, -6))

    def test_involution_swaps_infinity_sheets(self, g1):
        assert g1.infinity(1).involution() == g1.infinity(2)
        assert g1.branch_point(2).involution() == g1.branch_point(2)

    def test_field_arithmetic_inverse(self, g1):
        f = g1.x() + g1.y() * g1.constant(GaussianRational(0, 1))
        assert (f * f.inverse()) == g1.constant(1)

    def test_norm_of_y(self, g1):
        assert g1.y().norm_x() == -RationalFunction(g1.R)

    def test_value_at(self):
        curve = HyperellipticCurve([0, 1, 2, 9])
        pt = curve.affine(3, GaussianRational(0, 6))
        f = curve.x() + curve.y()
        assert f.value_at(pt) == GaussianRational(3, 6)


class TestCharts:
    def test_dx_over_y_at_branch_point(self, g1):
        """Anchor: on y^2 = x(x-1)(x-2)(x-3), at the branch point over 0,
        dx/y = (2/u)(1 + ...) dt with u^2 = (0-1)(0-2)(0-3) = -6,
        so the leading coefficient is 2/u = -u/3."""
        omega = dx_over_y(g1)
        pt = g1.branch_point(1)
        series = local_expansion(omega, pt, 4)
        assert series.c == GaussianRational(-6)
        assert series.valuation() == 0
        assert series.coefficient(0) == ExtScalar(0, Fraction(-1, 3))

    def test_dx_over_y_order_at_infinity(self, g1, g2):
        # ord = g - 1 on each sheet
        for sheet in (1, 2):
            assert ord_at(dx_over_y(g1), g1.infinity(sheet)) == 0
            assert ord_at(dx_over_y(g2), g2.infinity(sheet)) == 1

    def test_dx_over_y_leading_at_infinity_g1(self, g1):
        # x = 1/s gives dx = -s^-2 ds and y = s^-2 (1 + ...) on sheet 1
        series = local_expansion(dx_over_y(g1), g1.infinity(1), 2)
        assert series.coefficient(0) == ExtScalar(GaussianRational(-1))
        series2 = local_expansion(dx_over_y(g1), g1.infinity(2), 2)
        assert series2.coefficient(0) == ExtScalar(GaussianRational(1))

    def test_sheet_convention_y_leading_sign(self, g1):
        y = g1.y()
        s1 = local_expansion(y, g1.infinity(1), 0)
        assert s1.valuation() == -2  # g + 1 = 2
        assert s1.coefficient(-2) == ExtScalar(GaussianRational(1))
        s2 = local_expansion(y, g1.infinity(2), 0)
        assert s2.coefficient(-2) == ExtScalar(GaussianRational(-1))

    def test_y_value_at_affine_chart(self):
        curve = HyperellipticCurve([0, 1, 2, 9])
        pt = curve.affine(3, GaussianRational(0, 6))
        series = local_expansion(curve.y(), pt, 1)
        assert series.coefficient(0) == ExtScalar(GaussianRational(0, 6))

    def test_x_is_a_degree_two_parameter_at_branch(self, g1):
        f = g1.x() - 1
        assert ord_at(f, g1.branch_point(2)) == 2
        assert ord_at(f, g1.branch_point(1)) == 0

    def test_x_pole_at_infinity(self, g1):
        assert ord_at(g1.x(), g1.infinity(1)) == -1

    def test_y_ord_at_branch(self, g1):
        assert ord_at(g1.y(), g1.branch_point(3)) == 1


class TestResidues:
    def test_residues_of_dx_over_y_squared(self, g1):
        """dx/y^2 has residue 2/R'(lambda_j) at the branch point over
        lambda_j; for branch values 0,1,2,3 these are -1/3, 1, -1, 1/3."""
        Rrf = RationalFunction(g1.R)
        omega = Differential(FieldElement(g1, 1 / Rrf, 0))
        expected = [Fraction(-1, 3), Fraction(1), Fraction(-1), Fraction(1, 3)]
        total = GaussianRational(0)
        for j, want in enumerate(expected, start=1):
            res = residue_at(omega, g1.branch_point(j))
            assert res == ExtScalar(want)
            total = total + res.a
        assert total.is_zero

    def test_residue_sum_with_affine_poles(self):
        # double pole of x at infinity plus no affine poles: all residues 0
        curve = HyperellipticCurve([0, 1, 2, 9])
        omega = differential_of(curve.x() * curve.x())
        for pt in curve.infinities():
            assert residue_at(omega, pt) == ExtScalar(0)

    def test_residue_rejects_field_elements(self, g1):
        with pytest.raises(AlgebraError):
            residue_at(g1.x(), g1.infinity(1))

    def test_exact_derivative_has_zero_residues_everywhere(self, g1):
        # d(y/(x-1)) has poles only over x = 1 and residues 0 there
        f = g1.y() / (g1.x() - 1)
        omega = differential_of(f)
        assert residue_at(omega, g1.branch_point(2)) == ExtScalar(0)


class TestDivisors:
    def test_divisor_of_y(self, g1):
        div = divisor(g1.y())
        want = {g1.branch_point(j): 1 for j in range(1, 5)}
        want[g1.infinity(1)] = -2
        want[g1.infinity(2)] = -2
        assert div == Divisor(want)
        assert div.degree == 0

    def test_divisor_of_x_minus_branch_value(self, g1):
        div = divisor(g1.x())
        want = {
            g1.branch_point(1): 2,
            g1.infinity(1): -1,
            g1.infinity(2): -1,
        }
        assert div == Divisor(want)

    def test_divisor_with_affine_support(self):
        curve = HyperellipticCurve([0, 1, 2, 9])
        div = divisor(curve.x() - 3)
        six_i = GaussianRational(0, 6)
        want = {
            curve.affine(3, six_i): 1,
            curve.affine(3, -six_i): 1,
            curve.infinity(1): -1,
            curve.infinity(2): -1,
        }
        assert div == Divisor(want)

    def test_divisor_of_y_over_x(self, g1):
        div = divisor(g1.y() / g1.x())
        assert div.multiplicity(g1.branch_point(1)) == -1
        for j in (2, 3, 4):
            assert div.multiplicity(g1.branch_point(j)) == 1
        for s in (1, 2):
            assert div.multiplicity(g1.infinity(s)) == -1
        assert div.degree == 0

    def test_ord_separates_sheets(self):
        curve = HyperellipticCurve([0, 1, 2, 9])
        six_i = GaussianRational(0, 6)
        # (y - 6i) vanishes at (3, 6i) but not at (3, -6i); its other
        # three zeros live over irrational x-values, so the full divisor
        # is out of reach but pointwise orders are not
        f = curve.y() - curve.constant(six_i)
        assert ord_at(f, curve.affine(3, six_i)) == 1
        assert ord_at(f, curve.affine(3, -six_i)) == 0
        with pytest.raises(UnrepresentablePointError):
            divisor(f)

    def test_unrepresentable_x_support(self, g1):
        f = g1.function(Poly([-2, 0, 1]))  # x^2 - 2, roots not in Q(i)
        with pytest.raises(UnrepresentablePointError):
            divisor(f)

    def test_unrepresentable_fiber(self, g1):
        f = g1.x() - 5  # R(5) = 5*4*3*2 = 120, not a square in Q(i)
        with pytest.raises(UnrepresentablePointError):
            divisor(f)

    def test_zero_element_rejected(self, g1):
        with pytest.raises(AlgebraError):
            divisor(g1.constant(0))

    def test_polar_degree_pure_x(self, g1):
        assert polar_degree(g1.x()) == 2
        assert polar_degree(1 / g1.x()) == 2
        f = g1.function(RationalFunction(Poly([0, 0, 1]), Poly([-1, 1])))
        # x^2/(x-1): map degree 2 upstairs doubles to 4
        assert polar_degree(f) == 4

    def test_polar_degree_of_y(self, g1):
        assert polar_degree(g1.y()) == 4


class TestCalculus:
    def test_derivative_of_y(self, g1):
        omega = differential_of(g1.y())
        # d(y) = R'/(2R) * y dx
        want = RationalFunction(g1.Rprime) / (RationalFunction(g1.R) * 2)
        assert omega.elem.a.is_zero
        assert omega.elem.b == want

    def test_derivative_of_x_power(self, g1):
        omega = differential_of(g1.x() * g1.x() * g1.x())
        assert omega.elem.a == RationalFunction(Poly([0, 0, 3]))
        assert omega.elem.b.is_zero

    def test_leibniz_rule(self, g1):
        f = g1.x() + g1.y()
        g = g1.y() / (g1.x() - 1) + g1.constant(GaussianRational(0, 1))
        lhs = differential_of(f * g)
        rhs = differential_of(g).times(f) + differential_of(f).times(g)
        assert lhs == rhs

    def test_y_squared_is_R(self, g1):
        lhs = differential_of(g1.y() * g1.y())
        rhs = differential_of(g1.function(g1.R))
        assert lhs == rhs

    @given(
        coeffs=st.lists(
            st.integers(min_value=-3, max_value=3), min_size=1, max_size=3
        ),
        coeffs2=st.lists(
            st.integers(min_value=-3, max_value=3), min_size=1, max_size=3
        ),
    )
    @settings(max_examples=25, deadline=None)
    def test_leibniz_rule_property(self, g1, coeffs, coeffs2):
        f = FieldElement(g1, Poly(coeffs), RationalFunction(Poly(coeffs2)))
        g = FieldElement(g1, Poly(coeffs2), RationalFunction(Poly(coeffs)))
        lhs = differential_of(f * g)
        rhs = differential_of(g).times(f) + differential_of(f).times(g)
        assert lhs == rhs


class TestGlobalInvariants:
    def test_holomorphic_basis_counts(self, g1, g2):
        assert len(holomorphic_basis(g1)) == 1
        assert len(holomorphic_basis(g2)) == 2

    def test_basis_orders_at_infinity(self, g2):
        b0, b1 = holomorphic_basis(g2)
        assert ord_at(b0, g2.infinity(1)) == 1
        assert ord_at(b1, g2.infinity(1)) == 0

    def test_canonical_degree_holomorphic(self, g1, g2):
        assert canonical_order_sum(dx_over_y(g1)) == 0
        assert canonical_order_sum(dx_over_y(g2)) == 2

    def test_canonical_degree_with_poles(self, g1, g2):
        Rg1 = RationalFunction(g1.R)
        omega = Differential(FieldElement(g1, 1 / Rg1, 0))  # dx/y^2
        assert canonical_order_sum(omega) == 0
        omega2 = Differential(FieldElement(g2, 0, RationalFunction(Poly.one())))
        assert canonical_order_sum(omega2) == 2  # y dx

    def test_canonical_divisor_degree(self, g1):
        div = differential_divisor(dx_over_y(g1))
        assert div.degree == 0
        assert div == Divisor({})  # dx/y is nowhere-zero on a genus 1 curve

    def test_canonical_divisor_with_affine_zeros(self):
        curve = HyperellipticCurve([0, 1, 2, 9])
        omega = dx_over_y(curve, numerator=Poly([-3, 1]))  # (x-3) dx/y
        div = differential_divisor(omega)
        six_i = GaussianRational(0, 6)
        assert div.multiplicity(curve.affine(3, six_i)) == 1
        assert div.multiplicity(curve.affine(3, -six_i)) == 1
        assert div.multiplicity(curve.infinity(1)) == -1
        assert div.degree == 0

    @given(
        k=st.integers(min_value=0, max_value=3),
        m=st.integers(min_value=1, max_value=3),
    )
    @settings(max_examples=20, deadline=None)
    def test_canonical_order_sum_property(self, g2, k, m):
        # x^k dx / y^m always has total order 2g - 2 = 2
        Rrf = RationalFunction(g2.R)
        num = RationalFunction(Poly.x() ** k)
        if m % 2:
            elem = FieldElement(g2, 0, num / Rrf ** ((m + 1) // 2))
        else:
            elem = FieldElement(g2, num / Rrf ** (m // 2), 0)
        assert canonical_order_sum(Differential(elem)) == 2

    def test_exact_derivative_residues_vanish(self, g1):
        # f has poles only over x = 2 (a branch value) and at infinity, so
        # those are the only candidate poles of df; every residue of an
        # exact form vanishes
        f = (g1.x() * g1.y() + g1.constant(2)) / (g1.x() - 2)
        omega = differential_of(f)
        for pt in g1.branch_points() + g1.infinities():
            res = residue_at(omega, pt)
            assert res == ExtScalar(0), f"nonzero residue at {pt}: {res}"
