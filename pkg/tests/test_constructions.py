"""Builders: plane-model families, branch-quotient differentials, the
two-subset family, double-pole forms, and general data assembly."""

import random
from fractions import Fraction

import pytest

from planarends.algebra import (
    AlgebraError,
    ExtScalar,
    GaussianRational,
    Poly,
    RationalFunction,
    resultant,
)
from planarends.curve import (
    Divisor,
    HyperellipticCurve,
    differential_divisor,
    differential_of,
    holomorphic_basis,
    ord_at,
    residue_at,
)
from planarends.weierstrass import (
    check_conformal,
    gauss_degrees,
    planar_end_report,
    real_periods_zero,
    same_ruling,
)
from planarends.constructions import (
    GFormCoefficients,
    IJSelection,
    SearchError,
    bracket_poly,
    bracket_resultant,
    branch_quotient,
    branch_quotient_differential,
    catenoid,
    always_coprime_selection,
    eta_q,
    gform_assemble,
    hoffman_osserman,
    involution_check,
    kernel_vector,
    lambda_search,
    no_common_zeros,
    phi_ij,
    sigma_leading,
    subset_poly,
    three_end_genus0,
)

I_UNIT = GaussianRational(0, 1)


@pytest.fixture(scope="module")
def g1():
    return HyperellipticCurve([0, 1, 2, 3])


@pytest.fixture(scope="module")
def g2():
    return HyperellipticCurve([0, 1, 2, 3, 4, 5])


class TestPlaneFamilies:
    def test_catenoid_is_the_b_over_z_graph(self):
        cat = catenoid()
        graph = hoffman_osserman(0, 1)
        assert cat.forms == graph.forms
        assert cat.primitives == graph.primitives

    def test_catenoid_rulings(self):
        cat = catenoid()
        e1 = planar_end_report(cat, cat.punctures[0])
        e2 = planar_end_report(cat, cat.punctures[1])
        assert e1.is_embedded_planar and e2.is_embedded_planar
        assert same_ruling(e1, e2) == {"L": True, "M": False}

    def test_graph_needs_inverse_part(self):
        with pytest.raises(AlgebraError):
            hoffman_osserman(5, 0)

    def test_graph_generic_parameters(self):
        data = hoffman_osserman(2, GaussianRational(1, 1))
        ok, _ = check_conformal(data)
        assert ok
        for p in data.punctures:
            assert planar_end_report(data, p).is_embedded_planar

    def test_three_end_valid_build(self):
        data = three_end_genus0(1, 1, 1, 2, 2, 3, 1, -1)
        assert len(data.punctures) == 3
        ok, _ = check_conformal(data)
        assert ok
        for p in data.punctures:
            assert planar_end_report(data, p).is_embedded_planar
        vr = real_periods_zero(data)
        assert vr[0] is True

    def test_three_end_gauss_images(self):
        data = three_end_genus0(1, 1, 1, 2, 2, 3, 1, -1)
        z1, z2, inf = data.punctures
        img1 = planar_end_report(data, z1).gauss_image
        assert img1 == (
            ExtScalar(1),
            ExtScalar(-I_UNIT),
            ExtScalar(2),
            ExtScalar(GaussianRational(0, -2)),
        )
        img3 = planar_end_report(data, inf).gauss_image
        assert img3 == (
            ExtScalar(1),
            ExtScalar(-I_UNIT),
            ExtScalar(3),
            ExtScalar(GaussianRational(0, -3)),
        )

    def test_three_end_kernel_third_coordinate(self):
        v = kernel_vector((1, 1, 1), (2, 2, 3))
        assert v[2].is_zero
        assert not (v[0].is_zero and v[1].is_zero)

    def test_three_end_resultant_certificate(self):
        z1, z2 = GaussianRational(1), GaussianRational(-1)
        p1 = Poly([-z1, 1])
        p2 = Poly([-z2, 1])
        den = p1 * p1 * p2 * p2

        def num(c1, c2, c3):
            return p2 * p2 * c1 + p1 * p1 * c2 + den * c3

        r = resultant(num(1, 1, 1), num(2, 2, 3))
        assert not r.is_zero

    def test_three_end_rank_one_rejected(self):
        with pytest.raises(AlgebraError):
            three_end_genus0(1, 2, 0, 2, 4, 0, 1, -1)

    def test_three_end_nonproportional_rejected(self):
        with pytest.raises(AlgebraError):
            three_end_genus0(1, 0, 1, 0, 1, 1, 1, -1)

    def test_three_end_zero_first_column_rejected(self):
        # no pole at z1, so z1 cannot be a puncture
        with pytest.raises(AlgebraError):
            three_end_genus0(0, 1, 1, 0, 2, 3, 1, -1)

    def test_three_end_bad_points(self):
        with pytest.raises(AlgebraError):
            three_end_genus0(1, 1, 1, 2, 2, 3, 1, 1)
        with pytest.raises(AlgebraError):
            three_end_genus0(1, 1, 1, 2, 2, 3, 0, -1)


class TestBranchQuotients:
    def test_subset_poly(self, g1):
        assert subset_poly(g1, {1, 2}) == Poly([0, -1, 1]) + Poly([0, 0, 0])
        assert subset_poly(g1, {1, 2}) == Poly.from_roots([0, 1])

    def test_sigma_values(self, g1):
        assert sigma_leading(g1, {1, 2}, 1) == GaussianRational(6)
        assert sigma_leading(g1, {1, 2}, 2) == GaussianRational(2)
        assert sigma_leading(g1, {1, 2}, 3).is_zero
        assert sigma_leading(g1, {1, 3}, 1) == GaussianRational(3)
        assert sigma_leading(g1, {1, 3}, 3) == GaussianRational(-1)

    def test_bracket_polys_frozen(self, g1):
        assert bracket_poly(g1, {1, 2}) == Poly([6, -12, 4])
        assert bracket_poly(g1, {1, 3}) == Poly([6, -6, 2])

    def test_bracket_nonvanishing_at_branch_values(self, g2):
        for I in ({1, 2, 3}, {1, 3, 5}, {2, 4, 6}, {1, 2, 3, 4}):
            W = bracket_poly(g2, I)
            for lam in g2.lambdas:
                assert not W(lam).is_zero

    def test_bracket_degree_drop(self, g1):
        # leading terms cancel exactly when |I| is half the branch count
        assert bracket_poly(g1, {1, 2}).degree == 2
        big = bracket_poly(g1, {1, 2, 3})
        assert big.degree == 3
        assert big.lead == GaussianRational(-2)

    def test_quotient_differential_order_table(self, g1):
        omega = branch_quotient_differential(g1, {1, 2})
        orders = [ord_at(omega, g1.branch_point(k)) for k in (1, 2, 3, 4)]
        orders += [ord_at(omega, p) for p in g1.infinities()]
        assert orders == [-2, -2, 0, 0, 0, 0]
        for k in (1, 2):
            assert residue_at(omega, g1.branch_point(k)).is_zero

    def test_quotient_differential_leading_values(self, g1):
        # at a double-pole branch point the leading coefficient is
        # -sigma/u where u^2 is the chart's extension constant
        omega = branch_quotient_differential(g1, {1, 2})
        from planarends.curve import local_expansion

        s = local_expansion(omega, g1.branch_point(1), upto=0)
        c = s.c
        lead = s.coefficient(-2)
        # -6/u = -6 u / c
        assert lead == ExtScalar(0, GaussianRational(-6) / c)

    def test_quotient_matches_exterior_derivative(self, g1):
        omega = branch_quotient_differential(g1, {1, 2})
        assert omega == differential_of(branch_quotient(g1, {1, 2}))

    def test_small_subset_rejected(self, g1):
        with pytest.raises(AlgebraError):
            branch_quotient_differential(g1, {1})

    def test_dual_route_random_instances(self):
        rng = random.Random(20250815)
        built = 0
        while built < 50:
            g = rng.choice((1, 2, 3))
            pool = list(range(-9, 10))
            rng.shuffle(pool)
            lams = pool[: 2 * g + 2]
            size = rng.randint(g + 1, 2 * g + 2)
            I = rng.sample(range(1, 2 * g + 3), size)
            curve = HyperellipticCurve(lams)
            omega = branch_quotient_differential(curve, I)
            assert omega == differential_of(branch_quotient(curve, I))
            built += 1


class TestSelections:
    def test_valid_selection(self):
        sel = IJSelection({1, 2}, {1, 3}, 1)
        assert sel.end_count == 3
        assert sel.union == frozenset({1, 2, 3})

    def test_invalid_selections(self):
        with pytest.raises(AlgebraError):
            IJSelection({1, 2}, {1, 2}, 1)  # equal
        with pytest.raises(AlgebraError):
            IJSelection({1}, {1, 2}, 1)  # too small and |I| < |J|
        with pytest.raises(AlgebraError):
            IJSelection({1, 2}, {1, 2, 3}, 1)  # |I| < |J|
        with pytest.raises(AlgebraError):
            IJSelection({1, 2, 9}, {1, 2}, 1)  # out of range
        with pytest.raises(AlgebraError):
            IJSelection({2, 3, 4, 5, 6}, {1, 2, 3, 4, 5}, 2)  # |J| > g+2

    def test_guarantee_truth_table(self):
        assert always_coprime_selection(IJSelection({1, 2}, {1, 3}, 1)) is True
        assert always_coprime_selection(IJSelection({1, 2, 3}, {1, 2}, 1)) is True
        assert always_coprime_selection(IJSelection({1, 2}, {3, 4}, 1)) is False
        assert always_coprime_selection(IJSelection({1, 2, 3}, {1, 4}, 1)) is False
        assert always_coprime_selection(IJSelection({1, 2, 3, 4}, {1, 2, 3}, 2)) is True
        assert always_coprime_selection(IJSelection({1, 2, 3}, {1, 4, 5}, 2)) is False
        assert always_coprime_selection(IJSelection({1, 2, 3}, {2, 3, 4}, 2)) is True

    def test_bracket_resultant_frozen(self, g1):
        sel = IJSelection({1, 2}, {1, 3}, 1)
        assert bracket_resultant(g1, sel) == GaussianRational(144)
        assert no_common_zeros(g1, sel)

    def test_complementary_subsets_always_degenerate(self, g1):
        # brackets of a set and its complement are negatives of each other
        sel = IJSelection({1, 2}, {3, 4}, 1)
        assert bracket_poly(g1, {3, 4}) == -bracket_poly(g1, {1, 2})
        assert bracket_resultant(g1, sel).is_zero
        assert not no_common_zeros(g1, sel)

    def test_lambda_search_guaranteed_path(self):
        sel = IJSelection({1, 2}, {1, 3}, 1)
        curve = lambda_search(1, sel, seed=7)
        assert curve.lambdas == tuple(
            GaussianRational(k) for k in (0, 1, 2, 3)
        )
        assert no_common_zeros(curve, sel)

    def test_lambda_search_random_path(self):
        sel = IJSelection({1, 2, 3}, {1, 4, 5}, 2)
        assert not always_coprime_selection(sel)
        curve = lambda_search(2, sel, seed=0)
        for k in range(5):
            assert curve.lambdas[k] == GaussianRational(k)
        assert no_common_zeros(curve, sel)

    def test_lambda_search_deterministic(self):
        sel = IJSelection({1, 2, 3}, {1, 4, 5}, 2)
        c1 = lambda_search(2, sel, seed=11)
        c2 = lambda_search(2, sel, seed=11)
        assert c1.lambdas == c2.lambdas

    def test_lambda_search_no_free_index(self):
        sel = IJSelection({1, 2, 3}, {1, 2, 4}, 1)
        with pytest.raises(SearchError):
            lambda_search(1, sel)

    def test_lambda_search_genus_mismatch(self):
        sel = IJSelection({1, 2}, {1, 3}, 1)
        with pytest.raises(AlgebraError):
            lambda_search(2, sel)


class TestTwoSubsetFamily:
    def test_certificates_g1(self, g1):
        sel = IJSelection({1, 2}, {1, 3}, 1)
        data = phi_ij(g1, sel)
        ok, _ = check_conformal(data)
        assert ok
        assert involution_check(data)
        assert len(data.punctures) == 3
        verdict = real_periods_zero(data)
        assert verdict[0] is True
        assert all(r.method == "primitive" for r in verdict[1])

    def test_end_images_g1(self, g1):
        sel = IJSelection({1, 2}, {1, 3}, 1)
        data = phi_ij(g1, sel)
        b1, b2, b3 = data.punctures
        one = ExtScalar(1)
        mi = ExtScalar(-I_UNIT)
        half = ExtScalar(Fraction(1, 2))
        mihalf = ExtScalar(GaussianRational(Fraction(0), Fraction(-1, 2)))
        assert planar_end_report(data, b1).gauss_image == (one, mi, half, mihalf)
        assert planar_end_report(data, b2).gauss_image == (one, mi, ExtScalar(0), ExtScalar(0))
        assert planar_end_report(data, b3).gauss_image == (ExtScalar(0), ExtScalar(0), one, mi)
        for p in data.punctures:
            assert planar_end_report(data, p).on_quadric()

    def test_shared_ruling_line(self, g1):
        sel = IJSelection({1, 2}, {1, 3}, 1)
        data = phi_ij(g1, sel)
        reports = [planar_end_report(data, p) for p in data.punctures]
        for other in reports[1:]:
            flags = same_ruling(reports[0], other)
            assert flags["L"] is True
            assert flags["M"] is False

    def test_gauss_degrees_g1(self, g1):
        sel = IJSelection({1, 2}, {1, 3}, 1)
        data = phi_ij(g1, sel)
        assert gauss_degrees(data) == (0, 6)

    def test_genus2_nested_selection(self, g2):
        sel = IJSelection({1, 2, 3, 4}, {1, 2, 3}, 2)
        assert always_coprime_selection(sel)
        data = phi_ij(g2, sel)
        assert len(data.punctures) == 4
        b4 = g2.branch_point(4)
        img = planar_end_report(data, b4).gauss_image
        assert img == (ExtScalar(1), ExtScalar(-I_UNIT), ExtScalar(0), ExtScalar(0))
        assert involution_check(data)
        assert real_periods_zero(data)[0] is True

    def test_curve_selection_genus_mismatch(self, g1):
        sel = IJSelection({1, 2, 3}, {1, 2, 4}, 2)
        with pytest.raises(AlgebraError):
            phi_ij(g1, sel)


class TestDoublePoleForms:
    def test_affine_point(self):
        curve = HyperellipticCurve([0, 1, 2, 9])
        q = curve.affine(3, GaussianRational(0, 6))
        omega = eta_q(curve, q)
        assert ord_at(omega, q) == -2
        assert residue_at(omega, q).is_zero
        assert ord_at(omega, q.involution()) >= 0
        for p in curve.branch_points() + curve.infinities():
            assert ord_at(omega, p) >= 0

    def test_branch_point_divisor_g2(self, g2):
        omega = eta_q(g2, g2.branch_point(1))
        inf1, inf2 = g2.infinities()
        assert differential_divisor(omega) == Divisor(
            {inf1: 2, inf2: 2, g2.branch_point(1): -2}
        )

    def test_infinity_rejected(self, g1):
        with pytest.raises(AlgebraError):
            eta_q(g1, g1.infinity(1))

    def test_wrong_curve_rejected(self, g1, g2):
        with pytest.raises(AlgebraError):
            eta_q(g1, g2.branch_point(1))

    def test_residue_cancellation_is_exact(self, g1):
        # the correction term h(x - x_q) is what kills the residue; the
        # bare double pole (y + y_q)/(x-x_q)^2 dx/y would fail
        curve = HyperellipticCurve([0, 1, 2, 9])
        q = curve.affine(3, GaussianRational(0, 6))
        omega = eta_q(curve, q)
        assert residue_at(omega, q).is_zero


class TestAssembly:
    def test_coefficient_validation(self):
        good = GFormCoefficients(1, (1, I_UNIT, 0, 0), [[1], [0], [0], [0]])
        assert good.alpha == GaussianRational(1)
        with pytest.raises(AlgebraError):
            GFormCoefficients(0, (1, I_UNIT, 0, 0), [[], [], [], []])
        with pytest.raises(AlgebraError):
            GFormCoefficients(1, (1, 1, 0, 0), [[], [], [], []])
        with pytest.raises(AlgebraError):
            GFormCoefficients(1, (1, I_UNIT, 0), [[], [], [], []])
        with pytest.raises(AlgebraError):
            GFormCoefficients(1, (1, I_UNIT, 0, 0), [[1], [0], [0]])

    def test_assembly_structure(self, g1):
        coeffs = GFormCoefficients(1, (1, I_UNIT, 0, 0), [[1], [0], [1], [1]])
        p1, p2 = g1.branch_point(1), g1.branch_point(2)
        data = gform_assemble(g1, p1, p2, coeffs)
        assert data.punctures == (p1, p2)
        for j in range(4):
            for p in (p1, p2):
                r = data.form_residue_at(j, p)
                assert r.is_zero
        assert involution_check(data)
        # eta_1 enters components 1 and 2 with weights alpha, -i alpha
        assert ord_at(data.forms[0], p1) == -2
        assert ord_at(data.forms[1], p1) == -2
        assert ord_at(data.forms[2], p1) >= 0
        assert ord_at(data.forms[3], p1) >= 0

    def test_assembly_with_affine_double_pole_breaks_oddness(self):
        curve = HyperellipticCurve([0, 1, 2, 9])
        q = curve.affine(3, GaussianRational(0, 6))
        coeffs = GFormCoefficients(1, (1, I_UNIT, 0, 0), [[0], [0], [0], [0]])
        data = gform_assemble(curve, q, curve.branch_point(1), coeffs)
        assert involution_check(data) is False

    def test_assembly_rejections(self, g1):
        coeffs = GFormCoefficients(1, (1, I_UNIT, 0, 0), [[1], [0], [0], [0]])
        with pytest.raises(AlgebraError):
            gform_assemble(g1, g1.branch_point(1), g1.branch_point(1), coeffs)
        with pytest.raises(AlgebraError):
            gform_assemble(g1, g1.infinity(1), g1.branch_point(1), coeffs)
        zero_null = GFormCoefficients(1, (0, 0, 0, 0), [[1], [0], [0], [0]])
        with pytest.raises(AlgebraError):
            # second point carries no pole at all
            gform_assemble(g1, g1.branch_point(1), g1.branch_point(2), zero_null)
        wrong_width = GFormCoefficients(1, (1, I_UNIT, 0, 0),
                                        [[1, 0], [0, 0], [0, 0], [0, 0]])
        with pytest.raises(AlgebraError):
            gform_assemble(g1, g1.branch_point(1), g1.branch_point(2), wrong_width)

    def test_two_subset_family_is_an_assembly_special_case(self, g1):
        # phi_IJ fits the assembled shape: holomorphic part plus
        # double-pole forms, all odd under the sheet swap
        sel = IJSelection({1, 2}, {1, 3}, 1)
        data = phi_ij(g1, sel)
        basis = holomorphic_basis(g1)
        assert len(basis) == 1
        assert involution_check(data)

    def test_involution_check_needs_curve_model(self):
        with pytest.raises(AlgebraError):
            involution_check(catenoid())
