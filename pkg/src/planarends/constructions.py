"""Builders for the explicit surface families.

Plane-model families: the two-ended Lagrangian graph (z, 1/z), the graphs
(z, az + b/z), and the three-ended genus-0 family with double-pole forms at
two finite points and infinity.

Curve-model families: the branch-value quotient functions
f_I = y / prod_{i in I}(x - lambda_i), their differentials built two
independent ways and cross-checked, the data tuples
(df_I, -i df_I, df_J, -i df_J), the double-pole forms with vanishing
residue at a chosen point, and the general assembly of candidate data from
a holomorphic part plus the two double-pole forms.

Every builder certifies its output exactly (orders, residues, dual-route
equality) and raises on violation rather than returning unchecked data.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Iterable

from .algebra import (
    AlgebraError,
    GaussianRational,
    GR_I,
    GR_ONE,
    GR_ZERO,
    Poly,
    RationalFunction,
    as_gaussian,
    resultant,
)
from .curve import (
    CurvePoint,
    Differential,
    FieldElement,
    HyperellipticCurve,
    differential_of,
    holomorphic_basis,
    ord_at,
    residue_at,
)
from .weierstrass import (
    INFINITY,
    WeierstrassData,
    check_conformal,
    planar_end_report,
)

__all__ = [
    "SearchError",
    "IJSelection",
    "GFormCoefficients",
    "catenoid",
    "hoffman_osserman",
    "three_end_genus0",
    "kernel_vector",
    "eta_q",
    "branch_quotient",
    "branch_quotient_differential",
    "sigma_leading",
    "subset_poly",
    "bracket_poly",
    "bracket_resultant",
    "no_common_zeros",
    "phi_ij",
    "always_coprime_selection",
    "lambda_search",
    "gform_assemble",
    "involution_check",
]


class SearchError(AlgebraError):
    """A randomized parameter search exhausted its trial budget."""


# ---------------------------------------------------------------------------
# plane-model families
# ---------------------------------------------------------------------------


def _rf(num_coeffs, den_coeffs=(1,)) -> RationalFunction:
    return RationalFunction(Poly(num_coeffs), Poly(den_coeffs))


def catenoid() -> WeierstrassData:
    """The two-ended Lagrangian graph (z, 1/z) on C*.

    Forms (dz, -i dz, -dz/z^2, i dz/z^2) with punctures {0, infinity};
    both ends are embedded planar ends sharing one ruling line.
    """
    i = GR_I
    forms = [
        _rf([1]),
        _rf([-i]),
        _rf([-1], [0, 0, 1]),
        _rf([i], [0, 0, 1]),
    ]
    prims = [
        _rf([0, 1]),
        _rf([0, -i]),
        _rf([1], [0, 1]),
        _rf([-i], [0, 1]),
    ]
    data = WeierstrassData.genus0(forms, [0, INFINITY], primitives=prims)
    ok, witness = check_conformal(data)
    if not ok:
        raise AlgebraError(f"internal: catenoid data not conformal: {witness}")
    for p in data.punctures:
        if not planar_end_report(data, p).is_embedded_planar:
            raise AlgebraError(f"internal: catenoid end at {p} not planar")
    return data


def hoffman_osserman(a, b) -> WeierstrassData:
    """Data of the graph z -> (z, a z + b / z) on C*, b != 0.

    Both punctures {0, infinity} are embedded planar ends; at b = 0 the
    graph degenerates to a flat plane and is rejected.
    """
    a, b = as_gaussian(a), as_gaussian(b)
    if b.is_zero:
        raise AlgebraError("b = 0 degenerates to a plane (no planar ends)")
    i = GR_I
    dF = _rf([-b, 0, a], [0, 0, 1])  # a - b/z^2
    forms = [_rf([1]), _rf([-i]), dF, dF * (-i)]
    F = _rf([b, 0, a], [0, 1])  # a z + b / z
    prims = [_rf([0, 1]), _rf([0, -i]), F, F * (-i)]
    data = WeierstrassData.genus0(forms, [0, INFINITY], primitives=prims)
    for p in data.punctures:
        if not planar_end_report(data, p).is_embedded_planar:
            raise AlgebraError(f"internal: graph end at {p} not planar")
    return data


def kernel_vector(a_row, b_row):
    """A spanning vector of the kernel of the 2x3 matrix (rows a, b),
    computed as the cross product of the rows."""
    a1, a2, a3 = (as_gaussian(v) for v in a_row)
    b1, b2, b3 = (as_gaussian(v) for v in b_row)
    return (a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1)


def three_end_genus0(a1, a2, a3, b1, b2, b3, z1, z2) -> WeierstrassData:
    """Three-ended genus-0 data with double poles at z1, z2 and infinity.

    phi_a = (a1/(z-z1)^2 + a2/(z-z2)^2 + a3) dz, phi_b likewise with the
    b-row, and the data tuple is (phi_a, -i phi_a, phi_b, -i phi_b).
    Requires z1 != z2 both nonzero, proportional first two columns
    (a1 b2 - b1 a2 = 0), and a rank-2 coefficient matrix.  All three ends
    are certified planar and the two forms are certified to have no common
    zeros (the immersion condition) via a nonzero resultant.
    """
    a1, a2, a3 = as_gaussian(a1), as_gaussian(a2), as_gaussian(a3)
    b1, b2, b3 = as_gaussian(b1), as_gaussian(b2), as_gaussian(b3)
    z1, z2 = as_gaussian(z1), as_gaussian(z2)
    if z1 == z2:
        raise AlgebraError("z1 and z2 must be distinct")
    if z1.is_zero or z2.is_zero:
        raise AlgebraError("z1 and z2 must be nonzero")
    if a1 * b2 - b1 * a2 != GR_ZERO:
        raise AlgebraError("first two columns must be proportional "
                           "(a1*b2 - b1*a2 = 0)")
    minors = (a1 * b3 - a3 * b1, a2 * b3 - a3 * b2)
    if all(m.is_zero for m in minors):
        raise AlgebraError("coefficient matrix must have rank 2")

    p1 = Poly([-z1, GR_ONE])  # z - z1
    p2 = Poly([-z2, GR_ONE])
    den = (p1 * p1) * (p2 * p2)

    def numerator(c1, c2, c3):
        return (p2 * p2) * c1 + (p1 * p1) * c2 + den * c3

    A = numerator(a1, a2, a3)
    B = numerator(b1, b2, b3)
    phi_a = RationalFunction(A, den)
    phi_b = RationalFunction(B, den)
    i = GR_I

    def primitive(c1, c2, c3):
        # -c1/(z-z1) - c2/(z-z2) + c3 z
        return (
            RationalFunction(Poly.constant(-c1), p1)
            + RationalFunction(Poly.constant(-c2), p2)
            + RationalFunction(Poly([GR_ZERO, c3]))
        )

    forms = [phi_a, phi_a * (-i), phi_b, phi_b * (-i)]
    prims = [
        primitive(a1, a2, a3),
        primitive(a1, a2, a3) * (-i),
        primitive(b1, b2, b3),
        primitive(b1, b2, b3) * (-i),
    ]
    data = WeierstrassData.genus0(forms, [z1, z2, INFINITY], primitives=prims)
    for p in data.punctures:
        if not planar_end_report(data, p).is_embedded_planar:
            raise AlgebraError(f"internal: end at {p} not planar")
    if resultant(A, B).is_zero:
        raise AlgebraError("internal: the two forms share a zero")
    return data


# ---------------------------------------------------------------------------
# curve-model building blocks
# ---------------------------------------------------------------------------


def _check_index_set(curve: HyperellipticCurve, I) -> frozenset:
    out = frozenset(int(k) for k in I)
    n = len(curve.lambdas)
    if not out:
        raise AlgebraError("index set must be nonempty")
    if any(k < 1 or k > n for k in out):
        raise AlgebraError(f"indices must lie in 1..{n}")
    return out


def subset_poly(curve: HyperellipticCurve, I) -> Poly:
    """prod_{i in I} (x - lambda_i)."""
    I = _check_index_set(curve, I)
    return Poly.from_roots([curve.lambdas[k - 1] for k in sorted(I)])


def sigma_leading(curve: HyperellipticCurve, I, s: int) -> GaussianRational:
    """prod over the complement of I of (lambda_s - lambda_j).

    This is the leading value sigma_{I;s}; it vanishes exactly when s is
    outside I."""
    I = _check_index_set(curve, I)
    lam_s = curve.lambdas[s - 1]
    out = GR_ONE
    for j in range(1, len(curve.lambdas) + 1):
        if j not in I:
            out = out * (lam_s - curve.lambdas[j - 1])
    return out


def bracket_poly(curve: HyperellipticCurve, I) -> Poly:
    """The Wronskian-type bracket P_I Q_I' - P_I' Q_I, where P_I carries
    the roots indexed by I and Q_I the complementary ones.

    Its roots are exactly the x-values of the zeros of the differential of
    y / P_I away from branch points and infinity; it never vanishes at a
    branch value."""
    I = _check_index_set(curve, I)
    P = subset_poly(curve, I)
    comp = frozenset(range(1, len(curve.lambdas) + 1)) - I
    Q = Poly.from_roots([curve.lambdas[k - 1] for k in sorted(comp)])
    return P * Q.derivative() - P.derivative() * Q


def branch_quotient(curve: HyperellipticCurve, I) -> FieldElement:
    """f_I = y / prod_{i in I}(x - lambda_i)."""
    I = _check_index_set(curve, I)
    return FieldElement(
        curve, 0, RationalFunction(Poly.one(), subset_poly(curve, I))
    )


def branch_quotient_differential(curve: HyperellipticCurve, I) -> Differential:
    """The differential of f_I, built two independent ways and certified.

    Route one is the partial-fraction closed form
        [ D(x) - sum_{i in I} sigma_{I;i} / (x - lambda_i) ] dx / (2 y)
    with D the polynomial part of bracket/P_I; route two is the generic
    exterior derivative of f_I.  Both must agree exactly.  Requires
    |I| >= genus + 1, which makes the result pole-free at infinity with
    double poles exactly at the branch points indexed by I.
    """
    I = _check_index_set(curve, I)
    g = curve.genus
    if len(I) < g + 1:
        raise AlgebraError(f"|I| = {len(I)} < genus + 1 = {g + 1}")
    P = subset_poly(curve, I)
    W = bracket_poly(curve, I)
    D, _rem = divmod(W, P)
    closed = RationalFunction(D)
    for k in sorted(I):
        lam = curve.lambdas[k - 1]
        closed = closed - RationalFunction(
            Poly.constant(sigma_leading(curve, I, k)), Poly([-lam, GR_ONE])
        )
    Rrf = RationalFunction(curve.R)
    route_closed = Differential(FieldElement(curve, 0, closed / (Rrf * 2)))
    route_derivative = differential_of(branch_quotient(curve, I))
    if route_closed != route_derivative:
        raise AlgebraError(
            "internal: closed-form and exterior-derivative routes disagree "
            f"for I = {sorted(I)}"
        )
    omega = route_closed
    for k in range(1, len(curve.lambdas) + 1):
        pt = curve.branch_point(k)
        o = ord_at(omega, pt)
        if k in I:
            if o != -2:
                raise AlgebraError(f"internal: expected double pole at {pt}")
            if not residue_at(omega, pt).is_zero:
                raise AlgebraError(f"internal: nonzero residue at {pt}")
        elif o < 0:
            raise AlgebraError(f"internal: unexpected pole at {pt}")
    for pt in curve.infinities():
        if ord_at(omega, pt) < 0:
            raise AlgebraError(f"internal: unexpected pole at {pt}")
    return omega


# ---------------------------------------------------------------------------
# the (I, J) family
# ---------------------------------------------------------------------------


class IJSelection:
    """A pair of branch-index subsets defining a two-function family.

    Validity: I != J, both of size >= genus + 1, |I| >= |J|, and
    |J| <= genus + 2.
    """

    __slots__ = ("I", "J", "genus")

    def __init__(self, I: Iterable[int], J: Iterable[int], genus: int):
        genus = int(genus)
        if genus < 0:
            raise AlgebraError("genus must be nonnegative")
        n = 2 * genus + 2
        I = frozenset(int(k) for k in I)
        J = frozenset(int(k) for k in J)
        for name, S in (("I", I), ("J", J)):
            if any(k < 1 or k > n for k in S):
                raise AlgebraError(f"{name} must be a subset of 1..{n}")
        if I == J:
            raise AlgebraError("I and J must differ")
        if len(I) < genus + 1 or len(J) < genus + 1:
            raise AlgebraError("both index sets need at least genus+1 elements")
        if len(I) < len(J):
            raise AlgebraError("|I| must be >= |J| (swap the sets)")
        if len(J) > genus + 2:
            raise AlgebraError("|J| must be <= genus + 2")
        object.__setattr__(self, "I", I)
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "genus", genus)

    def __setattr__(self, name, value):
        raise AttributeError("IJSelection is immutable")

    @property
    def union(self) -> frozenset:
        return self.I | self.J

    @property
    def end_count(self) -> int:
        return len(self.union)

    def __eq__(self, other):
        if not isinstance(other, IJSelection):
            return NotImplemented
        return (self.I, self.J, self.genus) == (other.I, other.J, other.genus)

    def __hash__(self):
        return hash((self.I, self.J, self.genus))

    def __repr__(self):
        return (
            f"IJSelection(I={sorted(self.I)}, J={sorted(self.J)}, "
            f"genus={self.genus})"
        )


def always_coprime_selection(sel: IJSelection) -> bool:
    """Combinatorial guarantee that the two differentials share no zeros
    for arbitrary distinct branch values: either equal sizes with
    intersection of size genus or genus+1, or J inside I with sizes
    (genus+2, genus+1)."""
    g = sel.genus
    same_size = len(sel.I) == len(sel.J) and len(sel.I & sel.J) in (g, g + 1)
    nested = sel.J < sel.I and len(sel.I) == g + 2 and len(sel.J) == g + 1
    return same_size or nested


def bracket_resultant(curve: HyperellipticCurve, sel: IJSelection) -> GaussianRational:
    """Resultant of the two bracket polynomials; nonzero certifies that
    the two differentials have no common zeros away from infinity."""
    return resultant(bracket_poly(curve, sel.I), bracket_poly(curve, sel.J))


def no_common_zeros(curve: HyperellipticCurve, sel: IJSelection) -> bool:
    """Exact immersion certificate for the (I, J) data on this curve.

    Checks the bracket resultant (affine zeros) and, separately, that the
    two differentials do not both vanish at either infinity."""
    if bracket_resultant(curve, sel).is_zero:
        return False
    dI = branch_quotient_differential(curve, sel.I)
    dJ = branch_quotient_differential(curve, sel.J)
    for pt in curve.infinities():
        if ord_at(dI, pt) > 0 and ord_at(dJ, pt) > 0:
            return False
    return True


def phi_ij(curve: HyperellipticCurve, sel: IJSelection) -> WeierstrassData:
    """The data tuple (df_I, -i df_I, df_J, -i df_J) with punctures at the
    branch points indexed by I union J; conformal by construction, with
    exact primitives attached, and every end certified planar."""
    if curve.genus != sel.genus:
        raise AlgebraError("selection genus does not match the curve")
    i = GR_I
    dI = branch_quotient_differential(curve, sel.I)
    dJ = branch_quotient_differential(curve, sel.J)
    fI = branch_quotient(curve, sel.I)
    fJ = branch_quotient(curve, sel.J)
    minus_i = curve.constant(-i)
    forms = [dI, dI * (-i), dJ, dJ * (-i)]
    prims = [fI, fI * minus_i, fJ, fJ * minus_i]
    punctures = [curve.branch_point(k) for k in sorted(sel.union)]
    data = WeierstrassData.on_curve(curve, forms, punctures, primitives=prims)
    ok, witness = check_conformal(data)
    if not ok:
        raise AlgebraError(f"internal: data not conformal: {witness}")
    for p in punctures:
        if not planar_end_report(data, p).is_embedded_planar:
            raise AlgebraError(f"internal: end at {p} not planar")
    return data


def lambda_search(genus: int, sel: IJSelection, seed: int = 0,
                  max_trials: int = 1000) -> HyperellipticCurve:
    """Choose branch values realizing the no-common-zero certificate.

    Indices in I union J get 0, 1, 2, ... in sorted order.  When the
    combinatorial criterion already guarantees the certificate, the free
    indices continue the integer sequence.  Otherwise the free values are
    sampled from a seeded stream of Gaussian rationals (numerators and
    denominators bounded by 1000) until the certificate holds.
    """
    if sel.genus != genus:
        raise AlgebraError("selection genus mismatch")
    n = 2 * genus + 2
    union = sorted(sel.union)
    if len(union) > n - 1:
        raise SearchError(
            "no free branch index: the union of I and J covers "
            f"{len(union)} of {n} indices"
        )
    values = {}
    for pos, k in enumerate(union):
        values[k] = GaussianRational(pos)
    free = [k for k in range(1, n + 1) if k not in sel.union]

    if always_coprime_selection(sel):
        for offset, k in enumerate(free):
            values[k] = GaussianRational(len(union) + offset)
        curve = HyperellipticCurve([values[k] for k in range(1, n + 1)])
        if not no_common_zeros(curve, sel):
            raise AlgebraError(
                "internal: combinatorial certificate contradicted by the "
                "resultant check"
            )
        return curve

    rng = random.Random(seed)
    taken = {(v.re, v.im) for v in values.values()}
    for trial in range(max_trials):
        sample = {}
        ok = True
        seen = set(taken)
        for k in free:
            v = GaussianRational(
                Fraction(rng.randint(-1000, 1000), rng.randint(1, 1000)),
                Fraction(rng.randint(-1000, 1000), rng.randint(1, 1000)),
            )
            key = (v.re, v.im)
            if key in seen:
                ok = False
                break
            seen.add(key)
            sample[k] = v
        if not ok:
            continue
        full = dict(values)
        full.update(sample)
        curve = HyperellipticCurve([full[k] for k in range(1, n + 1)])
        if no_common_zeros(curve, sel):
            return curve
    raise SearchError(
        f"no admissible branch values found in {max_trials} trials "
        f"(seed {seed}, free indices {free})"
    )


# ---------------------------------------------------------------------------
# double-pole forms and general data assembly
# ---------------------------------------------------------------------------


def eta_q(curve: HyperellipticCurve, q: CurvePoint) -> Differential:
    """A 1-form with a double pole at q, zero residue, and no other poles.

    For q = (x_q, y_q) with y_q != 0:
        (y + y_q + h (x - x_q)) / (x - x_q)^2 * dx / y,  h = R'(x_q)/(2 y_q);
    for a branch point q = (x_q, 0):
        dx / ((x - x_q) y).
    Points at infinity are not supported.
    """
    if not isinstance(q, CurvePoint) or q.curve != curve:
        raise AlgebraError("q must be a point of the given curve")
    if q.kind == "infinity":
        raise AlgebraError("double-pole form at infinity is not supported")
    x_q, y_q = q.x0, q.y0
    Rrf = RationalFunction(curve.R)
    x_shift = Poly([-x_q, GR_ONE])
    if q.kind == "branch":
        elem = FieldElement(
            curve, 0, RationalFunction(Poly.one(), x_shift) / Rrf
        )
    else:
        h = curve.Rprime(x_q) / (y_q * 2)
        numer_x = RationalFunction(Poly.constant(y_q) + x_shift * h,
                                   x_shift * x_shift)
        # (y + y_q + h (x - x_q)) / ((x - x_q)^2 y) as a + b y with
        # 1/y = y/R: a-part from the y/(...y) = 1/(x-x_q)^2 piece
        a_part = RationalFunction(Poly.one(), x_shift * x_shift)
        b_part = numer_x / Rrf
        elem = FieldElement(curve, a_part, b_part)
    omega = Differential(elem)
    if ord_at(omega, q) != -2:
        raise AlgebraError(f"internal: expected a double pole at {q}")
    if not residue_at(omega, q).is_zero:
        raise AlgebraError(f"internal: nonzero residue at {q}")
    others = curve.branch_points() + curve.infinities()
    if q.kind == "affine":
        others.append(q.involution())
    for pt in others:
        if pt == q:
            continue
        if ord_at(omega, pt) < 0:
            raise AlgebraError(f"internal: unexpected pole at {pt}")
    return omega


class GFormCoefficients:
    """Coefficients assembling candidate data from a holomorphic part and
    two double-pole forms.

    alpha scales the first double-pole form inside the first two
    components; the null 4-vector (a, b, c, d) with a^2+b^2+c^2+d^2 = 0
    scales the second across all four; the 4 x genus matrix holds the
    holomorphic-basis coefficients of each component.
    """

    __slots__ = ("alpha", "null_vector", "holomorphic_matrix")

    def __init__(self, alpha, null_vector, holomorphic_matrix):
        alpha = as_gaussian(alpha)
        if alpha.is_zero:
            raise AlgebraError("alpha must be nonzero")
        vec = tuple(as_gaussian(v) for v in null_vector)
        if len(vec) != 4:
            raise AlgebraError("need a length-4 vector")
        total = GR_ZERO
        for v in vec:
            total = total + v * v
        if not total.is_zero:
            raise AlgebraError("vector must satisfy a^2+b^2+c^2+d^2 = 0")
        rows = tuple(tuple(as_gaussian(v) for v in row)
                     for row in holomorphic_matrix)
        if len(rows) != 4 or len({len(r) for r in rows}) > 1:
            raise AlgebraError("holomorphic matrix must have 4 equal rows")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "null_vector", vec)
        object.__setattr__(self, "holomorphic_matrix", rows)

    def __setattr__(self, name, value):
        raise AttributeError("GFormCoefficients is immutable")


def gform_assemble(curve: HyperellipticCurve, p1: CurvePoint, p2: CurvePoint,
                   coeffs: GFormCoefficients) -> WeierstrassData:
    """Assemble four forms: holomorphic part + alpha-weighted double-pole
    form at p1 (first two components, with weights alpha and -i alpha) +
    null-vector-weighted double-pole form at p2.

    Conformality is NOT implied; run check_conformal on the result.
    """
    if p1 == p2:
        raise AlgebraError("p1 and p2 must differ")
    for p in (p1, p2):
        if p.kind == "infinity":
            raise AlgebraError("double-pole points must be affine or branch")
    g = curve.genus
    rows = coeffs.holomorphic_matrix
    if any(len(r) != g for r in rows):
        raise AlgebraError(f"holomorphic matrix rows must have length {g}")
    basis = holomorphic_basis(curve)
    eta1 = eta_q(curve, p1)
    eta2 = eta_q(curve, p2)
    i = GR_I
    eta1_weights = (coeffs.alpha, -i * coeffs.alpha, GR_ZERO, GR_ZERO)
    forms = []
    for j in range(4):
        total = curve.constant(0)
        for k in range(g):
            if not rows[j][k].is_zero:
                total = total + basis[k].elem * curve.constant(rows[j][k])
        if not eta1_weights[j].is_zero:
            total = total + eta1.elem * curve.constant(eta1_weights[j])
        if not coeffs.null_vector[j].is_zero:
            total = total + eta2.elem * curve.constant(coeffs.null_vector[j])
        forms.append(Differential(total))
    return WeierstrassData.on_curve(curve, forms, [p1, p2])


def involution_check(data: WeierstrassData) -> bool:
    """True iff the sheet swap (x, y) -> (x, -y) sends each form to its
    negative (exact)."""
    if data.kind != "curve":
        raise AlgebraError("involution check requires the curve model")
    for f in data.forms:
        if f.involution_pullback() != -f:
            return False
    return True
