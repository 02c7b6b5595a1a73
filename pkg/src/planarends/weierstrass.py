"""Meromorphic data 4-tuples for minimal immersions into R^4.

A surface is encoded by four meromorphic 1-forms on a punctured Riemann
surface, with the immersion recovered as the real part of their integrals.
Two models are supported:

- genus 0: each form is f(z) dz for a rational function f of the plane
  coordinate z, punctures are extended-complex values (INFINITY allowed);
- positive genus: each form is a Differential on a HyperellipticCurve and
  punctures are CurvePoints.

This module houses the exact predicates: conformality, the embedded-planar-
end certificate at a puncture (double pole in the strongest component and
vanishing residues), end Gauss images, the two ruling coordinates on the
quadric surface of null directions, their degrees, and the shared-ruling
test for pairs of ends.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from typing import Optional

from .algebra import (
    AlgebraError,
    ExtScalar,
    GaussianRational,
    GR_I,
    GR_ONE,
    GR_ZERO,
    LocalSeries,
    Poly,
    PrecisionCapError,
    RationalFunction,
    as_gaussian,
    gaussian_roots,
)
from .curve import (
    CurvePoint,
    Differential,
    FieldElement,
    HyperellipticCurve,
    differential_of,
    local_expansion,
    ord_at,
    polar_degree,
    residue_at,
)

__all__ = [
    "INFINITY",
    "WeierstrassData",
    "EndData",
    "RulingPoint",
    "ProjectiveFunction",
    "check_conformal",
    "planar_end_report",
    "end_reports",
    "gauss_map",
    "gauss_degrees",
    "ruling_point",
    "same_ruling",
    "real_periods_zero",
    "transform_forms",
    "PeriodRecord",
]


class _InfinityPoint:
    """The point z = infinity of the extended complex plane."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __str__(self):
        return "infinity"


INFINITY = _InfinityPoint()

_WINDOW_START = 8
_WINDOW_CAP = 256


# ---------------------------------------------------------------------------
# plane-model local expansions
# ---------------------------------------------------------------------------


def _plane_series(rf: RationalFunction, at, window: int, as_form: bool) -> LocalSeries:
    """Series of f (or of the 1-form f dz) in the local parameter at ``at``.

    Finite points use t = z - z0; infinity uses w = 1/z with dz = -dw/w^2.
    """
    if at is INFINITY:
        num = LocalSeries(
            GR_ONE, {-k: ExtScalar(v) for k, v in enumerate(rf.num.coeffs)}
        )
        den = LocalSeries(
            GR_ONE, {-k: ExtScalar(v) for k, v in enumerate(rf.den.coeffs)}
        )
        out = num if den.coeffs == {0: ExtScalar(GR_ONE)} else num.mul(
            den.inverse(upto=window)
        )
        if as_form:
            out = out.mul(LocalSeries(GR_ONE, {-2: ExtScalar(-GR_ONE)}))
        return out
    z0 = as_gaussian(at)
    num = rf.num.shift(z0)
    den = rf.den.shift(z0)
    num_s = LocalSeries(GR_ONE, {k: ExtScalar(v) for k, v in enumerate(num.coeffs)})
    if den.degree == 0:
        return num_s.scale(ExtScalar(den.lead.inverse()))
    den_s = LocalSeries(GR_ONE, {k: ExtScalar(v) for k, v in enumerate(den.coeffs)})
    return num_s.mul(den_s.inverse(upto=window))


def _plane_expand(rf: RationalFunction, at, need: int, as_form: bool) -> LocalSeries:
    if rf.is_zero:
        raise AlgebraError("expansion of the zero form requested")
    window = _WINDOW_START
    while window <= _WINDOW_CAP:
        series = _plane_series(rf, at, window, as_form)
        if series.knows(need) and series.valuation() is not None:
            return series
        window *= 2
    raise PrecisionCapError(f"series window exceeded {_WINDOW_CAP} at z = {at}")


def _plane_form_ord(rf: RationalFunction, at) -> int:
    return _plane_expand(rf, at, 0, as_form=True).valuation()


# ---------------------------------------------------------------------------
# the data container
# ---------------------------------------------------------------------------


class WeierstrassData:
    """Four meromorphic 1-forms plus their puncture set.

    Invariants enforced at construction: exactly four forms, not all zero;
    every puncture carries a pole of at least one form; in the plane model
    every pole of every form is listed as a puncture.  Optional primitives
    (antiderivatives) are verified exactly when supplied.
    """

    __slots__ = ("kind", "forms", "punctures", "primitives", "curve")

    def __init__(self, kind, forms, punctures, primitives, curve):
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "forms", tuple(forms))
        object.__setattr__(self, "punctures", tuple(punctures))
        object.__setattr__(
            self, "primitives", None if primitives is None else tuple(primitives)
        )
        object.__setattr__(self, "curve", curve)

    def __setattr__(self, name, value):
        raise AttributeError("WeierstrassData is immutable")

    # -- constructors ----------------------------------------------------
    @classmethod
    def genus0(cls, forms, punctures, primitives=None) -> "WeierstrassData":
        forms = tuple(_as_plane_form(f) for f in forms)
        if len(forms) != 4:
            raise AlgebraError("exactly four forms required")
        if all(f.is_zero for f in forms):
            raise AlgebraError("all four forms are zero")
        pts = tuple(p if p is INFINITY else as_gaussian(p) for p in punctures)
        if len(set(_pkey(p) for p in pts)) != len(pts):
            raise AlgebraError("repeated puncture")
        data = cls("genus0", forms, pts, None, None)
        data._validate_plane_poles()
        if primitives is not None:
            prims = tuple(_as_plane_form(F) for F in primitives)
            for F, f in zip(prims, forms):
                if F.derivative() != f:
                    raise AlgebraError("primitive fails to differentiate to its form")
            object.__setattr__(data, "primitives", prims)
        return data

    @classmethod
    def on_curve(cls, curve, forms, punctures, primitives=None) -> "WeierstrassData":
        forms = tuple(forms)
        if len(forms) != 4:
            raise AlgebraError("exactly four forms required")
        for f in forms:
            if not isinstance(f, Differential) or f.curve != curve:
                raise AlgebraError("forms must be Differentials on the given curve")
        if all(f.is_zero for f in forms):
            raise AlgebraError("all four forms are zero")
        pts = tuple(punctures)
        for p in pts:
            if not isinstance(p, CurvePoint) or p.curve != curve:
                raise AlgebraError("punctures must be CurvePoints on the curve")
        if len(set(pts)) != len(pts):
            raise AlgebraError("repeated puncture")
        data = cls("curve", forms, pts, None, curve)
        for p in pts:
            if data.min_order_at(p) >= 0:
                raise AlgebraError(f"no form has a pole at puncture {p}")
        if primitives is not None:
            prims = tuple(primitives)
            for F, f in zip(prims, forms):
                if not isinstance(F, FieldElement):
                    raise AlgebraError("curve-model primitives must be FieldElements")
                if differential_of(F) != f:
                    raise AlgebraError("primitive fails to differentiate to its form")
            object.__setattr__(data, "primitives", prims)
        return data

    # -- shared helpers ----------------------------------------------------
    @property
    def genus(self) -> int:
        return 0 if self.kind == "genus0" else self.curve.genus

    def is_puncture(self, p) -> bool:
        if self.kind == "genus0":
            return any(_pkey(p) == _pkey(q) for q in self.punctures)
        return p in self.punctures

    def form_ord_at(self, j: int, p) -> Optional[int]:
        """Order of the j-th form (0-based) at p; None for the zero form."""
        f = self.forms[j]
        if f.is_zero:
            return None
        if self.kind == "genus0":
            return _plane_form_ord(f, p)
        return ord_at(f, p)

    def min_order_at(self, p) -> int:
        orders = [o for j in range(4) if (o := self.form_ord_at(j, p)) is not None]
        return min(orders)

    def form_residue_at(self, j: int, p) -> ExtScalar:
        f = self.forms[j]
        if f.is_zero:
            return ExtScalar(GR_ZERO)
        if self.kind == "genus0":
            series = _plane_expand(f, p, 0, as_form=True)
            return series.coefficient(-1)
        return residue_at(f, p)

    def form_leading_window(self, j: int, p, upto: int) -> LocalSeries:
        f = self.forms[j]
        if self.kind == "genus0":
            series = _plane_expand(f, p, upto, as_form=True)
            if not series.knows(upto):
                raise PrecisionCapError(f"window too small at {p}")
            return series
        return local_expansion(f, p, upto)

    def extension_constant_at(self, p) -> GaussianRational:
        if self.kind == "genus0":
            return GR_ONE
        from .curve import _Chart

        return _Chart(p, 1).c

    def _validate_plane_poles(self):
        finite_keys = {_pkey(p) for p in self.punctures if p is not INFINITY}
        needs_infinity = False
        for f in self.forms:
            if f.is_zero:
                continue
            if f.den.degree >= 1:
                roots, residual = gaussian_roots(f.den.squarefree_part())
                if residual.degree >= 1:
                    raise AlgebraError(
                        "form has poles at non-Q(i) points; they cannot be "
                        "covered by the puncture list"
                    )
                for root, _ in roots:
                    if _pkey(root) not in finite_keys:
                        raise AlgebraError(
                            f"form has a pole at z = {root} which is not a puncture"
                        )
            if int(f.den.degree) - int(f.num.degree) - 2 < 0:
                needs_infinity = True
        if needs_infinity and not any(p is INFINITY for p in self.punctures):
            raise AlgebraError("forms have a pole at infinity; add it as a puncture")
        for p in self.punctures:
            if self.min_order_at(p) >= 0:
                raise AlgebraError(f"no form has a pole at puncture {p}")

    def __repr__(self):
        return (
            f"WeierstrassData(kind={self.kind}, genus={self.genus}, "
            f"punctures={len(self.punctures)})"
        )


def _as_plane_form(f) -> RationalFunction:
    if isinstance(f, RationalFunction):
        return f
    if isinstance(f, Poly):
        return RationalFunction(f)
    return RationalFunction(Poly.constant(as_gaussian(f)))


def _pkey(p):
    if p is INFINITY:
        return "inf"
    g = as_gaussian(p)
    return (g.re, g.im)


# ---------------------------------------------------------------------------
# conformality
# ---------------------------------------------------------------------------


def check_conformal(data: WeierstrassData):
    """Exact test of phi1^2 + phi2^2 + phi3^2 + phi4^2 == 0.

    Returns (True, None) or (False, witness) with the nonzero sum as the
    witness (a RationalFunction in the plane model, a FieldElement times
    (dx)^2/(dx)^2-normalization on a curve: concretely the element A + B y
    with the sum equal to (A + B y) (dx)^2).
    """
    if data.kind == "genus0":
        total = RationalFunction(Poly.zero())
        for f in data.forms:
            total = total + f * f
        return (True, None) if total.is_zero else (False, total)
    total = None
    for f in data.forms:
        sq = f.elem * f.elem
        total = sq if total is None else total + sq
    return (True, None) if total.is_zero else (False, total)


# ---------------------------------------------------------------------------
# end reports
# ---------------------------------------------------------------------------


class EndData:
    """Everything the planar-end certificate needs at one puncture."""

    __slots__ = (
        "puncture",
        "min_order",
        "residues",
        "leading",
        "gauss_image",
        "extension_constant",
    )

    def __init__(self, puncture, min_order, residues, leading, extension_constant):
        object.__setattr__(self, "puncture", puncture)
        object.__setattr__(self, "min_order", int(min_order))
        object.__setattr__(self, "residues", tuple(residues))
        object.__setattr__(self, "leading", tuple(leading))
        object.__setattr__(self, "extension_constant", extension_constant)
        first = next((v for v in leading if not v.is_zero), None)
        if first is None:
            raise AlgebraError("gauss image is the zero vector")
        inv = first.inv(extension_constant)
        image = tuple(v.mul(inv, extension_constant) for v in self.leading)
        object.__setattr__(self, "gauss_image", image)

    def __setattr__(self, name, value):
        raise AttributeError("EndData is immutable")

    @property
    def is_embedded_planar(self) -> bool:
        return self.min_order == -2 and all(r.is_zero for r in self.residues)

    def on_quadric(self) -> bool:
        c = self.extension_constant
        total = ExtScalar(GR_ZERO)
        for v in self.gauss_image:
            total = total.add(v.mul(v, c))
        return total.is_zero

    def gauss_image_str(self) -> str:
        return "[" + ",".join(_ext_str(v) for v in self.gauss_image) + "]"

    def __repr__(self):
        flag = "planar" if self.is_embedded_planar else "NOT-planar"
        return (
            f"EndData(at {self.puncture}: min_order={self.min_order}, "
            f"{flag}, image={self.gauss_image_str()})"
        )


def _ext_str(v: ExtScalar) -> str:
    if v.b.is_zero:
        return str(v.a)
    if v.a.is_zero:
        return f"({v.b})*u"
    return f"{v.a}+({v.b})*u"


def planar_end_report(data: WeierstrassData, p) -> EndData:
    """Certificate data at the puncture p.

    The end passes (is an embedded planar end) iff the strongest pole order
    across the four forms is exactly -2 and all four residues vanish.  The
    Gauss image is the vector of coefficients at the strongest order,
    normalized so its first nonzero entry is 1.
    """
    if not data.is_puncture(p):
        raise AlgebraError(f"{p} is not a puncture of this data")
    orders = [data.form_ord_at(j, p) for j in range(4)]
    live = [o for o in orders if o is not None]
    m = min(live)
    residues = [data.form_residue_at(j, p) for j in range(4)]
    leading = []
    for j in range(4):
        if orders[j] is None:
            leading.append(ExtScalar(GR_ZERO))
        else:
            series = data.form_leading_window(j, p, m)
            leading.append(series.coefficient(m))
    c = data.extension_constant_at(p)
    return EndData(p, m, residues, leading, c)


def end_reports(data: WeierstrassData):
    return [planar_end_report(data, p) for p in data.punctures]


# ---------------------------------------------------------------------------
# Gauss map, rulings, degrees
# ---------------------------------------------------------------------------


class ProjectiveFunction:
    """A map to P^1 held as a (numerator, denominator) pair.

    Either entry may be identically zero (constant 0 or constant infinity),
    but not both.
    """

    __slots__ = ("num", "den", "kind", "fallback_used")

    def __init__(self, num, den, kind, fallback_used=False):
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "fallback_used", fallback_used)

    def __setattr__(self, name, value):
        raise AttributeError("ProjectiveFunction is immutable")

    @property
    def is_constant_infinity(self) -> bool:
        return _z(self.den) and not _z(self.num)

    @property
    def is_constant_zero(self) -> bool:
        return _z(self.num) and not _z(self.den)

    def ratio(self):
        """num/den as a function (raises for the constant-infinity map)."""
        if _z(self.den):
            raise AlgebraError("constant-infinity map has no affine ratio")
        return self.num / self.den

    @property
    def is_constant(self) -> bool:
        if self.is_constant_infinity or self.is_constant_zero:
            return True
        r = self.ratio()
        if isinstance(r, RationalFunction):
            return r.is_constant
        return r.b.is_zero and r.a.is_constant

    def degree(self) -> int:
        """Degree of the induced map to P^1 (0 for constants), exact."""
        if self.is_constant:
            return 0
        r = self.ratio()
        if isinstance(r, RationalFunction):
            return r.map_degree()
        return polar_degree(r)


def _z(form) -> bool:
    return form.is_zero


def _combo(data: WeierstrassData, coeffs):
    """Linear combination of the four forms with Q(i) coefficients,
    returned as a plane rational function or a curve FieldElement."""
    if data.kind == "genus0":
        total = RationalFunction(Poly.zero())
        for c, f in zip(coeffs, data.forms):
            if not c.is_zero:
                total = total + f * c
        return total
    total = data.curve.constant(0)
    for c, f in zip(coeffs, data.forms):
        if not c.is_zero:
            total = total + f.elem * data.curve.constant(c)
    return total


def gauss_map(data: WeierstrassData):
    """The two ruling-coordinate maps (g1, g2) as projective pairs.

    g1 = (phi3 + i phi4) / (phi1 - i phi2) and
    g2 = (-phi3 + i phi4) / (phi1 - i phi2).
    When a pair degenerates to 0/0 identically, the on-quadric identities
    g1 = -(phi1 + i phi2)/(phi3 - i phi4) and
    g2 =  (phi1 + i phi2)/(phi3 + i phi4)
    supply an equivalent representative (both identities are exact
    consequences of conformality).
    """
    i = GR_I
    one = GR_ONE
    zero = GR_ZERO
    p1_minus_ip2 = _combo(data, (one, -i, zero, zero))
    p1_plus_ip2 = _combo(data, (one, i, zero, zero))
    p3_plus_ip4 = _combo(data, (zero, zero, one, i))
    p3_minus_ip4 = _combo(data, (zero, zero, one, -i))
    minus_p3_plus_ip4 = _combo(data, (zero, zero, -one, i))
    maps = []
    for direct, fallback in (
        ((p3_plus_ip4, p1_minus_ip2), (-p1_plus_ip2, p3_minus_ip4)),
        ((minus_p3_plus_ip4, p1_minus_ip2), (p1_plus_ip2, p3_plus_ip4)),
    ):
        num, den = direct
        used_fallback = False
        if _z(num) and _z(den):
            num, den = fallback
            used_fallback = True
            if _z(num) and _z(den):
                raise AlgebraError(
                    "both ruling representatives degenerate; data cannot be "
                    "conformal and nonconstant"
                )
        maps.append(ProjectiveFunction(num, den, data.kind, used_fallback))
    return tuple(maps)


def gauss_degrees(data: WeierstrassData):
    """Exact degrees (d1, d2) of the two ruling-coordinate maps."""
    g1, g2 = gauss_map(data)
    return (g1.degree(), g2.degree())


class RulingPoint:
    """Which line of a ruling family a quadric point sits on."""

    __slots__ = ("family", "pair", "extension_constant")

    def __init__(self, family, pair, extension_constant):
        if family not in ("L", "M"):
            raise AlgebraError("family must be 'L' or 'M'")
        a, b = pair
        if a.is_zero and b.is_zero:
            raise AlgebraError("ruling parameter must be a nonzero pair")
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "pair", (a, b))
        object.__setattr__(self, "extension_constant", extension_constant)

    def __setattr__(self, name, value):
        raise AttributeError("RulingPoint is immutable")

    def normalized(self):
        """[1 : w] or [0 : 1] with the leading entry cleared."""
        a, b = self.pair
        c = self.extension_constant
        if not a.is_zero:
            return (ExtScalar(GR_ONE), b.mul(a.inv(c), c))
        return (ExtScalar(GR_ZERO), ExtScalar(GR_ONE))

    def same_line(self, other: "RulingPoint") -> bool:
        if self.family != other.family:
            raise AlgebraError("comparing ruling points of different families")
        a1, b1 = self.normalized()
        a2, b2 = other.normalized()
        if a1 != a2:
            return False
        same_ext = self.extension_constant == other.extension_constant
        for v in (b1, b2):
            if not v.b.is_zero and not same_ext:
                raise AlgebraError(
                    "ruling comparison across different quadratic extensions "
                    "is only defined for rational coordinates"
                )
        if same_ext:
            return b1 == b2
        return b1.a == b2.a and b1.b.is_zero and b2.b.is_zero

    def __repr__(self):
        a, b = self.normalized()
        return f"RulingPoint({self.family}, [{_ext_str(a)}:{_ext_str(b)}])"


def ruling_point(end: EndData, family: str) -> RulingPoint:
    """The ruling line through an end's Gauss image, per family.

    L uses [z3 + i z4 : z1 - i z2] with fallback [-(z1 + i z2) : z3 - i z4];
    M uses [-z3 + i z4 : z1 - i z2] with fallback [z1 + i z2 : z3 + i z4].
    """
    if not end.on_quadric():
        raise AlgebraError("gauss image is not on the quadric")
    c = end.extension_constant
    z1, z2, z3, z4 = end.gauss_image
    i = ExtScalar(GR_I)

    def cmb(u, su, v, sv):
        left = u if su > 0 else u.neg()
        right = v.mul(i, c) if sv > 0 else v.mul(i, c).neg()
        return left.add(right)

    if family == "L":
        direct = (cmb(z3, 1, z4, 1), cmb(z1, 1, z2, -1))
        fallback = (cmb(z1, 1, z2, 1).neg(), cmb(z3, 1, z4, -1))
    elif family == "M":
        direct = (cmb(z3, -1, z4, 1), cmb(z1, 1, z2, -1))
        fallback = (cmb(z1, 1, z2, 1), cmb(z3, 1, z4, 1))
    else:
        raise AlgebraError("family must be 'L' or 'M'")
    a, b = direct
    if a.is_zero and b.is_zero:
        a, b = fallback
        if a.is_zero and b.is_zero:
            raise AlgebraError("degenerate ruling coordinates on both routes")
    return RulingPoint(family, (a, b), c)


def same_ruling(end1: EndData, end2: EndData) -> dict:
    """Whether two end images lie on one common line, family by family."""
    out = {}
    for family in ("L", "M"):
        out[family] = ruling_point(end1, family).same_line(
            ruling_point(end2, family)
        )
    return out


# ---------------------------------------------------------------------------
# periods
# ---------------------------------------------------------------------------


class PeriodRecord:
    """One loop/cycle period of one form."""

    __slots__ = ("label", "form_index", "value", "real_part", "method")

    def __init__(self, label, form_index, value, real_part, method):
        object.__setattr__(self, "label", label)
        object.__setattr__(self, "form_index", form_index)
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "real_part", real_part)
        object.__setattr__(self, "method", method)

    def __setattr__(self, name, value):
        raise AttributeError("PeriodRecord is immutable")

    def __repr__(self):
        return (
            f"PeriodRecord({self.label}, form {self.form_index + 1}: "
            f"{self.value} [{self.method}])"
        )


def real_periods_zero(data: WeierstrassData, tolerance: float = 1e-9):
    """Decide whether all periods have vanishing real part.

    Returns (verdict, table).  With verified primitives every period is
    certified zero symbolically.  Otherwise puncture loops are settled by
    exact residues (period = 2 pi i residue), and on positive-genus curves
    the 2g homology cycles are integrated numerically.
    """
    table = []
    ok = True
    if data.primitives is not None:
        labels = [f"loop around {p}" for p in data.punctures]
        if data.kind == "curve":
            labels += [f"cycle {k + 1}" for k in range(2 * data.genus)]
        for label in labels:
            for j in range(4):
                table.append(PeriodRecord(label, j, 0j, 0.0, "primitive"))
        return True, table

    for p in data.punctures:
        c = data.extension_constant_at(p)
        for j in range(4):
            res = data.form_residue_at(j, p)
            if res.is_zero:
                table.append(
                    PeriodRecord(f"loop around {p}", j, 0j, 0.0, "exact-residue")
                )
                continue
            value = 2j * math.pi * res.to_complex(c)
            real = value.real
            if res.a.im.numerator == 0 and res.b.is_zero:
                real = 0.0  # purely real residue: real part exactly zero
                value = complex(0.0, value.imag)
            table.append(
                PeriodRecord(f"loop around {p}", j, value, real, "exact-residue")
            )
            if abs(real) > tolerance:
                ok = False

    if data.kind == "curve" and data.genus > 0:
        from . import numerics

        for record in numerics.cycle_period_records(data):
            table.append(record)
            if abs(record.real_part) > tolerance:
                ok = False
    return ok, table


# ---------------------------------------------------------------------------
# symmetry helper
# ---------------------------------------------------------------------------


def transform_forms(data: WeierstrassData, matrix) -> WeierstrassData:
    """New data with forms matrix @ (phi1..phi4), punctures unchanged.

    For orthogonal rational matrices this realizes a rigid rotation of the
    ambient R^4 (up to the usual complexified identification), under which
    planar-end verdicts are invariant.
    """
    rows = [[as_gaussian(v) for v in row] for row in matrix]
    if len(rows) != 4 or any(len(r) != 4 for r in rows):
        raise AlgebraError("need a 4x4 matrix")
    if data.kind == "genus0":
        new_forms = []
        for row in rows:
            total = RationalFunction(Poly.zero())
            for cf, f in zip(row, data.forms):
                if not cf.is_zero:
                    total = total + f * cf
            new_forms.append(total)
        prims = None
        if data.primitives is not None:
            prims = []
            for row in rows:
                total = RationalFunction(Poly.zero())
                for cf, F in zip(row, data.primitives):
                    if not cf.is_zero:
                        total = total + F * cf
                prims.append(total)
        return WeierstrassData.genus0(new_forms, data.punctures, prims)
    new_forms = []
    for row in rows:
        total = data.curve.constant(0)
        for cf, f in zip(row, data.forms):
            if not cf.is_zero:
                total = total + f.elem * data.curve.constant(cf)
        new_forms.append(Differential(total))
    prims = None
    if data.primitives is not None:
        prims = []
        for row in rows:
            total = data.curve.constant(0)
            for cf, F in zip(row, data.primitives):
                if not cf.is_zero:
                    total = total + F * data.curve.constant(cf)
            prims.append(total)
    return WeierstrassData.on_curve(data.curve, new_forms, data.punctures, prims)
