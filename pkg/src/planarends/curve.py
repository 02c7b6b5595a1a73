"""Hyperelliptic curves y^2 = prod (x - lambda_j) and their function fields.

Conventions fixed by this module (and relied on everywhere above it):

- A curve is given by 2g+2 distinct branch values; the two points over
  x = infinity are labelled so that on sheet 1 the function y * x^-(g+1)
  tends to +1 along the positive real axis (sheet 2 gives -1).
- Local parameters: t = x - x0 at an affine point, x = lambda_j + t^2 at the
  branch point over lambda_j, and s = 1/x at infinity.
- Square roots of local series at branch points take the +u branch, where u
  is the extension generator with u^2 = prod_{k != j} (lambda_j - lambda_k);
  when that constant happens to be a perfect square the canonical rational
  root (re > 0, or re == 0 and im >= 0) is used instead.

Orders and residues of differentials are reported in the local parameter:
for omega = h(t) dt the order is the leading exponent of h and the residue
is the coefficient of t^-1.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from .algebra import (
    AlgebraError,
    ExtScalar,
    GaussianRational,
    GR_ONE,
    GR_ZERO,
    LocalSeries,
    Poly,
    PrecisionCapError,
    RationalFunction,
    as_gaussian,
    gaussian_roots,
)

__all__ = [
    "UnrepresentablePointError",
    "HyperellipticCurve",
    "CurvePoint",
    "FieldElement",
    "Differential",
    "Divisor",
    "local_expansion",
    "ord_at",
    "residue_at",
    "divisor",
    "differential_divisor",
    "differential_of",
    "holomorphic_basis",
    "canonical_order_sum",
]

_WINDOW_START = 8
_WINDOW_CAP = 256


class UnrepresentablePointError(AlgebraError):
    """A divisor's support leaves the Q(i)-rational points of the curve."""


class HyperellipticCurve:
    """The smooth double cover of P^1 branched over the given values."""

    __slots__ = ("lambdas", "genus", "R", "Rprime")

    def __init__(self, lambdas):
        lams = tuple(as_gaussian(v) for v in lambdas)
        if len(lams) < 2 or len(lams) % 2:
            raise AlgebraError(
                "need an even number (>= 2) of branch values, got "
                f"{len(lams)}"
            )
        if len({(v.re, v.im) for v in lams}) != len(lams):
            raise AlgebraError("branch values must be distinct")
        object.__setattr__(self, "lambdas", lams)
        object.__setattr__(self, "genus", (len(lams) - 2) // 2)
        object.__setattr__(self, "R", Poly.from_roots(lams))
        object.__setattr__(self, "Rprime", Poly.from_roots(lams).derivative())

    def __setattr__(self, name, value):
        raise AttributeError("HyperellipticCurve is immutable")

    def __eq__(self, other):
        if not isinstance(other, HyperellipticCurve):
            return NotImplemented
        return self.lambdas == other.lambdas

    def __hash__(self):
        return hash(self.lambdas)

    def __repr__(self):
        vals = ", ".join(str(v) for v in self.lambdas)
        return f"HyperellipticCurve([{vals}])"

    # -- points ---------------------------------------------------------
    def affine(self, x0, y0) -> "CurvePoint":
        x0, y0 = as_gaussian(x0), as_gaussian(y0)
        if y0.is_zero:
            raise AlgebraError("affine points here have y != 0; use branch()")
        if y0 * y0 != self.R(x0):
            raise AlgebraError(f"({x0}, {y0}) does not satisfy y^2 = R(x)")
        return CurvePoint(self, "affine", (x0, y0))

    def branch_point(self, index: int) -> "CurvePoint":
        if not 1 <= index <= len(self.lambdas):
            raise AlgebraError(f"branch index {index} out of range")
        return CurvePoint(self, "branch", (index,))

    def infinity(self, sheet: int) -> "CurvePoint":
        if sheet not in (1, 2):
            raise AlgebraError("sheet must be 1 or 2")
        return CurvePoint(self, "infinity", (sheet,))

    def branch_points(self):
        return [self.branch_point(j) for j in range(1, len(self.lambdas) + 1)]

    def infinities(self):
        return [self.infinity(1), self.infinity(2)]

    # -- field elements ---------------------------------------------------
    def function(self, a, b=0) -> "FieldElement":
        return FieldElement(self, a, b)

    def constant(self, c) -> "FieldElement":
        return FieldElement(self, RationalFunction(Poly.constant(c)), 0)

    def x(self) -> "FieldElement":
        return FieldElement(self, RationalFunction.x(), 0)

    def y(self) -> "FieldElement":
        return FieldElement(self, 0, RationalFunction(Poly.one()))


class CurvePoint:
    """A Q(i)-rational point: affine (x0, y0), a branch point, or infinity."""

    __slots__ = ("curve", "kind", "data")

    def __init__(self, curve: HyperellipticCurve, kind: str, data: tuple):
        object.__setattr__(self, "curve", curve)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "data", data)

    def __setattr__(self, name, value):
        raise AttributeError("CurvePoint is immutable")

    @property
    def x0(self) -> GaussianRational:
        if self.kind == "affine":
            return self.data[0]
        if self.kind == "branch":
            return self.curve.lambdas[self.data[0] - 1]
        raise AlgebraError("point at infinity has no finite x")

    @property
    def y0(self) -> GaussianRational:
        if self.kind == "affine":
            return self.data[1]
        if self.kind == "branch":
            return GR_ZERO
        raise AlgebraError("point at infinity has no finite y")

    @property
    def branch_index(self) -> int:
        if self.kind != "branch":
            raise AlgebraError("not a branch point")
        return self.data[0]

    @property
    def sheet(self) -> int:
        if self.kind != "infinity":
            raise AlgebraError("not a point at infinity")
        return self.data[0]

    def involution(self) -> "CurvePoint":
        """Image under the sheet swap (x, y) -> (x, -y)."""
        if self.kind == "affine":
            return CurvePoint(self.curve, "affine", (self.data[0], -self.data[1]))
        if self.kind == "infinity":
            return CurvePoint(self.curve, "infinity", (3 - self.data[0],))
        return self

    def __eq__(self, other):
        if not isinstance(other, CurvePoint):
            return NotImplemented
        return (
            self.curve.lambdas == other.curve.lambdas
            and self.kind == other.kind
            and self.data == other.data
        )

    def __hash__(self):
        return hash((self.curve.lambdas, self.kind, self.data))

    def __str__(self):
        if self.kind == "affine":
            return f"({self.data[0]}, {self.data[1]})"
        if self.kind == "branch":
            return f"branch[{self.data[0]}]@x={self.x0}"
        return f"infinity[{self.data[0]}]"

    def __repr__(self):
        return f"CurvePoint<{self}>"

    def sort_key(self):
        return (self.kind, str(self))


class FieldElement:
    """a(x) + b(x) * y in the curve's function field."""

    __slots__ = ("curve", "a", "b")

    def __init__(self, curve: HyperellipticCurve, a, b=0):
        object.__setattr__(self, "curve", curve)
        object.__setattr__(self, "a", _as_ratfunc(a))
        object.__setattr__(self, "b", _as_ratfunc(b))

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    @property
    def is_zero(self) -> bool:
        return self.a.is_zero and self.b.is_zero

    @property
    def is_x_only(self) -> bool:
        return self.b.is_zero

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.curve.lambdas != self.curve.lambdas:
                raise AlgebraError("mixing elements of different curves")
            return other
        if isinstance(other, (int, Fraction, GaussianRational, Poly, RationalFunction)):
            return FieldElement(self.curve, _as_ratfunc(other), 0)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.curve, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.curve, self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return FieldElement(self.curve, -self.a, -self.b)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        Rrf = RationalFunction(self.curve.R)
        return FieldElement(
            self.curve,
            self.a * o.a + self.b * o.b * Rrf,
            self.a * o.b + self.b * o.a,
        )

    __rmul__ = __mul__

    def norm_x(self) -> RationalFunction:
        """The x-line norm a^2 - b^2 R (this element times its conjugate)."""
        return self.a * self.a - self.b * self.b * RationalFunction(self.curve.R)

    def inverse(self) -> "FieldElement":
        n = self.norm_x()
        if n.is_zero:
            raise AlgebraError("inverting the zero field element")
        return FieldElement(self.curve, self.a / n, -self.b / n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def involution_pullback(self) -> "FieldElement":
        """Composition with the sheet swap (x, y) -> (x, -y)."""
        return FieldElement(self.curve, self.a, -self.b)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.curve.lambdas, self.a, self.b))

    def __bool__(self):
        return not self.is_zero

    def value_at(self, point: CurvePoint) -> GaussianRational:
        """Exact value at an affine or branch point (must be finite)."""
        x0, y0 = point.x0, point.y0
        return self.a(x0) + self.b(x0) * y0

    def __str__(self):
        if self.b.is_zero:
            return str(self.a)
        return f"({self.a}) + ({self.b})*y"

    def __repr__(self):
        return f"FieldElement[{self}]"


def _as_ratfunc(v) -> RationalFunction:
    if isinstance(v, RationalFunction):
        return v
    if isinstance(v, Poly):
        return RationalFunction(v)
    return RationalFunction(Poly.constant(as_gaussian(v)))


class Differential:
    """A meromorphic 1-form written as (field element) * dx."""

    __slots__ = ("elem",)

    def __init__(self, elem: FieldElement):
        object.__setattr__(self, "elem", elem)

    def __setattr__(self, name, value):
        raise AttributeError("Differential is immutable")

    @property
    def curve(self) -> HyperellipticCurve:
        return self.elem.curve

    @property
    def is_zero(self) -> bool:
        return self.elem.is_zero

    def __add__(self, other):
        if not isinstance(other, Differential):
            return NotImplemented
        return Differential(self.elem + other.elem)

    def __sub__(self, other):
        if not isinstance(other, Differential):
            return NotImplemented
        return Differential(self.elem - other.elem)

    def __neg__(self):
        return Differential(-self.elem)

    def scale(self, s) -> "Differential":
        return Differential(self.elem * self.elem.curve.constant(s))

    def times(self, f: FieldElement) -> "Differential":
        """The differential f * omega."""
        return Differential(self.elem * f)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self.scale(other)
        if isinstance(other, FieldElement):
            return self.times(other)
        return NotImplemented

    __rmul__ = __mul__

    def involution_pullback(self) -> "Differential":
        # x is invariant under the sheet swap, so dx pulls back to dx
        return Differential(self.elem.involution_pullback())

    def __eq__(self, other):
        if not isinstance(other, Differential):
            return NotImplemented
        return self.elem == other.elem

    def __hash__(self):
        return hash(("dx", self.elem))

    def __str__(self):
        return f"[{self.elem}] dx"

    def __repr__(self):
        return f"Differential[{self}]"


class Divisor:
    """Finite formal sum of curve points with integer multiplicities."""

    __slots__ = ("entries",)

    def __init__(self, entries=None):
        clean = {}
        if entries:
            for pt, m in entries.items():
                if m:
                    clean[pt] = int(m)
        object.__setattr__(self, "entries", clean)

    def __setattr__(self, name, value):
        raise AttributeError("Divisor is immutable")

    @property
    def degree(self) -> int:
        return sum(self.entries.values())

    def multiplicity(self, pt: CurvePoint) -> int:
        return self.entries.get(pt, 0)

    @property
    def points(self):
        return sorted(self.entries, key=lambda p: p.sort_key())

    def polar_part(self) -> "Divisor":
        return Divisor({p: -m for p, m in self.entries.items() if m < 0})

    def zero_part(self) -> "Divisor":
        return Divisor({p: m for p, m in self.entries.items() if m > 0})

    def __add__(self, other):
        if not isinstance(other, Divisor):
            return NotImplemented
        out = dict(self.entries)
        for p, m in other.entries.items():
            out[p] = out.get(p, 0) + m
        return Divisor(out)

    def __sub__(self, other):
        if not isinstance(other, Divisor):
            return NotImplemented
        out = dict(self.entries)
        for p, m in other.entries.items():
            out[p] = out.get(p, 0) - m
        return Divisor(out)

    def __neg__(self):
        return Divisor({p: -m for p, m in self.entries.items()})

    def __eq__(self, other):
        if not isinstance(other, Divisor):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self):
        return hash(frozenset(self.entries.items()))

    def __str__(self):
        if not self.entries:
            return "0"
        parts = []
        for p in self.points:
            m = self.entries[p]
            parts.append(f"{m:+d}*{p}")
        return " ".join(parts)

    def __repr__(self):
        return f"Divisor[{self}]"


# ---------------------------------------------------------------------------
# charts and local series
# ---------------------------------------------------------------------------


def _poly_series_affine(p: Poly, x0: GaussianRational) -> LocalSeries:
    sh = p.shift(x0)
    return LocalSeries(GR_ONE, {k: ExtScalar(v) for k, v in enumerate(sh.coeffs)})


def _poly_series_branch(p: Poly, lam: GaussianRational, c) -> LocalSeries:
    sh = p.shift(lam)
    return LocalSeries(c, {2 * k: ExtScalar(v) for k, v in enumerate(sh.coeffs)})


def _poly_series_infinity(p: Poly, c) -> LocalSeries:
    return LocalSeries(c, {-k: ExtScalar(v) for k, v in enumerate(p.coeffs)})


class _Chart:
    """Collects exact series of x, y and dx/dt at a point, for a window W."""

    def __init__(self, point: CurvePoint, window: int):
        curve = point.curve
        self.point = point
        self.window = window
        if point.kind == "affine":
            x0, y0 = point.x0, point.y0
            self.c = GR_ONE
            ys = _poly_series_affine(curve.R, x0).sqrt(upto=window)
            if ys.coefficient(0) != ExtScalar(y0):
                ys = ys.neg()
            if ys.coefficient(0) != ExtScalar(y0):
                raise AlgebraError("affine sqrt branch mismatch")
            self.y = ys
            self.dxdt = LocalSeries(self.c, {0: ExtScalar(GR_ONE)})
            self._sub = lambda p: _poly_series_affine(p, x0)
        elif point.kind == "branch":
            j = point.branch_index
            lam = curve.lambdas[j - 1]
            others = Poly.from_roots(
                [v for i, v in enumerate(curve.lambdas) if i != j - 1]
            )
            self.c = others(lam)
            inner = _poly_series_branch(others, lam, self.c)
            # y = t * sqrt(prod_{k != j}(x(t) - lambda_k)), +u branch
            self.y = inner.sqrt(upto=2 * window, branch=1).shift(1)
            self.dxdt = LocalSeries(self.c, {1: ExtScalar(GaussianRational(2))})
            self._sub = lambda p: _poly_series_branch(p, lam, self.c)
        elif point.kind == "infinity":
            sheet = point.sheet
            self.c = GR_ONE
            gp1 = curve.genus + 1
            prod = Poly.one()
            for lam in curve.lambdas:
                prod = prod * Poly([GR_ONE, -lam])  # 1 - lambda * s
            inner = LocalSeries(
                self.c, {k: ExtScalar(v) for k, v in enumerate(prod.coeffs)}
            )
            ys = inner.sqrt(upto=window + 2 * gp1).shift(-gp1)
            if sheet == 2:
                ys = ys.neg()
            self.y = ys
            self.dxdt = LocalSeries(self.c, {-2: ExtScalar(-GR_ONE)})
            self._sub = lambda p: _poly_series_infinity(p, self.c)
        else:  # pragma: no cover
            raise AlgebraError(f"unknown point kind {point.kind}")

    def ratfunc(self, rf: RationalFunction) -> LocalSeries:
        num = self._sub(rf.num)
        if rf.den.degree == 0:
            return num.scale(ExtScalar(rf.den.lead.inverse()))
        den = self._sub(rf.den)
        return num.mul(den.inverse(upto=self.window))

    def element(self, f: FieldElement) -> LocalSeries:
        out = self.ratfunc(f.a)
        if not f.b.is_zero:
            out = out.add(self.ratfunc(f.b).mul(self.y))
        return out

    def differential(self, omega: Differential) -> LocalSeries:
        return self.element(omega.elem).mul(self.dxdt)


def _expand(obj, point: CurvePoint, need_exponent: int) -> LocalSeries:
    """Series of a FieldElement or Differential with coefficients known
    through ``need_exponent``, or with a known leading term, whichever is
    satisfied first; doubles the working window up to the cap."""
    is_diff = isinstance(obj, Differential)
    if (obj.is_zero if is_diff else obj.is_zero):
        raise AlgebraError("expansion of the zero element requested")
    window = _WINDOW_START
    while window <= _WINDOW_CAP:
        chart = _Chart(point, window)
        series = chart.differential(obj) if is_diff else chart.element(obj)
        if series.knows(need_exponent) and series.valuation() is not None:
            return series
        window *= 2
    raise PrecisionCapError(
        f"series window exceeded {_WINDOW_CAP} at {point} "
        "(is the element far more degenerate than expected?)"
    )


def local_expansion(obj, point: CurvePoint, upto: int) -> LocalSeries:
    """Local series of a Differential (coefficient of dt) or FieldElement
    at ``point`` in the canonical parameter, known through exponent ``upto``.
    """
    series = _expand(obj, point, upto)
    if not series.knows(upto):
        raise PrecisionCapError(
            f"could not reach exponent {upto} at {point} within the cap"
        )
    return series


def ord_at(obj, point: CurvePoint) -> int:
    """Order of vanishing (negative for poles) in the local parameter."""
    series = _expand(obj, point, 0)
    v = series.valuation()
    if v is None:  # pragma: no cover - _expand guarantees a leading term
        raise PrecisionCapError(f"no leading term found at {point}")
    return v

def residue_at(omega: Differential, point: CurvePoint) -> ExtScalar:
    """Coefficient of t^-1 dt at the point (exact, in Q(i)(u))."""
    if not isinstance(omega, Differential):
        raise AlgebraError("residues are defined for differentials")
    series = _expand(omega, point, 0)
    if not series.knows(-1):  # pragma: no cover
        raise PrecisionCapError(f"residue window too small at {point}")
    return series.coefficient(-1)


# ---------------------------------------------------------------------------
# calculus and divisors
# ---------------------------------------------------------------------------


def differential_of(f: FieldElement) -> Differential:
    """Exterior derivative df as a Differential.

    With f = a + b y and y' = R' y / (2R) this is
    (a' + (b' + b R'/(2R)) y) dx.
    """
    curve = f.curve
    Rrf = RationalFunction(curve.R)
    Rp = RationalFunction(curve.Rprime)
    bpart = f.b.derivative() + f.b * Rp / (Rrf * 2)
    return Differential(FieldElement(curve, f.a.derivative(), bpart))


def holomorphic_basis(curve: HyperellipticCurve):
    """The g differentials x^k dx / y, each certified holomorphic."""
    basis = []
    Rrf = RationalFunction(curve.R)
    for k in range(curve.genus):
        elem = FieldElement(
            curve, 0, RationalFunction(Poly.x() ** k) / Rrf
        )
        omega = Differential(elem)
        for p in curve.branch_points() + curve.infinities():
            if ord_at(omega, p) < 0:
                raise AlgebraError(f"basis form x^{k} dx/y has a pole at {p}")
        basis.append(omega)
    return basis


def _strip_branch_factors(p: Poly, curve: HyperellipticCurve) -> Poly:
    out = p
    for lam in curve.lambdas:
        factor = Poly([-lam, GR_ONE])
        while out.degree >= 1:
            q, r = divmod(out, factor)
            if r.is_zero:
                out = q
            else:
                break
    return out


def _branch_multiplicity(p: Poly, lam: GaussianRational) -> int:
    count = 0
    factor = Poly([-lam, GR_ONE])
    while p.degree >= 1:
        q, r = divmod(p, factor)
        if r.is_zero:
            p = q
            count += 1
        else:
            break
    return count


def _affine_nonbranch_orders(f: FieldElement) -> dict:
    """Orders of f at all affine non-branch points where it has a zero/pole.

    Raises UnrepresentablePointError when any such point fails to be
    Q(i)-rational.
    """
    curve = f.curve
    norm = f.norm_x()
    candidates = {}
    polys = [f.a.den, f.b.den, norm.num, norm.den]
    for p in polys:
        if p.degree < 1:
            continue
        stripped = _strip_branch_factors(p, curve)
        if stripped.degree < 1:
            continue
        roots, residual = gaussian_roots(stripped.squarefree_part())
        if residual.degree >= 1:
            raise UnrepresentablePointError(
                "zeros/poles over non-Q(i) x-values (residual factor "
                f"{residual}); the divisor has no Q(i)-rational support"
            )
        for root, _ in roots:
            candidates[(root.re, root.im)] = root
    out = {}
    lam_keys = {(v.re, v.im) for v in curve.lambdas}
    for key, xi in candidates.items():
        if key in lam_keys:
            continue
        ysq = curve.R(xi)
        y0 = ysq.sqrt()
        if y0 is None:
            raise UnrepresentablePointError(
                f"the fiber over x = {xi} is not Q(i)-rational "
                f"(R(x) = {ysq} is not a square)"
            )
        for yv in (y0, -y0):
            pt = curve.affine(xi, yv)
            o = _function_ord_possibly_zero(f, pt)
            if o:
                out[pt] = o
    return out


def _function_ord_possibly_zero(f: FieldElement, point: CurvePoint) -> int:
    """ord of f at a point (0 when the value is finite and nonzero)."""
    window = _WINDOW_START
    while window <= _WINDOW_CAP:
        chart = _Chart(point, window)
        series = chart.element(f)
        v = series.valuation()
        if v is not None:
            return v
        window *= 2
    raise PrecisionCapError(f"order search exceeded the cap at {point}")


def divisor(f: FieldElement) -> Divisor:
    """Complete zero/pole divisor of a nonzero function (degree 0)."""
    if f.is_zero:
        raise AlgebraError("the zero element has no divisor")
    entries = {}
    for pt in f.curve.branch_points() + f.curve.infinities():
        o = ord_at(f, pt)
        if o:
            entries[pt] = o
    entries.update(_affine_nonbranch_orders(f))
    div = Divisor(entries)
    if div.degree != 0:
        raise AlgebraError(
            f"internal error: principal divisor has degree {div.degree}"
        )
    return div


def differential_divisor(omega: Differential) -> Divisor:
    """Complete zero/pole divisor of a nonzero differential (degree 2g-2).

    Away from branch points and infinity dx has neither zeros nor poles, so
    the affine non-branch part coincides with that of the coefficient
    element.
    """
    if omega.is_zero:
        raise AlgebraError("the zero differential has no divisor")
    entries = {}
    for pt in omega.curve.branch_points() + omega.curve.infinities():
        o = ord_at(omega, pt)
        if o:
            entries[pt] = o
    entries.update(_affine_nonbranch_orders(omega.elem))
    div = Divisor(entries)
    expected = 2 * omega.curve.genus - 2
    if div.degree != expected:
        raise AlgebraError(
            f"internal error: canonical divisor degree {div.degree} != {expected}"
        )
    return div


def canonical_order_sum(omega: Differential) -> int:
    """Sum of ord_p over all points, via norm-degree bookkeeping.

    Needs no root isolation: affine non-branch orders enter through the
    degree of the reduced norm of the coefficient element, with the branch
    contributions (handled exactly by local series) subtracted.
    """
    if omega.is_zero:
        raise AlgebraError("order sum of the zero differential")
    curve = omega.curve
    total = 0
    for pt in curve.branch_points() + curve.infinities():
        total += ord_at(omega, pt)
    norm = omega.elem.norm_x()
    agg = int(norm.num.degree) - int(norm.den.degree)
    for lam in curve.lambdas:
        agg -= _branch_multiplicity(norm.num, lam)
        agg += _branch_multiplicity(norm.den, lam)
    return total + agg


def polar_degree(f: FieldElement) -> int:
    """Total pole count of a nonzero function (the degree of the map to P^1).

    For x-only elements this is twice the degree of the underlying rational
    map of the x-line (the double cover contributes both sheets); otherwise
    it is read off the explicit divisor.
    """
    if f.is_zero:
        raise AlgebraError("polar degree of the zero element")
    if f.is_x_only:
        return 2 * f.a.map_degree()
    return divisor(f).polar_part().degree
