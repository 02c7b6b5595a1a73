"""Exact scalar, polynomial and local-series arithmetic.

Everything in this module is exact: scalars are Gaussian rationals (pairs of
arbitrary-precision ``Fraction``), polynomials are dense coefficient lists over
them, and local series are Laurent series whose coefficients live in the
quadratic extension Q(i)(u) with u**2 = c for a per-series constant c.  The
floating-point world only ever sees these objects through the ``to_complex``
style converters.
"""

from __future__ import annotations

import math
import re as _re
from fractions import Fraction
from typing import Iterable, Optional

__all__ = [
    "AlgebraError",
    "ExtensionSquareRootError",
    "PrecisionCapError",
    "RootSearchOverflow",
    "MINUS_INF",
    "GaussianRational",
    "GR_ZERO",
    "GR_ONE",
    "GR_I",
    "as_gaussian",
    "Poly",
    "poly_gcd",
    "resultant",
    "RationalFunction",
    "ExtScalar",
    "LocalSeries",
    "series_sqrt",
    "gaussian_roots",
]


class AlgebraError(ValueError):
    """Invalid exact-arithmetic operation (zero denominators and friends)."""


class ExtensionSquareRootError(AlgebraError):
    """A leading coefficient has no square root in Q(i)(u).

    Raised with a message instructing the caller to widen the extension
    constant c; the series machinery never falls back to floats.
    """


class PrecisionCapError(AlgebraError):
    """A truncation window kept doubling past the hard cap."""


class RootSearchOverflow(AlgebraError):
    """Rational-root enumeration would exceed the configured bound."""


#: Degree of the zero polynomial.  A dedicated sentinel (never -1) so that
#: comparisons like ``deg < 0`` behave for honest degrees.
MINUS_INF = float("-inf")


def _sqrt_fraction(value: Fraction) -> Optional[Fraction]:
    """Exact square root of a nonnegative rational, or None."""
    if value < 0:
        return None
    n, d = value.numerator, value.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


_RAT = r"\d+(?:/\d+)?"
_IMAG_ONLY = _re.compile(rf"([+-]?)({_RAT})?\*?i")
_FULL = _re.compile(rf"([+-]?{_RAT})(?:([+-])({_RAT})?\*?i)?")


class GaussianRational:
    """An element of Q(i), kept in canonical reduced form.

    >>> GaussianRational(1, 2) * GaussianRational(1, -2)
    GaussianRational('5')
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    # -- constructors -------------------------------------------------
    @classmethod
    def from_string(cls, text: str) -> "GaussianRational":
        s = text.replace(" ", "")
        if not s:
            raise AlgebraError("empty exact-scalar string")
        m = _IMAG_ONLY.fullmatch(s)
        if m:
            sign, mag = m.group(1), m.group(2)
            im = Fraction(mag) if mag else Fraction(1)
            return cls(0, -im if sign == "-" else im)
        m = _FULL.fullmatch(s)
        if m:
            re_part = Fraction(m.group(1))
            if m.group(2) is None:
                return cls(re_part, 0)
            im = Fraction(m.group(3)) if m.group(3) else Fraction(1)
            return cls(re_part, -im if m.group(2) == "-" else im)
        raise AlgebraError(f"cannot parse exact scalar {text!r}")

    # -- predicates ---------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return not self.re and not self.im

    @property
    def is_real(self) -> bool:
        return not self.im

    # -- arithmetic ---------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction)):
            return GaussianRational(other, 0)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

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

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = GR_ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        """|z|^2 as an exact rational."""
        return self.re * self.re + self.im * self.im

    def inverse(self) -> "GaussianRational":
        n = self.norm()
        if not n:
            raise AlgebraError("division by zero in Q(i)")
        return GaussianRational(self.re / n, -self.im / n)

    def sqrt(self) -> Optional["GaussianRational"]:
        """Exact square root in Q(i) if one exists, else None.

        The representative returned has re > 0, or re == 0 and im >= 0.
        """
        a, b = self.re, self.im
        if not b:
            if a >= 0:
                r = _sqrt_fraction(a)
                return GaussianRational(r, 0) if r is not None else None
            r = _sqrt_fraction(-a)
            return GaussianRational(0, r) if r is not None else None
        n = _sqrt_fraction(a * a + b * b)
        if n is None:
            return None
        p = _sqrt_fraction((a + n) / 2)
        if p is None or p == 0:
            return None
        q = b / (2 * p)
        return GaussianRational(p, q)

    # -- comparisons / conversions -------------------------------------
    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return not self.is_zero

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __str__(self):
        if not self.im:
            return str(self.re)
        mag = abs(self.im)
        imag = "i" if mag == 1 else f"{mag}*i"
        if not self.re:
            return imag if self.im > 0 else "-" + imag
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{imag}"

    def __repr__(self):
        return f"GaussianRational('{self}')"


GR_ZERO = GaussianRational(0)
GR_ONE = GaussianRational(1)
GR_I = GaussianRational(0, 1)


def as_gaussian(value) -> GaussianRational:
    """Coerce ints, Fractions, exact strings or GaussianRationals."""
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, (int, Fraction)):
        return GaussianRational(value, 0)
    if isinstance(value, str):
        return GaussianRational.from_string(value)
    raise AlgebraError(f"cannot interpret {value!r} as an exact scalar")


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------


class Poly:
    """Dense univariate polynomial over Q(i), coefficients lowest-first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [as_gaussian(c) for c in coeffs]
        while cs and cs[-1].is_zero:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls) -> "Poly":
        return cls(())

    @classmethod
    def one(cls) -> "Poly":
        return cls((GR_ONE,))

    @classmethod
    def x(cls) -> "Poly":
        return cls((GR_ZERO, GR_ONE))

    @classmethod
    def constant(cls, c) -> "Poly":
        return cls((as_gaussian(c),))

    @classmethod
    def from_roots(cls, roots: Iterable) -> "Poly":
        p = cls.one()
        for r in roots:
            p = p * cls((-as_gaussian(r), GR_ONE))
        return p

    # -- structure ----------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else MINUS_INF

    @property
    def lead(self) -> GaussianRational:
        if not self.coeffs:
            raise AlgebraError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coefficient(self, k: int) -> GaussianRational:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else GR_ZERO

    # -- arithmetic ---------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction, GaussianRational)):
            return Poly((as_gaussian(other),))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = max(len(self.coeffs), len(o.coeffs))
        return Poly(
            [self.coefficient(k) + o.coefficient(k) for k in range(n)]
        )

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = max(len(self.coeffs), len(o.coeffs))
        return Poly(
            [self.coefficient(k) - o.coefficient(k) for k in range(n)]
        )

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return Poly([-c for c in self.coeffs])

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.is_zero or o.is_zero:
            return Poly.zero()
        out = [GR_ZERO] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero:
                continue
            for j, b in enumerate(o.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise AlgebraError("negative power of a polynomial")
        result, base = Poly.one(), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __divmod__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero:
            raise AlgebraError("polynomial division by zero")
        q = [GR_ZERO] * max(len(self.coeffs) - len(o.coeffs) + 1, 0)
        rem = list(self.coeffs)
        dlead = o.lead
        dd = len(o.coeffs) - 1
        while len(rem) - 1 >= dd and rem:
            k = len(rem) - 1 - dd
            fac = rem[-1] / dlead
            q[k] = fac
            for j, c in enumerate(o.coeffs):
                rem[k + j] = rem[k + j] - fac * c
            while rem and rem[-1].is_zero:
                rem.pop()
        return Poly(q), Poly(rem)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __bool__(self):
        return not self.is_zero

    # -- calculus / evaluation ----------------------------------------
    def derivative(self) -> "Poly":
        return Poly([k * c for k, c in enumerate(self.coeffs)][1:])

    def monic(self) -> "Poly":
        if self.is_zero:
            return self
        inv = self.lead.inverse()
        return Poly([c * inv for c in self.coeffs])

    def __call__(self, x) -> GaussianRational:
        xv = as_gaussian(x)
        acc = GR_ZERO
        for c in reversed(self.coeffs):
            acc = acc * xv + c
        return acc

    def shift(self, x0) -> "Poly":
        """The polynomial t -> p(x0 + t)."""
        x0 = as_gaussian(x0)
        acc = Poly.zero()
        lin = Poly((x0, GR_ONE))
        for c in reversed(self.coeffs):
            acc = acc * lin + Poly.constant(c)
        return acc

    def squarefree_part(self) -> "Poly":
        if self.degree < 1:
            return self.monic()
        g = poly_gcd(self, self.derivative())
        return (self // g).monic()

    def to_complex_coeffs(self):
        return [complex(c) for c in self.coeffs]

    def __str__(self):
        if self.is_zero:
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if c.is_zero:
                continue
            term = "1" if k == 0 else ("x" if k == 1 else f"x^{k}")
            parts.append(f"({c})*{term}" if k else f"({c})")
        return " + ".join(parts)

    def __repr__(self):
        return f"Poly[{self}]"


def poly_gcd(p: Poly, q: Poly) -> Poly:
    """Monic gcd over Q(i) by the Euclidean algorithm."""
    a, b = p, q
    while not b.is_zero:
        a, b = b, a % b
    if a.is_zero:
        return Poly.zero()
    return a.monic()


def resultant(p: Poly, q: Poly) -> GaussianRational:
    """Resultant of two nonzero polynomials over Q(i).

    Computed through the Euclidean remainder sequence; zero iff the inputs
    share a root over the algebraic closure.
    """
    if p.is_zero or q.is_zero:
        raise AlgebraError("resultant of the zero polynomial is undefined")
    a, b = p, q
    acc = GR_ONE
    sign = GR_ONE
    if a.degree < b.degree:
        if (a.degree * b.degree) % 2 == 1:
            sign = -sign
        a, b = b, a
    while True:
        if b.degree == 0:
            return sign * acc * b.lead ** a.degree
        r = a % b
        if r.is_zero:
            return GR_ZERO
        acc = acc * b.lead ** (a.degree - r.degree)
        if (a.degree * b.degree) % 2 == 1:
            sign = -sign
        a, b = b, r


# ---------------------------------------------------------------------------
# Rational functions
# ---------------------------------------------------------------------------


class RationalFunction:
    """Ratio of two Polys, normalized so gcd(num, den) = 1 and den is monic."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = num if isinstance(num, Poly) else Poly.constant(num)
        den = Poly.one() if den is None else (
            den if isinstance(den, Poly) else Poly.constant(den)
        )
        if den.is_zero:
            raise AlgebraError("rational function with zero denominator")
        if num.is_zero:
            num, den = Poly.zero(), Poly.one()
        else:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num, den = num // g, den // g
            lead_inv = den.lead.inverse()
            num = num * lead_inv
            den = den * lead_inv
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RationalFunction is immutable")

    @classmethod
    def from_poly(cls, p: Poly) -> "RationalFunction":
        return cls(p, Poly.one())

    @classmethod
    def x(cls) -> "RationalFunction":
        return cls(Poly.x())

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @property
    def is_constant(self) -> bool:
        return self.num.degree <= 0 and self.den.degree == 0

    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Poly):
            return RationalFunction(other)
        if isinstance(other, (int, Fraction, GaussianRational)):
            return RationalFunction(Poly.constant(other))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RationalFunction(
            self.num * o.den + o.num * self.den, self.den * o.den
        )

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RationalFunction(
            self.num * o.den - o.num * self.den, self.den * o.den
        )

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero:
            raise AlgebraError("division by the zero rational function")
        return RationalFunction(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, n: int):
        if n < 0:
            return (GR_ONE / self) ** (-n)
        return RationalFunction(self.num**n, self.den**n)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __bool__(self):
        return not self.is_zero

    def derivative(self) -> "RationalFunction":
        return RationalFunction(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )

    def __call__(self, x) -> GaussianRational:
        d = self.den(x)
        if d.is_zero:
            raise AlgebraError("rational function evaluated at a pole")
        return self.num(x) / d

    def degree_pair(self):
        return self.num.degree, self.den.degree

    def map_degree(self) -> int:
        """Degree of the induced map P1 -> P1 (0 for constants)."""
        if self.is_zero:
            return 0
        return max(int(self.num.degree), int(self.den.degree))

    def __str__(self):
        if self.den == Poly.one():
            return str(self.num)
        return f"({self.num}) / ({self.den})"

    def __repr__(self):
        return f"RationalFunction[{self}]"


# ---------------------------------------------------------------------------
# Quadratic-extension scalars and local Laurent series
# ---------------------------------------------------------------------------


class ExtScalar:
    """Element a + b*u of Q(i)(u), where u**2 = c is carried by the series."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        object.__setattr__(self, "a", as_gaussian(a))
        object.__setattr__(self, "b", as_gaussian(b))

    def __setattr__(self, name, value):
        raise AttributeError("ExtScalar is immutable")

    @property
    def is_zero(self) -> bool:
        return self.a.is_zero and self.b.is_zero

    @property
    def is_rational(self) -> bool:
        """True when the u-part vanishes (the value lies in Q(i))."""
        return self.b.is_zero

    def add(self, other: "ExtScalar") -> "ExtScalar":
        return ExtScalar(self.a + other.a, self.b + other.b)

    def sub(self, other: "ExtScalar") -> "ExtScalar":
        return ExtScalar(self.a - other.a, self.b - other.b)

    def neg(self) -> "ExtScalar":
        return ExtScalar(-self.a, -self.b)

    def mul(self, other: "ExtScalar", c: GaussianRational) -> "ExtScalar":
        return ExtScalar(
            self.a * other.a + self.b * other.b * c,
            self.a * other.b + self.b * other.a,
        )

    def scale(self, s: GaussianRational) -> "ExtScalar":
        return ExtScalar(self.a * s, self.b * s)

    def inv(self, c: GaussianRational) -> "ExtScalar":
        n = self.a * self.a - self.b * self.b * c
        if n.is_zero:
            raise AlgebraError("non-invertible extension scalar")
        ninv = n.inverse()
        return ExtScalar(self.a * ninv, -self.b * ninv)

    def sqrt(self, c: GaussianRational) -> "ExtScalar":
        """Exact square root in Q(i)(u); raises if none exists."""
        a, b = self.a, self.b
        if b.is_zero:
            s = a.sqrt()
            if s is not None:
                return ExtScalar(s, GR_ZERO)
            if not c.is_zero:
                s = (a / c).sqrt()
                if s is not None:
                    return ExtScalar(GR_ZERO, s)
            raise ExtensionSquareRootError(
                f"{a} is not a square in Q(i)(u) with u^2 = {c}; "
                "widen the extension constant c"
            )
        disc = (a * a - b * b * c).sqrt()
        if disc is not None:
            for d in (disc, -disc):
                p = ((a + d) / 2).sqrt()
                if p is not None and not p.is_zero:
                    q = b / (2 * p)
                    if p * p + q * q * c == a:
                        return ExtScalar(p, q)
        raise ExtensionSquareRootError(
            f"{self} has no square root in Q(i)(u) with u^2 = {c}; "
            "widen the extension constant c"
        )

    def to_complex(self, c: GaussianRational) -> complex:
        """Numeric value using the principal square root of c for u."""
        import cmath

        return complex(self.a) + complex(self.b) * cmath.sqrt(complex(c))

    def __eq__(self, other):
        if isinstance(other, ExtScalar):
            return self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self.b.is_zero and self.a == as_gaussian(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b))

    def __bool__(self):
        return not self.is_zero

    def __str__(self):
        if self.b.is_zero:
            return str(self.a)
        upart = "u" if self.b == GR_ONE else f"({self.b})*u"
        if self.a.is_zero:
            return upart
        return f"({self.a})+{upart}"

    def __repr__(self):
        return f"ExtScalar({self})"


_EXT_ZERO = ExtScalar(0, 0)
_EXT_ONE = ExtScalar(1, 0)


def _as_ext(value) -> ExtScalar:
    if isinstance(value, ExtScalar):
        return value
    return ExtScalar(as_gaussian(value), GR_ZERO)


class LocalSeries:
    """Laurent series in a local parameter t with ExtScalar coefficients.

    ``trunc`` is the first exponent whose coefficient is unknown; ``None``
    means the series is exact (all omitted coefficients are genuinely zero).
    """

    __slots__ = ("c", "coeffs", "trunc")

    def __init__(self, c, coeffs=None, trunc=None):
        c = as_gaussian(c)
        clean = {}
        if coeffs:
            for e, v in coeffs.items():
                v = _as_ext(v)
                if v.is_zero:
                    continue
                if trunc is not None and e >= trunc:
                    continue
                clean[int(e)] = v
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "coeffs", clean)
        object.__setattr__(self, "trunc", trunc)

    def __setattr__(self, name, value):
        raise AttributeError("LocalSeries is immutable")

    # -- constructors --------------------------------------------------
    @classmethod
    def zero(cls, c, trunc=None) -> "LocalSeries":
        return cls(c, {}, trunc)

    @classmethod
    def monomial(cls, c, exponent: int, coeff=1, trunc=None) -> "LocalSeries":
        return cls(c, {exponent: _as_ext(coeff)}, trunc)

    @classmethod
    def from_pairs(cls, c, pairs, trunc=None) -> "LocalSeries":
        return cls(c, dict(pairs), trunc)

    # -- structure -----------------------------------------------------
    @property
    def is_known_zero(self) -> bool:
        """No nonzero coefficient in the known window."""
        return not self.coeffs

    @property
    def is_exact_zero(self) -> bool:
        return not self.coeffs and self.trunc is None

    def valuation(self) -> Optional[int]:
        """Exponent of the leading known term (None when none is known)."""
        return min(self.coeffs) if self.coeffs else None

    def _val_bound(self):
        """A lower bound for the true valuation (math.inf for exact zero)."""
        if self.coeffs:
            return min(self.coeffs)
        return math.inf if self.trunc is None else self.trunc

    def leading(self) -> ExtScalar:
        v = self.valuation()
        if v is None:
            raise AlgebraError("series has no known nonzero term")
        return self.coeffs[v]

    def coefficient(self, e: int) -> ExtScalar:
        if self.trunc is not None and e >= self.trunc:
            raise PrecisionCapError(
                f"coefficient of t^{e} outside the known window (< {self.trunc})"
            )
        return self.coeffs.get(e, _EXT_ZERO)

    def knows(self, e: int) -> bool:
        return self.trunc is None or e < self.trunc

    # -- arithmetic ------------------------------------------------------
    def _check(self, other: "LocalSeries"):
        if self.c != other.c:
            raise AlgebraError("mixing series over different extensions")

    def add(self, other: "LocalSeries") -> "LocalSeries":
        self._check(other)
        if self.trunc is None:
            trunc = other.trunc
        elif other.trunc is None:
            trunc = self.trunc
        else:
            trunc = min(self.trunc, other.trunc)
        out = dict(self.coeffs)
        for e, v in other.coeffs.items():
            w = out.get(e)
            out[e] = v if w is None else w.add(v)
        return LocalSeries(self.c, out, trunc)

    def neg(self) -> "LocalSeries":
        return LocalSeries(
            self.c, {e: v.neg() for e, v in self.coeffs.items()}, self.trunc
        )

    def sub(self, other: "LocalSeries") -> "LocalSeries":
        return self.add(other.neg())

    def scale(self, s) -> "LocalSeries":
        s = _as_ext(s)
        return LocalSeries(
            self.c,
            {e: v.mul(s, self.c) for e, v in self.coeffs.items()},
            self.trunc,
        )

    def shift(self, k: int) -> "LocalSeries":
        return LocalSeries(
            self.c,
            {e + k: v for e, v in self.coeffs.items()},
            None if self.trunc is None else self.trunc + k,
        )

    def mul(self, other: "LocalSeries") -> "LocalSeries":
        self._check(other)
        if self.is_exact_zero or other.is_exact_zero:
            return LocalSeries.zero(self.c)
        bounds = []
        if self.trunc is not None:
            bounds.append(self.trunc + other._val_bound())
        if other.trunc is not None:
            bounds.append(other.trunc + self._val_bound())
        trunc = min(bounds) if bounds else None
        if trunc == math.inf:
            trunc = None
        out = {}
        for e1, v1 in self.coeffs.items():
            for e2, v2 in other.coeffs.items():
                e = e1 + e2
                if trunc is not None and e >= trunc:
                    continue
                p = v1.mul(v2, self.c)
                w = out.get(e)
                out[e] = p if w is None else w.add(p)
        return LocalSeries(self.c, out, trunc)

    def inverse(self, upto: int) -> "LocalSeries":
        """Multiplicative inverse, known on exponents < ``upto``."""
        v = self.valuation()
        if v is None:
            raise AlgebraError("cannot invert a series with no known leading term")
        lead_inv = self.coeffs[v].inv(self.c)
        # self = t^v * L * (1 + sum h_k t^k); the relative window is bounded by
        # the input's own window and by the requested exponent range.
        rel_known = (self.trunc - v) if self.trunc is not None else math.inf
        n = int(min(rel_known, upto + v))
        trunc = n - v
        n = max(n, 0)
        h = {}
        for e, val in self.coeffs.items():
            k = e - v
            if 0 < k < n:
                h[k] = val.mul(lead_inv, self.c)
        s = [None] * max(n, 1)
        s[0] = _EXT_ONE
        for k in range(1, n):
            acc = _EXT_ZERO
            for j in range(1, k + 1):
                hj = h.get(j)
                if hj is not None and s[k - j] is not None:
                    acc = acc.add(hj.mul(s[k - j], self.c))
            s[k] = acc.neg()
        out = {}
        for k in range(n):
            if s[k] is not None and not s[k].is_zero:
                out[k - v] = s[k].mul(lead_inv, self.c)
        return LocalSeries(self.c, out, trunc)

    def sqrt(self, upto: Optional[int] = None, branch: int = 1) -> "LocalSeries":
        """Square root with even leading exponent.

        ``branch`` (+1 or -1) multiplies the chosen leading root; at branch
        points the library convention is the +u branch.
        """
        if branch not in (1, -1):
            raise AlgebraError("branch must be +1 or -1")
        v = self.valuation()
        if v is None:
            raise AlgebraError("cannot take sqrt of a series with no known term")
        if v % 2:
            raise AlgebraError(f"sqrt of a series with odd valuation {v}")
        m = v // 2
        lead = self.coeffs[v]
        root = lead.sqrt(self.c)
        lead_inv = lead.inv(self.c)
        if self.trunc is not None:
            rel_known = self.trunc - v
        else:
            rel_known = (upto - m + 1) if upto is not None else 17
        if upto is not None:
            rel_known = min(rel_known, upto - m + 1)
        n = max(rel_known, 1)
        h = {}
        for e, val in self.coeffs.items():
            k = e - v
            if 0 < k < n:
                h[k] = val.mul(lead_inv, self.c)
        half = GaussianRational(Fraction(1, 2))
        s = [None] * n
        s[0] = _EXT_ONE
        for k in range(1, n):
            acc = h.get(k, _EXT_ZERO)
            for j in range(1, k):
                acc = acc.sub(s[j].mul(s[k - j], self.c))
            s[k] = acc.scale(half)
        out = {}
        sign = root if branch == 1 else root.neg()
        for k in range(n):
            coeff = s[k].mul(sign, self.c)
            if not coeff.is_zero:
                out[m + k] = coeff
        return LocalSeries(self.c, out, m + n)

    def derivative(self) -> "LocalSeries":
        out = {}
        for e, v in self.coeffs.items():
            if e != 0:
                out[e - 1] = v.scale(GaussianRational(e))
        trunc = None if self.trunc is None else self.trunc - 1
        return LocalSeries(self.c, out, trunc)

    def truncate(self, upto: int) -> "LocalSeries":
        trunc = upto if self.trunc is None else min(self.trunc, upto)
        return LocalSeries(self.c, self.coeffs, trunc)

    def __eq__(self, other):
        if not isinstance(other, LocalSeries):
            return NotImplemented
        return (
            self.c == other.c
            and self.coeffs == other.coeffs
            and self.trunc == other.trunc
        )

    def __str__(self):
        if not self.coeffs:
            body = "0"
        else:
            terms = []
            for e in sorted(self.coeffs):
                v = self.coeffs[e]
                if e == 0:
                    terms.append(f"({v})")
                else:
                    terms.append(f"({v})*t^{e}")
            body = " + ".join(terms)
        tail = "" if self.trunc is None else f" + O(t^{self.trunc})"
        return body + tail

    def __repr__(self):
        return f"LocalSeries[{self}]"


def series_sqrt(f: LocalSeries, branch: int = 1, upto: Optional[int] = None) -> LocalSeries:
    """Module-level square root wrapper; see ``LocalSeries.sqrt``."""
    return f.sqrt(upto=upto, branch=branch)


# ---------------------------------------------------------------------------
# Gaussian-rational root extraction
# ---------------------------------------------------------------------------

_DIVISOR_CAP = 200_000


def _factor_int(n: int) -> dict:
    """Prime factorization of a positive integer (trial division + rho)."""
    out: dict = {}
    for p in (2, 3, 5):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 7
    increments = (4, 2, 4, 2, 4, 6, 2, 6)
    i = 0
    while f * f <= n and f < 1_000_000:
        if n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        else:
            f += increments[i]
            i = (i + 1) % 8
    if n > 1:
        if n < 1_000_000_000_000 and f * f > n:
            out[n] = out.get(n, 0) + 1
        else:
            for p, e in _factor_large(n).items():
                out[p] = out.get(p, 0) + e
    return out


def _is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    if n % 2 == 0:
        return 2
    for c in range(1, 50):
        x, y, d = 2, 2, 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d
    raise AlgebraError(f"failed to factor {n}")


def _factor_large(n: int) -> dict:
    if n == 1:
        return {}
    if _is_probable_prime(n):
        return {n: 1}
    d = _pollard_rho(n)
    out = _factor_large(d)
    for p, e in _factor_large(n // d).items():
        out[p] = out.get(p, 0) + e
    return out


def _gi_divmod(a, b):
    """Nearest-rounding division in Z[i]; a, b are (int, int) pairs."""
    ar, ai = a
    br, bi = b
    nb = br * br + bi * bi
    qr_num = ar * br + ai * bi
    qi_num = ai * br - ar * bi
    qr = (2 * qr_num + nb) // (2 * nb)
    qi = (2 * qi_num + nb) // (2 * nb)
    rr = ar - (qr * br - qi * bi)
    ri = ai - (qr * bi + qi * br)
    return (qr, qi), (rr, ri)


def _gi_gcd(a, b):
    while b != (0, 0):
        _, r = _gi_divmod(a, b)
        a, b = b, r
    return a


def _gi_mul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _sqrt_minus_one_mod(p: int) -> int:
    # p = 1 mod 4; find x with x^2 = -1 (mod p)
    for a in range(2, p):
        x = pow(a, (p - 1) // 4, p)
        if (x * x) % p == p - 1:
            return x
    raise AlgebraError(f"no sqrt(-1) mod {p}")


def _gi_prime_factors(w) -> list:
    """Gaussian-prime factorization of w (a nonzero (int, int) pair).

    Returns a list of (prime, exponent); unit content is dropped.
    """
    norm = w[0] * w[0] + w[1] * w[1]
    if norm == 1:
        return []
    out = []
    for p, e in sorted(_factor_int(norm).items()):
        if p == 2:
            pi = (1, 1)
        elif p % 4 == 3:
            pi = (p, 0)
        else:
            x = _sqrt_minus_one_mod(p)
            pi = _gi_gcd((p, 0), (x, 1))
        # count how many times pi (or its conjugate) divides w
        for cand in (pi, (pi[0], -pi[1])):
            k = 0
            cur = w
            while True:
                q, r = _gi_divmod(cur, cand)
                if r == (0, 0):
                    cur = q
                    k += 1
                else:
                    break
            if k:
                out.append((cand, k))
                w = cur
            if p % 4 == 3 or p == 2:
                break
    return out


def _gi_divisors(w, cap: int = _DIVISOR_CAP) -> list:
    """All divisors of w in Z[i] up to units (canonical associates)."""
    factors = _gi_prime_factors(w)
    count = 1
    for _, e in factors:
        count *= e + 1
    if count > cap:
        raise RootSearchOverflow(
            f"divisor enumeration of size {count} exceeds the bound {cap}"
        )
    divs = [(1, 0)]
    for pi, e in factors:
        new = []
        for d in divs:
            cur = d
            for _ in range(e + 1):
                new.append(cur)
                cur = _gi_mul(cur, pi)
        divs = new
    return divs


def gaussian_roots(p: Poly):
    """All roots of p lying in Q(i), with multiplicities.

    Returns ``(roots, residual)`` where ``roots`` is a list of
    ``(GaussianRational, multiplicity)`` and ``residual`` is the monic factor
    of p with no Q(i)-rational roots.  Raises RootSearchOverflow when the
    divisor enumeration would be too large.
    """
    if p.is_zero:
        raise AlgebraError("root extraction from the zero polynomial")
    roots = []
    work = p
    # factor out x^k
    k = 0
    while work.coefficient(0).is_zero and work.degree > 0:
        work = Poly(work.coeffs[1:])
        k += 1
    if k:
        roots.append((GR_ZERO, k))
    if work.degree < 1:
        return roots, work.monic()
    # clear denominators to land in Z[i]
    denlcm = 1
    for c in work.coeffs:
        denlcm = denlcm * c.re.denominator // math.gcd(denlcm, c.re.denominator)
        denlcm = denlcm * c.im.denominator // math.gcd(denlcm, c.im.denominator)
    zi = [
        (int(c.re * denlcm), int(c.im * denlcm)) for c in work.coeffs
    ]
    a0, an = zi[0], zi[-1]
    units = (GR_ONE, -GR_ONE, GR_I, -GR_I)
    seen = set()
    candidates = []
    for pnum in _gi_divisors(a0):
        for qden in _gi_divisors(an):
            qg = GaussianRational(qden[0], qden[1])
            base = GaussianRational(pnum[0], pnum[1]) / qg
            for unit in units:
                cand = base * unit
                key = (cand.re, cand.im)
                if key not in seen:
                    seen.add(key)
                    candidates.append(cand)
    for cand in candidates:
        if work.degree < 1:
            break
        if not work(cand).is_zero:
            continue
        mult = 0
        factor = Poly((-cand, GR_ONE))
        while True:
            q, r = divmod(work, factor)
            if r.is_zero:
                work = q
                mult += 1
                if work.degree < 1:
                    break
            else:
                break
        roots.append((cand, mult))
    return roots, work.monic()
