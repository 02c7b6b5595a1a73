"""Numeric elliptic-function layer for the genus-1 lattice model.

Everything here is floating point; the exact layers never depend on it.
The lattice is Z + Z tau with Im tau > 0.  The P-function is evaluated by
argument reduction followed by either the Laurent series (near the
origin) or a row-grouped lattice sum whose rows have closed trigonometric
forms; both routes target 1e-12 relative accuracy and the tests compare
them against each other and against the cubic differential equation.

Evaluators are immutable after construction and safe for concurrent use.
"""

from __future__ import annotations

import cmath
import math

__all__ = [
    "PoleError",
    "TorusLattice",
    "TorusForm",
    "torus_eta",
    "contour_integral",
    "laurent_coefficient",
]

_TWO_PI = 2.0 * math.pi
_PI2 = math.pi * math.pi
_PI3 = math.pi * _PI2
# Laurent terms: ratio (0.35)^2 per term leaves ~1e-22 truncation at 24
_LAURENT_TERMS = 24
_LAURENT_RADIUS = 0.35
_POLE_TOL = 1e-12


class PoleError(ValueError):
    """Evaluation requested at (or too close to) a lattice pole."""


def _sin2(w: complex) -> complex:
    s = cmath.sin(w)
    return s * s


class TorusLattice:
    """The lattice Z + Z tau with cached cubic invariants and half-period
    values e1 = P(1/2), e2 = P(tau/2), e3 = P((1+tau)/2)."""

    __slots__ = ("tau", "g2", "g3", "e1", "e2", "e3", "shortest", "_laurent")

    def __init__(self, tau):
        tau = complex(tau)
        if not tau.imag > 0.0:
            raise ValueError("tau must have positive imaginary part")
        object.__setattr__(self, "tau", tau)
        Q = cmath.exp(2j * math.pi * tau)
        e4 = 1.0 + 240.0 * _lambert_sum(3, Q)
        e6 = 1.0 - 504.0 * _lambert_sum(5, Q)
        g2 = (4.0 * _PI2 * _PI2 / 3.0) * e4
        g3 = (8.0 * _PI3 * _PI3 / 27.0) * e6
        object.__setattr__(self, "g2", g2)
        object.__setattr__(self, "g3", g3)
        object.__setattr__(self, "shortest", _shortest_vector(tau))
        coeffs = [0j, 0j, g2 / 20.0, g3 / 28.0]
        for k in range(4, _LAURENT_TERMS + 1):
            acc = 0j
            for m in range(2, k - 1):
                acc += coeffs[m] * coeffs[k - m]
            coeffs.append(3.0 * acc / ((2 * k + 1) * (k - 3)))
        object.__setattr__(self, "_laurent", tuple(coeffs))
        object.__setattr__(self, "e1", self.wp(0.5))
        object.__setattr__(self, "e2", self.wp(tau / 2.0))
        object.__setattr__(self, "e3", self.wp((1.0 + tau) / 2.0))
        scale = max(1.0, abs(self.e1), abs(self.e2), abs(self.e3))
        if abs(self.e1 + self.e2 + self.e3) > 1e-9 * scale:
            raise ValueError("half-period values fail to sum to zero; "
                             "the evaluation scheme lost accuracy")
        for u, v in ((self.e1, self.e2), (self.e1, self.e3),
                     (self.e2, self.e3)):
            if abs(u - v) <= 1e-10 * scale:
                raise ValueError("half-period values must be distinct")

    def __setattr__(self, name, value):
        raise AttributeError("TorusLattice is immutable")

    # -- lattice geometry ----------------------------------------------
    def reduce(self, z) -> complex:
        """Representative of z modulo the lattice with minimal norm
        (up to the final neighbor sweep)."""
        z = complex(z)
        n = round(z.imag / self.tau.imag)
        z = z - n * self.tau
        z = z - round(z.real)
        best = z
        for a in (-1, 0, 1):
            for b in (-1, 0, 1):
                cand = z + a + b * self.tau
                if abs(cand) < abs(best):
                    best = cand
        return best

    def distance_to_lattice(self, z) -> float:
        return abs(self.reduce(z))

    # -- P and derivatives ----------------------------------------------
    def wp(self, z) -> complex:
        w = self.reduce(z)
        if abs(w) < _POLE_TOL:
            raise PoleError(f"wp evaluated at a lattice point (z = {z})")
        if abs(w) <= _LAURENT_RADIUS * self.shortest:
            return self._wp_laurent(w)
        return self._wp_rowsum(w)

    def wp_prime(self, z) -> complex:
        w = self.reduce(z)
        if abs(w) < _POLE_TOL:
            raise PoleError(f"wp_prime evaluated at a lattice point (z = {z})")
        if abs(w) <= _LAURENT_RADIUS * self.shortest:
            return self._wp_prime_laurent(w)
        return self._wp_prime_rowsum(w)

    def wp_pp(self, z) -> complex:
        """Second derivative via 6 P^2 - g2/2."""
        p = self.wp(z)
        return 6.0 * p * p - self.g2 / 2.0

    # Laurent route: 1/z^2 + sum c_k z^(2k-2)
    def _wp_laurent(self, w: complex) -> complex:
        w2 = w * w
        acc = 1.0 / w2
        power = w2
        for k in range(2, _LAURENT_TERMS + 1):
            acc += self._laurent[k] * power
            power *= w2
        return acc

    def _wp_prime_laurent(self, w: complex) -> complex:
        w2 = w * w
        acc = -2.0 / (w2 * w)
        power = w
        for k in range(2, _LAURENT_TERMS + 1):
            acc += (2 * k - 2) * self._laurent[k] * power
            power *= w2
        return acc

    # Row-sum route: rows m + n*tau summed in closed form; the double sum
    # of 1/(z-.)^2 - 1/.^2 is absolutely convergent, so row grouping is
    # exact, and rows decay geometrically in n after reduction.
    def _wp_rowsum(self, w: complex) -> complex:
        acc = _PI2 / _sin2(math.pi * w) - _PI2 / 3.0
        n = 1
        while n < 200000:
            t_plus = _PI2 / _sin2(math.pi * (w - n * self.tau))
            t_minus = _PI2 / _sin2(math.pi * (w + n * self.tau))
            const = 2.0 * _PI2 / _sin2(math.pi * n * self.tau)
            acc += t_plus + t_minus - const
            if abs(t_plus) + abs(t_minus) + abs(const) < 1e-17 * max(
                1.0, abs(acc)
            ):
                return acc
            n += 1
        raise PoleError("lattice row sum failed to converge")

    def _wp_prime_rowsum(self, w: complex) -> complex:
        def row(u: complex) -> complex:
            s = cmath.sin(u)
            return _PI3 * cmath.cos(u) / (s * s * s)

        acc = -2.0 * row(math.pi * w)
        n = 1
        while n < 200000:
            t_plus = -2.0 * row(math.pi * (w - n * self.tau))
            t_minus = -2.0 * row(math.pi * (w + n * self.tau))
            acc += t_plus + t_minus
            if abs(t_plus) + abs(t_minus) < 1e-17 * max(1.0, abs(acc)):
                return acc
            n += 1
        raise PoleError("lattice row sum failed to converge")


def _lambert_sum(power: int, Q: complex) -> complex:
    """sum_{n>=1} n^power Q^n / (1 - Q^n), geometric tail cutoff."""
    acc = 0j
    qn = 1.0 + 0j
    for n in range(1, 200000):
        qn *= Q
        term = (n ** power) * qn / (1.0 - qn)
        acc += term
        if abs(term) < 1e-18 * max(1.0, abs(acc)) and n > 4:
            return acc
    raise ValueError("invariant q-series failed to converge (tau too "
                     "close to the real axis)")


def _shortest_vector(tau: complex) -> float:
    reach = int(math.ceil(abs(tau.real))) + 2
    best = None
    for n in (-1, 0, 1):
        for m in range(-reach, reach + 1):
            if n == 0 and m == 0:
                continue
            v = abs(m + n * tau)
            if best is None or v < best:
                best = v
    return best


# ---------------------------------------------------------------------------
# contour helpers
# ---------------------------------------------------------------------------


def contour_integral(fn, center, radius: float, samples: int = 256) -> complex:
    """Trapezoid quadrature of fn dz over the circle |z - center| = radius
    (spectrally accurate for functions analytic in an annulus)."""
    center = complex(center)
    total = 0j
    for j in range(samples):
        w = cmath.exp(2j * math.pi * j / samples)
        total += fn(center + radius * w) * (1j * radius * w)
    return total * (_TWO_PI / samples)


def laurent_coefficient(fn, center, k: int, radius: float,
                        samples: int = 256) -> complex:
    """Coefficient of (z - center)^k in the Laurent expansion of fn,
    extracted by Fourier analysis on one circle."""
    center = complex(center)
    total = 0j
    for j in range(samples):
        theta = _TWO_PI * j / samples
        w = cmath.exp(1j * theta)
        total += fn(center + radius * w) * cmath.exp(-1j * k * theta)
    return total / (samples * radius ** k)


# ---------------------------------------------------------------------------
# the two double-pole forms
# ---------------------------------------------------------------------------


class TorusForm:
    """A numeric 1-form f(z) dz on the torus; calling it returns the
    dz-coefficient.  Immutable; ``certificate`` stores the construction
    checks (residue, double-pole coefficient at two radii)."""

    __slots__ = ("lattice", "pole", "case", "certificate", "_fn")

    def __init__(self, lattice: TorusLattice, fn, pole, case: str,
                 certificate: dict):
        object.__setattr__(self, "lattice", lattice)
        object.__setattr__(self, "_fn", fn)
        object.__setattr__(self, "pole", complex(pole))
        object.__setattr__(self, "case", case)
        object.__setattr__(self, "certificate", certificate)

    def __setattr__(self, name, value):
        raise AttributeError("TorusForm is immutable")

    def __call__(self, z) -> complex:
        return self._fn(complex(z))

    def __repr__(self):
        return f"TorusForm<{self.case}, double pole at {self.pole}>"


def _certify_double_pole(fn, center: complex, radius: float,
                         expected_lead: complex) -> dict:
    """Residue ~ 0, order exactly -2, and the t^-2 coefficient matching
    its analytic value, each at two radii."""
    cert = {"pole": center, "radii": (radius, radius / 2.0),
            "expected_lead": expected_lead}
    leads = []
    for r in (radius, radius / 2.0):
        loop = contour_integral(fn, center, r)
        lead = laurent_coefficient(fn, center, -2, r)
        below = laurent_coefficient(fn, center, -3, r)
        scale = max(1.0, abs(expected_lead) / r)
        if abs(loop) > 1e-8 * scale:
            raise PoleError(
                f"residue check failed at radius {r}: |loop| = {abs(loop)}"
            )
        if abs(below) > 1e-8 * scale:
            raise PoleError(f"pole order exceeds 2 at radius {r}")
        if abs(lead - expected_lead) > 1e-6 * max(1.0, abs(expected_lead)):
            raise PoleError(
                f"double-pole coefficient {lead} does not match the "
                f"analytic value {expected_lead}"
            )
        leads.append(lead)
        cert[f"loop_r={r:g}"] = loop
    if abs(leads[0] - leads[1]) > 1e-6 * max(1.0, abs(expected_lead)):
        raise PoleError("double-pole coefficient drifts between radii")
    cert["lead"] = leads[0]
    return cert


def torus_eta(lattice: TorusLattice, p2) -> tuple:
    """The pair of double-pole forms: eta1 = P(z) dz at z = 0, and eta2
    with its double pole at p2.

    When p2 is congruent to a half-period (P(p2) is one of the e_i), eta2
    is dz / (P(z) - e_i); otherwise it is

        (P'(z) + P'(p2) + (P''(p2)/P'(p2)) (P(z) - P(p2)))
        -----------------------------------------------------  dz
                        (P(z) - P(p2))^2

    which is bounded near z = 0.  Both forms are certified at build time:
    vanishing residue and double-pole coefficient matched against the
    analytic value at two radii.
    """
    p2 = complex(p2)
    dist = lattice.distance_to_lattice(p2)
    if dist < 1e-9:
        raise PoleError("p2 is too close to a lattice point")

    r1 = 0.25 * lattice.shortest
    cert1 = _certify_double_pole(lattice.wp, 0.0, r1, 1.0 + 0j)
    eta1 = TorusForm(lattice, lattice.wp, 0.0, "wp", cert1)

    half_dist = lattice.distance_to_lattice(2.0 * p2)
    if half_dist < 1e-9:
        ei = lattice.wp(p2)
        curvature = lattice.wp_pp(p2)

        def fn(z: complex) -> complex:
            return 1.0 / (lattice.wp(z) - ei)

        expected = 2.0 / curvature
        case = "half_period"
        radius = 0.25 * dist
    else:
        base = lattice.wp(p2)
        slope = lattice.wp_prime(p2)
        ratio = lattice.wp_pp(p2) / slope

        def fn(z: complex) -> complex:
            d = lattice.wp(z) - base
            return (lattice.wp_prime(z) + slope + ratio * d) / (d * d)

        expected = 2.0 / slope
        case = "generic"
        radius = 0.25 * min(dist, half_dist)

    cert2 = _certify_double_pole(fn, p2, radius, expected)
    eta2 = TorusForm(lattice, fn, p2, case, cert2)
    return eta1, eta2
