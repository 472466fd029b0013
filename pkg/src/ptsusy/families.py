"""Closed forms for the two worked families, used as oracles for the pipeline.

Oscillators:  W+ = a x + i b x^(2m)   (m = 0 is the exactly solvable PT oscillator)
Hyperbolic:   W+ = A sinh(alpha x) + i B
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConstructionError
from .susy import GeneratingFunction, SuperpotentialPair, build_pair

REGIME_TOL = 1e-12


@dataclass(frozen=True)
class OscillatorFamily:
    m: int
    a: float
    b: float
    eps_m0: Optional[float] = None  # eps for m = 0, where it is a free parameter

    def __post_init__(self):
        if self.m < 0 or int(self.m) != self.m:
            raise ConstructionError(f"m must be a non-negative integer, got {self.m!r}")
        if not self.a > 0:
            raise ConstructionError(f"a must be positive, got {self.a!r}")
        if self.m == 0:
            if self.a != 2:
                raise ConstructionError("the m = 0 oscillator is parameterized with a = 2, b = -2c, eps = 4 alpha")
            if self.eps_m0 is None or not self.eps_m0 > 0:
                raise ConstructionError("m = 0 needs eps = 4 alpha > 0")
            if self.b == 0 and self.eps_m0 != self.a:
                raise ConstructionError("c = 0 makes W+ vanish at 0, which forces alpha = 1/2")

    @classmethod
    def pt_oscillator(cls, alpha: float, c: float) -> "OscillatorFamily":
        """The m = 0 member in its standard (alpha, c) form: a = 2, b = -2c, eps = 4 alpha."""
        if not alpha > 0:
            raise ConstructionError(f"alpha must be positive, got {alpha!r}")
        return cls(0, 2.0, -2.0 * c, 4.0 * alpha)

    @property
    def alpha(self) -> float:
        return self.eps / 4.0

    @property
    def c(self) -> float:
        return -self.b / 2.0

    @property
    def eps(self) -> float:
        return self.eps_m0 if self.m == 0 else self.a

    def wplus(self, t):
        return self.a * t + 1j * self.b * t ** (2 * self.m)

    def _denominator(self, x):
        return self.a + 1j * self.b * x ** (2 * self.m - 1)


@dataclass(frozen=True)
class HyperbolicFamily:
    A: float
    alpha: float
    B: float
    eps: Optional[float] = None

    def __post_init__(self):
        if not (self.A > 0 and self.alpha > 0):
            raise ConstructionError("A and alpha must be positive")
        if self.eps is None:
            if self.B != 0:
                raise ConstructionError("B != 0 leaves eps free; it must be given")
            object.__setattr__(self, "eps", self.A * self.alpha)
        if not self.eps > 0:
            raise ConstructionError(f"eps must be positive, got {self.eps!r}")
        if self.B == 0 and abs(self.eps - self.A * self.alpha) > 1e-12 * self.A * self.alpha:
            raise ConstructionError("B = 0 forces eps = A alpha")

    @property
    def regime(self) -> str:
        """'zero' (B = 0), 'below' (B^2 < A^2), 'critical' (B^2 = A^2) or 'above'."""
        A2, B2 = self.A**2, self.B**2
        if self.B == 0:
            return "zero"
        if abs(B2 - A2) < REGIME_TOL * A2:
            return "critical"
        return "below" if B2 < A2 else "above"

    @property
    def nu(self) -> float:
        return math.sqrt(self.A**2 - self.B**2)

    @property
    def mu(self) -> float:
        return math.sqrt(self.B**2 - self.A**2)

    @property
    def delta(self) -> float:
        return math.copysign(1.0, self.B) if self.B != 0 else 0.0

    def wplus(self, t):
        return self.A * (self.alpha * t).sinh() + 1j * self.B


def _points(x):
    # complex points are allowed so the closed forms can be continued off the
    # real axis (contour-integral derivatives in the tests rely on this)
    x = np.asarray(x)
    return x if np.iscomplexobj(x) else x.astype(float)


# -- oscillator closed forms -------------------------------------------------

def oscillator_potential(fam: OscillatorFamily, x):
    x = _points(x)
    if fam.m == 0:
        u = x - 1j * fam.c
        al = fam.alpha
        v = u**2 + 2 * (al - 1)
        if al != 0.5:
            # the centrifugal term is identically zero at alpha = 1/2 (and singular at c = 0)
            v = v + (al**2 - 0.25) / u**2
        return v
    m, a, b = fam.m, fam.a, fam.b
    D = fam._denominator(x)
    v = -(b**2) * x ** (4 * m) + 2j * a * b * x ** (2 * m + 1) - 8j * m * b * x ** (2 * m - 1) + a**2 * x**2 - 2 * a
    if m > 1:
        tail = 4 * m * (m - 1) * 1j * b * x ** (2 * m - 3)
        v = v + tail / D + a * tail / D**2
    return 0.25 * v


def oscillator_psi(fam: OscillatorFamily, x, level: int):
    if fam.m == 0:
        raise ConstructionError("closed-form eigenstates are provided for m >= 1 only")
    if level not in (0, 1):
        raise ValueError("level must be 0 or 1")
    x = _points(x)
    m, a, b = fam.m, fam.a, fam.b
    D = fam._denominator(x)
    gauss = np.exp(-0.25 * a * x**2 - 1j * b * x ** (2 * m + 1) / (2 * (2 * m + 1)))
    if level == 0:
        return D ** (m / (2 * m - 1)) * gauss
    return x * D ** ((m - 1) / (2 * m - 1)) * gauss


def oscillator_z(fam: OscillatorFamily, x):
    """z = x (a + i b x^(2m-1))^(-1/(2m-1)), principal branch."""
    if fam.m == 0:
        raise ConstructionError("z is defined for m >= 1")
    x = _points(x)
    return x * fam._denominator(x) ** (-1.0 / (2 * fam.m - 1))


# -- hyperbolic closed forms -------------------------------------------------

def hyperbolic_potential(fam: HyperbolicFamily, x):
    x = _points(x)
    A, al, B, eps = fam.A, fam.alpha, fam.B, fam.eps
    s = np.sinh(al * x)
    c = np.cosh(al * x)
    v = A**2 * s**2 - 4 * A * al * c + 2 * eps + al**2 - B**2 + 2j * A * B * s
    if fam.B != 0:
        # for B = 0 the numerator eps^2 - alpha^2 A^2 is exactly zero
        v = v + (eps**2 - al**2 * (A**2 - B**2)) / (A * s + 1j * B) ** 2
    return 0.25 * v


def hyperbolic_psi(fam: HyperbolicFamily, x, level: int):
    """Closed-form psi0 (level 0) or psi1 (level 1), up to a constant factor.

    Both states are sqrt(W+) exp(-int W+/2 -/+ (eps/2) int dx/W+); the
    regime only changes how the last integral is written.
    """
    if level not in (0, 1):
        raise ValueError("level must be 0 or 1")
    x = _points(x)
    A, al, B, eps = fam.A, fam.alpha, fam.B, fam.eps
    s, c, t = np.sinh(al * x), np.cosh(al * x), np.tanh(al * x)
    sgn = 1.0 if level == 0 else -1.0
    regime = fam.regime
    if regime == "zero":
        half = np.cosh(al * x / 2) if level == 0 else np.sinh(al * x / 2)
        return half * np.exp(-A / (2 * al) * c)
    if regime == "below":
        nu = fam.nu
        k = eps / (al * nu)
        mod = (A * c - nu) ** (0.25 * (1 - sgn * k)) * (A * c + nu) ** (0.25 * (1 + sgn * k))
        phase = (
            -A / (2 * al) * c
            - 0.5j * B * x
            - 0.5j * np.arctan(A / B * s)
            + sgn * 1j * eps / (2 * al * nu) * np.arctan(nu / B * t)
        )
        return mod * np.exp(phase)
    if regime == "critical":
        d = fam.delta
        return np.sqrt(c) * np.exp(
            -A / (2 * al) * c
            - 0.5j * d * A * x
            - 0.5j * d * np.arctan(s)
            + sgn * eps / (2 * A * al) * (1 / c + 1j * d * t)
        )
    mu = fam.mu
    return (B**2 + A**2 * s**2) ** 0.25 * np.exp(
        -A / (2 * al) * c
        - sgn * eps / (2 * al * mu) * np.arctan(A * c / mu)
        - 0.5j * B * x
        - 0.5j * np.arctan(A / B * s)
        + sgn * 1j * eps / (2 * al * mu) * np.arctanh(mu / B * t)
    )


# -- shared helpers ----------------------------------------------------------

def as_generating_function(fam) -> GeneratingFunction:
    if isinstance(fam, OscillatorFamily):
        label = f"oscillator m={fam.m} a={fam.a!r} b={fam.b!r}"
    else:
        label = f"hyperbolic A={fam.A!r} alpha={fam.alpha!r} B={fam.B!r}"
    return GeneratingFunction(fam.wplus, 0.0, label)


def family_eps(fam) -> float:
    return fam.eps


def family_pair(fam) -> SuperpotentialPair:
    """The superpotential pair of a family member, with the family's eps.

    For Type-2 members build_pair checks that the family's eps is the forced one.
    """
    return build_pair(as_generating_function(fam), fam.eps)


def oracle_potential(fam, x):
    if isinstance(fam, OscillatorFamily):
        return oscillator_potential(fam, x)
    return hyperbolic_potential(fam, x)


def oracle_psi(fam, x, level: int):
    if isinstance(fam, OscillatorFamily):
        return oscillator_psi(fam, x, level)
    return hyperbolic_psi(fam, x, level)


def default_half_width(fam, decay: float = 1e-12) -> float:
    """Half-width L of [-L, L] on which the two eigenstates decay below ``decay``.

    Oscillators start from 8 sqrt(2/a) (i.e. [-8, 8] for a = 2) and hyperbolic
    potentials from the point where (A/2 alpha) cosh(alpha L) = 40; L then
    grows in steps of 0.5 until the closed-form states have decayed.  The m = 0
    oscillator has no closed-form states here and uses the Gaussian envelope.
    """
    if isinstance(fam, OscillatorFamily):
        L = 8.0 * math.sqrt(2.0 / fam.a)
        if fam.m == 0:
            return L
    else:
        L = math.acosh(80.0 * fam.alpha / fam.A) / fam.alpha if 80.0 * fam.alpha / fam.A > 1 else 1.0
    for _ in range(200):
        xs = np.linspace(-L, L, 2001)
        ok = True
        for level in (0, 1):
            with np.errstate(all="ignore"):
                v = np.abs(oracle_psi(fam, xs, level))
            if not np.all(np.isfinite(v)) or max(v[0], v[-1]) >= decay * v.max():
                ok = False
        if ok:
            return L
        L += 0.5
    raise ConstructionError("could not find a domain on which the eigenstates decay")


def regime_continuity(A: float, alpha: float, B: float = 1e-4, xs=None) -> float:
    """Largest relative gap between the 0 < B^2 < A^2 states at small B and the B = 0 states.

    eps is held at A alpha.  The states are only defined up to a constant, so
    each small-B state is first aligned to its B = 0 counterpart by the
    least-squares complex scalar.  Potentials are not compared: at B = 0 the
    pole term is dropped exactly, while for B > 0 it lives in a shrinking
    window around x = 0.
    """
    if xs is None:
        xs = np.linspace(-4.0 / alpha, 4.0 / alpha, 401)
    xs = np.asarray(xs, dtype=float)
    small = HyperbolicFamily(A, alpha, B, A * alpha)
    zero = HyperbolicFamily(A, alpha, 0.0)
    worst = 0.0
    for level in (0, 1):
        p = hyperbolic_psi(small, xs, level)
        q = hyperbolic_psi(zero, xs, level)
        lam = np.vdot(p, q) / np.vdot(p, p)
        worst = max(worst, float(np.max(np.abs(lam * p - q)) / np.max(np.abs(q))))
    return worst
