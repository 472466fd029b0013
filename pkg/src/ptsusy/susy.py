"""Superpotential pairs built from a generating function W+ = W1 + W.

Given W+ with a single simple zero of its real part at x0 and an energy eps,

    W  = (W+ - (W+' - eps)/W+) / 2,
    W1 = (W+ + (W+' - eps)/W+) / 2

solve W^2 + W' = W1^2 - W1' + eps, so H+ = -d2/dx2 + W^2 - W' has the two
eigenvalues 0 and eps.  If Im W+(x0) != 0 ("type 1") eps is free; otherwise
("type 2") the quotient has a removable singularity at x0 and eps is forced
to W+'(x0).
"""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .errors import ConstructionError, EvaluationError
from .expr import ExprFunction
from .jet import Jet, taylor_shift

log = logging.getLogger(__name__)

JetFunction = Callable[[Jet], Jet]

ZERO_TOL = 1e-10
GUARD = 1e-3  # relative to scale; see SuperpotentialPair._quotient
SERIES_ORDER = 16


@dataclass(frozen=True)
class GeneratingFunction:
    """W+ as a function of a :class:`Jet` variable, with the zero x0 of Re W+.

    ``wplus`` receives the independent variable as a jet and must return the
    jet of W+; parsed expressions (:class:`ExprFunction`) and plain lambdas
    built from jet arithmetic both qualify.
    """

    wplus: JetFunction
    x0: float = 0.0
    label: str = ""

    def __post_init__(self):
        j = self.jet(self.x0, 2)
        f0, df0 = float(j.v.real), float(j.d1.real)
        scale = max(1.0, abs(complex(j.d1)))
        if abs(f0) > ZERO_TOL * scale:
            raise ConstructionError(f"Re W+(x0) = {f0:.3e} is not zero at x0 = {self.x0}")
        if abs(df0) < ZERO_TOL * scale:
            raise ConstructionError(f"zero of Re W+ at x0 = {self.x0} is not simple")
        if df0 < 0:
            raise ConstructionError("Re W+ must increase through its zero so that sgn f+(+-inf) = +-1")

    @classmethod
    def from_expression(cls, source: str, x0: float = 0.0) -> "GeneratingFunction":
        return cls(ExprFunction(source), float(x0), source)

    def jet(self, x, order: int = 2) -> Jet:
        out = self.wplus(Jet.variable(np.asarray(x, dtype=float), order))
        if out.order < order:
            raise EvaluationError("generating function lost derivative order")
        return out

    def __call__(self, x):
        return self.jet(x, 0).v

    @functools.cached_property
    def scale(self) -> float:
        return max(1.0, abs(complex(self.jet(self.x0, 1).d1)))

    def check_single_zero(self, xs) -> None:
        """Reject f+ with more than one sign change on the sample points."""
        f = np.real(self(np.asarray(xs, dtype=float)))
        s = np.sign(f)
        s = s[s != 0]
        changes = int(np.count_nonzero(s[1:] != s[:-1]))
        if changes != 1:
            raise ConstructionError(f"Re W+ changes sign {changes} times on the probe domain; exactly one simple zero is required")


@dataclass(frozen=True)
class Type1:
    """Im W+(x0) != 0: W and W1 are regular for any eps > 0."""

    g_at_zero: float


@dataclass(frozen=True)
class Type2:
    """W+(x0) = 0: regularity forces eps = W+'(x0)."""

    eps_forced: float


ZeroClass = Union[Type1, Type2]


def classify_zero(gen: GeneratingFunction) -> ZeroClass:
    j = gen.jet(gen.x0, 1)
    g0 = float(j.v.imag)
    if abs(g0) > ZERO_TOL * gen.scale:
        return Type1(g0)
    d1 = complex(j.d1)
    if abs(d1.imag) > ZERO_TOL * gen.scale:
        # eps is real, so W+'(x0) - eps cannot vanish: the pole is not removable
        raise ConstructionError(f"W+(x0) = 0 but Im W+'(x0) = {d1.imag:.3e} != 0; no real eps removes the pole")
    if d1.real <= 0:
        raise ConstructionError("forced eps = W+'(x0) must be positive")
    return Type2(d1.real)


@dataclass(frozen=True)
class SuperpotentialPair:
    gen: GeneratingFunction
    eps: float
    zero_class: ZeroClass
    guard: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "guard", GUARD * self.gen.scale)

    @property
    def x0(self) -> float:
        return self.gen.x0

    @property
    def is_type2(self) -> bool:
        return isinstance(self.zero_class, Type2)

    @functools.cached_property
    def _series_at_zero(self) -> np.ndarray:
        # W+ and W+' - eps both vanish at x0; divide the shifted series.
        K = SERIES_ORDER
        wp = self.gen.jet(self.x0, K + 2)
        num = (wp.deriv() - self.eps).c[1 : K + 2]
        den = wp.c[1 : K + 2]
        return (Jet(num) / Jet(den)).c

    def _quotient(self, x: np.ndarray, order: int):
        """Jets of W- = (W+' - eps)/W+ and of W+ at the points ``x``."""
        wp = self.gen.jet(x, order + 1)
        num = wp.deriv() - self.eps
        den = wp.truncate(order)
        if not self.is_type2:
            return num / den, den
        # Near x0 the direct quotient loses ~1/|x - x0|^k digits in its k-th
        # derivative, so use the series there instead.
        near = np.abs(den.v) < self.guard
        window = 4.0 * self.guard / abs(complex(self.gen.jet(self.x0, 1).d1))
        stray = near & (np.abs(x - self.x0) > window)
        if np.any(stray):
            raise EvaluationError(f"W+ vanishes at x = {x[stray][0]!r} away from x0")
        q = np.empty(den.c.shape, dtype=complex)
        far = ~near
        if np.any(far):
            q[:, far] = (num[far] / den[far]).c
        if np.any(near):
            q[:, near] = taylor_shift(self._series_at_zero, x[near] - self.x0)[: order + 1]
        return Jet(q), den

    def jets(self, x, order: int = 2):
        """(W, W1) jets at ``x``."""
        x = np.asarray(x, dtype=float)
        flat = np.atleast_1d(x).ravel()
        q, wp = self._quotient(flat, order)
        W = 0.5 * (wp - q)
        W1 = 0.5 * (wp + q)
        if x.ndim == 0:
            return W[0], W1[0]
        return Jet(W.c.reshape((order + 1,) + x.shape)), Jet(W1.c.reshape((order + 1,) + x.shape))

    def W(self, x, order: int = 2) -> Jet:
        return self.jets(x, order)[0]

    def W1(self, x, order: int = 2) -> Jet:
        return self.jets(x, order)[1]

    def Wminus(self, x, order: int = 2) -> Jet:
        x = np.asarray(x, dtype=float)
        q, _ = self._quotient(np.atleast_1d(x).ravel(), order)
        return q[0] if x.ndim == 0 else Jet(q.c.reshape((order + 1,) + x.shape))

    def Wplus(self, x, order: int = 2) -> Jet:
        return self.gen.jet(x, order)


def build_pair(gen: GeneratingFunction, eps: Optional[float] = None) -> SuperpotentialPair:
    zc = classify_zero(gen)
    if isinstance(zc, Type2):
        if eps is not None and abs(eps - zc.eps_forced) > 1e-12 * gen.scale:
            raise ConstructionError(
                f"W+ vanishes at x0, which forces eps = {zc.eps_forced!r}; got eps = {eps!r}"
            )
        return SuperpotentialPair(gen, zc.eps_forced, zc)
    if eps is None:
        raise ConstructionError("Im W+(x0) != 0: eps is a free parameter and must be given")
    if not eps > 0:
        raise ConstructionError(f"eps must be positive, got {eps!r}")
    return SuperpotentialPair(gen, float(eps), zc)


def constraint_residual(pair: SuperpotentialPair, x):
    """W^2 + W' - (W1^2 - W1' + eps); vanishes identically for a valid pair."""
    W, W1 = pair.jets(x, 1)
    return W.v**2 + W.d1 - W1.v**2 + W1.d1 - pair.eps


@dataclass(frozen=True)
class RealImagSplit:
    """f + i g = W and f1 + i g1 = W1 as real-valued functions."""

    pair: SuperpotentialPair

    def f(self, x):
        return self.pair.W(x, 0).v.real

    def g(self, x):
        return self.pair.W(x, 0).v.imag

    def f1(self, x):
        return self.pair.W1(x, 0).v.real

    def g1(self, x):
        return self.pair.W1(x, 0).v.imag

    def fplus(self, x):
        return self.pair.Wplus(x, 0).v.real

    def gplus(self, x):
        return self.pair.Wplus(x, 0).v.imag

    def fminus(self, x):
        return self.pair.Wminus(x, 0).v.real

    def gminus(self, x):
        return self.pair.Wminus(x, 0).v.imag


def split_real_imag(pair: SuperpotentialPair) -> RealImagSplit:
    return RealImagSplit(pair)


@dataclass(frozen=True)
class PartnerPotentials:
    pair: SuperpotentialPair

    def vplus(self, x):
        W = self.pair.W(x, 1)
        return W.v**2 - W.d1

    def vminus(self, x):
        W = self.pair.W(x, 1)
        return W.v**2 + W.d1

    def v1plus(self, x):
        """W1^2 - W1', so that vminus = v1plus + eps."""
        W1 = self.pair.W1(x, 1)
        return W1.v**2 - W1.d1

    def real_part(self, x, sign: int = +1):
        """V_R = f^2 - g^2 -/+ f' for V(+) (sign=+1) or V(-) (sign=-1)."""
        W = self.pair.W(x, 1)
        f, g, df = W.v.real, W.v.imag, W.d1.real
        return f * f - g * g - sign * df

    def imag_part(self, x, sign: int = +1):
        """V_I = 2 f g -/+ g'."""
        W = self.pair.W(x, 1)
        f, g, dg = W.v.real, W.v.imag, W.d1.imag
        return 2 * f * g - sign * dg


def partner_potentials(pair: SuperpotentialPair) -> PartnerPotentials:
    return PartnerPotentials(pair)


def _values(W, x):
    if callable(W):
        out = W(x)
        return out.v if isinstance(out, Jet) else out
    return W


def apply_A(W, x, psi, dpsi):
    """A psi = psi' + W psi."""
    return dpsi + _values(W, x) * psi


def apply_Abar(W, x, psi, dpsi):
    """Abar psi = -psi' + W psi."""
    return -dpsi + _values(W, x) * psi


def pt_defect(V, x0: float, xs) -> float:
    """sup |conj(V(2 x0 - x)) - V(x)| over the sample points."""
    xs = np.asarray(xs, dtype=float)
    return float(np.max(np.abs(np.conj(V(2 * x0 - xs)) - V(xs))))


@dataclass(frozen=True)
class SignReport:
    f_ok: bool
    f1_ok: bool
    f_values: tuple
    f1_values: tuple


def asymptotic_sign_check(split: RealImagSplit, x_max: float) -> SignReport:
    """Empirical check of sgn f(+-inf) = sgn f1(+-inf) = +-1 at +-x_max."""
    x0 = split.pair.x0
    pts = np.array([x0 - x_max, x0 + x_max])
    f = split.f(pts)
    f1 = split.f1(pts)
    return SignReport(
        f_ok=bool(f[0] < 0 < f[1]),
        f1_ok=bool(f1[0] < 0 < f1[1]),
        f_values=(float(f[0]), float(f[1])),
        f1_values=(float(f1[0]), float(f1[1])),
    )


def scaled_constraint_residual(pair: SuperpotentialPair, x) -> float:
    """max |constraint_residual| / (1 + |W|^2 + |W1|^2) over the points ``x``."""
    x = np.asarray(x, dtype=float)
    W, W1 = pair.jets(x, 0)
    r = constraint_residual(pair, x)
    return float(np.max(np.abs(r) / (1.0 + np.abs(W.v) ** 2 + np.abs(W1.v) ** 2)))


def round_trip_error(pair: SuperpotentialPair, x) -> float:
    """Relative error of W1 + W -> W+ and W1 - W -> (W+' - eps)/W+.

    Points inside the Type-2 guard window are skipped, since there the
    quotient comes from the series rather than from W+ directly.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    wp = pair.gen.jet(x, 1)
    keep = np.abs(wp.v) >= pair.guard if pair.is_type2 else np.ones(x.shape, bool)
    x, wp = x[keep], wp[keep]
    W, W1 = pair.jets(x, 0)
    q = (wp.d1 - pair.eps) / wp.v
    e1 = np.abs(W1.v + W.v - wp.v) / np.maximum(1.0, np.abs(wp.v))
    e2 = np.abs(W1.v - W.v - q) / np.maximum(1.0, np.abs(q))
    return float(max(np.max(e1, initial=0.0), np.max(e2, initial=0.0)))
