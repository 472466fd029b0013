"""The two exact eigenstates of H+ sampled on a uniform grid."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConstructionError, DomainTooSmallError
from .jet import Jet
from .susy import SuperpotentialPair

DECAY_TOL = 1e-12


@dataclass(frozen=True)
class Grid:
    xmin: float
    xmax: float
    n: int

    def __post_init__(self):
        if not self.xmin < self.xmax:
            raise ConstructionError(f"grid needs xmin < xmax, got [{self.xmin}, {self.xmax}]")
        if self.n < 3 or self.n % 2 == 0:
            raise ConstructionError(f"grid size must be odd and >= 3, got {self.n}")

    @classmethod
    def symmetric(cls, center: float, half_width: float, n: int) -> "Grid":
        return cls(center - half_width, center + half_width, n)

    @property
    def h(self) -> float:
        return (self.xmax - self.xmin) / (self.n - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.xmin, self.xmax, self.n)

    def refined(self) -> "Grid":
        """Same interval, half the spacing."""
        return Grid(self.xmin, self.xmax, 2 * self.n - 1)


@dataclass(frozen=True)
class WavefunctionGrid:
    grid: Grid
    values: np.ndarray
    energy: float
    normalization: str = "max-modulus-one"

    @property
    def boundary_ratio(self) -> float:
        m = np.max(np.abs(self.values))
        return float(max(abs(self.values[0]), abs(self.values[-1])) / m)

    def check_decay(self, tol: float = DECAY_TOL) -> None:
        r = self.boundary_ratio
        if not r < tol:
            raise DomainTooSmallError(
                f"boundary modulus is {r:.2e} of the maximum (need < {tol:g}); enlarge [{self.grid.xmin}, {self.grid.xmax}]"
            )


def _as_values(fn, x):
    out = fn(x)
    return np.asarray(out.v if isinstance(out, Jet) else out, dtype=complex)


def cumulative_integral(fn, x0: float, grid: Grid) -> np.ndarray:
    """Antiderivative of ``fn`` at every grid node, zero at the node nearest x0.

    Each cell [x_k, x_k+1] is integrated with Simpson's rule using the cell
    midpoint, so the result is fourth-order accurate at every node.
    """
    x = grid.x
    h = grid.h
    f = _as_values(fn, x)
    fm = _as_values(fn, x[:-1] + 0.5 * h)
    cells = (h / 6.0) * (f[:-1] + 4.0 * fm + f[1:])
    acc = np.concatenate(([0.0], np.cumsum(cells)))
    k = int(np.argmin(np.abs(x - x0)))
    return acc - acc[k]


def _normalized(exponent: np.ndarray, prefactor=None):
    # subtract the largest real part first so exp() cannot overflow
    shifted = exponent - np.max(exponent.real)
    values = np.exp(shifted)
    if prefactor is not None:
        values = prefactor * values
    m = np.max(np.abs(values))
    if not np.isfinite(m) or m == 0:
        raise ConstructionError("wavefunction vanishes or overflows on the whole grid")
    return values / m


def psi0(pair: SuperpotentialPair, grid: Grid) -> WavefunctionGrid:
    """Ground state exp(-int W), energy 0."""
    exponent = -cumulative_integral(lambda x: pair.W(x, 0), pair.x0, grid)
    return WavefunctionGrid(grid, _normalized(exponent), 0.0)


def psi1(pair: SuperpotentialPair, grid: Grid, wplus=None) -> WavefunctionGrid:
    """First excited state W+ exp(-int W1), energy eps."""
    exponent = -cumulative_integral(lambda x: pair.W1(x, 0), pair.x0, grid)
    wp = _as_values(wplus, grid.x) if wplus is not None else pair.Wplus(grid.x, 0).v
    return WavefunctionGrid(grid, _normalized(exponent, wp), pair.eps)


def psi0_partner(pair: SuperpotentialPair, grid: Grid) -> WavefunctionGrid:
    """Ground state exp(-int W1) of H- = H1+ + eps, energy eps."""
    exponent = -cumulative_integral(lambda x: pair.W1(x, 0), pair.x0, grid)
    return WavefunctionGrid(grid, _normalized(exponent), pair.eps)


def second_difference(values: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order central second derivative at the interior points 2..n-3."""
    v = values
    return (-v[4:] + 16 * v[3:-1] - 30 * v[2:-2] + 16 * v[1:-3] - v[:-4]) / (12 * h * h)


def schrodinger_residual(V, psi: WavefunctionGrid) -> float:
    """sup |-psi'' + V psi - E psi| / max|psi| over interior points."""
    if psi.grid.n < 5:
        raise ConstructionError("residual needs at least 5 grid points")
    x = psi.grid.x[2:-2]
    v = psi.values
    pot = _as_values(V, x)
    r = -second_difference(v, psi.grid.h) + (pot - psi.energy) * v[2:-2]
    return float(np.max(np.abs(r)) / np.max(np.abs(v)))


def ratio_check(psi1_: WavefunctionGrid, psi0_: WavefunctionGrid, z, floor: float = 1e-8) -> float:
    """Relative spread of (psi1/psi0)/z(x) about its median.

    Points where psi0 is below ``floor`` of its maximum, or where z vanishes,
    are skipped.
    """
    if psi1_.grid != psi0_.grid:
        raise ConstructionError("ratio_check needs both states on the same grid")
    x = psi0_.grid.x
    zv = _as_values(z, x)
    a0 = np.abs(psi0_.values)
    mask = (a0 > floor * a0.max()) & (np.abs(zv) > 1e-6 * np.max(np.abs(zv)))
    r = psi1_.values[mask] / psi0_.values[mask] / zv[mask]
    med = np.median(r.real) + 1j * np.median(r.imag)
    return float(np.max(np.abs(r - med)) / abs(med))
