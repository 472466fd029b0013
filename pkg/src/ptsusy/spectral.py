"""Finite-difference H = -d2/dx2 + V(x) and shifted inverse iteration.

The three-point Laplacian with Dirichlet ends gives a complex-symmetric
tridiagonal matrix (real constant off-diagonal, complex diagonal).  Only
membership of a few known energies is checked, so each target gets its own
inverse iteration rather than a full eigendecomposition.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg.lapack import zgttrf, zgttrs

from .errors import ConstructionError, ConvergenceError, SingularShiftError
from .jet import Jet
from .wavefun import Grid

log = logging.getLogger(__name__)

RETRY_OFFSET = 1e-8j


@dataclass(frozen=True)
class TridiagonalOperator:
    diag: np.ndarray
    offdiag: float
    grid: Grid

    @property
    def size(self) -> int:
        return self.diag.shape[0]

    @property
    def x(self) -> np.ndarray:
        return self.grid.x[1:-1]

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        out[:-1] += self.offdiag * v[1:]
        out[1:] += self.offdiag * v[:-1]
        return out

    def norm_inf(self) -> float:
        return float(np.max(np.abs(self.diag)) + 2 * abs(self.offdiag))

    def to_dense(self) -> np.ndarray:
        n = self.size
        return np.diag(self.diag) + self.offdiag * (np.eye(n, k=1) + np.eye(n, k=-1))


def discretize(V, grid: Grid) -> TridiagonalOperator:
    if grid.n < 5:
        raise ConstructionError("discretization needs n >= 5")
    h = grid.h
    xi = grid.x[1:-1]
    pot = V(xi)
    pot = pot.v if isinstance(pot, Jet) else pot
    diag = 2.0 / h**2 + np.asarray(pot, dtype=complex) * np.ones_like(xi)
    return TridiagonalOperator(diag, -1.0 / h**2, grid)


class ShiftedSolver:
    """LU factors of (op - shift I), with partial pivoting (LAPACK gttrf).

    An exactly singular pivot triggers one retry at ``shift + 1e-8 i``;
    ``shift`` records the shift actually factored.
    """

    def __init__(self, op: TridiagonalOperator, shift: complex):
        self.op = op
        self.requested_shift = complex(shift)
        for attempt in (self.requested_shift, self.requested_shift + RETRY_OFFSET):
            off = np.full(op.size - 1, op.offdiag, dtype=complex)
            dl, d, du, du2, ipiv, info = zgttrf(off, op.diag - attempt, off.copy())
            if info < 0:
                raise ValueError(f"gttrf: illegal argument {-info}")
            if info == 0:
                self.shift = attempt
                self._factors = (dl, d, du, du2, ipiv)
                if attempt != self.requested_shift:
                    log.info("shift %r hit a singular pivot; retried at %r", shift, attempt)
                return
        raise SingularShiftError(f"(H - sigma I) is singular at sigma = {shift!r} and after the retry")

    @property
    def retried(self) -> bool:
        return self.shift != self.requested_shift

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        u, info = zgttrs(*self._factors, np.asarray(rhs, dtype=complex))
        if info != 0:
            raise ValueError(f"gttrs failed with info={info}")
        return u


def solve_shifted(op: TridiagonalOperator, shift: complex, rhs) -> np.ndarray:
    return ShiftedSolver(op, shift).solve(rhs)


@dataclass
class EigenResult:
    eigenvalue: complex
    vector: np.ndarray
    residual: float
    iterations: int
    converged: bool
    shift: complex = 0j


def residual_of(op: TridiagonalOperator, lam: complex, v: np.ndarray) -> float:
    return float(np.max(np.abs(op.matvec(v) - lam * v)) / np.max(np.abs(v)))


def _rayleigh(op, v, Hv):
    # unconjugated bilinear form; fall back to the Hermitian one when v^T v ~ 0
    den = v @ v
    if abs(den) < 1e-8 * np.vdot(v, v).real:
        return np.vdot(v, Hv) / np.vdot(v, v)
    return (v @ Hv) / den


def inverse_iteration(op: TridiagonalOperator, shift: complex, tol: float = 1e-6, max_iter: int = 100, seed: int = 0) -> EigenResult:
    """Eigenpair nearest ``shift``.

    Converged when ||H v - lambda v||_inf <= tol ||v||_inf, with lambda the
    unconjugated Rayleigh quotient v^T H v / v^T v.
    """
    if tol < 1e-12:
        raise ValueError("tol must be >= 1e-12")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    solver = ShiftedSolver(op, shift)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(op.size) + 1j * rng.standard_normal(op.size)
    v /= np.max(np.abs(v))
    lam, res = complex(shift), math.inf
    for it in range(1, max_iter + 1):
        u = solver.solve(v)
        v = u / u[np.argmax(np.abs(u))]
        Hv = op.matvec(v)
        lam = complex(_rayleigh(op, v, Hv))
        res = float(np.max(np.abs(Hv - lam * v)))
        if res <= tol:
            return EigenResult(lam, v, res, it, True, solver.shift)
    return EigenResult(lam, v, res, max_iter, False, solver.shift)


@dataclass
class TargetCheck:
    target: float
    eigenvalue: complex
    error: float
    imag: float
    residual: float
    iterations: int
    converged: bool
    ok: bool


@dataclass
class EnergyReport:
    checks: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)


def verify_energies(V, targets, grid: Grid, tol_eig: float = 5e-4, tol_res: float = 1e-6, max_iter: int = 200) -> EnergyReport:
    """Check that every target is (numerically) an eigenvalue of -d2/dx2 + V."""
    targets = sorted(float(t) for t in targets)
    gaps = np.diff(targets)
    if len(gaps) and np.min(gaps) < 4 * tol_eig:
        raise ValueError("targets must be separated by at least 4 tol_eig")
    gap = float(np.min(gaps)) if len(gaps) else 1.0
    op = discretize(V, grid)
    report = EnergyReport()
    for t in targets:
        r = inverse_iteration(op, t + 0.1 * gap, tol=tol_res, max_iter=max_iter)
        err = abs(r.eigenvalue - t)
        im = abs(r.eigenvalue.imag)
        ok = r.converged and err <= tol_eig and im <= tol_eig
        report.checks.append(TargetCheck(t, r.eigenvalue, err, im, r.residual, r.iterations, r.converged, ok))
    return report


def richardson_order(V, target: float, grids, tol_res: float = 1e-6):
    """Observed convergence order from eigenvalues on grids with h, h/2, h/4.

    Returns the order as a float, or the string "converged" when successive
    differences drop below 1e-13.
    """
    grids = list(grids)
    if len(grids) != 3:
        raise ValueError("need exactly three grids")
    h = [g.h for g in grids]
    if not (math.isclose(h[0], 2 * h[1], rel_tol=1e-9) and math.isclose(h[1], 2 * h[2], rel_tol=1e-9)):
        raise ValueError("grids must have spacings h, h/2, h/4")
    lams = []
    for g in grids:
        op = discretize(V, g)
        r = inverse_iteration(op, target, tol=tol_res, max_iter=200)
        if not r.converged:
            raise ConvergenceError(f"inverse iteration did not converge on n={g.n}")
        lams.append(r.eigenvalue)
    d1 = abs(lams[0] - lams[1])
    d2 = abs(lams[1] - lams[2])
    if d1 < 1e-13 or d2 < 1e-13:
        return "converged"
    return math.log2(d1 / d2)
