"""sl(2) generators and the gauge-transformed operator T on polynomials in z.

Operators act on the monomial basis {1, z, ..., z^D}; column k of a matrix
holds the coefficients of the image of z^k.  Degree-raising operators lose
whatever lands above z^D, so a product of two generators is exact on inputs
of degree <= D - 2 only.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import ConstructionError, EvaluationError
from .jet import Jet


@dataclass(frozen=True)
class PolyOperator:
    matrix: np.ndarray
    N: float | None = None
    label: str = ""

    @property
    def degree(self) -> int:
        return self.matrix.shape[0] - 1

    def apply(self, coeffs) -> np.ndarray:
        c = np.zeros(self.degree + 1, dtype=complex)
        coeffs = np.asarray(coeffs, dtype=complex)
        c[: coeffs.shape[0]] = coeffs
        return self.matrix @ c

    def __matmul__(self, other: "PolyOperator") -> "PolyOperator":
        return PolyOperator(self.matrix @ other.matrix, self.N)

    def __add__(self, other: "PolyOperator") -> "PolyOperator":
        return PolyOperator(self.matrix + other.matrix, self.N)

    def __sub__(self, other: "PolyOperator") -> "PolyOperator":
        return PolyOperator(self.matrix - other.matrix, self.N)

    def __rmul__(self, scalar) -> "PolyOperator":
        return PolyOperator(scalar * self.matrix, self.N)


def _empty(D):
    return np.zeros((D + 1, D + 1), dtype=complex)


def sl2_generators(N: float, D: int):
    """(J+, J0, J-) = (z^2 d/dz - N z, z d/dz - N/2, d/dz)."""
    if D < 2:
        raise ConstructionError("degree bound D must be >= 2")
    Jp, J0, Jm = _empty(D), _empty(D), _empty(D)
    for k in range(D + 1):
        if k + 1 <= D:
            Jp[k + 1, k] = k - N
        J0[k, k] = k - N / 2
        if k >= 1:
            Jm[k - 1, k] = k
    return PolyOperator(Jp, N, "J+"), PolyOperator(J0, N, "J0"), PolyOperator(Jm, N, "J-")


def identity(D: int, N: float | None = None) -> PolyOperator:
    return PolyOperator(np.eye(D + 1, dtype=complex), N, "1")


def t_operator_matrix(a: float, b: float, D: int = 8) -> PolyOperator:
    """T = -a^-2 (1 - i b z)^4 d2/dz2 + a z d/dz for m = 1.

    Exact on inputs of degree <= D - 2 (T raises degree by two).
    """
    if D < 6:
        raise ConstructionError("degree bound D must be >= 6")
    T = _empty(D)
    quartic = [comb(4, j) * (-1j * b) ** j for j in range(5)]
    for k in range(D - 1):
        T[k, k] += a * k
        if k >= 2:
            for j, q in enumerate(quartic):
                T[k - 2 + j, k] += -k * (k - 1) * q / a**2
    return PolyOperator(T, 1, "T")


def quadratic_combination_matrix(a: float, b: float, D: int = 8, first_order: bool = True) -> PolyOperator:
    """T assembled from the N = 1 generators.

    The second-order part is

        a^-2 (-b^4 J+^2 - 4ib^3 J+J0 + 6b^2 J+J- + 4ib J0J- - J-^2
              - 2ib^3 J+ + 6b^2 J0 + 2ib J- + 3b^2),

    and the drift a z d/dz equals a (J0 + 1/2) when N = 1.  ``first_order=False``
    returns the second-order part alone.
    """
    if D < 6:
        raise ConstructionError("degree bound D must be >= 6")
    Jp, J0, Jm = sl2_generators(1, D)
    one = identity(D, 1)
    ib = 1j * b
    second = (
        -(b**4) * (Jp @ Jp)
        - 4 * ib * b**2 * (Jp @ J0)
        + 6 * b**2 * (Jp @ Jm)
        + 4 * ib * (J0 @ Jm)
        - (Jm @ Jm)
        - 2 * ib * b**2 * Jp
        + 6 * b**2 * J0
        + 2 * ib * Jm
        + 3 * b**2 * one
    )
    out = (1 / a**2) * second
    if first_order:
        out = out + a * (J0 + 0.5 * one)
    return PolyOperator(out.matrix, 1, "quadratic combination")


def operator_equal(p: PolyOperator, q: PolyOperator, input_degree: int, tol: float):
    """(equal, max discrepancy) over the columns acting on degree <= input_degree."""
    if p.matrix.shape != q.matrix.shape:
        raise ValueError("operators act on different spaces")
    if input_degree > p.degree:
        raise ValueError("input degree exceeds the representation")
    diff = float(np.max(np.abs(p.matrix[:, : input_degree + 1] - q.matrix[:, : input_degree + 1])))
    return diff <= tol, diff


def commutator(p: PolyOperator, q: PolyOperator) -> PolyOperator:
    return p @ q - q @ p


def t_apply_pointwise(m: int, a: float, b: float, phi, z: complex) -> complex:
    """(T phi)(z) for any m >= 1; ``phi`` maps a jet in z to a jet.

    Uses the principal branch of (1 - i b z^(2m-1))^(4m/(2m-1)).
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    z = complex(z)
    w = 1 - 1j * b * z ** (2 * m - 1)
    if w.real <= 0 and abs(w.imag) < 1e-12:
        raise EvaluationError(f"1 - i b z^(2m-1) = {w!r} lies on the branch cut")
    p = 4 * m / (2 * m - 1)
    coeff = a ** (-2 / (2 * m - 1)) * (w**4 if m == 1 else w**p)
    j = phi(Jet.variable(z, 2))
    return complex(-coeff * j.d2 + a * z * j.d1)
