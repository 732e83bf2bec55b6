"""Complex linear-algebra kernels shared by the optimizers.

Deliberately minimal: Hermitian positive-definite solves, dominant
eigenvalues, Hadamard products, and principal arguments in [0, 2pi).
Everything operates on plain complex128 ndarrays.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

TWO_PI = 2.0 * np.pi

__all__ = [
    "SingularSystemError",
    "MaxEigenvalue",
    "hermitian_solve",
    "max_eigenvalue",
    "hadamard",
    "principal_arg",
]


class SingularSystemError(np.linalg.LinAlgError):
    """A supposedly positive-definite system turned out singular."""


def _as_square_hermitian(a, rtol=1e-10):
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    scale = np.linalg.norm(a)
    if scale > 0.0 and np.linalg.norm(a - a.conj().T) > rtol * scale:
        raise ValueError("matrix is not Hermitian (relative asymmetry above 1e-10)")
    return a


def hermitian_solve(a, b):
    """Solve a @ x = b for Hermitian positive-definite a.

    Uses a Cholesky factorization; if that breaks down on a matrix that is
    still positive (tiny pivot), falls back to partially pivoted
    elimination.  A non-positive pivot raises SingularSystemError.
    """
    a = _as_square_hermitian(a)
    b = np.asarray(b, dtype=np.complex128)
    if b.shape != (a.shape[0],):
        raise ValueError(f"rhs shape {b.shape} does not match matrix {a.shape}")
    try:
        lo = np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        # Distinguish "merely ill-conditioned" from genuinely non-PD.
        min_eig = float(np.linalg.eigvalsh(a)[0])
        if min_eig <= 0.0:
            raise SingularSystemError("singular system: matrix is not positive definite") from None
        return np.linalg.solve(a, b)
    return np.linalg.solve(lo.conj().T, np.linalg.solve(lo, b))


class MaxEigenvalue(NamedTuple):
    value: float
    converged: bool
    iterations: int


def max_eigenvalue(a, tol=1e-9, max_iter=10_000):
    """Dominant eigenvalue of a Hermitian PSD matrix by power iteration.

    Returns the Rayleigh-quotient estimate together with a convergence
    flag; on non-convergence the best estimate so far is reported with the
    flag set false.
    """
    a = _as_square_hermitian(a)
    n = a.shape[0]
    if n == 0:
        return MaxEigenvalue(0.0, True, 0)
    # Fixed-seed random start: zero probability of landing orthogonal to
    # the dominant eigenspace; retry a fresh start if a null vector is hit.
    for attempt in range(3):
        gen = np.random.default_rng(0x5EED + attempt)
        x = gen.standard_normal(n) + 1j * gen.standard_normal(n)
        x /= np.linalg.norm(x)
        lam = float(np.real(x.conj() @ (a @ x)))
        for it in range(1, max_iter + 1):
            y = a @ x
            ny = float(np.linalg.norm(y))
            if ny == 0.0:
                break  # start vector annihilated; retry
            x = y / ny
            lam_new = float(np.real(x.conj() @ (a @ x)))
            if abs(lam_new - lam) <= tol * max(abs(lam_new), np.finfo(float).tiny):
                return MaxEigenvalue(max(lam_new, 0.0), True, it)
            lam = lam_new
        else:
            return MaxEigenvalue(max(lam, 0.0), False, max_iter)
    return MaxEigenvalue(0.0, True, 0)  # matrix annihilated every start: treat as zero


def hadamard(a, b):
    """Entrywise (Hadamard) product of two equally shaped matrices."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a * b


def principal_arg(z):
    """Angle a in [0, 2pi) with z = |z| e^{ja}; by convention 0 for z = 0.

    Accepts scalars or arrays (elementwise).
    """
    ang = np.mod(np.angle(z), TWO_PI)
    # mod can round to exactly 2pi for angles just below zero
    ang = np.where(ang >= TWO_PI, 0.0, ang)
    if np.isscalar(z) or np.ndim(z) == 0:
        return float(ang)
    return ang
