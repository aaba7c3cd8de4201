"""Dual minimal basis pairs and their unimodular completions.

For block size s and grade d the pair (K, N) satisfies K(lambda) N(lambda)^T = 0
with K of size (d-1)s x ds (all row degrees 1) and N of size s x ds (all row
degrees d-1).  The completion (Khat, Nhat) makes U = [K; Khat] unimodular with
U^{-1} = [Nhat^T  N^T], which is what turns eigenvector and minimal-basis
recovery into a block slice.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, RatlinError
from .polymat import Basis, PolyMatrix


@dataclass(frozen=True)
class DualBasisPair:
    s: int
    d: int
    basis: Basis
    K: PolyMatrix      # (d-1)s x ds, row degrees all 1
    N: PolyMatrix      # s x ds, row degrees all d-1
    Khat: PolyMatrix   # s x ds, constant selector of the last block column
    Nhat: PolyMatrix   # (d-1)s x ds, degree <= d-2

    @property
    def rho(self) -> int:
        """Degree of N."""
        return self.d - 1


def monomial_pair(s: int, d: int) -> DualBasisPair:
    """Block bidiagonal [-I, lambda I] chain with N = [I l^{d-1}, ..., I l, I]."""
    _check_sd(s, d)
    k0 = np.zeros(((d - 1) * s, d * s), dtype=complex)
    k1 = np.zeros_like(k0)
    for i in range(d - 1):
        k0[i * s:(i + 1) * s, i * s:(i + 1) * s] = -np.eye(s)
        k1[i * s:(i + 1) * s, (i + 1) * s:(i + 2) * s] = np.eye(s)
    K = PolyMatrix(np.stack([k0, k1]), Basis.MONOMIAL)

    n_stack = np.zeros((d, s, d * s), dtype=complex)
    for j in range(d):  # block j from the left carries lambda^{d-1-j}
        n_stack[d - 1 - j, :, j * s:(j + 1) * s] = np.eye(s)
    N = PolyMatrix(n_stack, Basis.MONOMIAL)

    khat, nhat = completion(K, N)
    return DualBasisPair(s, d, Basis.MONOMIAL, K, N, khat, nhat)


def chebyshev_pair(s: int, d: int) -> DualBasisPair:
    """Three-term-recurrence chain dual to N = [phi_{d-1} I, ..., phi_0 I].

    Interior rows are [-1/2 I, lambda I, -1/2 I]; the final row is [-I, lambda I]
    since phi_1 = lambda phi_0.  For d = 2 that final row is the whole of K.
    """
    _check_sd(s, d)
    k0 = np.zeros(((d - 1) * s, d * s), dtype=complex)
    k1 = np.zeros_like(k0)
    for i in range(d - 1):
        rows = slice(i * s, (i + 1) * s)
        if i < d - 2:
            k0[rows, i * s:(i + 1) * s] = -0.5 * np.eye(s)
            k1[rows, (i + 1) * s:(i + 2) * s] = np.eye(s)
            k0[rows, (i + 2) * s:(i + 3) * s] = -0.5 * np.eye(s)
        else:
            k0[rows, i * s:(i + 1) * s] = -np.eye(s)
            k1[rows, (i + 1) * s:(i + 2) * s] = np.eye(s)
    K = PolyMatrix(np.stack([k0, k1]), Basis.CHEBYSHEV1)

    n_stack = np.zeros((d, s, d * s), dtype=complex)
    for j in range(d):
        n_stack[d - 1 - j, :, j * s:(j + 1) * s] = np.eye(s)
    N = PolyMatrix(n_stack, Basis.CHEBYSHEV1)

    khat, nhat = completion(K, N)
    return DualBasisPair(s, d, Basis.CHEBYSHEV1, K, N, khat, nhat)


def completion(K: PolyMatrix, N: PolyMatrix) -> tuple:
    """Unimodular completion (Khat, Nhat) of a dual pair from this module.

    Khat selects the last block column, which works because the last block of
    N^T is phi_0 * I = I in both bases.  Nhat is the unique polynomial of
    degree <= d-2 solving K Nhat^T = I and Khat Nhat^T = 0; the solve is done
    on the coefficient stack, one column at a time.
    """
    s = N.rows
    ds = N.cols
    if ds % s != 0:
        raise DimensionError("N column count is not a multiple of the block size")
    d = ds // s
    if K.shape != ((d - 1) * s, ds):
        raise DimensionError(f"K has shape {K.shape}, expected {((d - 1) * s, ds)}")

    khat = np.zeros((1, s, ds), dtype=complex)
    khat[0, :, (d - 1) * s:] = np.eye(s)
    Khat = PolyMatrix(khat, K.basis)

    if d == 1:
        Nhat = PolyMatrix(np.zeros((1, 0, ds), dtype=complex), K.basis)
        return Khat, Nhat

    resid = K @ N.T
    if np.max(np.abs(resid.coeffs)) > 1e-12:
        raise RatlinError("completion: K N^T != 0, not a dual pair")

    # Unknowns: coefficients X_0..X_{d-2} of one column x(lambda) of Nhat^T.
    # Conditions: conv(K, x) = e_col over degrees 0..d-1 and Khat x_t = 0.
    k0 = K.coeff(0)
    k1 = K.coeff(1)
    ncoef = d - 1
    nrows_eq = d * (d - 1) * s + ncoef * s
    ncols_eq = ncoef * ds
    sys = np.zeros((nrows_eq, ncols_eq), dtype=complex)
    for t in range(d):
        r = slice(t * (d - 1) * s, (t + 1) * (d - 1) * s)
        if t <= ncoef - 1:
            sys[r, t * ds:(t + 1) * ds] = k0
        if 1 <= t <= ncoef:
            sys[r, (t - 1) * ds:t * ds] = k1
    base = d * (d - 1) * s
    for t in range(ncoef):
        r = slice(base + t * s, base + (t + 1) * s)
        sys[r, t * ds:(t + 1) * ds] = khat[0]

    rhs = np.zeros((nrows_eq, (d - 1) * s), dtype=complex)
    rhs[: (d - 1) * s, :] = np.eye((d - 1) * s)

    sol, *_ = np.linalg.lstsq(sys, rhs, rcond=None)
    if np.linalg.norm(sys @ sol - rhs) > 1e-10 * max(1.0, np.linalg.norm(rhs)):
        raise RatlinError("completion: coefficient system inconsistent (malformed pair)")

    # The solve works on monomial coefficients; re-express in the pair basis.
    nhat_t = sol.reshape(ncoef, ds, (d - 1) * s)
    Nhat = PolyMatrix(nhat_t.transpose(0, 2, 1), Basis.MONOMIAL).to_basis(K.basis)
    return Khat, Nhat


def pair_for(basis: Basis, s: int, d: int) -> DualBasisPair:
    if basis is Basis.MONOMIAL:
        return monomial_pair(s, d)
    return chebyshev_pair(s, d)


def _check_sd(s: int, d: int):
    if s < 1 or d < 1:
        raise DimensionError(f"need block size >= 1 and grade >= 1, got s={s}, d={d}")
