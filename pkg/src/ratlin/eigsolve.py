"""Dense pencil spectral computations.

Covers the generalized eigensolver contract (QZ via scipy), pole/zero
classification of a structured linearization, local partial multiplicities,
invariant orders at infinity, and polynomial nullspace minimal bases of
singular pencils via a degree-sweep convolution method.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.optimize

from .config import Tolerances, make_rng, unit_circle_points
from .errors import BreakdownError, PreconditionError, RatlinError
from .linbuild import (StructuredLinearization, check_finite_minimality,
                       check_infinity_minimality, transfer_eval)
from .polymat import NEG_INF, PolyMatrix, numerical_rank

INF_BETA_TOL = 1e-12


@dataclass(frozen=True)
class PencilEig:
    """Generalized eigenvalues of L1*lambda + L0 as (alpha, beta) pairs.

    A pair with |beta| below tolerance is an eigenvalue at infinity.  For a
    singular pencil `regular` is False and the pairs must not be interpreted.
    """

    alphas: np.ndarray
    betas: np.ndarray
    right_vectors: np.ndarray | None
    left_vectors: np.ndarray | None
    regular: bool

    def finite(self) -> np.ndarray:
        """Finite eigenvalues alpha/beta, sorted by (real, imag)."""
        mask = np.abs(self.betas) > INF_BETA_TOL * np.maximum(1.0, np.abs(self.alphas))
        vals = self.alphas[mask] / self.betas[mask]
        order = np.lexsort((vals.imag, vals.real))
        return vals[order]

    def infinite_count(self) -> int:
        mask = np.abs(self.betas) > INF_BETA_TOL * np.maximum(1.0, np.abs(self.alphas))
        return int(np.sum(~mask))


@dataclass(frozen=True)
class ZeroEntry:
    value: complex
    minimality: tuple
    classified: bool
    near_pole: bool

    def to_dict(self) -> dict:
        return {
            "lambda": [float(self.value.real), float(self.value.imag)],
            "classified": bool(self.classified),
            "minimality": [bool(self.minimality[0]), bool(self.minimality[1])],
            "nearPole": bool(self.near_pole),
        }


@dataclass(frozen=True)
class SpectralReport:
    poles: list            # (value, multiplicity count) pairs
    zeros: list            # ZeroEntry items
    infinity_orders: list | None
    grade_at_infinity: int

    def to_dict(self) -> dict:
        return {
            "poles": [{"lambda": [float(v.real), float(v.imag)], "count": int(c)}
                      for v, c in self.poles],
            "zeros": [z.to_dict() for z in self.zeros],
            "infinityOrders": (None if self.infinity_orders is None
                               else [int(q) for q in self.infinity_orders]),
            "grade": int(self.grade_at_infinity),
        }


@dataclass(frozen=True)
class MinimalBasisResult:
    """Polynomial nullspace basis with its sorted degree list."""

    vectors: PolyMatrix    # columns (right) or rows (left) are the basis
    indices: list
    side: str

    @property
    def count(self) -> int:
        return len(self.indices)


def pencil_eigs(l0: np.ndarray, l1: np.ndarray, vectors: bool = False,
                rng=None, tol: Tolerances = Tolerances()) -> PencilEig:
    """All (alpha, beta) pairs of a square pencil via the QZ backend.

    Regularity is detected by rank sampling at 3 seeded random points; a
    singular pencil is flagged and its pairs left empty.
    """
    l0 = np.asarray(l0, dtype=complex)
    l1 = np.asarray(l1, dtype=complex)
    if l0.shape != l1.shape or l0.ndim != 2 or l0.shape[0] != l0.shape[1]:
        raise RatlinError(f"pencil must be square, got {l0.shape} and {l1.shape}")
    if not pencil_is_regular(l0, l1, rng=rng, tol=tol):
        empty = np.zeros(0, dtype=complex)
        return PencilEig(empty, empty, None, None, regular=False)
    try:
        if vectors:
            w, vl, vr = scipy.linalg.eig(-l0, l1, left=True, right=True,
                                         homogeneous_eigvals=True)
        else:
            w = scipy.linalg.eig(-l0, l1, left=False, right=False,
                                 homogeneous_eigvals=True)
            vl = vr = None
        alpha, beta = w[0], w[1]
    except Exception as exc:  # surface backend failure, never silent NaN
        raise RatlinError(f"QZ backend failed: {exc}") from exc
    if np.any(np.isnan(alpha)) or np.any(np.isnan(beta)):
        raise RatlinError("QZ backend returned NaN eigenvalue data")
    return PencilEig(np.asarray(alpha), np.asarray(beta), vr, vl, regular=True)


def pencil_is_regular(l0: np.ndarray, l1: np.ndarray, rng=None,
                      tol: Tolerances = Tolerances()) -> bool:
    """Determinant sampling: full rank at any of 3 random points."""
    if l0.shape[0] != l0.shape[1]:
        return False
    n = l0.shape[0]
    if n == 0:
        return True
    rng = make_rng(rng)
    for z in unit_circle_points(rng, 3):
        if numerical_rank(l1 * z + l0, tol.rank_scale) == n:
            return True
    return False


def pencil_generic_rank(l0: np.ndarray, l1: np.ndarray, rng=None,
                        samples: int = 5, tol: Tolerances = Tolerances()) -> int:
    """Rank over the rational functions; the cutoff is loosened a couple of
    orders beyond machine epsilon so pencils assembled from computed data
    (structural zeros only exact to roundoff) are still judged correctly."""
    rng = make_rng(rng)
    return max(numerical_rank(l1 * z + l0, tol.rank_scale * 100.0)
               for z in unit_circle_points(rng, samples))


def pencil_null_vector(l0: np.ndarray, l1: np.ndarray, lam: complex,
                       side: str = "right") -> np.ndarray:
    """Singular vector of L(lam) for the smallest singular value."""
    mat = np.asarray(l1) * complex(lam) + np.asarray(l0)
    u, _, vh = np.linalg.svd(mat)
    if side == "right":
        return vh[-1].conj()
    return u[:, -1].conj()


def match_multisets(computed, expected, tol_match: float = 1e-7):
    """Optimal pairing of two eigenvalue multisets.

    Returns (ok, worst) where worst is the largest matched distance relative
    to max(1, |lambda|); ok requires equal sizes and worst <= tol_match.
    """
    a = np.asarray(list(computed), dtype=complex)
    b = np.asarray(list(expected), dtype=complex)
    if a.size != b.size:
        return False, math.inf
    if a.size == 0:
        return True, 0.0
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = scipy.optimize.linear_sum_assignment(cost)
    scale = np.maximum(1.0, np.abs(b[cols]))
    worst = float(np.max(cost[rows, cols] / scale))
    return worst <= tol_match, worst


def cluster_eigenvalues(values, tol_match: float = 1e-7) -> list:
    """Group a sorted eigenvalue list into (representative, count) clusters."""
    out = []
    for v in values:
        if out and abs(v - out[-1][0]) <= tol_match * max(1.0, abs(v)):
            rep, c = out[-1]
            out[-1] = ((rep * c + v) / (c + 1), c + 1)
        else:
            out.append((v, 1))
    return [(complex(v), int(c)) for v, c in out]


def classify(sl: StructuredLinearization, rng=None,
             tol: Tolerances = Tolerances()) -> SpectralReport:
    """Pole/zero classification of the rational matrix behind a linearization.

    Poles come from the state pencil, zeros from the full pencil; each zero is
    tagged with the pointwise minimality checks, and zeros failing either
    check are reported unclassified (the spectral characterization does not
    certify them).  A zero within matching tolerance of a pole is flagged.
    """
    r = sl.realization
    if r.p != r.m:
        raise PreconditionError("classification needs a square rational matrix")
    rng = make_rng(rng)
    la0, la1 = sl.state_pencil()
    state = pencil_eigs(la0, la1, rng=rng, tol=tol)
    if not state.regular:
        raise PreconditionError("state pencil is singular; realization invalid")
    full = pencil_eigs(sl.L0, sl.L1, rng=rng, tol=tol)
    if not full.regular:
        raise PreconditionError(
            "the pencil is singular; eigenvalues are meaningless — "
            "use polynomial_nullspace for the singular structure")

    pole_vals = state.finite()
    poles = cluster_eigenvalues(pole_vals, tol.match)

    zeros = []
    for lam in full.finite():
        mins = check_finite_minimality(r, lam, tol)
        near = any(abs(lam - pv) <= tol.match * max(1.0, abs(lam))
                   for pv in pole_vals)
        zeros.append(ZeroEntry(complex(lam), mins, bool(mins[0] and mins[1]), near))

    return SpectralReport(poles=poles, zeros=zeros, infinity_orders=None,
                          grade_at_infinity=sl.rho_d + 1)


def partial_multiplicities_at(p: PolyMatrix, lam: complex,
                              rng=None, tol: Tolerances = Tolerances()) -> list:
    """Multiplicities of lam as a zero of P, from block-Toeplitz nullities.

    Builds the lower-triangular block-Toeplitz matrices of the Taylor
    coefficients of P at lam; the count of multiplicities >= k is
    nullity(T_k) - nullity(T_{k-1}) - (cols - generic rank).

    The point is usually a computed eigenvalue, exact only to roundoff, so
    the rank cutoff is loosened well past machine epsilon: structural zero
    singular values sit near eps * cond while genuine ones are O(1) relative.
    """
    mono = p.to_monomial()
    lam = complex(lam)
    rows, cols = p.rows, p.cols
    if rows == 0 or cols == 0:
        return []
    r = _generic_rank_cached(mono, rng, tol)
    taylor = _taylor_stack(mono, lam)
    rank_scale = tol.rank_scale * 1e6

    cap = r * max(1, mono.grade) + 2
    mults = []
    prev_null = 0
    prev_count = None
    for k in range(1, cap + 1):
        tk = _toeplitz(taylor, k, rows, cols)
        null_k = (k * cols) - numerical_rank(tk, rank_scale)
        count_k = null_k - prev_null - (cols - r)
        count_k = max(0, count_k)
        if prev_count is not None:
            exactly = prev_count - count_k
            mults.extend([k - 1] * max(0, exactly))
        if count_k == 0:
            return sorted(mults)
        prev_null = null_k
        prev_count = count_k
    raise BreakdownError(
        f"partial multiplicity sweep exceeded cap {cap} at lambda={lam}")


def _generic_rank_cached(mono: PolyMatrix, rng, tol: Tolerances) -> int:
    from .polymat import generic_rank
    return generic_rank(mono, rng=make_rng(rng), rank_scale=tol.rank_scale)


def _taylor_stack(mono: PolyMatrix, lam: complex) -> list:
    """Taylor coefficients P_j = P^{(j)}(lam)/j! for j = 0..grade."""
    g = mono.grade
    out = []
    for j in range(g + 1):
        acc = np.zeros((mono.rows, mono.cols), dtype=complex)
        for t in range(j, g + 1):
            acc += math.comb(t, j) * mono.coeffs[t] * lam ** (t - j)
        out.append(acc)
    return out


def _toeplitz(taylor: list, k: int, rows: int, cols: int) -> np.ndarray:
    tk = np.zeros((k * rows, k * cols), dtype=complex)
    for t in range(k):
        for i in range(t + 1):
            j = t - i
            if j < len(taylor):
                tk[t * rows:(t + 1) * rows, i * cols:(i + 1) * cols] = taylor[j]
    return tk


def invariant_orders_at_infinity(sl: StructuredLinearization, rng=None,
                                 tol: Tolerances = Tolerances()) -> list:
    """Invariant orders at infinity of the rational matrix, grade rho_D + 1.

    Combines the partial multiplicities at 0 of the reversed state pencil and
    of the reversed full pencil, padded with zeros up to the generic rank of
    the rational matrix, then shifts everything down by the grade.
    """
    rng = make_rng(rng)
    r = sl.realization
    okl, okr = check_infinity_minimality(r, sl.grade_a, sl.grade_d, tol)
    if not (okl and okr):
        raise PreconditionError(
            f"minimality at infinity fails (left={okl}, right={okr}); "
            "the pencil does not linearize the structure at infinity")
    g = sl.rho_d + 1

    la0, la1 = sl.state_pencil()
    rev_state = PolyMatrix(np.stack([la1, la0]))
    e_list = partial_multiplicities_at(rev_state, 0.0, rng=rng, tol=tol)

    rev_full = PolyMatrix(np.stack([np.asarray(sl.L1), np.asarray(sl.L0)]))
    e_tilde = partial_multiplicities_at(rev_full, 0.0, rng=rng, tol=tol)

    rank_r = rational_rank(sl, rng=rng, tol=tol)
    t, u = len(e_list), len(e_tilde)
    if t + u > rank_r:
        raise PreconditionError(
            f"inconsistent rank estimate: {t} + {u} multiplicities for rank {rank_r}")
    body = [-e for e in reversed(e_list)] + [0] * (rank_r - t - u) + list(e_tilde)
    return [q - g for q in body]


def rational_rank(sl: StructuredLinearization, rng=None, samples: int = 5,
                  tol: Tolerances = Tolerances()) -> int:
    """Generic rank of the rational matrix, from sampled transfer evaluations.

    Transfer values carry roundoff of order eps * cond(A), so the rank cutoff
    is loosened accordingly: sample points with cond(A) above 1e6 are skipped
    and the threshold scaled up, keeping exact-by-construction rank drops
    (residual singular values ~1e-13 relative) on the zero side.
    """
    rng = make_rng(rng)
    r = sl.realization
    best = 0
    done = 0
    tries = 0
    while done < samples and tries < 10 * samples:
        z = unit_circle_points(rng, 1)[0] * (1.0 + 0.07 * tries)
        tries += 1
        try:
            if np.linalg.cond(r.A.eval(z)) > 1e6:
                continue
            val = transfer_eval(r, z, tol)
        except RatlinError:
            continue  # sampled a pole; try another radius
        best = max(best, numerical_rank(val, tol.rank_scale * 1e6))
        done += 1
    if done == 0:
        raise RatlinError("could not find well-conditioned sample points")
    return best


def polynomial_nullspace(l0: np.ndarray, l1: np.ndarray, side: str = "right",
                         rng=None, tol: Tolerances = Tolerances()) -> MinimalBasisResult:
    """Minimal polynomial nullspace basis of a pencil by degree sweep.

    For each candidate degree the block convolution matrix of the pencil is
    formed; new nullspace directions are those orthogonal to shifts of the
    lower-degree basis vectors.  The sweep stops once the count matches the
    nullity of the pencil over the rational functions.  Basis columns are
    orthonormalized degree by degree, so the output is deterministic.
    """
    l0 = np.asarray(l0, dtype=complex)
    l1 = np.asarray(l1, dtype=complex)
    pencil = PolyMatrix(np.stack([l0, l1]))
    rank = pencil_generic_rank(l0, l1, rng=rng, tol=tol)
    # pencil minimal indices never exceed the rank, so the dimension sum caps
    # the sweep
    return polymatrix_nullspace(pencil, side, rng=rng, tol=tol, rank=rank,
                                cap=sum(l0.shape))


def polymatrix_nullspace(p: PolyMatrix, side: str = "right", rng=None,
                         tol: Tolerances = Tolerances(),
                         rank: int | None = None,
                         cap: int | None = None) -> MinimalBasisResult:
    """Degree-sweep minimal basis for a polynomial matrix of any grade.

    Same convolution construction as the pencil case, with one block row per
    coefficient.  Used directly it keeps the sweep depth at the (small)
    minimal indices of the matrix instead of the inflated indices of a
    linearization.
    """
    if side not in ("right", "left"):
        raise RatlinError(f"side must be 'right' or 'left', got {side!r}")
    if side == "left":
        res = polymatrix_nullspace(p.T, "right", rng=rng, tol=tol, rank=rank,
                                   cap=cap)
        return MinimalBasisResult(vectors=res.vectors.T, indices=res.indices,
                                  side="left")

    mono = p.to_monomial()
    rows, cols = p.rows, p.cols
    if rank is None:
        from .polymat import generic_rank
        rank = generic_rank(mono, rng=make_rng(rng), rank_scale=tol.rank_scale)
    nullity = cols - rank
    if nullity <= 0:
        return MinimalBasisResult(
            vectors=PolyMatrix(np.zeros((1, cols, 0), dtype=complex)),
            indices=[], side="right")

    found = []      # (degree, coeff stack of shape (degree+1, cols))
    if cap is None:
        # an index cannot exceed the degree content rank * grade
        cap = rows + cols + rank * max(1, mono.grade)
    prev_nullity = 0
    for delta in range(cap + 1):
        conv = _convolution_matrix(mono.coeffs, delta)
        ns = _null_basis(conv, tol)
        nu = ns.shape[1]
        new_count = (nu - prev_nullity) - len(found)
        prev_nullity = nu
        if new_count > 0:
            fresh = _deflate_shifts(ns, found, delta, cols, new_count)
            for vec in fresh.T:
                found.append((delta, vec.reshape(delta + 1, cols)))
        if len(found) == nullity:
            break
    else:
        raise BreakdownError(
            f"nullspace sweep exceeded degree cap {cap} (numerical breakdown)")

    gmax = max(d for d, _ in found)
    stack = np.zeros((gmax + 1, cols, len(found)), dtype=complex)
    for j, (d, cf) in enumerate(found):
        stack[: d + 1, :, j] = cf
    return MinimalBasisResult(vectors=PolyMatrix(stack),
                              indices=sorted(d for d, _ in found),
                              side="right")


def _convolution_matrix(stack: np.ndarray, delta: int):
    g = stack.shape[0] - 1
    rows, cols = stack.shape[1], stack.shape[2]
    conv = np.zeros(((delta + g + 1) * rows, (delta + 1) * cols), dtype=complex)
    for i in range(delta + 1):
        for k in range(g + 1):
            conv[(i + k) * rows:(i + k + 1) * rows,
                 i * cols:(i + 1) * cols] = stack[k]
    return conv


def _null_basis(mat, tol: Tolerances):
    u, sv, vh = np.linalg.svd(mat)
    if sv.size == 0:
        return np.eye(mat.shape[1], dtype=complex)
    cutoff = max(mat.shape) * np.finfo(float).eps * sv[0] * tol.rank_scale
    rank = int(np.sum(sv > cutoff))
    return vh[rank:].conj().T


def _deflate_shifts(ns, found, delta, cols, new_count):
    """Remove the span of lambda-shifted lower-degree vectors from ns."""
    shifts = []
    for d, cf in found:
        for j in range(delta - d + 1):
            emb = np.zeros(((delta + 1), cols), dtype=complex)
            emb[j:j + d + 1] = cf
            shifts.append(emb.ravel())
    if shifts:
        q, _ = np.linalg.qr(np.array(shifts).T)
        ns = ns - q @ (q.conj().T @ ns)
    u, sv, _ = np.linalg.svd(ns, full_matrices=False)
    return u[:, :new_count]


def vector_degree(stack: np.ndarray, rel_tol: float = 1e-8):
    """Numerical degree of a coefficient stack (highest non-negligible row)."""
    norms = np.linalg.norm(stack.reshape(stack.shape[0], -1), axis=1)
    top = norms.max()
    if top == 0.0:
        return NEG_INF
    idx = np.nonzero(norms > rel_tol * top)[0]
    return int(idx[-1])


def certify_minimal_basis(res: MinimalBasisResult, l0: np.ndarray,
                          l1: np.ndarray, rng=None,
                          tol: Tolerances = Tolerances()) -> dict:
    """Check the three minimal-basis conditions plus the pencil residual.

    Returns a diagnostics dict: residual of L*V (or V*L), full rank at 5
    random points and at 0, and full rank of the highest-degree coefficient
    matrix taken column-by-column (row-by-row on the left side).
    """
    rng = make_rng(rng)
    if res.count == 0:
        return {"residual": 0.0, "pointwise_full_rank": True,
                "reduced_full_rank": True, "ok": True}
    pencil = PolyMatrix(np.stack([np.asarray(l0, dtype=complex),
                                  np.asarray(l1, dtype=complex)]))
    v = res.vectors
    prod = (pencil @ v) if res.side == "right" else (v @ pencil)
    scale = max(1.0, float(np.max(np.abs(v.coeffs)))) * max(
        1.0, float(np.max(np.abs(pencil.coeffs))))
    residual = float(np.max(np.abs(prod.coeffs))) / scale

    pts = list(unit_circle_points(rng, 5)) + [0.0]
    full = all(
        numerical_rank(v.eval(z), tol.rank_scale) == res.count for z in pts)

    # Columns (rows on the left) are emitted in ascending degree order, so
    # the sorted index list doubles as the per-vector degree list.
    if res.side == "right":
        hcd = np.stack([v.coeffs[d, :, j] for j, d in enumerate(res.indices)],
                       axis=1)
    else:
        hcd = np.stack([v.coeffs[d, j, :] for j, d in enumerate(res.indices)],
                       axis=0)
    reduced = numerical_rank(hcd, tol.rank_scale) == res.count
    ok = residual <= 1e-10 and full and reduced
    return {"residual": residual, "pointwise_full_rank": full,
            "reduced_full_rank": reduced, "ok": ok}
