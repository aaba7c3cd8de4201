"""Pull-back maps from a structured linearization to the rational matrix.

Eigenvectors come back by slicing the appropriate block of a pencil null
vector; minimal bases come back the same way at the polynomial level, with
the right indices shifted down by rho_D and the left indices unchanged.  The
one-sided factorization residuals provide an executable certificate that a
built pencil really carries the transfer function around with it.
"""

from dataclasses import dataclass

import numpy as np

from .config import Tolerances, make_rng, unit_circle_points
from .errors import PoleError, PreconditionError, RatlinError
from .eigsolve import (MinimalBasisResult, pencil_eigs, pencil_null_vector,
                       polynomial_nullspace, vector_degree)
from .linbuild import (StructuredLinearization, check_finite_minimality,
                       check_infinity_minimality, hat_transfer_eval,
                       transfer_eval)
from .polymat import NEG_INF, PolyMatrix, numerical_rank


@dataclass(frozen=True)
class EigenpairR:
    """Eigenvalue of the rational matrix with recovered vectors and residuals."""

    value: complex
    x: np.ndarray | None
    yT: np.ndarray | None
    residual_right: float
    residual_left: float

    def to_dict(self) -> dict:
        def vec(v):
            return None if v is None else [[float(c.real), float(c.imag)] for c in v]
        return {"lambda": [float(self.value.real), float(self.value.imag)],
                "x": vec(self.x), "yT": vec(self.yT),
                "residuals": [self.residual_right, self.residual_left]}


@dataclass(frozen=True)
class RecoveredNullspace:
    side: str
    basis_r: MinimalBasisResult       # basis of the rational matrix
    basis_l: MinimalBasisResult       # source basis of the pencil
    shift: int
    diagnostics: dict

    def to_dict(self) -> dict:
        return {
            "side": self.side,
            "indices": [int(i) for i in self.basis_r.indices],
            "pencilIndices": [int(i) for i in self.basis_l.indices],
            "shift": int(self.shift),
            "basis": self.basis_r.vectors.to_dict(),
            "diagnostics": {k: (bool(v) if isinstance(v, (bool, np.bool_)) else v)
                            for k, v in self.diagnostics.items()},
        }


# ---------------------------------------------------------------------------
# eigenvector maps
# ---------------------------------------------------------------------------

def recover_right_eigvec(sl: StructuredLinearization, lam: complex,
                         x_tilde: np.ndarray,
                         tol: Tolerances = Tolerances()) -> np.ndarray:
    """Right eigenvector of the rational matrix from one of the pencil.

    With the last-block-selector completion this is a slice: the final m
    entries of x_tilde.  A vector from the unclassified part of the spectrum
    slices to numerical zero and is rejected.
    """
    r = sl.realization
    x_tilde = np.asarray(x_tilde, dtype=complex).ravel()
    if x_tilde.size != sl.shape[1]:
        raise RatlinError("x_tilde length does not match the pencil")
    x = x_tilde[-r.m:]
    if np.linalg.norm(x) <= 1e-12 * np.linalg.norm(x_tilde):
        raise RatlinError(
            "recovered vector is numerically zero: the pencil vector does not "
            "come from the rational matrix (unclassified part)")
    return x


def recover_left_eigvec(sl: StructuredLinearization, lam: complex,
                        y_tilde_t: np.ndarray,
                        tol: Tolerances = Tolerances()) -> np.ndarray:
    """Left eigenvector: the block at positions [n(1+rho_A), n(1+rho_A)+p)."""
    r = sl.realization
    y = np.asarray(y_tilde_t, dtype=complex).ravel()
    if y.size != sl.shape[0]:
        raise RatlinError("y_tilde length does not match the pencil")
    na = sl.blocks["L_A"][1]
    out = y[na:na + r.p]
    if np.linalg.norm(out) <= 1e-12 * np.linalg.norm(y):
        raise RatlinError("recovered left vector is numerically zero")
    return out


def lift_right_eigvec(sl: StructuredLinearization, lam: complex,
                      x: np.ndarray, tol: Tolerances = Tolerances()) -> np.ndarray:
    """Embed a right eigenvector of the rational matrix into the pencil:
    [-N_A^T A^{-1} B x; N_D^T x] evaluated at the point."""
    r = sl.realization
    x = np.asarray(x, dtype=complex).ravel()
    av = r.A.eval(lam)
    sv = np.linalg.svd(av, compute_uv=False)
    if sv[-1] <= r.n * np.finfo(float).eps * max(sv[0], 1.0) * tol.rank_scale:
        raise PoleError(f"state matrix singular at lambda={lam}")
    upper = -sl.pair_a.N.eval(lam).T @ np.linalg.solve(av, r.B.eval(lam) @ x)
    lower = sl.pair_d.N.eval(lam).T @ x
    return np.concatenate([upper, lower])


def lift_left_eigvec(sl: StructuredLinearization, lam: complex,
                     y_t: np.ndarray, tol: Tolerances = Tolerances()) -> np.ndarray:
    """Embed a left eigenvector: y^T [M_C L_A^{-1}, I_p, -M_R Nhat_D^T]."""
    r = sl.realization
    y = np.asarray(y_t, dtype=complex).ravel()
    la0, la1 = sl.state_pencil()
    la = la1 * complex(lam) + la0
    sv = np.linalg.svd(la, compute_uv=False)
    if sv[-1] <= la.shape[0] * np.finfo(float).eps * max(sv[0], 1.0) * tol.rank_scale:
        raise PoleError(f"state pencil singular at lambda={lam}")
    first = np.linalg.solve(la.T, sl.m_c.eval(lam).T).T
    mr = _m_r_eval(sl, lam, tol)
    last = -mr @ sl.pair_d.Nhat.eval(lam).T
    return np.concatenate([y @ first, y, y @ last])


def eigenpair(sl: StructuredLinearization, lam: complex,
              tol: Tolerances = Tolerances()) -> EigenpairR:
    """Recover both eigenvectors at a classified zero and report residuals."""
    r = sl.realization
    x_tilde = pencil_null_vector(sl.L0, sl.L1, lam, "right")
    y_tilde = pencil_null_vector(sl.L0, sl.L1, lam, "left")
    x = recover_right_eigvec(sl, lam, x_tilde, tol)
    y = recover_left_eigvec(sl, lam, y_tilde, tol)
    rv = transfer_eval(r, lam, tol)
    res_r = float(np.linalg.norm(rv @ x) / np.linalg.norm(x))
    res_l = float(np.linalg.norm(y @ rv) / np.linalg.norm(y))
    return EigenpairR(complex(lam), x, y, res_r, res_l)


def _m_r_eval(sl: StructuredLinearization, lam: complex,
              tol: Tolerances) -> np.ndarray:
    """M_D(lam) + C(lam) A(lam)^{-1} M_B(lam)."""
    r = sl.realization
    av = r.A.eval(lam)
    return sl.m_d.eval(lam) + r.C.eval(lam) @ np.linalg.solve(av, sl.m_b.eval(lam))


# ---------------------------------------------------------------------------
# one-sided factorization residuals
# ---------------------------------------------------------------------------

def factorization_residuals(sl: StructuredLinearization, lam: complex,
                            tol: Tolerances = Tolerances()) -> tuple:
    """Residual norms of the two one-sided factorizations at a point.

    right: Rhat(lam) N_D(lam)^T - [R(lam); 0]
    left:  [I_p, -M_R(lam) Nhat_D(lam)^T] Rhat(lam) - R(lam) Khat_D(lam)
    """
    r = sl.realization
    rhat = hat_transfer_eval(sl, lam, tol)
    rv = transfer_eval(r, lam, tol)
    nd = sl.pair_d.N.eval(lam)
    target = np.vstack([rv, np.zeros((sl.rho_d * r.m, r.m), dtype=complex)])
    right = float(np.linalg.norm(rhat @ nd.T - target))

    mr = rhat[: r.p, :]
    ndhat = sl.pair_d.Nhat.eval(lam)
    selector = np.hstack([np.eye(r.p, dtype=complex), -mr @ ndhat.T])
    left = float(np.linalg.norm(selector @ rhat - rv @ sl.pair_d.Khat.eval(lam)))
    return right, left


# ---------------------------------------------------------------------------
# minimal bases
# ---------------------------------------------------------------------------

def recover_right_minimal_basis(sl: StructuredLinearization, rng=None,
                                tol: Tolerances = Tolerances()) -> RecoveredNullspace:
    """Right minimal basis and indices of the rational matrix.

    The pencil's right minimal basis vectors are split; the rational-matrix
    basis is the last m-row slice of the lower block (the selector completion
    at work) and the indices drop by rho_D.
    """
    rng = make_rng(rng)
    _check_sampled_minimality(sl, "right", rng, tol)
    basis_l = polynomial_nullspace(sl.L0, sl.L1, "right", rng=rng, tol=tol)
    r = sl.realization
    if basis_l.count == 0:
        empty = MinimalBasisResult(
            vectors=PolyMatrix(np.zeros((1, r.m, 0), dtype=complex)),
            indices=[], side="right")
        return RecoveredNullspace("right", empty, basis_l, sl.rho_d,
                                  _empty_diagnostics())

    stack = basis_l.vectors.coeffs[:, -r.m:, :]
    cols = []
    degrees = []
    ok_deg = True
    for j, eps in enumerate(basis_l.indices):
        want = eps - sl.rho_d
        col = np.array(stack[:, :, j])
        deg = vector_degree(col)
        if deg == NEG_INF or deg != want:
            ok_deg = False
        cols.append(_normalize_column(col, want))
        degrees.append(want)
    gmax = max(degrees)
    out = np.zeros((gmax + 1, r.m, len(cols)), dtype=complex)
    for j, col in enumerate(cols):
        out[:, :, j] = col[: gmax + 1]
    basis_r = MinimalBasisResult(vectors=PolyMatrix(out), indices=sorted(degrees),
                                 side="right")
    diag = _nullspace_diagnostics(sl, basis_r, "right", rng, tol)
    diag["degree_consistent"] = ok_deg
    return RecoveredNullspace("right", basis_r, basis_l, sl.rho_d, diag)


def recover_left_minimal_basis(sl: StructuredLinearization, rng=None,
                               tol: Tolerances = Tolerances()) -> RecoveredNullspace:
    """Left minimal basis of the rational matrix; indices carry over as-is."""
    rng = make_rng(rng)
    _check_sampled_minimality(sl, "left", rng, tol)
    basis_l = polynomial_nullspace(sl.L0, sl.L1, "left", rng=rng, tol=tol)
    r = sl.realization
    na = sl.blocks["L_A"][1]
    if basis_l.count == 0:
        empty = MinimalBasisResult(
            vectors=PolyMatrix(np.zeros((1, 0, r.p), dtype=complex)),
            indices=[], side="left")
        return RecoveredNullspace("left", empty, basis_l, 0,
                                  _empty_diagnostics())

    stack = basis_l.vectors.coeffs[:, :, na:na + r.p]
    rows_out = []
    degrees = []
    ok_deg = True
    for j, eta in enumerate(basis_l.indices):
        row = np.array(stack[:, j, :])
        deg = vector_degree(row)
        if deg == NEG_INF or deg != eta:
            ok_deg = False
        rows_out.append(_normalize_column(row, eta))
        degrees.append(eta)
    gmax = max(degrees)
    out = np.zeros((gmax + 1, len(rows_out), r.p), dtype=complex)
    for j, row in enumerate(rows_out):
        out[:, j, :] = row[: gmax + 1]
    basis_r = MinimalBasisResult(vectors=PolyMatrix(out), indices=sorted(degrees),
                                 side="left")
    diag = _nullspace_diagnostics(sl, basis_r, "left", rng, tol)
    diag["degree_consistent"] = ok_deg
    return RecoveredNullspace("left", basis_r, basis_l, 0, diag)


def _empty_diagnostics() -> dict:
    return {"ok": True, "degree_consistent": True, "nullspace_residual": 0.0,
            "pointwise_full_rank": True, "reduced_full_rank": True}


def _normalize_column(col: np.ndarray, degree: int) -> np.ndarray:
    """Scale so the largest entry of the degree coefficient is exactly 1."""
    if degree < 0 or degree >= col.shape[0]:
        return col
    top = col[degree]
    idx = int(np.argmax(np.abs(top)))
    pivot = top.ravel()[idx] if top.ndim == 1 else top.reshape(-1)[idx]
    if pivot == 0:
        return col
    out = col / pivot
    out[degree + 1:] = 0.0  # exact truncation at the theoretical degree
    return out


def _check_sampled_minimality(sl: StructuredLinearization, side: str,
                              rng, tol: Tolerances):
    """Sampled proxy for the global rank hypotheses of index recovery.

    The pointwise rank conditions are checked at all finite eigenvalues of
    the pencil and the state pencil plus 20 random points, and the matching
    reversal condition at 0.  Exact global verification would need symbolic
    arithmetic and is out of scope; failures raise with the offending points.
    """
    r = sl.realization
    pts = list(unit_circle_points(rng, 20))
    la0, la1 = sl.state_pencil()
    state = pencil_eigs(la0, la1, rng=rng, tol=tol)
    if state.regular:
        pts.extend(state.finite().tolist())
    if sl.shape[0] == sl.shape[1]:
        full = pencil_eigs(sl.L0, sl.L1, rng=rng, tol=tol)
        if full.regular:
            pts.extend(full.finite().tolist())

    bad = []
    for z in pts:
        left_ok, right_ok = check_finite_minimality(r, z, tol)
        ok = left_ok if side == "right" else right_ok
        if not ok:
            bad.append(z)
    inf_left, inf_right = check_infinity_minimality(r, sl.grade_a, sl.grade_d, tol)
    inf_ok = inf_left if side == "right" else inf_right
    if bad or not inf_ok:
        detail = []
        if bad:
            detail.append(f"pointwise rank condition fails at {bad[:4]}")
        if not inf_ok:
            detail.append("reversal rank condition fails at 0")
        raise PreconditionError(
            f"{side} minimal basis recovery hypotheses not satisfied: "
            + "; ".join(detail))


def _nullspace_diagnostics(sl: StructuredLinearization, basis: MinimalBasisResult,
                           side: str, rng, tol: Tolerances) -> dict:
    """Re-verify a recovered basis: nullspace residual at sample points,
    pointwise full rank (including 0), and reducedness."""
    r = sl.realization
    pts = []
    tries = 0
    while len(pts) < 5 and tries < 40:
        z = unit_circle_points(rng, 1)[0] * (1.0 + 0.05 * tries)
        tries += 1
        try:
            rv = transfer_eval(r, z, tol)
        except RatlinError:
            continue
        pts.append((z, rv))
    worst = 0.0
    for z, rv in pts:
        vv = basis.vectors.eval(z)
        res = rv @ vv if side == "right" else vv @ rv
        scale = max(1.0, np.linalg.norm(rv)) * max(1.0, np.linalg.norm(vv))
        worst = max(worst, float(np.linalg.norm(res)) / scale)

    eval_pts = [z for z, _ in pts] + [0.0]
    full = all(numerical_rank(basis.vectors.eval(z), tol.rank_scale) == basis.count
               for z in eval_pts)
    if side == "right":
        hcd = np.stack([basis.vectors.coeffs[d, :, j]
                        for j, d in enumerate(basis.indices)], axis=1)
    else:
        hcd = np.stack([basis.vectors.coeffs[d, j, :]
                        for j, d in enumerate(basis.indices)], axis=0)
    reduced = numerical_rank(hcd, tol.rank_scale) == basis.count
    return {"ok": worst <= 1e-8 and full and reduced,
            "nullspace_residual": worst,
            "pointwise_full_rank": full,
            "reduced_full_rank": reduced}
