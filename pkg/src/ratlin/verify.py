"""Cross-cutting verification harness.

Generates structured random realizations, runs every identity the library
relies on as an executable check, and reports pass/fail with worst residuals.
The harness ships with the library (not only the tests) because the spectral
guarantees are conditional: users need the condition checks on their own
realizations.
"""

from dataclasses import dataclass

import numpy as np

from .config import Tolerances, make_rng, unit_circle_points
from .errors import PreconditionError, RatlinError
from .eigsolve import (classify, match_multisets, pencil_eigs,
                       pencil_generic_rank, polymatrix_nullspace,
                       polynomial_nullspace, rational_rank, vector_degree)
from .linbuild import (Realization, StructuredLinearization, build,
                       check_finite_minimality, check_infinity_minimality,
                       transfer_eval)
from .polymat import (Basis, PolyMatrix, max_coeff_diff, numerical_rank,
                      poly_adjugate, poly_det_coeffs, scalar_multiply)
from .recover import (eigenpair, factorization_residuals,
                      recover_left_minimal_basis, recover_right_minimal_basis)

STRUCTURES = ("regular", "zero-column-b", "zero-row-c", "rank-deficient-d")


@dataclass(frozen=True)
class FixtureSpec:
    seed: int = 0
    n: int = 2
    p: int = 2
    m: int = 2
    grade_a: int = 2
    grade_d: int = 2
    basis_a: Basis = Basis.MONOMIAL
    basis_d: Basis = Basis.MONOMIAL
    structure: str = "regular"

    def __post_init__(self):
        if self.structure not in STRUCTURES:
            raise PreconditionError(f"unknown structure flag {self.structure!r}")
        if min(self.n, self.p, self.m) < 1:
            raise PreconditionError("dimensions must be >= 1")


@dataclass(frozen=True)
class CheckEntry:
    name: str
    status: str          # "pass" | "fail" | "skipped"
    worst_residual: float
    location: complex | None = None

    def to_dict(self) -> dict:
        out = {"name": self.name, "status": self.status,
               "worstResidual": float(self.worst_residual)}
        if self.location is not None:
            out["location"] = [self.location.real, self.location.imag]
        return out


@dataclass(frozen=True)
class CheckReport:
    entries: list

    @property
    def passed(self) -> bool:
        return all(e.status != "fail" for e in self.entries)

    def to_dict(self) -> dict:
        return {"passed": self.passed,
                "checks": [e.to_dict() for e in self.entries]}

    def table(self) -> str:
        width = max(len(e.name) for e in self.entries) if self.entries else 4
        lines = [f"{'check'.ljust(width)}  status   worst residual"]
        for e in self.entries:
            lines.append(f"{e.name.ljust(width)}  {e.status:<7}  {e.worst_residual:.3e}")
        lines.append(f"overall: {'pass' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def gen_fixture(spec: FixtureSpec) -> Realization:
    """Structured random realization; deterministic in the seed.

    Coefficients are standard complex normal, then the structure flag is
    applied.  The singular flags couple B and D so the rational matrix itself
    is singular: zeroing (or linearly combining) a column of B alone would
    leave R regular and the nullspace checks vacuous.
    """
    rng = make_rng(spec.seed)
    n, p, m = spec.n, spec.p, spec.m

    def draw(g, rows, cols, basis):
        stack = rng.standard_normal((g + 1, rows, cols)) \
            + 1j * rng.standard_normal((g + 1, rows, cols))
        return PolyMatrix(stack, basis)

    for attempt in range(10):
        a = draw(spec.grade_a, n, n, spec.basis_a)
        c = draw(spec.grade_a, p, n, spec.basis_a)
        b = draw(spec.grade_d, n, m, spec.basis_d)
        d = draw(spec.grade_d, p, m, spec.basis_d)

        if spec.structure == "zero-column-b":
            if m < 2:
                raise PreconditionError("zero-column-b needs m >= 2")
            bc = b.coeffs.copy(); bc[:, :, -1] = 0.0
            dc = d.coeffs.copy(); dc[:, :, -1] = 0.0
            b = PolyMatrix(bc, spec.basis_d)
            d = PolyMatrix(dc, spec.basis_d)
        elif spec.structure == "zero-row-c":
            if p < 2:
                raise PreconditionError("zero-row-c needs p >= 2")
            cc = c.coeffs.copy(); cc[:, -1, :] = 0.0
            dc = d.coeffs.copy(); dc[:, -1, :] = 0.0
            c = PolyMatrix(cc, spec.basis_a)
            d = PolyMatrix(dc, spec.basis_d)
        elif spec.structure == "rank-deficient-d":
            if m < 2:
                raise PreconditionError("rank-deficient-d needs m >= 2")
            # last column of [B; D] = (first columns) * w(lambda), deg w = 1,
            # so [w; -1] is a polynomial right null vector of R
            w = rng.standard_normal((2, m - 1, 1)) + 1j * rng.standard_normal((2, m - 1, 1))
            bc = draw(spec.grade_d - 1, n, m - 1, spec.basis_d) if spec.grade_d >= 1 \
                else draw(0, n, m - 1, spec.basis_d)
            dc = draw(spec.grade_d - 1, p, m - 1, spec.basis_d) if spec.grade_d >= 1 \
                else draw(0, p, m - 1, spec.basis_d)
            wpoly = PolyMatrix(w, spec.basis_d)
            b = _combine_last_column(bc, wpoly, spec.grade_d)
            d = _combine_last_column(dc, wpoly, spec.grade_d)

        r = Realization(A=a, B=b, C=c, D=d)
        if r.check_state_regular(rng):
            return r
    raise RatlinError("could not draw a regular state matrix in 10 attempts")


def _combine_last_column(base: PolyMatrix, w: PolyMatrix, grade: int) -> PolyMatrix:
    from .polymat import hstack
    last = (base.to_monomial() @ w.to_monomial()).to_basis(base.basis)
    return hstack(base, last).pad_to_grade(max(grade, last.grade))


def preset_cross_coupled() -> Realization:
    """Coupled pair of scalar rational functions hung off two rank-one
    couplings, with D = I_2 lambda^2; a well-conditioned regression fixture
    whose poles are {2, -1, -2} and whose finite/infinite minimality checks
    all pass."""
    a = PolyMatrix.from_list([np.diag([-2.0, 2.0]), np.diag([-1.0, 1.0]),
                              np.diag([1.0, 0.0])])
    c = PolyMatrix.from_list([np.diag([1.0, -1.0]), np.zeros((2, 2)),
                              np.eye(2)])
    b = PolyMatrix.from_list([np.array([[0.0, 2.0], [0.0, 0.0]]),
                              np.array([[0.0, 1.0], [0.0, 0.0]]),
                              np.array([[0.0, 0.0], [1.0, 0.0]])])
    d = PolyMatrix.from_list([np.zeros((2, 2)), np.zeros((2, 2)), np.eye(2)])
    return Realization(A=a, B=b, C=c, D=d)


PRESETS = {"cross-coupled": preset_cross_coupled}


# ---------------------------------------------------------------------------
# the check battery
# ---------------------------------------------------------------------------

def run_all(r: Realization, seed: int = 0,
            tol: Tolerances = Tolerances()) -> CheckReport:
    """Execute the full identity battery against one realization."""
    rng = make_rng(seed)
    sl = build(r, rng=rng)
    entries = []
    entries.append(_check_block_factors(sl))
    entries.append(_check_dual_pairs(sl))
    entries.append(_check_rank_additivity(sl, rng, tol))
    entries.append(_check_one_sided_factorizations(sl, rng, tol))
    entries.append(_check_state_pencil_spectrum(sl, rng, tol))
    entries.append(_check_minimality_proxy(sl, rng, tol))
    entries.extend(_check_nullspaces(sl, rng, tol))
    entries.append(_check_eigenvector_recovery(sl, rng, tol))
    return CheckReport(entries)


def _entry(name, ok, worst, location=None):
    return CheckEntry(name, "pass" if ok else "fail", float(worst), location)


def _skip(name):
    return CheckEntry(name, "skipped", 0.0)


def _check_block_factors(sl: StructuredLinearization) -> CheckEntry:
    """M_X N^T == X as exact coefficient identities, all four blocks."""
    r = sl.realization
    worst = 0.0
    for mx, x, pair in ((sl.m_a, r.A, sl.pair_a), (sl.m_c, r.C, sl.pair_a),
                        (sl.m_b, r.B, sl.pair_d), (sl.m_d, r.D, sl.pair_d)):
        scale = max(1.0, float(np.max(np.abs(x.coeffs))))
        worst = max(worst, max_coeff_diff(mx @ pair.N.T, x) / scale)
    return _entry("block-factor-identities", worst <= 1e-13, worst)


def _check_dual_pairs(sl: StructuredLinearization) -> CheckEntry:
    worst = 0.0
    for pair in (sl.pair_a, sl.pair_d):
        prods = [pair.K @ pair.N.T,
                 pair.Khat @ pair.N.T - PolyMatrix.identity(pair.s),
                 pair.Khat @ pair.Nhat.T]
        if pair.d > 1:
            prods.append(pair.K @ pair.Nhat.T
                         - PolyMatrix.identity((pair.d - 1) * pair.s))
        for prod in prods:
            if prod.coeffs.size:
                worst = max(worst, float(np.max(np.abs(prod.coeffs))))
    return _entry("dual-pair-identities", worst <= 1e-13, worst)


def _check_rank_additivity(sl, rng, tol) -> CheckEntry:
    """rank L(z) == rank R(z) + n + s at random non-pole points."""
    r = sl.realization
    done = 0
    tries = 0
    ok = True
    loc = None
    while done < 5 and tries < 50:
        z = unit_circle_points(rng, 1)[0] * (1.0 + 0.11 * tries)
        tries += 1
        try:
            rv = transfer_eval(r, z, tol)
        except RatlinError:
            continue
        if np.linalg.cond(r.A.eval(z)) > 1e7:
            continue
        done += 1
        lhs = numerical_rank(sl.pencil_eval(z), tol.rank_scale)
        rhs = numerical_rank(rv, tol.rank_scale) + r.n + sl.s
        if lhs != rhs:
            ok = False
            loc = complex(z)
    return _entry("transfer-rank-additivity", ok and done == 5,
                  0.0 if ok else 1.0, loc)


def _check_one_sided_factorizations(sl, rng, tol) -> CheckEntry:
    r = sl.realization
    worst = 0.0
    loc = None
    done = 0
    tries = 0
    while done < 10 and tries < 60:
        z = unit_circle_points(rng, 1)[0] * (1.0 + 0.07 * tries)
        tries += 1
        try:
            if np.linalg.cond(r.A.eval(z)) > 1e6:
                continue
            rres, lres = factorization_residuals(sl, z, tol)
        except RatlinError:
            continue
        done += 1
        scale = _point_scale(sl, z, tol)
        val = max(rres, lres) / scale
        if val > worst:
            worst, loc = val, complex(z)
    return _entry("one-sided-factorizations", done == 10 and worst <= 1e-10,
                  worst, loc)


def _point_scale(sl, z, tol) -> float:
    from .linbuild import hat_transfer_eval
    rhat = hat_transfer_eval(sl, z, tol)
    nd = sl.pair_d.N.eval(z)
    return max(1.0, float(np.linalg.norm(rhat)) * max(1.0, float(np.linalg.norm(nd))))


def _check_state_pencil_spectrum(sl, rng, tol) -> CheckEntry:
    """Finite eigenvalues of the state pencil == roots of det A (interpolation
    oracle), matched to 1e-8."""
    la0, la1 = sl.state_pencil()
    eig = pencil_eigs(la0, la1, rng=rng, tol=tol)
    if not eig.regular:
        return _entry("state-pencil-spectrum", False, 1.0)
    det = poly_det_coeffs(sl.realization.A.to_monomial())
    roots = np.polynomial.polynomial.polyroots(det) if det.size > 1 else np.zeros(0)
    ok, worst = match_multisets(eig.finite(), roots, 1e-8)
    return _entry("state-pencil-spectrum", ok, worst)


def _check_minimality_proxy(sl, rng, tol) -> CheckEntry:
    """Pointwise minimality at 20 random points and at every computed
    eigenvalue of the state pencil and of the full pencil (where the
    classification actually relies on it), plus the reversal checks at 0."""
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
    fails = 0
    loc = None
    for z in pts:
        left, right = check_finite_minimality(r, z, tol)
        if not (left and right):
            fails += 1
            loc = complex(z)
    inf_ok = all(check_infinity_minimality(r, sl.grade_a, sl.grade_d, tol))
    return _entry("minimality-proxy", fails == 0 and inf_ok, float(fails), loc)


def cleared_matrix(r: Realization) -> PolyMatrix:
    """det(A(lambda)) * R(lambda) as a polynomial matrix.

    Computed with polynomial arithmetic throughout (adjugate and determinant
    from the Faddeev-LeVerrier recurrence), so exact zero structure in B, C
    and D survives bit for bit; trailing coefficients below roundoff scale
    are trimmed.
    """
    adj, det = poly_adjugate(r.A)
    cleared = scalar_multiply(det, r.D) \
        + (r.C.to_monomial() @ adj @ r.B.to_monomial())
    mags = np.abs(cleared.coeffs).reshape(cleared.grade + 1, -1).max(axis=1)
    top = mags.max()
    if top == 0.0:
        return PolyMatrix(cleared.coeffs[:1])
    keep = int(np.nonzero(mags > 1e-12 * top)[0][-1])
    return PolyMatrix(cleared.coeffs[: keep + 1])


SWEEP_BUDGET = 600  # pencil width x sweep depth cap for run_all


def _check_nullspaces(sl, rng, tol) -> list:
    """Index shift laws against the cleared-matrix oracle, the degree law,
    and the nullspace dimension rule; skipped for regular fixtures.

    The oracle indices come from a direct degree sweep on det(A) * R, whose
    minimal indices equal those of R and stay cheap to reach.  The matching
    pencil-level sweep costs O((index * width)^3) per degree, so a side is
    skipped (not failed) when the predicted depth would blow the runtime
    promise of this harness; the prediction uses the oracle indices.
    """
    r = sl.realization
    rank_pencil = pencil_generic_rank(sl.L0, sl.L1, rng=rng, tol=tol)
    right_nullity = sl.shape[1] - rank_pencil
    left_nullity = sl.shape[0] - rank_pencil
    if right_nullity == 0 and left_nullity == 0:
        return [_skip("right-index-shift"), _skip("left-index-match"),
                _skip("nullvector-degree-law"), _skip("nullspace-dimension")]

    entries = []
    cleared = cleared_matrix(r)
    rank_r = rational_rank(sl, rng=rng, tol=tol)

    dim_ok = (right_nullity == r.m - rank_r) and (left_nullity == r.p - rank_r)
    entries_dim = _entry("nullspace-dimension", dim_ok,
                         abs(right_nullity - (r.m - rank_r))
                         + abs(left_nullity - (r.p - rank_r)))

    if right_nullity > 0:
        oracle = polymatrix_nullspace(cleared, "right", rng=rng, tol=tol,
                                      rank=rank_r)
        depth = max(oracle.indices, default=0) + sl.rho_d + 2
        if oracle.count == 0 or depth * sl.shape[1] > SWEEP_BUDGET:
            entries.append(_skip("right-index-shift"))
            entries.append(_skip("nullvector-degree-law"))
        else:
            try:
                rec = recover_right_minimal_basis(sl, rng=rng, tol=tol)
                ok = rec.basis_r.indices == sorted(oracle.indices) \
                    and rec.diagnostics["ok"]
                entries.append(_entry(
                    "right-index-shift", ok,
                    rec.diagnostics.get("nullspace_residual", 0.0)))
            except PreconditionError:
                entries.append(_skip("right-index-shift"))
            entries.append(_degree_law(sl, rng, tol))
    else:
        entries.append(_skip("right-index-shift"))
        entries.append(_skip("nullvector-degree-law"))

    if left_nullity > 0:
        oracle = polymatrix_nullspace(cleared, "left", rng=rng, tol=tol,
                                      rank=rank_r)
        depth = max(oracle.indices, default=0) + 2
        if oracle.count == 0 or depth * sl.shape[0] > SWEEP_BUDGET:
            entries.append(_skip("left-index-match"))
        else:
            try:
                rec = recover_left_minimal_basis(sl, rng=rng, tol=tol)
                ok = rec.basis_r.indices == sorted(oracle.indices) \
                    and rec.diagnostics["ok"]
                entries.append(_entry(
                    "left-index-match", ok,
                    rec.diagnostics.get("nullspace_residual", 0.0)))
            except PreconditionError:
                entries.append(_skip("left-index-match"))
    else:
        entries.append(_skip("left-index-match"))

    entries.append(entries_dim)
    return entries


def _degree_law(sl, rng, tol) -> CheckEntry:
    """deg z == deg (lower block of z) for every swept right null vector,
    whenever the left reversal-minimality condition holds."""
    left_inf, _ = check_infinity_minimality(sl.realization, sl.grade_a,
                                            sl.grade_d, tol)
    if not left_inf:
        return _skip("nullvector-degree-law")
    basis = polynomial_nullspace(sl.L0, sl.L1, "right", rng=rng, tol=tol)
    r = sl.realization
    low = sl.shape[1] - r.m * (sl.rho_d + 1)
    ok = True
    for j, eps in enumerate(basis.indices):
        full_deg = vector_degree(basis.vectors.coeffs[:, :, j])
        lower_deg = vector_degree(basis.vectors.coeffs[:, low:, j])
        if full_deg != eps or lower_deg != eps:
            ok = False
    return _entry("nullvector-degree-law", ok, 0.0 if ok else 1.0)


def _check_eigenvector_recovery(sl, rng, tol) -> CheckEntry:
    r = sl.realization
    if r.p != r.m:
        return _skip("eigenvector-recovery")
    try:
        report = classify(sl, rng=rng, tol=tol)
    except PreconditionError:
        return _skip("eigenvector-recovery")
    pole_vals = [v for v, _ in report.poles]
    worst = 0.0
    loc = None
    used = 0
    for entry in report.zeros:
        if not entry.classified or entry.near_pole:
            continue
        try:
            ep = eigenpair(sl, entry.value, tol)
        except RatlinError:
            return _entry("eigenvector-recovery", False, 1.0, entry.value)
        used += 1
        val = max(ep.residual_right, ep.residual_left)
        if val > worst:
            worst, loc = val, entry.value
    if used == 0:
        return _skip("eigenvector-recovery")
    return _entry("eigenvector-recovery", worst <= tol.residual, worst, loc)
