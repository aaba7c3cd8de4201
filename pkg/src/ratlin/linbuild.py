"""Assembly of the structured linear polynomial system matrix.

Given a realization R(lambda) = D + C A^{-1} B with polynomial blocks, the
builder produces the constant pencil pair (L0, L1) whose block template is

    [ M_A   M_B ]
    [ K_A    0  ]
    [-M_C   M_D ]
    [  0    K_D ]

together with the dual-basis pairs and full block-partition metadata.  The
state pencil L_A = [M_A; K_A] occupies the leading n(1+rho_A) rows/columns.
"""

from dataclasses import dataclass

import numpy as np

from .config import Tolerances, make_rng, unit_circle_points
from .dualbases import DualBasisPair, pair_for
from .errors import BasisError, DimensionError, PoleError, PreconditionError
from .polymat import NEG_INF, Basis, PolyMatrix, numerical_rank


@dataclass(frozen=True)
class Realization:
    """Quadruple (A, B, C, D) with regular n x n state matrix A.

    A and C must share one basis, B and D the other (the two sides may
    differ).  The represented rational matrix is D + C A^{-1} B.
    """

    A: PolyMatrix
    B: PolyMatrix
    C: PolyMatrix
    D: PolyMatrix

    def __post_init__(self):
        n, p, m = self.n, self.p, self.m
        if n < 1:
            raise PreconditionError("state dimension must be >= 1")
        if self.A.shape != (n, n) or self.B.shape != (n, m) \
                or self.C.shape != (p, n) or self.D.shape != (p, m):
            raise DimensionError(
                f"inconsistent block shapes A{self.A.shape} B{self.B.shape} "
                f"C{self.C.shape} D{self.D.shape}")
        if self.A.basis is not self.C.basis:
            raise BasisError("A and C must share a basis")
        if self.B.basis is not self.D.basis:
            raise BasisError("B and D must share a basis")

    @property
    def n(self) -> int:
        return self.A.rows

    @property
    def p(self) -> int:
        return self.C.rows

    @property
    def m(self) -> int:
        return self.B.cols

    def check_state_regular(self, rng=None) -> bool:
        """Probabilistic certificate: A invertible at a seeded random point."""
        z = unit_circle_points(make_rng(rng), 1)[0]
        av = self.A.eval(z)
        return numerical_rank(av) == self.n

    def grade_sides(self) -> tuple:
        """Default grades (d_A, d_D) = max(1, deg) over each side's blocks."""
        da = int(max(1.0, _deg(self.A), _deg(self.C)))
        dd = int(max(1.0, _deg(self.D), _deg(self.B)))
        return da, dd

    def to_dict(self) -> dict:
        return {"A": self.A.to_dict(), "B": self.B.to_dict(),
                "C": self.C.to_dict(), "D": self.D.to_dict()}

    @staticmethod
    def from_dict(obj: dict) -> "Realization":
        return Realization(
            A=PolyMatrix.from_dict(obj["A"]), B=PolyMatrix.from_dict(obj["B"]),
            C=PolyMatrix.from_dict(obj["C"]), D=PolyMatrix.from_dict(obj["D"]))


def _deg(p: PolyMatrix) -> float:
    d = p.degree()
    return d if d != NEG_INF else 0.0


@dataclass(frozen=True)
class StructuredLinearization:
    """Constant pencil L(lambda) = L1 lambda + L0 with block metadata."""

    L0: np.ndarray
    L1: np.ndarray
    grade_a: int
    grade_d: int
    blocks: dict
    pair_a: DualBasisPair
    pair_d: DualBasisPair
    realization: Realization
    m_a: PolyMatrix
    m_b: PolyMatrix
    m_c: PolyMatrix  # stored unsigned; the assembled (3,1) block is -M_C
    m_d: PolyMatrix

    def __post_init__(self):
        for name in ("L0", "L1"):
            arr = np.array(getattr(self, name), dtype=complex)  # private copy
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def rho_a(self) -> int:
        return self.grade_a - 1

    @property
    def rho_d(self) -> int:
        return self.grade_d - 1

    @property
    def s(self) -> int:
        """Padding size n*rho_A + m*rho_D."""
        r = self.realization
        return r.n * self.rho_a + r.m * self.rho_d

    @property
    def shape(self) -> tuple:
        return self.L0.shape

    def pencil_eval(self, lam: complex) -> np.ndarray:
        return self.L1 * complex(lam) + self.L0

    def state_pencil(self) -> tuple:
        """(L0, L1) of the state block L_A = [M_A; K_A]."""
        r0, r1, c0, c1 = self.blocks["L_A"]
        return self.L0[r0:r1, c0:c1], self.L1[r0:r1, c0:c1]

    def block(self, name: str, which: int = 0) -> np.ndarray:
        r0, r1, c0, c1 = self.blocks[name]
        src = self.L0 if which == 0 else self.L1
        return src[r0:r1, c0:c1]

    def to_dict(self) -> dict:
        def mat(a):
            return [[[float(v.real), float(v.imag)] for v in row] for row in a]
        return {
            "L0": mat(self.L0),
            "L1": mat(self.L1),
            "blocks": {k: list(v) for k, v in self.blocks.items()},
            "rhoA": self.rho_a,
            "rhoD": self.rho_d,
        }


@dataclass(frozen=True)
class MinimalityReport:
    """Pointwise and at-infinity minimality results for one realization.

    finite_ok_at maps each requested point to the (left, right) rank tests;
    infinity_ok holds the reversal tests at 0; grades records (d_A, d_D).
    """

    finite_ok_at: dict
    infinity_ok: tuple
    grades: tuple

    @property
    def all_ok(self) -> bool:
        return all(l and r for l, r in self.finite_ok_at.values()) \
            and all(self.infinity_ok)

    def to_dict(self) -> dict:
        return {
            "finite": [{"lambda": [z.real, z.imag],
                        "left": bool(l), "right": bool(r)}
                       for z, (l, r) in self.finite_ok_at.items()],
            "infinity": [bool(v) for v in self.infinity_ok],
            "grades": list(self.grades),
        }


def minimality_report(r: Realization, points, grade_a: int | None = None,
                      grade_d: int | None = None,
                      tol: Tolerances = Tolerances()) -> MinimalityReport:
    """Run the finite checks at every requested point plus the reversal
    checks at 0, and bundle the results."""
    da0, dd0 = r.grade_sides()
    da = max(da0, grade_a or 0)
    dd = max(dd0, grade_d or 0)
    finite = {complex(z): check_finite_minimality(r, z, tol) for z in points}
    inf_ok = check_infinity_minimality(r, da, dd, tol)
    return MinimalityReport(finite_ok_at=finite, infinity_ok=inf_ok,
                            grades=(da, dd))


def row_pencil(p: PolyMatrix, d: int, pair: DualBasisPair) -> PolyMatrix:
    """Linear M_P with M_P(lambda) N(lambda)^T = P(lambda), N from the pair.

    Monomial rule: [P_d l + P_{d-1}, P_{d-2}, ..., P_0] over the padded
    coefficients, except that a matrix of degree exactly d-1 >= 1 is packed
    as [0, P_{d-1} l + P_{d-2}, P_{d-3}, ..., P_0] (leading zero block).
    Chebyshev rule (d >= 2): [2 P_d l + P_{d-1}, P_{d-2} - P_d, P_{d-3}, ..., P_0].
    """
    if p.basis is not pair.basis:
        raise BasisError("row_pencil: matrix and pair bases differ")
    deg = p.degree()
    if d < max(1, 0 if deg == NEG_INF else int(deg)):
        raise DimensionError(f"target grade {d} below degree {deg}")
    if pair.d != d or pair.s != p.cols:
        raise DimensionError("pair does not match the requested grade/block size")

    q = p.with_grade(d)
    rows, cols = p.rows, p.cols
    m0 = np.zeros((rows, d * cols), dtype=complex)
    m1 = np.zeros_like(m0)

    if d == 1:
        m1[:, :cols] = q.coeff(1)
        m0[:, :cols] = q.coeff(0)
        return PolyMatrix(np.stack([m0, m1]), p.basis)

    if p.basis is Basis.MONOMIAL:
        if deg == d - 1 and deg >= 1:
            m1[:, cols:2 * cols] = q.coeff(d - 1)
            m0[:, cols:2 * cols] = q.coeff(d - 2)
            for j in range(3, d + 1):
                m0[:, (j - 1) * cols:j * cols] = q.coeff(d - j)
        else:
            m1[:, :cols] = q.coeff(d)
            m0[:, :cols] = q.coeff(d - 1)
            for j in range(2, d + 1):
                m0[:, (j - 1) * cols:j * cols] = q.coeff(d - j)
    else:
        m1[:, :cols] = 2.0 * q.coeff(d)
        m0[:, :cols] = q.coeff(d - 1)
        m0[:, cols:2 * cols] = q.coeff(d - 2) - q.coeff(d)
        for j in range(3, d + 1):
            m0[:, (j - 1) * cols:j * cols] = q.coeff(d - j)
    return PolyMatrix(np.stack([m0, m1]), p.basis)


def build(r: Realization, grade_a: int | None = None,
          grade_d: int | None = None, rng=None) -> StructuredLinearization:
    """Assemble the structured pencil; grades may only be overridden upward."""
    if not r.check_state_regular(rng):
        raise PreconditionError("state matrix appears singular (rank test failed)")
    da0, dd0 = r.grade_sides()
    da = max(da0, grade_a or 0)
    dd = max(dd0, grade_d or 0)
    n, p, m = r.n, r.p, r.m

    pair_a = pair_for(r.A.basis, n, da)
    pair_d = pair_for(r.D.basis, m, dd)

    m_a = row_pencil(r.A, da, pair_a)
    m_c = row_pencil(r.C, da, pair_a)
    m_b = row_pencil(r.B, dd, pair_d)
    m_d = row_pencil(r.D, dd, pair_d)

    rows = n * da + p + m * (dd - 1)
    cols = n * da + m * dd
    stack = np.zeros((2, rows, cols), dtype=complex)
    ca = n * da  # column split between the two sides

    for k in range(2):
        stack[k, :n, :ca] = m_a.coeff(k)
        stack[k, n:ca, :ca] = pair_a.K.coeff(k)
        stack[k, :n, ca:] = m_b.coeff(k)
        stack[k, ca:ca + p, :ca] = -m_c.coeff(k)
        stack[k, ca:ca + p, ca:] = m_d.coeff(k)
        stack[k, ca + p:, ca:] = pair_d.K.coeff(k)

    blocks = {
        "M_A": (0, n, 0, ca),
        "K_A": (n, ca, 0, ca),
        "M_B": (0, n, ca, cols),
        "M_C": (ca, ca + p, 0, ca),
        "M_D": (ca, ca + p, ca, cols),
        "K_D": (ca + p, rows, ca, cols),
        "L_A": (0, ca, 0, ca),
    }
    return StructuredLinearization(
        L0=stack[0], L1=stack[1], grade_a=da, grade_d=dd, blocks=blocks,
        pair_a=pair_a, pair_d=pair_d, realization=r,
        m_a=m_a, m_b=m_b, m_c=m_c, m_d=m_d)


def block_pencil(p: PolyMatrix, d: int | None = None) -> tuple:
    """Degenerate pencil [M_P; K] that linearizes a plain polynomial matrix.

    Returns (L0, L1, pair).  Right minimal indices of the pencil exceed those
    of P by d-1; left minimal indices agree.
    """
    deg = p.degree()
    d = d or int(max(1.0, 0.0 if deg == NEG_INF else deg))
    pair = pair_for(p.basis, p.cols, d)
    m_p = row_pencil(p, d, pair)
    k = pair.K
    rows = p.rows + k.rows
    stack = np.zeros((2, rows, d * p.cols), dtype=complex)
    for kk in range(2):
        stack[kk, :p.rows, :] = m_p.coeff(kk)
        stack[kk, p.rows:, :] = k.coeff(kk)
    return stack[0], stack[1], pair


def check_finite_minimality(r: Realization, lam: complex,
                            tol: Tolerances = Tolerances()) -> tuple:
    """(rank [A; C](lam) == n, rank [A, B](lam) == n)."""
    av = r.A.eval(lam)
    left = numerical_rank(np.vstack([av, r.C.eval(lam)]), tol.rank_scale) == r.n
    right = numerical_rank(np.hstack([av, r.B.eval(lam)]), tol.rank_scale) == r.n
    return left, right


def check_infinity_minimality(r: Realization, grade_a: int | None = None,
                              grade_d: int | None = None,
                              tol: Tolerances = Tolerances()) -> tuple:
    """Rank tests on the reversed blocks at 0, with the build grades."""
    da0, dd0 = r.grade_sides()
    da = max(da0, grade_a or 0)
    dd = max(dd0, grade_d or 0)
    a0 = r.A.reversal(da).eval(0.0)
    c0 = r.C.reversal(da).eval(0.0)
    b0 = r.B.reversal(dd).eval(0.0)
    left = numerical_rank(np.vstack([a0, c0]), tol.rank_scale) == r.n
    right = numerical_rank(np.hstack([a0, b0]), tol.rank_scale) == r.n
    return left, right


def transfer_eval(r: Realization, lam: complex,
                  tol: Tolerances = Tolerances()) -> np.ndarray:
    """D(lam) + C(lam) A(lam)^{-1} B(lam) via a linear solve."""
    av = r.A.eval(lam)
    _require_invertible(av, lam, tol)
    return r.D.eval(lam) + r.C.eval(lam) @ np.linalg.solve(av, r.B.eval(lam))


def hat_transfer_eval(sl: StructuredLinearization, lam: complex,
                      tol: Tolerances = Tolerances()) -> np.ndarray:
    """Transfer function of the structured pencil at a point:
    [M_D + C A^{-1} M_B; K_D](lam), of shape (p + rho_D m) x m(1 + rho_D)."""
    r = sl.realization
    av = r.A.eval(lam)
    _require_invertible(av, lam, tol)
    top = sl.m_d.eval(lam) + r.C.eval(lam) @ np.linalg.solve(av, sl.m_b.eval(lam))
    return np.vstack([top, sl.pair_d.K.eval(lam)])


def _require_invertible(av: np.ndarray, lam, tol: Tolerances):
    sv = np.linalg.svd(av, compute_uv=False)
    n = av.shape[0]
    if sv.size == 0 or sv[-1] <= n * np.finfo(float).eps * max(sv[0], 1.0) * tol.rank_scale:
        raise PoleError(
            f"state matrix singular at lambda={lam}: pole or state eigenvalue; "
            "use reversal/limit-based routines instead")
