"""Scalar rational equations c(lambda)/a(lambda) = d(lambda)/b(lambda).

a and c are monomial polynomials of a common grade, b and d first-kind
Chebyshev polynomials of a common grade.  The equation is solved through the
structured linearization of the realization (A, B, C, D) = (a, b, -c, d),
whose transfer function is r(lambda) = d - c a^{-1} b; the sign convention
C = -c keeps the transfer function equal to the residual function r, and it
makes the assembled (3,1) block of the pencil equal +M_c.  Roots of b are
filtered out as poles of the right-hand side.
"""

from dataclasses import dataclass

import numpy as np

from .config import Tolerances, make_rng
from .errors import PreconditionError
from .eigsolve import classify
from .linbuild import Realization, build
from .polymat import Basis, NEG_INF, PolyMatrix


@dataclass(frozen=True)
class ScalarEquation:
    """The four scalar polynomials, padded to their side-wise common grades."""

    a: PolyMatrix
    c: PolyMatrix
    b: PolyMatrix
    d: PolyMatrix

    def __post_init__(self):
        for name in ("a", "c", "b", "d"):
            poly = getattr(self, name)
            if poly.shape != (1, 1):
                raise PreconditionError(f"{name} must be a 1x1 polynomial")
        if self.a.basis is not Basis.MONOMIAL or self.c.basis is not Basis.MONOMIAL:
            raise PreconditionError("a and c must be in the monomial basis")
        if self.b.basis is not Basis.CHEBYSHEV1 or self.d.basis is not Basis.CHEBYSHEV1:
            raise PreconditionError("b and d must be in the Chebyshev basis")
        if self.a.is_zero() or self.b.is_zero():
            raise PreconditionError("denominators a and b must be nonzero")
        n = int(max(1, _deg(self.a), _deg(self.c)))
        m = int(max(1, _deg(self.b), _deg(self.d)))
        object.__setattr__(self, "a", self.a.pad_to_grade(n))
        object.__setattr__(self, "c", self.c.pad_to_grade(n))
        object.__setattr__(self, "b", self.b.pad_to_grade(m))
        object.__setattr__(self, "d", self.d.pad_to_grade(m))

    @property
    def grade_left(self) -> int:
        return self.a.grade

    @property
    def grade_right(self) -> int:
        return self.b.grade

    @staticmethod
    def from_lists(a, c, b, d) -> "ScalarEquation":
        return ScalarEquation(
            a=PolyMatrix.from_scalar_coeffs(a, Basis.MONOMIAL),
            c=PolyMatrix.from_scalar_coeffs(c, Basis.MONOMIAL),
            b=PolyMatrix.from_scalar_coeffs(b, Basis.CHEBYSHEV1),
            d=PolyMatrix.from_scalar_coeffs(d, Basis.CHEBYSHEV1))


def _deg(p: PolyMatrix) -> float:
    deg = p.degree()
    return 0.0 if deg == NEG_INF else float(deg)


@dataclass(frozen=True)
class RootReport:
    roots: list       # (value, cleared-form residual) pairs
    excluded: list    # values filtered out as poles

    def to_dict(self) -> dict:
        return {
            "roots": [{"lambda": [v.real, v.imag], "residual": float(res)}
                      for v, res in self.roots],
            "excluded": [[v.real, v.imag] for v in self.excluded],
        }


def poly_roots(p: PolyMatrix) -> np.ndarray:
    """Roots of a scalar polynomial via the companion matrix of its
    monomial coefficients; empty for (near-)constant polynomials."""
    coeffs = p.to_monomial().coeffs.ravel()
    mags = np.abs(coeffs)
    top = mags.max()
    if top == 0.0:
        return np.zeros(0, dtype=complex)
    last = int(np.nonzero(mags > 1e-12 * top)[0][-1])
    if last == 0:
        return np.zeros(0, dtype=complex)
    return np.asarray(np.polynomial.polynomial.polyroots(coeffs[: last + 1]),
                      dtype=complex)


def irreducibility_check(a: PolyMatrix, c: PolyMatrix,
                         tol: Tolerances = Tolerances()) -> bool:
    """True iff a and c share no root within the clustering tolerance."""
    ra = poly_roots(a)
    rc = poly_roots(c)
    for x in ra:
        if np.any(np.abs(rc - x) <= tol.match * max(1.0, abs(x))):
            return False
    return True


def cleared_form(eq: ScalarEquation) -> PolyMatrix:
    """The polynomial c*b - a*d in the monomial basis."""
    cb = eq.c @ eq.b.to_monomial()
    ad = eq.a @ eq.d.to_monomial()
    return cb - ad


def cleared_residual(eq: ScalarEquation, lam: complex) -> tuple:
    """|c b - a d| at a point together with its coefficient-sum scale."""
    val = abs(complex((cleared_form(eq).eval(lam))[0, 0]))
    total = sum(float(np.sum(np.abs(p.coeffs))) for p in (eq.a, eq.b, eq.c, eq.d))
    scale = total * max(1.0, abs(lam)) ** (eq.grade_left + eq.grade_right)
    return val, scale


def solve_scalar(eq: ScalarEquation, rng=None,
                 tol: Tolerances = Tolerances()) -> RootReport:
    """All solutions of c/a = d/b that are not poles of either side.

    The classified zeros of the structured linearization are the roots of
    the cleared polynomial; those matching a root of b are excluded.
    """
    rng = make_rng(rng)
    if not irreducibility_check(eq.a, eq.c, tol):
        raise PreconditionError("c/a is not irreducible: a and c share a root")

    resfun = cleared_form(eq)
    probe = np.exp(2j * np.pi * rng.uniform(size=20)) * 1.07
    if all(abs(resfun.eval(z)[0, 0]) <= 1e-12 * _coeff_scale(eq) for z in probe):
        raise PreconditionError(
            "the equation holds identically (r == 0); no discrete root set")

    realiz = Realization(A=eq.a, B=eq.b, C=-eq.c, D=eq.d)
    sl = build(realiz, grade_a=eq.grade_left, grade_d=eq.grade_right, rng=rng)
    report = classify(sl, rng=rng, tol=tol)

    b_roots = poly_roots(eq.b)
    roots = []
    excluded = []
    for entry in report.zeros:
        if not entry.classified:
            continue
        lam = entry.value
        if b_roots.size and np.min(np.abs(b_roots - lam)) <= tol.match * max(1.0, abs(lam)):
            excluded.append(lam)
            continue
        val, scale = cleared_residual(eq, lam)
        roots.append((lam, val / scale))
    return RootReport(roots=roots, excluded=excluded)


def _coeff_scale(eq: ScalarEquation) -> float:
    return max(1.0, sum(float(np.sum(np.abs(p.coeffs)))
                        for p in (eq.a, eq.b, eq.c, eq.d)))
