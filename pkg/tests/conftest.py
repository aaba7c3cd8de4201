import numpy as np
import pytest

from ratlin.polymat import Basis, PolyMatrix
from ratlin.linbuild import Realization
from ratlin.verify import preset_cross_coupled


@pytest.fixture
def preset() -> Realization:
    return preset_cross_coupled()


def random_polymatrix(rng, grade, rows, cols, basis=Basis.MONOMIAL) -> PolyMatrix:
    stack = rng.standard_normal((grade + 1, rows, cols)) \
        + 1j * rng.standard_normal((grade + 1, rows, cols))
    return PolyMatrix(stack, basis)


def random_realization(seed, n=2, p=2, m=2, grade_a=2, grade_d=2,
                       basis_a=Basis.MONOMIAL, basis_d=Basis.MONOMIAL) -> Realization:
    rng = np.random.default_rng(seed)
    return Realization(
        A=random_polymatrix(rng, grade_a, n, n, basis_a),
        B=random_polymatrix(rng, grade_d, n, m, basis_d),
        C=random_polymatrix(rng, grade_a, p, n, basis_a),
        D=random_polymatrix(rng, grade_d, p, m, basis_d))
