"""Basis-induced left scalar multiplication on vectors and operators.

The left product is the extremely non-canonical operation
q*phi = sum_k phi_k q <phi_k|phi> attached to a preferred Hilbert basis;
with the canonical basis it reduces to componentwise left multiplication.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError
from .qmat import HilbertBasis, QMatrix, QVector, adjoint, basis_vector, chi
from .quat import Quaternion


@dataclass(frozen=True)
class LeftMultStructure:
    basis: HilbertBasis

    @classmethod
    def canonical(cls, n: int) -> "LeftMultStructure":
        return cls(HilbertBasis.canonical(n))

    @property
    def dimension(self) -> int:
        return self.basis.dimension


def left_scalar_vec(struct: LeftMultStructure, q: Quaternion, phi: QVector) -> QVector:
    """q*phi = sum_k phi_k (q <phi_k|phi>)."""
    if phi.length != struct.dimension:
        raise DimensionMismatchError(
            f"vector length {phi.length} != basis dimension {struct.dimension}")
    out = QVector([0] * phi.length)
    for bk in struct.basis.vectors:
        out = out + bk.right_mul(q * bk.inner(phi))
    return out


def left_scalar_op(struct: LeftMultStructure, q: Quaternion, a: QMatrix) -> QMatrix:
    """Matrix of the right-linear map phi -> q (A phi) in standard coordinates."""
    if a.rows != struct.dimension:
        raise DimensionMismatchError("operator rows != basis dimension")
    cols = []
    for j in range(a.cols):
        col = left_scalar_vec(struct, q, a.apply(basis_vector(a.cols, j)))
        cols.append(col)
    return _from_columns(cols)


def right_scalar_op(struct: LeftMultStructure, a: QMatrix, q: Quaternion) -> QMatrix:
    """Matrix of phi -> A (q phi)."""
    if a.cols != struct.dimension:
        raise DimensionMismatchError("operator cols != basis dimension")
    cols = []
    for j in range(a.cols):
        col = a.apply(left_scalar_vec(struct, q, basis_vector(a.cols, j)))
        cols.append(col)
    return _from_columns(cols)


def adjoint_identities_check(struct: LeftMultStructure, q: Quaternion, a: QMatrix,
                             tol: float = 1e-10) -> bool:
    """(qA)^dag == A^dag conj(q)  and  (Aq)^dag == conj(q) A^dag, to tolerance."""
    lhs1 = adjoint(left_scalar_op(struct, q, a))
    rhs1 = right_scalar_op(struct, adjoint(a), q.conj())
    lhs2 = adjoint(right_scalar_op(struct, a, q))
    rhs2 = left_scalar_op(struct, q.conj(), adjoint(a))
    return (_max_dev(lhs1, rhs1) <= tol) and (_max_dev(lhs2, rhs2) <= tol)


def _from_columns(cols: list[QVector]) -> QMatrix:
    n = cols[0].length
    return QMatrix([[cols[j][i] for j in range(len(cols))] for i in range(n)])


def _max_dev(a: QMatrix, b: QMatrix) -> float:
    return float(np.max(np.abs(chi(a) - chi(b))))
