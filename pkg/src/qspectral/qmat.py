"""Dense quaternionic matrices as right-linear operators on H^n.

Vectors are columns, operators act on the left and scalars on the right.
Kernels and ranks have two routes: exact quaternionic row reduction (always
available, components are rational) and a floating route through the complex
adjoint embedding ``chi``.  The chi block convention is fixed: an entry
q = z1 + z2*j maps to [[z1, z2], [-conj(z2), conj(z1)]].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatchError, DomainError, RankDeficiencyError
from .quat import ONE, ZERO, Quaternion, Real, _frac

RANK_TOL = 1e-9          # relative rank tolerance for the floating route
MEMBERSHIP_TOL = 1e-8    # relative min-singular-value spectral membership test


@dataclass(frozen=True)
class QVector:
    entries: tuple[Quaternion, ...]

    def __init__(self, entries: Iterable[Quaternion | Real]):
        object.__setattr__(
            self, "entries",
            tuple(e if isinstance(e, Quaternion) else Quaternion(e) for e in entries))

    @property
    def length(self) -> int:
        return len(self.entries)

    def __getitem__(self, k: int) -> Quaternion:
        return self.entries[k]

    def __add__(self, other: "QVector") -> "QVector":
        self._check(other)
        return QVector(a + b for a, b in zip(self.entries, other.entries))

    def __sub__(self, other: "QVector") -> "QVector":
        self._check(other)
        return QVector(a - b for a, b in zip(self.entries, other.entries))

    def right_mul(self, q: Quaternion | Real) -> "QVector":
        """phi * q: scalars act on the right."""
        return QVector(e * q for e in self.entries)

    def inner(self, other: "QVector") -> Quaternion:
        """<self|other> = sum_k conj(self_k) other_k."""
        self._check(other)
        acc = ZERO
        for a, b in zip(self.entries, other.entries):
            acc = acc + a.conj() * b
        return acc

    def norm_sq(self) -> Fraction:
        return self.inner(self).q0

    def norm(self) -> float:
        return math.sqrt(float(self.norm_sq()))

    def is_zero(self) -> bool:
        return all(e.is_zero() for e in self.entries)

    def _check(self, other: "QVector") -> None:
        if self.length != other.length:
            raise DimensionMismatchError(
                f"vector lengths {self.length} != {other.length}")

    def to_list(self) -> list[list[float]]:
        return [e.to_list() for e in self.entries]

    def __repr__(self) -> str:
        return f"QVector({list(self.entries)!r})"


def basis_vector(n: int, k: int) -> QVector:
    return QVector([ONE if i == k else ZERO for i in range(n)])


@dataclass(frozen=True)
class QMatrix:
    entries: tuple[tuple[Quaternion, ...], ...]

    def __init__(self, rows: Iterable[Iterable[Quaternion | Real]]):
        grid = tuple(
            tuple(e if isinstance(e, Quaternion) else Quaternion(e) for e in row)
            for row in rows)
        if not grid or not grid[0]:
            raise DomainError("matrix must be non-empty")
        width = len(grid[0])
        if any(len(r) != width for r in grid):
            raise DomainError("ragged matrix literal")
        object.__setattr__(self, "entries", grid)

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    def __getitem__(self, ij: tuple[int, int]) -> Quaternion:
        return self.entries[ij[0]][ij[1]]

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls([[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "QMatrix":
        cols = rows if cols is None else cols
        return cls([[ZERO] * cols for _ in range(rows)])

    def __add__(self, other: "QMatrix") -> "QMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatchError("matrix shapes differ")
        return QMatrix([[a + b for a, b in zip(ra, rb)]
                        for ra, rb in zip(self.entries, other.entries)])

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatchError("matrix shapes differ")
        return QMatrix([[a - b for a, b in zip(ra, rb)]
                        for ra, rb in zip(self.entries, other.entries)])

    def scale_real(self, r: Real) -> "QMatrix":
        """Entrywise multiplication by a real scalar (side-independent)."""
        r = _frac(r)
        return QMatrix([[e * r for e in row] for row in self.entries])

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        return matmul(self, other)

    def apply(self, v: QVector) -> QVector:
        if v.length != self.cols:
            raise DimensionMismatchError(
                f"operator of width {self.cols} applied to length-{v.length} vector")
        out = []
        for row in self.entries:
            acc = ZERO
            for a, x in zip(row, v.entries):
                acc = acc + a * x
            out.append(acc)
        return QVector(out)

    def columns(self) -> list[QVector]:
        return [QVector([self.entries[i][j] for i in range(self.rows)])
                for j in range(self.cols)]

    def is_complex(self) -> bool:
        return all(e.is_complex() for row in self.entries for e in row)

    def norm2(self) -> float:
        """Operator 2-norm, defined through chi."""
        return float(np.linalg.norm(chi(self), 2))

    def to_nested_list(self) -> list[list[list[float]]]:
        return [[e.to_list() for e in row] for row in self.entries]

    def __repr__(self) -> str:
        return f"QMatrix({[list(r) for r in self.entries]!r})"


def matmul(a: QMatrix, b: QMatrix) -> QMatrix:
    """(AB)_ij = sum_k A_ik B_kj with quaternion products in this order."""
    if a.cols != b.rows:
        raise DimensionMismatchError(
            f"inner dimensions {a.cols} != {b.rows}")
    out = []
    for i in range(a.rows):
        row = []
        for j in range(b.cols):
            acc = ZERO
            for k in range(a.cols):
                acc = acc + a.entries[i][k] * b.entries[k][j]
            row.append(acc)
        out.append(row)
    return QMatrix(out)


def adjoint(a: QMatrix) -> QMatrix:
    """(A^dag)_ij = conj(A_ji)."""
    return QMatrix([[a.entries[j][i].conj() for j in range(a.rows)]
                    for i in range(a.cols)])


def chi(a: QMatrix) -> np.ndarray:
    """Complex adjoint embedding: 2r x 2c complex matrix.

    Entry q = z1 + z2*j becomes the block [[z1, z2], [-conj(z2), conj(z1)]];
    chi(AB) = chi(A) chi(B) and chi(A^dag) = chi(A)^H.
    """
    out = np.zeros((2 * a.rows, 2 * a.cols), dtype=complex)
    for i in range(a.rows):
        for j in range(a.cols):
            z1, z2 = a.entries[i][j].to_complex_pair()
            out[2 * i, 2 * j] = z1
            out[2 * i, 2 * j + 1] = z2
            out[2 * i + 1, 2 * j] = -z2.conjugate()
            out[2 * i + 1, 2 * j + 1] = z1.conjugate()
    return out


def _rref(a: QMatrix) -> tuple[list[list[Quaternion]], list[int]]:
    """Exact reduced row echelon form over H (left row operations)."""
    m = [list(row) for row in a.entries]
    rows, cols = a.rows, a.cols
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if not m[i][c].is_zero()), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = m[r][c].inverse()
        m[r] = [inv * e for e in m[r]]
        for i in range(rows):
            if i != r and not m[i][c].is_zero():
                f = m[i][c]
                m[i] = [ei - f * ej for ei, ej in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def kernel_basis(a: QMatrix) -> list[QVector]:
    """Right-H-module basis of ker(A), exact."""
    m, pivots = _rref(a)
    free = [c for c in range(a.cols) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * a.cols
        v[f] = ONE
        for r, pc in enumerate(pivots):
            v[pc] = -m[r][f]
        basis.append(QVector(v))
    return basis


def rank(a: QMatrix) -> int:
    """dim_H ran(A) = cols - dim_H ker(A), exact."""
    _, pivots = _rref(a)
    return len(pivots)


def rank_numeric(a: QMatrix, tol: float = RANK_TOL) -> int:
    """Floating route: rank(chi(A))/2 with a relative singular-value cutoff."""
    sv = np.linalg.svd(chi(a), compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    # scale floored at 1 so a uniformly tiny matrix reads as rank zero
    return int(np.sum(sv > tol * max(sv[0], 1.0))) // 2


def kernel_dim_numeric(a: QMatrix, tol: float = MEMBERSHIP_TOL) -> int:
    """dim_H ker(A) from the singular values of chi(A)."""
    sv = np.linalg.svd(chi(a), compute_uv=False)
    if sv.size == 0:
        return 0
    top = sv[0]
    if top == 0.0:
        return a.cols
    # scale floored at 1: near an eigensphere the whole pseudo-resolvent of
    # a small matrix can be uniformly tiny, which is a kernel, not noise
    return int(np.sum(sv <= tol * max(top, 1.0))) // 2


@dataclass(frozen=True)
class HilbertBasis:
    vectors: tuple[QVector, ...]

    def __init__(self, vectors: Sequence[QVector]):
        object.__setattr__(self, "vectors", tuple(vectors))

    @property
    def dimension(self) -> int:
        return len(self.vectors)

    def __getitem__(self, k: int) -> QVector:
        return self.vectors[k]

    @classmethod
    def canonical(cls, n: int) -> "HilbertBasis":
        return cls([basis_vector(n, k) for k in range(n)])

    def decompose(self, phi: QVector) -> list[Quaternion]:
        """Coefficients of phi = sum_k phi_k <phi_k|phi>."""
        return [v.inner(phi) for v in self.vectors]


def gram_schmidt(vectors: Sequence[QVector]) -> HilbertBasis:
    """Orthonormalize with coefficients applied on the right.

    Raises RankDeficiencyError when the input is right-H-linearly dependent.
    """
    if not vectors:
        raise RankDeficiencyError("empty input")
    out: list[QVector] = []
    for v in vectors:
        w = v
        for e in out:
            w = w - e.right_mul(e.inner(w))
        nsq = float(w.norm_sq())
        if nsq <= 1e-24:
            raise RankDeficiencyError("right-linearly dependent input vectors")
        # exact when the norm-squared is a perfect rational square
        exact = w.norm_sq()
        root_num = math.isqrt(exact.numerator)
        root_den = math.isqrt(exact.denominator)
        if root_num * root_num == exact.numerator and root_den * root_den == exact.denominator:
            inv_norm: Real = Fraction(root_den, root_num)
        else:
            inv_norm = Fraction(1.0 / math.sqrt(nsq))
        out.append(w.right_mul(inv_norm))
    return HilbertBasis(out)


def finite_rank_op(pairs: Sequence[tuple[QVector, QVector]],
                   dim: int | None = None) -> QMatrix:
    """The operator phi -> sum_j psi_j <phi_j|phi>.

    ``dim`` is required for an empty pair list (zero operator).
    """
    if not pairs:
        if dim is None:
            raise DomainError("dim required for an empty pair list")
        return QMatrix.zeros(dim)
    n = pairs[0][0].length
    for psi, phi in pairs:
        if psi.length != n or phi.length != n:
            raise DimensionMismatchError("all vectors must have matching length")
    grid = [[ZERO] * n for _ in range(n)]
    for psi, phi in pairs:
        for i in range(n):
            for j in range(n):
                grid[i][j] = grid[i][j] + psi[i] * phi[j].conj()
    return QMatrix(grid)


def from_nested_list(data) -> QMatrix:
    """Parse a nested-array matrix literal of quaternion 4-arrays."""
    from .quat import from_list as quat_from_list
    try:
        return QMatrix([[quat_from_list(e) for e in row] for row in data])
    except (TypeError, ValueError) as exc:
        raise DomainError(f"bad matrix literal: {exc}") from exc
