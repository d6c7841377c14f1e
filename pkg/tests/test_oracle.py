"""Truncation and recurrence oracle: verdicts frozen on anchor points."""

from fractions import Fraction

import pytest

from qspectral.errors import DimensionMismatchError, DomainError
from qspectral.opmodel import (BACKWARD, ConstantFamily, GeometricFamily,
                               Membership, ShiftTail, StructuredOperator,
                               perturb)
from qspectral.oracle import (BOUNDED_AWAY, INCONCLUSIVE, NOT_FREDHOLM,
                              VANISHING, agreement, cross_check,
                              shift_kernel_dims, shift_recurrence_roots,
                              truncate)
from qspectral.qmat import QMatrix, QVector
from qspectral.quat import HalfPlanePoint, Quaternion

HALF = Fraction(1, 2)
SHIFT = StructuredOperator(shift_tails=(ShiftTail(1),))
GEOM = StructuredOperator(diagonal_families=(
    GeometricFamily(Quaternion(0), Quaternion(1), HALF),))


def hp(u, s=0):
    return HalfPlanePoint(Fraction(u), Fraction(s))


# -- truncation --------------------------------------------------------

def test_truncate_geometric_diagonal():
    t = truncate(GEOM, 3)
    assert t.rows == 3
    diag = [t[(k, k)] for k in range(3)]
    assert [d.q0 for d in diag] == [HALF, Fraction(1, 4), Fraction(1, 8)]
    assert t[(0, 1)].is_zero()


def test_truncate_forward_shift_subdiagonal():
    t = truncate(SHIFT, 3)
    assert t[(1, 0)] == Quaternion(1) and t[(2, 1)] == Quaternion(1)
    assert all(t[(i, i)].is_zero() for i in range(3))


def test_truncate_backward_shift_superdiagonal():
    op = StructuredOperator(shift_tails=(ShiftTail(Fraction(3, 2), BACKWARD),))
    t = truncate(op, 3)
    assert t[(0, 1)] == Quaternion(Fraction(3, 2))
    assert t[(1, 2)] == Quaternion(Fraction(3, 2))
    assert t[(1, 0)].is_zero()


def test_truncate_block_and_family_interleave():
    op = StructuredOperator(finite_block=QMatrix([[Quaternion(2)]]),
                            diagonal_families=(ConstantFamily(Quaternion(3)),))
    t = truncate(op, 2)
    assert t.rows == 3
    assert t[(0, 0)] == Quaternion(2)
    assert t[(1, 1)] == Quaternion(3) and t[(2, 2)] == Quaternion(3)


def test_truncate_perturbation_support_checked():
    psi = QVector([Quaternion(0), Quaternion(0), Quaternion(0),
                   Quaternion(0), Quaternion(1)])   # component 0, m = 4
    pert = perturb(SHIFT, [(psi, psi)])
    t = truncate(pert, 8)
    assert t[(4, 4)] == Quaternion(1)
    with pytest.raises(DimensionMismatchError):
        truncate(pert, 3)
    with pytest.raises(DomainError):
        truncate(SHIFT, 0)


# -- cross_check verdicts ----------------------------------------------

def test_shift_verdicts_frozen():
    assert cross_check(SHIFT, hp(0)).verdict == VANISHING
    assert cross_check(SHIFT, hp(HALF)).verdict == VANISHING
    assert cross_check(SHIFT, hp(2)).verdict == BOUNDED_AWAY
    # the boundary decays too slowly for the default sizes
    assert cross_check(SHIFT, hp(1)).verdict == INCONCLUSIVE
    assert cross_check(SHIFT, hp(1), sizes=(256, 512, 1024, 2048)).verdict \
        == VANISHING


def test_report_rows_shape():
    rep = cross_check(SHIFT, hp(2))
    assert rep.sizes == (16, 32, 64)
    rows = rep.rows()
    assert [r["N"] for r in rows] == [16, 32, 64]
    assert all(r["min_singular_value"] > 1e-3 for r in rows)
    assert all(r["ker_dim"] == 0 for r in rows)


def test_geometric_verdicts():
    assert cross_check(GEOM, hp(Fraction(1, 4))).verdict == VANISHING
    assert cross_check(GEOM, hp(2)).verdict == BOUNDED_AWAY


def test_fast_and_dense_routes_agree():
    op = StructuredOperator(finite_block=QMatrix([[Quaternion(2)]]),
                            diagonal_families=(ConstantFamily(Quaternion(0)),),
                            shift_tails=(ShiftTail(1),))
    z = QVector([Quaternion(0)] * 3)
    dense = perturb(op, [(z, z)])   # zero perturbation forces the dense path
    p = HalfPlanePoint(Fraction(3, 4), HALF)
    fast_rep = cross_check(op, p)
    dense_rep = cross_check(dense, p)
    for a, b in zip(fast_rep.min_singular_values,
                    dense_rep.min_singular_values):
        assert abs(a - b) <= 1e-10 * max(1.0, a)


def test_agreement_contract():
    vanish = cross_check(SHIFT, hp(0))
    bounded = cross_check(SHIFT, hp(2))
    assert agreement(Membership.IN, vanish)
    assert not agreement(Membership.OUT, vanish)
    assert agreement(Membership.OUT, bounded)
    assert not agreement(Membership.IN, bounded)
    assert agreement(Membership.DELEGATED, vanish)
    assert agreement(Membership.DELEGATED, bounded)


# -- recurrence route ---------------------------------------------------

def test_shift_kernel_dims_frozen():
    assert shift_kernel_dims(1, hp(HALF)) == (0, 2)
    assert shift_kernel_dims(1, hp(2)) == (0, 0)
    assert shift_kernel_dims(1, hp(1)) == NOT_FREDHOLM
    assert shift_kernel_dims(1, hp(0, 1)) == NOT_FREDHOLM


def test_shift_kernel_dims_scaling_covariance():
    # only rho/alpha matters
    assert shift_kernel_dims(2, hp(1)) == (0, 2)
    assert shift_kernel_dims(2, hp(2)) == NOT_FREDHOLM
    assert shift_kernel_dims(HALF, hp(1)) == (0, 0)
    with pytest.raises(DomainError):
        shift_kernel_dims(0, hp(1))


def test_recurrence_root_moduli():
    roots = shift_recurrence_roots(2, hp(0, 1))
    assert all(abs(abs(r) - 0.5) < 1e-12 for r in roots)
    roots2 = shift_recurrence_roots(1, hp(HALF))
    assert all(abs(abs(r) - 0.5) < 1e-12 for r in roots2)
