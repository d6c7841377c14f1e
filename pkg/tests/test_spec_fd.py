"""Finite-dimensional eigenspheres, membership and power stabilization."""

from fractions import Fraction

from qspectral.qmat import QMatrix
from qspectral.quat import HalfPlanePoint, Quaternion, slice_representative
from qspectral.spec_fd import (MembershipTag, asc_dsc, on_eigensphere,
                               pseudo_resolvent, pseudo_resolvent_at,
                               right_eigenspheres, s_spectrum_membership)

I = Quaternion(0, 1)
J = Quaternion(0, 0, 1)


def spheres_of(a: QMatrix):
    return {(p.u, p.s_sq): m for p, m in right_eigenspheres(a).spheres}


def test_identity_and_zero_anchors():
    for n in (1, 2, 3):
        assert spheres_of(QMatrix.identity(n)) == {(1, 0): n}
        assert spheres_of(QMatrix.zeros(n)) == {(0, 0): n}


def test_diagonal_imaginary_unit():
    assert spheres_of(QMatrix([[I]])) == {(0, 1): 1}
    # i and j lie on the same similarity sphere
    a = QMatrix([[I, Quaternion(0)], [Quaternion(0), J]])
    assert spheres_of(a) == {(0, 1): 2}


def test_distinct_real_diagonal():
    a = QMatrix([[Quaternion(1), Quaternion(0), Quaternion(0)],
                 [Quaternion(0), Quaternion(2), Quaternion(0)],
                 [Quaternion(0), Quaternion(0), Quaternion(-3)]])
    assert spheres_of(a) == {(1, 0): 1, (2, 0): 1, (-3, 0): 1}


def test_upper_triangular_defective():
    # diagonal j, i: both on the sphere (0,1), but the pseudo-resolvent
    # there is [[0, i+j],[0, 0]] with one-dimensional kernel
    a = QMatrix([[J, Quaternion(1)], [Quaternion(0), I]])
    assert spheres_of(a) == {(0, 1): 1}
    assert on_eigensphere(a, HalfPlanePoint(0, 1)) == 1


def test_nilpotent_full_kernel_multiplicity():
    a = QMatrix([[Quaternion(0), Quaternion(1)], [Quaternion(0), Quaternion(0)]])
    assert spheres_of(a) == {(0, 0): 2}


def test_irrational_radius_sphere():
    # 1 + i + j has |Im| = sqrt(2); the sphere key is exact via s^2
    a = QMatrix([[Quaternion(1, 1, 1, 0)]])
    assert spheres_of(a) == {(1, 2): 1}


def test_pseudo_resolvent_formula():
    a = QMatrix([[Quaternion(2)]])
    r = pseudo_resolvent(a, Quaternion(1))
    assert r[0, 0] == Quaternion(1)       # 4 - 4 + 1
    r2 = pseudo_resolvent_at(a, HalfPlanePoint(0, 1))
    assert r2[0, 0] == Quaternion(5)      # 4 - 0 + 1


def test_membership_tags():
    a = QMatrix([[I, Quaternion(0)], [Quaternion(0), Quaternion(2)]])
    assert s_spectrum_membership(a, J) is MembershipTag.POINT
    assert s_spectrum_membership(a, Quaternion(2)) is MembershipTag.POINT
    assert s_spectrum_membership(a, Quaternion(1)) is MembershipTag.RESOLVENT
    assert s_spectrum_membership(
        a, slice_representative(HalfPlanePoint(0, Fraction(1, 2)))) \
        is MembershipTag.RESOLVENT


def test_on_eigensphere_off_spectrum():
    assert on_eigensphere(QMatrix.identity(2), HalfPlanePoint(3, 0)) == 0


def test_asc_dsc_invertible_is_zero():
    rep = asc_dsc(QMatrix.identity(3))
    assert (rep.ascent, rep.descent) == (0, 0)


def test_asc_dsc_nilpotent():
    a = QMatrix([[Quaternion(0), Quaternion(1)], [Quaternion(0), Quaternion(0)]])
    rep = asc_dsc(a)
    assert rep.ascent == rep.descent == rep.stabilization_index == 2


def test_asc_dsc_projector():
    a = QMatrix([[Quaternion(1), Quaternion(0)], [Quaternion(0), Quaternion(0)]])
    rep = asc_dsc(a)
    assert rep.ascent == rep.descent == 1


def test_eigensphere_snaps_to_exact_rationals():
    # mixed-unit triangular block: the detected sphere must compare
    # exactly equal to (0, 1) despite floating eigenvalue clustering
    a = QMatrix([[J, Quaternion(1)], [Quaternion(0), I]])
    (p, _mult), = right_eigenspheres(a).spheres
    assert p == HalfPlanePoint.from_s_sq(0, 1)
    assert isinstance(p.u, Fraction) and p.u == 0
