"""Exact region sets: primitives, assembled spectra, boundary distance."""

from fractions import Fraction

from qspectral.opmodel import (BACKWARD, ConstantFamily, GeometricFamily,
                               ShiftTail, StructuredOperator)
from qspectral.quat import HalfPlanePoint, Quaternion
from qspectral.regions import (boundary_distance, region_circle, region_disk,
                               region_empty, region_point, spectrum_regions)

I = Quaternion(0, 1)
J = Quaternion(0, 0, 1)
HALF = Fraction(1, 2)


def hp(u, s=0):
    return HalfPlanePoint(Fraction(u), Fraction(s))


SHIFT = StructuredOperator(shift_tails=(ShiftTail(1),))
GEOM = StructuredOperator(diagonal_families=(
    GeometricFamily(Quaternion(0), Quaternion(1), HALF),))
CONST_I = StructuredOperator(diagonal_families=(ConstantFamily(I),))


# -- primitive constructors -------------------------------------------

def test_primitive_containment():
    disk = region_disk(1)
    assert hp(0) in disk and hp(1) in disk and hp(HALF, HALF) in disk
    assert hp(2) not in disk
    open_disk = region_disk(1, closed=False)
    assert hp(1) not in open_disk and hp(Fraction(99, 100)) in open_disk
    circ = region_circle(1)
    assert hp(1) in circ and hp(0, 1) in circ and hp(HALF) not in circ
    assert region_empty().is_empty()
    pt = region_point(1, 2)
    assert HalfPlanePoint.from_s_sq(1, 4) in pt and hp(1) not in pt


def test_same_set_is_structural():
    assert region_disk(1).same_set(region_disk(1))
    assert not region_disk(1).same_set(region_disk(1, closed=False))
    assert not region_circle(1).same_set(region_point(1, 0))


# -- shift regions -----------------------------------------------------

def test_shift_region_table():
    regs = spectrum_regions(SHIFT)
    assert regs["sigma_s"].same_set(region_disk(1))
    assert regs["sigma_e"].same_set(region_circle(1))
    assert regs["sigma_el"].same_set(region_circle(1))
    assert regs["sigma_er"].same_set(region_circle(1))
    assert regs["sigma_rs"].same_set(region_disk(1, closed=False))
    assert regs["sigma_cs"].same_set(region_circle(1))
    assert regs["sigma_ps"].is_empty()
    assert regs["sigma_0"].is_empty()
    assert regs["ws"].same_set(region_disk(1))
    assert regs["bs"].same_set(region_disk(1))
    assert regs["sigma_k:-2"].same_set(region_disk(1, closed=False))
    assert regs["sigma_plus_inf"].is_empty()
    assert regs["sigma_minus_inf"].is_empty()
    assert regs["iso"].is_empty()
    assert regs["acc"].same_set(region_disk(1))
    assert regs["pi_0"].is_empty()


def test_shift_region_rows_serializable():
    rows = spectrum_regions(SHIFT)["sigma_s"].rows()
    assert rows == [{"kind": "DISK", "radius": 1.0, "closed": True,
                     "role": "include"}]


def test_two_shift_annulus():
    op = StructuredOperator(shift_tails=(ShiftTail(HALF), ShiftTail(2)))
    regs = spectrum_regions(op)
    assert regs["sigma_s"].same_set(region_disk(2))
    # indices -2 between the radii, -4 inside both
    assert hp(1) in regs["sigma_k:-2"]
    assert hp(Fraction(1, 4)) in regs["sigma_k:-4"]
    assert hp(1) not in regs["sigma_k:-4"]
    assert hp(HALF) in regs["sigma_e"] and hp(2) in regs["sigma_e"]
    assert hp(1) not in regs["sigma_e"]


# -- point and sequence regions ---------------------------------------

def test_constant_family_regions():
    regs = spectrum_regions(CONST_I)
    target = region_point(0, 1)
    assert regs["sigma_s"].same_set(target)
    assert regs["sigma_e"].same_set(target)
    assert regs["ws"].same_set(target)
    assert regs["iso"].same_set(target)
    assert regs["pi_0"].is_empty()


def test_geometric_family_regions():
    regs = spectrum_regions(GEOM)
    sig = regs["sigma_s"]
    for m in range(1, 12):
        assert hp(Fraction(1, 2 ** m)) in sig
    assert hp(0) in sig
    assert hp(Fraction(1, 3)) not in sig
    assert hp(HALF) in regs["pi_0"]
    assert hp(0) not in regs["pi_0"]
    assert regs["sigma_e"].same_set(region_point(0, 0))
    assert hp(HALF) in regs["iso"]
    assert regs["acc"].same_set(region_point(0, 0))


def test_weyl_adjoint_symmetry():
    ops = [SHIFT, GEOM, CONST_I,
           StructuredOperator(diagonal_families=(
               GeometricFamily(Quaternion(1), I + J, HALF),),
               shift_tails=(ShiftTail(Fraction(3, 2)),))]
    for op in ops:
        a = spectrum_regions(op)["ws"]
        b = spectrum_regions(op.adjoint_operator())["ws"]
        assert a.same_set(b)


def test_perturbed_regions_restricted_to_invariants():
    from qspectral.opmodel import perturb
    from qspectral.qmat import QVector
    z = QVector([Quaternion(1), Quaternion(0)])
    pert = perturb(SHIFT, [(z, z)])
    regs = spectrum_regions(pert)
    assert "sigma_s" not in regs and "bs" not in regs and "pi_0" not in regs
    assert set(regs) >= {"sigma_e", "sigma_el", "sigma_er", "ws"}
    assert regs["ws"].same_set(region_disk(1))


# -- boundary distance -------------------------------------------------

def test_boundary_distance_shift():
    assert abs(boundary_distance(SHIFT, hp(0)) - 1.0) < 1e-12
    assert abs(boundary_distance(SHIFT, hp(3)) - 2.0) < 1e-12
    assert boundary_distance(SHIFT, hp(1)) == 0.0


def test_boundary_distance_sees_tail_spheres():
    d = boundary_distance(GEOM, hp(Fraction(17, 64)))
    assert d <= abs(17 / 64 - 0.25) + 1e-12


def test_backward_shift_same_radii():
    op = StructuredOperator(shift_tails=(ShiftTail(1, BACKWARD),))
    regs = spectrum_regions(op)
    assert regs["sigma_s"].same_set(region_disk(1))
    assert regs["sigma_ps"].same_set(region_disk(1, closed=False))
    assert regs["sigma_k:2"].same_set(region_disk(1, closed=False))
