"""Exact axially symmetric spectral sets for structured operators.

Every spectral set of a class member decomposes over a finite *frame*:
radial annulus cells between the shift radii, the shift circles
themselves, finitely many exceptional point spheres, and geometric-family
tails whose far ends behave uniformly.  One classification per frame atom
then determines every set exactly, so unions, differences and equality of
RegionSets reduce to finite boolean algebra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .errors import DomainError
from .opmodel import (ConstantFamily, GeometricFamily, Membership,
                      StructuredOperator, classify_core,
                      geometric_sphere_indices, _rat_sqrt_ub)
from .quat import HalfPlanePoint, Quaternion, sphere_of
from .spec_fd import right_eigenspheres

_SCAN_CAP = 2000

INVARIANT_SETS = ("sigma_e", "sigma_el", "sigma_er", "ws",
                  "sigma_plus_inf", "sigma_minus_inf")

BASE_SETS = ("sigma_s", "sigma_ps", "sigma_rs", "sigma_cs",
             "sigma_el", "sigma_er", "sigma_e", "sigma_0", "ws", "bs",
             "sigma_plus_inf", "sigma_minus_inf", "iso", "acc", "pi_0")


# ---------------------------------------------------------------------
# primitives
# ---------------------------------------------------------------------

@dataclass(frozen=True)
class PointPrim:
    u: Fraction
    s_sq: Fraction

    @classmethod
    def of(cls, p: HalfPlanePoint) -> "PointPrim":
        return cls(p.u, p.s_sq)

    def contains(self, p: HalfPlanePoint) -> bool:
        return p.u == self.u and p.s_sq == self.s_sq

    def key(self):
        return ("point", self.u, self.s_sq)

    def point(self) -> HalfPlanePoint:
        return HalfPlanePoint.from_s_sq(self.u, self.s_sq)

    def row(self) -> dict:
        p = self.point()
        return {"kind": "POINT", "u": float(p.u), "s": p.s}


@dataclass(frozen=True)
class CirclePrim:
    r_sq: Fraction

    def contains(self, p: HalfPlanePoint) -> bool:
        return p.radius_sq == self.r_sq

    def key(self):
        return ("circle", self.r_sq)

    def row(self) -> dict:
        return {"kind": "CIRCLE", "radius": math.sqrt(float(self.r_sq))}


@dataclass(frozen=True)
class BandPrim:
    """Radial band lo < rho^2 < hi with inclusive flags; lo None means
    the band reaches the center, hi None means it is unbounded."""

    lo_sq: Optional[Fraction]
    lo_incl: bool
    hi_sq: Optional[Fraction]
    hi_incl: bool

    def contains(self, p: HalfPlanePoint) -> bool:
        r = p.radius_sq
        if self.lo_sq is not None:
            if r < self.lo_sq or (r == self.lo_sq and not self.lo_incl):
                return False
        if self.hi_sq is not None:
            if r > self.hi_sq or (r == self.hi_sq and not self.hi_incl):
                return False
        return True

    def key(self):
        return ("band", self.lo_sq, self.lo_incl if self.lo_sq is not None else True,
                self.hi_sq, self.hi_incl if self.hi_sq is not None else True)

    def row(self) -> dict:
        if self.lo_sq is None and self.hi_sq is not None:
            return {"kind": "DISK", "radius": math.sqrt(float(self.hi_sq)),
                    "closed": self.hi_incl}
        return {"kind": "ANNULUS",
                "r_inner": None if self.lo_sq is None else math.sqrt(float(self.lo_sq)),
                "inner_closed": self.lo_incl,
                "r_outer": None if self.hi_sq is None else math.sqrt(float(self.hi_sq)),
                "outer_closed": self.hi_incl}


@dataclass(frozen=True)
class SequencePrim:
    """Spheres of a geometric family from index ``start`` on (limit excluded)."""

    family: GeometricFamily
    start: int

    def contains(self, p: HalfPlanePoint) -> bool:
        return bool(geometric_sphere_indices(self.family, p, self.start))

    def key(self):
        # the sphere sequence is determined by these rationals alone, so
        # e.g. a family and its conjugate compare equal
        lim, off = self.family.limit, self.family.offset
        a = 2 * (lim.q1 * off.q1 + lim.q2 * off.q2 + lim.q3 * off.q3)
        return ("sequence", lim.q0, lim.im_norm_sq(), off.q0, a,
                off.im_norm_sq(), self.family.ratio, self.start)

    def row(self) -> dict:
        p = sphere_of(self.family.limit)
        return {"kind": "POINT_SEQUENCE", "u": float(p.u), "s": p.s,
                "ratio": float(self.family.ratio), "start": self.start,
                "limit_included": False}


Primitive = object


@dataclass(frozen=True)
class RegionSet:
    includes: tuple = ()
    excludes: tuple = ()

    def contains(self, p: HalfPlanePoint) -> bool:
        if any(e.contains(p) for e in self.excludes):
            return False
        return any(i.contains(p) for i in self.includes)

    def __contains__(self, p: HalfPlanePoint) -> bool:
        return self.contains(p)

    def is_empty(self) -> bool:
        # by construction no include is fully cancelled by the excludes
        return not self.includes

    def canonical_key(self):
        return (frozenset(i.key() for i in self.includes),
                frozenset(e.key() for e in self.excludes))

    def same_set(self, other: "RegionSet") -> bool:
        return self.canonical_key() == other.canonical_key()

    def rows(self) -> list[dict]:
        out = []
        for role, prims in (("include", self.includes), ("exclude", self.excludes)):
            for prim in prims:
                r = dict(prim.row())
                r["role"] = role
                out.append(r)
        out.sort(key=_row_sort_key)
        return out


def _row_sort_key(r: dict):
    u = r.get("u")
    if u is None:
        u = r.get("radius")
    if u is None:
        u = r.get("r_inner") or 0.0
    return (r.get("role") != "include", float(u), float(r.get("s") or 0.0),
            r.get("kind", ""))


def region_point(u, s) -> RegionSet:
    return RegionSet((PointPrim.of(HalfPlanePoint(u, s)),))


def region_circle(r) -> RegionSet:
    r = Fraction(r)
    return RegionSet((CirclePrim(r * r),))


def region_disk(r, closed: bool = True) -> RegionSet:
    r = Fraction(r)
    return RegionSet((BandPrim(None, True, r * r, closed),))


def region_empty() -> RegionSet:
    return RegionSet()


# ---------------------------------------------------------------------
# frame
# ---------------------------------------------------------------------

@dataclass
class Atom:
    kind: str                       # "cell" | "circle" | "point" | "tail"
    rep: HalfPlanePoint
    lo_sq: Optional[Fraction] = None   # cells
    hi_sq: Optional[Fraction] = None
    r_sq: Optional[Fraction] = None    # circles
    point: Optional[HalfPlanePoint] = None
    family: Optional[GeometricFamily] = None
    start: Optional[int] = None
    host: Optional[int] = None         # radial atom index for points/tails


@dataclass
class Frame:
    operator: StructuredOperator
    radii_sq: list[Fraction]
    atoms: list[Atom]
    radial_order: list[int]            # cell0, circ0, cell1, ..., cellK
    flags: list[dict]
    set_names: list[str]


_FRAME_CACHE: dict[StructuredOperator, Frame] = {}
_REGION_CACHE: dict[StructuredOperator, dict[str, RegionSet]] = {}


def _dot4(a: Quaternion, b: Quaternion) -> Fraction:
    return a.q0 * b.q0 + a.q1 * b.q1 + a.q2 * b.q2 + a.q3 * b.q3


def _cell_bounds(radii: list[Fraction], i: int):
    lo = radii[i - 1] if i > 0 else None
    hi = radii[i] if i < len(radii) else None
    return lo, hi


def _cell_index(radii: list[Fraction], r_sq: Fraction) -> int:
    i = 0
    while i < len(radii) and r_sq > radii[i]:
        i += 1
    return i


def _tail_start_radial(fam: GeometricFamily, radii: list[Fraction],
                       others: list[GeometricFamily]) -> int:
    """Smallest index past which the whole tail provably sits in one cell
    (and clear of the other families' limits)."""
    lr2 = fam.limit.norm_sq()
    c1 = 2 * _dot4(fam.limit, fam.offset)
    c2 = fam.offset.norm_sq()
    on_circle = lr2 in radii
    if on_circle:
        i = radii.index(lr2)
        if c1 < 0:
            lo, hi = (radii[i - 1] if i > 0 else None), lr2
        else:
            lo, hi = lr2, (radii[i + 1] if i + 1 < len(radii) else None)
    else:
        idx = _cell_index(radii, lr2)
        lo, hi = _cell_bounds(radii, idx)

    o_ub = _rat_sqrt_ub(fam.offset.norm_sq())
    lim_sphere = sphere_of(fam.limit)
    sep = []
    for g in others:
        gs = sphere_of(g.limit)
        if gs != lim_sphere:
            sep.append(lim_sphere.dist(gs))

    m, t = 1, fam.ratio
    for _ in range(_SCAN_CAP):
        b = abs(c1) * t + c2 * t * t
        ok = True
        if c1 < 0 and on_circle and not (c2 * t < -c1):
            ok = False
        if ok and hi is not None and lr2 != hi and not (lr2 + b < hi):
            ok = False
        if ok and hi is not None and lr2 == hi and not (c2 * t < -c1):
            ok = False
        if ok and lo is not None and lr2 != lo and not (lr2 - b > lo):
            ok = False
        if ok and sep and not all(float(o_ub * t) < 0.45 * d for d in sep):
            ok = False
        if ok:
            return m
        m += 1
        t *= fam.ratio
    raise DomainError("tail localization did not terminate")


def _pick_cell_rep(lo: Optional[Fraction], hi: Optional[Fraction],
                   collides) -> HalfPlanePoint:
    if hi is None:
        mid = (lo if lo is not None else Fraction(0)) + 1
    elif lo is None:
        mid = hi / 2
    else:
        mid = (lo + hi) / 2
    base = Fraction(math.sqrt(float(mid))).limit_denominator(10 ** 6)
    for k in range(400):
        u = base + Fraction(k, 10 ** 7)
        r2 = u * u
        if lo is not None and r2 <= lo:
            continue
        if hi is not None and r2 >= hi:
            continue
        p = HalfPlanePoint.from_s_sq(u, Fraction(0))
        if not collides(p):
            return p
    raise DomainError("could not place a cell representative")


def _pick_circle_rep(r_sq: Fraction, collides) -> HalfPlanePoint:
    unit = min(Fraction(1), r_sq)
    for k in range(400):
        u = Fraction(k, 1021) * unit
        if u * u >= r_sq and k > 0:
            break
        p = HalfPlanePoint.from_s_sq(u, r_sq - u * u)
        if not collides(p):
            return p
    raise DomainError("could not place a circle representative")


def build_frame(op: StructuredOperator) -> Frame:
    base = op.unperturbed()
    if base in _FRAME_CACHE:
        return _FRAME_CACHE[base]

    radii = sorted({t.weight * t.weight for t in base.shift_tails})
    geoms = [f for f in base.diagonal_families if isinstance(f, GeometricFamily)]
    starts = [_tail_start_radial(f, radii, [g for g in geoms if g is not f])
              for f in geoms]

    fixed: list[HalfPlanePoint] = []
    if base.finite_block is not None:
        fixed.extend(right_eigenspheres(base.finite_block).points())
    for f in base.diagonal_families:
        if isinstance(f, ConstantFamily):
            fixed.append(sphere_of(f.value))
        else:
            fixed.append(sphere_of(f.limit))

    # fixpoint: push each tail start past every exceptional point it hits
    for _ in range(12):
        pts = list(fixed)
        for f, m0 in zip(geoms, starts):
            pts.extend(f.sphere(m) for m in range(1, m0))
        pts = _dedupe(pts)
        changed = False
        for i, f in enumerate(geoms):
            for e in pts:
                hits = geometric_sphere_indices(f, e, starts[i])
                if hits:
                    starts[i] = max(hits) + 1
                    changed = True
        if not changed:
            break
    else:
        raise DomainError("tail/exceptional-point separation did not settle")

    points = pts  # final deduped exceptional spheres

    atoms: list[Atom] = []
    radial_order: list[int] = []
    cell_atom: list[int] = []
    for i in range(len(radii) + 1):
        lo, hi = _cell_bounds(radii, i)
        atoms.append(Atom(kind="cell", rep=None, lo_sq=lo, hi_sq=hi))
        cell_atom.append(len(atoms) - 1)
        radial_order.append(len(atoms) - 1)
        if i < len(radii):
            atoms.append(Atom(kind="circle", rep=None, r_sq=radii[i]))
            radial_order.append(len(atoms) - 1)

    def host_of(p: HalfPlanePoint) -> int:
        r2 = p.radius_sq
        if r2 in radii:
            # circle atoms sit at odd positions of radial_order
            return radial_order[2 * radii.index(r2) + 1]
        return cell_atom[_cell_index(radii, r2)]

    point_atom_of: dict[tuple, int] = {}
    for p in points:
        atoms.append(Atom(kind="point", rep=p, point=p, host=host_of(p)))
        point_atom_of[(p.u, p.s_sq)] = len(atoms) - 1

    for f, m0 in zip(geoms, starts):
        rep = f.sphere(m0)
        atoms.append(Atom(kind="tail", rep=rep, family=f, start=m0,
                          host=cell_atom[_cell_index(radii, rep.radius_sq)]))

    def collides(p: HalfPlanePoint) -> bool:
        if any(p == e for e in points):
            return True
        return any(geometric_sphere_indices(f, p, m0)
                   for f, m0 in zip(geoms, starts))

    for a in atoms:
        if a.kind == "cell":
            a.rep = _pick_cell_rep(a.lo_sq, a.hi_sq, collides)
        elif a.kind == "circle":
            a.rep = _pick_circle_rep(a.r_sq, collides)

    flags = []
    strata: set[int] = set()
    for a in atoms:
        cls = classify_core(base, a.rep)
        d = {
            "sigma_s": cls.in_spectrum is Membership.IN,
            "sigma_ps": cls.point_spectrum is Membership.IN,
            "sigma_rs": cls.residual_spectrum is Membership.IN,
            "sigma_cs": cls.continuous_spectrum is Membership.IN,
            "sigma_el": cls.ess_left is Membership.IN,
            "sigma_er": cls.ess_right is Membership.IN,
            "sigma_e": cls.essential is Membership.IN,
            "sigma_0": cls.sigma0 is Membership.IN,
            "ws": cls.weyl is Membership.IN,
            "bs": cls.browder is Membership.IN,
            "sigma_plus_inf": False,
            "sigma_minus_inf": False,
        }
        if cls.index_stratum is not None:
            d[f"sigma_k:{cls.index_stratum}"] = True
            strata.add(cls.index_stratum)
        flags.append(d)

    # topological flags from the frame structure
    limit_tails: dict[tuple, list[int]] = {}
    for idx, a in enumerate(atoms):
        if a.kind == "tail":
            lp = sphere_of(a.family.limit)
            limit_tails.setdefault((lp.u, lp.s_sq), []).append(idx)
    for idx, a in enumerate(atoms):
        d = flags[idx]
        if not d["sigma_s"]:
            iso = acc = False
        elif a.kind in ("cell", "circle"):
            iso, acc = False, True
        elif a.kind == "tail":
            acc = flags[a.host]["sigma_s"]
            iso = not acc
        else:
            acc = flags[a.host]["sigma_s"] or any(
                flags[t]["sigma_s"]
                for t in limit_tails.get((a.point.u, a.point.s_sq), ()))
            iso = not acc
        d["iso"] = iso
        d["acc"] = acc
        d["pi_0"] = iso and d["sigma_0"]

    names = list(BASE_SETS) + [f"sigma_k:{k}" for k in sorted(strata)]
    frame = Frame(base, radii, atoms, radial_order, flags, names)
    _FRAME_CACHE[base] = frame
    return frame


def _dedupe(pts: Sequence[HalfPlanePoint]) -> list[HalfPlanePoint]:
    seen, out = set(), []
    for p in pts:
        k = (p.u, p.s_sq)
        if k not in seen:
            seen.add(k)
            out.append(p)
    return out


# ---------------------------------------------------------------------
# region assembly
# ---------------------------------------------------------------------

def _radial_prims(frame: Frame, in_set) -> list:
    prims = []
    order = frame.radial_order
    i = 0
    while i < len(order):
        if not in_set(order[i]):
            i += 1
            continue
        j = i
        while j + 1 < len(order) and in_set(order[j + 1]):
            j += 1
        first, last = frame.atoms[order[i]], frame.atoms[order[j]]
        if i == j and first.kind == "circle":
            prims.append(CirclePrim(first.r_sq))
        else:
            if first.kind == "circle":
                lo, lo_incl = first.r_sq, True
            else:
                lo, lo_incl = first.lo_sq, False
            if last.kind == "circle":
                hi, hi_incl = last.r_sq, True
            else:
                hi, hi_incl = last.hi_sq, False
            prims.append(BandPrim(lo, lo_incl, hi, hi_incl))
        i = j + 1
    return prims


def _build_region(frame: Frame, name: str) -> RegionSet:
    def in_set(idx: int) -> bool:
        return frame.flags[idx].get(name, False)

    includes = _radial_prims(frame, in_set)
    excludes = []
    for idx, a in enumerate(frame.atoms):
        if a.kind == "point":
            if in_set(idx) and not in_set(a.host):
                includes.append(PointPrim.of(a.point))
            elif not in_set(idx) and in_set(a.host):
                excludes.append(PointPrim.of(a.point))
        elif a.kind == "tail":
            if in_set(idx) and not in_set(a.host):
                includes.append(SequencePrim(a.family, a.start))
            elif not in_set(idx) and in_set(a.host):
                excludes.append(SequencePrim(a.family, a.start))
    return RegionSet(tuple(includes), tuple(excludes))


def spectrum_regions(op: StructuredOperator) -> dict[str, RegionSet]:
    base = op.unperturbed()
    if base not in _REGION_CACHE:
        frame = build_frame(base)
        _REGION_CACHE[base] = {name: _build_region(frame, name)
                               for name in frame.set_names}
    regs = _REGION_CACHE[base]
    if op.is_perturbed:
        return {k: v for k, v in regs.items()
                if k in INVARIANT_SETS or k.startswith("sigma_k:")}
    return dict(regs)


def boundary_distance(op: StructuredOperator, p: HalfPlanePoint) -> float:
    """Distance from p to the nearest primitive that can carry a
    classification boundary (shift circles, exceptional spheres, tail
    spheres and their limits).  Conservative: never larger than the true
    distance to a set boundary."""
    frame = build_frame(op)
    rho = math.sqrt(float(p.radius_sq))
    best = math.inf
    for r_sq in frame.radii_sq:
        best = min(best, abs(rho - math.sqrt(float(r_sq))))
    for a in frame.atoms:
        if a.kind == "point":
            best = min(best, p.dist(a.point))
        elif a.kind == "tail":
            fam = a.family
            lim = sphere_of(fam.limit)
            best = min(best, p.dist(lim))
            o = abs(fam.offset)
            t = float(fam.ratio) ** a.start
            m = a.start
            while o * t > 1e-12 and m < a.start + 400:
                best = min(best, p.dist(fam.sphere(m)))
                if o * t < best:
                    break  # remaining spheres are within best of the limit
                m += 1
                t *= float(fam.ratio)
    return best


def region_atoms(op: StructuredOperator, name: str) -> frozenset[int]:
    """Frame-atom view of a set; exact boolean algebra for tests."""
    frame = build_frame(op)
    return frozenset(i for i in range(len(frame.atoms))
                     if frame.flags[i].get(name, False))
