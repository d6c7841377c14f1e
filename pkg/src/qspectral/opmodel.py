"""Structured operators on l2(N, H) and their exact spectral classifier.

An operator is a direct sum of a finite block, diagonal families and
weighted unilateral shift tails, plus an optional finite-rank perturbation.
Each summand occupies its own orthogonal subspace, so kernels, cokernels,
indices and ascent/descent combine by simple direct-sum rules; the
perturbation is handled through the compact-perturbation invariance
theorems (essential sets, index strata and the Weyl set do not move), and
everything that is not invariant is delegated to the numerical oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DelegatedError, DomainError
from .qmat import (MEMBERSHIP_TOL, QMatrix, QVector, adjoint, chi,
                   kernel_basis, kernel_dim_numeric)
from .quat import HalfPlanePoint, Quaternion, Real, _frac, sphere_of
from .spec_fd import pseudo_resolvent_at

INF = math.inf

FORWARD = "forward"
BACKWARD = "backward"

_GEOM_SCAN_CAP = 800


class Membership(Enum):
    IN = "in"
    OUT = "out"
    DELEGATED = "unknown-delegated"

    @classmethod
    def of(cls, flag: bool) -> "Membership":
        return cls.IN if flag else cls.OUT

    def __bool__(self) -> bool:
        if self is Membership.DELEGATED:
            raise DelegatedError("membership is delegated to the oracle")
        return self is Membership.IN


@dataclass(frozen=True)
class ConstantFamily:
    """Diagonal family with one value of infinite multiplicity."""

    value: Quaternion

    def entry(self, m: int) -> Quaternion:
        return self.value


@dataclass(frozen=True)
class GeometricFamily:
    """Diagonal entries limit + offset * ratio^m, m = 1, 2, ..."""

    limit: Quaternion
    offset: Quaternion
    ratio: Fraction

    def __init__(self, limit: Quaternion, offset: Quaternion, ratio: Real):
        ratio = _frac(ratio)
        if not (0 < ratio < 1):
            raise DomainError("ratio must lie in (0, 1)")
        if offset.is_zero():
            raise DomainError("offset must be nonzero")
        object.__setattr__(self, "limit", limit)
        object.__setattr__(self, "offset", offset)
        object.__setattr__(self, "ratio", ratio)

    def entry(self, m: int) -> Quaternion:
        return self.limit + self.offset * (self.ratio ** m)

    def sphere(self, m: int) -> HalfPlanePoint:
        return sphere_of(self.entry(m))

    def limit_sphere(self) -> HalfPlanePoint:
        return sphere_of(self.limit)


DiagonalFamily = Union[ConstantFamily, GeometricFamily]


@dataclass(frozen=True)
class ShiftTail:
    """Unilateral shift e_m -> e_{m+1} * weight on its own copy of l2.

    ``direction`` extends the class with the adjoint (backward) shift so
    that adjoints of class members stay inside the class.
    """

    weight: Fraction
    direction: str = FORWARD

    def __init__(self, weight: Real, direction: str = FORWARD):
        weight = _frac(weight)
        if weight <= 0:
            raise DomainError("shift weight must be positive")
        if direction not in (FORWARD, BACKWARD):
            raise DomainError(f"bad shift direction {direction!r}")
        object.__setattr__(self, "weight", weight)
        object.__setattr__(self, "direction", direction)


@dataclass(frozen=True)
class StructuredOperator:
    finite_block: Optional[QMatrix] = None
    diagonal_families: tuple[DiagonalFamily, ...] = ()
    shift_tails: tuple[ShiftTail, ...] = ()
    perturbation: tuple[tuple[QVector, QVector], ...] = ()

    def __init__(self,
                 finite_block: Optional[QMatrix] = None,
                 diagonal_families: Sequence[DiagonalFamily] = (),
                 shift_tails: Sequence[ShiftTail] = (),
                 perturbation: Sequence[tuple[QVector, QVector]] = ()):
        if finite_block is not None and finite_block.rows != finite_block.cols:
            raise DomainError("finite block must be square")
        if finite_block is None and not diagonal_families and not shift_tails:
            raise DomainError("operator must have at least one component")
        object.__setattr__(self, "finite_block", finite_block)
        object.__setattr__(self, "diagonal_families", tuple(diagonal_families))
        object.__setattr__(self, "shift_tails", tuple(shift_tails))
        object.__setattr__(self, "perturbation", tuple(perturbation))

    # -- structure -----------------------------------------------------
    @property
    def block_dim(self) -> int:
        return 0 if self.finite_block is None else self.finite_block.rows

    @property
    def infinite_components(self) -> tuple:
        return self.diagonal_families + self.shift_tails

    @property
    def n_infinite(self) -> int:
        return len(self.infinite_components)

    @property
    def is_perturbed(self) -> bool:
        return bool(self.perturbation)

    def unperturbed(self) -> "StructuredOperator":
        if not self.perturbation:
            return self
        return StructuredOperator(self.finite_block, self.diagonal_families,
                                  self.shift_tails)

    def adjoint_operator(self) -> "StructuredOperator":
        """The class is closed under adjoints (shifts swap direction)."""
        block = None if self.finite_block is None else adjoint(self.finite_block)
        fams: list[DiagonalFamily] = []
        for fam in self.diagonal_families:
            if isinstance(fam, ConstantFamily):
                fams.append(ConstantFamily(fam.value.conj()))
            else:
                fams.append(GeometricFamily(fam.limit.conj(), fam.offset.conj(),
                                            fam.ratio))
        shifts = tuple(ShiftTail(t.weight,
                                 BACKWARD if t.direction == FORWARD else FORWARD)
                       for t in self.shift_tails)
        pert = tuple((phi, psi) for psi, phi in self.perturbation)
        return StructuredOperator(block, tuple(fams), shifts, pert)

    def norm_bound(self) -> float:
        """Upper bound on the operator norm of the unperturbed part."""
        vals = [0.0]
        if self.finite_block is not None:
            vals.append(self.finite_block.norm2())
        for fam in self.diagonal_families:
            if isinstance(fam, ConstantFamily):
                vals.append(abs(fam.value))
            else:
                vals.append(abs(fam.limit) + abs(fam.offset))
        for tail in self.shift_tails:
            vals.append(float(tail.weight))
        return max(vals)

    # -- global coordinates -------------------------------------------
    # Index space: the finite block occupies [0, block_dim); infinite
    # components are interleaved round-robin after it, so finitely
    # supported flat vectors address every component.
    def coord_of(self, component: int, m: int) -> int:
        return self.block_dim + m * self.n_infinite + component

    def split_coord(self, i: int) -> tuple[int, int]:
        """Global index -> (component, m); component -1 means the block."""
        if i < self.block_dim:
            return (-1, i)
        j = i - self.block_dim
        if self.n_infinite == 0:
            raise DomainError("coordinate beyond the finite block")
        return (j % self.n_infinite, j // self.n_infinite)


def perturb(op: StructuredOperator,
            pairs: Sequence[tuple[QVector, QVector]]) -> StructuredOperator:
    """Attach/extend the finite-rank perturbation sum psi_j <phi_j|.>."""
    for psi, phi in pairs:
        for v in (psi, phi):
            if op.n_infinite == 0 and v.length > op.block_dim:
                raise DomainError("perturbation support exceeds the space")
    return StructuredOperator(op.finite_block, op.diagonal_families,
                              op.shift_tails, op.perturbation + tuple(pairs))


# ---------------------------------------------------------------------
# geometric-family sphere matching (exact)
# ---------------------------------------------------------------------

def _rat_sqrt_ub(x: Fraction) -> Fraction:
    """Rational upper bound for sqrt(x), x >= 0."""
    if x == 0:
        return Fraction(0)
    r = Fraction(math.sqrt(float(x)))
    while r * r < x:
        r *= Fraction(1001, 1000)
    return r


def geometric_sphere_indices(fam: GeometricFamily, p: HalfPlanePoint,
                             start: int = 1) -> list[int]:
    """All m >= start with sphere_of(entry(m)) == p.  Exact and finite."""
    limit_sphere = sphere_of(fam.limit)
    if p == limit_sphere:
        return [m for m in _limit_sphere_hits(fam) if m >= start]
    off_n2 = fam.offset.norm_sq()
    s_ub = _rat_sqrt_ub(limit_sphere.s_sq)
    o_ub = _rat_sqrt_ub(off_n2)
    du = p.u - limit_sphere.u
    ds2 = p.s_sq - limit_sphere.s_sq
    hits = []
    m = start
    t = fam.ratio ** start
    for _ in range(_GEOM_SCAN_CAP):
        # no further match once the shrinking ball around the limit
        # provably excludes p (rational comparisons only)
        if du != 0 and du * du > off_n2 * t * t:
            break
        if du == 0 and abs(ds2) > 2 * s_ub * o_ub * t + off_n2 * t * t:
            break
        d = fam.entry(m)
        if d.q0 == p.u and d.im_norm_sq() == p.s_sq:
            hits.append(m)
        m += 1
        t *= fam.ratio
    else:
        raise DomainError("geometric family scan did not terminate")
    return hits


def _limit_sphere_hits(fam: GeometricFamily) -> list[int]:
    """Indices whose entry lies on the limit sphere (entry != limit always)."""
    if fam.offset.q0 != 0:
        return []
    lim, off = fam.limit, fam.offset
    a = 2 * (lim.q1 * off.q1 + lim.q2 * off.q2 + lim.q3 * off.q3)
    b = off.im_norm_sq()
    # b > 0: offset is purely imaginary and nonzero
    t_star = -Fraction(a) / b
    if t_star <= 0 or t_star >= 1:
        return []
    t = fam.ratio
    m = 1
    while t > t_star:
        t *= fam.ratio
        m += 1
    return [m] if t == t_star else []


# ---------------------------------------------------------------------
# per-component analysis of the pseudo-resolvent at a sphere
# ---------------------------------------------------------------------

@dataclass
class ComponentAnalysis:
    ker: float            # int or INF
    coker: float          # dim ker of the adjoint pseudo-resolvent
    range_closed: bool
    invertible: bool
    asc: float
    dsc: float


def _analyze_block(block: QMatrix, p: HalfPlanePoint) -> ComponentAnalysis:
    r = pseudo_resolvent_at(block, p)
    k = len(kernel_basis(r))
    if k == 0:
        k = kernel_dim_numeric(r, MEMBERSHIP_TOL)
        if k == 0:
            return ComponentAnalysis(0, 0, True, True, 0, 0)
        m = _stabilization_numeric(r)
    else:
        from .spec_fd import asc_dsc
        m = asc_dsc(r).ascent
    return ComponentAnalysis(k, k, True, False, m, m)


def _stabilization_numeric(r: QMatrix) -> int:
    c = chi(r)
    n = c.shape[0]
    ranks = [n // 2]
    power = np.eye(n, dtype=complex)
    for _ in range(n // 2 + 1):
        power = power @ c
        sv = np.linalg.svd(power, compute_uv=False)
        top = sv[0] if sv.size else 0.0
        rk = int(np.sum(sv > MEMBERSHIP_TOL * max(top, 1.0))) // 2 if top > 0 else 0
        ranks.append(rk)
        if ranks[-1] == ranks[-2]:
            break
    return len(ranks) - 2


def _analyze_constant(fam: ConstantFamily, p: HalfPlanePoint) -> ComponentAnalysis:
    if sphere_of(fam.value) == p:
        # pseudo-resolvent vanishes identically on this component
        return ComponentAnalysis(INF, INF, True, False, 1, 1)
    return ComponentAnalysis(0, 0, True, True, 0, 0)


def _analyze_geometric(fam: GeometricFamily, p: HalfPlanePoint) -> ComponentAnalysis:
    zeros = len(geometric_sphere_indices(fam, p))
    at_limit = sphere_of(fam.limit) == p
    if at_limit:
        # entries of R_q tend to 0 without all vanishing: range not closed
        asc = 1 if zeros else 0
        return ComponentAnalysis(zeros, zeros, False, False, asc, INF)
    step = 1 if zeros else 0
    return ComponentAnalysis(zeros, zeros, True, zeros == 0, step, step)


def _analyze_shift(tail: ShiftTail, p: HalfPlanePoint) -> ComponentAnalysis:
    rho_sq = p.radius_sq
    w_sq = tail.weight * tail.weight
    if rho_sq > w_sq:
        return ComponentAnalysis(0, 0, True, True, 0, 0)
    if rho_sq == w_sq:
        # characteristic roots on the unit circle: trivial kernels on both
        # sides, dense non-closed range
        return ComponentAnalysis(0, 0, False, False, 0, INF)
    if tail.direction == FORWARD:
        return ComponentAnalysis(0, 2, True, False, 0, INF)
    return ComponentAnalysis(2, 0, True, False, INF, 0)


def _analyze_components(op: StructuredOperator,
                        p: HalfPlanePoint) -> ComponentAnalysis:
    parts = []
    if op.finite_block is not None:
        parts.append(_analyze_block(op.finite_block, p))
    for fam in op.diagonal_families:
        if isinstance(fam, ConstantFamily):
            parts.append(_analyze_constant(fam, p))
        else:
            parts.append(_analyze_geometric(fam, p))
    for tail in op.shift_tails:
        parts.append(_analyze_shift(tail, p))
    ker = sum(c.ker for c in parts)
    coker = sum(c.coker for c in parts)
    return ComponentAnalysis(
        ker=ker,
        coker=coker,
        range_closed=all(c.range_closed for c in parts),
        invertible=all(c.invertible for c in parts),
        asc=max(c.asc for c in parts),
        dsc=max(c.dsc for c in parts),
    )


# ---------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------

@dataclass
class SpectralClassification:
    point: HalfPlanePoint
    in_spectrum: Membership
    point_spectrum: Membership
    residual_spectrum: Membership
    continuous_spectrum: Membership
    ker_dim: Optional[float]
    ess_left: Membership
    ess_right: Membership
    essential: Membership
    semi_fredholm: bool
    fredholm: bool
    index: Optional[int]
    index_stratum: Optional[int]
    sigma_plus_inf: Membership
    sigma_minus_inf: Membership
    sigma0: Membership
    weyl: Membership
    browder: Membership
    ascent: Optional[float]
    descent: Optional[float]
    isolated: Membership = Membership.DELEGATED
    accumulation: Membership = Membership.DELEGATED
    pi0: Membership = Membership.DELEGATED

    def partition_tag(self) -> str:
        if self.in_spectrum is Membership.DELEGATED:
            return "unknown-delegated"
        if not self.in_spectrum:
            return "resolvent"
        if self.point_spectrum is Membership.IN:
            return "sigma_pS"
        if self.residual_spectrum is Membership.IN:
            return "sigma_rS"
        if self.continuous_spectrum is Membership.IN:
            return "sigma_cS"
        return "unknown-delegated"


def classify_core(op: StructuredOperator,
                  p: HalfPlanePoint) -> SpectralClassification:
    """Everything except the topological flags (iso/acc/pi0)."""
    base = op.unperturbed()
    a = _analyze_components(base, p)

    semi_left = a.range_closed and a.ker != INF
    semi_right = a.range_closed and a.coker != INF
    semi = semi_left or semi_right       # on this class the two coincide
    fred = semi_left and semi_right
    index = int(a.ker - a.coker) if fred else None
    in_sigma = not a.invertible
    weyl_op = fred and index == 0
    in_ws = not weyl_op
    stratum = index if (fred and index != 0) else None

    if not op.is_perturbed:
        sigma0 = in_sigma and weyl_op
        browder_op = fred and a.asc != INF and a.dsc != INF
        cls = SpectralClassification(
            point=p,
            in_spectrum=Membership.of(in_sigma),
            point_spectrum=Membership.of(a.ker > 0),
            residual_spectrum=Membership.of(a.ker == 0 and a.coker > 0),
            continuous_spectrum=Membership.of(
                in_sigma and a.ker == 0 and a.coker == 0),
            ker_dim=a.ker,
            ess_left=Membership.of(not semi_left),
            ess_right=Membership.of(not semi_right),
            essential=Membership.of(not fred),
            semi_fredholm=semi,
            fredholm=fred,
            index=index,
            index_stratum=stratum,
            sigma_plus_inf=Membership.OUT,
            sigma_minus_inf=Membership.OUT,
            sigma0=Membership.of(sigma0),
            weyl=Membership.of(in_ws),
            browder=Membership.of(not browder_op),
            ascent=a.asc,
            descent=a.dsc,
        )
        return cls

    # perturbed: only the compact-perturbation invariants are exact
    return SpectralClassification(
        point=p,
        in_spectrum=Membership.IN if in_ws else Membership.DELEGATED,
        point_spectrum=Membership.DELEGATED,
        residual_spectrum=Membership.DELEGATED,
        continuous_spectrum=Membership.DELEGATED,
        ker_dim=None,
        ess_left=Membership.of(not semi_left),
        ess_right=Membership.of(not semi_right),
        essential=Membership.of(not fred),
        semi_fredholm=semi,
        fredholm=fred,
        index=index,
        index_stratum=stratum,
        sigma_plus_inf=Membership.OUT,
        sigma_minus_inf=Membership.OUT,
        sigma0=Membership.DELEGATED,
        weyl=Membership.of(in_ws),
        browder=Membership.DELEGATED,
        ascent=None,
        descent=None,
    )


def classify(op: StructuredOperator, p: HalfPlanePoint) -> SpectralClassification:
    """Full per-sphere verdict, including iso/acc/pi0 for unperturbed input."""
    cls = classify_core(op, p)
    if op.is_perturbed:
        return cls
    from .regions import spectrum_regions
    regs = spectrum_regions(op)
    cls.isolated = Membership.of(regs["iso"].contains(p))
    cls.accumulation = Membership.of(regs["acc"].contains(p))
    cls.pi0 = Membership.of(regs["pi_0"].contains(p))
    return cls


def fredholm_index(op: StructuredOperator, p: HalfPlanePoint) -> Optional[int]:
    """Index of R_q at p; None when R_q is not semi-Fredholm (undefined).

    On the supported class a semi-Fredholm pseudo-resolvent is Fredholm,
    so the value is always a finite integer when defined.
    """
    cls = classify_core(op, p)
    return cls.index if cls.semi_fredholm else None


def weyl_spectrum(op: StructuredOperator):
    """ws(A) as a RegionSet; invariant under finite-rank perturbations."""
    from .regions import spectrum_regions
    return spectrum_regions(op)["ws"]


def browder_spectrum(op: StructuredOperator):
    """Bs(A) as a RegionSet (unperturbed operators only)."""
    if op.is_perturbed:
        raise DelegatedError(
            "Browder set of a perturbed operator is delegated to the oracle")
    from .regions import spectrum_regions
    return spectrum_regions(op)["bs"]


def spectrum_regions(op: StructuredOperator):
    from .regions import spectrum_regions as _impl
    return _impl(op)
