"""The finite side: projecting rational Lorentz matrices to F_p, certifying
local isomorphisms, and checking generation of L+(F_p) by enumeration.
"""
from __future__ import annotations

import math
import os
from collections.abc import Set
from dataclasses import asdict, dataclass
from fractions import Fraction

from . import kernels
from .arith import (
    FpElem,
    PrimeField,
    canonical_map,
    is_nonzero_square,
    lt_p,
    primitive_root,
)
from .chain import theorem1_bound
from .errors import (
    BoundTooLarge,
    DegenerateDenominator,
    FieldMismatch,
    LorentzError,
    MemoryBudgetExceeded,
    NotInLocalization,
)
from .lorentz import (
    Generator,
    LorentzTransform,
    Mat4,
    basic_boost,
    basic_boost_relaxed,
    boost_velocity,
    elementary_half_turn,
    elementary_rotation,
    fp,
    named_generator,
    validate,
)

DEFAULT_CAP = int(os.environ.get("LORENTZFP_MEMORY_CAP", 10**7))
ENUMERATE_MAX_P = 11


def _field(f: PrimeField | int) -> PrimeField:
    return f if isinstance(f, PrimeField) else PrimeField(f)


def project(t: LorentzTransform, f: PrimeField | int) -> LorentzTransform:
    """Entrywise canonical map Z_(p) -> F_p of a rational Lorentz matrix."""
    field = _field(f)
    if t.domain.name != "rational":
        raise LorentzError("only rational transforms can be projected")
    m = Mat4(tuple(canonical_map(q, field) for q in t.m.entries), fp(field))
    return validate(m)


# --------------------------------------------------------------------------
# integer-scaled rational matrices, for the pairwise products in A u AA


@dataclass(frozen=True)
class _Scaled:
    """Rational matrix as integer entries over one positive denominator,
    reduced so that gcd(entries, den) = 1."""

    nums: tuple[int, ...]
    den: int

    @classmethod
    def of(cls, t: LorentzTransform) -> _Scaled:
        den = math.lcm(*(q.denominator for q in t.m.entries))
        return cls.reduced([q.numerator * (den // q.denominator) for q in t.m.entries], den)

    @classmethod
    def reduced(cls, nums, den) -> _Scaled:
        g = math.gcd(den, *nums)
        return cls(tuple(n // g for n in nums), den // g)

    def __matmul__(self, other: _Scaled) -> _Scaled:
        a, b = self.nums, other.nums
        out = tuple(
            a[4 * i] * b[j] + a[4 * i + 1] * b[4 + j] + a[4 * i + 2] * b[8 + j]
            + a[4 * i + 3] * b[12 + j]
            for i in range(4)
            for j in range(4)
        )
        return _Scaled.reduced(out, self.den * other.den)

    def height(self) -> int:
        h = 0
        for n in self.nums:
            g = math.gcd(n, self.den)
            h = max(h, abs(n) // g, self.den // g)
        return h

    def residues(self, p: int) -> tuple[int, ...]:
        if self.den % p == 0:
            raise NotInLocalization(f"denominator {self.den} divisible by {p}")
        inv = pow(self.den, -1, p)
        return tuple(n * inv % p for n in self.nums)

    def time_component_positive(self) -> bool:
        return self.nums[0] > 0

    def to_transform(self) -> LorentzTransform:
        from .lorentz import RATIONAL

        return validate(Mat4(tuple(Fraction(n, self.den) for n in self.nums), RATIONAL))


@dataclass(frozen=True)
class LocalIsoCertificate:
    k: int
    effective_bound: int
    p: int
    size_A: int
    size_AA: int
    size_union: int
    injective: bool
    homomorphic: bool
    orthochronicity_preserved: bool
    bound_check: bool
    collisions: int = 0
    non_orthochronous_images: int = 0

    @property
    def valid(self) -> bool:
        return self.injective and self.homomorphic

    def to_json(self) -> dict:
        out = asdict(self)
        out["valid"] = self.valid
        return out


def products(a) -> set:
    """AA = {xy : x, y in a} as exact rational transforms."""
    scaled = [_Scaled.of(t) for t in a]
    return {s.to_transform() for s in {x @ y for x in scaled for y in scaled}}


def effective_bound(a) -> int:
    """Coefficient bound of A u AA."""
    scaled = [_Scaled.of(t) for t in a]
    union = set(scaled) | {x @ y for x in scaled for y in scaled}
    return max(s.height() for s in union)


def local_iso_check(a, f: PrimeField | int, k: int | None = None) -> LocalIsoCertificate:
    """Certify that the canonical map restricted to A u AA is a local
    isomorphism onto its image.

    Injectivity is checked on all of A u AA; multiplicativity
    sigma(xy) = sigma(x) sigma(y) on every ordered pair of A; orthochronicity
    of the image of every orthochronous member of A u AA. ``k`` defaults to
    the coefficient bound of A and only feeds the 32 k^16 < p report.
    """
    field = _field(f)
    p = field.p
    members = list(a)
    if not members:
        raise LorentzError("A must be nonempty")
    scaled = [_Scaled.of(t) for t in members]
    res = [s.residues(p) for s in scaled]
    prods: dict[_Scaled, tuple] = {}
    homomorphic = True
    for x, rx_ in zip(scaled, res):
        for y, ry_ in zip(scaled, res):
            xy = x @ y
            img = xy.residues(p)
            if img != kernels.matmul_mod(rx_, ry_, p):
                homomorphic = False
            prods[xy] = img
    union = dict(zip(scaled, res))
    union.update(prods)
    images = set(union.values())
    collisions = len(union) - len(images)
    bad_time = sum(
        1 for s, img in union.items()
        if s.time_component_positive() and not is_nonzero_square(FpElem(img[0], field))
    )
    k_a = k if k is not None else max(s.height() for s in scaled)
    return LocalIsoCertificate(
        k=k_a,
        effective_bound=max(s.height() for s in union),
        p=p,
        size_A=len(set(scaled)),
        size_AA=len(prods),
        size_union=len(union),
        injective=collisions == 0,
        homomorphic=homomorphic,
        orthochronicity_preserved=bad_time == 0,
        bound_check=theorem1_bound(k_a) < p,
        collisions=collisions,
        non_orthochronous_images=bad_time,
    )


# --------------------------------------------------------------------------
# finite matrix sets


class FpMatrixSet(Set):
    """Immutable set of 4x4 matrices over F_p, stored as sorted integer keys."""

    def __init__(self, keys, p: int):
        self._keys = tuple(keys)
        self._lookup = frozenset(self._keys)
        self.p = p

    def __len__(self):
        return len(self._keys)

    def __iter__(self):
        dom = fp(self.p)
        for key in self._keys:
            m = Mat4(tuple(FpElem(e, dom.field) for e in kernels.decode(key, self.p)), dom)
            yield validate(m)

    def __contains__(self, t):
        if isinstance(t, LorentzTransform):
            t = t.m
        if not isinstance(t, Mat4) or t.domain.name != "fp" or t.domain.p != self.p:
            return False
        return kernels.encode([x.value for x in t.entries], self.p) in self._lookup

    def __eq__(self, other):
        if isinstance(other, FpMatrixSet):
            return self.p == other.p and self._keys == other._keys
        return Set.__eq__(self, other)

    __hash__ = None

    def keys(self) -> tuple[int, ...]:
        return self._keys


def _entries(t: LorentzTransform) -> tuple[int, ...]:
    return tuple(x.value for x in t.m.entries)


def bfs_closure(gens, f: PrimeField | int, cap: int = DEFAULT_CAP) -> FpMatrixSet:
    """Closure of ``gens`` under composition, by breadth-first search of the
    Cayley graph."""
    field = _field(f)
    gens = list(gens)
    if not gens:
        raise LorentzError("need at least one generator")
    for g in gens:
        if g.domain.name != "fp" or g.domain.p != field.p:
            raise FieldMismatch(f"generator not over F_{field.p}")
    keys = kernels.bfs_closure([_entries(g) for g in gens], field.p, cap)
    if keys is None:
        raise MemoryBudgetExceeded(f"closure exceeds {cap} elements")
    return FpMatrixSet(keys, field.p)


def standard_generators(f: PrimeField | int) -> list[LorentzTransform]:
    """Basic boosts, all elementary space rotations about x, y, z (basic
    rotations and half-turns), and space-time reversal."""
    field = _field(f)
    dom = fp(field)
    gens = []
    for a in range(1, field.p):
        alpha = FpElem(a, field)
        if is_nonzero_square(alpha):
            gens.append(basic_boost(alpha, dom))
        if (alpha + alpha.inverse()).value:
            gens += [elementary_rotation(axis, alpha, dom) for axis in range(3)]
    gens += [elementary_half_turn(axis, dom) for axis in range(3)]
    gens.append(named_generator(Generator.SPACE_TIME_REVERSAL, dom))
    return gens


def group_order(p: int) -> int:
    """|L+(F_p)| = p^2 (p^2 + 1)(p^2 - 1) for p = 3 mod 4."""
    return p * p * (p * p + 1) * (p * p - 1)


def enumerate_group(f: PrimeField | int) -> FpMatrixSet:
    """Every det-1 matrix over F_p with M J M^T = J, built column by column
    from Minkowski-orthonormal frames. Independent of any generating set."""
    field = _field(f)
    if field.p > ENUMERATE_MAX_P:
        raise BoundTooLarge(f"enumerate_group is limited to p <= {ENUMERATE_MAX_P}")
    return FpMatrixSet(kernels.lorentz_frames(field.p), field.p)


# --------------------------------------------------------------------------
# boost groups, chronicity of products, velocities


def boost_group(f: PrimeField | int) -> tuple[FpElem, int]:
    """Generator g = r^2 (r the least primitive root) of the nonzero squares,
    and their count (p - 1)/2. B_g generates the basic boosts."""
    field = _field(f)
    if field.p % 4 != 3:
        raise LorentzError("boost groups are set up for p = 3 mod 4")
    r = primitive_root(field)
    return FpElem(r * r, field), (field.p - 1) // 2


def find_antichronous_pair(f: PrimeField | int):
    """Least (alpha, gamma) of nonzero squares with B_alpha, B_gamma
    orthochronous but B_alpha B_gamma = B_(alpha gamma) not; None if none."""
    field = _field(f)
    dom = fp(field)
    squares = [FpElem(a, field) for a in range(1, field.p)
               if is_nonzero_square(FpElem(a, field))]
    ortho = {a.value for a in squares if basic_boost(a, dom).orthochronous}
    for a in squares:
        if a.value not in ortho:
            continue
        for g in squares:
            if g.value in ortho and (a * g).value not in ortho:
                return a, g
    return None


def velocity_addition(v1, v2):
    """(v1 + v2)/(1 + v1 v2) in any scalar domain."""
    den = 1 + v1 * v2
    if den == 0:
        raise DegenerateDenominator("1 + v1 v2 = 0")
    return (v1 + v2) / den


@dataclass(frozen=True)
class VelocityBoundsReport:
    alpha: int
    velocity: int
    alpha_sq_plus_one_square: bool
    degenerate: bool
    lower: bool  # -1 <_p v
    upper: bool  # v <_p 1

    @property
    def implication_holds(self) -> bool:
        return self.degenerate or not self.alpha_sq_plus_one_square or (self.lower and self.upper)


def velocity_bounds_check(alpha: FpElem) -> VelocityBoundsReport:
    """Whether alpha^2 + 1 is a square and whether -1 <_p v_alpha <_p 1."""
    if not is_nonzero_square(alpha):
        raise LorentzError(f"{alpha.value} is not a nonzero square mod {alpha.p}")
    field = alpha.field
    s = alpha * alpha + 1
    if s.value == 0:
        # alpha^2 = -1 would make alpha + 1/alpha vanish; impossible for p = 3 mod 4
        return VelocityBoundsReport(alpha.value, 0, False, True, False, False)
    v = boost_velocity(alpha)
    one = FpElem(1, field)
    report = VelocityBoundsReport(
        alpha=alpha.value,
        velocity=v.value,
        alpha_sq_plus_one_square=is_nonzero_square(s),
        degenerate=False,
        lower=lt_p(-one, v),
        upper=lt_p(v, one),
    )
    assert report.implication_holds, report
    return report


def boost_with(alpha: FpElem) -> LorentzTransform:
    """B_alpha over F_p without the square requirement (section-4 experiments)."""
    return basic_boost_relaxed(alpha, fp(alpha.field))
