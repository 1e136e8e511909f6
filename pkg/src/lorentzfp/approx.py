"""Rational approximation of real Lorentz transformations.

An orthochronous proper T is split as T = S B_alpha S^-1 R (boost applied
last), both space rotations are factored into X-Y-X elementary rotations,
and every angle and the boost parameter is snapped to the bounded rationals
C_k. Recomposing the snapped generators over Q gives an exact rational
Lorentz matrix close to T.

Conventions: Rx(theta) has yz-block [[cos, sin], [-sin, cos]], which is the
basic rotation with alpha = cot(theta/2); Ry(theta) is Rx(theta) carried to
the y-axis by the axis permutations, with zx-action [[cos, 0, -sin], ...].
The other common ordering T = R' S B S^-1 follows from splitting T^-1.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from .arith import best_rational_in_ck, ck_members, coefficient_height
from .errors import BoundTooLarge, LorentzError, NotOrthochronousProper, NotRotation
from .lorentz import (
    FLOAT_TOL,
    RATIONAL,
    REAL,
    Generator,
    LorentzTransform,
    Mat4,
    basic_boost,
    compose,
    elementary_half_turn,
    elementary_rotation,
    identity,
    inverse,
    minkowski_inner,
    minkowski_norm,
    named_generator,
    validate,
)

_GIMBAL = 1e-15
_ANGLE_TOL = 1e-12
ENUMERATE_MAX_K = 3


# --------------------------------------------------------------------------
# float helpers (numpy 4x4)


def _arr(t: LorentzTransform | Mat4) -> np.ndarray:
    m = t.m if isinstance(t, LorentzTransform) else t
    return np.array([float(x) for x in m.entries]).reshape(4, 4)


def _real(a: np.ndarray) -> LorentzTransform:
    return validate(Mat4(tuple(float(x) for x in a.ravel()), REAL))


def rx(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    out = np.eye(4)
    out[2, 2], out[2, 3], out[3, 2], out[3, 3] = c, s, -s, c
    return out


def ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    out = np.eye(4)
    out[1, 1], out[1, 3], out[3, 1], out[3, 3] = c, -s, s, c
    return out


def boost(alpha: float) -> np.ndarray:
    out = np.eye(4)
    c, s = (alpha + 1 / alpha) / 2, (alpha - 1 / alpha) / 2
    out[0, 0], out[0, 1], out[1, 0], out[1, 1] = c, s, s, c
    return out


def _reorthonormalize(r3: np.ndarray) -> np.ndarray:
    """Modified Gram-Schmidt on the columns of a near-rotation 3x3 block."""
    q = np.array(r3, dtype=float)
    for j in range(3):
        for i in range(j):
            q[:, j] -= (q[:, i] @ q[:, j]) * q[:, i]
        q[:, j] /= np.linalg.norm(q[:, j])
    if np.linalg.det(q) < 0:  # pragma: no cover - guarded by callers
        q[:, 2] = -q[:, 2]
    return q


def _as_rotation(r: np.ndarray) -> np.ndarray:
    out = np.eye(4)
    out[1:, 1:] = _reorthonormalize(r[1:, 1:])
    return out


def _require_orthochronous_proper(t: LorentzTransform) -> None:
    if not (t.proper and t.orthochronous):
        raise NotOrthochronousProper(f"transform lies in {t.component}")


# --------------------------------------------------------------------------
# split and Euler factorization


@dataclass(frozen=True)
class BoostRotationSplit:
    """T = S B_alpha S^-1 R with S, R space rotations and alpha >= 1."""

    S: LorentzTransform
    alpha: float
    R: LorentzTransform

    def rebuild(self) -> np.ndarray:
        s = _arr(self.S)
        return s @ boost(self.alpha) @ s.T @ _arr(self.R)


def boost_rotation_split(t: LorentzTransform) -> BoostRotationSplit:
    _require_orthochronous_proper(t)
    m = _arr(t)
    time, space = m[0, 0], m[1:, 0]
    speed = float(np.linalg.norm(space))
    if speed < 1e-12:
        return BoostRotationSplit(_real(np.eye(4)), 1.0, _real(_as_rotation(m)))
    alpha = time + speed
    n = space / speed
    b2 = math.atan2(math.hypot(n[1], n[2]), n[0])
    b1 = math.atan2(n[1], n[2])
    s = rx(b1) @ ry(b2)
    r = s @ boost(1 / alpha) @ s.T @ m
    return BoostRotationSplit(_real(s), float(alpha), _real(_as_rotation(r)))


@dataclass(frozen=True)
class EulerFactors:
    """R = Rx(theta1) Ry(theta2) Rx(theta3), theta2 in [0, pi]."""

    theta1: float
    theta2: float
    theta3: float

    def rebuild(self) -> np.ndarray:
        return rx(self.theta1) @ ry(self.theta2) @ rx(self.theta3)


def euler_factor(r: LorentzTransform | np.ndarray) -> EulerFactors:
    m = r if isinstance(r, np.ndarray) else _arr(r)
    if not (np.allclose(m[0], [1, 0, 0, 0], atol=1e-9)
            and np.allclose(m[:, 0], [1, 0, 0, 0], atol=1e-9)):
        raise NotRotation("a space rotation must fix (1,0,0,0)")
    if abs(np.linalg.det(m[1:, 1:]) - 1) > 1e-6:
        raise NotRotation("space block is not a proper rotation")
    m = _as_rotation(m)
    r3 = m[1:, 1:]
    sb = math.hypot(r3[0, 1], r3[0, 2])
    theta2 = math.atan2(sb, r3[0, 0])
    theta3 = math.atan2(r3[0, 1], -r3[0, 2]) if sb > _GIMBAL else 0.0
    # Rx(theta1) Ry(theta2) = R Rx(-theta3) sends e_y to (0, cos t1, -sin t1)
    rest = m @ rx(-theta3)
    theta1 = math.atan2(-rest[3, 2], rest[2, 2])
    return EulerFactors(theta1, theta2, theta3)


# --------------------------------------------------------------------------
# angles and parameters


class ParamKind(enum.Enum):
    PARAM = "param"
    IDENTITY = "identity"
    HALF_TURN = "half-turn"


@dataclass(frozen=True)
class RotationParam:
    kind: ParamKind
    alpha: float | Fraction | None = None

    def angle(self) -> float:
        if self.kind is ParamKind.IDENTITY:
            return 0.0
        if self.kind is ParamKind.HALF_TURN:
            return math.pi
        return 2 * math.atan(1 / float(self.alpha))


def _wrap(theta: float) -> float:
    """Representative in (-pi, pi]."""
    t = math.remainder(theta, 2 * math.pi)
    return math.pi if t <= -math.pi else t


def angle_to_param(theta: float) -> RotationParam:
    """alpha = cot(theta/2), with the two angles that have no parameter."""
    t = _wrap(theta)
    if abs(t) <= _ANGLE_TOL:
        return RotationParam(ParamKind.IDENTITY)
    if math.pi - abs(t) <= _ANGLE_TOL:
        return RotationParam(ParamKind.HALF_TURN)
    return RotationParam(ParamKind.PARAM, 1 / math.tan(t / 2))


def _angle_gap(a: float, b: float) -> float:
    return abs(_wrap(a - b))


def snap_angle(theta: float, k: int) -> RotationParam:
    """Exact-rational elementary rotation angle nearest theta.

    Candidates are the identity, the half-turn and the member of C_k nearest
    cot(theta/2).
    """
    param = angle_to_param(theta)
    if param.kind is not ParamKind.PARAM:
        return param
    cands = [RotationParam(ParamKind.IDENTITY), RotationParam(ParamKind.HALF_TURN)]
    q = best_rational_in_ck(param.alpha, k)
    if q != 0:
        cands.append(RotationParam(ParamKind.PARAM, q))
    return min(cands, key=lambda c: _angle_gap(c.angle(), theta))


# --------------------------------------------------------------------------
# rational approximation


@dataclass(frozen=True)
class Factor:
    """One exact generator: an elementary rotation about an axis (0=x, 1=y)
    or the basic boost."""

    kind: str  # "rotation" | "boost"
    axis: int | None
    param: RotationParam | Fraction

    def matrix(self) -> LorentzTransform:
        if self.kind == "boost":
            return basic_boost(Fraction(self.param), RATIONAL)
        p = self.param
        if p.kind is ParamKind.IDENTITY:
            return identity(RATIONAL)
        if p.kind is ParamKind.HALF_TURN:
            return elementary_half_turn(self.axis, RATIONAL)
        return elementary_rotation(self.axis, Fraction(p.alpha), RATIONAL)

    def inverse(self) -> Factor:
        if self.kind == "boost":
            return Factor("boost", None, 1 / Fraction(self.param))
        p = self.param
        if p.kind is ParamKind.PARAM:
            return Factor("rotation", self.axis, RotationParam(ParamKind.PARAM, -p.alpha))
        return self

    def to_json(self) -> dict:
        from .arith import format_rational

        if self.kind == "boost":
            return {"kind": "boost", "alpha": format_rational(self.param)}
        out = {"kind": "rotation", "axis": "xyz"[self.axis], "type": self.param.kind.value}
        if self.param.kind is ParamKind.PARAM:
            out["alpha"] = format_rational(self.param.alpha)
        return out


@dataclass(frozen=True)
class ApproxResult:
    Tq: LorentzTransform
    k_effective: int
    error: float
    factors: list[Factor] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "matrix": self.Tq.to_json(),
            "k_effective": self.k_effective,
            "error": self.error,
            "factors": [f.to_json() for f in self.factors],
        }


def _euler_factors(e: EulerFactors, k: int) -> list[Factor]:
    return [
        Factor("rotation", 0, snap_angle(e.theta1, k)),
        Factor("rotation", 1, snap_angle(e.theta2, k)),
        Factor("rotation", 0, snap_angle(e.theta3, k)),
    ]


def _compose_factors(factors: list[Factor]) -> LorentzTransform:
    out = identity(RATIONAL)
    for f in factors:
        if f.kind == "rotation" and f.param.kind is ParamKind.IDENTITY:
            continue
        out = compose(out, f.matrix())
    return out


def coefficient_bound(t: LorentzTransform | Mat4) -> int:
    """Smallest k with every entry in C_k."""
    m = t.m if isinstance(t, LorentzTransform) else t
    return max(coefficient_height(x) for x in m.entries)


def rational_approximate(t: LorentzTransform, k: int) -> ApproxResult:
    """Snap the S, B, S^-1, R factorization of t into C_k and recompose over Q.

    Uses at most ten generators: three for S, the boost, the exact inverses
    of S's three, and three for R.
    """
    if k < 1:
        raise LorentzError("k must be >= 1")
    if t.domain != REAL:
        t = validate(t.m.to_float())
    _require_orthochronous_proper(t)
    split = boost_rotation_split(t)
    s_factors = _euler_factors(euler_factor(split.S), k)
    r_factors = _euler_factors(euler_factor(split.R), k)
    alpha = best_rational_in_ck(split.alpha, k)
    factors = list(s_factors)
    if alpha != 1:
        factors.append(Factor("boost", None, alpha))
    factors += [f.inverse() for f in reversed(s_factors)]
    factors += r_factors
    tq = _compose_factors(factors)
    error = float(np.linalg.norm(_arr(t) - _arr(tq)))
    factors = [f for f in factors
               if f.kind == "boost" or f.param.kind is not ParamKind.IDENTITY]
    return ApproxResult(tq, coefficient_bound(tq), error, factors)


def retract_bound(k: int) -> int:
    """Coefficient bound K(k) of every product of ten snapped generators.

    Each generator with parameter a/b (|a|, b <= k) has entries n/D with
    |n|, D <= 2k^2 and a shared denominator D, so a ten-fold product has
    entries with denominator dividing the product of the D's and numerator
    at most 4^9 (2k^2)^10 in absolute value.
    """
    return 4**9 * (2 * k * k) ** 10


def in_retract(t: LorentzTransform, k: int) -> bool:
    """Membership in the retract A_k: exact rational, orthochronous proper,
    coefficients in C_K(k)."""
    return (t.domain == RATIONAL and t.proper and t.orthochronous
            and coefficient_bound(t) <= retract_bound(k))


def retract(t: LorentzTransform, k: int) -> LorentzTransform:
    """Retraction onto A_k = L+up(R) with coefficients in C_K(k).

    Members of A_k (exact rational input only) are returned unchanged;
    everything else goes through :func:`rational_approximate`, whose output
    always lies in A_k, so retract(retract(t)) == retract(t).
    """
    _require_orthochronous_proper(t)
    if in_retract(t, k):
        return t
    return rational_approximate(t, k).Tq


_REPRESENTATIVE = {
    "L+up": None,
    "L-up": Generator.PARITY,
    "L-down": Generator.TIME_REVERSAL,
    "L+down": Generator.SPACE_TIME_REVERSAL,
}


def component_representative(t: LorentzTransform) -> LorentzTransform | None:
    gen = _REPRESENTATIVE[t.component]
    return None if gen is None else named_generator(gen, t.domain)


def retract_extended(t: LorentzTransform, k: int) -> LorentzTransform:
    """Component-preserving retraction of the full Lorentz group.

    The diagonal representative P of t's component (an involution with
    entries +-1) moves t into L+up; the result is P f(P t).
    """
    rep = component_representative(t)
    if rep is None:
        return retract(t, k)
    moved = compose(rep, t)
    back = compose(named_generator(_REPRESENTATIVE[t.component], RATIONAL), retract(moved, k))
    return back


# --------------------------------------------------------------------------
# the finite set A for tiny k


def enumerate_a(k: int) -> set[LorentzTransform]:
    """All orthochronous proper Lorentz matrices with every entry in C_k.

    Column-by-column search: column 0 has norm 1 and positive time part,
    the others have norm -1 and are Minkowski-orthogonal to earlier columns.
    """
    if k > ENUMERATE_MAX_K:
        raise BoundTooLarge(f"enumerate_a is limited to k <= {ENUMERATE_MAX_K}")
    if k < 1:
        raise LorentzError("k must be >= 1")
    values = ck_members(k)
    vectors = list(product(values, repeat=4))
    timelike = [v for v in vectors if v[0] > 0 and minkowski_norm(v) == 1]
    spacelike = [v for v in vectors if minkowski_norm(v) == -1]
    out = set()
    for c0 in timelike:
        l0 = [v for v in spacelike if minkowski_inner(v, c0) == 0]
        for c1 in l0:
            l1 = [v for v in l0 if minkowski_inner(v, c1) == 0]
            for c2 in l1:
                for c3 in l1:
                    if minkowski_inner(c2, c3) != 0:
                        continue
                    m = Mat4(tuple(col[i] for i in range(4) for col in (c0, c1, c2, c3)),
                             RATIONAL)
                    t = validate(m)
                    if t.proper:
                        out.add(t)
    return out


def sorted_transforms(ts) -> list[LorentzTransform]:
    return sorted(ts, key=lambda t: t.m.entries)


def nearest_member(t: LorentzTransform, members) -> LorentzTransform:
    """Brute-force nearest member in Frobenius distance (ties: first in
    sorted order). Reference retraction for enumerable sets."""
    m = _arr(t)
    best, best_d = None, math.inf
    for cand in sorted_transforms(members):
        d = float(np.linalg.norm(m - _arr(cand)))
        if d < best_d - FLOAT_TOL:
            best, best_d = cand, d
    return best


# --------------------------------------------------------------------------
# sampling


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Haar-random space rotation via a uniform unit quaternion."""
    w, x, y, z = (q := rng.normal(size=4)) / np.linalg.norm(q)
    r3 = np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
        [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
        [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
    ])
    out = np.eye(4)
    out[1:, 1:] = r3
    return out


def max_boost_param(norm_bound: float) -> float:
    """Largest alpha with alpha + 1/alpha <= norm_bound (norm_bound >= 2)."""
    return (norm_bound + math.sqrt(norm_bound * norm_bound - 4)) / 2


def random_orthochronous(rng: np.random.Generator, norm_bound: float) -> LorentzTransform:
    """S B_alpha S^-1 R with random rotations S, R and alpha uniform in
    [1, max_boost_param(norm_bound)], so the Frobenius norm is at most
    norm_bound."""
    s, r = random_rotation(rng), random_rotation(rng)
    alpha = rng.uniform(1.0, max_boost_param(norm_bound))
    return _real(s @ boost(alpha) @ s.T @ r)
