"""4x4 Minkowski linear algebra over the reals, the rationals and F_p.

Every generator formula is written once against a :class:`Domain`. Scalars
are plain ``float``, :class:`fractions.Fraction` or
:class:`~lorentzfp.arith.FpElem`; all three support the arithmetic
operators, so the same expression evaluates in each domain.

Index 0 is time. Matrices act on column vectors, and ``A @ B`` applies B
first.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Sequence

from .arith import FpElem, PrimeField, format_rational, is_nonzero_square, to_rational
from .errors import (
    DomainMismatch,
    FormatError,
    NonSquareAlpha,
    NotLorentz,
    NotRotation,
    NotUnitNorm,
    ZeroAlpha,
)

FLOAT_TOL = 1e-9
J_DIAG = (1, -1, -1, -1)


# --------------------------------------------------------------------------
# scalar domains


@dataclass(frozen=True)
class Domain:
    """Scalar domain contract: coercion, zero test and the chronicity witness
    "is a nonzero square"."""

    name: str

    exact = True

    def coerce(self, x):
        raise NotImplementedError

    def is_zero(self, x) -> bool:
        return x == 0

    def is_nonzero_square(self, x) -> bool:
        raise NotImplementedError

    def close(self, a, b, tol: float = FLOAT_TOL) -> bool:
        return a == b

    def to_json(self):
        return self.name

    def format(self, x):
        raise NotImplementedError


@dataclass(frozen=True)
class RealDomain(Domain):
    name: str = "real"
    exact = False

    def coerce(self, x):
        if isinstance(x, FpElem):
            raise DomainMismatch("cannot view an F_p element as a real")
        return float(x)

    def is_zero(self, x) -> bool:
        return abs(x) <= FLOAT_TOL

    def is_nonzero_square(self, x) -> bool:
        return x > 0

    def close(self, a, b, tol: float = FLOAT_TOL) -> bool:
        return abs(a - b) <= tol

    def format(self, x):
        return float(x)


@dataclass(frozen=True)
class RationalDomain(Domain):
    name: str = "rational"

    def coerce(self, x):
        if isinstance(x, float):
            return Fraction(x)
        if isinstance(x, FpElem):
            raise DomainMismatch("cannot view an F_p element as a rational")
        return to_rational(x)

    def is_nonzero_square(self, x) -> bool:
        # positive rationals are squares in R, which is what chronicity means here
        return x > 0

    def format(self, x):
        return format_rational(x)


@dataclass(frozen=True)
class FpDomain(Domain):
    field: PrimeField = None  # type: ignore[assignment]
    name: str = "fp"

    @property
    def p(self) -> int:
        return self.field.p

    def coerce(self, x):
        if isinstance(x, float):
            raise DomainMismatch("cannot view a float as an F_p element")
        return FpElem(x, self.field)

    def is_nonzero_square(self, x) -> bool:
        return is_nonzero_square(x)

    def to_json(self):
        return {"fp": self.p}

    def format(self, x):
        return x.value


REAL = RealDomain()
RATIONAL = RationalDomain()


def fp(p: int | PrimeField) -> FpDomain:
    field = p if isinstance(p, PrimeField) else PrimeField(p)
    return FpDomain(field=field)


def domain_of(x) -> Domain:
    if isinstance(x, FpElem):
        return FpDomain(field=x.field)
    if isinstance(x, float):
        return REAL
    if isinstance(x, (int, Fraction)):
        return RATIONAL
    raise TypeError(f"no scalar domain for {x!r}")


# --------------------------------------------------------------------------
# matrices


def _det3(a, b, c, d, e, f, g, h, i):
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


@dataclass(frozen=True)
class Mat4:
    """A raw 4x4 matrix, row-major entries over a single domain."""

    entries: tuple
    domain: Domain

    def __post_init__(self):
        if len(self.entries) != 16:
            raise FormatError("a 4x4 matrix needs 16 entries")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Any]], domain: Domain) -> Mat4:
        if len(rows) != 4 or any(len(r) != 4 for r in rows):
            raise FormatError("expected 4 rows of 4 entries")
        return cls(tuple(domain.coerce(x) for r in rows for x in r), domain)

    @classmethod
    def identity(cls, domain: Domain) -> Mat4:
        return cls.diag((1, 1, 1, 1), domain)

    @classmethod
    def diag(cls, values: Iterable, domain: Domain) -> Mat4:
        values = list(values)
        rows = [[values[i] if i == j else 0 for j in range(4)] for i in range(4)]
        return cls.from_rows(rows, domain)

    def __getitem__(self, ij: tuple[int, int]):
        i, j = ij
        return self.entries[4 * i + j]

    def rows(self) -> list[list]:
        return [list(self.entries[4 * i:4 * i + 4]) for i in range(4)]

    def column(self, j: int) -> tuple:
        return tuple(self.entries[4 * i + j] for i in range(4))

    def __matmul__(self, other: Mat4) -> Mat4:
        if not isinstance(other, Mat4):
            return NotImplemented
        if other.domain != self.domain:
            raise DomainMismatch(f"{self.domain.to_json()} vs {other.domain.to_json()}")
        a, b = self.entries, other.entries
        out = tuple(
            a[4 * i] * b[j] + a[4 * i + 1] * b[4 + j] + a[4 * i + 2] * b[8 + j]
            + a[4 * i + 3] * b[12 + j]
            for i in range(4)
            for j in range(4)
        )
        return Mat4(out, self.domain)

    def __sub__(self, other: Mat4) -> Mat4:
        return Mat4(tuple(x - y for x, y in zip(self.entries, other.entries)), self.domain)

    def scale(self, s) -> Mat4:
        return Mat4(tuple(s * x for x in self.entries), self.domain)

    def transpose(self) -> Mat4:
        return Mat4(tuple(self.entries[4 * j + i] for i in range(4) for j in range(4)),
                    self.domain)

    def apply(self, v: Sequence) -> tuple:
        e = self.entries
        return tuple(sum(e[4 * i + j] * v[j] for j in range(4)) for i in range(4))

    def det(self):
        r = self.rows()
        total = 0
        for j in range(4):
            minor = [r[i][c] for i in range(1, 4) for c in range(4) if c != j]
            term = r[0][j] * _det3(*minor)
            total = total + term if j % 2 == 0 else total - term
        return total

    def minkowski_gram(self) -> Mat4:
        """M J M^T."""
        e = self.entries
        out = tuple(
            sum(J_DIAG[k] * e[4 * i + k] * e[4 * j + k] for k in range(4))
            for i in range(4)
            for j in range(4)
        )
        return Mat4(out, self.domain)

    def map(self, f, domain: Domain) -> Mat4:
        return Mat4(tuple(f(x) for x in self.entries), domain)

    def to_float(self) -> Mat4:
        return self.map(float, REAL)

    def close_to(self, other: Mat4, tol: float = FLOAT_TOL) -> bool:
        return all(self.domain.close(a, b, tol) for a, b in zip(self.entries, other.entries))

    def frobenius(self) -> float:
        return math.sqrt(sum(float(x) ** 2 for x in self.entries))

    def to_json(self) -> dict:
        return {
            "domain": self.domain.to_json(),
            "rows": [[self.domain.format(x) for x in row] for row in self.rows()],
        }


# --------------------------------------------------------------------------
# Lorentz transformations


class Chronicity(enum.Enum):
    ORTHOCHRONOUS = "orthochronous"
    ANTICHRONOUS = "antichronous"
    NULL_TIME = "null-time"


@dataclass(frozen=True)
class LorentzTransform:
    """A matrix known to satisfy M J M^T = J, with its classification."""

    m: Mat4
    det_part: int
    chronicity: Chronicity

    @property
    def domain(self) -> Domain:
        return self.m.domain

    @property
    def orthochronous(self) -> bool:
        return self.chronicity is Chronicity.ORTHOCHRONOUS

    @property
    def proper(self) -> bool:
        return self.det_part == 1

    @property
    def component(self) -> str:
        """One of "L+up", "L+down", "L-up", "L-down"."""
        sign = "+" if self.proper else "-"
        arrow = "up" if self.orthochronous else "down"
        return f"L{sign}{arrow}"

    def __getitem__(self, ij):
        return self.m[ij]

    def __matmul__(self, other: LorentzTransform) -> LorentzTransform:
        return compose(self, other)

    def entries(self) -> tuple:
        return self.m.entries

    def to_json(self) -> dict:
        out = self.m.to_json()
        out["det"] = self.det_part
        out["chronicity"] = self.chronicity.value
        return out


def _chronicity(m: Mat4) -> Chronicity:
    t = m.entries[0]
    if m.domain.is_zero(t):
        return Chronicity.NULL_TIME
    if m.domain.is_nonzero_square(t):
        return Chronicity.ORTHOCHRONOUS
    return Chronicity.ANTICHRONOUS


def is_lorentz(m: Mat4, tol: float = FLOAT_TOL) -> bool:
    return m.minkowski_gram().close_to(Mat4.diag(J_DIAG, m.domain), tol)


def validate(m: Mat4, tol: float = FLOAT_TOL) -> LorentzTransform:
    """Check M J M^T = J and classify by determinant sign and chronicity.

    ``tol`` only matters for the real domain.
    """
    if not is_lorentz(m, tol):
        raise NotLorentz("M J M^T != J")
    det = m.det()
    dom = m.domain
    if dom.close(det, dom.coerce(1), tol):
        det_part = 1
    elif dom.close(det, dom.coerce(-1), tol):
        det_part = -1
    else:  # pragma: no cover - M J M^T = J forces det^2 = 1
        raise NotLorentz(f"determinant {det} is not +-1")
    return LorentzTransform(m, det_part, _chronicity(m))


def _unchecked(m: Mat4) -> LorentzTransform:
    """Classify a matrix that is Lorentz by construction (exact domains)."""
    if not m.domain.exact:
        return validate(m)
    det = m.det()
    return LorentzTransform(m, 1 if det == 1 else -1, _chronicity(m))


def from_rows(rows, domain: Domain = RATIONAL, tol: float = FLOAT_TOL) -> LorentzTransform:
    return validate(Mat4.from_rows(rows, domain), tol)


def minkowski_norm(v: Sequence):
    t, x, y, z = v
    return t * t - x * x - y * y - z * z


def minkowski_inner(u: Sequence, v: Sequence):
    return u[0] * v[0] - u[1] * v[1] - u[2] * v[2] - u[3] * v[3]


def identity(domain: Domain = RATIONAL) -> LorentzTransform:
    return LorentzTransform(Mat4.identity(domain), 1, Chronicity.ORTHOCHRONOUS)


def compose(a: LorentzTransform, b: LorentzTransform) -> LorentzTransform:
    """a after b."""
    if a.domain != b.domain:
        raise DomainMismatch(f"{a.domain.to_json()} vs {b.domain.to_json()}")
    m = a.m @ b.m
    return LorentzTransform(m, a.det_part * b.det_part, _chronicity(m))


def inverse(a: LorentzTransform) -> LorentzTransform:
    """J A^T J."""
    e = a.m.entries
    out = tuple(J_DIAG[i] * J_DIAG[j] * e[4 * j + i] for i in range(4) for j in range(4))
    m = Mat4(out, a.domain)
    return LorentzTransform(m, a.det_part, _chronicity(m))


def frobenius_norm(a: LorentzTransform | Mat4) -> float:
    m = a.m if isinstance(a, LorentzTransform) else a
    return m.frobenius()


# --------------------------------------------------------------------------
# generators


def _prep_alpha(alpha, domain: Domain | None):
    domain = domain or domain_of(alpha)
    alpha = domain.coerce(alpha)
    if domain.is_zero(alpha):
        raise ZeroAlpha("alpha must be nonzero")
    return alpha, domain


def _boost(alpha, domain) -> LorentzTransform:
    inv = 1 / alpha
    c = (alpha + inv) / 2
    s = (alpha - inv) / 2
    rows = [[c, s, 0, 0], [s, c, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
    return _unchecked(Mat4.from_rows(rows, domain))


def basic_boost(alpha, domain: Domain | None = None) -> LorentzTransform:
    """B_alpha, for alpha a nonzero square of the domain."""
    alpha, domain = _prep_alpha(alpha, domain)
    if not domain.is_nonzero_square(alpha):
        raise NonSquareAlpha(f"{alpha} is not a nonzero square")
    return _boost(alpha, domain)


def basic_boost_relaxed(alpha, domain: Domain | None = None) -> LorentzTransform:
    """B_alpha for any nonzero alpha; the square condition is not enforced."""
    alpha, domain = _prep_alpha(alpha, domain)
    return _boost(alpha, domain)


def basic_rotation(alpha, domain: Domain | None = None) -> LorentzTransform:
    """R_alpha: rotation of the yz-plane with cosine (a - 1/a)/(a + 1/a) and
    sine 2/(a + 1/a). Over the reals alpha = cot(theta/2)."""
    alpha, domain = _prep_alpha(alpha, domain)
    inv = 1 / alpha
    s = alpha + inv
    if domain.is_zero(s):
        raise ZeroAlpha("alpha + 1/alpha vanishes")
    c = (alpha - inv) / s
    sn = 2 / s
    rows = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, c, sn], [0, 0, -sn, c]]
    return _unchecked(Mat4.from_rows(rows, domain))


class Generator(enum.Enum):
    HALF_TURN_X = "half-turn-x"
    AXIS_ROT3 = "axis-rot3"
    AXIS_ROT3_SQ = "axis-rot3-sq"
    SPACE_TIME_REVERSAL = "space-time-reversal"
    YZ_REFLECTION = "yz-reflection"
    TIME_REVERSAL = "time-reversal"
    PARITY = "parity"


_AXIS_ROT3 = [[1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [0, 1, 0, 0]]
_AXIS_ROT3_SQ = [[1, 0, 0, 0], [0, 0, 0, 1], [0, 1, 0, 0], [0, 0, 1, 0]]
_DIAGONALS = {
    # fixes t and x; the half-turn about the x-axis negates both y and z
    Generator.HALF_TURN_X: (1, 1, -1, -1),
    Generator.SPACE_TIME_REVERSAL: (-1, -1, -1, -1),
    Generator.YZ_REFLECTION: (-1, -1, 1, 1),
    Generator.TIME_REVERSAL: (-1, 1, 1, 1),
    Generator.PARITY: (1, -1, -1, -1),
}


def named_generator(which: Generator | str, domain: Domain = RATIONAL) -> LorentzTransform:
    which = Generator(which)
    if which is Generator.AXIS_ROT3:
        m = Mat4.from_rows(_AXIS_ROT3, domain)
    elif which is Generator.AXIS_ROT3_SQ:
        m = Mat4.from_rows(_AXIS_ROT3_SQ, domain)
    else:
        m = Mat4.diag(_DIAGONALS[which], domain)
    return _unchecked(m) if domain.exact else validate(m)


def is_space_rotation(r: LorentzTransform) -> bool:
    dom = r.domain
    e0 = r.m.column(0)
    row0 = r.m.entries[:4]
    unit = (1, 0, 0, 0)
    return r.det_part == 1 and all(
        dom.close(a, dom.coerce(b)) for a, b in zip(e0 + row0, unit + unit)
    )


def conjugate_boost(r: LorentzTransform, alpha) -> LorentzTransform:
    """R B_alpha R^-1 for a space rotation R."""
    if not is_space_rotation(r):
        raise NotRotation("conjugating transform must fix (1,0,0,0)")
    return compose(compose(r, basic_boost(alpha, r.domain)), inverse(r))


def elementary_rotation(axis: int, alpha, domain: Domain | None = None) -> LorentzTransform:
    """Basic rotation carried to the given space axis (0=x, 1=y, 2=z) by the
    axis permutations."""
    rot = basic_rotation(alpha, domain)
    return _carry_to_axis(rot, axis)


def elementary_half_turn(axis: int, domain: Domain = RATIONAL) -> LorentzTransform:
    return _carry_to_axis(named_generator(Generator.HALF_TURN_X, domain), axis)


def _carry_to_axis(rot: LorentzTransform, axis: int) -> LorentzTransform:
    if axis == 0:
        return rot
    dom = rot.domain
    # AXIS_ROT3_SQ sends x to y, AXIS_ROT3 sends x to z
    q = named_generator(Generator.AXIS_ROT3_SQ if axis == 1 else Generator.AXIS_ROT3, dom)
    return compose(compose(q, rot), inverse(q))


def line_reflection(a: Sequence, domain: Domain | None = None) -> LorentzTransform:
    """Reflection in the line through a, x -> 2 mu(a) <x,a> a - x.

    As a matrix this is 2 mu(a) a (J a)^T - I; a must have Minkowski norm +-1.
    """
    domain = domain or domain_of(a[0])
    a = [domain.coerce(x) for x in a]
    mu = minkowski_norm(a)
    if domain.close(mu, domain.coerce(1)):
        mu = domain.coerce(1)
    elif domain.close(mu, domain.coerce(-1)):
        mu = domain.coerce(-1)
    else:
        raise NotUnitNorm(f"mu(a) = {mu}, expected +-1")
    ja = [J_DIAG[i] * a[i] for i in range(4)]
    rows = [[2 * mu * a[i] * ja[j] - (1 if i == j else 0) for j in range(4)]
            for i in range(4)]
    m = Mat4.from_rows(rows, domain)
    return _unchecked(m) if domain.exact else validate(m)


def boost_velocity(alpha, domain: Domain | None = None):
    """(alpha - 1/alpha)/(alpha + 1/alpha)."""
    alpha, domain = _prep_alpha(alpha, domain)
    inv = 1 / alpha
    return (alpha - inv) / (alpha + inv)


def velocity_of(b: LorentzTransform):
    """Velocity read off a boost matrix in the tx-plane: m[1][0] / m[0][0]."""
    return b.m[1, 0] / b.m[0, 0]


# --------------------------------------------------------------------------
# JSON


def domain_from_json(value) -> Domain:
    if value == "real":
        return REAL
    if value == "rational":
        return RATIONAL
    if isinstance(value, dict) and set(value) == {"fp"} and isinstance(value["fp"], int):
        return fp(value["fp"])
    raise FormatError(f"unknown domain {value!r}")


def matrix_from_json(obj: dict) -> Mat4:
    if not isinstance(obj, dict) or "domain" not in obj or "rows" not in obj:
        raise FormatError("matrix object needs 'domain' and 'rows'")
    domain = domain_from_json(obj["domain"])
    rows = obj["rows"]
    if not isinstance(rows, list) or len(rows) != 4 or any(
        not isinstance(r, list) or len(r) != 4 for r in rows
    ):
        raise FormatError("'rows' must be 4 lists of 4 entries")
    flat = [x for r in rows for x in r]
    if domain is REAL:
        if any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in flat):
            raise FormatError("real entries must be numbers")
    elif domain is RATIONAL:
        if any(isinstance(x, (float, bool)) for x in flat):
            raise FormatError("rational entries must be 'num/den' strings or integers")
    else:
        if any(isinstance(x, bool) or not isinstance(x, int) or not 0 <= x < domain.p
               for x in flat):
            raise FormatError(f"F_{domain.p} entries must be integers in [0, p)")
    return Mat4.from_rows(rows, domain)
