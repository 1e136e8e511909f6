"""Exact scalars: rationals, the sets C_k, prime fields and quadratic residues.

Rationals are :class:`fractions.Fraction`, which is always stored reduced with
a positive denominator, so membership in ``C_k`` is a two-comparison check.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering

from .errors import (
    FieldMismatch,
    FormatError,
    LorentzError,
    NotInLocalization,
    NotPrime,
    ZeroInput,
)

Rational = Fraction

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
# First 13 primes as Miller-Rabin bases are deterministic below this bound.
_MR_DETERMINISTIC_LIMIT = 3_317_044_064_679_887_385_961_981
MR_ROUNDS = 40


# --------------------------------------------------------------------------
# rationals and C_k


def to_rational(value) -> Fraction:
    """Parse ``"num/den"``, an int, or a Fraction. Floats are rejected."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise FormatError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            if "/" in text:
                num, den = text.split("/")
                return Fraction(int(num), int(den))
            return Fraction(int(text))
        except (ValueError, ZeroDivisionError) as exc:
            raise FormatError(f"not a rational: {value!r}") from exc
    raise FormatError(f"not a rational: {value!r}")


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def in_ck(q: Fraction, k: int) -> bool:
    """True iff q = s/t for integers with |s| <= k and 0 < |t| <= k."""
    if k < 1:
        raise LorentzError("C_k needs k >= 1")
    q = Fraction(q)
    return abs(q.numerator) <= k and q.denominator <= k


def ck_members(k: int) -> list[Fraction]:
    """All members of C_k, sorted."""
    out = {Fraction(s, t) for s in range(-k, k + 1) for t in range(1, k + 1)}
    return sorted(out)


def coefficient_height(q: Fraction) -> int:
    """Smallest k with q in C_k."""
    q = Fraction(q)
    return max(abs(q.numerator), q.denominator)


def _neighbours(x: Fraction, k: int) -> tuple[Fraction, Fraction | None]:
    """Closest members of C_k at or below / at or above x, for 0 <= x <= k.

    Walks the Stern-Brocot tree, jumping whole runs of same-direction steps
    at once. Numerator and denominator both grow down the tree, so the
    bounded fractions form an ancestor-closed subtree and the final bracket
    holds x's neighbours. The upper end is None only while it is still 1/0.
    """
    a, b = 0, 1  # lower end a/b
    c, d = 1, 0  # upper end c/d
    if x == 0:
        return Fraction(0), Fraction(0)
    while True:
        mn, md = a + c, b + d
        if mn > k or md > k:
            break
        m = Fraction(mn, md)
        if m == x:
            return m, m
        if m < x:
            j = math.floor((x * b - a) / (c - x * d))
            j = min(j, (k - a) // c)
            if d:
                j = min(j, (k - b) // d)
            a, b = a + j * c, b + j * d
            if Fraction(a, b) == x:
                return Fraction(a, b), Fraction(a, b)
        else:
            j = math.floor((c - x * d) / (x * b - a))
            if a:
                j = min(j, (k - c) // a)
            j = min(j, (k - d) // b)
            c, d = c + j * a, d + j * b
            if Fraction(c, d) == x:
                return Fraction(c, d), Fraction(c, d)
    return Fraction(a, b), (Fraction(c, d) if d else None)


def best_rational_in_ck(x: float | Fraction, k: int) -> Fraction:
    """Closest member of C_k to x.

    Ties go to the smaller denominator, then to the smaller value. Inputs
    outside [-k, k] are clamped first.
    """
    if k < 1:
        raise LorentzError("C_k needs k >= 1")
    if isinstance(x, float) and not math.isfinite(x):
        raise LorentzError(f"cannot approximate {x}")
    xq = Fraction(x)
    xq = max(Fraction(-k), min(Fraction(k), xq))
    sign = -1 if xq < 0 else 1
    lo, hi = _neighbours(abs(xq), k)
    if hi is None:
        hi = lo
    if sign < 0:
        lo, hi = -hi, -lo
    candidates = {lo, hi}
    return min(candidates, key=lambda q: (abs(xq - q), q.denominator, q))


# --------------------------------------------------------------------------
# primality


def _mr_witness(n: int, a: int, d: int, s: int) -> bool:
    """True if a proves n composite."""
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return False
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return False
    return True


def is_prime(n: int, rounds: int = MR_ROUNDS) -> bool:
    """Miller-Rabin; deterministic below 3.3e24, ``rounds`` random bases above."""
    if n < 2:
        return False
    for q in _SMALL_PRIMES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    if n < _MR_DETERMINISTIC_LIMIT:
        bases = _SMALL_PRIMES[:13]
    else:
        rng = random.Random(n)
        bases = [rng.randrange(2, n - 1) for _ in range(rounds)]
    return not any(_mr_witness(n, a, d, s) for a in bases)


def prove_prime(n: int, trial_limit: int = 1_000_000) -> bool | None:
    """Deterministic primality verdict, or None when no proof was found.

    Below 3.3e24 the fixed-base Miller-Rabin test is a proof. Above it a
    Pocklington certificate is attempted from the trial-division-factored
    part of n - 1.
    """
    if n < _MR_DETERMINISTIC_LIMIT:
        return is_prime(n)
    if not is_prime(n):
        return False
    rest, factored, primes = n - 1, 1, []
    q = 2
    while q <= trial_limit and q * q <= rest:
        if rest % q == 0:
            primes.append(q)
            while rest % q == 0:
                rest //= q
                factored *= q
        q += 1 if q == 2 else 2
    if rest > 1 and rest <= trial_limit * trial_limit:
        primes.append(rest)
        factored *= rest
        rest = 1
    if factored * factored <= n:
        return None
    for q in primes:
        for a in range(2, 200):
            if pow(a, n - 1, n) != 1:
                return False
            if math.gcd(pow(a, (n - 1) // q, n) - 1, n) == 1:
                break
        else:
            return None
    return True


# --------------------------------------------------------------------------
# prime fields


@dataclass(frozen=True)
class PrimeField:
    """The field F_p for an odd prime p."""

    p: int

    def __post_init__(self):
        if not isinstance(self.p, int) or self.p < 3 or not is_prime(self.p):
            raise NotPrime(f"{self.p} is not an odd prime")

    @property
    def minkowski_admissible(self) -> bool:
        return self.p % 8 == 7

    def __call__(self, value) -> FpElem:
        return FpElem(value, self)

    def elements(self) -> list[FpElem]:
        return [FpElem(v, self) for v in range(self.p)]


@total_ordering
class FpElem:
    """A residue class mod p.

    Ordering is by representative in [0, p) and exists only so that results
    can be sorted deterministically; it carries no field meaning.
    """

    __slots__ = ("value", "field")

    def __init__(self, value, field: PrimeField):
        if isinstance(value, FpElem):
            if value.field != field:
                raise FieldMismatch(f"{value.field.p} != {field.p}")
            value = value.value
        elif isinstance(value, Fraction):
            value = canonical_map(value, field).value
        elif not isinstance(value, int) or isinstance(value, bool):
            raise TypeError(f"cannot build F_{field.p} element from {value!r}")
        self.value = value % field.p
        self.field = field

    @property
    def p(self) -> int:
        return self.field.p

    def _coerce(self, other) -> FpElem | None:
        if isinstance(other, FpElem):
            if other.field.p != self.field.p:
                raise FieldMismatch(f"F_{self.p} vs F_{other.p}")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return FpElem(other, self.field)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FpElem(self.value + o.value, self.field)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FpElem(self.value - o.value, self.field)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FpElem(o.value - self.value, self.field)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FpElem(self.value * o.value, self.field)

    __rmul__ = __mul__

    def inverse(self) -> FpElem:
        if self.value == 0:
            raise ZeroDivisionError(f"0 has no inverse in F_{self.p}")
        return FpElem(pow(self.value, -1, self.p), self.field)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __neg__(self):
        return FpElem(-self.value, self.field)

    def __pos__(self):
        return self

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return FpElem(pow(self.value, e, self.p), self.field)

    def __eq__(self, other):
        if isinstance(other, FpElem):
            return self.field.p == other.field.p and self.value == other.value
        if isinstance(other, int) and not isinstance(other, bool):
            return self.value == other % self.p
        return NotImplemented

    def __lt__(self, other):
        if not isinstance(other, FpElem):
            return NotImplemented
        return (self.p, self.value) < (other.p, other.value)

    def __hash__(self):
        return hash((self.value, self.field.p))

    def __int__(self):
        return self.value

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"FpElem({self.value}, p={self.p})"

    def __str__(self):
        return str(self.value)


def canonical_map(q, field: PrimeField) -> FpElem:
    """Image of q in Z_(p) under the canonical surjection onto F_p."""
    q = Fraction(q)
    p = field.p
    if q.denominator % p == 0:
        raise NotInLocalization(f"{format_rational(q)} is not in Z_({p})")
    value = q.numerator * pow(q.denominator, -1, p) % p
    return FpElem(value, field)


def _nonzero(x: FpElem) -> None:
    if x.value == 0:
        raise ZeroInput("0 is neither a residue nor a non-residue here")


def is_quadratic_residue(x: FpElem) -> bool:
    """Euler's criterion. Zero raises :class:`ZeroInput`."""
    _nonzero(x)
    return pow(x.value, (x.p - 1) // 2, x.p) == 1


def is_nonzero_square(x: FpElem) -> bool:
    """Like :func:`is_quadratic_residue` but False for zero."""
    return x.value != 0 and pow(x.value, (x.p - 1) // 2, x.p) == 1


def sqrt_mod(x: FpElem) -> FpElem | None:
    """Smaller square root of x, or None if x is a non-residue."""
    _nonzero(x)
    p, a = x.p, x.value
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        r = pow(a, (p + 1) // 4, p)
    else:
        # Tonelli-Shanks
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = 2
        while pow(z, (p - 1) // 2, p) != p - 1:
            z += 1
        m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
        while t != 1:
            i, t2 = 0, t
            while t2 != 1:
                t2 = t2 * t2 % p
                i += 1
            b = pow(c, 1 << (m - i - 1), p)
            m, c = i, b * b % p
            t, r = t * c % p, r * b % p
    return FpElem(min(r, p - r), x.field)


def lt_p(x: FpElem, y: FpElem) -> bool:
    """Kustaanheimo's order: x <_p y iff y - x is a nonzero square."""
    if x.p != y.p:
        raise FieldMismatch(f"F_{x.p} vs F_{y.p}")
    return is_nonzero_square(y - x)


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd positive n."""
    if n <= 0 or n % 2 == 0:
        raise LorentzError("Jacobi symbol needs odd positive n")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def primitive_root(field: PrimeField) -> int:
    """Least primitive root of F_p."""
    p = field.p
    n, factors, q = p - 1, [], 2
    while q * q <= n:
        if n % q == 0:
            factors.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        factors.append(n)
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in factors):
            return g
    raise LorentzError(f"no primitive root mod {p}")  # unreachable for primes


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, n + 1, i)))
    return [i for i, flag in enumerate(sieve) if flag]
