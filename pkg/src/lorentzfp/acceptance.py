"""The acceptance suite: nine end-to-end checks at their stated tolerances
and runtime budgets.

Each check recomputes its expected values with a small brute-force oracle
(residue tables, trial division, exhaustive search) that shares no code path
with the routine under test, then compares. Shared by the ``acceptance`` CLI
command and ``tests/test_acceptance.py``.
"""
from __future__ import annotations

import random
import resource
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .approx import (
    enumerate_a,
    random_orthochronous,
    rational_approximate,
    retract,
)
from .chain import ChainPrimeRequest, find_chain_prime, find_theorem1_prime
from .finlorentz import (
    bfs_closure,
    effective_bound,
    enumerate_group,
    find_antichronous_pair,
    group_order,
    local_iso_check,
    standard_generators,
    velocity_addition,
    velocity_bounds_check,
)
from .arith import FpElem, PrimeField, lt_p
from .lorentz import (
    REAL,
    RATIONAL,
    basic_boost,
    basic_rotation,
    compose,
    elementary_rotation,
    fp,
    frobenius_norm,
    identity,
    line_reflection,
    validate,
    velocity_of,
)

# Pinned after the first run: at seed 0 every sample already passes at k = 500
# (max error 8.5e-3); 1000 leaves a 2.5x margin (max error 4.0e-3).
APPROX_K = 1000
APPROX_EPSILON = 1e-2
APPROX_M = 10.0
APPROX_SAMPLES = 1000

# Golden constants from the first verified runs (transcripts in the tests).
THEOREM1_K2_PRIME = 2_097_223
ANTICHRONOUS_PAIR_23 = (9, 9)


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    seconds: float = 0.0
    budget: float = 0.0
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (f"[{verdict}] criterion {self.number}: {self.name} "
                f"({self.seconds:.2f}s / {self.budget:g}s budget)")

    def to_json(self) -> dict:
        return {
            "criterion": self.number,
            "name": self.name,
            "passed": self.passed,
            "seconds": round(self.seconds, 3),
            "budget_seconds": self.budget,
            "details": self.details,
        }


# --------------------------------------------------------------------------
# oracles


def _trial_division_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _squares(p: int) -> set[int]:
    return {x * x % p for x in range(1, p)}


def _naive_chain_prime(k: int, above: int = 0) -> int:
    p = max(above, k) + 1
    while True:
        if p % 8 == 7 and _trial_division_prime(p):
            sq = _squares(p)
            if all(n % p in sq for n in range(1, k + 1)):
                return p
        p += 1


def _peak_rss_mb() -> float:
    rss = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
    # kilobytes on Linux, bytes on macOS
    return rss / (1024 * 1024) if sys.platform == "darwin" else rss / 1024


# --------------------------------------------------------------------------
# criteria


def check_chain_primes() -> dict:
    got = {k: find_chain_prime(ChainPrimeRequest(k)).p for k in range(2, 7)}
    oracle = {k: _naive_chain_prime(k) for k in range(2, 7)}
    expected = {2: 7, 3: 23, 4: 23, 5: 71, 6: 71}
    return {"passed": got == oracle == expected, "found": got, "oracle": oracle}


def check_theorem1_primes() -> dict:
    p1 = find_theorem1_prime(1, 1)
    p2 = find_theorem1_prime(2, 2)
    bound = 32 * 2**16
    # no prime = 7 mod 8 strictly between the bound and p2 (2 is automatic)
    gap_clear = not any(_trial_division_prime(n)
                        for n in range(bound + 1, p2.p) if n % 8 == 7)
    ok = (p1.p == _naive_chain_prime(1, 32) == 47
          and p2.p == THEOREM1_K2_PRIME
          and _trial_division_prime(p2.p) and p2.p % 8 == 7 and p2.p > bound
          and gap_clear)
    return {"passed": ok, "k1": p1.p, "k2": p2.p, "k2_transcript": p2.transcript}


def check_dickson() -> dict:
    closure = bfs_closure(standard_generators(7), 7)
    enumerated = enumerate_group(7)
    formula = 7**2 * (7**2 + 1) * (7**2 - 1)
    ok = (closure == enumerated and len(closure) == formula == 117_600
          and group_order(7) == formula)
    peak = _peak_rss_mb()
    return {"passed": ok and peak < 2048, "bfs_order": len(closure),
            "enumerated_order": len(enumerated), "formula": formula,
            "equal": closure == enumerated, "peak_rss_mb": round(peak)}


def check_local_isomorphism() -> dict:
    a = enumerate_a(2)
    b = effective_bound(a)
    p = find_theorem1_prime(2, b).p
    cert = local_iso_check(a, p, k=2)
    ok = cert.injective and cert.homomorphic and cert.orthochronicity_preserved
    return {"passed": ok, "certificate": cert.to_json()}


def check_approximation(seed: int = 0) -> dict:
    rng = np.random.default_rng(seed)
    worst, norm_ok, idempotent = 0.0, True, True
    for _ in range(APPROX_SAMPLES):
        t = random_orthochronous(rng, APPROX_M)
        norm_ok &= frobenius_norm(t) <= APPROX_M + 1e-9
        res = rational_approximate(t, APPROX_K)
        worst = max(worst, res.error)
        f1 = retract(t, APPROX_K)
        idempotent &= f1 == res.Tq and retract(f1, APPROX_K) == f1
    ok = norm_ok and idempotent and worst < APPROX_EPSILON
    return {"passed": ok, "k": APPROX_K, "epsilon": APPROX_EPSILON, "M": APPROX_M,
            "samples": APPROX_SAMPLES, "max_error": worst, "idempotent": idempotent}


def check_velocity_addition() -> dict:
    p = 23
    f = PrimeField(p)
    dom = fp(f)
    squares = sorted(_squares(p))
    mismatches = 0
    for a in squares:
        for g in squares:
            ba, bg = basic_boost(FpElem(a, f), dom), basic_boost(FpElem(g, f), dom)
            prod = compose(ba, bg)
            va, vg = velocity_of(ba), velocity_of(bg)
            if velocity_of(prod) != velocity_addition(va, vg):
                mismatches += 1
            if prod != basic_boost(FpElem(a * g % p, f), dom):
                mismatches += 1
    rational = velocity_addition(Fraction(3, 5), Fraction(3, 5))
    ok = mismatches == 0 and rational == Fraction(15, 17)
    return {"passed": ok, "pairs": len(squares) ** 2, "mismatches": mismatches,
            "rational": str(rational)}


def check_antichronous_pair() -> dict:
    p = 23
    pair = find_antichronous_pair(p)
    sq = _squares(p)

    def time_entry(a: int) -> int:
        # (a + 1/a)/2 mod p
        return (a + pow(a, -1, p)) * pow(2, -1, p) % p

    if pair is None:
        return {"passed": False, "pair": None}
    a, g = pair[0].value, pair[1].value
    ok = (a in sq and g in sq and time_entry(a) in sq and time_entry(g) in sq
          and time_entry(a * g % p) not in sq and (a, g) == ANTICHRONOUS_PAIR_23)
    return {"passed": ok, "pair": [a, g], "product": a * g % p}


def _random_fraction(rnd: random.Random, size: int = 1000) -> Fraction:
    return Fraction(rnd.randint(1, size), rnd.randint(1, size))


def _random_rational_lorentz(rnd: random.Random) -> object:
    t = identity(RATIONAL)
    for _ in range(3):
        a = _random_fraction(rnd, 20)
        t = compose(t, basic_boost(a * a, RATIONAL))
        t = compose(t, elementary_rotation(rnd.randrange(3), _random_fraction(rnd, 20), RATIONAL))
    return t


def check_generator_identities(seed: int = 0) -> dict:
    rnd = random.Random(seed)
    p = 23
    f = PrimeField(p)
    dom = fp(f)
    squares = sorted(_squares(p))
    fp_ok = all(
        compose(basic_boost(FpElem(a, f), dom), basic_boost(FpElem(g, f), dom))
        == basic_boost(FpElem(a * g % p, f), dom)
        for a in squares for g in squares
    )
    q_ok = True
    for _ in range(200):
        a, g = _random_fraction(rnd), _random_fraction(rnd)
        q_ok &= compose(basic_boost(a, RATIONAL), basic_boost(g, RATIONAL)) == \
            basic_boost(a * g, RATIONAL)
    norm_err = 0.0
    for _ in range(200):
        alpha = rnd.uniform(0.05, 20.0)
        norm_err = max(norm_err, abs(frobenius_norm(basic_boost(alpha, REAL)) - (alpha + 1 / alpha)))
        norm_err = max(norm_err, abs(frobenius_norm(basic_rotation(alpha, REAL)) - 2.0))
    refl_ok = True
    ident = identity(RATIONAL)
    for i in range(100):
        t = _random_rational_lorentz(rnd)
        axis = [t.m[r, i % 2] for r in range(4)]  # unit timelike / spacelike column
        refl = line_reflection(axis, RATIONAL)
        checked = validate(refl.m)
        refl_ok &= (compose(refl, refl) == ident and checked.det_part == -1)
    ok = fp_ok and q_ok and norm_err < 1e-12 and refl_ok
    return {"passed": ok, "fp_exhaustive": fp_ok, "rational_random": q_ok,
            "max_norm_error": norm_err, "reflections": refl_ok}


def check_order_structure() -> dict:
    tri_ok = True
    for p in (7, 23, 31):
        f = PrimeField(p)
        sq = _squares(p)
        for x in range(p):
            for y in range(p):
                fwd = lt_p(FpElem(x, f), FpElem(y, f))
                back = lt_p(FpElem(y, f), FpElem(x, f))
                tri_ok &= fwd == ((y - x) % p in sq)
                tri_ok &= (x == y) == (not fwd and not back)
                tri_ok &= not (fwd and back)
    f7 = PrimeField(7)
    e = [FpElem(v, f7) for v in (0, 1, 3)]
    witness = lt_p(e[0], e[1]) and lt_p(e[1], e[2]) and not lt_p(e[0], e[2])
    f23 = PrimeField(23)
    sq23 = _squares(23)
    impl_ok = True
    for a in sorted(sq23):
        rep = velocity_bounds_check(FpElem(a, f23))
        a2 = a * a % 23
        v = (a2 - 1) * pow(a2 + 1, -1, 23) % 23
        hyp = (a2 + 1) % 23 in sq23
        concl = (v + 1) % 23 in sq23 and (1 - v) % 23 in sq23
        impl_ok &= rep.velocity == v and rep.alpha_sq_plus_one_square == hyp
        impl_ok &= (not hyp) or concl
        impl_ok &= rep.implication_holds
    ok = tri_ok and witness and impl_ok
    return {"passed": ok, "trichotomy": tri_ok, "witness_0_1_3": witness,
            "velocity_implication": impl_ok}


CRITERIA: list[tuple[int, str, float, Callable[..., dict]]] = [
    (1, "chain primes k=2..6", 1.0, check_chain_primes),
    (2, "Theorem-1 primes k=1,2", 10.0, check_theorem1_primes),
    (3, "Dickson generation over F_7", 120.0, check_dickson),
    (4, "local isomorphism certificate for enumerate_a(2)", 600.0, check_local_isomorphism),
    (5, "rational approximation and retract idempotence", 300.0, check_approximation),
    (6, "velocity addition", 1.0, check_velocity_addition),
    (7, "antichronous pair over F_23", 1.0, check_antichronous_pair),
    (8, "generator identities", 5.0, check_generator_identities),
    (9, "order structure of <_p", 1.0, check_order_structure),
]


_SEEDED = {5, 8}


def run_criterion(number: int, seed: int = 0) -> CheckResult:
    """Run one criterion. ``seed`` feeds the randomized ones (5 and 8); the
    pinned k of criterion 5 is only established for seed 0."""
    num, name, budget, fn = CRITERIA[number - 1]
    start = time.perf_counter()
    details = fn(seed) if num in _SEEDED else fn()
    seconds = time.perf_counter() - start
    passed = bool(details.pop("passed")) and seconds < budget
    return CheckResult(num, name, passed, seconds, budget, details)


def run_all(seed: int = 0) -> list[CheckResult]:
    return [run_criterion(n, seed) for n, *_ in CRITERIA]
