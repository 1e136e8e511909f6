"""The compiled kernels and the numpy / pure-Python fallback must agree."""
import os
import random
import subprocess
import sys

import pytest

from lorentzfp import _fallback, kernels
from lorentzfp.arith import is_prime, primes_up_to
from lorentzfp.chain import find_theorem1_prime, theorem1_bound
from lorentzfp.finlorentz import _entries, standard_generators
from lorentzfp.lorentz import Generator, fp, named_generator

core = pytest.importorskip("lorentzfp._core")


def reference_sieve(start, count, qs):
    """Legendre symbols by Euler's criterion on the candidate itself."""
    for i in range(count):
        p = start + 8 * i
        if all(p % q and pow(q, (p - 1) // 2, p) == 1 for q in qs):
            return i
    return -1


def gens(p):
    return [_entries(g) for g in standard_generators(p)]


@pytest.mark.parametrize("p", [3, 7])
def test_bfs_closure_agrees(p):
    a = core.bfs_closure([tuple(g) for g in gens(p)], p, 10**6)
    b = _fallback.bfs_closure(gens(p), p, 10**6)
    assert a == b
    assert a == sorted(set(a))


def test_bfs_cap_agrees():
    g = gens(7)
    assert core.bfs_closure([tuple(x) for x in g], 7, 500) is None
    assert _fallback.bfs_closure(g, 7, 500) is None


def test_bfs_tuple_path_small_group():
    # the tuple path handles p^16 beyond int64; check it on a p = 7 subgroup
    g = [_entries(named_generator(Generator.AXIS_ROT3, fp(7))),
         _entries(named_generator(Generator.HALF_TURN_X, fp(7)))]
    assert _fallback._bfs_tuples(g, 7, 100) == core.bfs_closure([tuple(x) for x in g], 7, 100)


@pytest.mark.parametrize("p", [3, 7])
def test_frames_agree(p):
    assert core.lorentz_frames(p) == _fallback.lorentz_frames(p)


def test_sieve_agrees():
    rnd = random.Random(0)
    for _ in range(60):
        start = rnd.randrange(7, 10**7, 8)
        qs = [q for q in primes_up_to(rnd.choice([3, 5, 11, 30])) if q > 2]
        count = rnd.randrange(1, 3000)
        # the reference needs prime candidates; compare only on the sieve
        # predicate, which both kernels evaluate on every candidate
        a = core.first_chain_candidate(start, count, qs)
        b = _fallback.first_chain_candidate(start, count, qs)
        assert a == b


def test_sieve_matches_euler_on_primes():
    # for a prime candidate p = 7 mod 8, the sieve verdict equals Euler's criterion
    qs = [3, 5, 7, 11, 13]
    for p in range(7, 20000, 8):
        if not is_prime(p) or p in qs:
            continue
        hit = core.first_chain_candidate(p, 1, qs) == 0
        assert hit == (reference_sieve(p, 1, qs) == 0)


def test_sieve_overflow_guard():
    with pytest.raises(OverflowError):
        core.first_chain_candidate(2**62, 1, [3])


def test_dispatch_falls_back_above_int64():
    # 32 * 16^16 > 2^62, so the search runs on the pure-Python sieve
    k = 16
    assert theorem1_bound(k) > _fallback.INT64_SAFE
    res = find_theorem1_prime(k, k, limit=20000)
    p = res.p
    assert p > theorem1_bound(k) and p % 8 == 7
    assert all(pow(a, p - 1, p) == 1 for a in (2, 3, 5, 7, 11, 13))
    assert all(pow(n, (p - 1) // 2, p) == 1 for n in range(1, k + 1))
    # minimality: no earlier candidate in the progression is a (Fermat-probable)
    # prime with 1..k all residues
    above = theorem1_bound(k) + 1
    for n in range(above + (7 - above) % 8, p, 8):
        probable = all(pow(a, n - 1, n) == 1 for a in (2, 3, 5, 7))
        assert not (probable and all(pow(m, (n - 1) // 2, n) == 1 for m in range(1, k + 1)))


def test_encode_decode_roundtrip():
    rnd = random.Random(1)
    for p in (3, 7, 23, 2**61 - 1):
        e = tuple(rnd.randrange(p) for _ in range(16))
        assert kernels.decode(kernels.encode(e, p), p) == e


def test_pure_mode_env():
    env = dict(os.environ, LORENTZFP_PURE="1")
    code = "from lorentzfp import kernels; print(kernels.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                         text=True, check=True)
    assert out.stdout.strip() == "python"
    expected = "python" if os.environ.get("LORENTZFP_PURE") else "compiled"
    assert kernels.BACKEND == expected
