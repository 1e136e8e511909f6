"""Kustaanheimo chain primes and the prime used for finite retracts.

A prime p has chain length k when 1, 2, ..., k are all quadratic residues
mod p. By multiplicativity of the Legendre symbol it is enough that every
prime q <= k is a residue, and for p = 7 mod 8 the residue character of q
depends only on p mod q, which is what the sieve kernel exploits.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

from . import kernels
from .arith import PrimeField, is_prime, primes_up_to, prove_prime
from .errors import LorentzError, SearchExhausted

log = logging.getLogger(__name__)

DEFAULT_LIMIT = 10**8
# candidates handed to the sieve kernel per call
_BLOCK = 1 << 22
# sieve tables cost q bytes each; larger q are left to the exact chain check
_SIEVE_MAX_Q = 1 << 12


def chain_length(field: PrimeField | int, cap: int | None = None) -> int:
    """Largest k such that 1..k are all quadratic residues mod p.

    Scanning stops at ``cap`` if given. Uses Euler's criterion directly.
    """
    p = field.p if isinstance(field, PrimeField) else field
    k = 0
    while k + 1 < p and (cap is None or k < cap):
        if pow(k + 1, (p - 1) // 2, p) != 1:
            break
        k += 1
    return k


@dataclass(frozen=True)
class ChainPrimeRequest:
    k: int
    min_bound: int = 0
    require_mod8: bool = True
    limit: int = DEFAULT_LIMIT

    def __post_init__(self):
        if self.k < 1:
            raise LorentzError("chain depth k must be >= 1")
        if self.min_bound < 0:
            raise LorentzError("min_bound must be >= 0")


@dataclass
class ChainPrimeResult:
    p: int
    depth: int
    chain_length: int
    candidates: int
    transcript: list[str] = field(default_factory=list)

    @property
    def field(self) -> PrimeField:
        return PrimeField(self.p)


def _verify(p: int, depth: int, mod8: bool, prove: bool) -> list[str]:
    """Independent post-hoc check; raises if the search returned garbage."""
    lines = []
    proof = prove_prime(p) if prove else None
    if prove and proof is not True:
        raise LorentzError(f"{p}: primality not proven")
    if not is_prime(p):
        raise LorentzError(f"search returned composite {p}")
    lines.append(f"prime: {p} ({'proven' if proof else 'miller-rabin'})")
    if mod8:
        if p % 8 != 7:
            raise LorentzError(f"{p} is not 7 mod 8")
        lines.append(f"residue: {p} mod 8 = 7")
    bad = [n for n in range(1, depth + 1) if pow(n, (p - 1) // 2, p) != 1]
    if bad:
        raise LorentzError(f"{p}: {bad[0]} is not a quadratic residue")
    lines.append(f"euler: n^((p-1)/2) = 1 mod p for n = 1..{depth}")
    return lines


def _candidates(first: int, depth: int, mod8: bool, limit: int):
    """Yield (index, candidate) for candidates passing the cheap filters."""
    if not mod8:
        for i in range(limit):
            yield i, first + 2 * i
        return
    qs = [q for q in primes_up_to(min(depth, _SIEVE_MAX_Q)) if q > 2]
    done = 0
    while done < limit:
        n = min(_BLOCK, limit - done)
        idx = kernels.first_chain_candidate(first + 8 * done, n, qs)
        if idx < 0:
            done += n
            continue
        yield done + idx, first + 8 * (done + idx)
        done += idx + 1


def _search(above: int, depth: int, mod8: bool, limit: int, prove: bool):
    """Smallest prime p > above (7 mod 8 if mod8) with 1..depth residues."""
    first = above + 1
    if mod8:
        first += (7 - first) % 8
    else:
        first = max(first, 3)
        first += 1 - first % 2
    for i, cand in _candidates(first, depth, mod8, limit):
        if not is_prime(cand) or chain_length(cand, depth) < depth:
            continue
        transcript = [f"searched {i + 1} candidates from {first} step {8 if mod8 else 2}"]
        transcript += _verify(cand, depth, mod8, prove)
        return ChainPrimeResult(cand, depth, chain_length(cand), i + 1, transcript)
    raise SearchExhausted(
        f"no prime above {above} with chain depth {depth} in {limit} candidates"
    )


def find_chain_prime(req: ChainPrimeRequest, prove: bool = False) -> ChainPrimeResult:
    """Smallest prime p > max(min_bound, k), p = 7 mod 8 unless disabled,
    with 1..k quadratic residues."""
    return _search(max(req.min_bound, req.k), req.k, req.require_mod8, req.limit, prove)


def theorem1_bound(k: int) -> int:
    """32 k^16, the size below which the retract's image may collide."""
    return 32 * k**16


def squared_depth(k: int) -> int:
    """The k^2 chain depth of the symmetrized-chain argument.

    Depth k already makes every positive member of C_k a square (quotients of
    residues are residues), so this is only offered as the conservative rule.
    """
    return k * k


def find_theorem1_prime(k: int, effective_bound: int, limit: int = DEFAULT_LIMIT,
                        prove: bool = False) -> ChainPrimeResult:
    """Smallest p = 7 mod 8 above 32 k^16 whose residues cover 1..effective_bound.

    Callers pass the coefficient bound of the working set A u AA; every
    positive member of C_effective_bound then maps to a nonzero square.
    """
    if k < 1 or effective_bound < k:
        raise LorentzError("need k >= 1 and effective_bound >= k")
    return _search(theorem1_bound(k), effective_bound, True, limit, prove)
