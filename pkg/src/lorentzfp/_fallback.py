"""Pure-Python / numpy implementations of the hot kernels.

Same signatures and results as the compiled ``_core`` module; used when the
extension is not built or when an input falls outside its integer range.
Matrices over F_p are flat row-major tuples of 16 ints in [0, p) and are
keyed by ``sum(e[i] * p**i)``.
"""
from __future__ import annotations

import numpy as np

INT64_SAFE = 2**62


def encode(entries, p: int) -> int:
    key = 0
    for e in reversed(entries):
        key = key * p + e
    return key


def decode(key: int, p: int) -> tuple[int, ...]:
    out = []
    for _ in range(16):
        key, e = divmod(key, p)
        out.append(e)
    return tuple(out)


def matmul_mod(a, b, p: int) -> tuple[int, ...]:
    return tuple(
        (a[4 * i] * b[j] + a[4 * i + 1] * b[4 + j] + a[4 * i + 2] * b[8 + j]
         + a[4 * i + 3] * b[12 + j]) % p
        for i in range(4)
        for j in range(4)
    )


def _bfs_tuples(gens, p, cap):
    seen = set()
    frontier = []
    for g in gens:
        g = tuple(g)
        if g not in seen:
            seen.add(g)
            frontier.append(g)
    while frontier:
        nxt = []
        for m in frontier:
            for g in gens:
                prod = matmul_mod(m, g, p)
                if prod not in seen:
                    seen.add(prod)
                    if len(seen) > cap:
                        return None
                    nxt.append(prod)
        frontier = nxt
    return sorted(encode(m, p) for m in seen)


def bfs_closure(gens, p: int, cap: int):
    """Sorted keys of the closure of ``gens`` under multiplication.

    Returns None if the closure would exceed ``cap`` elements.
    """
    if p**16 >= INT64_SAFE:
        return _bfs_tuples(gens, p, cap)
    powers = np.array([p**i for i in range(16)], dtype=np.int64)
    gmats = [np.array(g, dtype=np.int64).reshape(4, 4) for g in gens]
    frontier = np.unique(np.array([list(g) for g in gens], dtype=np.int64), axis=0)
    seen = np.unique(frontier @ powers)
    if len(seen) > cap:
        return None
    while len(frontier):
        mats = frontier.reshape(-1, 4, 4)
        products = np.concatenate([(mats @ g % p).reshape(-1, 16) for g in gmats])
        keys = products @ powers
        keys, first = np.unique(keys, return_index=True)
        fresh = ~np.isin(keys, seen, assume_unique=True)
        keys, first = keys[fresh], first[fresh]
        if len(seen) + len(keys) > cap:
            return None
        seen = np.union1d(seen, keys)
        frontier = products[first]
    return [int(k) for k in seen]


def _minkowski(u, v, p):
    return (u[0] * v[0] - u[1] * v[1] - u[2] * v[2] - u[3] * v[3]) % p


def _det4(m, p):
    # cofactor expansion along the first row
    def det3(a, b, c, d, e, f, g, h, i):
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)

    r = [m[4 * i:4 * i + 4] for i in range(4)]
    total = 0
    for j in range(4):
        minor = [r[i][c] for i in range(1, 4) for c in range(4) if c != j]
        total += (-1) ** j * r[0][j] * det3(*minor)
    return total % p


def lorentz_frames(p: int):
    """Sorted keys of all det-1 matrices over F_p whose columns are
    Minkowski-orthonormal (column 0 of norm 1, the rest of norm -1)."""
    space = [(t, x, y, z) for t in range(p) for x in range(p)
             for y in range(p) for z in range(p)]
    timelike = [v for v in space if _minkowski(v, v, p) == 1]
    spacelike = [v for v in space if _minkowski(v, v, p) == p - 1]
    keys = []
    for c0 in timelike:
        l0 = [v for v in spacelike if _minkowski(v, c0, p) == 0]
        for c1 in l0:
            l1 = [v for v in l0 if _minkowski(v, c1, p) == 0]
            for c2 in l1:
                for c3 in l1:
                    if _minkowski(c3, c2, p):
                        continue
                    m = tuple(col[i] for i in range(4) for col in (c0, c1, c2, c3))
                    if _det4(m, p) == 1:
                        keys.append(encode(m, p))
    keys.sort()
    return keys


def _sieve_tables(qs):
    """For each odd prime q, allowed residues of a candidate p = 3 mod 4 such
    that (q/p) = 1, by quadratic reciprocity."""
    tables = []
    for q in qs:
        squares = {x * x % q for x in range(1, q)}
        want_square = q % 4 == 1
        tables.append([r != 0 and ((r in squares) == want_square) for r in range(q)])
    return tables


def first_chain_candidate(start: int, count: int, qs, chunk: int = 1 << 20) -> int:
    """Index i of the first p = start + 8*i (i < count) passing the residue
    sieve for every q in ``qs``, or -1.

    ``start`` must be 7 mod 8; for such p the sieve is exactly "every q is a
    quadratic residue mod p" whenever p is prime.
    """
    tables = _sieve_tables(qs)
    if start + 8 * count >= INT64_SAFE:
        for i in range(count):
            cand = start + 8 * i
            if all(t[cand % q] for q, t in zip(qs, tables)):
                return i
        return -1
    np_tables = [np.array(t, dtype=bool) for t in tables]
    done = 0
    while done < count:
        n = min(chunk, count - done)
        idx = np.arange(done, done + n, dtype=np.int64)
        cand = start + 8 * idx
        for q, t in zip(qs, np_tables):
            keep = t[cand % q]
            idx, cand = idx[keep], cand[keep]
            if not len(idx):
                break
        if len(idx):
            return int(idx[0])
        done += n
    return -1
