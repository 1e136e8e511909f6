# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled kernels: Cayley-graph closure and frame enumeration over F_p,
and the residue sieve behind the chain-prime search.

Mirrors ``_fallback`` exactly; ``kernels`` picks one at import.
"""
from libc.stdint cimport int64_t, uint64_t
from libcpp.unordered_set cimport unordered_set
from libcpp.vector cimport vector

# keys are sum(e[i] * p**i) and must fit in 62 bits
cdef int MAX_P = 14


cdef inline uint64_t encode16(const int* e, int p) nogil:
    cdef uint64_t key = 0
    cdef int i
    for i in range(15, -1, -1):
        key = key * p + e[i]
    return key


cdef inline void matmul4(const int* a, const int* b, int* out, int p) nogil:
    cdef int i, j
    cdef long s
    for i in range(4):
        for j in range(4):
            s = (<long>a[4 * i] * b[j] + <long>a[4 * i + 1] * b[4 + j]
                 + <long>a[4 * i + 2] * b[8 + j] + <long>a[4 * i + 3] * b[12 + j])
            out[4 * i + j] = s % p


def bfs_closure(gens, int p, long cap):
    """Sorted keys of the multiplicative closure of ``gens``; None past ``cap``."""
    if p > MAX_P:
        raise ValueError("compiled closure supports p <= 14")
    cdef int ng = len(gens)
    cdef vector[int] gflat
    cdef vector[int] elems
    cdef unordered_set[uint64_t] seen
    cdef int buf[16]
    cdef int i, j
    cdef uint64_t key
    for g in gens:
        for j in range(16):
            buf[j] = g[j]
            gflat.push_back(buf[j])
        key = encode16(buf, p)
        if seen.insert(key).second:
            for j in range(16):
                elems.push_back(buf[j])
    if <long>seen.size() > cap:
        return None
    cdef size_t lo = 0
    cdef size_t hi = elems.size() // 16
    cdef size_t n
    cdef bint over = False
    with nogil:
        while lo < hi and not over:
            for n in range(lo, hi):
                for i in range(ng):
                    matmul4(&elems[16 * n], &gflat[16 * i], buf, p)
                    key = encode16(buf, p)
                    if seen.insert(key).second:
                        if <long>seen.size() > cap:
                            over = True
                            break
                        for j in range(16):
                            elems.push_back(buf[j])
                if over:
                    break
            lo = hi
            hi = elems.size() // 16
    if over:
        return None
    out = [0] * seen.size()
    i = 0
    for key in seen:
        out[i] = key
        i += 1
    out.sort()
    return out


cdef inline int mink(const int* u, const int* v, int p) nogil:
    cdef long s = <long>u[0] * v[0] - <long>u[1] * v[1] - <long>u[2] * v[2] - <long>u[3] * v[3]
    s %= p
    if s < 0:
        s += p
    return <int>s


cdef long det4(const int* m, int p) nogil:
    cdef long total = 0
    cdef long sub
    cdef int j, c, r, idx
    cdef long mn[9]
    for j in range(4):
        idx = 0
        for r in range(1, 4):
            for c in range(4):
                if c != j:
                    mn[idx] = m[4 * r + c]
                    idx += 1
        sub = (mn[0] * (mn[4] * mn[8] - mn[5] * mn[7])
               - mn[1] * (mn[3] * mn[8] - mn[5] * mn[6])
               + mn[2] * (mn[3] * mn[7] - mn[4] * mn[6])) % p
        if j % 2:
            total -= m[j] * sub
        else:
            total += m[j] * sub
    total %= p
    if total < 0:
        total += p
    return total


def lorentz_frames(int p):
    """Sorted keys of all det-1 Minkowski-orthonormal column frames over F_p."""
    if p > MAX_P:
        raise ValueError("compiled enumeration supports p <= 14")
    cdef vector[int] tl, sl, l0, l1
    cdef int v[4]
    cdef int m[16]
    cdef int t, x, y, z, nrm, a, b, c, d, i, n0, n1
    cdef int c0, c1, c2, c3
    keys = []
    for t in range(p):
        for x in range(p):
            for y in range(p):
                for z in range(p):
                    v[0] = t; v[1] = x; v[2] = y; v[3] = z
                    nrm = mink(v, v, p)
                    if nrm == 1:
                        for i in range(4):
                            tl.push_back(v[i])
                    elif nrm == p - 1:
                        for i in range(4):
                            sl.push_back(v[i])
    cdef size_t ntl = tl.size() // 4
    cdef size_t nsl = sl.size() // 4
    for a in range(<int>ntl):
        l0.clear()
        for b in range(<int>nsl):
            if mink(&sl[4 * b], &tl[4 * a], p) == 0:
                for i in range(4):
                    l0.push_back(sl[4 * b + i])
        n0 = l0.size() // 4
        for b in range(n0):
            l1.clear()
            for c in range(n0):
                if mink(&l0[4 * c], &l0[4 * b], p) == 0:
                    for i in range(4):
                        l1.push_back(l0[4 * c + i])
            n1 = l1.size() // 4
            for c in range(n1):
                for d in range(n1):
                    if mink(&l1[4 * d], &l1[4 * c], p) != 0:
                        continue
                    for i in range(4):
                        m[4 * i] = tl[4 * a + i]
                        m[4 * i + 1] = l0[4 * b + i]
                        m[4 * i + 2] = l1[4 * c + i]
                        m[4 * i + 3] = l1[4 * d + i]
                    if det4(m, p) == 1:
                        keys.append(encode16(m, p))
    keys.sort()
    return keys


def first_chain_candidate(int64_t start, int64_t count, qs):
    """Index of the first p = start + 8*i passing the residue sieve, or -1.

    For prime p = 7 mod 8 and odd prime q, (q/p) = (p/q) * (-1)^((q-1)/2),
    so each q needs only p mod q.
    """
    if start + 8 * count >= (<int64_t>1 << 62):
        raise OverflowError("compiled sieve needs candidates below 2**62")
    cdef vector[int64_t] qv
    cdef vector[vector[char]] tables
    cdef vector[char] row
    cdef int64_t q, r, x, i, cand
    cdef size_t j, nq
    for qq in qs:
        q = qq
        qv.push_back(q)
        row.assign(q, 0)
        for x in range(1, q):
            row[x * x % q] = 1
        if q % 4 == 3:
            for r in range(1, q):
                row[r] = 1 - row[r]
        row[0] = 0
        tables.push_back(row)
    nq = qv.size()
    cdef int64_t found = -1
    with nogil:
        for i in range(count):
            cand = start + 8 * i
            for j in range(nq):
                if not tables[j][cand % qv[j]]:
                    break
            else:
                found = i
                break
    return found
