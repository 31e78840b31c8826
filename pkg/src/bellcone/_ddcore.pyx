# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled double description iteration on int64 rays with bitset zero sets.

Mirrors ``bellcone._dd_py.dd_iterate``.  Arithmetic is checked: any int64
overflow raises ``OverflowError`` so the caller can rerun in pure Python.
"""
import sys

import numpy as np

from libc.stdlib cimport malloc, realloc, free
from libc.string cimport memcpy

cdef extern from *:
    """
    #include <stdint.h>
    static inline int bc_popcount(uint64_t x) { return __builtin_popcountll(x); }
    static inline int bc_ctz(uint64_t x) { return __builtin_ctzll(x); }
    static inline int bc_mul(long long a, long long b, long long *r) {
        return __builtin_mul_overflow(a, b, r);
    }
    static inline int bc_add(long long a, long long b, long long *r) {
        return __builtin_add_overflow(a, b, r);
    }
    static inline int bc_sub(long long a, long long b, long long *r) {
        return __builtin_sub_overflow(a, b, r);
    }
    """
    int bc_popcount(unsigned long long x) nogil
    int bc_ctz(unsigned long long x) nogil
    int bc_mul(long long a, long long b, long long *r) nogil
    int bc_add(long long a, long long b, long long *r) nogil
    int bc_sub(long long a, long long b, long long *r) nogil


ctypedef unsigned long long u64


cdef inline long long _gcd(long long a, long long b) noexcept nogil:
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        a, b = b, a % b
    return a


cdef class _Buf:
    """Growable row store for rays and their zero sets."""
    cdef long long *rays
    cdef u64 *zs
    cdef Py_ssize_t n, cap, d, w

    def __cinit__(self, Py_ssize_t d, Py_ssize_t w, Py_ssize_t cap):
        if cap < 16:
            cap = 16
        self.d = d
        self.w = w
        self.cap = cap
        self.n = 0
        self.rays = <long long *> malloc(cap * d * sizeof(long long))
        self.zs = <u64 *> malloc(cap * w * sizeof(u64))
        if self.rays == NULL or self.zs == NULL:
            raise MemoryError()

    def __dealloc__(self):
        free(self.rays)
        free(self.zs)

    cdef int grow(self) except -1:
        cdef Py_ssize_t cap = self.cap * 2
        cdef long long *r = <long long *> realloc(self.rays, cap * self.d * sizeof(long long))
        if r == NULL:
            raise MemoryError()
        self.rays = r
        cdef u64 *z = <u64 *> realloc(self.zs, cap * self.w * sizeof(u64))
        if z == NULL:
            raise MemoryError()
        self.zs = z
        self.cap = cap
        return 0

    cdef int push(self, long long *ray, u64 *z) except -1:
        if self.n == self.cap:
            self.grow()
        memcpy(self.rays + self.n * self.d, ray, self.d * sizeof(long long))
        memcpy(self.zs + self.n * self.w, z, self.w * sizeof(u64))
        self.n += 1
        return 0


def dd_iterate(A, rays, done, order, eq, progress=False):
    cdef long long[:, ::1] Am = np.ascontiguousarray(A, dtype=np.int64)
    cdef Py_ssize_t m = Am.shape[0]
    cdef Py_ssize_t d = Am.shape[1]
    cdef Py_ssize_t w = (m + 63) // 64
    cdef long long[:, ::1] R0 = np.ascontiguousarray(
        np.asarray(rays, dtype=np.int64).reshape(-1, d))
    cdef Py_ssize_t i, j, k, p, q, r, t, nall
    cdef long long acc, prod, vp, vq, a1, a2, g
    cdef int ok, cnt
    cdef _Buf cur = _Buf(d, w, R0.shape[0])
    cdef _Buf nxt
    cdef long long *tmp = <long long *> malloc(d * sizeof(long long))
    cdef u64 *zt = <u64 *> malloc(w * sizeof(u64))
    cdef u64 *c = <u64 *> malloc(w * sizeof(u64))
    cdef long long *vals = NULL
    cdef long long *rp
    cdef long long *rq
    cdef u64 *zr
    cdef Py_ssize_t *pos = NULL
    cdef Py_ssize_t *neg = NULL
    cdef Py_ssize_t npos, nneg
    cdef u64 bitw
    cdef Py_ssize_t wordk
    cdef bint adjacent
    cdef Py_ssize_t *inc_cnt = <Py_ssize_t *> malloc((m + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t *inc_off = <Py_ssize_t *> malloc((m + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t *inc = NULL
    cdef Py_ssize_t best, best_cnt, b, scan_lo, scan_hi, s_i
    cdef u64 word

    if tmp == NULL or zt == NULL or c == NULL or inc_cnt == NULL or inc_off == NULL:
        raise MemoryError()
    try:
        for i in range(R0.shape[0]):
            for t in range(w):
                zt[t] = 0
            for j in range(d):
                tmp[j] = R0[i, j]
            for k in done:
                acc = 0
                for j in range(d):
                    if bc_mul(Am[k, j], tmp[j], &prod) or bc_add(acc, prod, &acc):
                        raise OverflowError("int64 overflow in dd kernel")
                if acc == 0:
                    zt[k // 64] |= (<u64> 1) << (k % 64)
            cur.push(tmp, zt)

        for step, k in enumerate(order):
            nall = cur.n
            vals = <long long *> realloc(vals, (nall + 1) * sizeof(long long))
            pos = <Py_ssize_t *> realloc(pos, (nall + 1) * sizeof(Py_ssize_t))
            neg = <Py_ssize_t *> realloc(neg, (nall + 1) * sizeof(Py_ssize_t))
            if vals == NULL or pos == NULL or neg == NULL:
                raise MemoryError()
            npos = 0
            nneg = 0
            for i in range(nall):
                rp = cur.rays + i * d
                acc = 0
                for j in range(d):
                    if bc_mul(Am[k, j], rp[j], &prod) or bc_add(acc, prod, &acc):
                        raise OverflowError("int64 overflow in dd kernel")
                vals[i] = acc
                if acc > 0:
                    pos[npos] = i
                    npos += 1
                elif acc < 0:
                    neg[nneg] = i
                    nneg += 1

            wordk = k // 64
            bitw = (<u64> 1) << (k % 64)
            nxt = _Buf(d, w, nall)
            if not eq[k]:
                for i in range(npos):
                    p = pos[i]
                    nxt.push(cur.rays + p * d, cur.zs + p * w)
            for i in range(nall):
                if vals[i] == 0:
                    memcpy(zt, cur.zs + i * w, w * sizeof(u64))
                    zt[wordk] |= bitw
                    nxt.push(cur.rays + i * d, zt)

            # incidence lists: rays whose zero set contains constraint b
            for b in range(m + 1):
                inc_cnt[b] = 0
            for i in range(nall):
                for t in range(w):
                    word = cur.zs[i * w + t]
                    while word:
                        inc_cnt[t * 64 + bc_ctz(word)] += 1
                        word &= word - 1
            inc_off[0] = 0
            for b in range(m):
                inc_off[b + 1] = inc_off[b] + inc_cnt[b]
                inc_cnt[b] = inc_off[b]
            inc = <Py_ssize_t *> realloc(inc, (inc_off[m] + 1) * sizeof(Py_ssize_t))
            if inc == NULL:
                raise MemoryError()
            for i in range(nall):
                for t in range(w):
                    word = cur.zs[i * w + t]
                    while word:
                        b = t * 64 + bc_ctz(word)
                        inc[inc_cnt[b]] = i
                        inc_cnt[b] += 1
                        word &= word - 1

            for i in range(npos):
                p = pos[i]
                vp = vals[p]
                for j in range(nneg):
                    q = neg[j]
                    cnt = 0
                    for t in range(w):
                        c[t] = cur.zs[p * w + t] & cur.zs[q * w + t]
                        cnt += bc_popcount(c[t])
                    if cnt < d - 2:
                        continue
                    best = -1
                    best_cnt = nall + 1
                    for t in range(w):
                        word = c[t]
                        while word:
                            b = t * 64 + bc_ctz(word)
                            if inc_off[b + 1] - inc_off[b] < best_cnt:
                                best = b
                                best_cnt = inc_off[b + 1] - inc_off[b]
                            word &= word - 1
                    if best < 0:
                        scan_lo = 0
                        scan_hi = nall
                    else:
                        scan_lo = inc_off[best]
                        scan_hi = inc_off[best + 1]
                    adjacent = True
                    for s_i in range(scan_lo, scan_hi):
                        r = s_i if best < 0 else inc[s_i]
                        if r == p or r == q:
                            continue
                        zr = cur.zs + r * w
                        ok = 1
                        for t in range(w):
                            if (zr[t] & c[t]) != c[t]:
                                ok = 0
                                break
                        if ok:
                            adjacent = False
                            break
                    if not adjacent:
                        continue
                    vq = vals[q]
                    rp = cur.rays + p * d
                    rq = cur.rays + q * d
                    g = 0
                    for t in range(d):
                        if bc_mul(vp, rq[t], &a1) or bc_mul(vq, rp[t], &a2) or bc_sub(a1, a2, &tmp[t]):
                            raise OverflowError("int64 overflow in dd kernel")
                        g = _gcd(g, tmp[t])
                    if g > 1:
                        for t in range(d):
                            tmp[t] = tmp[t] // g
                    c[wordk] |= bitw
                    nxt.push(tmp, c)
            cur = nxt
            if progress:
                print(f"dd: step {step + 1}/{len(order)} rays={cur.n}", file=sys.stderr)

        out = np.empty((cur.n, d), dtype=np.int64)
        for i in range(cur.n):
            for j in range(d):
                out[i, j] = cur.rays[i * d + j]
        return out
    finally:
        free(tmp)
        free(zt)
        free(c)
        free(vals)
        free(pos)
        free(neg)
        free(inc_cnt)
        free(inc_off)
        free(inc)
