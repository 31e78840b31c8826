"""Pure-Python double description iteration.

Reference implementation of the kernel in ``_ddcore.pyx``; both take the
same arguments and must return the same rays in the same order.
"""
from __future__ import annotations

import math
import sys


def _normalize(v):
    g = 0
    for x in v:
        g = math.gcd(g, x)
    if g > 1:
        return tuple(x // g for x in v)
    return tuple(v)


def dd_iterate(A, rays, done, order, eq, progress=False):
    """Insert the constraints ``order`` into the cone generated by ``rays``.

    ``A`` holds integer constraint rows, ``rays`` the extreme rays of the cone
    cut out by the rows listed in ``done`` (which must have full rank), and
    ``eq`` flags rows to be imposed as equalities.  Adjacency of two rays is
    decided combinatorially: the intersection of their zero sets must have at
    least ``d - 2`` members and must not be contained in the zero set of any
    third ray.  Only rays incident to the rarest constraint of that
    intersection need to be scanned.
    """
    d = len(A[0]) if A else 0
    rays = [tuple(r) for r in rays]
    zs = []
    for r in rays:
        z = 0
        for i in done:
            if sum(a * b for a, b in zip(A[i], r)) == 0:
                z |= 1 << i
        zs.append(z)

    for step, k in enumerate(order):
        a = A[k]
        vals = [sum(x * y for x, y in zip(a, r)) for r in rays]
        pos = [i for i, v in enumerate(vals) if v > 0]
        neg = [i for i, v in enumerate(vals) if v < 0]
        zer = [i for i, v in enumerate(vals) if v == 0]
        bit = 1 << k

        new_rays, new_zs = [], []
        if not eq[k]:
            for i in pos:
                new_rays.append(rays[i])
                new_zs.append(zs[i])
        for i in zer:
            new_rays.append(rays[i])
            new_zs.append(zs[i] | bit)

        incident = {}
        for i, z in enumerate(zs):
            while z:
                low = z & -z
                incident.setdefault(low, []).append(i)
                z ^= low
        for p in pos:
            zp, vp, rp = zs[p], vals[p], rays[p]
            for q in neg:
                c = zp & zs[q]
                if c.bit_count() < d - 2:
                    continue
                scan = None
                rest = c
                while rest:
                    low = rest & -rest
                    cand = incident[low]
                    if scan is None or len(cand) < len(scan):
                        scan = cand
                    rest ^= low
                adjacent = True
                for r in (range(len(rays)) if scan is None else scan):
                    if r != p and r != q and zs[r] & c == c:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                vq, rq = vals[q], rays[q]
                new = [vp * y - vq * x for x, y in zip(rp, rq)]
                new_rays.append(_normalize(new))
                new_zs.append(c | bit)

        rays, zs = new_rays, new_zs
        if progress:
            print(f"dd: step {step + 1}/{len(order)} rays={len(rays)}", file=sys.stderr)
    return rays
