"""Polyhedral cones in V- and H-representation.

Vectors are stored as primitive integer tuples (see ``tensor.primitive``):
a ray is only defined up to positive scaling, and the primitive integer
representative is unique.  Generator and functional sets are kept sorted so
every output is reproducible.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from . import kernels
from .linalg import independent_rows, inverse, linprog_eq, nullspace, rank
from .tensor import DimensionMismatch, FormatError, format_rational, primitive

IntVec = tuple[int, ...]


def _canonical_set(vectors: Iterable, dim: int) -> tuple[IntVec, ...]:
    out = set()
    for v in vectors:
        v = primitive(v)
        if len(v) != dim:
            raise DimensionMismatch(f"vector of length {len(v)} in dimension {dim}")
        if any(v):
            out.add(v)
    return tuple(sorted(out))


@dataclass(frozen=True)
class ConeVRep:
    """``cone(generators) + span(lineality)``."""

    ambient_dim: int
    generators: tuple[IntVec, ...]
    lineality: tuple[IntVec, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "generators", _canonical_set(self.generators, self.ambient_dim))
        object.__setattr__(self, "lineality", _canonical_set(self.lineality, self.ambient_dim))

    def __len__(self):
        return len(self.generators)


@dataclass(frozen=True)
class ConeHRep:
    """``{x : g . x >= 0 for every g in facet_functionals}``."""

    ambient_dim: int
    facet_functionals: tuple[IntVec, ...]

    def __post_init__(self):
        object.__setattr__(self, "facet_functionals",
                           _canonical_set(self.facet_functionals, self.ambient_dim))

    def __len__(self):
        return len(self.facet_functionals)


class LinealityError(ValueError):
    """The cone contains a line, so it has no extreme rays."""


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def _check_dim(c, x):
    if len(x) != c.ambient_dim:
        raise DimensionMismatch(f"vector of length {len(x)} in dimension {c.ambient_dim}")


# ---------------------------------------------------------------------------
# duality and conversion

def dual_vrep_to_hrep(c: ConeVRep) -> ConeHRep:
    """The dual cone ``C* = {g : g . x >= 0 for x in C}`` as an H-rep."""
    if not c.generators and not c.lineality:
        raise ValueError("cone has no generators")
    rows = list(c.generators)
    for v in c.lineality:
        rows.append(v)
        rows.append(tuple(-a for a in v))
    return ConeHRep(c.ambient_dim, rows)


def hrep_as_vrep(c: ConeHRep) -> ConeVRep:
    """The dual cone ``C*`` spanned by the functionals of ``c``."""
    return ConeVRep(c.ambient_dim, c.facet_functionals)


def _insertion_order(A, candidates, rays, heuristic):
    if heuristic == "index":
        return list(candidates)
    if heuristic == "violations":
        def violated(i):
            return sum(1 for r in rays if _dot(A[i], r) < 0)
        return sorted(candidates, key=lambda i: (violated(i), i))
    raise ValueError(f"unknown insertion heuristic {heuristic!r}")


def enumerate_rays(c: ConeHRep, *, heuristic: str = "violations", progress: bool = False,
                   backend: str | None = None) -> ConeVRep:
    """Extreme rays of an H-represented cone by double description.

    The lineality space is computed first and quotiented out; it is returned
    in ``lineality`` and the rays are those of the pointed part
    ``C ∩ lineality⊥``.  A cone that is a linear subspace therefore comes back
    with no generators and a nonempty ``lineality``.
    """
    d = c.ambient_dim
    A = [list(g) for g in c.facet_functionals]
    if not A:
        raise ValueError("cone has no constraints")
    lin = nullspace(A, d)
    eq = [False] * len(A)
    for v in lin:
        A.append(list(v))
        eq.append(True)
    m = len(A)
    ineq = [i for i in range(m) if not eq[i]]
    basis = independent_rows(A, [i for i in range(m) if eq[i]] + ineq)
    assert len(basis) == d
    inv = inverse([A[i] for i in basis])
    rays = [primitive(inv[r][j] for r in range(d))
            for j, i in enumerate(basis) if not eq[i]]
    chosen = set(basis)
    rest = [i for i in range(m) if i not in chosen]
    order = _insertion_order(A, rest, rays, heuristic)
    out = kernels.dd_iterate(A, rays, basis, order, eq, progress=progress, backend=backend)
    return ConeVRep(d, out, lineality=lin)


def remove_redundant(c: ConeHRep) -> ConeHRep:
    """Drop functionals that are nonnegative combinations of the others."""
    keep = list(c.facet_functionals)
    i = 0
    while i < len(keep):
        others = keep[:i] + keep[i + 1:]
        if others and membership(ConeVRep(c.ambient_dim, others), keep[i]).member:
            keep.pop(i)
        else:
            i += 1
    return ConeHRep(c.ambient_dim, keep)


# ---------------------------------------------------------------------------
# membership and extremality

@dataclass(frozen=True)
class Membership:
    member: bool
    certificate: IntVec | None = None
    coefficients: tuple[Fraction, ...] | None = None
    value: Fraction | None = None

    def __bool__(self):
        return self.member


def membership(c: ConeVRep | ConeHRep, x: Sequence) -> Membership:
    """Decide ``x ∈ c`` exactly.

    For an H-rep the certificate of non-membership is the most violated
    functional.  For a V-rep an exact LP is solved; members come with
    nonnegative combination coefficients (one per generator, then a
    +/- pair per lineality vector), non-members with a separating functional
    ``g`` (``g . gen >= 0`` for all generators, ``g . x < 0``).  When the cone
    is full-dimensional and pointed the separator is a facet.
    """
    _check_dim(c, x)
    x = [Fraction(v) for v in x]
    if isinstance(c, ConeHRep):
        worst = None
        for g in c.facet_functionals:
            v = _dot(g, x)
            if v < 0 and (worst is None or v < worst[0]):
                worst = (v, g)
        if worst is None:
            return Membership(True)
        return Membership(False, certificate=worst[1], value=worst[0])
    return _vrep_membership(c, x)


def _vrep_membership(c: ConeVRep, x) -> Membership:
    gens = list(c.generators)
    for v in c.lineality:
        gens.append(v)
        gens.append(tuple(-a for a in v))
    d = c.ambient_dim
    if not gens:
        if not any(x):
            return Membership(True, coefficients=())
        return Membership(False, certificate=primitive(-v for v in x), value=-sum(v * v for v in x))
    center = [sum(g[j] for g in gens) for j in range(d)]
    A = [[g[j] for g in gens] + [center[j], -center[j]] for j in range(d)]
    cost = [0] * len(gens) + [1, -1]
    res = linprog_eq(A, x, cost)
    if res.status == "infeasible":
        sep = [-v for v in res.farkas]
        return Membership(False, certificate=primitive(sep), value=_dot(sep, x))
    if res.status == "unbounded":
        res = linprog_eq([row[:len(gens)] for row in A], x, [0] * len(gens))
        return Membership(True, coefficients=tuple(res.x))
    t = res.value
    if t >= 0:
        lam = tuple(v + t for v in res.x[:len(gens)])
        return Membership(True, coefficients=lam)
    return Membership(False, certificate=primitive(res.duals), value=_dot(res.duals, x))


def is_extreme_ray(c: ConeHRep, x: Sequence) -> bool:
    """Rank test: ``x`` is extreme iff the functionals tight at ``x`` have rank d-1.

    Requires ``x ∈ c``; a cone with a nontrivial lineality space has no
    extreme rays.
    """
    _check_dim(c, x)
    if not membership(c, x):
        raise ValueError("vector is not in the cone")
    if not any(x):
        return False
    d = c.ambient_dim
    rows = list(c.facet_functionals)
    if rank(rows) < d:
        return False
    tight = [g for g in rows if _dot(g, x) == 0]
    return rank(tight) == d - 1


def tight_rank(c: ConeHRep, x: Sequence) -> int:
    return rank([g for g in c.facet_functionals if _dot(g, x) == 0])


# ---------------------------------------------------------------------------
# tensor products

def _kron(vectors: Sequence[Sequence[int]]) -> IntVec:
    out = [1]
    for v in vectors:
        out = [a * b for a in out for b in v]
    return tuple(out)


def min_tensor_product(cones: Sequence[ConeVRep]) -> ConeVRep:
    """Cone generated by all products of factor generators."""
    if not cones:
        raise ValueError("need at least one factor")
    dim = 1
    for c in cones:
        dim *= c.ambient_dim
        if c.lineality:
            raise ValueError("tensor products of cones with lineality are not supported")
    gens = (_kron(choice) for choice in itertools.product(*(c.generators for c in cones)))
    return ConeVRep(dim, gens)


def max_tensor_product(cones: Sequence[ConeHRep]) -> ConeHRep:
    """Cone cut out by all products of factor functionals."""
    if not cones:
        raise ValueError("need at least one factor")
    dim = 1
    for c in cones:
        dim *= c.ambient_dim
    rows = (_kron(choice) for choice in itertools.product(*(c.facet_functionals for c in cones)))
    return ConeHRep(dim, rows)


def contract_first(z: Sequence, g: Sequence, dims: tuple[int, int]) -> tuple:
    """``g_s z^{st}`` for ``z`` in ``V ⊗ W`` with ``dims = (dim V, dim W)``."""
    dv, dw = dims
    return tuple(sum(g[s] * z[s * dw + t] for s in range(dv)) for t in range(dw))


def max_membership_via_slices(z: Sequence, first: ConeHRep, second: ConeHRep) -> bool:
    """Decide ``z ∈ C ⊗max D`` by checking ``g_s z^{st} ∈ D`` for ``g`` in ex(C*).

    ``first`` must list the extreme rays of ``C*`` as its functionals (an
    irredundant H-rep does).
    """
    dims = (first.ambient_dim, second.ambient_dim)
    return all(membership(second, contract_first(z, g, dims)).member
               for g in first.facet_functionals)


# ---------------------------------------------------------------------------
# text format

_CONE_HEADER = re.compile(r"^bellcone-cone v1; dim=(\d+); rep=(V|H); count=(\d+)\s*$")


def dumps_cone(c: ConeVRep | ConeHRep) -> str:
    vecs = c.generators if isinstance(c, ConeVRep) else c.facet_functionals
    rep = "V" if isinstance(c, ConeVRep) else "H"
    lines = [f"bellcone-cone v1; dim={c.ambient_dim}; rep={rep}; count={len(vecs)}"]
    lines += [" ".join(format_rational(v) for v in vec) for vec in vecs]
    return "\n".join(lines) + "\n"


def loads_cone(text: str) -> ConeVRep | ConeHRep:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty cone document")
    m = _CONE_HEADER.match(lines[0])
    if m is None:
        raise FormatError(f"bad cone header: {lines[0]!r}")
    dim, rep, count = int(m.group(1)), m.group(2), int(m.group(3))
    if len(lines) - 1 != count:
        raise FormatError(f"header says {count} vectors, found {len(lines) - 1}")
    vecs = []
    for ln in lines[1:]:
        try:
            vec = [Fraction(t) for t in ln.split()]
        except (ValueError, ZeroDivisionError) as exc:
            raise FormatError(f"bad vector line {ln!r}") from exc
        if len(vec) != dim:
            raise FormatError(f"vector of length {len(vec)} in dimension {dim}")
        vecs.append(vec)
    return ConeVRep(dim, vecs) if rep == "V" else ConeHRep(dim, vecs)
