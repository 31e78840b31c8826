"""The square cone, the Bell cone and the no-signaling cone of (n,2,2) scenarios,
and the F-duality between them.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import cone as _cone
from .cone import ConeHRep, ConeVRep, enumerate_rays, membership
from .tensor import (CorrelationTensor, FunctionalTensor, lower, pair, raise_,
                     word_index, words)

SIGNS = (-1, 1)


@dataclass(frozen=True)
class ScenarioSpec:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a scenario needs at least one party")

    @property
    def dim(self) -> int:
        return 3**self.n


def _check_n(n: int) -> None:
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"party count must be a positive integer, got {n!r}")


def square_cone() -> tuple[ConeVRep, ConeHRep]:
    """Sq in coordinates (x^-1, x^0, x^+1): |x^-1| <= x^0 and |x^+1| <= x^0."""
    v = ConeVRep(3, [(-1, 1, -1), (-1, 1, 1), (1, 1, -1), (1, 1, 1)])
    h = ConeHRep(3, [(-1, 1, 0), (1, 1, 0), (0, 1, -1), (0, 1, 1)])
    return v, h


# ---------------------------------------------------------------------------
# the g-tensor

def _h(v: int, t: int, s: int) -> int:
    if v == 0:
        return 1
    if v == s:
        return t
    return 0


def g_tensor(t: tuple[int, ...], s: tuple[int, ...]) -> FunctionalTensor:
    """``g_v(t, s)``: the functional giving ``P(t|s)`` from the correlators."""
    n = len(s)
    if len(t) != n or any(x not in SIGNS for x in s + t):
        raise ValueError("settings and outcomes must be +/-1 words of equal length")
    scale = Fraction(1, 2**n)
    entries = []
    for v in words(n):
        prod = 1
        for vj, tj, sj in zip(v, t, s):
            prod *= _h(vj, tj, sj)
            if prod == 0:
                break
        entries.append(scale * prod)
    return FunctionalTensor(n, tuple(entries))


def deterministic_box(a_minus: tuple[int, ...], a_plus: tuple[int, ...]) -> CorrelationTensor:
    """Box of the local strategy answering ``a_minus[j]`` / ``a_plus[j]`` at party j."""
    n = len(a_minus)
    entries = []
    for w in words(n):
        prod = 1
        for j, s in enumerate(w):
            if s == -1:
                prod *= a_minus[j]
            elif s == 1:
                prod *= a_plus[j]
        entries.append(prod)
    return CorrelationTensor(n, tuple(entries))


def deterministic_boxes(n: int) -> list[CorrelationTensor]:
    _check_n(n)
    return [deterministic_box(am, ap)
            for am in itertools.product(SIGNS, repeat=n)
            for ap in itertools.product(SIGNS, repeat=n)]


@lru_cache(maxsize=None)
def bell_cone(n: int) -> ConeVRep:
    """B_n generated by the 4^n local deterministic boxes."""
    _check_n(n)
    return ConeVRep(3**n, [b.entries for b in deterministic_boxes(n)])


@lru_cache(maxsize=None)
def ns_cone(n: int) -> ConeHRep:
    """NS_n cut out by the 4^n positivity constraints ``P(t|s) >= 0``."""
    _check_n(n)
    rows = [g_tensor(t, s).entries
            for s in itertools.product(SIGNS, repeat=n)
            for t in itertools.product(SIGNS, repeat=n)]
    return ConeHRep(3**n, rows)


@lru_cache(maxsize=None)
def ns_extreme_rays(n: int, progress: bool = False) -> ConeVRep:
    return enumerate_rays(ns_cone(n), progress=progress)


@lru_cache(maxsize=None)
def bell_facets(n: int, progress: bool = False) -> ConeVRep:
    """Facet functionals of B_n, i.e. the extreme rays of (B_n)*."""
    return enumerate_rays(_cone.dual_vrep_to_hrep(bell_cone(n)), progress=progress)


def probabilities(x: CorrelationTensor) -> dict[tuple[tuple[int, ...], tuple[int, ...]], Fraction]:
    """``P(t|s)`` for all setting words ``s`` and outcome words ``t`` in {-1,+1}^n."""
    n = x.n
    table = {}
    for s in itertools.product(SIGNS, repeat=n):
        for t in itertools.product(SIGNS, repeat=n):
            table[(s, t)] = pair(g_tensor(t, s), x)
    return table


def dualize(t):
    """Box -> inequality by lowering, inequality -> box by raising."""
    if isinstance(t, CorrelationTensor):
        return lower(t)
    if isinstance(t, FunctionalTensor):
        return raise_(t)
    raise TypeError(f"cannot dualize {type(t).__name__}")


def bilinear_check(x: CorrelationTensor, y: CorrelationTensor) -> Fraction:
    """``F_{s1t1}...F_{sntn} x^s y^t``; symmetric in ``x`` and ``y``."""
    return pair(lower(x), y)


def in_ns(x: CorrelationTensor) -> bool:
    return membership(ns_cone(x.n), x.entries).member


def in_bell(x: CorrelationTensor) -> bool:
    return membership(bell_cone(x.n), x.entries).member


def is_bell_inequality(f: FunctionalTensor) -> bool:
    """``f ∈ (B_n)*``: nonnegative on every deterministic box."""
    return all(pair(f, b) >= 0 for b in deterministic_boxes(f.n))


def is_trivial_inequality(f: FunctionalTensor) -> bool:
    """``f ∈ (NS_n)*``, i.e. a nonnegative combination of positivity constraints."""
    return membership(_cone.hrep_as_vrep(ns_cone(f.n)), f.entries).member


def triviality_check(x: CorrelationTensor) -> bool:
    """Whether ``lower(x)`` is a trivial inequality, i.e. whether ``x`` is local.

    Decided on the extreme rays of NS_n and cross-checked against LP
    membership of ``x`` in the V-rep of B_n.
    """
    f = lower(x)
    rays = ns_extreme_rays(x.n)
    dual_route = all(sum(a * b for a, b in zip(f.entries, r)) >= 0 for r in rays.generators)
    direct = in_bell(x)
    if dual_route != direct:
        raise AssertionError("duality cross-check failed: dual route and LP disagree")
    return dual_route


def duality_count_obstruction(n: int, k: int, l: int) -> tuple[int, int, bool]:
    """Deterministic points ``l^(kn)`` vs positivity facets ``(lk)^n``."""
    for name, v in (("n", n), ("k", k), ("l", l)):
        if not isinstance(v, int) or v < 1:
            raise ValueError(f"{name} must be a positive integer")
    vertices = l ** (k * n)
    facets = (l * k) ** n
    return vertices, facets, vertices == facets


# ---------------------------------------------------------------------------
# named boxes and inequalities

def all_ones_box(n: int) -> CorrelationTensor:
    return deterministic_box((1,) * n, (1,) * n)


def noise_box(n: int) -> CorrelationTensor:
    return CorrelationTensor.from_dict(n, {(0,) * n: 1})


def pr_box() -> CorrelationTensor:
    """The PR box: ``<A1^s A2^t> = F^{st}``."""
    from .tensor import F_UPPER
    return CorrelationTensor(2, tuple(F_UPPER[i][j] for i in range(3) for j in range(3)))


def chsh_functional() -> FunctionalTensor:
    """``½x^{--} + ½x^{-+} + ½x^{+-} - ½x^{++} + x^{00} >= 0``."""
    from .tensor import F_LOWER
    return FunctionalTensor(2, tuple(F_LOWER[i][j] for i in range(3) for j in range(3)))


def positivity_functional(s: tuple[int, ...], t: tuple[int, ...]) -> FunctionalTensor:
    return g_tensor(t, s)


_INEQ17_TERMS = {
    # ¼ and ½ weighted correlators, settings relabelled 1 -> -1, 2 -> +1
    (-1, 0, 0): Fraction(1, 4), (1, 0, 0): Fraction(1, 4),
    (-1, -1, 0): Fraction(1, 4), (1, -1, 0): Fraction(1, 4),
    (-1, 0, -1): Fraction(1, 4), (1, 0, -1): Fraction(1, 4),
    (-1, -1, -1): Fraction(-1, 4), (1, -1, -1): Fraction(-1, 4),
    (-1, 1, 1): Fraction(1, 2), (1, 1, 1): Fraction(-1, 2),
}


def ineq17_functional() -> FunctionalTensor:
    """Three-party facet inequality 17 written as ``terms + <A^0A^0A^0> >= 0``."""
    values = dict(_INEQ17_TERMS)
    values[(0, 0, 0)] = Fraction(1)
    return FunctionalTensor.from_dict(3, values)


def box40() -> CorrelationTensor:
    """The three-party extremal box dual to :func:`ineq17_functional`."""
    h = Fraction(1, 2)
    return CorrelationTensor.from_dict(3, {
        (0, 0, 0): 1,
        (-1, 0, 0): h, (-1, -1, 0): h, (-1, 1, 0): h, (-1, 0, -1): h, (-1, 0, 1): h,
        (-1, -1, -1): -h, (-1, -1, 1): -h, (-1, 1, -1): -h, (-1, 1, 1): -h,
        (1, -1, -1): 1, (1, -1, 1): -1, (1, 1, -1): -1, (1, 1, 1): 1,
    })


def word_value(x, word):
    return x.entries[word_index(word)]
