"""Extending boxes and Bell inequalities from n to n+1 parties with involutions,
the Mermin-Klyshko family, and the full-correlation locality test.

Conventions.  The new party is appended last, so an (n+1)-party tensor splits
into three n-party slices by the letter of the last party.  Inequalities are
kept in homogeneous ``f . x >= 0`` form throughout.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .cone import membership
from .scenario import deterministic_boxes, is_bell_inequality, ns_cone
from .symmetry import (Involution, SymmetryElement, act, global_setting_swap,
                       outcome_flip)
from .tensor import (F_UPPER, CorrelationTensor, DimensionMismatch,
                     FunctionalTensor, _Tensor, lower, pair, raise_, word_index,
                     words)

HALF = Fraction(1, 2)
QUARTER = Fraction(1, 4)


class ExtensionError(ValueError):
    """A lifting precondition failed.

    ``condition`` names it; ``certificate`` is a violated positivity functional
    when NS membership failed, ``residual`` the nonzero tensor when an
    evenness or eigenvalue condition failed.
    """

    def __init__(self, condition: str, message: str, *, certificate=None, residual=None):
        super().__init__(f"{condition}: {message}")
        self.condition = condition
        self.certificate = certificate
        self.residual = residual


def _as_involution(s) -> Involution:
    if s is None:
        return None
    if isinstance(s, Involution):
        return s
    if isinstance(s, SymmetryElement):
        return Involution(s)
    raise TypeError(f"expected an involution, got {type(s).__name__}")


@dataclass(frozen=True)
class LiftSpec:
    iota: Involution
    kappa: Involution | None = None

    def __post_init__(self):
        object.__setattr__(self, "iota", _as_involution(self.iota))
        object.__setattr__(self, "kappa", _as_involution(self.kappa))
        if self.kappa is not None:
            if self.kappa.n != self.iota.n:
                raise DimensionMismatch("iota and kappa act on different party counts")
            if not self.iota.commutes_with(self.kappa):
                raise ValueError("iota and kappa do not commute")

    @property
    def commuting(self) -> bool:
        return self.kappa is None or self.iota.commutes_with(self.kappa)


# ---------------------------------------------------------------------------
# slicing along the last party

def slices(z: _Tensor) -> dict[int, _Tensor]:
    """The three n-party slices of an (n+1)-party tensor, keyed by last letter."""
    if z.n < 2:
        raise ValueError("need at least two parties to slice off the last one")
    cls = type(z)
    m = z.n - 1
    return {v: cls(m, z.entries[v + 1::3]) for v in (-1, 0, 1)}


def join_slices(minus: _Tensor, zero: _Tensor, plus: _Tensor) -> _Tensor:
    if not (minus.n == zero.n == plus.n) or not (type(minus) is type(zero) is type(plus)):
        raise DimensionMismatch("slices must share type and party count")
    entries = []
    for a, b, c in zip(minus.entries, zero.entries, plus.entries):
        entries += [a, b, c]
    return type(zero)(zero.n + 1, tuple(entries))


def move_party_last(z: _Tensor, party: int) -> _Tensor:
    """Reorder parties so that the 0-based ``party`` becomes the last one."""
    order = [j for j in range(z.n) if j != party] + [party]
    el = SymmetryElement(tuple(order), (False,) * z.n, ((False, False),) * z.n)
    return act(el, z)


# ---------------------------------------------------------------------------
# boxes

def _ns_failure(t: CorrelationTensor):
    m = membership(ns_cone(t.n), t.entries)
    return None if m.member else m.certificate


def extension_failures(z: CorrelationTensor) -> list[tuple[int, int, tuple]]:
    """``(t, sign, certificate)`` for every slice combination ``z^{.,0} ± z^{.,t}`` outside NS."""
    sl = slices(z)
    bad = []
    for t in (-1, 1):
        for sign in (1, -1):
            cert = _ns_failure(sl[0] + sl[t] if sign > 0 else sl[0] - sl[t])
            if cert is not None:
                bad.append((t, sign, cert))
    return bad


def check_extension(z: CorrelationTensor) -> bool:
    """``z ∈ NS_{n+1}`` decided slice-wise: ``z^{.,0} ± z^{.,t} ∈ NS_n`` for t = ±1."""
    return not extension_failures(z)


def _require_even(t, inv, what):
    r = inv(t) - t
    if not r.is_zero():
        raise ExtensionError("evenness", f"{what} is not even under iota", residual=r)


def extend_box(x: CorrelationTensor, y: CorrelationTensor, iota) -> CorrelationTensor:
    """Slices ``(y, x, iota(y))`` for the letters ``(-1, 0, +1)`` of a new last party."""
    iota = _as_involution(iota)
    if not (x.n == y.n == iota.n):
        raise DimensionMismatch("x, y and iota must share the party count")
    _require_even(x, iota, "x")
    for name, t in (("x+y", x + y), ("x-y", x - y)):
        cert = _ns_failure(t)
        if cert is not None:
            raise ExtensionError("membership", f"{name} is not no-signaling", certificate=cert)
    return join_slices(y, x, iota(y))


def noeigen_residual(w: _Tensor, iota, kappa) -> _Tensor:
    """``ικ(w) - κ(w) + ι(w) - w``; four times the (ι odd, κ even) component."""
    iota, kappa = _as_involution(iota), _as_involution(kappa)
    return iota(kappa(w)) - kappa(w) + iota(w) - w


def extend_box2(w: CorrelationTensor, iota, kappa) -> CorrelationTensor:
    """Slices ``(w - κw, w + κw, ιw - ικw)`` from a single no-signaling box ``w``."""
    spec = LiftSpec(iota, kappa)
    iota, kappa = spec.iota, spec.kappa
    if w.n != iota.n:
        raise DimensionMismatch("w and the involutions must share the party count")
    cert = _ns_failure(w)
    if cert is not None:
        raise ExtensionError("membership", "w is not no-signaling", certificate=cert)
    r = noeigen_residual(w, iota, kappa)
    if not r.is_zero():
        raise ExtensionError("noeigen", "w has a component odd under iota and even under kappa",
                             residual=r)
    kw = kappa(w)
    return join_slices(w - kw, w + kw, iota(w) - iota(kw))


@dataclass(frozen=True)
class Recognition:
    recognized: bool
    failed: str | None = None
    x: CorrelationTensor | None = None
    y: CorrelationTensor | None = None
    w: CorrelationTensor | None = None

    def __bool__(self):
        return self.recognized


def recognize_extension(z: CorrelationTensor, iota, kappa=None) -> Recognition:
    """Decide whether ``z`` is ``extend_box`` (or ``extend_box2`` when ``kappa`` is given) output."""
    iota = _as_involution(iota)
    if z.n != iota.n + 1:
        raise DimensionMismatch("z must have one party more than iota acts on")
    sl = slices(z)
    if iota(sl[0]) != sl[0]:
        return Recognition(False, "slice 0 not even under iota")
    if iota(sl[-1]) != sl[1]:
        return Recognition(False, "iota does not map slice -1 to slice +1")
    if kappa is None:
        return Recognition(True, x=sl[0], y=sl[-1])
    kappa = _as_involution(kappa)
    if not iota.commutes_with(kappa):
        return Recognition(False, "iota and kappa do not commute")
    if kappa(sl[0]) != sl[0]:
        return Recognition(False, "slice 0 not even under kappa")
    if kappa(sl[-1]) != -sl[-1] or kappa(sl[1]) != -sl[1]:
        return Recognition(False, "slices -1/+1 not odd under kappa")
    w = (sl[0] + sl[-1]) * HALF
    assert noeigen_residual(w, iota, kappa).is_zero()
    return Recognition(True, x=sl[0], y=sl[-1], w=w)


# ---------------------------------------------------------------------------
# inequalities

def eigen_parts(f: _Tensor, iota, kappa) -> dict[tuple[int, int], _Tensor]:
    """Components of ``f`` in the joint eigenspaces, keyed by ``(λ_ι, λ_κ)``."""
    iota, kappa = _as_involution(iota), _as_involution(kappa)
    fi, fk = iota(f), kappa(f)
    fik = iota(fk)
    out = {}
    for li, lk in itertools.product((1, -1), repeat=2):
        out[(li, lk)] = (f + fi * li + fk * lk + fik * (li * lk)) * QUARTER
    return out


def extend_inequality(f: FunctionalTensor, iota, kappa, *, verify: bool = True) -> FunctionalTensor:
    """Extend a Bell inequality by a new last party.

    The κ-even part of ``f`` gets the letter 0, the (ι even, κ odd) part the
    letter -1 and the (ι odd, κ odd) part the letter +1.  This is dual to
    :func:`extend_box2` and turns the CHSH functional into itself from
    ``<A^-1> + <A^0> >= 0`` and each Mermin-Klyshko functional into the next.
    """
    spec = LiftSpec(iota, kappa)
    if not isinstance(f, FunctionalTensor):
        raise TypeError("extend_inequality needs a FunctionalTensor")
    if f.n != spec.iota.n:
        raise DimensionMismatch("f and the involutions must share the party count")
    if verify and not is_bell_inequality(f):
        raise ExtensionError("validity", "f is negative on a deterministic box")
    parts = eigen_parts(f, spec.iota, spec.kappa)
    if not parts[(-1, 1)].is_zero():
        raise ExtensionError("noeigen", "f has a component odd under iota and even under kappa",
                             residual=parts[(-1, 1)])
    g = join_slices(parts[(1, -1)], parts[(1, 1)], parts[(-1, -1)])
    if verify and not is_bell_inequality(g):  # pragma: no cover - guaranteed by duality
        raise AssertionError("extended inequality is not valid")
    return g


def mk_terms(n: int) -> tuple[CorrelationTensor, CorrelationTensor]:
    """``(M_n, M'_n)`` as coefficient tensors of the recursion started at ``M_0 = M'_0 = 1``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    m = {(): Fraction(1)}
    mp = {(): Fraction(1)}
    for _ in range(n):
        nm, nmp = {}, {}
        for w, c in m.items():
            nm[w + (-1,)] = nm.get(w + (-1,), 0) + c * HALF
            nm[w + (1,)] = nm.get(w + (1,), 0) + c * HALF
            nmp[w + (-1,)] = nmp.get(w + (-1,), 0) - c * HALF
            nmp[w + (1,)] = nmp.get(w + (1,), 0) + c * HALF
        for w, c in mp.items():
            nm[w + (-1,)] = nm.get(w + (-1,), 0) + c * HALF
            nm[w + (1,)] = nm.get(w + (1,), 0) - c * HALF
            nmp[w + (-1,)] = nmp.get(w + (-1,), 0) + c * HALF
            nmp[w + (1,)] = nmp.get(w + (1,), 0) + c * HALF
        m, mp = nm, nmp
    return (CorrelationTensor.from_dict(n, m), CorrelationTensor.from_dict(n, mp))


def mermin_klyshko(n: int) -> FunctionalTensor:
    """``<M_n> + <A^0...A^0> >= 0``; at n=2 this is the CHSH functional."""
    m, _ = mk_terms(n)
    values = dict(zip(words(n), m.entries))
    values[(0,) * n] = Fraction(1)
    return FunctionalTensor.from_dict(n, values)


def mk_involutions(n: int) -> tuple[Involution, Involution]:
    """ι swaps the settings of every party, κ flips both observables of party n."""
    return Involution(global_setting_swap(n)), Involution(outcome_flip(n, [n - 1]))


# ---------------------------------------------------------------------------
# full correlations

def _full_words(n):
    return list(itertools.product((-1, 1), repeat=n))


def full_correlation_box(eps: Mapping[tuple[int, ...], object]) -> CorrelationTensor:
    """Box with full correlators ``eps``, ``x^{0...0} = 1`` and nothing else."""
    if not eps:
        raise ValueError("empty correlator table")
    n = len(next(iter(eps)))
    values = {(0,) * n: Fraction(1)}
    for w in _full_words(n):
        e = Fraction(eps.get(w, 0))
        if abs(e) > 1:
            raise ValueError(f"correlator {e} at {w} outside [-1, 1]")
        values[w] = e
    for w in eps:
        if len(w) != n or any(s not in (-1, 1) for s in w):
            raise ValueError(f"full-correlator word expected, got {w!r}")
    return CorrelationTensor.from_dict(n, values)


@dataclass(frozen=True)
class FullCorrelationResult:
    local: bool
    value: Fraction          # sum over s of |xi_s|
    bound: Fraction          # 2^n x^{0...0}
    facet: FunctionalTensor  # the full-correlation facet with the smallest value on x

    def __bool__(self):
        return self.local


def _xi(x: CorrelationTensor) -> dict[tuple[int, ...], Fraction]:
    n = x.n
    fw = _full_words(n)
    xs = {t: x.entries[word_index(t)] for t in fw}
    out = {}
    for s in fw:
        acc = Fraction(0)
        for t in fw:
            prod = 1
            for sj, tj in zip(s, t):
                prod *= F_UPPER[sj + 1][tj + 1]
            acc += prod * xs[t]
        out[s] = acc
    return out


def ww_zb_local_test(x: CorrelationTensor) -> FullCorrelationResult:
    """Locality of a full-correlation box: ``Σ_s |Σ_t F^{s1t1}...F^{sntn} x^t| <= 2^n x^{0...0}``.

    The full-correlator facet inequalities are ``lower(full_correlation_box(ε))``
    for sign patterns ε; the returned facet is the one minimizing the value
    on ``x`` (negative iff ``x`` is not local).
    """
    n = x.n
    allowed = {word_index(t) for t in _full_words(n)} | {word_index((0,) * n)}
    for i, v in enumerate(x.entries):
        if v and i not in allowed:
            raise ValueError(f"entry at {words(n)[i]} outside the full-correlation support")
    xi = _xi(x)
    value = sum((abs(v) for v in xi.values()), Fraction(0))
    bound = Fraction(2**n) * x.normalization
    eps = {s: (-1 if v > 0 else 1) for s, v in xi.items()}
    return FullCorrelationResult(value <= bound, value, bound, lower(full_correlation_box(eps)))


def _full_coords(n):
    return [word_index(t) for t in _full_words(n)] + [word_index((0,) * n)]


def full_correlation_cone(n: int):
    """Deterministic boxes projected to the full correlators and ``x^{0...0}``.

    Averaging over outcome flips of an even number of parties kills every
    marginal and keeps the full correlators, so a full-correlation box lies in
    B_n iff its projection lies in this cone.
    """
    from .cone import ConeVRep
    idx = _full_coords(n)
    return ConeVRep(len(idx), [tuple(d.entries[i] for i in idx) for d in deterministic_boxes(n)])


def full_correlation_membership(x: CorrelationTensor) -> bool:
    """Exact LP membership of the full-correlation data of ``x`` in the projected Bell cone."""
    return membership(full_correlation_cone(x.n), [x.entries[i] for i in _full_coords(x.n)]).member


def full_correlation_part(x: CorrelationTensor) -> CorrelationTensor:
    """Keep only the full correlators and the normalization entry."""
    n = x.n
    keep = {word_index(t) for t in _full_words(n)} | {word_index((0,) * n)}
    return CorrelationTensor(n, tuple(v if i in keep else Fraction(0) for i, v in enumerate(x.entries)))


# ---------------------------------------------------------------------------
# fixtures from the quantum discussion

def isotropic_box(c) -> CorrelationTensor:
    """Full correlators ``c/4`` with the PR sign pattern, ``x^{00} = 1``."""
    q = Fraction(c) / 4
    return CorrelationTensor.from_dict(2, {(0, 0): 1, (-1, -1): q, (-1, 1): q, (1, -1): q, (1, 1): -q})


def tsirelson_selfdual_value(c) -> Fraction:
    """Value of the sign-flipped dual of ``isotropic_box(c)`` on that box, ``1 - c²/8``.

    Nonnegative iff ``c² <= 8``.
    """
    x = isotropic_box(c)
    f = lower(x)
    z = word_index((0, 0))
    g = FunctionalTensor(2, tuple(v if i == z else -v for i, v in enumerate(f.entries)))
    return pair(g, x)


def gyni_box() -> CorrelationTensor:
    """Three-party extremal no-signaling box dual to the guess-your-neighbour's-input inequality."""
    return CorrelationTensor.from_dict(3, {
        (0, 0, 0): 1,
        (-1, 1, 0): 1,
        (0, -1, 1): 1,
        (1, 0, -1): 1,
        (-1, -1, -1): 1,
        (1, 1, 1): -1,
    })


def random_commuting_pair(rng, n: int, involution_list: Sequence[SymmetryElement]):
    """A random commuting pair ``(ι, κ)`` drawn from ``involution_list``."""
    while True:
        a = rng.choice(involution_list)
        b = rng.choice(involution_list)
        if (a @ b) == (b @ a):
            return Involution(a), Involution(b)


def deterministic_values(f: FunctionalTensor) -> list[Fraction]:
    return [pair(f, d) for d in deterministic_boxes(f.n)]
