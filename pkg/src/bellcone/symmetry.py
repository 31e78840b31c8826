"""Symmetries of (n,2,2) scenarios acting on correlation and functional tensors.

An element is a party permutation followed by local operations: per party, an
optional exchange of the two settings and then optional outcome flips of the
observables in the (new) slots -1 and +1.  Each element acts as a signed
permutation of the 3^n tensor entries; the letter 0 is never moved or signed.
Functionals transform by the same signed permutation, which preserves pairing.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .tensor import (F_LOWER, F_UPPER, CorrelationTensor, DimensionMismatch,
                     FunctionalTensor, _Tensor, word_index, words)


def _local_matrix(swap: bool, flips: tuple[bool, bool]) -> tuple[tuple[int, ...], ...]:
    """3x3 signed permutation for one party, rows/cols ordered (-1, 0, +1)."""
    m = [[0] * 3 for _ in range(3)]
    src = {0: 2, 1: 1, 2: 0} if swap else {0: 0, 1: 1, 2: 2}
    sign = {0: -1 if flips[0] else 1, 1: 1, 2: -1 if flips[1] else 1}
    for row in range(3):
        m[row][src[row]] = sign[row]
    return tuple(tuple(r) for r in m)


def _decode_local(m) -> tuple[bool, tuple[bool, bool]]:
    m = [[int(v) for v in row] for row in m]
    if m[1] != [0, 1, 0]:
        raise ValueError("local map does not fix the 'do not measure' letter")
    swap = m[0][2] != 0
    col0 = 2 if swap else 0
    col2 = 0 if swap else 2
    if abs(m[0][col0]) != 1 or abs(m[2][col2]) != 1 or \
            sum(abs(v) for row in m for v in row) != 3:
        raise ValueError("not a signed permutation of the two settings")
    return swap, (m[0][col0] == -1, m[2][col2] == -1)


def _matmul(a, b):
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3))
                 for i in range(3))


@dataclass(frozen=True)
class SymmetryElement:
    """Party permutation + setting swaps + outcome flips (flips after swaps).

    ``party_perm[j]`` is the (0-based) input party that lands on party ``j``.
    """

    party_perm: tuple[int, ...]
    setting_swap: tuple[bool, ...]
    outcome_flip: tuple[tuple[bool, bool], ...]

    def __post_init__(self):
        n = len(self.party_perm)
        if sorted(self.party_perm) != list(range(n)):
            raise ValueError(f"not a permutation: {self.party_perm!r}")
        if len(self.setting_swap) != n or len(self.outcome_flip) != n:
            raise ValueError("per-party data must have one entry per party")
        object.__setattr__(self, "setting_swap", tuple(bool(b) for b in self.setting_swap))
        object.__setattr__(self, "outcome_flip",
                           tuple((bool(a), bool(b)) for a, b in self.outcome_flip))

    @property
    def n(self) -> int:
        return len(self.party_perm)

    @classmethod
    def identity(cls, n: int) -> "SymmetryElement":
        return cls(tuple(range(n)), (False,) * n, ((False, False),) * n)

    def local(self, j: int):
        return _local_matrix(self.setting_swap[j], self.outcome_flip[j])

    @classmethod
    def from_locals(cls, party_perm, mats) -> "SymmetryElement":
        dec = [_decode_local(m) for m in mats]
        return cls(tuple(party_perm), tuple(s for s, _ in dec), tuple(f for _, f in dec))

    def __matmul__(self, other: "SymmetryElement") -> "SymmetryElement":
        """``self @ other`` acts as ``other`` first, then ``self``."""
        if self.n != other.n:
            raise DimensionMismatch("composing symmetries of different party counts")
        p = tuple(other.party_perm[self.party_perm[j]] for j in range(self.n))
        mats = [_matmul(self.local(j), other.local(self.party_perm[j])) for j in range(self.n)]
        return SymmetryElement.from_locals(p, mats)

    def inverse(self) -> "SymmetryElement":
        g = self
        while True:
            nxt = g @ self
            if nxt.is_identity():
                return g
            g = nxt

    def is_identity(self) -> bool:
        return self == SymmetryElement.identity(self.n)

    def signed_permutation(self) -> tuple[np.ndarray, np.ndarray]:
        return _signed_perm(self)

    def __call__(self, t: _Tensor) -> _Tensor:
        return act(self, t)

    def __str__(self):
        return format_spec(self)


@lru_cache(maxsize=100_000)
def _signed_perm(el: SymmetryElement) -> tuple[np.ndarray, np.ndarray]:
    """``(perm, sign)`` with ``act(el, x)[i] == sign[i] * x[perm[i]]``."""
    n = el.n
    size = 3**n
    perm = np.empty(size, dtype=np.int64)
    sign = np.empty(size, dtype=np.int64)
    locs = [el.local(j) for j in range(n)]
    for i, w in enumerate(words(n)):
        u = [0] * n
        sg = 1
        for j, s in enumerate(w):
            row = locs[j][s + 1]
            col = next(c for c in range(3) if row[c] != 0)
            sg *= row[col]
            u[el.party_perm[j]] = col - 1
        perm[i] = word_index(u)
        sign[i] = sg
    return perm, sign


def act(el: SymmetryElement, t: _Tensor) -> _Tensor:
    if el.n != t.n:
        raise DimensionMismatch(f"symmetry on {el.n} parties applied to {t.n}-party tensor")
    perm, sign = _signed_perm(el)
    e = t.entries
    return type(t)(t.n, tuple(e[p] if s > 0 else -e[p] for p, s in zip(perm.tolist(), sign.tolist())))


def act_vector(el: SymmetryElement, v: Sequence) -> tuple:
    perm, sign = _signed_perm(el)
    return tuple(v[p] if s > 0 else -v[p] for p, s in zip(perm.tolist(), sign.tolist()))


@dataclass(frozen=True)
class Involution:
    element: SymmetryElement

    def __post_init__(self):
        if not (self.element @ self.element).is_identity():
            raise ValueError(f"{format_spec(self.element)} does not square to the identity")

    @property
    def n(self) -> int:
        return self.element.n

    def __call__(self, t: _Tensor) -> _Tensor:
        return act(self.element, t)

    def __matmul__(self, other: "Involution") -> SymmetryElement:
        return self.element @ other.element

    def commutes_with(self, other: "Involution") -> bool:
        return (self.element @ other.element) == (other.element @ self.element)

    def __str__(self):
        return format_spec(self.element)


# ---------------------------------------------------------------------------
# the full group

def group_elements(n: int) -> Iterable[SymmetryElement]:
    """All n! 2^n 4^n elements."""
    flips = list(itertools.product((False, True), repeat=2))
    for p in itertools.permutations(range(n)):
        for sw in itertools.product((False, True), repeat=n):
            for fl in itertools.product(flips, repeat=n):
                yield SymmetryElement(p, sw, fl)


def group_order(n: int) -> int:
    import math
    return math.factorial(n) * 2**n * 4**n


@lru_cache(maxsize=None)
def group_arrays(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Stacked ``(perm, sign)`` arrays of every group element, shape (|G|, 3^n)."""
    perms, signs = [], []
    for el in group_elements(n):
        p, s = _signed_perm.__wrapped__(el)
        perms.append(p)
        signs.append(s)
    return np.stack(perms), np.stack(signs)


def involutions(n: int, *, party_perms: bool = True) -> list[SymmetryElement]:
    out = []
    for el in group_elements(n):
        if not party_perms and el.party_perm != tuple(range(n)):
            continue
        if (el @ el).is_identity():
            out.append(el)
    return out


# ---------------------------------------------------------------------------
# orbits

def _images(vec: Sequence[int], n: int) -> np.ndarray:
    perms, signs = group_arrays(n)
    v = np.asarray(vec, dtype=object if max(map(abs, vec), default=0) >= 2**62 else np.int64)
    return signs * v[perms]


def _lexmin_row(rows: np.ndarray) -> tuple[int, ...]:
    cand = np.arange(rows.shape[0])
    for col in range(rows.shape[1]):
        vals = rows[cand, col]
        cand = cand[vals == vals.min()]
        if len(cand) == 1:
            break
    return tuple(int(v) for v in rows[cand[0]])


def canonical_vector(vec: Sequence[int], n: int) -> tuple[tuple[int, ...], int]:
    """Lexicographically least image of a primitive integer vector, and its stabilizer order."""
    imgs = _images(vec, n)
    canon = _lexmin_row(imgs)
    stab = int(np.all(imgs == np.asarray(vec, dtype=imgs.dtype), axis=1).sum())
    return canon, stab


def orbit_canonical_form(t: _Tensor) -> tuple[_Tensor, int]:
    """Canonical orbit representative (as a primitive integer ray) and stabilizer order.

    Two tensors are related by a symmetry up to positive scaling iff their
    canonical forms agree.
    """
    if t.is_zero():
        raise ValueError("the zero tensor has no orbit representative")
    canon, stab = canonical_vector(t.ray(), t.n)
    return type(t)(t.n, canon), stab


@dataclass(frozen=True)
class Orbit:
    representative: tuple[int, ...]
    size: int
    members: tuple[int, ...]  # indices into the classified ray list


def classify_orbits(rays, n: int) -> list[Orbit]:
    """Partition a ray set into symmetry orbits.

    ``rays`` is a ``ConeVRep`` or a sequence of primitive integer vectors in
    dimension 3^n.  Orbits are returned sorted by representative, which is
    the canonical form.
    """
    vecs = list(getattr(rays, "generators", rays))
    dim = 3**n
    for v in vecs:
        if len(v) != dim:
            raise DimensionMismatch(f"ray of length {len(v)} for n={n}")
    index = {tuple(v): i for i, v in enumerate(vecs)}
    label = [-1] * len(vecs)
    found = []
    for i, v in enumerate(vecs):
        if label[i] >= 0:
            continue
        imgs = _images(v, n)
        canon = _lexmin_row(imgs)
        members = set()
        for row in {tuple(r) for r in imgs.tolist()}:
            j = index.get(row)
            if j is not None:
                members.add(j)
        for j in members:
            label[j] = len(found)
        found.append(Orbit(canon, len(members), tuple(sorted(members))))
    return sorted(found, key=lambda o: o.representative)


# ---------------------------------------------------------------------------
# transport through F

def _frac_matmul(a, b):
    return [[sum(Fraction(a[i][k]) * Fraction(b[k][j]) for k in range(3)) for j in range(3)]
            for i in range(3)]


def induced(el: SymmetryElement) -> SymmetryElement:
    """The element ``raise ∘ el ∘ lower``.

    If ``el`` acts on functionals, ``induced(el)`` is the matching action on
    boxes: ``raise_(act(el, f)) == act(induced(el), raise_(f))``.  Per party,
    a setting swap corresponds to flipping the +1 outcome and vice versa.
    """
    mats = []
    for j in range(el.n):
        m = _frac_matmul(_frac_matmul(F_UPPER, el.local(j)), F_LOWER)
        mats.append(m)
    return SymmetryElement.from_locals(el.party_perm, mats)


# ---------------------------------------------------------------------------
# involution mini-language

_ATOM = re.compile(r"\s*(swap|flip|exchange|id)\s*(?:\(([^)]*)\))?\s*")


def parse_spec(text: str, n: int) -> SymmetryElement:
    """Parse ``swap(j)``, ``flip(j,-1)``, ``flip(j,+1)``, ``exchange(i,j)`` and ``id``.

    Parties are 1-based.  The atoms describe one element in normal form:
    party exchanges, then setting swaps, then outcome flips, so the order of
    atoms does not matter.  Repeated atoms toggle.
    """
    perm = list(range(n))
    swaps = [False] * n
    flips = [[False, False] for _ in range(n)]
    pos = 0
    text = text.strip()
    if not text:
        raise ValueError("empty involution spec")
    while pos < len(text):
        m = _ATOM.match(text, pos)
        if m is None:
            raise ValueError(f"cannot parse involution spec at {text[pos:]!r}")
        name, args = m.group(1), m.group(2)
        argv = [a.strip() for a in args.split(",")] if args else []
        if name == "id":
            if argv:
                raise ValueError("id takes no arguments")
        elif name == "swap":
            (j,) = _parties(argv, 1, n)
            swaps[j] = not swaps[j]
        elif name == "flip":
            if len(argv) != 2 or argv[1] not in ("-1", "+1", "1"):
                raise ValueError(f"flip needs (party, -1|+1), got {args!r}")
            (j,) = _parties(argv[:1], 1, n)
            k = 0 if argv[1] == "-1" else 1
            flips[j][k] = not flips[j][k]
        else:
            i, j = _parties(argv, 2, n)
            perm[i], perm[j] = perm[j], perm[i]
        pos = m.end()
        if pos < len(text):
            if text[pos] != ",":
                raise ValueError(f"expected ',' at {text[pos:]!r}")
            pos += 1
    return SymmetryElement(tuple(perm), tuple(swaps), tuple(tuple(f) for f in flips))


def _parties(argv, count, n):
    if len(argv) != count:
        raise ValueError(f"expected {count} party argument(s), got {argv!r}")
    out = []
    for a in argv:
        j = int(a)
        if not 1 <= j <= n:
            raise ValueError(f"party {j} out of range 1..{n}")
        out.append(j - 1)
    return out


def format_spec(el: SymmetryElement) -> str:
    atoms = []
    perm = list(el.party_perm)
    # decompose the party permutation into transpositions applied to the identity
    cur = list(range(el.n))
    for i in range(el.n):
        if cur[i] != perm[i]:
            j = cur.index(perm[i])
            cur[i], cur[j] = cur[j], cur[i]
            atoms.append(f"exchange({i + 1},{j + 1})")
    for j in range(el.n):
        if el.setting_swap[j]:
            atoms.append(f"swap({j + 1})")
        if el.outcome_flip[j][0]:
            atoms.append(f"flip({j + 1},-1)")
        if el.outcome_flip[j][1]:
            atoms.append(f"flip({j + 1},+1)")
    return ",".join(atoms) or "id"


def global_setting_swap(n: int) -> SymmetryElement:
    return SymmetryElement(tuple(range(n)), (True,) * n, ((False, False),) * n)


def outcome_flip(n: int, parties: Iterable[int]) -> SymmetryElement:
    """Flip both observables of the given 0-based parties."""
    ps = set(parties)
    return SymmetryElement(tuple(range(n)), (False,) * n,
                           tuple((j in ps, j in ps) for j in range(n)))


# ---------------------------------------------------------------------------
# observable-exchange notation ("B0 <-> C0, B1 <-> -C1")

_OBS = re.compile(r"^\s*(-?)\s*([A-Za-z])_?([01])\s*$")


def _parse_observable(tok: str, letters: str) -> tuple[int, int, int]:
    m = _OBS.match(tok)
    if m is None or m.group(2) not in letters:
        raise ValueError(f"bad observable {tok!r}")
    sign = -1 if m.group(1) else 1
    return sign, letters.index(m.group(2)), -1 if m.group(3) == "0" else 1


def parse_exchange_notation(text: str, letters: str) -> SymmetryElement:
    """Element described by observable exchanges such as ``"B0 <-> C0, B1 <-> -C1"``.

    ``letters`` names the parties in order (``"AC"`` makes A party 1 and C
    party 2); subscript 0 is setting -1 and subscript 1 is setting +1.
    Observables not mentioned are fixed.  ``"id"`` is the identity.
    """
    n = len(letters)
    target = {}
    text = text.strip()
    if text not in ("id", ""):
        for atom in text.split(","):
            parts = re.split(r"<->|↔", atom)
            if len(parts) != 2:
                raise ValueError(f"bad exchange {atom!r}")
            s1, p1, t1 = _parse_observable(parts[0], letters)
            s2, p2, t2 = _parse_observable(parts[1], letters)
            sign = s1 * s2
            for src, dst in (((p1, t1), (p2, t2)), ((p2, t2), (p1, t1))):
                if src in target and target[src] != (sign, dst):
                    raise ValueError(f"observable {src} mapped twice")
                target[src] = (sign, dst)

    def unit(party, setting):
        w = [0] * n
        w[party] = setting
        return word_index(w)

    for el in group_elements(n):
        perm, sgn = _signed_perm(el)
        ok = True
        for party in range(n):
            for setting in (-1, 1):
                sign, (dp, ds) = target.get((party, setting), (1, (party, setting)))
                # el maps the unit box at (party, setting) to sign times the one at (dp, ds)
                i = unit(dp, ds)
                if perm[i] != unit(party, setting) or sgn[i] != sign:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return el
    raise ValueError(f"{text!r} is not a symmetry of the scenario")
