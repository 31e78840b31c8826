"""Exact tensors over the setting alphabet {-1, 0, +1}.

A correlation tensor ``x^{s1...sn}`` stores one correlator per setting word;
the letter 0 means "do not measure" so the all-zero word carries the
normalization.  Functional tensors ``f_{s1...sn}`` are the covariant
counterpart and represent linear inequalities ``f . x >= 0``.

Entries are ``fractions.Fraction`` and are stored densely in the canonical
order: lexicographic over words with ``-1 < 0 < +1``.
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

LETTERS = (-1, 0, 1)

Word = tuple[int, ...]


class DimensionMismatch(ValueError):
    """Raised when tensors (or vectors) of different sizes are combined."""


class FormatError(ValueError):
    """Raised on malformed tensor or cone documents."""


@lru_cache(maxsize=None)
def words(n: int) -> tuple[Word, ...]:
    """All setting words of length ``n`` in canonical order."""
    return tuple(itertools.product(LETTERS, repeat=n))


def word_index(word: Sequence[int]) -> int:
    idx = 0
    for s in word:
        if s not in (-1, 0, 1):
            raise ValueError(f"bad setting letter {s!r}")
        idx = 3 * idx + s + 1
    return idx


def format_word(word: Sequence[int]) -> str:
    return ",".join("+1" if s == 1 else str(s) for s in word)


def parse_word(text: str) -> Word:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if tok not in ("-1", "0", "+1", "1"):
            raise FormatError(f"bad setting letter {tok!r}")
        out.append(int(tok))
    return tuple(out)


def format_rational(q: Fraction | int) -> str:
    return str(Fraction(q))


def primitive(vec: Iterable) -> tuple[int, ...]:
    """Primitive integer representative of the ray through ``vec``.

    Denominators are cleared and the gcd of the numerators divided out.  Only
    positive scalings are applied, so the ray's direction is preserved.
    """
    vals = [Fraction(v) for v in vec]
    den = 1
    for v in vals:
        den = den * v.denominator // math.gcd(den, v.denominator)
    ints = [int(v * den) for v in vals]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    if g == 0:
        return tuple(ints)
    return tuple(v // g for v in ints)


@dataclass(frozen=True)
class _Tensor:
    n: int
    entries: tuple[Fraction, ...]

    variance = "upper"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a tensor needs at least one party")
        entries = tuple(Fraction(e) for e in self.entries)
        if len(entries) != 3**self.n:
            raise DimensionMismatch(
                f"expected {3**self.n} entries for n={self.n}, got {len(entries)}")
        object.__setattr__(self, "entries", entries)

    # construction helpers

    @classmethod
    def zeros(cls, n: int):
        return cls(n, (Fraction(0),) * 3**n)

    @classmethod
    def from_dict(cls, n: int, values: Mapping[Sequence[int], object]):
        entries = [Fraction(0)] * 3**n
        for word, v in values.items():
            if len(word) != n:
                raise DimensionMismatch(f"word {word!r} does not have {n} letters")
            entries[word_index(word)] = Fraction(v)
        return cls(n, tuple(entries))

    @classmethod
    def from_array(cls, arr):
        arr = np.asarray(arr, dtype=object)
        return cls(arr.ndim, tuple(Fraction(v) for v in arr.reshape(-1)))

    def as_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=object).reshape((3,) * self.n)

    # access

    def __getitem__(self, word: Sequence[int]) -> Fraction:
        if len(word) != self.n:
            raise DimensionMismatch(f"word {word!r} does not have {self.n} letters")
        return self.entries[word_index(word)]

    def items(self) -> Iterator[tuple[Word, Fraction]]:
        return zip(words(self.n), self.entries)

    def support(self) -> dict[Word, Fraction]:
        return {w: v for w, v in self.items() if v != 0}

    @property
    def normalization(self) -> Fraction:
        return self.entries[(3**self.n - 1) // 2]

    def is_zero(self) -> bool:
        return not any(self.entries)

    def ray(self) -> tuple[int, ...]:
        return primitive(self.entries)

    # linear structure

    def _check(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.n != self.n:
            raise DimensionMismatch(f"party counts differ: {self.n} vs {other.n}")

    def __add__(self, other):
        self._check(other)
        return type(self)(self.n, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other):
        self._check(other)
        return type(self)(self.n, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self):
        return type(self)(self.n, tuple(-a for a in self.entries))

    def __mul__(self, scalar):
        c = Fraction(scalar)
        return type(self)(self.n, tuple(c * a for a in self.entries))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1 / Fraction(scalar))

    def __repr__(self):
        body = ", ".join(f"{format_word(w)}: {format_rational(v)}"
                         for w, v in self.support().items())
        return f"{type(self).__name__}(n={self.n}, {{{body}}})"


class CorrelationTensor(_Tensor):
    """Contravariant tensor of correlators, i.e. an (unnormalized) box."""

    variance = "upper"


class FunctionalTensor(_Tensor):
    """Covariant tensor, read as the inequality ``sum_s f_s x^s >= 0``."""

    variance = "lower"


# The index-raising and index-lowering matrices in (-1, 0, +1) order.
_h = Fraction(1, 2)
F_UPPER = (
    (Fraction(1), Fraction(0), Fraction(1)),
    (Fraction(0), Fraction(1), Fraction(0)),
    (Fraction(1), Fraction(0), Fraction(-1)),
)
F_LOWER = (
    (_h, Fraction(0), _h),
    (Fraction(0), Fraction(1), Fraction(0)),
    (_h, Fraction(0), -_h),
)


@dataclass(frozen=True)
class FTensor:
    raised: tuple = F_UPPER
    lowered: tuple = F_LOWER


F = FTensor()


def apply_per_party(entries: Sequence, n: int, matrix) -> np.ndarray:
    """Apply a 3x3 matrix to every index of a dense 3^n tensor.

    ``out[s1..sn] = sum_t M[s1][t1] ... M[sn][tn] in[t1..tn]``.  Works for
    object (Fraction) and integer arrays alike.
    """
    mat = np.array(matrix, dtype=object if not isinstance(matrix, np.ndarray) else matrix.dtype)
    arr = np.asarray(entries).reshape((3,) * n)
    for axis in range(n):
        arr = np.moveaxis(np.tensordot(mat, arr, axes=([1], [axis])), 0, axis)
    return arr.reshape(-1)


def lower(x: CorrelationTensor) -> FunctionalTensor:
    if not isinstance(x, CorrelationTensor):
        raise TypeError("lower() expects a CorrelationTensor")
    return FunctionalTensor(x.n, tuple(apply_per_party(x.entries, x.n, F_LOWER)))


def raise_(f: FunctionalTensor) -> CorrelationTensor:
    if not isinstance(f, FunctionalTensor):
        raise TypeError("raise_() expects a FunctionalTensor")
    return CorrelationTensor(f.n, tuple(apply_per_party(f.entries, f.n, F_UPPER)))


def transform_variance(t: _Tensor, direction: str):
    """Lower a correlation tensor or raise a functional through F."""
    if direction == "lower":
        return lower(t)
    if direction == "raise":
        return raise_(t)
    raise ValueError(f"direction must be 'lower' or 'raise', not {direction!r}")


def pair(f: FunctionalTensor, x: CorrelationTensor) -> Fraction:
    """Evaluate the functional ``f`` on the box ``x``."""
    if not isinstance(f, FunctionalTensor) or not isinstance(x, CorrelationTensor):
        raise TypeError("pair() expects (FunctionalTensor, CorrelationTensor)")
    if f.n != x.n:
        raise DimensionMismatch(f"party counts differ: {f.n} vs {x.n}")
    return sum((a * b for a, b in zip(f.entries, x.entries)), Fraction(0))


def tensor_product(*factors: _Tensor):
    """Outer product; the first factor's party becomes party 1."""
    cls = type(factors[0])
    vals = [Fraction(1)]
    n = 0
    for t in factors:
        if type(t) is not cls:
            raise TypeError("cannot mix variances in a tensor product")
        vals = [a * b for a in vals for b in t.entries]
        n += t.n
    return cls(n, tuple(vals))


# ---------------------------------------------------------------------------
# text format

_TENSOR_HEADER = re.compile(
    r"^bellcone-tensor v1; n=(\d+); variance=(upper|lower)\s*$")


def dumps_tensor(t: _Tensor) -> str:
    lines = [f"bellcone-tensor v1; n={t.n}; variance={t.variance}"]
    for w, v in t.items():
        lines.append(f"{format_word(w)} {format_rational(v)}")
    return "\n".join(lines) + "\n"


def loads_tensor(text: str) -> _Tensor:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty tensor document")
    m = _TENSOR_HEADER.match(lines[0])
    if m is None:
        raise FormatError(f"bad tensor header: {lines[0]!r}")
    n = int(m.group(1))
    cls = CorrelationTensor if m.group(2) == "upper" else FunctionalTensor
    values: dict[Word, Fraction] = {}
    for ln in lines[1:]:
        try:
            word_txt, val_txt = ln.split()
            word = parse_word(word_txt)
            val = Fraction(val_txt)
        except (ValueError, ZeroDivisionError) as exc:
            raise FormatError(f"bad tensor line {ln!r}") from exc
        if len(word) != n:
            raise FormatError(f"word {word_txt!r} does not have {n} letters")
        if word in values:
            raise FormatError(f"duplicate word {word_txt!r}")
        values[word] = val
    if n < 1:
        raise FormatError("n must be positive")
    return cls.from_dict(n, values)
