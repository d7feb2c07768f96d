"""N-adic intervals, cylinders and affine iterated function systems.

Endpoints are exact: a level-``k`` interval is stored as its digit word and
the left endpoint is the integer numerator over ``N**k``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .cuntz import Word, all_words, as_word

MAX_LEVEL = 40


@dataclass(frozen=True)
class NadicInterval:
    """``J_k(a) = [sum_i a_i N^-i, sum_i a_i N^-i + N^-k)``."""

    N: int
    digits: tuple[int, ...] = ()

    def __post_init__(self):
        word = Word(self.N, tuple(self.digits))  # validates digits
        if len(word) > MAX_LEVEL:
            raise ValueError(f"level {len(word)} exceeds cap {MAX_LEVEL}")
        object.__setattr__(self, "digits", word.digits)

    @property
    def k(self) -> int:
        return len(self.digits)

    @property
    def word(self) -> Word:
        return Word(self.N, self.digits)

    @property
    def denominator(self) -> int:
        return self.N**self.k

    @property
    def numerator(self) -> int:
        n = 0
        for d in self.digits:
            n = n * self.N + d
        return n

    @property
    def left(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    @property
    def width(self) -> Fraction:
        return Fraction(1, self.denominator)

    @property
    def right(self) -> Fraction:
        return Fraction(self.numerator + 1, self.denominator)

    def __contains__(self, x) -> bool:
        return self.left <= x < self.right

    def contains_interval(self, other: "NadicInterval") -> bool:
        return self.left <= other.left and other.right <= self.right

    def disjoint(self, other: "NadicInterval") -> bool:
        return self.right <= other.left or other.right <= self.left

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "digits": list(self.digits),
            "left": f"{self.numerator}/{self.denominator}",
            "width": f"1/{self.denominator}",
        }

    def __str__(self) -> str:
        return f"[{self.left}, {self.right})"


def interval(N: int, digits: Sequence[int] | Word = ()) -> NadicInterval:
    if isinstance(digits, Word):
        digits = as_word(N, digits).digits
    return NadicInterval(N, tuple(digits))


def children(J: NadicInterval) -> list[NadicInterval]:
    return [NadicInterval(J.N, J.digits + (i,)) for i in range(J.N)]


def level_intervals(N: int, k: int) -> Iterator[NadicInterval]:
    for w in all_words(N, k):
        yield NadicInterval(N, w.digits)


@dataclass(frozen=True)
class Cylinder:
    """``{x in Gamma_N^inf : x_1 = a_1, ..., x_k = a_k}``."""

    N: int
    prefix: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "prefix", Word(self.N, tuple(self.prefix)).digits)

    def contains(self, x: Sequence[int]) -> bool:
        return tuple(x[: len(self.prefix)]) == self.prefix


def cylinder_to_interval(c: Cylinder) -> NadicInterval:
    return NadicInterval(c.N, c.prefix)


@dataclass(frozen=True)
class IfsSystem:
    """Affine branches ``sigma_i(x) = (x + t_i) / s`` with the forward map
    ``sigma(x) = s x mod 1``.

    ``N`` is the number of branches; ``s`` the contraction base. The base-N
    interval system has ``s = N`` and ``t_i = i``; the middle-third Cantor
    system has ``s = 3`` and ``t = (0, 2)``.
    """

    scale: int
    translations: tuple[int, ...]
    name: str = "ifs"

    def __post_init__(self):
        object.__setattr__(self, "translations", tuple(int(t) for t in self.translations))
        if self.scale < 2:
            raise ValueError("scale must be >= 2")
        if len(set(self.translations)) != len(self.translations):
            raise ValueError("translations must be distinct")
        for t in self.translations:
            if not 0 <= t < self.scale:
                raise ValueError(f"translation {t} outside [0, {self.scale})")

    @property
    def N(self) -> int:
        return len(self.translations)

    def branch(self, i: int, x) -> Fraction:
        return (Fraction(x) + self.translations[i]) / self.scale

    def digit_predicate(self, J: NadicInterval) -> bool:
        """True when every base-``s`` digit of ``J`` is a translation, i.e. ``J``
        is one of the cells generated by the system."""
        return J.N == self.scale and all(d in self.translations for d in J.digits)


def base_ifs(N: int) -> IfsSystem:
    return IfsSystem(N, tuple(range(N)), name=f"base{N}")


def cantor_ifs() -> IfsSystem:
    return IfsSystem(3, (0, 2), name="cantor")


def _as_interval(ifs: IfsSystem, J: NadicInterval | None) -> NadicInterval:
    if J is None:
        return NadicInterval(ifs.scale, ())
    if J.N != ifs.scale:
        raise ValueError(f"interval in base {J.N} used with an IFS of base {ifs.scale}")
    return J


def sigma_map(ifs: IfsSystem, a: Sequence[int] | Word, J: NadicInterval | None = None) -> NadicInterval:
    """``sigma_{a_1} o ... o sigma_{a_k}(J)``; ``J`` defaults to ``[0, 1)``.

    Each branch prepends the base-``s`` digit ``t_i``, so the image of an
    ``s``-adic cell is again an ``s``-adic cell.
    """
    J = _as_interval(ifs, J)
    digits = a.digits if isinstance(a, Word) else tuple(a)
    if isinstance(a, Word) and a.N != ifs.N:
        raise ValueError(f"word over N={a.N} used with an IFS of {ifs.N} branches")
    for i in digits:
        if not 0 <= i < ifs.N:
            raise ValueError(f"branch {i} out of range")
    return NadicInterval(ifs.scale, tuple(ifs.translations[i] for i in digits) + J.digits)


def sigma_forward(ifs: IfsSystem, x) -> Fraction:
    """``s x mod 1`` on exact rationals in ``[0, 1)``."""
    x = Fraction(x)
    if not 0 <= x < 1:
        raise ValueError(f"x={x} outside [0, 1)")
    y = x * ifs.scale
    return y - (y.numerator // y.denominator)


def pullback(ifs: IfsSystem, i: int, J: NadicInterval) -> NadicInterval | None:
    """``sigma_i^{-1}(J) = {x in [0,1) : sigma_i(x) in J}`` as a cell, or None if empty."""
    J = _as_interval(ifs, J)
    if J.k == 0:
        return J
    if J.digits[0] != ifs.translations[i]:
        return None
    return NadicInterval(J.N, J.digits[1:])


def preimage(ifs: IfsSystem, J: NadicInterval) -> list[NadicInterval]:
    """``sigma^{-1}(J)`` as the union of branch images ``sigma_i(J)``."""
    J = _as_interval(ifs, J)
    return [sigma_map(ifs, (i,), J) for i in range(ifs.N)]
