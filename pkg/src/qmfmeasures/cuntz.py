"""The Cuntz family ``S_j f(z) = m_j(z) f(z^N)`` acting on ``L^2(T)``.

Words ``a = (a_1, ..., a_k)`` index the isometries ``S_a = S_{a_1} ... S_{a_k}``,
their adjoints ``S_a^* = S_{a_k}^* ... S_{a_1}^*`` and the projections
``P_k(a) = S_a S_a^*``. Everything is computed on Fourier coefficients; the
adjoint uses index arithmetic rather than sums over roots of unity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Union

from .filterbank import FilterSystem
from .laurent import LaurentPoly, dilate, mul


@dataclass(frozen=True)
class Word:
    """A finite digit string over ``{0, ..., N-1}``. The empty word is the identity."""

    N: int
    digits: tuple[int, ...] = ()

    def __post_init__(self):
        if self.N < 2:
            raise ValueError(f"need N >= 2, got {self.N}")
        digits = tuple(int(d) for d in self.digits)
        for d in digits:
            if not 0 <= d < self.N:
                raise ValueError(f"digit {d} out of range for N={self.N}")
        object.__setattr__(self, "digits", digits)

    def __len__(self) -> int:
        return len(self.digits)

    def __iter__(self) -> Iterator[int]:
        return iter(self.digits)

    def __getitem__(self, i):
        return self.digits[i]

    @property
    def k(self) -> int:
        return len(self.digits)

    def __add__(self, other: "Word") -> "Word":
        if not isinstance(other, Word):
            return NotImplemented
        if other.N != self.N:
            raise ValueError(f"cannot concatenate words over N={self.N} and N={other.N}")
        return Word(self.N, self.digits + other.digits)

    def prepend(self, i: int) -> "Word":
        return Word(self.N, (i,) + self.digits)

    def append(self, i: int) -> "Word":
        return Word(self.N, self.digits + (i,))

    def index(self) -> int:
        """Position in interval order: ``sum_i a_i N^(k-i)``."""
        idx = 0
        for d in self.digits:
            idx = idx * self.N + d
        return idx

    @classmethod
    def from_index(cls, N: int, k: int, idx: int) -> "Word":
        if not 0 <= idx < N**k:
            raise ValueError(f"index {idx} out of range for level {k}")
        digits = []
        for _ in range(k):
            idx, d = divmod(idx, N)
            digits.append(d)
        return cls(N, tuple(reversed(digits)))

    def __str__(self) -> str:
        sep = "" if self.N <= 10 else "."
        return sep.join(str(d) for d in self.digits) or "()"


WordLike = Union[Word, Sequence[int]]


def as_word(fs_or_N, a: WordLike) -> Word:
    N = fs_or_N if isinstance(fs_or_N, int) else fs_or_N.N
    if isinstance(a, Word):
        if a.N != N:
            raise ValueError(f"word over N={a.N} used with a system of N={N}")
        return a
    return Word(N, tuple(a))


def all_words(N: int, k: int) -> Iterator[Word]:
    """All words of length ``k`` in interval (lexicographic) order."""
    for digits in itertools.product(range(N), repeat=k):
        yield Word(N, digits)


def _check_digit(fs: FilterSystem, j: int) -> None:
    if not 0 <= j < fs.N:
        raise ValueError(f"digit {j} out of range for N={fs.N}")


def apply_S(fs: FilterSystem, j: int, f: LaurentPoly) -> LaurentPoly:
    """``m_j(z) f(z^N)``."""
    _check_digit(fs, j)
    if not f:
        return LaurentPoly()
    return mul(fs.filters[j], dilate(f, fs.N))


def apply_S_star(fs: FilterSystem, j: int, f: LaurentPoly) -> LaurentPoly:
    """Adjoint of :func:`apply_S`: ``g[k] = sum_m conj(m_j[m]) f[m + N k]``."""
    _check_digit(fs, j)
    N = fs.N
    out: dict[int, complex] = {}
    filt = [(m, v.conjugate()) for m, v in fs.filters[j].items()]
    for n, c in f.items():
        for m, cv in filt:
            k, r = divmod(n - m, N)
            if r == 0:
                out[k] = out.get(k, 0j) + cv * c
    return LaurentPoly(out)


def apply_word(fs: FilterSystem, a: WordLike, f: LaurentPoly) -> LaurentPoly:
    """``S_a f = S_{a_1}(S_{a_2}(... S_{a_k} f))``."""
    a = as_word(fs, a)
    for j in reversed(a.digits):
        f = apply_S(fs, j, f)
    return f


def apply_word_star(fs: FilterSystem, a: WordLike, f: LaurentPoly) -> LaurentPoly:
    """``S_a^* f = S_{a_k}^*(... S_{a_1}^* f)``."""
    a = as_word(fs, a)
    for j in a.digits:
        if not f:
            break
        f = apply_S_star(fs, j, f)
    return f


def projection(fs: FilterSystem, a: WordLike, f: LaurentPoly) -> LaurentPoly:
    """``P(a) f = S_a S_a^* f``."""
    return apply_word(fs, a, apply_word_star(fs, a, f))


def m_word(fs: FilterSystem, a: WordLike) -> LaurentPoly:
    """``m_a(z) = m_{a_1}(z) m_{a_2}(z^N) ... m_{a_k}(z^{N^(k-1)})``, built as
    a product of dilated filters (not through :func:`apply_word`)."""
    a = as_word(fs, a)
    out = LaurentPoly.basis(0)
    scale = 1
    for j in a.digits:
        if scale == 1:
            factor = fs.filters[j]
        else:
            factor = dilate(fs.filters[j], scale)
        out = mul(out, factor)
        scale *= fs.N
    return out


@dataclass(frozen=True)
class Monomial:
    """``scalar * S_left S_right^*``."""

    left: Word
    right: Word
    scalar: complex = 1.0

    def __post_init__(self):
        if self.left.N != self.right.N:
            raise ValueError("left and right words must share N")

    @classmethod
    def identity(cls, N: int) -> "Monomial":
        return cls(Word(N), Word(N), 1.0)

    @property
    def N(self) -> int:
        return self.left.N


def monomial_apply(fs: FilterSystem, m: Monomial, f: LaurentPoly) -> LaurentPoly:
    return apply_word(fs, m.left, apply_word_star(fs, m.right, f)).scale(m.scalar)


def alpha_on_monomial(fs: FilterSystem, m: Monomial) -> list[Monomial]:
    """``alpha(T) = sum_i S_i T S_i^*`` for ``T`` a monomial: the ``N`` terms
    ``S_{i left} S_{i right}^*``."""
    if m.N != fs.N:
        raise ValueError(f"monomial over N={m.N} used with a system of N={fs.N}")
    return [Monomial(m.left.prepend(i), m.right.prepend(i), m.scalar) for i in range(fs.N)]


def apply_sum(fs: FilterSystem, monomials: Iterable[Monomial], f: LaurentPoly) -> LaurentPoly:
    out = LaurentPoly()
    for m in monomials:
        out = out + monomial_apply(fs, m, f)
    return out
