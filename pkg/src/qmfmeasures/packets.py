"""Wavelet packets in the exact Haar case, and scaling-function products.

Haar packets are step functions on ``[0, 1)``: the Walsh functions. They are
built in the time domain from the two-scale recursion
``w_{2n+b}(x) = sqrt(2) sum_l h^(b)_l w_n(2x - l)`` with ``h^(b)`` the
coefficients of ``m_b``, starting from ``w_0 = chi_[0,1)``.

Step-function arithmetic uses exact rational breakpoints; only the cell
values are floating point.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .cuntz import Word, WordLike, as_word, m_word
from .filterbank import FilterSystem, haar
from .laurent import eval_at

# -- packet indices -----------------------------------------------------------


@dataclass(frozen=True)
class PacketIndex:
    """``n = a_1 + a_2 N + ... + a_k N^(k-1)`` with the digit count ``k`` fixed.

    Leading zeros are meaningful: bit reversal depends on ``k``.
    """

    word: Word

    @property
    def N(self) -> int:
        return self.word.N

    @property
    def k(self) -> int:
        return len(self.word)

    @property
    def digits(self) -> tuple[int, ...]:
        return self.word.digits

    @property
    def value(self) -> int:
        n = 0
        for d in reversed(self.word.digits):
            n = n * self.N + d
        return n

    @classmethod
    def from_digits(cls, N: int, digits: Sequence[int]) -> "PacketIndex":
        return cls(Word(N, tuple(digits)))

    @classmethod
    def from_value(cls, N: int, n: int, k: int | None = None) -> "PacketIndex":
        if n < 0:
            raise ValueError("packet index must be >= 0")
        digits = []
        m = n
        while m:
            m, d = divmod(m, N)
            digits.append(d)
        if k is None:
            k = len(digits)
        if len(digits) > k:
            raise ValueError(f"{n} needs more than {k} base-{N} digits")
        digits += [0] * (k - len(digits))
        return cls(Word(N, tuple(digits)))

    def __str__(self) -> str:
        return f"{self.value} (N={self.N}, k={self.k})"


def bit_reverse(p: PacketIndex) -> PacketIndex:
    """``a_k + a_{k-1} N + ... + a_1 N^(k-1)``."""
    return PacketIndex(Word(p.N, tuple(reversed(p.digits))))


# -- step functions -----------------------------------------------------------


@dataclass(frozen=True)
class StepFunction:
    """Piecewise constant function on the grid ``N^-level Z``.

    Cell ``offset + i`` is ``[(offset + i) N^-level, (offset + i + 1) N^-level)``
    and carries ``values[i]``; the function vanishes outside. ``level`` may be
    negative (cells wider than 1).
    """

    N: int
    level: int
    offset: int
    values: tuple[complex, ...]

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("grid base must be >= 2")
        object.__setattr__(self, "values", tuple(complex(v) for v in self.values))

    @classmethod
    def indicator(cls, N: int, left: int = 0, right: int = 1) -> "StepFunction":
        """``chi_[left, right)`` for integers ``left < right``."""
        return cls(N, 0, left, (1.0,) * (right - left))

    @property
    def width(self) -> Fraction:
        return Fraction(self.N) ** (-self.level)

    @property
    def support(self) -> tuple[Fraction, Fraction]:
        w = self.width
        return self.offset * w, (self.offset + len(self.values)) * w

    def breakpoints(self) -> list[Fraction]:
        w = self.width
        return [(self.offset + i) * w for i in range(len(self.values) + 1)]

    def cells(self) -> Iterable[tuple[Fraction, complex]]:
        w = self.width
        for i, v in enumerate(self.values):
            yield (self.offset + i) * w, v

    def __call__(self, x) -> complex:
        x = Fraction(x)
        i = math.floor(x / self.width) - self.offset
        if 0 <= i < len(self.values):
            return self.values[i]
        return 0j

    def on_grid(self, level: int) -> "StepFunction":
        """The same function on the finer grid ``N^-level``."""
        if level < self.level:
            raise ValueError(f"cannot coarsen level {self.level} to {level}")
        r = self.N ** (level - self.level)
        vals = tuple(v for v in self.values for _ in range(r))
        return StepFunction(self.N, level, self.offset * r, vals)

    def shift(self, t) -> "StepFunction":
        """``x -> f(x - t)``; ``t`` must lie on a grid ``N^-j Z``."""
        t = Fraction(t)
        level = max(self.level, _grid_level(self.N, t))
        g = self.on_grid(level)
        steps = t * Fraction(self.N) ** level
        return StepFunction(self.N, level, g.offset + int(steps), g.values)

    def dilate(self, q: int) -> "StepFunction":
        """``x -> f(N^q x)``."""
        return StepFunction(self.N, self.level + q, self.offset, self.values)

    def scale(self, c: complex) -> "StepFunction":
        return StepFunction(self.N, self.level, self.offset, tuple(c * v for v in self.values))

    def conj(self) -> "StepFunction":
        return StepFunction(self.N, self.level, self.offset, tuple(v.conjugate() for v in self.values))

    def integral(self) -> complex:
        w = float(self.width)
        return sum(self.values, 0j) * w


def _grid_level(N: int, t: Fraction, max_level: int = 64) -> int:
    """Smallest ``j >= 0`` with ``t`` in ``N^-j Z``; raises if there is none."""
    for j in range(max_level + 1):
        if (t * N**j).denominator == 1:
            return j
    raise ValueError(f"{t} is not on a base-{N} grid")


def _aligned(f: StepFunction, g: StepFunction) -> tuple[StepFunction, StepFunction]:
    if f.N != g.N:
        raise ValueError(f"step functions on base-{f.N} and base-{g.N} grids are incompatible")
    level = max(f.level, g.level)
    return f.on_grid(level), g.on_grid(level)


def step_inner(f: StepFunction, g: StepFunction) -> complex:
    """``int conj(f) g``, exact in the breakpoints."""
    f, g = _aligned(f, g)
    lo = max(f.offset, g.offset)
    hi = min(f.offset + len(f.values), g.offset + len(g.values))
    acc = 0j
    for c in range(lo, hi):
        acc += f.values[c - f.offset].conjugate() * g.values[c - g.offset]
    return acc * float(f.width)


def step_difference_sup(f: StepFunction, g: StepFunction) -> float:
    """``sup |f - g|``."""
    f, g = _aligned(f, g)
    cells = set(range(f.offset, f.offset + len(f.values))) | set(range(g.offset, g.offset + len(g.values)))
    best = 0.0
    for c in cells:
        a = f.values[c - f.offset] if 0 <= c - f.offset < len(f.values) else 0j
        b = g.values[c - g.offset] if 0 <= c - g.offset < len(g.values) else 0j
        best = max(best, abs(a - b))
    return best


# -- Haar packets -------------------------------------------------------------


def require_haar(fs: FilterSystem, tol: float = 1e-12) -> None:
    ref = haar()
    if fs.N != 2 or any(not a.allclose(b, tol) for a, b in zip(fs.filters, ref.filters)):
        raise ValueError("only the Haar system is supported here")


def _refine(fs: FilterSystem, b: int, w: StepFunction) -> StepFunction:
    """``sqrt(2) sum_l h^(b)_l w(2x - l)`` for ``w`` supported in ``[0, 1)``."""
    g = w.dilate(1)
    out: dict[int, complex] = {}
    for l, h in fs.filters[b].items():
        term = g.shift(Fraction(l, 2))
        for i, v in enumerate(term.values):
            c = term.offset + i
            out[c] = out.get(c, 0j) + math.sqrt(2.0) * h * v
    lo, hi = min(out), max(out)
    return StepFunction(2, g.level, lo, tuple(out.get(c, 0j) for c in range(lo, hi + 1)))


def haar_packet(n: PacketIndex | int, fs: FilterSystem | None = None) -> StepFunction:
    """Haar packet ``w_n`` on the grid ``2^-k``, ``k`` the digit count of ``n``.

    With digits ``(a_1, ..., a_k)``, ``w_n = R_{a_1} R_{a_2} ... R_{a_k} chi_[0,1)``
    where ``R_b`` is the two-scale refinement with filter ``m_b``.
    """
    fs = fs or haar()
    require_haar(fs)
    if isinstance(n, int):
        n = PacketIndex.from_value(2, n)
    if n.N != 2:
        raise ValueError("Haar packets need N = 2")
    w = StepFunction.indicator(2)
    for b in reversed(n.digits):
        w = _refine(fs, b, w)
    return w.on_grid(n.k)


def scaling_product_truncated(fs: FilterSystem, K: int, xi: float, tol: float = 1e-9) -> complex:
    """``prod_{k=1}^K m_0(xi / N^k) / sqrt(N)``, an approximation of ``phi^(xi)``.

    The frequency-domain filter is ``m_0(xi) = sum_k a_k exp(-2 pi i k xi)``,
    matching ``phi^(xi) = int phi(x) exp(-2 pi i x xi) dx``.
    """
    if K < 0:
        raise ValueError("K must be >= 0")
    m0 = fs.filters[0]
    r = math.sqrt(fs.N)
    if abs(eval_at(m0, 0.0) - r) > tol:
        raise ValueError(f"low-pass filter is not normalized: m_0(1) = {eval_at(m0, 0.0)}, expected {r}")
    acc = 1 + 0j
    for k in range(1, K + 1):
        acc *= eval_at(m0, -xi / fs.N**k) / r
    return acc


def haar_scaling_ft(xi: float) -> complex:
    """Closed-form Fourier transform of ``chi_[0,1)``."""
    if xi == 0:
        return 1 + 0j
    return (1 - cmath.exp(-2j * math.pi * xi)) / (2j * math.pi * xi)


def T_phi_k(phi: StepFunction, w: StepFunction, k: int, x) -> complex:
    """``int w(x + y) conj(phi(N^k y)) dy`` by exact cell overlap."""
    if phi.N != w.N:
        raise ValueError("phi and w live on grids of different bases")
    return step_inner(phi.dilate(k), w.shift(-Fraction(x)))


# -- filter coefficients versus packet integrals ------------------------------


@dataclass
class LemmaCheck:
    lhs: complex
    rhs: complex
    defect: float


def packet_side(a: WordLike, p: int, j: int, fs: FilterSystem | None = None) -> complex:
    """``N^(k/2) (T_phi^k w_nbar)(j - p / N^k)`` with ``nbar`` the bit reversal
    of the digit word ``a``."""
    fs = fs or haar()
    a = as_word(fs, a)
    k = len(a)
    w = haar_packet(bit_reverse(PacketIndex(a)), fs)
    phi = StepFunction.indicator(2)
    return 2 ** (k / 2) * T_phi_k(phi, w, k, Fraction(j) - Fraction(p, 2**k))


def check_lemma_com3(a: WordLike, p: int, j: int, fs: FilterSystem | None = None) -> LemmaCheck:
    """Compare ``m_a[j N^k - p]`` with the packet integral :func:`packet_side`.

    The filter coefficient is read at ``j N^k - p``. That is the index for
    which the identity holds with ``phi = chi_[0,1)`` and frequency filters
    ``m(xi) = sum_k a_k exp(-2 pi i k xi)``; see :func:`filter_side_reflected`.
    """
    fs = fs or haar()
    require_haar(fs)
    a = as_word(fs, a)
    lhs = m_word(fs, a).coeff(j * 2 ** len(a) - p)
    rhs = packet_side(a, p, j, fs)
    return LemmaCheck(lhs, rhs, abs(lhs - rhs))


def filter_side_reflected(a: WordLike, p: int, j: int, fs: FilterSystem | None = None) -> complex:
    """``m_a[p - j N^k]``, the coefficient at the mirrored index. Kept so that
    the two index conventions can be compared."""
    fs = fs or haar()
    a = as_word(fs, a)
    return m_word(fs, a).coeff(p - j * 2 ** len(a))


def mu_p_via_packets(p: int, a: WordLike, fs: FilterSystem | None = None) -> float:
    """``N^k sum_j |(T_phi^k w_nbar)(j - p / N^k)|^2``.

    Only the ``j`` whose window ``[j - p/N^k, j - p/N^k + N^-k)`` meets
    ``[0, 1)`` contribute.
    """
    fs = fs or haar()
    require_haar(fs)
    a = as_word(fs, a)
    k = len(a)
    P = 2**k
    total = 0.0
    for j in range((p - 1) // P - 1, p // P + 2):
        total += abs(packet_side(a, p, j, fs)) ** 2
    return total


# -- packet bases -------------------------------------------------------------


@dataclass
class PacketOnbReport:
    gram_defect: float
    n_functions: int
    bound: Fraction


def frequency_interval(n: int, q: int) -> tuple[Fraction, Fraction]:
    """``I(n, q) = [N^q n, N^q (n + 1))`` with ``N = 2``."""
    s = Fraction(2) ** q
    return s * n, s * (n + 1)


def packet_onb_check(
    E: Sequence[tuple[PacketIndex | int, int]], kmax: int = 1, fs: FilterSystem | None = None
) -> PacketOnbReport:
    """Gram defect of ``{2^(q/2) w_n(2^q x - t) : (n, q) in E, |t| <= kmax}``.

    Raises
    ------
    ValueError
        If the intervals ``I(n, q)`` overlap or leave a gap, i.e. do not tile
        ``[0, bound)``.
    """
    fs = fs or haar()
    require_haar(fs)
    if not E:
        raise ValueError("E is empty")
    entries = []
    for n, q in E:
        pi = PacketIndex.from_value(2, n) if isinstance(n, int) else n
        entries.append((pi, int(q)))
    spans = sorted(frequency_interval(pi.value, q) for pi, q in entries)
    if spans[0][0] != 0:
        raise ValueError(f"intervals leave a gap at [0, {spans[0][0]})")
    for (l0, r0), (l1, r1) in zip(spans, spans[1:]):
        if l1 < r0:
            raise ValueError(f"intervals [{l0}, {r0}) and [{l1}, {r1}) overlap")
        if l1 > r0:
            raise ValueError(f"intervals leave a gap at [{r0}, {l1})")

    funcs = []
    for pi, q in entries:
        w = haar_packet(pi, fs).dilate(q).scale(2 ** (q / 2))
        for t in range(-kmax, kmax + 1):
            funcs.append(w.shift(Fraction(t) / Fraction(2) ** q))
    G = np.array([[step_inner(f, g) for g in funcs] for f in funcs])
    defect = float(np.max(np.abs(G - np.eye(len(funcs)))))
    return PacketOnbReport(defect, len(funcs), spans[-1][1])


def packet_csv(w: StepFunction) -> str:
    lines = ["left,re,im"]
    for x, v in w.cells():
        lines.append(f"{x},{v.real!r},{v.imag!r}")
    return "\n".join(lines) + "\n"
