"""Sparse Laurent polynomials on the unit circle.

A ``LaurentPoly`` holds finitely many Fourier coefficients ``{degree: coeff}``.
The same object plays three roles in this package: a filter ``m_j(z)``, a
vector of ``L^2(T)`` written in the basis ``e_n(z) = z^n``, and a finitely
supported signal in ``l^2(Z)``.
"""

from __future__ import annotations

import cmath
import math
from typing import Iterable, Mapping

#: coefficients with modulus below this are dropped after add/mul
PRUNE_TOL = 1e-14


def _pruned(coeffs: Mapping[int, complex], tol: float = PRUNE_TOL) -> dict[int, complex]:
    return {int(k): complex(v) for k, v in coeffs.items() if abs(v) >= tol}


class LaurentPoly:
    """Immutable, finitely supported trigonometric polynomial.

    Parameters
    ----------
    coeffs : mapping of int to complex, optional
        Fourier coefficients keyed by degree (negative degrees allowed).
    prune : bool
        Drop coefficients with modulus below ``PRUNE_TOL``. Constructors used
        for user input keep exact zeros out but otherwise store what they get.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Mapping[int, complex] | None = None, prune: bool = True):
        coeffs = coeffs or {}
        if prune:
            c = _pruned(coeffs)
        else:
            c = {int(k): complex(v) for k, v in coeffs.items() if v != 0}
        object.__setattr__(self, "_c", c)

    def __setattr__(self, name, value):
        raise AttributeError("LaurentPoly is immutable")

    # -- constructors -----------------------------------------------------

    @classmethod
    def basis(cls, n: int, scale: complex = 1.0) -> "LaurentPoly":
        """The Fourier basis vector ``e_n``, optionally scaled."""
        return cls({n: scale})

    @classmethod
    def zero(cls) -> "LaurentPoly":
        return cls()

    @classmethod
    def from_list(cls, values: Iterable[complex], start: int = 0) -> "LaurentPoly":
        """Dense coefficient list beginning at degree ``start``."""
        return cls({start + i: v for i, v in enumerate(values)})

    # -- container protocol ---------------------------------------------------

    @property
    def coeffs(self) -> dict[int, complex]:
        return dict(self._c)

    def coeff(self, k: int) -> complex:
        return self._c.get(k, 0j)

    def __getitem__(self, k: int) -> complex:
        return self._c.get(k, 0j)

    def items(self):
        return self._c.items()

    def support(self) -> list[int]:
        return sorted(self._c)

    def __len__(self) -> int:
        return len(self._c)

    def __bool__(self) -> bool:
        return bool(self._c)

    @property
    def min_degree(self) -> int:
        return min(self._c) if self._c else 0

    @property
    def max_degree(self) -> int:
        return max(self._c) if self._c else 0

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return add(self, other)

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return add(self, other.scale(-1.0))

    def __neg__(self) -> "LaurentPoly":
        return self.scale(-1.0)

    def __mul__(self, other):
        if isinstance(other, LaurentPoly):
            return mul(self, other)
        if isinstance(other, (int, float, complex)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float, complex)):
            return self.scale(1.0 / other)
        return NotImplemented

    def scale(self, c: complex) -> "LaurentPoly":
        return LaurentPoly({k: c * v for k, v in self._c.items()})

    def norm2(self) -> float:
        """Squared ``L^2(T)`` norm, i.e. the sum of squared coefficient moduli."""
        return math.fsum(v.real * v.real + v.imag * v.imag for v in self._c.values())

    def norm(self) -> float:
        return math.sqrt(self.norm2())

    def distance(self, other: "LaurentPoly") -> float:
        """Max-modulus coefficient difference."""
        keys = self._c.keys() | other._c.keys()
        return max((abs(self.coeff(k) - other.coeff(k)) for k in keys), default=0.0)

    def allclose(self, other: "LaurentPoly", tol: float = 1e-9) -> bool:
        return self.distance(other) <= tol

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._c == other._c

    def __hash__(self):
        return hash(tuple(sorted(self._c.items(), key=lambda kv: kv[0])))

    def __repr__(self) -> str:
        if not self._c:
            return "LaurentPoly(0)"
        terms = ", ".join(f"{k}: {_fmt(v)}" for k, v in sorted(self._c.items()))
        return f"LaurentPoly({{{terms}}})"

    # -- serialization ----------------------------------------------------

    def to_json(self) -> list[list[float]]:
        """List of ``[degree, re, im]`` triples sorted by degree."""
        return [[k, v.real, v.imag] for k, v in sorted(self._c.items())]

    @classmethod
    def from_json(cls, triples: Iterable[Iterable[float]]) -> "LaurentPoly":
        coeffs: dict[int, complex] = {}
        for item in triples:
            item = list(item)
            if len(item) not in (2, 3):
                raise ValueError(f"expected [degree, re, im], got {item!r}")
            deg = item[0]
            if int(deg) != deg:
                raise ValueError(f"degree must be an integer, got {deg!r}")
            im = item[2] if len(item) == 3 else 0.0
            coeffs[int(deg)] = coeffs.get(int(deg), 0j) + complex(float(item[1]), float(im))
        return cls(coeffs, prune=False)


def _fmt(v: complex) -> str:
    if v.imag == 0:
        return f"{v.real:.6g}"
    return f"{v.real:.6g}{v.imag:+.6g}j"


def add(f: LaurentPoly, g: LaurentPoly) -> LaurentPoly:
    out = dict(f._c)
    for k, v in g._c.items():
        out[k] = out.get(k, 0j) + v
    return LaurentPoly(out)


def mul(f: LaurentPoly, g: LaurentPoly) -> LaurentPoly:
    """Coefficient convolution."""
    if len(f) > len(g):
        f, g = g, f
    out: dict[int, complex] = {}
    gi = list(g._c.items())
    for j, a in f._c.items():
        for k, b in gi:
            d = j + k
            out[d] = out.get(d, 0j) + a * b
    return LaurentPoly(out)


def conj_reflect(f: LaurentPoly) -> LaurentPoly:
    """The function ``z -> conj(f(z))`` on ``|z| = 1``: coefficient at ``k``
    becomes the conjugate of the coefficient at ``-k``."""
    return LaurentPoly({-k: v.conjugate() for k, v in f._c.items()}, prune=False)


def dilate(f: LaurentPoly, N: int) -> LaurentPoly:
    """Substitute ``z -> z^N``."""
    if N < 2:
        raise ValueError(f"dilation factor must be >= 2, got {N}")
    return LaurentPoly({N * k: v for k, v in f._c.items()}, prune=False)


def inner(f: LaurentPoly, g: LaurentPoly) -> complex:
    """``<f|g>``, conjugate-linear in the first argument."""
    if len(f) > len(g):
        small, big, flip = g, f, True
    else:
        small, big, flip = f, g, False
    acc = 0j
    for k, v in small._c.items():
        w = big._c.get(k)
        if w is not None:
            acc += (v * w.conjugate()) if flip else (v.conjugate() * w)
    return acc


def eval_at(f: LaurentPoly, theta: float) -> complex:
    """Evaluate at ``z = exp(2 pi i theta)``."""
    return sum((v * cmath.exp(2j * math.pi * k * theta) for k, v in f._c.items()), 0j)


#: ``eval`` itself is a builtin name
evaluate = eval_at
