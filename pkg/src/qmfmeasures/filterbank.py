"""Filter systems and their unitarity check.

A filter system is ``N`` Laurent polynomials ``m_0, ..., m_{N-1}``. The
isometries ``S_j f(z) = m_j(z) f(z^N)`` form a Cuntz family exactly when the
polyphase matrix of the system is unitary on the circle, which is what
:func:`validate` checks.

Coefficients follow the normalization of the standard examples: the Haar
low-pass filter is ``(e_0 + e_1)/sqrt(2)``, so ``m_0(1) = sqrt(N)`` for a
low-pass filter.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from math import comb
from pathlib import Path

import numpy as np

from .laurent import LaurentPoly, conj_reflect, eval_at, mul

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class FilterSystem:
    """``N`` subband filters. Construction does not validate; call
    :func:`validate` (or :meth:`check`) for that."""

    N: int
    filters: tuple[LaurentPoly, ...]
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        if self.N < 2:
            raise ValueError(f"need N >= 2 subbands, got {self.N}")
        object.__setattr__(self, "filters", tuple(self.filters))
        if len(self.filters) != self.N:
            raise ValueError(f"expected {self.N} filters, got {len(self.filters)}")

    def __getitem__(self, j: int) -> LaurentPoly:
        return self.filters[j]

    def check(self, tol: float = DEFAULT_TOL) -> "FilterSystem":
        report = validate(self, tol)
        if not report.passed:
            raise ValueError(
                f"filter system {self.name!r} is not unitary: "
                f"isometry defect {report.max_isometry_defect:.3g}, "
                f"completeness defect {report.max_completeness_defect:.3g}"
            )
        return self

    def mixed(self, u) -> "FilterSystem":
        """The system ``m_i^u = sum_j u[i, j] m_j`` for a constant matrix ``u``."""
        u = np.asarray(u, dtype=complex)
        if u.shape != (self.N, self.N):
            raise ValueError(f"mixing matrix must be {self.N}x{self.N}")
        out = []
        for i in range(self.N):
            acc: dict[int, complex] = {}
            for j in range(self.N):
                for k, v in self.filters[j].items():
                    acc[k] = acc.get(k, 0j) + u[i, j] * v
            out.append(LaurentPoly(acc))
        return FilterSystem(self.N, tuple(out), name=f"{self.name}-mixed")

    # -- filter-spec JSON -------------------------------------------------------

    def to_json(self) -> dict:
        return {"N": self.N, "filters": [m.to_json() for m in self.filters]}

    @classmethod
    def from_json(cls, data: dict, name: str = "custom") -> "FilterSystem":
        try:
            N = data["N"]
            filters = data["filters"]
        except (KeyError, TypeError) as exc:
            raise ValueError("filter spec needs keys 'N' and 'filters'") from exc
        if not isinstance(N, int):
            raise ValueError(f"'N' must be an integer, got {N!r}")
        return cls(N, tuple(LaurentPoly.from_json(m) for m in filters), name=name)

    @classmethod
    def load(cls, path: str | Path) -> "FilterSystem":
        path = Path(path)
        with path.open() as fh:
            return cls.from_json(json.load(fh), name=path.stem)

    def dump(self, path: str | Path) -> None:
        with Path(path).open("w") as fh:
            json.dump(self.to_json(), fh, indent=1)


@dataclass
class ValidationReport:
    max_isometry_defect: float
    max_completeness_defect: float
    passed: bool
    tol: float
    per_pair_defects: dict[tuple[int, int, int], float] = field(default_factory=dict)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status}  isometry defect {self.max_isometry_defect:.3e}  "
            f"completeness defect {self.max_completeness_defect:.3e}  (tol {self.tol:g})"
        )


def polyphase(fs: FilterSystem) -> list[list[LaurentPoly]]:
    """Polyphase components: ``m_j(z) = sum_r z^r A[j][r](z^N)``."""
    N = fs.N
    A: list[list[dict[int, complex]]] = [[{} for _ in range(N)] for _ in range(N)]
    for j, m in enumerate(fs.filters):
        for k, v in m.items():
            q, r = divmod(k, N)
            A[j][r][q] = v
    return [[LaurentPoly(c, prune=False) for c in row] for row in A]


def validate(fs: FilterSystem, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Check the quadrature-mirror conditions.

    Two families of Laurent identities are evaluated:

    * isometry/orthogonality, ``sum_k conj(m_i[k]) m_j[k + N l] = delta_ij delta_l0``
      for every offset ``l`` where the left side can be nonzero;
    * completeness, the polyphase columns are orthonormal:
      ``sum_j conj_reflect(A[j][r]) A[j][s] = delta_rs e_0``.

    The first is ``S_i^* S_j = delta_ij``, the second ``sum_i S_i S_i^* = 1``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    N = fs.N
    if len(fs.filters) != N:
        raise ValueError(f"expected {N} filters, got {len(fs.filters)}")

    per_pair: dict[tuple[int, int, int], float] = {}
    iso = 0.0
    for i in range(N):
        ci = conj_reflect(fs.filters[i])
        for j in range(N):
            corr = mul(ci, fs.filters[j])
            offsets = {d // N for d in corr.support() if d % N == 0} | {0}
            for l in sorted(offsets):
                target = 1.0 if (i == j and l == 0) else 0.0
                d = abs(corr.coeff(N * l) - target)
                per_pair[(i, j, l)] = d
                iso = max(iso, d)

    A = polyphase(fs)
    comp = 0.0
    for r in range(N):
        for s in range(N):
            acc: dict[int, complex] = {}
            for j in range(N):
                for k, v in mul(conj_reflect(A[j][r]), A[j][s]).items():
                    acc[k] = acc.get(k, 0j) + v
            acc[0] = acc.get(0, 0j) - (1.0 if r == s else 0.0)
            comp = max(comp, max((abs(v) for v in acc.values()), default=0.0))

    return ValidationReport(
        max_isometry_defect=iso,
        max_completeness_defect=comp,
        passed=iso <= tol and comp <= tol,
        tol=tol,
        per_pair_defects=per_pair,
    )


# -- builders -----------------------------------------------------------------

_R2 = 1.0 / math.sqrt(2.0)


def haar() -> FilterSystem:
    m0 = LaurentPoly({0: _R2, 1: _R2})
    m1 = LaurentPoly({0: _R2, 1: -_R2})
    return FilterSystem(2, (m0, m1), name="haar")


def permutative_shift(N: int = 2) -> FilterSystem:
    """``m_j = e_j``; ``S_j e_n = e_{N n + j}`` permutes the Fourier basis."""
    if N < 2:
        raise ValueError(f"need N >= 2, got {N}")
    return FilterSystem(N, tuple(LaurentPoly.basis(j) for j in range(N)), name=f"permutative{N}")


def cantor3() -> FilterSystem:
    """Three-band system whose ``e_0`` measure is the middle-third Cantor measure."""
    m0 = LaurentPoly({0: _R2, 2: _R2})
    m1 = LaurentPoly.basis(1)
    m2 = LaurentPoly({0: _R2, 2: -_R2})
    return FilterSystem(3, (m0, m1, m2), name="cantor3")


def high_pass_from_low(m0: LaurentPoly, tol: float = DEFAULT_TOL) -> LaurentPoly:
    """``m_1(z) = z conj(m_0(-z))``, i.e. ``m_1[1 - k] = (-1)^k conj(m_0[k])``.

    Raises if ``m0`` does not satisfy ``sum_k conj(a_k) a_{k+2l} = delta_l0``.
    """
    corr = mul(conj_reflect(m0), m0)
    bad = max(
        (abs(v - (1.0 if d == 0 else 0.0)) for d, v in corr.items() if d % 2 == 0),
        default=1.0,
    )
    bad = max(bad, abs(corr.coeff(0) - 1.0))
    if bad > tol:
        raise ValueError(f"low-pass filter fails the quadrature condition (defect {bad:.3g})")
    return LaurentPoly({1 - k: (-1) ** (k % 2) * v.conjugate() for k, v in m0.items()})


def daubechies_lowpass(p: int) -> LaurentPoly:
    """Daubechies low-pass filter with ``p`` vanishing moments.

    Spectral factorization of ``|m_0|^2 = 2 cos^{2p}(pi t) P(sin^2(pi t))`` with
    ``P(y) = sum_{k<p} C(p-1+k, k) y^k``: each root ``y_i`` of ``P`` gives the
    pair ``z, 1/z`` of roots of ``z^2 - (2 - 4 y_i) z + 1``, and the one inside
    the unit circle is kept. The result is normalized to ``m_0(1) = sqrt(2)``.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    poly = np.array([1.0, 1.0])  # (1 + z), ascending powers
    coeffs = np.array([1.0])
    for _ in range(p):
        coeffs = np.convolve(coeffs, poly)
    if p > 1:
        P = [comb(p - 1 + k, k) for k in range(p)]
        y_roots = np.roots(P[::-1])
        for y in y_roots:
            z_roots = np.roots([1.0, -(2.0 - 4.0 * y), 1.0])
            inside = z_roots[np.argmin(np.abs(z_roots))]
            coeffs = np.convolve(coeffs, np.array([-inside, 1.0]))
    if np.allclose(np.imag(coeffs), 0.0, atol=1e-12):
        coeffs = np.real(coeffs)
    coeffs = coeffs * (math.sqrt(2.0) / np.sum(coeffs))
    return LaurentPoly.from_list(coeffs.tolist())


def daubechies4() -> FilterSystem:
    """Four-tap Daubechies system; the high-pass is built by :func:`high_pass_from_low`."""
    m0 = daubechies_lowpass(2)
    return FilterSystem(2, (m0, high_pass_from_low(m0)), name="daubechies4")


BUILTINS = {
    "haar": haar,
    "permutative2": lambda: permutative_shift(2),
    "permutative3": lambda: permutative_shift(3),
    "cantor3": cantor3,
    "daubechies4": daubechies4,
}


def builtin(name: str) -> FilterSystem:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise ValueError(f"unknown builtin filter system {name!r}; choose from {sorted(BUILTINS)}") from None


def lowpass_value(fs: FilterSystem) -> complex:
    """``m_0(1)``; equals ``sqrt(N)`` for a normalized low-pass filter."""
    return eval_at(fs.filters[0], 0.0)
