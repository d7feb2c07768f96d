"""Scalar measures ``mu_f(J_k(a)) = ||P_k(a) f||^2`` on N-adic intervals.

Two engines compute the same numbers by different routes:

``operator``
    ``||S_a^* f||^2`` from the coefficient-space adjoint.
``spectral``
    ``sum_n |(f conj(m_a))^(n N^k)|^2`` from the word filter ``m_a``.

Agreement between them is the main internal consistency check. The module
also covers joint-eigenvector detection, product measures, the covariance
identities of the base-N interval system, and finite-level cyclic subspaces.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .cuntz import (
    Monomial,
    Word,
    WordLike,
    all_words,
    alpha_on_monomial,
    apply_S_star,
    apply_word_star,
    as_word,
    m_word,
    monomial_apply,
    projection,
)
from .filterbank import FilterSystem
from .laurent import LaurentPoly, conj_reflect, dilate, inner, mul
from .nadic import IfsSystem, NadicInterval, base_ifs, preimage, pullback, sigma_map

MAX_TABLE_CELLS = 2**24
MAX_CYCLIC_CELLS = 2**12
NEG_CLIP = 1e-12
TOTAL_TOL = 1e-9
ENGINES = ("operator", "spectral", "product", "packet")


# -- tables -------------------------------------------------------------------


@dataclass
class MeasureTable:
    """All level-``k`` cell masses, indexed by ``Word.index()`` (interval order).

    Values in ``[-1e-12, 0)`` are clipped to zero on construction; anything
    more negative is rejected.
    """

    N: int
    k: int
    values: np.ndarray
    engine: str = "operator"
    f_description: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).copy()
        if v.shape != (self.N**self.k,):
            raise ValueError(f"expected {self.N**self.k} values for N={self.N}, k={self.k}, got shape {v.shape}")
        if v.size and v.min() < -NEG_CLIP:
            raise ValueError(f"negative measure value {v.min():.3g}")
        v[v < 0] = 0.0
        self.values = v

    def value(self, a: WordLike) -> float:
        w = as_word(self.N, a)
        if len(w) != self.k:
            raise ValueError(f"word of length {len(w)} used with a level-{self.k} table")
        return float(self.values[w.index()])

    def total(self) -> float:
        return math.fsum(self.values)

    def coarsen(self, levels: int = 1) -> "MeasureTable":
        """The table at level ``k - levels`` obtained by summing children."""
        if not 0 <= levels <= self.k:
            raise ValueError(f"cannot coarsen a level-{self.k} table by {levels}")
        k = self.k - levels
        v = self.values.reshape(self.N**k, self.N**levels).sum(axis=1)
        return MeasureTable(self.N, k, v, self.engine, self.f_description)

    def words(self) -> Iterable[Word]:
        return all_words(self.N, self.k)

    def rows(self) -> Iterable[tuple[Word, NadicInterval, float]]:
        for w, val in zip(self.words(), self.values):
            yield w, NadicInterval(self.N, w.digits), float(val)

    def cdf(self) -> list[tuple[Fraction, float]]:
        """``(right endpoint, cumulative mass)`` in interval order."""
        out = []
        acc = 0.0
        for _, J, val in self.rows():
            acc += val
            out.append((J.right, acc))
        return out

    def to_csv(self, nonzero_only: bool = False) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["word", "left", "value"])
        for w, J, val in self.rows():
            if nonzero_only and val == 0.0:
                continue
            writer.writerow([_word_label(w), J.to_json()["left"], format(val, ".15g")])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "k": self.k,
            "engine": self.engine,
            "f": self.f_description,
            "total": self.total(),
            "cells": [
                {**J.to_json(), "value": val} for _, J, val in self.rows()
            ],
        }

    def dumps(self, fmt: str = "csv") -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return json.dumps(self.to_json(), indent=1)
        raise ValueError(f"unknown format {fmt!r}")


def _word_label(w: Word) -> str:
    return str(w) if w.k else ""


# -- single-cell engines ------------------------------------------------------------


def mu_operator(fs: FilterSystem, f: LaurentPoly, a: WordLike) -> float:
    """``||S_a^* f||^2``."""
    return apply_word_star(fs, a, f).norm2()


def _spectral_sum(f: LaurentPoly, ma: LaurentPoly, period: int) -> float:
    g = mul(f, conj_reflect(ma))
    return math.fsum(abs(v) ** 2 for d, v in g.items() if d % period == 0)


def mu_spectral(fs: FilterSystem, f: LaurentPoly, a: WordLike) -> float:
    """``sum_n |(f * conj(m_a))^(n N^k)|^2`` with ``m_a`` from :func:`m_word`."""
    a = as_word(fs, a)
    return _spectral_sum(f, m_word(fs, a), fs.N ** len(a))


def mu_basis(fs: FilterSystem, p: int, a: WordLike) -> float:
    """``mu_{e_p}(J_k(a)) = sum_n |m_a[p - n N^k]|^2``."""
    a = as_word(fs, a)
    period = fs.N ** len(a)
    ma = m_word(fs, a)
    return math.fsum(abs(v) ** 2 for d, v in ma.items() if (p - d) % period == 0)


# -- full tables --------------------------------------------------------------------


def _check_cells(N: int, k: int, cap: int) -> None:
    if k < 0:
        raise ValueError("level must be >= 0")
    if N**k > cap:
        raise ValueError(f"N^k = {N}^{k} exceeds the cap of {cap} cells")


def _operator_values(fs: FilterSystem, f: LaurentPoly, k: int) -> np.ndarray:
    N = fs.N
    out = np.zeros(N**k)
    # depth-first over the word tree; S_{a i}^* f = S_i^*(S_a^* f)
    stack: list[tuple[int, int, LaurentPoly]] = [(0, 0, f)]
    while stack:
        depth, idx, g = stack.pop()
        if not g:
            continue
        if depth == k:
            out[idx] = g.norm2()
            continue
        for i in range(N):
            stack.append((depth + 1, idx * N + i, apply_S_star(fs, i, g)))
    return out


def _spectral_values(fs: FilterSystem, f: LaurentPoly, k: int) -> np.ndarray:
    N = fs.N
    out = np.zeros(N**k)
    period = N**k
    dilated = [[fs.filters[i] if s == 0 else dilate(fs.filters[i], N**s) for i in range(N)] for s in range(k)]
    stack: list[tuple[int, int, LaurentPoly]] = [(0, 0, LaurentPoly.basis(0))]
    while stack:
        depth, idx, ma = stack.pop()
        if depth == k:
            out[idx] = _spectral_sum(f, ma, period)
            continue
        for i in range(N):
            stack.append((depth + 1, idx * N + i, mul(ma, dilated[depth][i])))
    return out


def measure_table(
    fs: FilterSystem,
    f: LaurentPoly,
    k: int,
    engine: str = "operator",
    f_description: str = "",
) -> MeasureTable:
    """Tabulate ``mu_f`` on the level-``k`` partition.

    Raises
    ------
    ValueError
        If ``N**k`` exceeds ``MAX_TABLE_CELLS``, the engine is unknown, or the
        total mass misses ``||f||^2`` by more than ``1e-9`` (the filter system
        is then not unitary).
    """
    _check_cells(fs.N, k, MAX_TABLE_CELLS)
    if engine == "operator":
        values = _operator_values(fs, f, k)
    elif engine == "spectral":
        values = _spectral_values(fs, f, k)
    else:
        raise ValueError(f"unknown engine {engine!r}; use 'operator' or 'spectral'")
    table = MeasureTable(fs.N, k, values, engine, f_description)
    expected = f.norm2()
    if abs(table.total() - expected) > TOTAL_TOL * max(1.0, expected):
        raise ValueError(
            f"table total {table.total():.12g} differs from ||f||^2 = {expected:.12g}; "
            "is the filter system unitary?"
        )
    return table


def engine_cross_defect(t1: MeasureTable, t2: MeasureTable) -> float:
    _same_shape(t1, t2)
    return float(np.max(np.abs(t1.values - t2.values))) if t1.values.size else 0.0


# -- eigenvectors and product measures ----------------------------------------------


@dataclass
class EigenData:
    lambdas: list[complex]
    residuals: list[float]
    is_eigen: bool
    tol: float = 1e-9

    @property
    def probabilities(self) -> list[float]:
        return [abs(l) ** 2 for l in self.lambdas]


def eigen_detect(fs: FilterSystem, f: LaurentPoly, tol: float = 1e-9) -> EigenData:
    """Test whether ``f`` is a joint eigenvector of the adjoints ``S_i^*``.

    ``lambda_i = <f | S_i^* f>`` is the least-squares eigenvalue estimate; the
    residual is ``||S_i^* f - lambda_i f||``.
    """
    n2 = f.norm2()
    if n2 == 0.0:
        raise ValueError("zero vector has no eigen data")
    if abs(n2 - 1.0) > 1e-9:
        raise ValueError(f"f must be a unit vector, ||f||^2 = {n2:.12g}")
    lambdas, residuals = [], []
    for i in range(fs.N):
        g = apply_S_star(fs, i, f)
        lam = inner(f, g)
        lambdas.append(lam)
        residuals.append((g - f.scale(lam)).norm())
    return EigenData(lambdas, residuals, all(r <= tol for r in residuals), tol)


@dataclass(frozen=True)
class ProductSpec:
    """Digit probabilities ``p_0, ..., p_{N-1}``."""

    probabilities: tuple[float, ...]

    def __post_init__(self):
        p = tuple(float(x) for x in self.probabilities)
        if len(p) < 2:
            raise ValueError("need at least two probabilities")
        if any(x < 0 for x in p):
            raise ValueError("probabilities must be nonnegative")
        if abs(math.fsum(p) - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {math.fsum(p)!r}, not 1")
        object.__setattr__(self, "probabilities", p)

    @property
    def N(self) -> int:
        return len(self.probabilities)

    @classmethod
    def from_eigen(cls, data: EigenData) -> "ProductSpec":
        p = data.probabilities
        s = math.fsum(p)
        if abs(s - 1.0) > max(data.tol, 1e-12) * 10:
            raise ValueError(f"eigenvalue moduli squared sum to {s:.12g}, not 1")
        return cls(tuple(x / s for x in p))


def product_measure(spec: ProductSpec, a: WordLike) -> float:
    a = as_word(spec.N, a)
    return math.prod(spec.probabilities[d] for d in a.digits)


def product_table(spec: ProductSpec, k: int) -> MeasureTable:
    _check_cells(spec.N, k, MAX_TABLE_CELLS)
    p = np.asarray(spec.probabilities)
    v = np.ones(1)
    for _ in range(k):
        v = np.kron(v, p)
    return MeasureTable(spec.N, k, v, "product", f"p={list(spec.probabilities)}")


@dataclass
class ProductCheck:
    passed: bool
    eigen: EigenData
    spec: ProductSpec | None
    max_defect: float


def product_check(fs: FilterSystem, f: LaurentPoly, k: int, tol: float = 1e-9) -> ProductCheck:
    eig = eigen_detect(fs, f, tol)
    if not eig.is_eigen:
        return ProductCheck(False, eig, None, math.inf)
    spec = ProductSpec.from_eigen(eig)
    defect = engine_cross_defect(measure_table(fs, f, k, "operator"), product_table(spec, k))
    return ProductCheck(defect <= tol, eig, spec, defect)


def check_product(fs: FilterSystem, f: LaurentPoly, k: int, tol: float = 1e-9) -> bool:
    """True iff ``f`` is a joint ``S_i^*`` eigenvector and its level-``k`` table
    equals the product measure with ``p_i = |lambda_i|^2`` within ``tol``."""
    return product_check(fs, f, k, tol).passed


def tv_distance(t1: MeasureTable, t2: MeasureTable) -> float:
    """Level-``k`` total variation ``(1/2) sum_a |t1(a) - t2(a)|``."""
    _same_shape(t1, t2)
    return 0.5 * math.fsum(np.abs(t1.values - t2.values))


def _same_shape(t1: MeasureTable, t2: MeasureTable) -> None:
    if (t1.N, t1.k) != (t2.N, t2.k):
        raise ValueError(f"tables differ in shape: (N={t1.N}, k={t1.k}) vs (N={t2.N}, k={t2.k})")


# -- covariance and invariance ------------------------------------------------


def covariance_defects(fs: FilterSystem, a: WordLike, b: WordLike, f: LaurentPoly) -> tuple[float, float]:
    """Defects of the two covariance identities, tested against ``f``.

    1. ``<S_a^* f | P(b) S_a^* f>`` against ``mu_f(sigma_a(J(b)))``;
    2. ``sum_i <S_i^* f | P(b) S_i^* f>`` against ``mu_f(sigma^{-1}(J(b)))``.

    The right-hand sides locate the cells through the base-N interval system
    and evaluate them with the spectral engine.
    """
    a = as_word(fs, a)
    b = as_word(fs, b)
    ifs = base_ifs(fs.N)
    J = NadicInterval(fs.N, b.digits)

    g = apply_word_star(fs, a, f)
    lhs1 = inner(g, projection(fs, b, g)).real
    rhs1 = mu_spectral(fs, f, sigma_map(ifs, a, J).word)

    lhs2 = 0.0
    for i in range(fs.N):
        gi = apply_S_star(fs, i, f)
        lhs2 += inner(gi, projection(fs, b, gi)).real
    rhs2 = math.fsum(mu_spectral(fs, f, cell.word) for cell in preimage(ifs, J))
    return abs(lhs1 - rhs1), abs(lhs2 - rhs2)


def check_covariance(fs: FilterSystem, a: WordLike, b: WordLike, f: LaurentPoly, tol: float = 1e-10) -> bool:
    d1, d2 = covariance_defects(fs, a, b, f)
    return d1 <= tol and d2 <= tol


def self_similarity_defect(
    fs: FilterSystem, f: LaurentPoly, ifs: IfsSystem, weights: Sequence[float], k: int
) -> float:
    """Max over level-``k`` cells ``J`` of ``|mu(J) - sum_i w_i mu(sigma_i^{-1} J)|``.

    ``mu`` is the level-``k`` (and ``k-1``) operator table of ``f``; the cells
    are base-``s`` with ``s = ifs.scale``, which must equal ``fs.N``.
    """
    if ifs.scale != fs.N:
        raise ValueError(f"IFS base {ifs.scale} does not match N={fs.N}")
    if len(weights) != ifs.N:
        raise ValueError(f"need {ifs.N} weights, got {len(weights)}")
    if k < 1:
        raise ValueError("level must be >= 1")
    fine = measure_table(fs, f, k)
    coarse = measure_table(fs, f, k - 1)
    worst = 0.0
    for w, J, val in fine.rows():
        rhs = 0.0
        for i, wt in enumerate(weights):
            pre = pullback(ifs, i, J)
            if pre is not None:
                rhs += wt * coarse.values[pre.word.index()]
        worst = max(worst, abs(val - rhs))
    return worst


def state_invariance_defect(fs: FilterSystem, f: LaurentPoly, m: Monomial) -> float:
    """``|<f | alpha(T) f> - <f | T f>|`` for the monomial ``T = m``."""
    lhs = sum((inner(f, monomial_apply(fs, t, f)) for t in alpha_on_monomial(fs, m)), 0j)
    rhs = inner(f, monomial_apply(fs, m, f))
    return abs(lhs - rhs)


def check_state_invariance(fs: FilterSystem, f: LaurentPoly, m: Monomial, tol: float = 1e-10) -> bool:
    """Invariance of the vector state of ``f`` under ``alpha``; it holds when
    ``f`` is a joint eigenvector (see :func:`eigen_detect`)."""
    return state_invariance_defect(fs, f, m) <= tol


# -- isometries and cyclic subspaces ------------------------------------------


def build_isometry_apply(
    fs: FilterSystem, f: LaurentPoly, step: Sequence[tuple[WordLike, complex]]
) -> LaurentPoly:
    """Image of the step function ``sum_a c_a chi_{J_k(a)}`` under ``V``,
    where ``V chi_{J_k(a)} = P_k(a) f``. Words must be distinct and share a length."""
    words = [as_word(fs, a) for a, _ in step]
    if len({w.digits for w in words}) != len(words):
        raise ValueError("duplicate words in step function")
    if len({len(w) for w in words}) > 1:
        raise ValueError("all words must have the same length")
    out = LaurentPoly()
    for w, (_, c) in zip(words, step):
        out = out + projection(fs, w, f).scale(c)
    return out


def isometry_defect(fs: FilterSystem, f: LaurentPoly, step: Sequence[tuple[WordLike, complex]]) -> float:
    """``| ||V s||^2 - sum_a |c_a|^2 mu_f(J(a)) |``."""
    image = build_isometry_apply(fs, f, step)
    expected = math.fsum(abs(c) ** 2 * mu_operator(fs, f, a) for a, c in step)
    return abs(image.norm2() - expected)


def _dense(vectors: Sequence[LaurentPoly]) -> np.ndarray:
    degrees = sorted(set().union(*(v.support() for v in vectors))) if vectors else []
    col = {d: j for j, d in enumerate(degrees)}
    M = np.zeros((len(vectors), len(degrees)), dtype=complex)
    for i, v in enumerate(vectors):
        for d, c in v.items():
            M[i, col[d]] = c
    return M


def _level_projections(fs: FilterSystem, f: LaurentPoly, k: int, all_levels: bool) -> list[LaurentPoly]:
    levels = range(k + 1) if all_levels else (k,)
    out = []
    for level in levels:
        for w in all_words(fs.N, level):
            g = projection(fs, w, f)
            if g:
                out.append(g)
    return out


def cyclic_span_dim(fs: FilterSystem, f: LaurentPoly, k: int, rank_tol: float = 1e-8) -> int:
    """Numerical rank of ``{P_j(a) f : a in Gamma_N^j, j <= k}``."""
    _check_cells(fs.N, k, MAX_CYCLIC_CELLS)
    vecs = _level_projections(fs, f, k, all_levels=True)
    if not vecs:
        return 0
    s = np.linalg.svd(_dense(vecs), compute_uv=False)
    return int(np.sum(s > rank_tol))


@dataclass
class Summand:
    vector: LaurentPoly
    table: MeasureTable
    seed_index: int


def greedy_decompose(
    fs: FilterSystem, seeds: Sequence[LaurentPoly], k: int, tol: float = 1e-9
) -> list[Summand]:
    """Finite-level splitting of the span of ``seeds`` into cyclic pieces.

    Each seed is projected off the span of ``{P_k(a) g}`` for the vectors ``g``
    accepted so far; a nonzero residual is normalized, accepted and its
    level-``k`` projections join the span. This is a heuristic: at finite
    level the pieces need not be exactly orthogonal cyclic subspaces.
    """
    _check_cells(fs.N, k, MAX_CYCLIC_CELLS)
    for s in seeds:
        if not s:
            raise ValueError("seeds must be nonzero")
    out: list[Summand] = []
    basis: list[LaurentPoly] = []  # orthonormal
    for idx, seed in enumerate(seeds):
        r = seed
        for q in basis:
            r = r - q.scale(inner(q, r))
        if r.norm() <= tol * seed.norm():
            continue
        r = r.scale(1.0 / r.norm())
        out.append(Summand(r, measure_table(fs, r, k, "operator", f"seed {idx}"), idx))
        for g in _level_projections(fs, r, k, all_levels=False):
            for q in basis:
                g = g - q.scale(inner(q, g))
            n = g.norm()
            if n > tol:
                basis.append(g.scale(1.0 / n))
    return out


@dataclass
class DensityStats:
    """Descriptive statistics of ``N^k * mass`` over level-``k`` cells."""

    max_density: float
    min_density: float
    support_fraction: float
    histogram: list[int] = field(default_factory=list)
    bin_edges: list[float] = field(default_factory=list)


def density_stats(table: MeasureTable, bins: int = 10) -> DensityStats:
    """Cell densities relative to Lebesgue measure. Bounded densities at every
    level are consistent with absolute continuity; they do not decide it."""
    d = table.values * table.N**table.k
    hist, edges = np.histogram(d, bins=bins)
    return DensityStats(
        max_density=float(d.max()),
        min_density=float(d.min()),
        support_fraction=float(np.count_nonzero(table.values > NEG_CLIP) / d.size),
        histogram=hist.tolist(),
        bin_edges=edges.tolist(),
    )
