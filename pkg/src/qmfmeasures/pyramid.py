"""Signal-processing view: subband analysis and synthesis on ``l^2(Z)``.

A finitely supported signal ``xi`` is the Laurent polynomial
``sum_k xi_k z^k``, so analysis is ``xi -> (S_i^* xi)_i`` and synthesis is
``(b_i) -> sum_i S_i b_i``. The time-domain formulas here are written
independently of :mod:`cuntz` so the two pictures can be compared.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Mapping, Sequence

from .cuntz import Word, all_words, apply_S, apply_S_star
from .filterbank import FilterSystem, haar
from .laurent import LaurentPoly, dilate
from .packets import StepFunction, require_haar, step_difference_sup

Signal = LaurentPoly


def upsample(xi: Signal, N: int) -> Signal:
    """Index ``k -> N k``."""
    return dilate(xi, N)


def downsample(xi: Signal, N: int) -> Signal:
    """Keep indices ``N k`` and relabel them ``k``."""
    if N < 2:
        raise ValueError(f"sampling factor must be >= 2, got {N}")
    return LaurentPoly({k // N: v for k, v in xi.items() if k % N == 0}, prune=False)


def s0_time(fs: FilterSystem, xi: Signal) -> Signal:
    """``(S_0 xi)_n = sum_k a_{n - 2k} xi_k`` as an explicit double loop."""
    if fs.N != 2:
        raise ValueError("s0_time is the two-band formula; N must be 2")
    a = fs.filters[0]
    out: dict[int, complex] = {}
    for k, x in xi.items():
        for j, c in a.items():
            n = j + 2 * k
            out[n] = out.get(n, 0j) + c * x
    return LaurentPoly(out)


def analyze(fs: FilterSystem, xi: Signal) -> list[Signal]:
    """Subbands ``S_i^* xi`` for ``i = 0, ..., N-1``."""
    return [apply_S_star(fs, i, xi) for i in range(fs.N)]


def synthesize(fs: FilterSystem, bands: Sequence[Signal]) -> Signal:
    """``sum_i S_i bands[i]``."""
    if len(bands) != fs.N:
        raise ValueError(f"expected {fs.N} bands, got {len(bands)}")
    out = LaurentPoly()
    for i, b in enumerate(bands):
        out = out + apply_S(fs, i, b)
    return out


def analyze_tree(fs: FilterSystem, xi: Signal, depth: int) -> dict[Word, Signal]:
    """Leaves ``S_a^* xi`` of the full depth-``depth`` tree, keyed by word."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    level = {Word(fs.N): xi}
    for _ in range(depth):
        nxt = {}
        for a, g in level.items():
            for i, band in enumerate(analyze(fs, g)):
                nxt[a.append(i)] = band
        level = nxt
    return level


def synthesize_tree(fs: FilterSystem, leaves: Mapping[Word, Signal], depth: int) -> Signal:
    """Inverse of :func:`analyze_tree`; missing leaves count as zero."""
    level = dict(leaves)
    for k in range(depth, 0, -1):
        parents = {}
        for a in all_words(fs.N, k - 1):
            bands = [level.get(a.append(i), LaurentPoly()) for i in range(fs.N)]
            parents[a] = synthesize(fs, bands)
        level = parents
    return level[Word(fs.N)]


def reconstruction_defect(fs: FilterSystem, xi: Signal, depth: int = 1) -> float:
    return synthesize_tree(fs, analyze_tree(fs, xi, depth), depth).distance(xi)


def tree_to_json(fs: FilterSystem, xi: Signal, depth: int) -> dict:
    """Nested JSON of the full analysis tree down to ``depth``."""

    def node(a: Word, g: Signal, d: int) -> dict:
        out = {"word": list(a.digits), "energy": g.norm2(), "coeffs": g.to_json()}
        if d < depth:
            out["children"] = [node(a.append(i), b, d + 1) for i, b in enumerate(analyze(fs, g))]
        return out

    return node(Word(fs.N), xi, 0)


def row_contraction_defect(filters: Sequence[LaurentPoly], f: LaurentPoly) -> float:
    """``sum_i ||S_i^* f||^2 - ||f||^2``; nonpositive for a row contraction.

    The filters are not required to be unitary.
    """
    fs = FilterSystem(len(filters), tuple(filters), name="unchecked")
    return math.fsum(apply_S_star(fs, i, f).norm2() for i in range(fs.N)) - f.norm2()


# -- Haar scaling function ------------------------------------------------------


def w_phi_haar(xi: Signal) -> StepFunction:
    """``sum_k xi_k chi_[0,1)(x - k)``, constant on integer cells."""
    if not xi:
        return StepFunction(2, 0, 0, ())
    lo, hi = xi.min_degree, xi.max_degree
    return StepFunction(2, 0, lo, tuple(xi.coeff(k) for k in range(lo, hi + 1)))


def unitary_scaling(g: StepFunction) -> StepFunction:
    """``(U g)(x) = g(x / N) / sqrt(N)``."""
    return g.dilate(-1).scale(1 / math.sqrt(g.N))


def intertwining_defect(xi: Signal, fs: FilterSystem | None = None) -> float:
    """``sup |W S_0 xi - U W xi|`` for Haar, both sides exact step functions."""
    fs = fs or haar()
    require_haar(fs)
    return step_difference_sup(w_phi_haar(s0_time(fs, xi)), unitary_scaling(w_phi_haar(xi)))


def check_intertwining(xi: Signal, tol: float = 1e-12, fs: FilterSystem | None = None) -> bool:
    return intertwining_defect(xi, fs) <= tol


def l2_norm(g: StepFunction) -> float:
    return math.sqrt(math.fsum(abs(v) ** 2 for v in g.values) * float(g.width))


# -- signal files ---------------------------------------------------------------


def signal_to_json(xi: Signal) -> dict[str, list[float]]:
    """``{"index": [re, im], ...}``."""
    return {str(k): [v.real, v.imag] for k, v in sorted(xi.items())}


def signal_from_json(data: Mapping[str, object]) -> Signal:
    if not isinstance(data, Mapping):
        raise ValueError("signal JSON must be an object mapping index to [re, im]")
    coeffs: dict[int, complex] = {}
    for key, val in data.items():
        try:
            idx = int(key)
        except ValueError:
            raise ValueError(f"signal index {key!r} is not an integer") from None
        if isinstance(val, (int, float)):
            coeffs[idx] = complex(val)
        elif isinstance(val, (list, tuple)) and len(val) in (1, 2):
            coeffs[idx] = complex(float(val[0]), float(val[1]) if len(val) == 2 else 0.0)
        else:
            raise ValueError(f"signal value at {key!r} must be [re, im], got {val!r}")
    return LaurentPoly(coeffs, prune=False)


def load_signal(path: str | Path) -> Signal:
    with Path(path).open() as fh:
        return signal_from_json(json.load(fh))


def dump_signal(xi: Signal, path: str | Path) -> None:
    with Path(path).open("w") as fh:
        json.dump(signal_to_json(xi), fh, indent=1)

