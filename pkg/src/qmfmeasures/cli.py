"""Command-line front end.

Exit codes: 0 success, 1 a check or validation failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import random
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import measures, packets, pyramid
from .cuntz import all_words, apply_S, apply_S_star
from .filterbank import BUILTINS, FilterSystem, builtin, validate
from .laurent import LaurentPoly
from .nadic import cantor_ifs

log = logging.getLogger("qmfmeasures")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class CheckFailed(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    fs: FilterSystem | None
    vector: LaurentPoly | None
    vector_label: str
    level: int
    engine: str
    tol: float
    fmt: str
    output: Path | None
    seed: int


# -- argument handling ----------------------------------------------------------


def _load_filters(args) -> FilterSystem:
    if getattr(args, "filters", None):
        try:
            return FilterSystem.load(args.filters)
        except (OSError, json.JSONDecodeError, ValueError) as exc:
            raise UsageError(f"cannot read filter spec {args.filters}: {exc}") from exc
    try:
        return builtin(args.builtin)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def parse_vector(spec: str) -> tuple[LaurentPoly, str]:
    """``p=INT`` for a basis vector, else a JSON file of ``[degree, re, im]`` triples."""
    if spec.startswith("p="):
        try:
            p = int(spec[2:])
        except ValueError:
            raise UsageError(f"bad basis index in {spec!r}") from None
        return LaurentPoly.basis(p), f"e_{p}"
    try:
        with open(spec) as fh:
            data = json.load(fh)
        f = LaurentPoly.from_json(data)
    except (OSError, json.JSONDecodeError, ValueError, TypeError) as exc:
        raise UsageError(f"cannot read vector {spec!r}: {exc}") from exc
    if not f:
        raise UsageError("vector is zero")
    return f, Path(spec).name


def _unit(f: LaurentPoly) -> LaurentPoly:
    n2 = f.norm2()
    if abs(n2 - 1.0) > 1e-12:
        log.warning("vector has squared norm %.6g; normalizing", n2)
        return f.scale(1.0 / math.sqrt(n2))
    return f


def _config(args) -> RunConfig:
    if getattr(args, "tol", 1.0) <= 0:
        raise UsageError("--tol must be positive")
    fs = _load_filters(args) if hasattr(args, "builtin") else None
    vector, label = (None, "")
    if getattr(args, "vector", None):
        vector, label = parse_vector(args.vector)
        vector = _unit(vector)
    return RunConfig(
        command=args.command,
        fs=fs,
        vector=vector,
        vector_label=label,
        level=getattr(args, "level", 0),
        engine=getattr(args, "engine", "operator"),
        tol=getattr(args, "tol", 1e-9),
        fmt=getattr(args, "format", "csv"),
        output=Path(args.output) if getattr(args, "output", None) else None,
        seed=args.seed,
    )


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        cfg.output.write_text(text)
        log.info("wrote %s", cfg.output)


# -- subcommands ----------------------------------------------------------------


def cmd_validate(cfg: RunConfig) -> int:
    report = validate(cfg.fs, cfg.tol)
    print(f"{cfg.fs.name} (N={cfg.fs.N}): {report.summary()}")
    return EXIT_OK if report.passed else EXIT_FAIL


def _tables(cfg: RunConfig) -> dict[str, measures.MeasureTable]:
    engines = ("operator", "spectral") if cfg.engine == "both" else (cfg.engine,)
    if cfg.level < 0 or cfg.fs.N**cfg.level > measures.MAX_TABLE_CELLS:
        raise UsageError(f"level {cfg.level} out of range: N^k must be at most {measures.MAX_TABLE_CELLS}")
    try:
        return {e: measures.measure_table(cfg.fs, cfg.vector, cfg.level, e, cfg.vector_label) for e in engines}
    except ValueError as exc:
        raise CheckFailed(str(exc)) from exc


def cmd_measure(cfg: RunConfig, all_cells: bool = False) -> int:
    tables = _tables(cfg)
    status = EXIT_OK
    defect = None
    if len(tables) == 2:
        defect = measures.engine_cross_defect(tables["operator"], tables["spectral"])
        print(f"max cross-engine defect {defect:.3e}", file=sys.stderr)
        if defect > cfg.tol:
            status = EXIT_FAIL
    first = next(iter(tables.values()))
    if cfg.fmt == "json":
        doc = {e: t.to_json() for e, t in tables.items()}
        if defect is not None:
            doc["max_cross_defect"] = defect
        _emit(cfg, json.dumps(doc, indent=1))
    else:
        rows = ["word,left," + ",".join(tables)]
        for idx, (w, J, _) in enumerate(first.rows()):
            vals = [t.values[idx] for t in tables.values()]
            if not all_cells and max(vals) <= measures.NEG_CLIP:
                continue
            rows.append(f"{w if w.k else ''},{J.to_json()['left']}," + ",".join(format(float(v), ".15g") for v in vals))
        _emit(cfg, "\n".join(rows))
    return status


def cmd_cdf(cfg: RunConfig) -> int:
    table = _tables(cfg)[cfg.engine if cfg.engine != "both" else "operator"]
    pairs = table.cdf()
    if cfg.fmt == "json":
        _emit(cfg, json.dumps([[str(x), y] for x, y in pairs], indent=1))
    else:
        _emit(cfg, "\n".join(["right,cumulative"] + [f"{x},{y:.15g}" for x, y in pairs]))
    return EXIT_OK


def _parse_sweep(spec: str) -> int:
    if not spec.startswith("k="):
        raise UsageError(f"--sweep expects k=INT, got {spec!r}")
    try:
        k = int(spec[2:])
    except ValueError:
        raise UsageError(f"--sweep expects k=INT, got {spec!r}") from None
    if not 0 <= k <= 8:
        raise UsageError("sweep level must be between 0 and 8")
    return k


def packet_sweep(k: int, jmax: int = 8) -> tuple[float, float]:
    """Max coefficient defect and max ``mu_p`` defect over all words up to length ``k``."""
    fs = builtin("haar")
    worst_lemma = worst_mu = 0.0
    for level in range(k + 1):
        for a in all_words(2, level):
            for p in range(2**level):
                for j in range(-jmax, jmax + 1):
                    worst_lemma = max(worst_lemma, packets.check_lemma_com3(a, p, j, fs).defect)
                worst_mu = max(worst_mu, abs(packets.mu_p_via_packets(p, a, fs) - measures.mu_basis(fs, p, a)))
    return worst_lemma, worst_mu


def cmd_packets(cfg: RunConfig, sweep: str | None, dump: int | None, digits: int | None, jmax: int) -> int:
    if sweep is None and dump is None:
        raise UsageError("packets needs --sweep k=INT or --dump N")
    status = EXIT_OK
    if dump is not None:
        try:
            idx = packets.PacketIndex.from_value(2, dump, digits)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        _emit(cfg, packets.packet_csv(packets.haar_packet(idx)))
    if sweep is not None:
        k = _parse_sweep(sweep)
        lemma, mu = packet_sweep(k, jmax)
        print(f"packet sweep k<={k}, |j|<={jmax}: max coefficient defect {lemma:.3e}, max mu_p defect {mu:.3e}")
        if lemma > 1e-10 or mu > 1e-9:
            status = EXIT_FAIL
    return status


def cmd_reconstruct(cfg: RunConfig, signal: str | None, depth: int, length: int, tree: bool) -> int:
    if signal:
        try:
            xi = pyramid.load_signal(signal)
        except (OSError, json.JSONDecodeError, ValueError) as exc:
            raise UsageError(f"cannot read signal {signal}: {exc}") from exc
    else:
        rng = np.random.default_rng(cfg.seed)
        xi = LaurentPoly.from_list(rng.standard_normal(length) + 1j * rng.standard_normal(length))
    if depth < 0 or cfg.fs.N**depth > measures.MAX_TABLE_CELLS:
        raise UsageError("depth out of range")
    defect = pyramid.reconstruction_defect(cfg.fs, xi, depth)
    print(f"{cfg.fs.name}: depth-{depth} reconstruction defect {defect:.3e}")
    if tree:
        _emit(cfg, json.dumps(pyramid.tree_to_json(cfg.fs, xi, depth), indent=1))
    return EXIT_OK if defect <= cfg.tol else EXIT_FAIL


# -- demos ------------------------------------------------------------------------


class _Checks:
    def __init__(self):
        self.failed = 0

    def __call__(self, label: str, ok: bool, detail: str = "") -> None:
        print(f"{'PASS' if ok else 'FAIL'}  {label}{'  ' + detail if detail else ''}")
        if not ok:
            self.failed += 1


def _max_dev(values, target) -> float:
    return float(np.max(np.abs(np.asarray(values) - np.asarray(target))))


def demo_haar(check: _Checks, rng: random.Random) -> None:
    fs = builtin("haar")
    e0 = LaurentPoly.basis(0)
    check("haar validates", validate(fs, 1e-12).passed)
    for k in range(1, 11):
        d = _max_dev(measures.measure_table(fs, e0, k).values, 2.0**-k)
        check(f"Lebesgue table level {k}", d <= 1e-10, f"max deviation {d:.1e}")
    d = measures.engine_cross_defect(measures.measure_table(fs, e0, 6), measures.measure_table(fs, e0, 6, "spectral"))
    check("operator and spectral engines agree at level 6", d <= 1e-9, f"{d:.1e}")
    pc = measures.product_check(fs, e0, 6)
    check("e_0 is a joint eigenvector with p = (1/2, 1/2)", pc.passed and _max_dev(pc.spec.probabilities, 0.5) <= 1e-12)
    check("cyclic span of e_0 at level 6 has dimension 64", measures.cyclic_span_dim(fs, e0, 6) == 64)
    xi = LaurentPoly({n: complex(rng.gauss(0, 1), rng.gauss(0, 1)) for n in range(-8, 24)})
    d = pyramid.reconstruction_defect(fs, xi, 5)
    check("depth-5 perfect reconstruction", d <= 1e-10, f"{d:.1e}")
    d = pyramid.intertwining_defect(xi)
    check("scaling-function intertwining", d <= 1e-12, f"{d:.1e}")


def demo_cantor(check: _Checks, rng: random.Random) -> None:
    fs = builtin("cantor3")
    e0 = LaurentPoly.basis(0)
    check("cantor3 validates", validate(fs, 1e-12).passed)
    check("S_1^* e_0 = 0", not apply_S_star(fs, 1, e0))
    check("S_0^* e_0 = e_0 / sqrt(2)", apply_S_star(fs, 0, e0).allclose(LaurentPoly.basis(0, 1 / math.sqrt(2)), 1e-15))
    ifs = cantor_ifs()
    for k in range(1, 7):
        table = measures.measure_table(fs, e0, k)
        target = [2.0**-k if 1 not in w.digits else 0.0 for w in all_words(3, k)]
        d = _max_dev(table.values, target)
        check(f"Cantor table level {k}", d <= 1e-12, f"max deviation {d:.1e}")
        d = measures.self_similarity_defect(fs, e0, ifs, (0.5, 0.5), k)
        check(f"self-similarity mu = (mu o s0^-1 + mu o s1^-1)/2 at level {k}", d <= 1e-10, f"{d:.1e}")
    pc = measures.product_check(fs, e0, 6)
    check("e_0 is a joint eigenvector with p = (1/2, 0, 1/2)", pc.passed and _max_dev(pc.spec.probabilities, (0.5, 0, 0.5)) <= 1e-12)


def demo_permutative(check: _Checks, rng: random.Random) -> None:
    fs = builtin("permutative2")
    e0 = LaurentPoly.basis(0)
    check("permutative2 validates", validate(fs, 1e-12).passed)
    ok = all(len(apply_S(fs, j, LaurentPoly.basis(n))) == 1 for j in range(2) for n in range(-16, 17))
    check("S_j maps basis vectors to basis vectors", ok)
    for k in range(1, 11):
        values = measures.measure_table(fs, e0, k).values
        ok = abs(values[0] - 1.0) <= 1e-12 and float(np.max(values[1:], initial=0.0)) <= 1e-12
        check(f"Dirac table level {k}", ok)
    pc = measures.product_check(fs, e0, 6)
    check("e_0 is a joint eigenvector with p = (1, 0)", pc.passed and _max_dev(pc.spec.probabilities, (1, 0)) <= 1e-12)
    check("cyclic span of e_0 is one-dimensional", measures.cyclic_span_dim(fs, e0, 6) == 1)


DEMOS = {"haar": demo_haar, "cantor": demo_cantor, "permutative": demo_permutative}


def cmd_demo(name: str, seed: int) -> int:
    check = _Checks()
    DEMOS[name](check, random.Random(seed))
    print(f"{name}: {'all checks passed' if not check.failed else f'{check.failed} check(s) failed'}")
    return EXIT_OK if not check.failed else EXIT_FAIL


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qmfmeasures",
        description="Filter-bank Cuntz representations and their interval measures.",
    )
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized inputs")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def filters(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--builtin", default="haar", choices=sorted(BUILTINS))
        g.add_argument("--filters", metavar="PATH", help="filter-spec JSON file")

    def table_opts(p, engines):
        p.add_argument("--vector", default="p=0", help="p=INT or a JSON file of [degree, re, im] triples")
        p.add_argument("--level", type=int, default=3)
        p.add_argument("--engine", choices=engines, default="operator")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--output", metavar="PATH")
        p.add_argument("--tol", type=float, default=1e-9)

    p = sub.add_parser("validate", help="check the unitarity condition")
    filters(p)
    p.add_argument("--tol", type=float, default=1e-9)

    p = sub.add_parser("measure", help="tabulate mu_f on the level-k cells")
    filters(p)
    table_opts(p, ("operator", "spectral", "both"))
    p.add_argument("--all-cells", action="store_true", help="also print cells of mass <= 1e-12")

    p = sub.add_parser("cdf", help="cumulative distribution at level-k right endpoints")
    filters(p)
    table_opts(p, ("operator", "spectral"))

    p = sub.add_parser("packets", help="Haar packet checks and dumps")
    p.add_argument("--sweep", metavar="k=INT")
    p.add_argument("--jmax", type=int, default=8)
    p.add_argument("--dump", type=int, metavar="N", help="write packet w_N as CSV")
    p.add_argument("--digits", type=int, help="digit count of the dumped packet index")
    p.add_argument("--output", metavar="PATH")

    p = sub.add_parser("reconstruct", help="analysis/synthesis round trip")
    filters(p)
    p.add_argument("--signal", metavar="PATH", help="signal JSON {index: [re, im]}; random if omitted")
    p.add_argument("--length", type=int, default=64, help="length of the random signal")
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--tree", action="store_true", help="emit the subband tree as JSON")
    p.add_argument("--output", metavar="PATH")
    p.add_argument("--tol", type=float, default=1e-10)

    p = sub.add_parser("demo", help="run the worked examples end to end")
    p.add_argument("name", choices=sorted(DEMOS))
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        if args.command == "demo":
            return cmd_demo(args.name, args.seed)
        cfg = _config(args)
        if args.command == "validate":
            return cmd_validate(cfg)
        if args.command == "measure":
            return cmd_measure(cfg, args.all_cells)
        if args.command == "cdf":
            return cmd_cdf(cfg)
        if args.command == "packets":
            return cmd_packets(cfg, args.sweep, args.dump, args.digits, args.jmax)
        if args.command == "reconstruct":
            return cmd_reconstruct(cfg, args.signal, args.depth, args.length, args.tree)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CheckFailed as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    parser.error(f"unknown command {args.command}")
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
