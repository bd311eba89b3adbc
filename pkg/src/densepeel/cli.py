"""Command-line driver: ``densepeel detect | oracle | bench``.

Exit codes: 0 success, 1 usage error, 2 input/parse error, 3 metric
precondition violation, 4 approximation bound violated (oracle only).
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from typing import IO

from .engine import MetricPreconditionError, PeelConfig, PeelResult, peel
from .graph import Graph, GraphFormatError, load_edge_list, load_vertex_weights, set_vertex_weights
from .metrics import NAMES, MetricSpec, resolve_metric
from .oracle import DEFAULT_LIMIT, check_guarantee, exact_densest

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_METRIC, EXIT_FAIL = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


def _real(x: float) -> float:
    return float(format(x, ".12g"))


@dataclass
class InputDigest:
    n: int
    m: int
    checksum: str


@dataclass
class RunReport:
    metric: str
    epsilon: float
    k: int
    optimization: str
    threads: int
    rounds: int
    best_density: float
    best_subset_size: int
    best_subset: list[int]
    density_trace: list[float]
    peeled_per_round: list[int]
    trim_passes_per_round: list[int]
    wall_time_ms: float
    input_digest: InputDigest = field(default_factory=lambda: InputDigest(0, 0, ""))

    @classmethod
    def build(cls, result: PeelResult, metric: MetricSpec, epsilon: float, mode: str,
              threads: int, digest: InputDigest) -> "RunReport":
        return cls(metric=metric.name, epsilon=epsilon, k=metric.k_multiplier,
                   optimization=mode, threads=threads, rounds=result.rounds,
                   best_density=result.best_density, best_subset_size=len(result.best_subset),
                   best_subset=sorted(result.best_subset),
                   density_trace=[r.density for r in result.trace],
                   peeled_per_round=[r.peeled for r in result.trace],
                   trim_passes_per_round=[r.trim_passes for r in result.trace],
                   wall_time_ms=result.wall_time * 1000.0, input_digest=digest)

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("epsilon", "best_density", "wall_time_ms"):
            d[key] = _real(d[key])
        d["density_trace"] = [_real(x) for x in d["density_trace"]]
        return d


def write_report(report: RunReport, fmt: str, sink: IO[str]) -> int:
    """Serialize ``report`` as json or tsv; returns the number of bytes written."""
    if fmt == "json":
        text = json.dumps(report.to_dict(), indent=2) + "\n"
    elif fmt == "tsv":
        rows = ["round\tdensity\tpeeled\ttrim_passes"]
        d = report.to_dict()
        for i, (g, p, t) in enumerate(zip(d["density_trace"], d["peeled_per_round"],
                                          d["trim_passes_per_round"]), start=1):
            rows.append(f"{i}\t{g!r}\t{p}\t{t}")
        text = "\n".join(rows) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    sink.write(text)
    return len(text.encode())


# ---------------------------------------------------------------- parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _nonneg(text: str) -> float:
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _common(p: argparse.ArgumentParser, with_opt: bool = True) -> None:
    p.add_argument("--graph", required=True, help="edge list: 'src dst [weight]' per line")
    p.add_argument("--metric", required=True, choices=NAMES)
    p.add_argument("--epsilon", type=_nonneg, default=0.1)
    p.add_argument("--k", type=int, help="clique size (kclique only)")
    if with_opt:
        p.add_argument("--opt", choices=("none", "gpo", "lpo"), default="lpo")
        p.add_argument("--seq", action="store_true", help="run the sequential baseline")
    p.add_argument("--threads", type=_positive_int, default=os.cpu_count() or 1)
    p.add_argument("--weighted", action="store_true")
    p.add_argument("--merge-duplicates", action="store_true")
    p.add_argument("--object-column", type=int, choices=(1, 2), default=2,
                   help="input column holding the object side, for fd")
    p.add_argument("--vertex-weights", metavar="PATH")
    p.add_argument("--fd-c", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="densepeel", description="Parallel densest-subgraph peeling.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = sub.add_parser("detect", help="find a dense subgraph")
    _common(d)
    d.add_argument("--format", choices=("json", "tsv"), default="json")
    d.add_argument("--output", metavar="PATH", help="default: standard output")

    o = sub.add_parser("oracle", help="certify the approximation bound by exhaustive search")
    _common(o)

    b = sub.add_parser("bench", help="compare rounds of the three parallel variants")
    _common(b, with_opt=False)
    b.add_argument("--format", choices=("text", "json"), default="text")
    return parser


def _metric(args) -> MetricSpec:
    if args.metric == "kclique" and args.k is None:
        raise UsageError("--k is required with --metric kclique")
    if args.metric != "kclique" and args.k is not None:
        raise UsageError("--k only applies to --metric kclique")
    if args.fd_c is not None and args.metric != "fd":
        raise UsageError("--fd-c only applies to --metric fd")
    try:
        return resolve_metric(args.metric, k=args.k, fd_c=args.fd_c)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _load(args) -> tuple[Graph, InputDigest]:
    try:
        with open(args.graph, "rb") as fh:
            raw = fh.read()
        g = load_edge_list(raw.decode("utf-8").splitlines(keepends=True), weighted=args.weighted,
                           merge_duplicates=args.merge_duplicates,
                           object_column=args.object_column)
        if args.vertex_weights:
            g = set_vertex_weights(g, load_vertex_weights(args.vertex_weights))
    except GraphFormatError as exc:
        raise InputError(f"{args.graph}: {exc}") from None
    except (OSError, UnicodeDecodeError, KeyError, ValueError) as exc:
        raise InputError(str(exc).strip("'\"")) from None
    return g, InputDigest(g.vertex_count, g.edge_count, hashlib.sha256(raw).hexdigest())


def _config(args, mode: str) -> PeelConfig:
    return PeelConfig(epsilon=args.epsilon, optimization=mode, threads=args.threads)


def detect_cmd(args, stdout: IO[str]) -> int:
    metric = _metric(args)
    g, digest = _load(args)
    mode = "sequential" if args.seq else args.opt
    result = peel(g, metric, _config(args, None if args.seq else args.opt), sequential=args.seq)
    report = RunReport.build(result, metric, args.epsilon, mode, args.threads, digest)
    try:
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                write_report(report, args.format, fh)
        else:
            write_report(report, args.format, stdout)
    except OSError as exc:
        raise InputError(f"cannot write report: {exc}") from None
    return EXIT_OK


def oracle_cmd(args, stdout: IO[str]) -> int:
    metric = _metric(args)
    g, _ = _load(args)
    if g.vertex_count > DEFAULT_LIMIT:
        raise InputError(f"oracle is limited to {DEFAULT_LIMIT} vertices; "
                         f"graph has {g.vertex_count}")
    eps = 0.0 if args.seq else args.epsilon
    result = peel(g, metric, _config(args, None if args.seq else args.opt), sequential=args.seq)
    opt = exact_densest(g, metric)
    rep = check_guarantee(result, opt, metric.k_multiplier, eps)
    stdout.write(f"engine_density\t{_real(rep.engine_density)!r}\n"
                 f"optimum_density\t{_real(rep.optimum_density)!r}\n"
                 f"ratio\t{_real(rep.ratio)!r}\n"
                 f"bound_factor\t{_real(metric.k_multiplier * (1 + eps))!r}\n"
                 f"verdict\t{'PASS' if rep.passed else 'FAIL'}\n")
    return EXIT_OK if rep.passed else EXIT_FAIL


def bench_cmd(args, stdout: IO[str]) -> int:
    metric = _metric(args)
    g, _ = _load(args)
    rows = []
    for mode in ("none", "gpo", "lpo"):
        r = peel(g, metric, _config(args, mode))
        rows.append({"variant": mode, "rounds": r.rounds,
                     "trim_passes": sum(x.trim_passes for x in r.trace),
                     "trimmed_vertices": _trimmed(r),
                     "best_density": _real(r.best_density),
                     "wall_time_ms": _real(r.wall_time * 1000.0)})
    base = rows[0]["rounds"]
    for row in rows:
        row["round_reduction_pct"] = _real(100.0 * (base - row["rounds"]) / base) if base else 0.0
    if args.format == "json":
        stdout.write(json.dumps(rows, indent=2) + "\n")
    else:
        cols = list(rows[0])
        stdout.write("\t".join(cols) + "\n")
        for row in rows:
            stdout.write("\t".join(str(row[c]) for c in cols) + "\n")
    return EXIT_OK


def _trimmed(r: PeelResult) -> int:
    # vertices removed by trim passes rather than by the batch peel
    total = 0
    for i, rec in enumerate(r.trace):
        nxt = r.trace[i + 1].alive_count if i + 1 < len(r.trace) else 0
        total += rec.alive_count - rec.peeled - nxt
    return total


COMMANDS = {"detect": detect_cmd, "oracle": oracle_cmd, "bench": bench_cmd}


def main(argv=None, stdout: IO[str] | None = None, stderr: IO[str] | None = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, stdout)
    except UsageError as exc:
        stderr.write(f"densepeel: usage error: {exc}\n")
        return EXIT_USAGE
    except InputError as exc:
        stderr.write(f"densepeel: input error: {exc}\n")
        return EXIT_INPUT
    except MetricPreconditionError as exc:
        stderr.write(f"densepeel: metric precondition violated: {exc}\n")
        return EXIT_METRIC
    except SystemExit as exc:  # --help
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
