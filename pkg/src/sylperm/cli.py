"""Command-line entry point.

Exit codes: 0 when every requested check passes, 1 when a check fails,
2 for usage errors, 3 when a size or budget guard trips.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import analysis, cocyclic, engines, pequiv
from .errors import SizeLimitError
from .hadamard import format_matrix, parse_matrix, sylvester

SCHEMA = cocyclic.SCHEMA
EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_GUARD = 0, 1, 2, 3

ENGINE_NAMES = ("naive", "ryser", "gray", "cocyclic-full", "cocyclic-half")
CLAIMS = ("lemma", "codeword", "invariance", "divisibility", "inequality", "sufficient", "orbits")


class UsageError(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2)


def _table(records: list[dict]) -> str:
    if not records:
        return ""
    keys = list(records[0])
    cells = [[str(rec[k]) for k in keys] for rec in records]
    widths = [max(len(k), *(len(row[i]) for row in cells)) for i, k in enumerate(keys)]
    lines = ["  ".join(k.ljust(w) for k, w in zip(keys, widths))]
    lines += ["  ".join(c.ljust(w) for c, w in zip(row, widths)) for row in cells]
    return "\n".join(lines)


def _csv(records: list[dict]) -> str:
    buf = io.StringIO()
    if records:
        writer = csv.DictWriter(buf, fieldnames=list(records[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(records)
    return buf.getvalue()


def _format(obj: dict, records: list[dict], fmt: str) -> str:
    if fmt == "json":
        return _dump(obj)
    if fmt == "csv":
        return _csv(records)
    return _table(records)


def cmd_gen(args) -> int:
    _emit(format_matrix(sylvester(args.p)), args.out)
    return EXIT_OK


def _sylvester_order(matrix) -> int | None:
    n = matrix.order
    if n & (n - 1) or n < 2:
        return None
    p = n.bit_length() - 1
    return p if matrix.entries == sylvester(p).entries else None


def cmd_perm(args) -> int:
    if (args.p is None) == (args.file is None):
        raise UsageError("give either P or --file")
    if args.file is not None:
        matrix = parse_matrix(Path(args.file).read_text())
        p = _sylvester_order(matrix)
        engine = args.engine or "gray"
    else:
        p = args.p
        matrix = sylvester(p)
        engine = args.engine or "cocyclic-half"

    if engine.startswith("cocyclic"):
        if p is None:
            raise UsageError(f"engine {engine} only accepts Sylvester Hadamard matrices")
        if engine == "cocyclic-full":
            result = cocyclic.per_cocyclic_full(p, workers=args.workers, budget=args.budget)
        else:
            result = cocyclic.per_cocyclic_half(p, assume_lemma=args.assume_lemma,
                                                workers=args.workers, budget=args.budget)
    elif engine == "ryser":
        result = engines.per_ryser(matrix, workers=args.workers)
    else:
        result = engines.ENGINES[engine](matrix)

    obj = {
        "schema": SCHEMA,
        "command": "perm",
        "engine": result.engine,
        "n": matrix.order,
        "value": str(result.value),
        "ops": result.ops.as_dict(),
    }
    if result.phases:
        obj["phases"] = {k: v.as_dict() for k, v in result.phases.items()}
    record = {"engine": result.engine, "n": matrix.order, "value": str(result.value), **result.ops.as_dict()}
    _emit(_format(obj, [record], args.format), args.out)
    return EXIT_OK


def cmd_classes(args) -> int:
    dist = cocyclic.class_distribution(args.r, args.p, workers=args.workers, budget=args.budget)
    records = dist.records()
    obj = {"schema": SCHEMA, "command": "classes", "r": args.r, "p": args.p,
           "total": dist.total, "classes": records}
    if args.spectrum:
        spectrum = cocyclic.phi_spectrum(args.r, args.p, budget=args.budget)
        obj["phi_spectrum"] = {str(v): count for v, count in spectrum.items()}
    _emit(_format(obj, records, args.format), args.out)
    return EXIT_OK


def _require(value, name: str):
    if value is None:
        raise UsageError(f"--{name} is required for this claim")
    return value


def _sweep_kwargs(args) -> dict:
    if args.sample is not None:
        if args.seed is None:
            raise UsageError("sampled mode requires --seed")
        return {"mode": "sampled", "samples": args.sample, "seed": args.seed}
    if args.mode == "sampled":
        raise UsageError("sampled mode requires --sample N")
    return {"mode": "exhaustive"}


def cmd_verify(args) -> int:
    claim = args.claim
    if claim == "lemma":
        report = cocyclic.verify_lemma_vanishing(
            _require(args.p, "p"), _require(args.k, "k"), budget=args.budget,
            workers=args.workers, **_sweep_kwargs(args)).to_dict()
    elif claim == "codeword":
        report = cocyclic.verify_codeword_proposition(
            _require(args.p, "p"), budget=args.budget, workers=args.workers, **_sweep_kwargs(args)).to_dict()
    elif claim == "invariance":
        report = cocyclic.invariance_report(_require(args.p, "p"), **_sweep_kwargs(args)).to_dict()
    elif claim == "orbits":
        report = pequiv.orbit_counting_report(_require(args.p, "p"), budget=args.budget)
    elif claim == "divisibility":
        rep = analysis.check_divisibility(_require(args.p, "p"))
        report = {"schema": SCHEMA, "claim": "divisibility", **rep.to_dict(), "passed": rep.holds}
    elif claim == "inequality":
        rep = analysis.check_inequality(_require(args.n, "n"), _require(args.m, "m"))
        report = {"schema": SCHEMA, "claim": "inequality", **rep.to_dict(),
                  "passed": rep.holds and rep.identity_validated}
    else:
        report = analysis.check_sufficient_condition(args.max_k)

    records = [{k: v for k, v in report.items() if not isinstance(v, (list, dict))}]
    _emit(_format(report, records, args.format), args.out)
    return EXIT_OK if report["passed"] else EXIT_FAILED


def cmd_bench(args) -> int:
    report = analysis.opcount_report(args.p)
    if args.format == "json":
        text = _dump(report)
    else:
        records = [{"engine": name, **{k: v for k, v in entry.items() if not isinstance(v, dict)}}
                   for name, entry in report["measured"].items()]
        text = _csv(records) if args.format == "csv" else analysis.opcount_table(report)
    _emit(text, args.out)
    return EXIT_OK if report["passed"] else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "table"), default="json")
    common.add_argument("--out", metavar="FILE", help="write output to FILE instead of stdout")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--budget", type=int, default=None,
                        help="subset budget for exhaustive sweeps (default: $SYLPERM_BUDGET or 2e7)")

    parser = argparse.ArgumentParser(prog="sylperm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", parents=[common], help="print H_{2^p} in the matrix text format")
    gen.add_argument("p", type=int)
    gen.set_defaults(func=cmd_gen)

    perm = sub.add_parser("perm", parents=[common], help="compute a permanent")
    perm.add_argument("p", type=int, nargs="?")
    perm.add_argument("--file", help="matrix in the text format")
    perm.add_argument("--engine", choices=ENGINE_NAMES)
    perm.add_argument("--assume-lemma", action="store_true",
                      help="skip power-of-two ranks even for p > 4")
    perm.set_defaults(func=cmd_perm)

    classes = sub.add_parser("classes", parents=[common], help="P-equivalence classes of r-row subsets")
    classes.add_argument("r", type=int)
    classes.add_argument("p", type=int)
    classes.add_argument("--spectrum", action="store_true", help="also emit the multiset of phi values")
    classes.set_defaults(func=cmd_classes)

    verify = sub.add_parser("verify", parents=[common], help="run a verification suite")
    verify.add_argument("claim", choices=CLAIMS)
    verify.add_argument("--p", type=int)
    verify.add_argument("--k", type=int)
    verify.add_argument("--n", type=int)
    verify.add_argument("--m", type=int)
    verify.add_argument("--max-k", type=int, default=4)
    verify.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
    verify.add_argument("--sample", type=int, metavar="N", help="sampled mode with N draws")
    verify.add_argument("--seed", type=int)
    verify.set_defaults(func=cmd_verify)

    bench = sub.add_parser("bench", parents=[common], help="operation-count comparison")
    bench.add_argument("p", type=int)
    bench.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"sylperm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SizeLimitError as exc:
        print(f"sylperm: guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ValueError, OSError) as exc:
        print(f"sylperm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
