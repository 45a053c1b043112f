"""``jsontool`` command-line front end.

Exit codes: 0 ok, 1 parse error, 2 usage, 3 I/O, 4 fuzz or oracle divergence.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from . import ParseError, available_backends, parse, tape_dump
from .bench import ABLATIONS, TSV_COLUMNS, BenchConfigError, ResultMismatch, bench_bytes, config_name, format_table
from .document import distinct_values
from .generate import KINDS, LARGE_DEFAULT_SIZE, seed_corpus
from .minify import minify
from .stats import STRING_CONVENTION, CorpusStats, corpus_stats

EXIT_OK, EXIT_PARSE, EXIT_USAGE, EXIT_IO, EXIT_DIVERGENCE = 0, 1, 2, 3, 4

_DEFAULT_SIZES = {"numbers": 10001, "random-mixed": 1000, "escaped-strings": 1000, "large": LARGE_DEFAULT_SIZE}


class _IOFailure(Exception):
    pass


def _read(path: str) -> bytes:
    try:
        if path == "-":
            return sys.stdin.buffer.read()
        return Path(path).read_bytes()
    except OSError as exc:
        raise _IOFailure(f"{path}: {exc.strerror or exc}") from exc


def _write(path: str, data: bytes) -> None:
    try:
        if path == "-":
            sys.stdout.buffer.write(data)
            sys.stdout.flush()
        else:
            Path(path).write_bytes(data)
    except OSError as exc:
        raise _IOFailure(f"{path}: {exc.strerror or exc}") from exc


def _error_line(path: str, exc: ParseError) -> str:
    where = f" at byte {exc.offset}" if exc.offset is not None else ""
    detail = f" ({exc.detail})" if exc.detail else ""
    return f"{path}: {exc.code.name}{where}{detail}"


def cmd_validate(args) -> int:
    status = EXIT_OK
    for path in args.paths:
        data = _read(path)
        try:
            parse(data, backend=args.backend)
            ok, message = True, f"{path}: valid"
        except ParseError as exc:
            ok, message = False, _error_line(path, exc)
        if args.oracle:
            from .oracle import oracle_parse

            verdict = oracle_parse(data)
            if verdict.accepted != ok:
                oracle_text = "accepts" if verdict.accepted else f"rejects ({verdict.reason})"
                print(f"{message} but the oracle {oracle_text}", file=sys.stderr)
                status = EXIT_DIVERGENCE
                continue
            message += " (oracle agrees)"
        print(message, file=sys.stdout if ok else sys.stderr)
        if not ok and status == EXIT_OK:
            status = EXIT_PARSE
    return status


def cmd_tape(args) -> int:
    doc = parse(_read(args.path), backend=args.backend)
    sys.stdout.write(tape_dump(doc))
    return EXIT_OK


def cmd_minify(args) -> int:
    result = minify(_read(args.input), backend=args.backend)
    _write(args.output, result.data)
    report = sys.stderr if args.output == "-" else sys.stdout
    print(
        f"{args.input}: {result.original_size} bytes -> {result.minified_size} bytes "
        f"({result.ratio:.1%} of original)",
        file=report,
    )
    return EXIT_OK


def cmd_stats(args) -> int:
    rows = [(path, corpus_stats(_read(path), backend=args.backend)) for path in args.paths]
    columns = CorpusStats.columns()
    if args.format == "tsv":
        print("\t".join(["file", *columns]))
        for path, st in rows:
            d = st.as_dict()
            print("\t".join([path, *(f"{d[c]:.6g}" if isinstance(d[c], float) else str(d[c]) for c in columns)]))
        return EXIT_OK
    for path, st in rows:
        print(path)
        for name, value in st.as_dict().items():
            shown = f"{value:.2f}" if isinstance(value, float) else value
            print(f"  {name:<22}{shown:>14}")
    print(f"({STRING_CONVENTION})")
    return EXIT_OK


def cmd_generate(args) -> int:
    from .generate import generate

    size = _DEFAULT_SIZES[args.kind] if args.size is None else args.size
    out = generate(args.kind, size, args.seed, indent=args.indent)
    _write(args.output, out.data)
    if args.output != "-":
        print(f"wrote {len(out.data)} bytes of {args.kind} (size {size}, seed {args.seed}) to {args.output}")
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.ablations:
        if args.no_clmul or args.naive_extract or args.naive_classify:
            raise BenchConfigError("--ablations already runs every configuration; drop the individual switches")
        configs = {name: flags for name, flags in ABLATIONS.items() if name != "all-naive"}
    else:
        flags = {}
        if args.no_clmul:
            flags["clmul"] = False
        if args.naive_extract:
            flags["naive_extract"] = True
        if args.naive_classify:
            flags["naive_classify"] = True
        configs = {config_name(flags): flags}
    records = []
    for path in args.paths:
        records += bench_bytes(
            _read(path), name=path, configs=configs, stage=args.stage, reps=args.reps, backend=args.backend
        )
    if args.format == "tsv":
        print("\t".join(TSV_COLUMNS))
        for r in records:
            print(r.tsv())
    else:
        print(format_table(records))
    return EXIT_OK


def cmd_query(args) -> int:
    data = _read(args.path)
    t0 = time.perf_counter()
    doc = parse(data, backend=args.backend)
    t1 = time.perf_counter()
    found = distinct_values(doc, args.key_path)
    t2 = time.perf_counter()
    for value in sorted(found, key=lambda s: s.sort_key()):
        print(value.to_json())
    print(
        f"parse {1e3 * (t1 - t0):.3f} ms, select {1e3 * (t2 - t1):.3f} ms, "
        f"parse + select {1e3 * (t2 - t0):.3f} ms, {len(found)} distinct values",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_fuzz(args) -> int:
    from .fuzz import inverted_oracle, load_corpus, oracle_parse, run_fuzz

    if args.corpus:
        try:
            corpus = load_corpus(args.corpus)
        except OSError as exc:
            raise _IOFailure(f"{args.corpus}: {exc.strerror or exc}") from exc
        if not corpus:
            raise _IOFailure(f"{args.corpus}: no seed files")
    else:
        corpus = list(seed_corpus(args.seed).values())
    report = run_fuzz(
        corpus,
        args.iterations,
        seed=args.seed,
        backend=args.backend,
        oracle=inverted_oracle if args.bad_oracle else oracle_parse,
        out_dir=args.out,
    )
    for div in report.divergences:
        print(f"DIVERGENCE {div.describe()}", file=sys.stderr)
    print(report.summary())
    return EXIT_OK if report.ok else EXIT_DIVERGENCE


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="jsontool", description="Two-stage validating JSON parser tools.")
    p.add_argument(
        "--backend",
        choices=available_backends(),
        default=None,
        help="implementation to use (default: compiled when built, else python)",
    )
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    s = sub.add_parser("validate", help="check documents; report error code and offset")
    s.add_argument("paths", nargs="+")
    s.add_argument("--oracle", action="store_true", help="also run the reference oracle and flag disagreement")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("tape", help="print the tape, one word per line")
    s.add_argument("path")
    s.set_defaults(func=cmd_tape)

    s = sub.add_parser("minify", help="remove whitespace outside strings")
    s.add_argument("input")
    s.add_argument("-o", "--output", default="-", help="output path (default: stdout)")
    s.set_defaults(func=cmd_minify)

    s = sub.add_parser(
        "stats",
        help="node counts, non-ASCII bytes and bytes per structural",
        description=f"Corpus statistics. Note: {STRING_CONVENTION}. "
        f"TSV columns: file, {', '.join(CorpusStats.columns())}.",
    )
    s.add_argument("paths", nargs="+")
    s.add_argument("--format", choices=("table", "tsv"), default="table")
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser(
        "generate",
        help="write a deterministic synthetic corpus",
        description="size counts numbers (numbers), records (random-mixed, escaped-strings) or bytes (large).",
    )
    s.add_argument("kind", choices=KINDS)
    s.add_argument("--size", type=int, default=None)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--indent", type=int, default=None, help="pretty-print with this indent")
    s.add_argument("-o", "--output", default="-")
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser(
        "bench",
        help="throughput with optional ablations",
        description=f"TSV columns: {', '.join(TSV_COLUMNS)}.",
    )
    s.add_argument("paths", nargs="+")
    s.add_argument("--no-clmul", action="store_true", help="prefix XOR by shift ladder")
    s.add_argument("--naive-extract", action="store_true", help="one index per loop iteration")
    s.add_argument("--naive-classify", action="store_true", help="per-character comparisons")
    s.add_argument("--ablations", action="store_true", help="run default and each naive switch in turn")
    s.add_argument("--stage", choices=("1", "2", "all"), default="all")
    s.add_argument("--reps", type=int, default=10)
    s.add_argument("--format", choices=("table", "tsv"), default="table")
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("query", help="distinct scalar values at a dotted key path")
    s.add_argument("path")
    s.add_argument("key_path")
    s.set_defaults(func=cmd_query)

    s = sub.add_parser("fuzz", help="mutation fuzzing against the reference oracle")
    s.add_argument("corpus", nargs="?", help="seed file or directory (default: built-in seeds)")
    s.add_argument("--iterations", type=int, default=10_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default="fuzz-divergences", help="directory for reproducer files")
    s.add_argument("--bad-oracle", action="store_true", help="self-test: use an oracle that inverts verdicts")
    s.set_defaults(func=cmd_fuzz)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _IOFailure as exc:
        print(f"jsontool: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ParseError as exc:
        print(_error_line(getattr(args, "path", None) or getattr(args, "input", "input"), exc), file=sys.stderr)
        return EXIT_PARSE
    except BenchConfigError as exc:
        print(f"jsontool: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResultMismatch as exc:
        print(f"jsontool: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except (ValueError, OverflowError) as exc:
        print(f"jsontool: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
