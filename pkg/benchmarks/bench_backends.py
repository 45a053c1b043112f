"""Compare the compiled core with the pure-Python fallback.

    python3 benchmarks/bench_backends.py [--size RECORDS] [--reps N] [--format tsv]

Every backend must produce the same tape; throughput is reported per stage.
"""

from __future__ import annotations

import argparse
import sys

import jsontape
from jsontape.bench import TSV_COLUMNS, bench_bytes, format_table
from jsontape.generate import SAMPLE_DOCUMENT, generate


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=300, help="records in the random-mixed document")
    ap.add_argument("--reps", type=int, default=5)
    ap.add_argument("--format", choices=("table", "tsv"), default="table")
    args = ap.parse_args(argv)

    docs = {
        "sample": SAMPLE_DOCUMENT,
        f"random-mixed-{args.size}": generate("random-mixed", args.size).data,
        "numbers-2000": generate("numbers", 2000).data,
    }
    backends = jsontape.available_backends()
    records = []
    for name, data in docs.items():
        tapes = {b: jsontape.parse(data, backend=b) for b in backends}
        first = tapes[backends[0]]
        if any(t != first for t in tapes.values()):
            print(f"{name}: backends disagree", file=sys.stderr)
            return 1
        for b in backends:
            records += bench_bytes(data, name=name, reps=args.reps, backend=b)

    if args.format == "tsv":
        print("\t".join(TSV_COLUMNS))
        print("\n".join(r.tsv() for r in records))
    else:
        print(format_table(records))
        by_doc: dict[str, dict[str, float]] = {}
        for r in records:
            by_doc.setdefault(r.file, {})[r.backend] = r.throughput
        if "compiled" in backends:
            print()
            for name, speeds in by_doc.items():
                print(f"{name}: compiled is {speeds['compiled'] / speeds['python']:.0f}x the python backend")
    return 0


if __name__ == "__main__":
    sys.exit(main())
