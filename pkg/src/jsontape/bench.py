"""Throughput measurement with stage split and ablation switches."""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass

from . import PaddedInput, get_backend

ABLATIONS = {
    "default": {},
    "no-clmul": {"clmul": False},
    "naive-extract": {"naive_extract": True},
    "naive-classify": {"naive_classify": True},
    "all-naive": {"clmul": False, "naive_extract": True, "naive_classify": True},
}
STAGES = ("1", "2", "all")
TSV_COLUMNS = (
    "file",
    "backend",
    "config",
    "stage",
    "bytes",
    "reps",
    "min_s",
    "median_s",
    "throughput_Bps",
    "stage1_min_s",
    "stage2_min_s",
)


class BenchConfigError(ValueError):
    """Mutually incompatible benchmark options."""


class ResultMismatch(AssertionError):
    """An ablation changed the parse output."""


@dataclass(frozen=True)
class BenchRecord:
    file: str
    backend: str
    config: str
    stage: str
    bytes: int
    reps: int
    min_s: float
    median_s: float
    stage1_min_s: float | None = None
    stage2_min_s: float | None = None

    @property
    def throughput(self) -> float:
        return self.bytes / self.min_s if self.min_s > 0 else float("inf")

    def tsv(self) -> str:
        def fmt(v):
            return "" if v is None else f"{v:.9g}" if isinstance(v, float) else str(v)

        values = [
            self.file, self.backend, self.config, self.stage, self.bytes, self.reps,
            self.min_s, self.median_s, self.throughput, self.stage1_min_s, self.stage2_min_s,
        ]
        return "\t".join(fmt(v) for v in values)


def config_name(flags: dict) -> str:
    for name, known in ABLATIONS.items():
        if known == {k: v for k, v in flags.items() if v != _DEFAULTS[k]}:
            return name
    return "+".join(k.replace("_", "-") for k, v in sorted(flags.items()) if v != _DEFAULTS[k])


_DEFAULTS = {"clmul": True, "naive_extract": False, "naive_classify": False}


def check_config(stage: str, flags: dict) -> None:
    if stage not in STAGES:
        raise BenchConfigError(f"stage must be one of {', '.join(STAGES)}")
    if stage == "2" and any(flags.get(k, d) != d for k, d in _DEFAULTS.items()):
        raise BenchConfigError("ablation switches only affect stage 1; they cannot be combined with --stage 2")


def _timed(fn, reps: int) -> list[float]:
    fn()  # warm-up
    out = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        out.append(time.perf_counter() - t0)
    return out


def bench_bytes(
    data: bytes,
    *,
    name: str = "<memory>",
    configs: dict[str, dict] | None = None,
    stage: str = "all",
    reps: int = 10,
    backend: str | None = None,
) -> list[BenchRecord]:
    """Time every configuration on one document.

    Before timing, each configuration's structural index and tape are
    compared with the default configuration's; any difference raises
    :class:`ResultMismatch`.
    """
    if reps < 1:
        raise BenchConfigError("reps must be at least 1")
    configs = configs or {"default": {}}
    for flags in configs.values():
        check_config(stage, flags)
    impl = get_backend(backend)
    padded = PaddedInput(data)
    reference_index = impl.structural_index(padded)
    reference_tape = impl.build_tape(padded, reference_index)

    records = []
    for cname, flags in configs.items():
        flags = {**_DEFAULTS, **flags}
        index = impl.structural_index(padded, **flags)
        if index != reference_index:
            raise ResultMismatch(f"{name}: {cname} changed the structural index")
        if stage != "1" and impl.build_tape(padded, index) != reference_tape:
            raise ResultMismatch(f"{name}: {cname} changed the tape")

        split1 = split2 = None
        if stage == "1":
            times = _timed(lambda: impl.structural_index(padded, **flags), reps)
        elif stage == "2":
            times = _timed(lambda: impl.build_tape(padded, index), reps)
        else:
            splits: list[int] = []

            def run():
                splits.clear()
                impl.parse(padded, timings=splits, **flags)
                run.splits.append(tuple(splits))

            run.splits = []
            times = _timed(run, reps)
            measured = run.splits[1:]  # drop the warm-up
            split1 = min(s[0] for s in measured) / 1e9
            split2 = min(s[1] for s in measured) / 1e9
        records.append(
            BenchRecord(
                file=name,
                backend=impl.name,
                config=cname,
                stage=stage,
                bytes=len(data),
                reps=reps,
                min_s=min(times),
                median_s=statistics.median(times),
                stage1_min_s=split1,
                stage2_min_s=split2,
            )
        )
    return records


def format_table(records: list[BenchRecord]) -> str:
    header = f"{'file':<28} {'backend':<16} {'config':<15} {'stage':>5} {'bytes':>11} {'min ms':>10} {'median ms':>10} {'MB/s':>9} {'s1 ms':>9} {'s2 ms':>9}"
    lines = [header, "-" * len(header)]
    for r in records:
        s1 = f"{r.stage1_min_s * 1e3:9.3f}" if r.stage1_min_s is not None else f"{'':>9}"
        s2 = f"{r.stage2_min_s * 1e3:9.3f}" if r.stage2_min_s is not None else f"{'':>9}"
        lines.append(
            f"{r.file[-28:]:<28} {r.backend:<16} {r.config:<15} {r.stage:>5} {r.bytes:>11} "
            f"{r.min_s * 1e3:10.3f} {r.median_s * 1e3:10.3f} {r.throughput / 1e6:9.1f} {s1} {s2}"
        )
    return "\n".join(lines)
