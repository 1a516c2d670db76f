"""Parse-time benchmark over a corpus of modules.

Each module (a directory of screen files) is parsed once as a warmup and
then `repeats` more times; the extremes are dropped and the rest averaged.
Only the parse itself is timed: loading and tokenizing happen beforehand.
"""

from __future__ import annotations

import gc
import json
import logging
import statistics
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import psutil

from widgetlens.corpus import BenchConfig
from widgetlens.defs import VirtualWidgetDef
from widgetlens.errors import WidgetLensError
from widgetlens.grammar import generate_grammar
from widgetlens.metamodel import Metamodel, extend_metamodel
from widgetlens.model import load_model
from widgetlens.parser import ParseStats, parse, tables_leaves, tokenize
from widgetlens.tables import ParserTables, build_tables

log = logging.getLogger(__name__)

# Timing gates; slower machines get a 2x allowance (see cpu_allowance).
MODULE_CEILING_MS = 100.0
SCREEN_CEILING_MS = 10.0
SLOW_CPU_MHZ = 2000.0


@dataclass
class ModuleResult:
    module: str
    widgets: int
    virtual_widgets: int
    time_us: float
    screens: int = 1


@dataclass
class Fit:
    slope: float
    intercept: float
    r2: float | None  # None when x has fewer than two distinct values
    n: int

    def __str__(self) -> str:
        r2 = "undefined" if self.r2 is None else f"{self.r2:.3f}"
        return f"y = {self.slope:.6g}*x + {self.intercept:.6g} (R² = {r2}, n = {self.n})"


@dataclass
class BenchReport:
    modules: list[ModuleResult]
    stats: ParseStats
    time_fit: Fit
    size_fit: Fit
    skipped: list[tuple[str, str]] = field(default_factory=list)

    @property
    def total_widgets(self) -> int:
        return sum(m.widgets for m in self.modules)

    @property
    def max_time_us(self) -> float:
        return max((m.time_us for m in self.modules), default=0.0)

    def records(self) -> str:
        """One JSON object per module and line."""
        keys = ("module", "widgets", "virtual_widgets", "time_us")
        return "".join(json.dumps({k: asdict(m)[k] for k in keys}) + "\n" for m in self.modules)

    def format(self) -> str:
        lines = [
            f"modules: {len(self.modules)}  widgets: {self.total_widgets}  skipped: {len(self.skipped)}",
            f"max module time: {self.max_time_us / 1000:.3f} ms",
            f"time (µs) vs widgets: {self.time_fit}",
            f"virtual vs native size: {self.size_fit}",
            "",
            *self.stats.lines(),
        ]
        lines.extend(f"skipped {name}: {why}" for name, why in self.skipped)
        return "\n".join(lines)


def trimmed_mean(samples: list[float], drop_low: int, drop_high: int) -> float:
    if len(samples) <= drop_low + drop_high:
        raise ValueError("not enough samples to trim")
    kept = sorted(samples)[drop_low:len(samples) - drop_high]
    return sum(kept) / len(kept)


def ols(xs: list[float], ys: list[float]) -> Fit:
    """Least squares on the raw values."""
    n = len(xs)
    if n == 0:
        return Fit(0.0, 0.0, None, 0)
    if len(set(xs)) < 2:
        return Fit(0.0, statistics.fmean(ys), None, n)
    slope, intercept = statistics.linear_regression(xs, ys)
    r2 = statistics.correlation(xs, ys) ** 2 if len(set(ys)) > 1 else 1.0
    return Fit(slope, intercept, r2, n)


def cpu_mhz() -> float | None:
    try:
        freq = psutil.cpu_freq()
    except (OSError, NotImplementedError):
        return None
    if freq is None:
        return None
    return freq.max or freq.current or None


def cpu_allowance() -> float:
    """2.0 on cores known to run below 2 GHz, else 1.0."""
    mhz = cpu_mhz()
    return 2.0 if mhz is not None and mhz < SLOW_CPU_MHZ else 1.0


def tables_for(defs: list[VirtualWidgetDef], mm: Metamodel) -> ParserTables:
    return build_tables(generate_grammar(extend_metamodel(mm, defs), defs))


def module_dirs(corpus: str | Path) -> list[Path]:
    return sorted(p for p in Path(corpus).iterdir() if p.is_dir())


def run_bench(
    corpus: str | Path,
    defs: list[VirtualWidgetDef],
    mm: Metamodel,
    config: BenchConfig | None = None,
    tables: ParserTables | None = None,
) -> BenchReport:
    config = config or BenchConfig()
    tables = tables or tables_for(defs, mm)
    leaves = tables_leaves(tables)
    results: list[ModuleResult] = []
    skipped: list[tuple[str, str]] = []
    total = ParseStats()
    for mdir in module_dirs(corpus):
        try:
            streams = [
                tokenize(load_model(p.read_text(encoding="utf-8"), str(p)), leaves)
                for p in sorted(mdir.glob("*.xml"))
            ]
        except (OSError, UnicodeDecodeError, WidgetLensError) as exc:
            log.warning("skipping %s: %s", mdir.name, exc)
            skipped.append((mdir.name, str(exc)))
            continue
        widgets = sum(1 for s in streams for t in s if t.kind != "close")
        for tokens in streams:  # warmup
            parse(tokens, tables)
        samples = []
        gc.collect()
        enabled = gc.isenabled()
        gc.disable()
        try:
            for _ in range(config.repeats):
                start = time.perf_counter_ns()
                for tokens in streams:
                    parse(tokens, tables)
                samples.append((time.perf_counter_ns() - start) / 1000)
        finally:
            if enabled:
                gc.enable()
        size = 0
        for tokens in streams:
            vm, stats = parse(tokens, tables)
            size += vm.size()
            total += stats
        mean = trimmed_mean(samples, config.drop_low, config.drop_high)
        results.append(ModuleResult(mdir.name, widgets, size, mean, len(streams)))
    xs = [float(m.widgets) for m in results]
    return BenchReport(
        results,
        total,
        ols(xs, [m.time_us for m in results]),
        ols(xs, [float(m.virtual_widgets) for m in results]),
        skipped,
    )
