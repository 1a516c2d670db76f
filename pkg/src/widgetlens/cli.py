"""Command line: ``widgetlens <command> ...``.

Exit codes: 0 success, 1 domain error (invalid definitions, parse or
synthesis failure, failed bench gate), 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from widgetlens import bench as benchmod
from widgetlens.corpus import NOISE_MODES, BenchConfig, gen_corpus
from widgetlens.engine import Engine, fixture_path
from widgetlens.errors import WidgetLensError
from widgetlens.grammar import dump_grammar
from widgetlens.model import IdAllocator, load_model, save_model, save_widgets
from widgetlens.synthesis import instantiate
from widgetlens.tables import dump_tables
from widgetlens.virtual import save_virtual

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2


class _Usage(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _Usage(f"cannot read {path}: {exc.strerror or exc}") from None


def _engine(args: argparse.Namespace) -> Engine:
    for p in (args.metamodel, args.defs):
        if not Path(p).exists():
            raise _Usage(f"no such file or directory: {p}")
    return Engine.load(args.metamodel, args.defs)


def _emit(text: str, out: str | None) -> None:
    if out:
        try:
            Path(out).write_text(text + "\n", encoding="utf-8")
        except OSError as exc:
            raise _Usage(f"cannot write {out}: {exc.strerror or exc}") from None
    else:
        print(text)


def cmd_validate(args) -> int:
    engine = _engine(args)
    diags = engine.diagnostics()
    for d in diags:
        print(d, file=sys.stderr)
    if diags:
        return EXIT_DOMAIN
    print(f"ok: {len(engine.defs)} definitions, {len(engine.mm.classes)} classes")
    return EXIT_OK


def cmd_virtualize(args) -> int:
    engine = _engine(args)
    model = load_model(_read(args.model), args.model)
    vm, stats = engine.virtualize(model, args.root)
    _emit(save_virtual(vm), args.output)
    if args.stats:
        if not args.output:
            print()
        print(stats.format())
    return EXIT_OK


def cmd_synthesize(args) -> int:
    engine = _engine(args)
    props = {}
    for item in args.prop:
        name, sep, value = item.partition("=")
        if not sep:
            raise _Usage(f"--prop expects NAME=VALUE, got {item!r}")
        props[name] = value
    widgets, _ = instantiate(engine.definition(args.definition), args.index, props, IdAllocator())
    _emit(save_widgets(widgets), args.output)
    return EXIT_OK


def cmd_switch(args) -> int:
    engine = _engine(args)
    model = load_model(_read(args.model), args.model)
    _emit(save_model(engine.switch(model, args.widget, args.to)), args.output)
    return EXIT_OK


def cmd_dump_grammar(args) -> int:
    engine = _engine(args)
    roots = engine.all_roots() if args.all_roots else None
    sys.stdout.write(dump_grammar(engine.grammar(roots)))
    return EXIT_OK


def cmd_dump_tables(args) -> int:
    engine = _engine(args)
    roots = engine.all_roots() if args.all_roots else None
    sys.stdout.write(dump_tables(engine.tables(roots)))
    return EXIT_OK


def _config(args) -> BenchConfig:
    try:
        return BenchConfig(
            seed=args.seed,
            modules=args.modules,
            screens=tuple(args.screens),
            widgets=tuple(args.widgets),
            ratio=args.ratio,
            noise=args.noise,
            repeats=args.repeats,
            drop_high=args.drop_high,
            drop_low=args.drop_low,
        )
    except ValueError as exc:
        raise _Usage(str(exc)) from None


def cmd_gen_corpus(args) -> int:
    engine = _engine(args)
    config = _config(args)
    dirs = gen_corpus(config, engine.defs, engine.mm, args.out)
    print(f"wrote {len(dirs)} modules to {args.out}")
    return EXIT_OK


def cmd_bench(args) -> int:
    engine = _engine(args)
    if not Path(args.corpus).is_dir():
        raise _Usage(f"no such corpus directory: {args.corpus}")
    report = benchmod.run_bench(args.corpus, engine.defs, engine.mm, _config(args), engine.tables())
    print(report.format())
    if args.records:
        try:
            Path(args.records).write_text(report.records(), encoding="utf-8")
        except OSError as exc:
            raise _Usage(f"cannot write {args.records}: {exc.strerror or exc}") from None
    if args.check:
        allowance = benchmod.cpu_allowance()
        ceiling = benchmod.MODULE_CEILING_MS * allowance
        worst = report.max_time_us / 1000
        print(f"module ceiling {ceiling:.0f} ms (allowance x{allowance:g}): worst {worst:.3f} ms")
        if worst >= ceiling:
            return EXIT_DOMAIN
    return EXIT_OK


def _add_sources(p: argparse.ArgumentParser) -> None:
    p.add_argument("--defs", default=str(fixture_path("defs")), help="definition directory or file")
    p.add_argument("--metamodel", default=str(fixture_path("metamodel.txt")), help="metamodel file")


def _add_config(p: argparse.ArgumentParser) -> None:
    d = BenchConfig()
    p.add_argument("--seed", type=int, default=d.seed)
    p.add_argument("--modules", type=int, default=d.modules)
    p.add_argument("--screens", type=int, nargs=2, metavar=("LO", "HI"), default=list(d.screens))
    p.add_argument("--widgets", type=int, nargs=2, metavar=("LO", "HI"), default=list(d.widgets))
    p.add_argument("--ratio", type=float, default=d.ratio, help="share of planted pattern instances")
    p.add_argument("--noise", choices=NOISE_MODES, default=d.noise)
    p.add_argument("--repeats", type=int, default=d.repeats)
    p.add_argument("--drop-high", type=int, default=d.drop_high)
    p.add_argument("--drop-low", type=int, default=d.drop_low)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="widgetlens", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check definitions against a metamodel")
    p.add_argument("defs")
    p.add_argument("metamodel")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("virtualize", help="parse a native model into its virtual view")
    p.add_argument("model")
    _add_sources(p)
    p.add_argument("--root", help="parse only the subtree under this widget id")
    p.add_argument("--stats", action="store_true", help="print parser statistics")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_virtualize)

    p = sub.add_parser("synthesize", help="instantiate one pattern of a virtual widget")
    p.add_argument("definition")
    p.add_argument("index", type=int)
    p.add_argument("--prop", action="append", default=[], metavar="NAME=VALUE")
    _add_sources(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("switch-pattern", help="switch a virtual widget to another pattern")
    p.add_argument("model")
    p.add_argument("--widget", required=True, help="virtual widget id from the virtual view")
    p.add_argument("--to", type=int, required=True, help="target pattern index")
    _add_sources(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_switch)

    for name, func, what in (
        ("dump-grammar", cmd_dump_grammar, "print the generated grammar"),
        ("dump-tables", cmd_dump_tables, "print the parser tables"),
    ):
        p = sub.add_parser(name, help=what)
        _add_sources(p)
        p.add_argument("--all-roots", action="store_true", help="allow every container class as parse root")
        p.set_defaults(func=func)

    p = sub.add_parser("gen-corpus", help="write a synthetic benchmark corpus")
    p.add_argument("out")
    _add_sources(p)
    _add_config(p)
    p.set_defaults(func=cmd_gen_corpus)

    p = sub.add_parser("bench", help="time parsing over a corpus")
    p.add_argument("corpus")
    _add_sources(p)
    _add_config(p)
    p.add_argument("--records", help="write one JSON record per module to this file")
    p.add_argument("--check", action="store_true", help="fail if a module exceeds the time ceiling")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Usage as exc:
        print(f"widgetlens: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except WidgetLensError as exc:
        print(f"widgetlens: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
