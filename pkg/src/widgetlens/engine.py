"""A metamodel and its virtual-widget definitions, with tables built on demand."""

from __future__ import annotations

from importlib.resources import files
from pathlib import Path

from widgetlens.defs import VirtualWidgetDef, load_defs, validate_defs
from widgetlens.errors import DefsError, SynthesisError
from widgetlens.grammar import Grammar, generate_grammar
from widgetlens.metamodel import Metamodel, extend_metamodel, load_metamodel
from widgetlens.model import IdAllocator, Model
from widgetlens.parser import ParseStats, parse_model, parse_subtree
from widgetlens.synthesis import switch_pattern
from widgetlens.tables import ParserTables, build_tables
from widgetlens.virtual import VirtualModel, VirtualNode, render_native


def fixture_path(name: str = "") -> Path:
    """Path inside the bundled fixtures (metamodel, defs, request form)."""
    return Path(str(files("widgetlens") / "fixtures")) / name


class Engine:
    def __init__(self, mm: Metamodel, defs: list[VirtualWidgetDef]):
        self.mm = mm
        self.defs = defs
        self.vmm = extend_metamodel(mm, defs)
        self._tables: dict[tuple[str, ...], ParserTables] = {}

    @classmethod
    def load(cls, metamodel: str | Path, defs: str | Path) -> Engine:
        return cls(load_metamodel(Path(metamodel).read_text(encoding="utf-8")), load_defs(defs))

    @classmethod
    def fixture(cls) -> Engine:
        return cls.load(fixture_path("metamodel.txt"), fixture_path("defs"))

    def diagnostics(self) -> list[str]:
        return validate_defs(self.defs, self.mm)

    def definition(self, name: str) -> VirtualWidgetDef:
        for d in self.defs:
            if d.name == name:
                return d
        raise DefsError(f"no virtual widget named {name!r}")

    def grammar(self, roots: tuple[str, ...] | None = None) -> Grammar:
        return generate_grammar(self.vmm, self.defs, roots)

    def tables(self, roots: tuple[str, ...] | None = None) -> ParserTables:
        key = roots or (self.mm.root_class,)
        if key not in self._tables:
            self._tables[key] = build_tables(self.grammar(key))
        return self._tables[key]

    def all_roots(self) -> tuple[str, ...]:
        return tuple(sorted(self.mm.containers()))

    def virtualize(self, model: Model, root: str | None = None) -> tuple[VirtualModel, ParseStats]:
        """Parse the whole model, or only the subtree under widget `root`."""
        if root is None:
            return parse_model(model, self.tables())
        return parse_subtree(model, root, self.tables(self.all_roots()))

    def switch(self, model: Model, widget: str, target: int) -> Model:
        """Parse, switch one virtual widget to pattern `target`, render back."""
        vm, _ = self.virtualize(model)
        node = vm.find(widget)
        if not isinstance(node, VirtualNode):
            raise SynthesisError(f"no virtual widget with id {widget!r}")
        vm.replace(node, switch_pattern(node, target, IdAllocator(vm.ids())))
        return render_native(vm)
