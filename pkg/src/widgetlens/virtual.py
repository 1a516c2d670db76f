"""Virtual models: native nodes mixed with virtual widget instances.

The native model stays the source of truth. Each virtual node keeps the
exact native widgets it was parsed from (its provenance), so rendering an
unedited virtual model gives back the original native model.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Union

from widgetlens._xml import quote_attr
from widgetlens.defs import VirtualWidgetDef
from widgetlens.model import ID_ATTR, IdAllocator, Model, Widget, _attrs


@dataclass
class NativeNode:
    widget: Widget
    children: list[Node] = field(default_factory=list)

    @property
    def id(self) -> str:
        return self.widget.id

    @property
    def cls(self) -> str:
        return self.widget.cls


@dataclass
class VirtualNode:
    definition: VirtualWidgetDef
    pattern: int
    properties: dict[str, str]
    captures: dict[str, str] = field(default_factory=dict)
    provenance: list[Widget] = field(default_factory=list)
    id: str = ""
    dirty: bool = False

    @property
    def name(self) -> str:
        return self.definition.name

    @property
    def cls(self) -> str:
        return self.definition.name

    def native_ids(self) -> set[str]:
        return {w.id for top in self.provenance for w in top.walk()}


Node = Union[NativeNode, VirtualNode]


@dataclass
class VirtualModel:
    root: NativeNode
    source_uri: str | None = None

    def nodes(self) -> Iterator[Node]:
        stack: list[Node] = [self.root]
        while stack:
            n = stack.pop()
            yield n
            if isinstance(n, NativeNode):
                stack.extend(reversed(n.children))

    def virtual_nodes(self) -> list[VirtualNode]:
        return [n for n in self.nodes() if isinstance(n, VirtualNode)]

    def find(self, ident: str) -> Node | None:
        for n in self.nodes():
            if n.id == ident:
                return n
        return None

    def ids(self) -> set[str]:
        used: set[str] = set()
        for n in self.nodes():
            used.add(n.id)
            if isinstance(n, VirtualNode):
                used |= n.native_ids()
        return used

    def replace(self, old: VirtualNode, new: VirtualNode) -> None:
        for n in self.nodes():
            if isinstance(n, NativeNode):
                for i, c in enumerate(n.children):
                    if c is old:
                        n.children[i] = new
                        return
        raise KeyError(old.id)

    def size(self) -> int:
        return sum(1 for _ in self.nodes())


def _emit(node: Node, depth: int, out: list[str]) -> None:
    pad = "  " * depth
    if isinstance(node, VirtualNode):
        attrs = f" {ID_ATTR}={quote_attr(node.id)} Pattern=\"{node.pattern}\""
        for p in node.definition.properties:
            if p.name in node.properties:
                attrs += f" {p.name}={quote_attr(node.properties[p.name])}"
        out.append(f"{pad}<{node.name}{attrs}/>")
        return
    w = node.widget
    head = f"{pad}<{w.cls}{_attrs(None if w.auto_id else w.id, w.properties)}"
    if not node.children:
        out.append(head + "/>")
        return
    out.append(head + ">")
    for c in node.children:
        _emit(c, depth + 1, out)
    out.append(f"{pad}</{w.cls}>")


def save_virtual(vm: VirtualModel) -> str:
    """Serialize the virtual view (not loss-free on its own; see render_native)."""
    out: list[str] = []
    _emit(vm.root, 0, out)
    return "\n".join(out)


def render_native(vm: VirtualModel) -> Model:
    """Native model for `vm`: provenance for clean nodes, synthesis for the rest."""
    from widgetlens.synthesis import instantiate

    alloc = IdAllocator(vm.ids())

    def render(node: Node) -> list[Widget]:
        if isinstance(node, VirtualNode):
            if node.dirty or not node.provenance:
                widgets, captures = instantiate(node.definition, node.pattern, node.properties, alloc)
                node.provenance, node.captures, node.dirty = widgets, captures, False
            return [w.copy() for w in node.provenance]
        w = node.widget
        children = [x for c in node.children for x in render(c)]
        return [Widget(w.cls, w.id, dict(w.properties), children, w.auto_id)]

    return Model(render(vm.root)[0], vm.source_uri)
