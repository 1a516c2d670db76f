"""Native widget trees and their canonical XML form."""

from __future__ import annotations

import re
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field

from widgetlens._xml import Element, parse_xml, quote_attr
from widgetlens.errors import ModelError

ID_ATTR = "Id"
AUTO_PREFIX = "w"


@dataclass
class Widget:
    cls: str
    id: str
    properties: dict[str, str] = field(default_factory=dict)
    children: list[Widget] = field(default_factory=list)
    # Auto-assigned ids are not written back out, so a reload re-derives them.
    auto_id: bool = field(default=False, compare=False)

    def walk(self) -> Iterator[Widget]:
        """Preorder traversal, iterative so deep trees don't hit the recursion limit."""
        stack = [self]
        while stack:
            w = stack.pop()
            yield w
            stack.extend(reversed(w.children))

    def copy(self) -> Widget:
        return Widget(self.cls, self.id, dict(self.properties), [c.copy() for c in self.children], self.auto_id)


@dataclass
class Model:
    root: Widget
    source_uri: str | None = field(default=None, compare=False)

    def widgets(self) -> Iterator[Widget]:
        return self.root.walk()

    def ids(self) -> set[str]:
        return {w.id for w in self.widgets()}


def _smallest_unused(prefix: str, used: set[str]) -> str:
    n = 1
    while f"{prefix}{n}" in used:
        n += 1
    return f"{prefix}{n}"


def fresh_id(model: Model | None, prefix: str) -> str:
    """Smallest `prefix<N>` (N >= 1) not already used in `model`."""
    return _smallest_unused(prefix, model.ids() if model is not None else set())


class IdAllocator:
    """Hands out fresh widget ids, never repeating one it has seen or issued."""

    def __init__(self, used: Iterable[str] = ()):
        self.used = set(used)

    @classmethod
    def for_model(cls, model: Model) -> IdAllocator:
        return cls(model.ids())

    def fresh(self, prefix: str = AUTO_PREFIX) -> str:
        ident = _smallest_unused(prefix, self.used)
        self.used.add(ident)
        return ident

    def reserve(self, ident: str) -> None:
        self.used.add(ident)


def _build(el: Element, seen: dict[str, Element]) -> Widget:
    props: dict[str, str] = {}
    ident = None
    for name, value in el.attrs.items():
        if name == ID_ATTR:
            ident = value
        elif name.startswith("Default."):
            raise ModelError(f"attribute {name!r} is only allowed in pattern files", el.line, el.column)
        else:
            props[name] = value
    if ident is not None:
        if not ident:
            raise ModelError("empty Id attribute", el.line, el.column)
        if ident in seen:
            first = seen[ident]
            raise ModelError(
                f"duplicate Id {ident!r}: first at line {first.line}, column {first.column}; "
                f"again at line {el.line}, column {el.column}"
            )
        seen[ident] = el
    w = Widget(el.tag, ident or "", props, [_build(c, seen) for c in el.children])
    return w


def load_model(text: str, source_uri: str | None = None) -> Model:
    root = _build(parse_xml(text), {})
    model = Model(root, source_uri)
    used = {w.id for w in model.widgets() if w.id}
    for w in model.widgets():
        if not w.id:
            w.id = _smallest_unused(AUTO_PREFIX, used)
            w.auto_id = True
            used.add(w.id)
    return model


def _attrs(ident: str | None, props: dict[str, str]) -> str:
    parts = [] if ident is None else [f"{ID_ATTR}={quote_attr(ident)}"]
    parts.extend(f"{k}={quote_attr(props[k])}" for k in sorted(props))
    return "".join(" " + p for p in parts)


def _emit(w: Widget, depth: int, out: list[str]) -> None:
    pad = "  " * depth
    head = f"{pad}<{w.cls}{_attrs(None if w.auto_id else w.id, w.properties)}"
    if not w.children:
        out.append(head + "/>")
        return
    out.append(head + ">")
    for c in w.children:
        _emit(c, depth + 1, out)
    out.append(f"{pad}</{w.cls}>")


def save_widgets(widgets: Iterable[Widget], depth: int = 0) -> str:
    out: list[str] = []
    for w in widgets:
        _emit(w, depth, out)
    return "\n".join(out)


def save_model(model: Model) -> str:
    """Canonical XML: `Id` first, then properties sorted by name, 2-space indent."""
    return save_widgets([model.root])


def canonical(text: str) -> str:
    return save_model(load_model(text))


def find_widget(model: Model, ident: str) -> Widget | None:
    for w in model.widgets():
        if w.id == ident:
            return w
    return None


_NAME = re.compile(r"^[A-Za-z_][\w.\-]*$")


def is_name(text: str) -> bool:
    return bool(_NAME.match(text))
