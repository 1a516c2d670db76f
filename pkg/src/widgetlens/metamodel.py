"""Native widget metamodel, model validation and the virtual extension.

Metamodel files are line oriented. Blank lines and ``#`` comments are
ignored; every other line declares one class::

    class Form container of Widget root props Title:text
    class ButtonGroup container of ButtonGroupItem props Variable:expression
    class ButtonGroupItem container of Widget props Value:enum(true|false|none)
    class Text leaf props Value:text,Style:text

Property types are ``text``, ``expression``, ``boolean`` (the literal set
``true|false``) and ``enum(v1|v2|...)``. ``Widget`` is the implicit base
class and is accepted by any container.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Iterable

from widgetlens.errors import MetamodelError
from widgetlens.model import Model, Widget

if TYPE_CHECKING:
    from widgetlens.defs import VirtualWidgetDef

BASE_CLASS = "Widget"


@dataclass(frozen=True)
class PropertyType:
    kind: str  # text | expression | boolean | enum | integer
    values: tuple[str, ...] = ()

    @property
    def is_enum(self) -> bool:
        return self.kind in ("enum", "boolean")

    def accepts(self, value: str) -> bool:
        if self.is_enum:
            return value in self.values
        if self.kind == "integer":
            return value.isdigit()
        return True

    def __str__(self) -> str:
        if self.kind == "enum":
            return f"enum({'|'.join(self.values)})"
        return self.kind


BOOLEAN = PropertyType("boolean", ("true", "false"))


@dataclass(frozen=True)
class WidgetClass:
    name: str
    kind: str  # container | leaf
    child: str | None = None
    properties: dict[str, PropertyType] = field(default_factory=dict, hash=False)
    is_root: bool = False

    @property
    def is_leaf(self) -> bool:
        return self.kind == "leaf"


@dataclass
class Metamodel:
    classes: dict[str, WidgetClass]
    root_class: str

    def __contains__(self, name: str) -> bool:
        return name in self.classes

    def __getitem__(self, name: str) -> WidgetClass:
        return self.classes[name]

    def containers(self) -> list[str]:
        return [c.name for c in self.classes.values() if not c.is_leaf]

    def relaxed(self) -> Metamodel:
        classes = {
            name: c if c.is_leaf else replace(c, child=BASE_CLASS) for name, c in self.classes.items()
        }
        return Metamodel(classes, self.root_class)


@dataclass
class VirtualClass:
    name: str
    properties: dict[str, PropertyType]


@dataclass
class VirtualMetamodel:
    base: Metamodel
    virtual_classes: dict[str, VirtualClass]


_LINE = re.compile(
    r"^class\s+(?P<name>\w+)"
    r"(?:\s+(?P<kind>leaf|container(?:\s+of\s+(?P<child>\w+))?))?"
    r"(?P<root>\s+root)?"
    r"(?:\s+props\s+(?P<props>.+))?\s*$"
)
_PROP = re.compile(r"^(?P<name>\w+):(?P<type>text|expression|boolean|integer|enum\((?P<values>[^)]*)\))$")


def _parse_type(spec: str, lineno: int) -> PropertyType:
    m = _PROP.match(spec)
    if not m:
        raise MetamodelError(f"line {lineno}: bad property declaration {spec!r}")
    kind = m.group("type")
    if kind == "boolean":
        return BOOLEAN
    if kind.startswith("enum"):
        values = tuple(v.strip() for v in m.group("values").split("|") if v.strip())
        if not values:
            raise MetamodelError(f"line {lineno}: empty enum")
        return PropertyType("enum", values)
    return PropertyType(kind)


def load_metamodel(text: str) -> Metamodel:
    classes: dict[str, WidgetClass] = {}
    roots: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if not m:
            raise MetamodelError(f"line {lineno}: cannot parse {raw.strip()!r}")
        name = m.group("name")
        if name in classes or name == BASE_CLASS:
            raise MetamodelError(f"line {lineno}: duplicate class {name!r}")
        kind = "leaf" if m.group("kind") == "leaf" else "container"
        child = None if kind == "leaf" else (m.group("child") or BASE_CLASS)
        props: dict[str, PropertyType] = {}
        for spec in (m.group("props") or "").split(","):
            spec = spec.strip()
            if not spec:
                continue
            pname = spec.split(":", 1)[0]
            if pname in props:
                raise MetamodelError(f"line {lineno}: duplicate property {pname!r} on {name}")
            if pname == "Id":
                raise MetamodelError(f"line {lineno}: property name 'Id' is reserved")
            props[pname] = _parse_type(spec, lineno)
        classes[name] = WidgetClass(name, kind, child, props, bool(m.group("root")))
        if m.group("root"):
            roots.append(name)
    for c in classes.values():
        if c.child is not None and c.child != BASE_CLASS and c.child not in classes:
            raise MetamodelError(f"class {c.name}: child constraint references unknown class {c.child!r}")
    if len(roots) != 1:
        raise MetamodelError(f"exactly one root class required, found {len(roots)}")
    if classes[roots[0]].is_leaf:
        raise MetamodelError(f"root class {roots[0]} cannot be a leaf")
    return Metamodel(classes, roots[0])


def validate_widgets(widgets: Iterable[Widget], mm: Metamodel) -> list[str]:
    """Class, containment, leaf and enum checks over whole subtrees."""
    diags: list[str] = []
    for top in widgets:
        for w in top.walk():
            wc = mm.classes.get(w.cls)
            if wc is None:
                diags.append(f"{w.id}: unknown class {w.cls}")
                continue
            if wc.is_leaf and w.children:
                diags.append(f"{w.id}: {w.cls} is a leaf but has {len(w.children)} children")
            elif wc.child not in (None, BASE_CLASS):
                for c in w.children:
                    if c.cls != wc.child:
                        diags.append(f"{c.id}: {c.cls} not allowed in {w.cls} (expects {wc.child})")
            for pname, value in w.properties.items():
                ptype = wc.properties.get(pname)
                if ptype is not None and not ptype.accepts(value):
                    diags.append(f"{w.id}: {w.cls}.{pname}={value!r} is not one of {ptype}")
    return diags


def validate_model(model: Model, mm: Metamodel) -> list[str]:
    diags = []
    if model.root.cls != mm.root_class:
        diags.append(f"{model.root.id}: root must be {mm.root_class}, found {model.root.cls}")
    return diags + validate_widgets([model.root], mm)


def extend_metamodel(mm: Metamodel, defs: list[VirtualWidgetDef]) -> VirtualMetamodel:
    virtual: dict[str, VirtualClass] = {}
    for d in defs:
        if d.name in mm.classes or d.name == BASE_CLASS:
            raise MetamodelError(f"virtual widget {d.name!r} collides with a native class")
        if d.name in virtual:
            raise MetamodelError(f"virtual widget {d.name!r} defined twice")
        props = {p.name: PropertyType(p.type) for p in d.properties}
        props["Pattern"] = PropertyType("integer")
        virtual[d.name] = VirtualClass(d.name, props)
    return VirtualMetamodel(mm.relaxed(), virtual)
