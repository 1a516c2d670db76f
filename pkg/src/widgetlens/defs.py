"""Virtual widget definitions.

A definition file looks like::

    <VirtualWidget Name="BooleanInput">
      <Property Name="Variable" Type="expression"/>
      <Property Name="Label" Type="string" Default="GetLabelFor(Variable)"/>
      <Pattern>
        <Bind Prop="Variable" To="i.Variable"/>
        <Bind Prop="Label" To="t.Value"/>
        <Label>
          <Text Id="t"/>
        </Label>
        <Checkbox Id="i"/>
      </Pattern>
    </VirtualWidget>

Inside a pattern, ``Id`` names a node for bindings, ``Default.<Prop>``
attributes are used only when synthesizing, ``Repeat="true"`` turns a node
(with its subtree) into a zero-or-more group, and every other attribute is
an equality condition the native widget must satisfy.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Union

from widgetlens._xml import Element, parse_xml
from widgetlens.errors import DefsError, ModelError
from widgetlens.metamodel import BASE_CLASS, Metamodel

PROPERTY_TYPES = ("expression", "string")


# -- default expressions -----------------------------------------------------


@dataclass(frozen=True)
class Literal:
    value: str

    def __str__(self) -> str:
        return repr(self.value)


@dataclass(frozen=True)
class PropRef:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Call:
    func: str
    arg: PropRef

    def __str__(self) -> str:
        return f"{self.func}({self.arg})"


DefaultExpr = Union[Literal, PropRef, Call]

FUNCTIONS = ("GetLabelFor",)
_CALL = re.compile(r"^(\w+)\(\s*(\w+)\s*\)$")


def parse_default(text: str) -> DefaultExpr:
    text = text.strip()
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "'\"":
        return Literal(text[1:-1])
    m = _CALL.match(text)
    if m:
        if m.group(1) not in FUNCTIONS:
            raise DefsError(f"unknown function {m.group(1)!r} in default {text!r}")
        return Call(m.group(1), PropRef(m.group(2)))
    if re.match(r"^\w+$", text):
        return PropRef(text)
    raise DefsError(f"cannot parse default expression {text!r}")


_CAMEL = re.compile(r"(?<=[a-z])(?=[A-Z])")


def humanize(expression: str) -> str:
    """Readable label for a model expression: ``Request.IsApproved`` -> ``Is approved``."""
    tail = expression.rsplit(".", 1)[-1]
    words = [w.lower() for part in tail.split("_") for w in _CAMEL.split(part) if w]
    if not words:
        return ""
    words[0] = words[0].capitalize()
    return " ".join(words)


def eval_default(expr: DefaultExpr, resolved: dict[str, str]) -> str:
    if isinstance(expr, Literal):
        return expr.value
    ref = expr if isinstance(expr, PropRef) else expr.arg
    if ref.name not in resolved:
        raise DefsError(f"default expression {expr} references unresolved property {ref.name!r}")
    value = resolved[ref.name]
    if isinstance(expr, Call):
        return humanize(value)
    return value


def expr_refs(expr: DefaultExpr) -> list[str]:
    if isinstance(expr, PropRef):
        return [expr.name]
    if isinstance(expr, Call):
        return [expr.arg.name]
    return []


# -- definitions -------------------------------------------------------------


@dataclass
class PropertyDecl:
    name: str
    type: str
    default: DefaultExpr | None = None

    @property
    def required(self) -> bool:
        return self.default is None


@dataclass
class PatternNode:
    cls: str
    id: str | None = None
    match: dict[str, str] = field(default_factory=dict)
    defaults: dict[str, str] = field(default_factory=dict)
    children: list[PatternNode] = field(default_factory=list)
    repeated: bool = False
    line: int = 0

    def walk(self) -> Iterable[PatternNode]:
        yield self
        for c in self.children:
            yield from c.walk()


@dataclass(frozen=True)
class Equation:
    virtual_prop: str
    node_id: str
    native_prop: str

    def __str__(self) -> str:
        return f"{self.virtual_prop} = {self.node_id}.{self.native_prop}"


@dataclass
class Pattern:
    index: int
    nodes: list[PatternNode]
    bindings: list[Equation]

    def walk(self) -> Iterable[PatternNode]:
        for n in self.nodes:
            yield from n.walk()

    def node_by_id(self) -> dict[str, PatternNode]:
        return {n.id: n for n in self.walk() if n.id}


@dataclass
class VirtualWidgetDef:
    name: str
    properties: list[PropertyDecl]
    patterns: list[Pattern]
    rank: int = 0
    source: str | None = None

    def prop(self, name: str) -> PropertyDecl | None:
        for p in self.properties:
            if p.name == name:
                return p
        return None

    def pattern(self, index: int) -> Pattern:
        if not 1 <= index <= len(self.patterns):
            raise DefsError(f"{self.name} has no pattern #{index} (1..{len(self.patterns)})")
        return self.patterns[index - 1]


def _where(source: str | None, el: Element) -> str:
    return f"{source or '<defs>'}:{el.line}"


def _pattern_node(el: Element, source: str | None) -> PatternNode:
    node = PatternNode(el.tag, line=el.line)
    for name, value in el.attrs.items():
        if name == "Id":
            node.id = value
        elif name == "Repeat":
            if value not in ("true", "false"):
                raise DefsError(f"{_where(source, el)}: Repeat must be true or false")
            node.repeated = value == "true"
        elif name.startswith("Default."):
            node.defaults[name[len("Default."):]] = value
        else:
            node.match[name] = value
    node.children = [_pattern_node(c, source) for c in el.children]
    return node


def _parse_def(text: str, source: str | None) -> VirtualWidgetDef:
    try:
        root = parse_xml(text)
    except ModelError as exc:
        raise DefsError(f"{source or '<defs>'}: {exc}") from None
    if root.tag != "VirtualWidget" or "Name" not in root.attrs:
        raise DefsError(f"{_where(source, root)}: expected <VirtualWidget Name=...>")
    d = VirtualWidgetDef(root.attrs["Name"], [], [], source=source)
    for el in root.children:
        if el.tag == "Property":
            if "Name" not in el.attrs:
                raise DefsError(f"{_where(source, el)}: Property without Name")
            ptype = el.attrs.get("Type", "string")
            if ptype not in PROPERTY_TYPES:
                raise DefsError(f"{_where(source, el)}: property type must be one of {PROPERTY_TYPES}")
            default = el.attrs.get("Default")
            try:
                expr = parse_default(default) if default is not None else None
            except DefsError as exc:
                raise DefsError(f"{_where(source, el)}: {exc}") from None
            d.properties.append(PropertyDecl(el.attrs["Name"], ptype, expr))
        elif el.tag == "Pattern":
            bindings, nodes = [], []
            for child in el.children:
                if child.tag == "Bind":
                    target = child.attrs.get("To", "")
                    if "Prop" not in child.attrs or target.count(".") != 1:
                        raise DefsError(f"{_where(source, child)}: Bind needs Prop and To=\"node.Property\"")
                    node_id, native = target.split(".")
                    if nodes:
                        raise DefsError(f"{_where(source, child)}: Bind must precede the pattern tree")
                    bindings.append(Equation(child.attrs["Prop"], node_id, native))
                else:
                    nodes.append(_pattern_node(child, source))
            d.patterns.append(Pattern(len(d.patterns) + 1, nodes, bindings))
        else:
            raise DefsError(f"{_where(source, el)}: unexpected element <{el.tag}>")
    return d


def load_defs(paths: str | Path | Iterable[str | Path]) -> list[VirtualWidgetDef]:
    """Load definitions from a directory (``*.xml`` by file name) or explicit files.

    Priority rank follows load order.
    """
    if isinstance(paths, (str, Path)):
        p = Path(paths)
        files = sorted(p.glob("*.xml")) if p.is_dir() else [p]
    else:
        files = [Path(x) for x in paths]
    defs = [_parse_def(f.read_text(encoding="utf-8"), str(f)) for f in files]
    for rank, d in enumerate(defs):
        d.rank = rank
    return defs


def loads_defs(texts: Iterable[str]) -> list[VirtualWidgetDef]:
    defs = [_parse_def(t, None) for t in texts]
    for rank, d in enumerate(defs):
        d.rank = rank
    return defs


def validate_defs(defs: list[VirtualWidgetDef], mm: Metamodel) -> list[str]:
    diags: list[str] = []
    seen_names: set[str] = set()
    for d in defs:
        where = d.name
        if d.name in seen_names:
            diags.append(f"{where}: defined more than once")
        seen_names.add(d.name)
        if d.name in mm.classes:
            diags.append(f"{where}: name collides with native class")
        if not d.patterns:
            diags.append(f"{where}: at least one pattern is required")
        declared = [p.name for p in d.properties]
        if len(set(declared)) != len(declared):
            diags.append(f"{where}: duplicate property declarations")
        if "Pattern" in declared:
            diags.append(f"{where}: 'Pattern' is a reserved property name")
        for i, p in enumerate(d.properties):
            for ref in expr_refs(p.default) if p.default else []:
                target = d.prop(ref)
                if target is None:
                    diags.append(f"{where}.{p.name}: default references undeclared property {ref!r}")
                elif target is p:
                    diags.append(f"{where}.{p.name}: default references itself")
                elif target.default is not None and declared.index(ref) > i:
                    diags.append(f"{where}.{p.name}: default references later defaulted property {ref!r}")
        for pat in d.patterns:
            diags.extend(_validate_pattern(d, pat, mm))
    return diags


def _validate_pattern(d: VirtualWidgetDef, pat: Pattern, mm: Metamodel) -> list[str]:
    where = f"{d.name}.{pat.index}"
    diags: list[str] = []
    if not pat.nodes:
        diags.append(f"{where}: empty pattern")
    ids: dict[str, PatternNode] = {}
    for n in pat.walk():
        if n.id:
            if n.id in ids:
                diags.append(f"{where}: node id {n.id!r} used twice")
            ids[n.id] = n

    def check(node: PatternNode, parent: PatternNode | None, in_repeat: bool) -> None:
        wc = mm.classes.get(node.cls)
        if wc is None:
            diags.append(f"{where}: unknown class {node.cls} (line {node.line})")
            return
        if parent is None and node.repeated:
            diags.append(f"{where}: Repeat is only allowed below a pattern node, not on {node.cls}")
        if node.repeated and in_repeat:
            diags.append(f"{where}: nested Repeat groups are not supported ({node.cls})")
        if (in_repeat or node.repeated) and node.id:
            diags.append(f"{where}: node id {node.id!r} inside a Repeat group cannot be bound")
        if len(node.match) > 1:
            diags.append(f"{where}: {node.cls} carries more than one condition")
        if sum(c.repeated for c in node.children) > 1:
            diags.append(f"{where}: at most one Repeat group per child list ({node.cls})")
        if wc.is_leaf and node.children:
            diags.append(f"{where}: {node.cls} is a leaf")
        for c in node.children:
            if wc.child not in (None, BASE_CLASS) and c.cls != wc.child:
                diags.append(f"{where}: {c.cls} not allowed in {node.cls} (expects {wc.child})")
        overlap = set(node.match) & set(node.defaults)
        if overlap:
            diags.append(f"{where}: {node.cls} has both condition and default for {sorted(overlap)}")
        for pname, value in node.match.items():
            ptype = wc.properties.get(pname)
            if ptype is None:
                diags.append(f"{where}: {node.cls} has no property {pname!r}")
            elif not ptype.is_enum:
                diags.append(
                    f"{where}: condition on {node.cls}.{pname} ({ptype}) - conditions are restricted "
                    f"to enumeration-typed properties"
                )
            elif not ptype.accepts(value):
                diags.append(f"{where}: {node.cls}.{pname}={value!r} is not one of {ptype}")
        for pname, value in node.defaults.items():
            ptype = wc.properties.get(pname)
            if ptype is None:
                diags.append(f"{where}: {node.cls} has no property {pname!r} for Default")
            elif not ptype.accepts(value):
                diags.append(f"{where}: default {node.cls}.{pname}={value!r} is not one of {ptype}")
        for c in node.children:
            check(c, node, in_repeat or node.repeated)

    for n in pat.nodes:
        check(n, None, False)

    bound: set[str] = set()
    for eq in pat.bindings:
        if d.prop(eq.virtual_prop) is None:
            diags.append(f"{where}: binding for undeclared property {eq.virtual_prop!r}")
        if eq.virtual_prop in bound:
            diags.append(f"{where}: property {eq.virtual_prop!r} bound twice")
        bound.add(eq.virtual_prop)
        node = ids.get(eq.node_id)
        if node is None:
            diags.append(f"{where}: binding {eq} refers to unknown node {eq.node_id!r}")
            continue
        if eq.native_prop in node.match:
            diags.append(f"{where}: binding {eq} targets a matched property")
        wc = mm.classes.get(node.cls)
        if wc is not None and eq.native_prop not in wc.properties:
            diags.append(f"{where}: {node.cls} has no property {eq.native_prop!r}")
    for p in d.properties:
        if p.required and p.name not in bound:
            diags.append(f"{where}: required property {p.name!r} is not bound")
    return diags
