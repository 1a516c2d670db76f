"""Native widgets from virtual ones: the reverse reading of the bindings."""

from __future__ import annotations

from widgetlens.defs import Pattern, PatternNode, VirtualWidgetDef, eval_default
from widgetlens.errors import DefsError, SynthesisError
from widgetlens.model import AUTO_PREFIX, IdAllocator, Widget
from widgetlens.virtual import VirtualNode


def resolve_properties(definition: VirtualWidgetDef, props: dict[str, str]) -> dict[str, str]:
    """Supplied values plus defaults, evaluated in declaration order."""
    unknown = set(props) - {p.name for p in definition.properties}
    if unknown:
        raise SynthesisError(f"{definition.name} has no properties {sorted(unknown)}")
    resolved: dict[str, str] = {}
    for p in definition.properties:
        if p.name in props:
            resolved[p.name] = props[p.name]
        elif p.default is not None:
            try:
                resolved[p.name] = eval_default(p.default, {**props, **resolved})
            except DefsError as exc:
                raise SynthesisError(str(exc)) from None
        else:
            raise SynthesisError(f"{definition.name}: required property {p.name!r} is missing")
    return resolved


def align(nodes: list[PatternNode], widgets: list[Widget]) -> dict[int, object]:
    """Map each pattern node (by ``id()``) to the widget it matched.

    Repeated nodes map to the list of widgets matched by the group.
    """
    out: dict[int, object] = {}

    def level(pnodes: list[PatternNode], ws: list[Widget]) -> None:
        reps = [i for i, n in enumerate(pnodes) if n.repeated]
        if len(reps) > 1:
            raise SynthesisError("cannot align more than one Repeat group per level")
        if reps:
            r = reps[0]
            tail = len(pnodes) - r - 1
            if len(ws) < len(pnodes) - 1:
                raise SynthesisError("provenance does not match its pattern")
            out[id(pnodes[r])] = ws[r:len(ws) - tail]
            pairs = list(zip(pnodes[:r], ws[:r])) + list(zip(pnodes[r + 1:], ws[len(ws) - tail:]))
        else:
            if len(ws) != len(pnodes):
                raise SynthesisError("provenance does not match its pattern")
            pairs = list(zip(pnodes, ws))
        for n, w in pairs:
            if n.cls != w.cls:
                raise SynthesisError(f"provenance widget {w.id} ({w.cls}) does not match {n.cls}")
            out[id(n)] = w
            level(n.children, w.children)

    level(nodes, widgets)
    return out


def _synthesize(
    definition: VirtualWidgetDef,
    pattern: Pattern,
    props: dict[str, str],
    alloc: IdAllocator,
    source: Pattern | None = None,
    matched: dict[int, object] | None = None,
    repeat: int = 0,
) -> tuple[list[Widget], dict[str, str]]:
    resolved = resolve_properties(definition, props)
    source_ids = source.node_by_id() if source is not None else {}
    captured: dict[str, Widget] = {}

    def make(t: PatternNode, s: PatternNode | None) -> list[Widget]:
        if t.repeated:
            if s is not None and s.repeated:
                return [w.copy() for w in matched[id(s)]]
            single = PatternNode(t.cls, None, t.match, t.defaults, t.children)
            return [w for _ in range(repeat) for w in make(single, None)]
        old = matched.get(id(s)) if s is not None else None
        if old is not None:
            properties = dict(old.properties)
            properties.update(t.match)
            keep = old.cls == t.cls
            ident = old.id if keep else alloc.fresh(t.id or AUTO_PREFIX)
            auto = old.auto_id if keep else False
        else:
            properties = {**t.match, **t.defaults}
            ident, auto = alloc.fresh(t.id or AUTO_PREFIX), False
        w = Widget(t.cls, ident, properties, level(t.children, s.children if s is not None else None), auto)
        if t.id:
            captured[t.id] = w
        return [w]

    def level(targets: list[PatternNode], sources: list[PatternNode] | None) -> list[Widget]:
        out: list[Widget] = []
        for i, t in enumerate(targets):
            s = None
            if t.id and t.id in source_ids:
                s = source_ids[t.id]
            elif not t.id and sources is not None and i < len(sources):
                cand = sources[i]
                if not cand.id and cand.cls == t.cls and cand.repeated == t.repeated:
                    s = cand
            out.extend(make(t, s))
        return out

    widgets = level(pattern.nodes, source.nodes if source is not None else None)
    for eq in pattern.bindings:
        if eq.virtual_prop in resolved:
            captured[eq.node_id].properties[eq.native_prop] = resolved[eq.virtual_prop]
    return widgets, {cid: w.id for cid, w in captured.items()}


def instantiate(
    definition: VirtualWidgetDef,
    pattern_index: int,
    props: dict[str, str],
    alloc: IdAllocator | None = None,
    repeat: int = 0,
) -> tuple[list[Widget], dict[str, str]]:
    """Fresh native widgets for one pattern of `definition`.

    Returns the widget sequence and the capture map (pattern node id to
    widget id). Repeat groups are emitted `repeat` times (none by default).
    """
    try:
        pattern = definition.pattern(pattern_index)
    except DefsError as exc:
        raise SynthesisError(str(exc)) from None
    return _synthesize(definition, pattern, props, alloc or IdAllocator(), repeat=repeat)


def new_virtual(definition: VirtualWidgetDef, pattern_index: int, props: dict[str, str], ident: str) -> VirtualNode:
    """A virtual widget with no native counterpart yet; rendering synthesizes it."""
    definition.pattern(pattern_index)
    return VirtualNode(definition, pattern_index, dict(props), id=ident, dirty=True)


def switch_pattern(node: VirtualNode, target: int, alloc: IdAllocator) -> VirtualNode:
    """Re-synthesize `node` with another pattern, preserving native properties.

    Widgets of the target pattern with a counterpart in the current one (same
    node id, or same position and class for unnamed nodes) start from a copy
    of all the counterpart's properties, then receive the target's condition
    values and the bound virtual properties. Only widgets without a
    counterpart get ``Default.*`` values.
    """
    d = node.definition
    try:
        pattern = d.pattern(target)
    except DefsError as exc:
        raise SynthesisError(str(exc)) from None
    if node.provenance and not node.dirty:
        source = d.pattern(node.pattern)
        matched = align(source.nodes, node.provenance)
        widgets, captures = _synthesize(d, pattern, node.properties, alloc, source, matched)
    else:
        widgets, captures = _synthesize(d, pattern, node.properties, alloc)
    props = resolve_properties(d, node.properties)
    return VirtualNode(d, target, props, captures, widgets, node.id, dirty=False)


def set_virtual_property(node: VirtualNode, prop: str, value: str) -> VirtualNode:
    """Update a virtual property and push it through the bindings into the provenance."""
    d = node.definition
    if d.prop(prop) is None:
        raise SynthesisError(f"{d.name} has no property {prop!r}")
    props = {**node.properties, prop: value}
    if not node.provenance:
        return VirtualNode(d, node.pattern, props, dict(node.captures), [], node.id, dirty=True)
    provenance = [w.copy() for w in node.provenance]
    by_id = {w.id: w for top in provenance for w in top.walk()}
    for eq in d.pattern(node.pattern).bindings:
        if eq.virtual_prop == prop:
            by_id[node.captures[eq.node_id]].properties[eq.native_prop] = value
    return VirtualNode(d, node.pattern, props, dict(node.captures), provenance, node.id, node.dirty)
