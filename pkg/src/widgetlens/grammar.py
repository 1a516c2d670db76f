"""Generation of the ambiguous widget grammar.

Terminals are tag tokens: ``<C>`` opens container ``C``, ``</C>`` closes
it, ``<C/>`` is a leaf. A terminal coming from a pattern node may carry an
equality condition (``^{Value=true}``) and a capture id (``_{t}``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from widgetlens.defs import Pattern, PatternNode, VirtualWidgetDef
from widgetlens.errors import GrammarError
from widgetlens.metamodel import VirtualMetamodel

START = "Start"
ROOT = "Root"
WIDGET_LIST = "WidgetList"
WIDGET = "Widget"
VIRTUAL = "VirtualWidget"
NATIVE = "NativeWidget"
EOF_KEY = "$"


@dataclass(frozen=True)
class Terminal:
    kind: str  # open | close | leaf
    cls: str
    cond: tuple[str, str] | None = None
    capture: str | None = None

    @property
    def key(self) -> str:
        return token_key(self.kind, self.cls)

    def __str__(self) -> str:
        text = self.key
        if self.cond:
            text += "^{%s=%s}" % self.cond
        if self.capture:
            text += "_{%s}" % self.capture
        return text


def token_key(kind: str, cls: str) -> str:
    if kind == "open":
        return f"<{cls}>"
    if kind == "close":
        return f"</{cls}>"
    return f"<{cls}/>"


@dataclass
class Rule:
    index: int
    lhs: str
    rhs: tuple
    kind: str  # pattern | list | native | structural
    label: str
    action: str
    definition: VirtualWidgetDef | None = None
    pattern: Pattern | None = None
    captures: dict[str, int] = field(default_factory=dict)
    roots: tuple[int, ...] = ()

    @property
    def priority(self) -> int:
        return self.index

    @property
    def pattern_name(self) -> str | None:
        if self.definition is None or self.pattern is None:
            return None
        return f"{self.definition.name}.{self.pattern.index}"

    def __str__(self) -> str:
        rhs = " ".join(str(s) for s in self.rhs) if self.rhs else "ε"
        return f"{self.lhs} ::= {rhs}"


@dataclass
class Grammar:
    start: str
    rules: list[Rule]
    roots: tuple[str, ...]

    def __post_init__(self) -> None:
        self.by_lhs: dict[str, list[Rule]] = {}
        for r in self.rules:
            self.by_lhs.setdefault(r.lhs, []).append(r)

    @property
    def nonterminals(self) -> list[str]:
        return list(self.by_lhs)

    @property
    def terminals(self) -> set[Terminal]:
        return {s for r in self.rules for s in r.rhs if isinstance(s, Terminal)}

    @property
    def start_rule(self) -> Rule:
        return self.by_lhs[self.start][0]

    def pattern_rules(self) -> list[Rule]:
        return [r for r in self.rules if r.kind == "pattern"]

    def native_rules(self) -> list[Rule]:
        return [r for r in self.rules if r.kind == "native"]


class _Builder:
    def __init__(self) -> None:
        self.rules: list[Rule] = []

    def add(self, lhs, rhs, kind, label, action, **extra) -> Rule:
        rule = Rule(len(self.rules), lhs, tuple(rhs), kind, label, action, **extra)
        self.rules.append(rule)
        return rule


def _linearize(
    nodes: list[PatternNode],
    out: list,
    captures: dict[str, int],
    roots: list[int] | None,
    lists: list,
    label: str,
    leaves: set[str],
) -> None:
    for node in nodes:
        if node.repeated:
            name = f"{label}#{len(lists) + 1}"
            body: list = []
            single = PatternNode(node.cls, node.id, node.match, node.defaults, node.children)
            lists.append((name, body))
            _linearize([single], body, {}, None, lists, label, leaves)
            out.append(name)
            continue
        if len(node.match) > 1:
            raise GrammarError(f"{label}: {node.cls} carries more than one condition")
        cond = next(iter(node.match.items()), None)
        if roots is not None:
            roots.append(len(out))
        if node.id:
            captures[node.id] = len(out)
        if node.cls in leaves:
            out.append(Terminal("leaf", node.cls, cond, node.id))
            continue
        out.append(Terminal("open", node.cls, cond, node.id))
        _linearize(node.children, out, captures, None, lists, label, leaves)
        out.append(Terminal("close", node.cls))


def generate_grammar(
    vmm: VirtualMetamodel, defs: list[VirtualWidgetDef], roots: list[str] | tuple[str, ...] | None = None
) -> Grammar:
    """Build the grammar; rule order is priority order (patterns, lists, natives, structure)."""
    base = vmm.base
    roots = tuple(roots) if roots else (base.root_class,)
    for r in roots:
        if r not in base.classes or base.classes[r].is_leaf:
            raise GrammarError(f"root class {r!r} must be a container class")
    leaves = {c.name for c in base.classes.values() if c.is_leaf}

    b = _Builder()
    pending_lists: list[tuple[str, list, VirtualWidgetDef, Pattern]] = []
    for d in sorted(defs, key=lambda d: d.rank):
        for pat in d.patterns:
            label = f"{d.name}.{pat.index}"
            rhs: list = []
            captures: dict[str, int] = {}
            root_pos: list[int] = []
            lists: list = []
            _linearize(pat.nodes, rhs, captures, root_pos, lists, label, leaves)
            b.add(VIRTUAL, rhs, "pattern", label, "pattern",
                  definition=d, pattern=pat, captures=captures, roots=tuple(root_pos))
            pending_lists.extend((name, body, d, pat) for name, body in lists)
    for name, body, d, pat in pending_lists:
        b.add(name, (), "list", name, "none", definition=d, pattern=pat)
        b.add(name, body + [name], "list", name, "none", definition=d, pattern=pat)
    for c in sorted(base.classes.values(), key=lambda c: c.name):
        if c.is_leaf:
            b.add(NATIVE, [Terminal("leaf", c.name)], "native", c.name, "leaf")
        else:
            b.add(NATIVE, [Terminal("open", c.name), WIDGET_LIST, Terminal("close", c.name)],
                  "native", c.name, "container")
    b.add(START, [ROOT], "structural", "structural", "unit")
    for r in roots:
        b.add(ROOT, [Terminal("open", r), WIDGET_LIST, Terminal("close", r)], "structural", "structural", "container")
    b.add(WIDGET_LIST, [], "structural", "structural", "empty")
    b.add(WIDGET_LIST, [WIDGET_LIST, WIDGET], "structural", "structural", "cons")
    if any(r.kind == "pattern" for r in b.rules):
        b.add(WIDGET, [VIRTUAL], "structural", "structural", "unit")
    b.add(WIDGET, [NATIVE], "structural", "structural", "unit")
    return Grammar(START, b.rules, roots)


def dump_grammar(g: Grammar) -> str:
    lines = [f"# start: {g.start}; roots: {', '.join(g.roots)}; rules: {len(g.rules)}"]
    for r in g.rules:
        lines.append(f"{r.priority:>4}  ({r.label})  {r}")
    return "\n".join(lines) + "\n"


# -- reading rules back ------------------------------------------------------

_SYM = re.compile(r"<(/?)([\w.]+)(/?)>(?:\^\{(\w+)=([^}]*)\})?(?:_\{(\w+)\})?|(\S+)")


def read_rules(text: str) -> dict[str, list[list]]:
    """Parse a dump back into ``label -> rhs symbol lists`` (one per rule with that label)."""
    out: dict[str, list[list]] = {}
    for line in text.splitlines():
        m = re.match(r"^\s*\d+\s+\((?P<label>[^)]*)\)\s+\S+ ::= (?P<rhs>.*)$", line)
        if not m:
            continue
        syms: list = []
        if m.group("rhs") != "ε":
            for sm in _SYM.finditer(m.group("rhs")):
                if sm.group(7):
                    syms.append(sm.group(7))
                    continue
                kind = "close" if sm.group(1) else "leaf" if sm.group(3) else "open"
                cond = (sm.group(4), sm.group(5)) if sm.group(4) else None
                syms.append(Terminal(kind, sm.group(2), cond, sm.group(6)))
        out.setdefault(m.group("label"), []).append(syms)
    return out


def pattern_shape(text: str, label: str) -> list[tuple]:
    """Rebuild the node-tree shape of a dumped pattern rule.

    Shapes are ``(cls, id, cond, repeated, children)`` tuples, matching
    `node_shape` on the original pattern nodes.
    """
    rules = read_rules(text)

    def build(syms: list) -> list[tuple]:
        stack: list[tuple] = [("", None, None, False, [])]
        for s in syms:
            if isinstance(s, str):
                body = next(r for r in rules[s] if r)[:-1]
                node = build(body)[0]
                stack[-1][4].append((node[0], node[1], node[2], True, node[4]))
            elif s.kind == "leaf":
                stack[-1][4].append((s.cls, s.capture, s.cond, False, []))
            elif s.kind == "open":
                stack.append((s.cls, s.capture, s.cond, False, []))
            else:
                done = stack.pop()
                stack[-1][4].append(done)
        return stack[0][4]

    return build(rules[label][0])


def node_shape(nodes: list[PatternNode]) -> list[tuple]:
    return [
        (n.cls, n.id, next(iter(n.match.items()), None), n.repeated, node_shape(n.children)) for n in nodes
    ]
