"""Sequential GLR-style parsing of native widget trees.

One parse stack is active at a time. Whenever a table entry offers more
than one alternative the untried ones are saved in a choice point; a dead
end restores the most recent choice point and tries its next alternative.
Shifts are explored before reduces and reduces by rule priority, so the
first complete parse prefers the longest, highest-priority patterns.
"""

from __future__ import annotations

from dataclasses import dataclass

from widgetlens.defs import VirtualWidgetDef
from widgetlens.errors import ParseError
from widgetlens.grammar import EOF_KEY, token_key
from widgetlens.model import IdAllocator, Model, Widget, find_widget
from widgetlens.tables import ParserTables
from widgetlens.virtual import NativeNode, VirtualModel, VirtualNode


class Token:
    __slots__ = ("kind", "cls", "key", "properties", "widget_id", "position", "widget")

    def __init__(self, kind: str, widget: Widget, position: int):
        self.kind = kind
        self.cls = widget.cls
        self.key = token_key(kind, widget.cls)
        self.properties = widget.properties
        self.widget_id = widget.id
        self.position = position
        self.widget = widget

    def __repr__(self) -> str:
        return f"Token({self.key}, {self.widget_id}, @{self.position})"


class _Eof:
    key = EOF_KEY
    properties: dict[str, str] = {}


_EOF = _Eof()


def tokenize(model: Model | Widget, leaves: set[str] | None = None) -> list[Token]:
    """Preorder tag stream: ``<C>`` children ``</C>`` for containers, ``<C/>`` for leaves.

    `leaves` names the leaf classes. Without it the root is always a
    container and any other childless widget is taken to be a leaf.
    """
    root = model.root if isinstance(model, Model) else model
    out: list[Token] = []
    stack: list[tuple[Widget, bool]] = [(root, False)]
    while stack:
        w, closing = stack.pop()
        if closing:
            out.append(Token("close", w, len(out)))
        elif (w.cls in leaves) if leaves is not None else (not w.children and w is not root):
            out.append(Token("leaf", w, len(out)))
        else:
            out.append(Token("open", w, len(out)))
            stack.append((w, True))
            stack.extend((c, False) for c in reversed(w.children))
    return out


@dataclass
class ParseStats:
    tokens: int = 0
    shifts: int = 0
    conflicts: int = 0
    backtracks: int = 0
    backtracked_tokens: int = 0

    def __iadd__(self, other: ParseStats) -> ParseStats:
        self.tokens += other.tokens
        self.shifts += other.shifts
        self.conflicts += other.conflicts
        self.backtracks += other.backtracks
        self.backtracked_tokens += other.backtracked_tokens
        return self

    @property
    def shifts_per_token(self) -> float:
        return self.shifts / self.tokens if self.tokens else 0.0

    @property
    def conflict_rate(self) -> float:
        return self.conflicts / self.tokens if self.tokens else 0.0

    @property
    def backtrack_rate(self) -> float:
        return self.backtracks / self.tokens if self.tokens else 0.0

    @property
    def tokens_per_backtrack(self) -> float | None:
        return self.backtracked_tokens / self.backtracks if self.backtracks else None

    def lines(self) -> list[str]:
        per_bt = self.tokens_per_backtrack
        rows = [
            ("Total input token count", str(self.tokens)),
            ("Shift operations count", str(self.shifts)),
            ("Total conflict count", str(self.conflicts)),
            ("Backtracking operations count", str(self.backtracks)),
            ("Total backtracked tokens", str(self.backtracked_tokens)),
            ("Average shift operations per input token", f"{self.shifts_per_token:.3f}"),
            ("Conflict rate per input token", f"{100 * self.conflict_rate:.2f}%"),
            ("Backtracking rate per input token", f"{100 * self.backtrack_rate:.2f}%"),
            ("Average backtracked tokens per backtracking operation", "n/a" if per_bt is None else f"{per_bt:.3f}"),
        ]
        return [f"{label:<54} {value:>10}" for label, value in rows]

    def format(self) -> str:
        return "\n".join(self.lines())


# Semantic action codes, indexed by Rule.action.
_ACTIONS = {"unit": 0, "container": 1, "leaf": 2, "empty": 3, "cons": 4, "pattern": 5, "none": 6}


def _drive(tokens: list[Token], tables: ParserTables) -> tuple[object, ParseStats]:
    """Run the automaton; returns the raw derivation value of the start symbol."""
    rules = tables.grammar.rules
    rlen = [len(r.rhs) for r in rules]
    rlhs = [r.lhs for r in rules]
    ract = [_ACTIONS[r.action] for r in rules]
    accept_rule = tables.grammar.start_rule.index
    acts = tables.compiled
    gotos = tables.gotos

    n = len(tokens)
    shifts = conflicts = backtracks = backtracked = 0
    stack: tuple = (0, None, None)
    pos = 0
    choices: list[list] = []
    tok = tokens[0] if n else _EOF

    while True:
        e = acts[stack[0]].get(tok.key)
        if e is None:
            a = None
        elif e.__class__ is int:
            a = e
        else:
            dt, reds = e
            alts = list(dt.targets(tok.properties)) if dt is not None else []
            alts.extend(~r for r in reds)
            if not alts:
                a = None
            else:
                a = alts[0]
                if len(alts) > 1:
                    choices.append([stack, pos, alts, 1])
                    conflicts += 1
        if a is None:
            if not choices:
                raise ParseError(f"no parse: unexpected {tok.key} at token {pos}")
            cp = choices[-1]
            backtracks += 1
            backtracked += pos - cp[1]
            stack, pos, alts, i = cp
            a = alts[i]
            if i + 1 == len(alts):
                choices.pop()
            else:
                cp[3] = i + 1
            tok = tokens[pos] if pos < n else _EOF
        if a >= 0:
            stack = (a, tok, stack)
            pos += 1
            shifts += 1
            tok = tokens[pos] if pos < n else _EOF
            continue
        r = ~a
        k = rlen[r]
        code = ract[r]
        if k == 0:
            value = None
        elif k == 1:
            value = stack[1]
            if code == 2:
                value = ("N", value, None)
            elif code == 5:
                value = ("V", r, [value])
            stack = stack[2]
        else:
            vals = [None] * k
            s = stack
            for j in range(k - 1, -1, -1):
                vals[j] = s[1]
                s = s[2]
            stack = s
            if code == 1:
                value = ("N", vals[0], vals[1])
            elif code == 4:
                value = (vals[0], vals[1])
            elif code == 5:
                value = ("V", r, vals)
            else:
                value = None
        if r == accept_rule:
            # FOLLOW(Start) is {$}, so this reduce only happens at end of input.
            return value, ParseStats(n, shifts, conflicts, backtracks, backtracked)
        target = gotos[stack[0]].get(rlhs[r])
        stack = (target, value, stack)


def _check_tokens(tokens: list[Token], tables: ParserTables) -> None:
    for t in tokens:
        if t.key not in tables.keys:
            raise ParseError(f"token {t.key} (widget {t.widget_id}) is unknown to the parser tables")


def parse(
    tokens: list[Token], tables: ParserTables, defs: list[VirtualWidgetDef] | None = None
) -> tuple[VirtualModel, ParseStats]:
    _check_tokens(tokens, tables)
    value, stats = _drive(tokens, tables)
    return build_virtual(value, tables), stats


def parse_model(model: Model, tables: ParserTables, defs=None) -> tuple[VirtualModel, ParseStats]:
    vm, stats = parse(tokenize(model, tables_leaves(tables)), tables, defs)
    vm.source_uri = model.source_uri
    return vm, stats


def tables_leaves(tables: ParserTables) -> set[str]:
    return {t.cls for t in tables.grammar.terminals if t.kind == "leaf"}


def parse_subtree(
    model: Model, ident: str, tables: ParserTables, defs=None
) -> tuple[VirtualModel, ParseStats]:
    w = find_widget(model, ident)
    if w is None:
        raise ParseError(f"no widget with id {ident!r}")
    if w.cls not in tables.grammar.roots:
        raise ParseError(
            f"{w.cls} is not a permitted parse root (tables allow {', '.join(tables.grammar.roots)})"
        )
    vm, stats = parse(tokenize(w, tables_leaves(tables)), tables, defs)
    vm.source_uri = model.source_uri
    return vm, stats


def build_virtual(value, tables: ParserTables) -> VirtualModel:
    """Run the semantic actions over the accepted derivation."""
    rules = tables.grammar.rules
    pending: list[VirtualNode] = []
    used: set[str] = set()

    def cons_items(cell) -> list:
        items = []
        while cell is not None:
            cell, item = cell
            items.append(item)
        items.reverse()
        return items

    def build(v):
        if v[0] == "N":
            tok = v[1]
            used.add(tok.widget_id)
            return NativeNode(tok.widget, [build(c) for c in cons_items(v[2])])
        rule = rules[v[1]]
        vals = v[2]
        captures = {cid: vals[i].widget_id for cid, i in rule.captures.items()}
        provenance = [vals[i].widget for i in rule.roots]
        props: dict[str, str] = {}
        for eq in rule.pattern.bindings:
            w = vals[rule.captures[eq.node_id]].widget
            if eq.native_prop in w.properties:
                props[eq.virtual_prop] = w.properties[eq.native_prop]
        node = VirtualNode(rule.definition, rule.pattern.index, props, captures, provenance)
        used.update(x.id for top in provenance for x in top.walk())
        pending.append(node)
        return node

    root = build(value)
    alloc = IdAllocator(used)
    for node in pending:
        node.id = alloc.fresh("v")
    return VirtualModel(root)
