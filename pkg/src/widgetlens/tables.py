"""LR(0) automaton with prioritized multi-action entries.

Shift entries on a token class whose items carry conditions are compiled
into a `DecisionTable`: tokens whose property value matches a condition go
to the state holding the conditioned items first, and may fall back to the
``other`` state holding the unconditioned ones. Conflicts are recorded,
never resolved; reduces are kept only for lookaheads in the FOLLOW set of
their left-hand side (any other reduce can never lead to an accept).
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

from widgetlens.errors import TableError
from widgetlens.grammar import EOF_KEY, Grammar, Terminal

Item = tuple[int, int]  # (rule index, dot position)


@dataclass(frozen=True)
class DecisionTable:
    prop: str | None
    values: tuple[tuple[str, int], ...] = ()
    other: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "_map", dict(self.values))

    def targets(self, properties: dict[str, str]) -> tuple[int, ...]:
        """Successor states in exploration order for a token with `properties`."""
        if self.prop is None:
            return (self.other,)
        hit = self._map.get(properties.get(self.prop))
        if hit is None:
            return () if self.other is None else (self.other,)
        return (hit,) if self.other is None else (hit, self.other)

    def __str__(self) -> str:
        if self.prop is None:
            return f"Shift({self.other})"
        parts = [f"{v}→{s}" for v, s in self.values]
        if self.other is not None:
            parts.append(f"other→{self.other}")
        return f"Shift{{{self.prop}: {', '.join(parts)}}}"


@dataclass
class ActionEntry:
    shift: DecisionTable | None = None
    reduces: list[int] = field(default_factory=list)

    @property
    def alternatives(self) -> list:
        """Exploration order: the shift first, then reduces by rule priority."""
        return ([self.shift] if self.shift else []) + [("reduce", r) for r in self.reduces]


@dataclass
class ConflictReport:
    shift_reduce: int = 0
    reduce_reduce: int = 0


@dataclass
class ParserTables:
    grammar: Grammar
    kernels: list[tuple[Item, ...]]
    actions: list[dict[str, ActionEntry]]
    gotos: list[dict[str, int]]
    conflicts: ConflictReport
    follow: dict[str, frozenset[str]]

    def __post_init__(self) -> None:
        self.keys = frozenset(t.key for t in self.grammar.terminals) | {EOF_KEY}
        self._compile()

    @property
    def states(self) -> int:
        return len(self.kernels)

    def _compile(self) -> None:
        # Hot-path encoding: int >= 0 is a lone unconditional shift, int < 0 a
        # lone reduce of rule ~n, otherwise (DecisionTable | None, reduces).
        compiled = []
        for entries in self.actions:
            row = {}
            for key, e in entries.items():
                lone_shift = e.shift is not None and e.shift.prop is None
                if lone_shift and not e.reduces:
                    row[key] = e.shift.other
                elif e.shift is None and len(e.reduces) == 1:
                    row[key] = ~e.reduces[0]
                else:
                    row[key] = (e.shift, tuple(e.reduces))
            compiled.append(row)
        self.compiled = compiled


def _first_follow(g: Grammar) -> tuple[set[str], dict[str, set[str]], dict[str, set[str]]]:
    nullable: set[str] = set()
    first: dict[str, set[str]] = defaultdict(set)
    changed = True
    while changed:
        changed = False
        for r in g.rules:
            if r.lhs not in nullable and all(isinstance(s, str) and s in nullable for s in r.rhs):
                nullable.add(r.lhs)
                changed = True
            acc = first[r.lhs]
            before = len(acc)
            for s in r.rhs:
                if isinstance(s, Terminal):
                    acc.add(s.key)
                    break
                acc |= first[s]
                if s not in nullable:
                    break
            changed |= len(acc) != before
    follow: dict[str, set[str]] = defaultdict(set)
    follow[g.start].add(EOF_KEY)
    changed = True
    while changed:
        changed = False
        for r in g.rules:
            for i, s in enumerate(r.rhs):
                if not isinstance(s, str):
                    continue
                acc = follow[s]
                before = len(acc)
                rest_nullable = True
                for t in r.rhs[i + 1:]:
                    if isinstance(t, Terminal):
                        acc.add(t.key)
                        rest_nullable = False
                        break
                    acc |= first[t]
                    if t not in nullable:
                        rest_nullable = False
                        break
                if rest_nullable:
                    acc |= follow[r.lhs]
                changed |= len(acc) != before
    return nullable, first, follow


def build_tables(g: Grammar) -> ParserTables:
    rules = g.rules
    _, _, follow = _first_follow(g)

    def closure(kernel: tuple[Item, ...]) -> list[Item]:
        items = list(kernel)
        seen = set(items)
        added: set[str] = set()
        i = 0
        while i < len(items):
            r, dot = items[i]
            i += 1
            rhs = rules[r].rhs
            if dot < len(rhs) and isinstance(rhs[dot], str) and rhs[dot] not in added:
                added.add(rhs[dot])
                for rule in g.by_lhs[rhs[dot]]:
                    it = (rule.index, 0)
                    if it not in seen:
                        seen.add(it)
                        items.append(it)
        return items

    start = (g.start_rule.index, 0)
    kernels: list[tuple[Item, ...]] = [(start,)]
    index: dict[tuple[Item, ...], int] = {(start,): 0}
    actions: list[dict[str, ActionEntry]] = []
    gotos: list[dict[str, int]] = []

    def state_of(items: list[Item]) -> int:
        kernel = tuple(sorted(set(items)))
        if kernel not in index:
            index[kernel] = len(kernels)
            kernels.append(kernel)
        return index[kernel]

    s = 0
    while s < len(kernels):
        items = closure(kernels[s])
        by_term: dict[str, list[tuple[Terminal, Item]]] = defaultdict(list)
        by_nt: dict[str, list[Item]] = defaultdict(list)
        entries: dict[str, ActionEntry] = {}
        for r, dot in items:
            rhs = rules[r].rhs
            if dot == len(rhs):
                for key in follow[rules[r].lhs]:
                    entries.setdefault(key, ActionEntry()).reduces.append(r)
            elif isinstance(rhs[dot], Terminal):
                by_term[rhs[dot].key].append((rhs[dot], (r, dot + 1)))
            else:
                by_nt[rhs[dot]].append((r, dot + 1))
        for key, group in sorted(by_term.items()):
            entries.setdefault(key, ActionEntry()).shift = _split(s, key, group, state_of, rules)
        for e in entries.values():
            e.reduces.sort()
        actions.append(dict(sorted(entries.items())))
        gotos.append({nt: state_of(adv) for nt, adv in sorted(by_nt.items())})
        s += 1

    report = ConflictReport()
    for entries in actions:
        for e in entries.values():
            if e.shift is not None and e.reduces:
                report.shift_reduce += 1
            if len(e.reduces) > 1:
                report.reduce_reduce += 1
    return ParserTables(g, kernels, actions, gotos, report, {k: frozenset(v) for k, v in follow.items()})


def _split(state, key, group, state_of, rules) -> DecisionTable:
    plain = [adv for term, adv in group if term.cond is None]
    conditioned: dict[tuple[str, str], list[Item]] = defaultdict(list)
    for term, adv in group:
        if term.cond is not None:
            conditioned[term.cond].append(adv)
    other = state_of(plain) if plain else None
    if not conditioned:
        return DecisionTable(None, (), other)
    props = {p for p, _ in conditioned}
    if len(props) > 1:
        offenders = sorted({rules[r].label for term, (r, _) in group if term.cond is not None})
        raise TableError(
            f"multi-property split in state {state} on {key}: conditions on {sorted(props)} "
            f"from rules {offenders}"
        )
    values = tuple((v, state_of(adv)) for (_, v), adv in sorted(conditioned.items()))
    return DecisionTable(props.pop(), values, other)


def rule_name(rule) -> str:
    return str(rule) if rule.kind == "structural" else rule.label


def dump_tables(t: ParserTables) -> str:
    rules = t.grammar.rules
    c = t.conflicts
    lines = [f"# states: {t.states}; shift-reduce: {c.shift_reduce}; reduce-reduce: {c.reduce_reduce}"]
    for s, entries in enumerate(t.actions):
        for key, e in entries.items():
            alts = [str(e.shift)] if e.shift else []
            for r in e.reduces:
                alts.append("Accept" if r == t.grammar.start_rule.index else f"Reduce({rule_name(rules[r])})")
            lines.append(f"{s} / {key} → {', '.join(alts)}")
        for nt, target in t.gotos[s].items():
            lines.append(f"{s} / {nt} ⇒ {target}")
    return "\n".join(lines) + "\n"
