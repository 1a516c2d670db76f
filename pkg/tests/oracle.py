"""Exhaustive derivation enumerator, independent of the LR machinery.

Every derivation of the token stream under the generated grammar is built
by plain span recursion (no tables, no priorities). Each derivation is
summarized as a signature that can be compared with a parsed virtual model,
and ranked by the priority order the parser is meant to implement: at the
earliest widget where two derivations differ, a pattern beats a native
widget, a longer pattern beats a shorter one, and then rule priority wins.
"""

from __future__ import annotations

from functools import lru_cache

from widgetlens.grammar import Grammar, Terminal
from widgetlens.parser import Token
from widgetlens.virtual import NativeNode, VirtualModel, VirtualNode


class TooManyDerivations(Exception):
    pass


class Oracle:
    def __init__(self, grammar: Grammar, tokens: list[Token], limit: int = 200_000):
        self.g = grammar
        self.toks = tokens
        self.limit = limit
        depth = [0]
        for t in tokens:
            depth.append(depth[-1] + (1 if t.kind == "open" else -1 if t.kind == "close" else 0))
        self.depth = depth

    def _balanced(self, i: int, j: int) -> bool:
        d = self.depth
        return d[i] == d[j] and min(d[i:j + 1]) >= d[i]

    def _match(self, term: Terminal, i: int) -> bool:
        if i >= len(self.toks):
            return False
        tok = self.toks[i]
        if tok.key != term.key:
            return False
        return term.cond is None or tok.properties.get(term.cond[0]) == term.cond[1]

    def derivations(self) -> list[tuple]:
        """All derivation trees ``(rule, children, i, j)`` of the whole input."""
        g = self.g
        in_progress: set = set()
        count = [0]

        @lru_cache(maxsize=None)
        def derive(sym: str, i: int, j: int) -> tuple:
            if (sym, i, j) in in_progress:
                raise AssertionError(f"cyclic derivation of {sym} over {i}..{j}")
            in_progress.add((sym, i, j))
            out = []
            for rule in g.by_lhs.get(sym, []):
                for kids in seq(rule.index, 0, i, j):
                    out.append((rule.index, kids, i, j))
            in_progress.discard((sym, i, j))
            count[0] += len(out)
            if count[0] > self.limit:
                raise TooManyDerivations(count[0])
            return tuple(out)

        @lru_cache(maxsize=None)
        def seq(r: int, k: int, i: int, j: int) -> tuple:
            rhs = g.rules[r].rhs
            if k == len(rhs):
                return ((),) if i == j else ()
            sym = rhs[k]
            if isinstance(sym, Terminal):
                if not self._match(sym, i):
                    return ()
                return tuple((("T", self.toks[i]),) + rest for rest in seq(r, k + 1, i + 1, j))
            out = []
            ends = [j] if k == len(rhs) - 1 else range(i, j + 1)
            for p in ends:
                if not self._balanced(i, p):
                    continue
                rests = seq(r, k + 1, p, j)
                if not rests:
                    continue
                for tree in derive(sym, i, p):
                    out.extend((tree,) + rest for rest in rests)
            return tuple(out)

        return list(derive(g.start, 0, len(self.toks)))

    # -- summaries ----------------------------------------------------------

    def _widgets(self, tree) -> list[tuple]:
        """Widget-level nodes (pattern or native rule) below `tree`, in order."""
        out: list = []
        stack = [tree]
        while stack:
            node = stack.pop()
            if node[0] == "T":
                continue
            rule = self.g.rules[node[0]]
            if rule.kind in ("pattern", "native"):
                out.append(node)
            else:
                stack.extend(reversed(node[1]))
        return out

    def signature(self, tree) -> tuple:
        """Comparable summary; `model_signature` computes the same from a parse."""
        rule = self.g.rules[tree[0]]
        if rule.kind == "structural":  # Start / Root
            if rule.lhs == "Start":
                return self.signature(tree[1][0])
            open_tok = tree[1][0][1]
            return ("N", open_tok.widget_id, tuple(self.signature(w) for w in self._widgets(tree[1][1])))
        _, kids, i, j = tree
        if rule.kind == "native":
            tok = kids[0][1]
            inner = kids[1] if len(kids) == 3 else None
            children = tuple(self.signature(w) for w in self._widgets(inner)) if inner else ()
            return ("N", tok.widget_id, children)
        ids = tuple(t.widget_id for t in self.toks[i:j] if t.kind != "close")
        captures = tuple(sorted((cid, kids[pos][1].widget_id) for cid, pos in rule.captures.items()))
        return ("V", rule.definition.name, rule.pattern.index, ids, captures)

    def key(self, tree) -> tuple:
        """Priority key; smaller is preferred."""
        out = []
        for node in self._preorder_widgets(tree):
            rule = self.g.rules[node[0]]
            _, _, i, j = node
            rank = (0, -(j - i), rule.priority) if rule.kind == "pattern" else (1,)
            out.append((i, rank))
        return tuple(out)

    def _preorder_widgets(self, tree) -> list:
        out = []
        stack = [tree]
        while stack:
            node = stack.pop()
            if node[0] == "T":
                continue
            rule = self.g.rules[node[0]]
            if rule.kind == "pattern":
                out.append(node)
                continue
            if rule.kind == "native":
                out.append(node)
            stack.extend(reversed(node[1]))
        return out

    def best(self) -> tuple:
        trees = self.derivations()
        return min(trees, key=self.key)


def model_signature(vm: VirtualModel) -> tuple:
    def sig(node) -> tuple:
        if isinstance(node, VirtualNode):
            ids = tuple(w.id for top in node.provenance for w in top.walk())
            return ("V", node.name, node.pattern, ids, tuple(sorted(node.captures.items())))
        assert isinstance(node, NativeNode)
        return ("N", node.id, tuple(sig(c) for c in node.children))

    return sig(vm.root)
