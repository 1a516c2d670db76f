"""Minimal expat-backed element reader that keeps source positions."""

from __future__ import annotations

from dataclasses import dataclass, field
from xml.parsers import expat

from widgetlens.errors import ModelError


@dataclass
class Element:
    tag: str
    attrs: dict[str, str]
    line: int
    column: int
    children: list[Element] = field(default_factory=list)


def parse_xml(text: str) -> Element:
    """Parse `text` into an Element tree.

    Raises ModelError with line/column on malformed input or on
    non-whitespace character data (mixed content is not supported).
    """
    parser = expat.ParserCreate()
    parser.ordered_attributes = True
    stack: list[Element] = []
    root: list[Element] = []

    def start(tag, attrs):
        it = iter(attrs)
        mapping = {}
        for name in it:
            mapping[name] = next(it)
        el = Element(tag, mapping, parser.CurrentLineNumber, parser.CurrentColumnNumber + 1)
        if stack:
            stack[-1].children.append(el)
        else:
            root.append(el)
        stack.append(el)

    def end(tag):
        stack.pop()

    def chars(data):
        if data.strip():
            raise ModelError(
                f"unexpected text content {data.strip()[:20]!r}",
                parser.CurrentLineNumber,
                parser.CurrentColumnNumber + 1,
            )

    parser.StartElementHandler = start
    parser.EndElementHandler = end
    parser.CharacterDataHandler = chars
    try:
        parser.Parse(text, True)
    except expat.ExpatError as exc:
        raise ModelError(f"malformed XML: {expat.ErrorString(exc.code)}", exc.lineno, exc.offset + 1) from None
    return root[0]


_ESCAPES = {"&": "&amp;", "<": "&lt;", ">": "&gt;", '"': "&quot;", "\n": "&#10;", "\r": "&#13;", "\t": "&#9;"}


def quote_attr(value: str) -> str:
    return '"' + "".join(_ESCAPES.get(ch, ch) for ch in value) + '"'
