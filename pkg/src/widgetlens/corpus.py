"""Seeded synthetic models: random test inputs and the benchmark corpus.

Screens mix planted virtual-widget instances (synthesized, then saved as
plain native widgets without ids) with native noise. Noise modes:

``random``
    any native shape, including Label/Text prefixes that start patterns.
``prefix-free``
    no Label whose first child is a Text, so no pattern path is ever
    entered and the parser never backtracks.
``adversarial``
    long runs of Label/Text and ButtonGroup near-misses that enter
    pattern paths and then fail.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path

from widgetlens.defs import VirtualWidgetDef
from widgetlens.metamodel import Metamodel
from widgetlens.model import Model, Widget, load_model, save_model
from widgetlens.synthesis import instantiate

NOISE_MODES = ("random", "prefix-free", "adversarial")

_ENTITIES = ("Request", "Customer", "Order", "Invoice", "Ticket")
_ATTRS = ("Description", "IsApproved", "Status", "Due_date", "Amount", "ownerName", "Approved")
_WORDS = ("Name", "Total", "Owner", "Notes", "Priority", "Approved?", "Due", "Yes", "No")
_STYLES = ("input", "label-text", "form-label", "bold", "muted")
_ITEM_VALUES = ("true", "false", "none", None)


@dataclass
class BenchConfig:
    seed: int = 1
    modules: int = 200
    screens: tuple[int, int] = (2, 4)
    widgets: tuple[int, int] = (100, 600)
    ratio: float = 0.5
    noise: str = "random"
    repeats: int = 9
    drop_high: int = 2
    drop_low: int = 2

    def __post_init__(self) -> None:
        if self.modules < 1:
            raise ValueError("modules must be at least 1")
        if self.repeats <= self.drop_high + self.drop_low:
            raise ValueError("repeats must exceed drop_high + drop_low")
        if not 0.0 <= self.ratio <= 1.0:
            raise ValueError("ratio must lie in [0, 1]")
        if self.noise not in NOISE_MODES:
            raise ValueError(f"noise must be one of {NOISE_MODES}")
        for lo, hi in (self.screens, self.widgets):
            if not 1 <= lo <= hi:
                raise ValueError("ranges must satisfy 1 <= low <= high")


def count(widgets: list[Widget]) -> int:
    return sum(1 for top in widgets for _ in top.walk())


class Generator:
    """Random widget sequences under a widget budget."""

    def __init__(
        self,
        rng: random.Random,
        defs: list[VirtualWidgetDef],
        ratio: float = 0.5,
        noise: str = "random",
        styles: float = 0.3,
    ):
        self.rng = rng
        self.defs = defs
        self.ratio = ratio if defs else 0.0
        self.noise = noise
        self.styles = styles

    # -- leaves and small shapes ------------------------------------------

    def _style(self, props: dict[str, str]) -> dict[str, str]:
        if self.rng.random() < self.styles:
            props["Style"] = self.rng.choice(_STYLES)
        return props

    def variable(self) -> str:
        return f"{self.rng.choice(_ENTITIES)}.{self.rng.choice(_ATTRS)}"

    def text(self) -> Widget:
        return Widget("Text", None, self._style({"Value": self.rng.choice(_WORDS)}))

    def leaf(self) -> Widget:
        cls = self.rng.choice(("Text", "TextArea", "Checkbox", "Switch"))
        if cls == "Text":
            return self.text()
        return Widget(cls, None, self._style({"Variable": self.variable()}))

    def item(self, value: str | None, budget: int) -> Widget:
        props = {} if value is None else {"Value": value}
        children = [self.text()] if budget >= 2 and self.rng.random() < 0.9 else []
        return Widget("ButtonGroupItem", None, self._style(props), children)

    def button_group(self, budget: int, values: list[str | None] | None = None) -> Widget:
        if values is None:
            n = self.rng.randint(0, max(0, min(4, (budget - 1) // 2)))
            values = [self.rng.choice(_ITEM_VALUES) for _ in range(n)]
        items = []
        left = budget - 1
        for v in values:
            if left < 1:
                break
            items.append(self.item(v, left))
            left -= count([items[-1]])
        return Widget("ButtonGroup", None, self._style({"Variable": self.variable()}), items)

    # -- fragments --------------------------------------------------------

    def instance(self, budget: int) -> list[Widget] | None:
        d = self.rng.choice(self.defs)
        index = self.rng.randint(1, len(d.patterns))
        props = {}
        for p in d.properties:
            if p.required or self.rng.random() < 0.5:
                props[p.name] = self.variable() if p.name == "Variable" else self.rng.choice(_WORDS)
        widgets, _ = instantiate(d, index, props, repeat=self.rng.randint(0, 4))
        if count(widgets) > budget:
            return None
        for top in widgets:
            for w in top.walk():
                w.id = None
        return widgets

    def noise_fragment(self, budget: int, depth: int) -> list[Widget]:
        mode = self.noise
        if mode == "adversarial" and budget >= 4 and self.rng.random() < 0.7:
            return self.near_miss(budget)
        r = self.rng.random()
        if budget < 3 or depth > 3 or r < 0.45:
            return [self.leaf()]
        if r < 0.65:
            return [self.button_group(budget)]
        cls = "Label" if r < 0.85 else "Container"
        inner = self.sequence(self.rng.randint(1, min(budget - 1, 6)), depth + 1)
        if mode == "prefix-free" and cls == "Label" and inner and inner[0].cls == "Text":
            inner.insert(0, Widget("Checkbox", None, {"Variable": self.variable()}))
            if count(inner) > budget - 1:
                inner.pop()
        return [Widget(cls, None, self._style({}), inner)]

    def near_miss(self, budget: int) -> list[Widget]:
        """Label/Text followed by something a pattern almost accepts."""
        head = Widget("Label", None, {}, [self.text()])
        r = self.rng.random()
        if r < 0.4:
            values = ["true", "false"] + [self.rng.choice(("true", "false")) for _ in range(self.rng.randint(1, 3))]
            tail = self.button_group(budget - 2, values)
        elif r < 0.7:
            tail = Widget("Container", None, {}, [self.leaf()] if budget >= 4 else [])
        else:
            # Right item values, but an extra widget inside the last item.
            tail = self.button_group(budget - 3, ["true", "false"])
            if tail.children:
                tail.children[-1].children.append(self.leaf())
        return [head, tail]

    def sequence(self, budget: int, depth: int = 0) -> list[Widget]:
        out: list[Widget] = []
        left = budget
        while left > 0:
            frag = None
            if self.rng.random() < self.ratio:
                frag = self.instance(left)
            if frag is None:
                frag = self.noise_fragment(left, depth)
            n = count(frag)
            if n > left:
                frag = [self.leaf()]
                n = 1
            out.extend(frag)
            left -= n
        return out

    def screen(self, widgets: int) -> Model:
        """A Form of Containers holding about `widgets` widgets in total."""
        body = max(0, widgets - 1)
        containers = max(1, body // 200) if body else 0
        children = []
        left = body
        for i in range(containers):
            share = left // (containers - i)
            inner = self.sequence(share - 1) if share > 1 else []
            children.append(Widget("Container", None, {}, inner))
            left -= 1 + count(inner)
        return Model(Widget("Form", None, {}, children))


def random_model(rng: random.Random, defs: list[VirtualWidgetDef], max_widgets: int = 25) -> Model:
    """A small model with nested containers, planted instances and near-misses."""
    gen = Generator(rng, defs, ratio=0.35, noise=rng.choice(NOISE_MODES), styles=0.4)
    n = rng.randint(1, max_widgets)
    if n > 2 and rng.random() < 0.3:
        children = [Widget("Container", None, {"Style": "form-body"}, gen.sequence(n - 2))]
    else:
        children = gen.sequence(n - 1)
    root = Widget("Form", None, {"Title": "Random"} if rng.random() < 0.5 else {}, children)
    # Give some widgets explicit ids so both saved forms are exercised.
    k = 0
    for w in root.walk():
        if rng.random() < 0.3:
            k += 1
            w.id = f"x{k}"
    return load_model(save_model(Model(root)))


def _module_rng(seed: int, module: int) -> random.Random:
    return random.Random(seed * 1_000_003 + module)


def gen_corpus(config: BenchConfig, defs: list[VirtualWidgetDef], mm: Metamodel, out_dir: str | Path) -> list[Path]:
    """Write ``module_NNN/screen_MM.xml`` files; returns the module directories."""
    out = Path(out_dir)
    modules = []
    for i in range(1, config.modules + 1):
        rng = _module_rng(config.seed, i)
        gen = Generator(rng, defs, config.ratio, config.noise)
        mdir = out / f"module_{i:03d}"
        mdir.mkdir(parents=True, exist_ok=True)
        for j in range(1, rng.randint(*config.screens) + 1):
            screen = gen.screen(rng.randint(*config.widgets))
            (mdir / f"screen_{j:02d}.xml").write_text(save_model(screen) + "\n", encoding="utf-8")
        modules.append(mdir)
    return modules
