from __future__ import annotations

import random

from hypothesis import given, settings
from hypothesis import strategies as st

from widgetlens.corpus import random_model
from widgetlens.model import load_model, save_model
from widgetlens.parser import parse_model
from widgetlens.synthesis import new_virtual
from widgetlens.virtual import NativeNode, VirtualNode, render_native, save_virtual


def test_save_virtual_escapes_properties(form, tables):
    form.root.children[0].children[3].properties["Variable"] = 'A<"b">'
    vm, _ = parse_model(form, tables)
    assert 'Variable="A&lt;&quot;b&quot;&gt;"' in save_virtual(vm)


def test_auto_ids_stay_implicit(tables):
    m = load_model("<Form><Container><Text/></Container></Form>")
    vm, _ = parse_model(m, tables)
    assert save_virtual(vm) == "<Form>\n  <Container>\n    <Text/>\n  </Container>\n</Form>"


def test_render_unedited_is_identity(form, form_text, tables):
    vm, _ = parse_model(form, tables)
    assert save_model(render_native(vm)) == form_text.rstrip("\n")


def test_find_and_ids(form, tables):
    vm, _ = parse_model(form, tables)
    assert isinstance(vm.find("v2"), VirtualNode)
    assert isinstance(vm.find("c1"), NativeNode)
    assert vm.find("t3") is None  # hidden inside v2
    assert {"f1", "c1", "v1", "v2", "t3", "bgi2"} <= vm.ids()
    assert vm.size() == 4


def test_replace_unknown_node_raises(form, tables, engine):
    vm, _ = parse_model(form, tables)
    stray = new_virtual(engine.definition("TextInput"), 1, {"Variable": "X.y"}, "zz")
    try:
        vm.replace(stray, stray)
    except KeyError:
        pass
    else:
        raise AssertionError("replace of a foreign node must fail")


def test_dirty_node_is_synthesized_on_render(form, tables, engine):
    vm, _ = parse_model(form, tables)
    node = new_virtual(engine.definition("BooleanInput"), 2, {"Variable": "Request.Urgent"}, "v9")
    vm.root.children[0].children.append(node)
    out = save_model(render_native(vm))
    assert out.endswith(
        '    <Label Id="w1">\n      <Text Id="t2" Value="Urgent"/>\n    </Label>\n'
        '    <Switch Id="i1" Variable="Request.Urgent"/>\n  </Container>\n</Form>'
    )
    assert not node.dirty and node.captures == {"t": "t2", "i": "i1"}


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=100, deadline=None)
def test_view_properties(engine, tables, seed):
    m = random_model(random.Random(seed), engine.defs, 40)
    vm, _ = parse_model(m, tables)
    # the view never grows, and re-parsing the rendered model gives the same view
    assert vm.size() <= sum(1 for _ in m.widgets())
    again, _ = parse_model(render_native(vm), tables)
    assert save_virtual(again) == save_virtual(vm)
    if not vm.virtual_nodes():
        assert save_virtual(vm) == save_model(m)
