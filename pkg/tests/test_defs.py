from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from widgetlens.defs import (
    Call,
    Literal,
    PropRef,
    eval_default,
    humanize,
    load_defs,
    loads_defs,
    parse_default,
    validate_defs,
)
from widgetlens.engine import fixture_path
from widgetlens.errors import DefsError

HEAD = """<VirtualWidget Name="W">
  <Property Name="Variable" Type="expression"/>
  <Property Name="Label" Type="string" Default="GetLabelFor(Variable)"/>
  <Pattern>
"""
TAIL = """
  </Pattern>
</VirtualWidget>"""


def one(body: str, head: str = HEAD):
    return loads_defs([head + body + TAIL])


def diags_for(body: str, mm, head: str = HEAD) -> list[str]:
    return validate_defs(one(body, head), mm)


GOOD = """    <Bind Prop="Variable" To="i.Variable"/>
    <Label><Text Id="t"/></Label>
    <Checkbox Id="i"/>"""


# -- loading -------------------------------------------------------------------


def test_fixture_boolean_input(defs_by_name):
    d = defs_by_name["BooleanInput"]
    assert [p.name for p in d.properties] == ["Variable", "Label"]
    assert d.prop("Label").default == Call("GetLabelFor", PropRef("Variable"))
    assert d.prop("Variable").required and not d.prop("Label").required
    assert [p.index for p in d.patterns] == [1, 2, 3]
    assert all(len(p.bindings) == 2 for p in d.patterns)
    assert [str(e) for e in d.patterns[0].bindings] == ["Variable = i.Variable", "Label = t.Value"]


def test_fixture_pattern_three_tree(defs_by_name):
    (label, group) = defs_by_name["BooleanInput"].pattern(3).nodes
    assert label.cls == "Label" and label.children[0].id == "t"
    assert group.id == "i"
    items = group.children
    assert [i.match for i in items] == [{"Value": "true"}, {"Value": "false"}]
    assert [i.children[0].defaults for i in items] == [{"Value": "Yes"}, {"Value": "No"}]


def test_fixture_enum_input_repeat(defs_by_name):
    (_, group) = defs_by_name["EnumInput"].pattern(1).nodes
    assert group.children[0].repeated and group.children[0].cls == "ButtonGroupItem"


def test_ranks_follow_file_order(engine):
    assert [(d.name, d.rank) for d in engine.defs] == [("TextInput", 0), ("BooleanInput", 1), ("EnumInput", 2)]
    again = load_defs(fixture_path("defs"))
    assert [(d.name, d.rank) for d in again] == [(d.name, d.rank) for d in engine.defs]


def test_missing_binding_still_loads():
    (d,) = one('    <Label><Text Id="t"/></Label>')
    assert d.patterns[0].bindings == []


def test_empty_directory(tmp_path):
    assert load_defs(tmp_path) == []


def test_explicit_file_list(tmp_path):
    a = tmp_path / "b.xml"
    a.write_text(HEAD + GOOD + TAIL)
    (d,) = load_defs([a])
    assert d.name == "W" and d.source == str(a)


@pytest.mark.parametrize(
    "text, message",
    [
        ("<Widget/>", "expected <VirtualWidget"),
        ('<VirtualWidget Name="W"><Property/></VirtualWidget>', "Property without Name"),
        ('<VirtualWidget Name="W"><Property Name="a" Type="int"/></VirtualWidget>', "property type"),
        ('<VirtualWidget Name="W"><Property Name="a" Default="f(x)"/></VirtualWidget>', "unknown function"),
        ('<VirtualWidget Name="W"><Pattern><Bind Prop="a" To="x"/></Pattern></VirtualWidget>', "Bind needs"),
        ('<VirtualWidget Name="W"><Pattern><Text/><Bind Prop="a" To="x.y"/></Pattern></VirtualWidget>', "precede"),
        ('<VirtualWidget Name="W"><Pattern><Text Repeat="yes"/></Pattern></VirtualWidget>', "Repeat must"),
        ('<VirtualWidget Name="W"><Other/></VirtualWidget>', "unexpected element"),
        ('<VirtualWidget Name="W">', "malformed"),
    ],
)
def test_syntax_errors(text, message):
    with pytest.raises(DefsError, match=message):
        loads_defs([text])


def test_syntax_error_has_location(tmp_path):
    f = tmp_path / "x.xml"
    f.write_text('<VirtualWidget Name="W">\n  <Pattern>\n    <Text Repeat="1"/>\n  </Pattern>\n</VirtualWidget>')
    with pytest.raises(DefsError, match=r"x\.xml:3"):
        load_defs(f)


# -- validation ----------------------------------------------------------------


def test_fixture_defs_are_valid(engine):
    assert validate_defs(engine.defs, engine.mm) == []


def test_good_def_is_valid(engine):
    assert diags_for(GOOD, engine.mm) == []


@pytest.mark.parametrize(
    "body, fragment",
    [
        ('<Bind Prop="Variable" To="x.Variable"/><Checkbox Id="i"/>', "unknown node 'x'"),
        ('<Label><Text Id="t"/></Label><Checkbox Id="i"/>', "required property 'Variable' is not bound"),
        ('<Bind Prop="Variable" To="i.Variable"/><Bind Prop="Variable" To="i.Variable"/><Checkbox Id="i"/>',
         "bound twice"),
        ('<Bind Prop="Nope" To="i.Variable"/><Bind Prop="Variable" To="i.Variable"/><Checkbox Id="i"/>',
         "undeclared property 'Nope'"),
        ('<Bind Prop="Variable" To="i.Colour"/><Checkbox Id="i"/>', "Checkbox has no property 'Colour'"),
        ('<Bind Prop="Variable" To="i.Variable"/><Blob Id="i"/>', "unknown class Blob"),
        ('<Bind Prop="Variable" To="i.Variable"/><Checkbox Id="i"/><Text Id="i"/>', "used twice"),
        ('<Bind Prop="Variable" To="i.Variable"/><Checkbox Id="i"><Text/></Checkbox>', "Checkbox is a leaf"),
        ('<Bind Prop="Variable" To="i.Variable"/><ButtonGroup Id="i"><Text/></ButtonGroup>',
         "Text not allowed in ButtonGroup"),
        ('<Bind Prop="Variable" To="i.Variable"/><Checkbox Id="i" Repeat="true"/>', "Repeat is only allowed"),
        ('<Bind Prop="Variable" To="i.Variable"/><ButtonGroup Id="i"><ButtonGroupItem Repeat="true">'
         '<Label Repeat="true"/></ButtonGroupItem></ButtonGroup>', "nested Repeat"),
        ('<Bind Prop="Variable" To="i.Variable"/><ButtonGroup><ButtonGroupItem Repeat="true">'
         '<Checkbox Id="i"/></ButtonGroupItem></ButtonGroup>', "inside a Repeat group"),
        ('<Bind Prop="Variable" To="i.Variable"/><ButtonGroup Id="i"><ButtonGroupItem Repeat="true"/>'
         '<ButtonGroupItem Repeat="true"/></ButtonGroup>', "at most one Repeat group"),
        ('<Bind Prop="Variable" To="i.Variable"/><ButtonGroup Id="i"><ButtonGroupItem Value="maybe"/>'
         '</ButtonGroup>', "is not one of enum"),
        ('<Bind Prop="Variable" To="i.Variable"/><ButtonGroup Id="i"><ButtonGroupItem Value="true" '
         'Style="x"/></ButtonGroup>', "conditions are restricted to enumeration-typed properties"),
        ('<Bind Prop="Variable" To="i.Variable"/><Checkbox Id="i" Variable="x"/>', "targets a matched property"),
        ('<Bind Prop="Variable" To="i.Variable"/><Checkbox Id="i" Style="a" Default.Style="b"/>',
         "both condition and default"),
        ('<Bind Prop="Variable" To="i.Variable"/><Checkbox Id="i" Default.Colour="b"/>', "for Default"),
        ("", "empty pattern"),
    ],
)
def test_pattern_diagnostics(engine, body, fragment):
    diags = diags_for(body, engine.mm)
    assert any(fragment in d for d in diags), diags


def test_condition_on_free_text_value_cites_enum_restriction(engine):
    body = '<Bind Prop="Variable" To="t.Value"/><Label><Text Id="t" Value="Yes"/></Label>'
    diags = diags_for(body, engine.mm)
    assert diags == [
        "W.1: condition on Text.Value (text) - conditions are restricted to enumeration-typed properties",
        "W.1: binding Variable = t.Value targets a matched property",
    ]


def test_two_conditions_on_one_node(engine):
    body = ('<Bind Prop="Variable" To="i.Variable"/><ButtonGroup Id="i">'
            '<ButtonGroupItem Value="true" Other="x"/></ButtonGroup>')
    assert any("more than one condition" in d for d in diags_for(body, engine.mm))


@pytest.mark.parametrize(
    "head, fragment",
    [
        ('<VirtualWidget Name="W"><Property Name="Variable" Type="expression"/>'
         '<Property Name="Label" Default="Nope"/><Pattern>', "undeclared property 'Nope'"),
        ('<VirtualWidget Name="W"><Property Name="Variable" Type="expression"/>'
         '<Property Name="Label" Default="GetLabelFor(Label)"/><Pattern>', "references itself"),
        ('<VirtualWidget Name="W"><Property Name="Variable" Type="expression"/>'
         '<Property Name="A" Default="B"/><Property Name="B" Default="Variable"/><Pattern>',
         "later defaulted property 'B'"),
        ('<VirtualWidget Name="W"><Property Name="Variable"/><Property Name="Variable"/><Pattern>',
         "duplicate property"),
        ('<VirtualWidget Name="W"><Property Name="Variable"/><Property Name="Pattern" Default="x"/><Pattern>',
         "reserved"),
        ('<VirtualWidget Name="Checkbox"><Property Name="Variable"/><Pattern>', "collides with native class"),
    ],
)
def test_definition_diagnostics(engine, head, fragment):
    diags = diags_for(GOOD, engine.mm, head="\n" + head + "\n")
    assert any(fragment in d for d in diags), diags


def test_duplicate_and_patternless_defs(engine):
    a = '<VirtualWidget Name="A"/>'
    diags = validate_defs(loads_defs([a, a]), engine.mm)
    assert "A: defined more than once" in diags and "A: at least one pattern is required" in diags


# -- default expressions -------------------------------------------------------


@pytest.mark.parametrize(
    "text, expr",
    [
        ("GetLabelFor(Variable)", Call("GetLabelFor", PropRef("Variable"))),
        ("Variable", PropRef("Variable")),
        ('"Yes"', Literal("Yes")),
        ("'No'", Literal("No")),
    ],
)
def test_parse_default(text, expr):
    assert parse_default(text) == expr


def test_parse_default_rejects_junk():
    with pytest.raises(DefsError):
        parse_default("a + b")


@pytest.mark.parametrize(
    "value, label",
    [
        ("Request.IsApproved", "Is approved"),
        ("Description", "Description"),
        ("Request.Approved", "Approved"),
        ("Order.due_date", "Due date"),
        ("Customer.ownerName", "Owner name"),
        ("Request.Description", "Description"),
        ("x", "X"),
        ("", ""),
    ],
)
def test_humanize(value, label):
    assert humanize(value) == label


def test_eval_default():
    assert eval_default(Literal("Yes"), {}) == "Yes"
    assert eval_default(PropRef("A"), {"A": "v"}) == "v"
    assert eval_default(Call("GetLabelFor", PropRef("A")), {"A": "Request.IsApproved"}) == "Is approved"
    with pytest.raises(DefsError, match="unresolved"):
        eval_default(PropRef("A"), {})


@given(st.lists(st.from_regex(r"[A-Za-z][a-z]{1,5}", fullmatch=True), min_size=1, max_size=4))
def test_humanize_shape(parts):
    label = humanize("Entity." + "".join(p.capitalize() for p in parts))
    words = label.split(" ")
    assert len(words) == len(parts)
    assert words[0][0].isupper() and all(w == w.lower() for w in words[1:])
