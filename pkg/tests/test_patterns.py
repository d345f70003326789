import pytest

from rslkit import model as m
from rslkit.patterns import (LinguisticStyle, load_styles, parse_styles, pattern_for,
                             style_index, vocabulary_values)
from rslkit.parser import parse

# metamodel vocabulary table, kept here independently of the package constants
METAMODEL = {
    ("Actor", "kind"): {"User", "ExternalSystem", "Timer", "Other"},
    ("DataEntity", "kind"): {"Master", "Transaction", "Reference", "Parameter", "Other"},
    ("DataEntity", "attributes.datatype"): {"Integer", "Decimal", "Boolean", "Date",
                                            "DateTime", "Text"},
    ("DataEntity", "attributes.constraints"): {"PrimaryKey", "NotNull", "Unique"},
    ("UseCase", "kind"): {"EntityCreate", "EntityBrowse", "EntityManage", "Report",
                          "Interaction", "Other"},
    ("UseCase", "scenarios.kind"): {"Main", "Alternative", "Exception"},
    ("UseCase", "scenarios.steps.performer"): {"Actor", "System"},
    ("UserStory", "priority"): {"Must", "Should", "Could", "Wont", "Unset"},
    ("Goal", "priority"): {"Must", "Should", "Could", "Wont", "Unset"},
    ("QualityRequirement", "kind"): {"Usability", "Security", "Performance", "Reliability",
                                     "Maintainability", "Other"},
    ("GlossaryTerm", "part_of_speech"): {"Noun", "Verb", "Adjective"},
}


def test_vocabularies_match_metamodel():
    seen = set()
    for kind in m.ELEMENT_KINDS:
        for rule in pattern_for(kind).vocabulary_rules:
            assert set(rule.terms) == METAMODEL[(kind, rule.attribute)], (kind, rule.attribute)
            seen.add((kind, rule.attribute))
    assert seen == set(METAMODEL)


def test_actor_pattern():
    p = pattern_for("Actor")
    assert p.rule("kind").required


def test_use_case_pattern():
    p = pattern_for("UseCase")
    assert p.rule("primary_actor").required
    assert p.rule("scenarios").multiplicity == "0..n"


def test_unknown_kind():
    with pytest.raises(KeyError):
        pattern_for("Banana")


def test_pattern_attributes_exist_on_elements():
    samples = {
        "Actor": m.Actor("a"), "DataEntity": m.DataEntity("e"),
        "UseCase": m.UseCase("u"), "UserStory": m.UserStory("s", as_a="a", i_want="x"),
        "Goal": m.Goal("g"), "QualityRequirement": m.QualityRequirement("q"),
        "TestCase": m.TestCase("t", traces_to="u"), "GlossaryTerm": m.GlossaryTerm(term="x"),
    }
    for kind, el in samples.items():
        for name in pattern_for(kind).attribute_names:
            assert hasattr(el, name), (kind, name)


def test_parser_messages_list_the_pattern_vocabulary():
    r = parse("Package p { Actor a : Pilot }")
    assert [d.code for d in r.diagnostics] == ["RSL-P012"]
    for term in METAMODEL[("Actor", "kind")]:
        assert term in r.diagnostics[0].message


def test_vocabulary_values_walks_collections():
    e = m.DataEntity("e", attributes=[m.DataAttribute("a", "Integer"),
                                      m.DataAttribute("b", "Date")])
    assert vocabulary_values(e, "attributes.datatype") == ["Integer", "Date"]


def test_builtin_styles_load():
    idx = style_index(load_styles())
    assert idx["story_sentence"].template == \
        "As a {{as_a}}, I want {{i_want}} so that {{so_that}}."
    assert idx["story_sentence"].pattern == "UserStory"


def test_style_placeholder_must_belong_to_pattern():
    with pytest.raises(ValueError):
        LinguisticStyle("bad", "Actor", "{{as_a}}")


def test_parse_styles_format():
    styles = parse_styles("# comment\nstyle: g\nkind: Goal\ntemplate: Goal {{id}}\n")
    assert [(s.style_id, s.template) for s in styles] == [("g", "Goal {{id}}")]
    with pytest.raises(ValueError):
        parse_styles("style: g\nkind: Nope\ntemplate: x\n")
