import pytest

from rslkit import model as m
from rslkit.diagnostics import RslError
from rslkit.parser import parse, parse_file
from rslkit.patterns import load_styles, style_index
from rslkit.transform import render_document, render_style
from rslkit.transform.render import default_template

from conftest import FIXTURES, read_fixture


def one(*elements):
    return m.SpecificationModel(m.QualifiedName.parse("p"), (), elements)


def test_package_tag():
    assert render_document(one(), "# {{package}}") == "# p"


def test_story_sentence():
    story = m.UserStory("us", as_a="a_Customer", i_want="to track my order",
                        so_that="I know the delivery date")
    style = style_index(load_styles())["story_sentence"]
    assert render_style(story, style) == \
        "As a a_Customer, I want to track my order so that I know the delivery date."


def test_style_inside_each():
    mdl = one(m.Actor("a"), m.UserStory("us", as_a="a", i_want="x", so_that="y"))
    out = render_document(mdl, "{{#each UserStory}}- {{style:story_sentence}}\n{{/each}}")
    assert out == "- As a a, I want x so that y.\n"


def test_each_if_else_and_this():
    mdl = one(m.Goal("g1", "first"), m.Goal("g2"))
    tpl = ("{{#each Goal}}\n"
           "{{id}}: {{#if name}}{{name}}{{else}}(unnamed){{/if}}\n"
           "{{/each}}\n")
    assert render_document(mdl, tpl) == "g1: first\ng2: (unnamed)\n"
    term = m.GlossaryTerm(term="order", synonyms=["purchase", "buy"])
    out = render_document(one(term),
                          "{{#each GlossaryTerm}}{{#each synonyms}}[{{this}}]{{/each}}{{/each}}")
    assert out == "[purchase][buy]"


def test_standalone_block_lines_vanish():
    tpl = "a\n{{#if Goal}}\nhas goals\n{{/if}}\nb\n"
    assert render_document(one(), tpl) == "a\nb\n"
    assert render_document(one(m.Goal("g")), tpl) == "a\nhas goals\nb\n"


@pytest.mark.parametrize("tpl", ["{{nope}}", "{{#each Goal}}{{colour}}{{/each}}",
                                 "{{#each Actor}}{{#each kind}}{{/each}}{{/each}}"])
def test_unknown_path(tpl):
    with pytest.raises(RslError) as exc:
        render_document(one(m.Actor("a"), m.Goal("g")), tpl)
    assert exc.value.codes == ["RSL-T030"]


def test_unknown_style():
    with pytest.raises(RslError) as exc:
        render_document(one(m.Goal("g")), "{{#each Goal}}{{style:shiny}}{{/each}}")
    assert exc.value.codes == ["RSL-T031"]


def test_style_for_wrong_kind():
    with pytest.raises(RslError) as exc:
        render_document(one(m.Goal("g")), "{{#each Goal}}{{style:story_sentence}}{{/each}}")
    assert exc.value.codes == ["RSL-T031"]


@pytest.mark.parametrize("tpl", ["{{#each Goal}}", "{{/each}}", "{{#if x}}{{/each}}",
                                 "{{else}}", "{{ unclosed"])
def test_unbalanced(tpl):
    with pytest.raises(RslError) as exc:
        render_document(one(), tpl)
    assert exc.value.codes == ["RSL-T032"]


def test_orders_golden():
    mdl = parse_file(FIXTURES / "orders.rsl").model
    assert render_document(mdl, default_template()) == read_fixture("orders.srs.md")


def test_every_kind_renders():
    out = render_document(parse(read_fixture("shop.rsl")).model, default_template())
    for needle in ["## Actors", "## Data entities", "## Use cases", "## User stories",
                   "## Goals", "## Quality requirements", "## Test cases", "## Glossary",
                   "As a a_Customer, I want to see where my order is so that I know when "
                   "it arrives."]:
        assert needle in out
    assert "\n\n\n" not in out
