import random

import pytest

from rslkit import model as m
from rslkit.formatter import format_model
from rslkit.parser import parse

from conftest import FIXTURES
from modelgen import gen_model

SOURCES = sorted(p.name for p in FIXTURES.glob("*.rsl"))


def test_empty_model():
    assert format_model(m.new_model("p")) == "Package p {\n}\n"


@pytest.mark.parametrize("name", SOURCES)
def test_idempotent_on_fixtures(name):
    once = format_model(parse((FIXTURES / name).read_text("utf-8")).model)
    twice = format_model(parse(once).model)
    assert once == twice


def test_orders_fixture_is_already_canonical():
    src = (FIXTURES / "orders.rsl").read_text("utf-8")
    body = src.split("\n", 1)[1]  # drop the leading comment
    # the PrimaryKey => NotNull normalisation is spelled out
    body = body.replace("constraints(PrimaryKey)", "constraints(PrimaryKey NotNull)")
    assert format_model(parse(src).model) == body


def test_generated_models_round_trip():
    rnd = random.Random(5)
    for _ in range(200):
        mdl = gen_model(rnd)
        r = parse(format_model(mdl))
        assert r.diagnostics == []
        assert m.structural_eq(r.model, m.canonicalize(mdl))


def test_layout():
    mdl = m.SpecificationModel(m.QualifiedName.parse("p"), [m.ImportDecl(
        m.QualifiedName.parse("lib.x"), "x")], [m.Actor("a"), m.Goal("g", priority="Must")])
    assert format_model(mdl) == (
        "Package p {\n"
        "    Import lib.x as x\n"
        "\n"
        "    Actor a : User\n"
        "\n"
        "    Goal g [\n"
        "        priority Must\n"
        "    ]\n"
        "}\n")
