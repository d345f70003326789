"""Canonical pretty-printer: model -> .rsl text."""

from __future__ import annotations

from . import model as m
from .lexer import quote

INDENT = "    "


def _header(keyword: str, e: m.Element, kind: str | None = None) -> str:
    parts = [keyword, e.id]
    if e.name is not None:
        parts.append(quote(e.name))
    head = " ".join(parts)
    if kind is not None:
        head += f" : {kind}"
    return head


def _block(head: str, body: list[str], force: bool = False) -> list[str]:
    if not body and not force:
        return [head]
    if not body:
        return [head + " [", "]"]
    return [head + " ["] + [INDENT + line for line in body] + ["]"]


def _desc(e: m.Element) -> list[str]:
    return [f"description {quote(e.description)}"] if e.description is not None else []


def _attribute(a: m.DataAttribute) -> str:
    line = f"attribute {a.name} : {a.datatype}"
    if a.constraints:
        line += f" constraints({' '.join(a.sorted_constraints)})"
    if a.foreign_key_target is not None:
        line += f" references {a.foreign_key_target}"
    return line


def _scenario(s: m.Scenario) -> list[str]:
    steps = [f"step {st.order} : {st.performer} {quote(st.action)}" for st in s.steps]
    return _block(f"scenario {s.id} : {s.kind}", steps, force=True)


def format_element(e: m.Element) -> list[str]:
    if isinstance(e, m.Actor):
        return _block(_header("Actor", e, e.kind), _desc(e))
    if isinstance(e, m.DataEntity):
        body = _desc(e) + [_attribute(a) for a in e.attributes]
        return _block(_header("DataEntity", e, e.kind), body, force=True)
    if isinstance(e, m.UseCase):
        body = _desc(e)
        if e.primary_actor is not None:
            body.append(f"actorInitiates {e.primary_actor}")
        if e.data_entities:
            body.append("dataEntity " + ", ".join(e.data_entities))
        for s in e.scenarios:
            body.extend(_scenario(s))
        return _block(_header("UseCase", e, e.kind), body, force=True)
    if isinstance(e, m.UserStory):
        body = _desc(e) + [f"asA {e.as_a}", f"iWant {quote(e.i_want)}"]
        if e.so_that is not None:
            body.append(f"soThat {quote(e.so_that)}")
        if e.priority != "Unset":
            body.append(f"priority {e.priority}")
        return _block(_header("UserStory", e), body, force=True)
    if isinstance(e, m.Goal):
        body = _desc(e)
        if e.parent is not None:
            body.append(f"partOf {e.parent}")
        if e.priority != "Unset":
            body.append(f"priority {e.priority}")
        return _block(_header("Goal", e), body)
    if isinstance(e, m.QualityRequirement):
        body = _desc(e)
        if e.metric is not None:
            body.append(f"metric {quote(e.metric)}")
        if e.target_value is not None:
            body.append(f"value {quote(e.target_value)}")
        return _block(_header("QR", e, e.kind), body)
    if isinstance(e, m.TestCase):
        body = _desc(e) + [f"traces {e.traces_to}"]
        if e.scenario_ref is not None:
            body.append(f"scenario {e.scenario_ref}")
        for part in ("given", "when", "then"):
            body.extend(f"{part} {quote(t)}" for t in getattr(e, part))
        return _block(_header("TestCase", e), body, force=True)
    if isinstance(e, m.GlossaryTerm):
        body = []
        if e.definition is not None:
            body.append(f"definition {quote(e.definition)}")
        body.extend(f"synonym {quote(s)}" for s in e.synonyms)
        if not e.preferred:
            body.append("notPreferred")
        return _block(f"Term {quote(e.term)} : {e.part_of_speech}", body)
    raise TypeError(f"cannot format {type(e).__name__}")


def format_model(model: m.SpecificationModel) -> str:
    """Deterministic text whose reparse equals ``canonicalize(model)``."""
    model = m.canonicalize(model)
    lines = [f"Package {model.package_name} {{"]
    for imp in model.imports:
        line = f"Import {imp.target}"
        if imp.alias is not None:
            line += f" as {imp.alias}"
        lines.append(INDENT + line)
    for i, e in enumerate(model.elements):
        if i > 0 or model.imports:
            lines.append("")
        lines.extend(INDENT + line for line in format_element(e))
    lines.append("}")
    return "\n".join(lines) + "\n"


format = format_model  # noqa: A001 - public name used by callers
