"""Canonical JSON interchange (schema version "1")."""

from __future__ import annotations

import json
from typing import Any

from .. import model as m
from ..diagnostics import RslError, diagnostic

SCHEMA_VERSION = "1"

_COMMON = ("kind", "id", "name", "description")

# element kind -> JSON keys after the common ones, in emission order
ELEMENT_KEYS = {
    "Actor": ("type",),
    "DataEntity": ("type", "attributes"),
    "UseCase": ("type", "primaryActor", "dataEntities", "scenarios"),
    "UserStory": ("asA", "iWant", "soThat", "priority"),
    "Goal": ("partOf", "priority"),
    "QualityRequirement": ("type", "metric", "value"),
    "TestCase": ("traces", "scenario", "given", "when", "then"),
}
TERM_KEYS = ("kind", "term", "partOfSpeech", "definition", "synonyms", "preferred")
ATTRIBUTE_KEYS = ("name", "datatype", "constraints", "references")
SCENARIO_KEYS = ("id", "type", "steps")
STEP_KEYS = ("order", "performer", "action")
IMPORT_KEYS = ("target", "alias")
TOP_KEYS = ("schemaVersion", "package", "imports", "elements")


def _attribute(a: m.DataAttribute) -> dict:
    return {"name": a.name, "datatype": a.datatype, "constraints": a.sorted_constraints,
            "references": a.foreign_key_target}


def _scenario(s: m.Scenario) -> dict:
    return {"id": s.id, "type": s.kind,
            "steps": [{"order": st.order, "performer": st.performer, "action": st.action}
                      for st in s.steps]}


def element_to_dict(e: m.Element) -> dict:
    if isinstance(e, m.GlossaryTerm):
        return {"kind": e.KIND, "term": e.term, "partOfSpeech": e.part_of_speech,
                "definition": e.definition, "synonyms": list(e.synonyms),
                "preferred": e.preferred}
    d: dict[str, Any] = {"kind": e.KIND, "id": e.id, "name": e.name,
                         "description": e.description}
    if isinstance(e, m.Actor):
        d["type"] = e.kind
    elif isinstance(e, m.DataEntity):
        d["type"] = e.kind
        d["attributes"] = [_attribute(a) for a in e.attributes]
    elif isinstance(e, m.UseCase):
        d.update(type=e.kind, primaryActor=e.primary_actor,
                 dataEntities=list(e.data_entities),
                 scenarios=[_scenario(s) for s in e.scenarios])
    elif isinstance(e, m.UserStory):
        d.update(asA=e.as_a, iWant=e.i_want, soThat=e.so_that, priority=e.priority)
    elif isinstance(e, m.Goal):
        d.update(partOf=e.parent, priority=e.priority)
    elif isinstance(e, m.QualityRequirement):
        d.update(type=e.kind, metric=e.metric, value=e.target_value)
    elif isinstance(e, m.TestCase):
        d.update(traces=e.traces_to, scenario=e.scenario_ref, given=list(e.given),
                 when=list(e.when), then=list(e.then))
    return d


def model_to_dict(model: m.SpecificationModel) -> dict:
    return {
        "schemaVersion": SCHEMA_VERSION,
        "package": str(model.package_name),
        "imports": [{"target": str(i.target), "alias": i.alias} for i in model.imports],
        "elements": [element_to_dict(e) for e in model.elements],
    }


def export_json(model: m.SpecificationModel) -> str:
    """Compact canonical JSON; key order is fixed by construction, not sorted."""
    return json.dumps(model_to_dict(model), ensure_ascii=False, separators=(",", ":"))


# -- import ---------------------------------------------------------------


def _malformed(msg: str) -> RslError:
    return RslError(diagnostic("RSL-T012", msg))


def _obj(value, where: str, keys: tuple[str, ...], required: tuple[str, ...] = ()) -> dict:
    if not isinstance(value, dict):
        raise _malformed(f"{where}: expected an object")
    unknown = [k for k in value if k not in keys]
    if unknown:
        raise RslError(diagnostic("RSL-T010", f"{where}: unknown field(s) {', '.join(unknown)}"))
    missing = [k for k in required if k not in value]
    if missing:
        raise _malformed(f"{where}: missing field(s) {', '.join(missing)}")
    return value


def _str(d: dict, key: str, where: str, optional: bool = True):
    v = d.get(key)
    if v is None and optional:
        return None
    if not isinstance(v, str):
        raise _malformed(f"{where}.{key}: expected a string")
    return v


def _list(d: dict, key: str, where: str) -> list:
    v = d.get(key, [])
    if not isinstance(v, list):
        raise _malformed(f"{where}.{key}: expected an array")
    return v


def _strs(d: dict, key: str, where: str) -> tuple[str, ...]:
    items = _list(d, key, where)
    if not all(isinstance(x, str) for x in items):
        raise _malformed(f"{where}.{key}: expected an array of strings")
    return tuple(items)


def _element(d, where: str) -> m.Element:
    if not isinstance(d, dict):
        raise _malformed(f"{where}: expected an object")
    kind = d.get("kind")
    if kind == "GlossaryTerm":
        _obj(d, where, TERM_KEYS, ("kind", "term", "partOfSpeech"))
        preferred = d.get("preferred", True)
        if not isinstance(preferred, bool):
            raise _malformed(f"{where}.preferred: expected a boolean")
        return m.GlossaryTerm(term=_str(d, "term", where, False),
                              part_of_speech=_str(d, "partOfSpeech", where, False),
                              definition=_str(d, "definition", where),
                              synonyms=_strs(d, "synonyms", where), preferred=preferred)
    if kind not in ELEMENT_KEYS:
        raise _malformed(f"{where}.kind: unknown element kind {kind!r}")
    _obj(d, where, _COMMON + ELEMENT_KEYS[kind], ("kind", "id"))
    common = dict(id=_str(d, "id", where, False), name=_str(d, "name", where),
                  description=_str(d, "description", where))
    if kind == "Actor":
        return m.Actor(**common, kind=_str(d, "type", where, False))
    if kind == "DataEntity":
        attrs = []
        for i, a in enumerate(_list(d, "attributes", where)):
            aw = f"{where}.attributes[{i}]"
            _obj(a, aw, ATTRIBUTE_KEYS, ("name", "datatype"))
            attrs.append(m.DataAttribute(_str(a, "name", aw, False),
                                         _str(a, "datatype", aw, False),
                                         frozenset(_strs(a, "constraints", aw)),
                                         _str(a, "references", aw)))
        return m.DataEntity(**common, kind=_str(d, "type", where, False),
                            attributes=tuple(attrs))
    if kind == "UseCase":
        scenarios = []
        for i, s in enumerate(_list(d, "scenarios", where)):
            sw = f"{where}.scenarios[{i}]"
            _obj(s, sw, SCENARIO_KEYS, ("id", "type"))
            steps = []
            for j, st in enumerate(_list(s, "steps", sw)):
                tw = f"{sw}.steps[{j}]"
                _obj(st, tw, STEP_KEYS, STEP_KEYS)
                order = st["order"]
                if isinstance(order, bool) or not isinstance(order, int):
                    raise _malformed(f"{tw}.order: expected an integer")
                steps.append(m.Step(order, _str(st, "performer", tw, False),
                                    _str(st, "action", tw, False)))
            scenarios.append(m.Scenario(_str(s, "id", sw, False), _str(s, "type", sw, False),
                                        tuple(steps)))
        return m.UseCase(**common, kind=_str(d, "type", where, False),
                         primary_actor=_str(d, "primaryActor", where),
                         data_entities=_strs(d, "dataEntities", where),
                         scenarios=tuple(scenarios))
    if kind == "UserStory":
        return m.UserStory(**common, as_a=_str(d, "asA", where, False),
                           i_want=_str(d, "iWant", where, False),
                           so_that=_str(d, "soThat", where),
                           priority=_str(d, "priority", where) or "Unset")
    if kind == "Goal":
        return m.Goal(**common, parent=_str(d, "partOf", where),
                      priority=_str(d, "priority", where) or "Unset")
    if kind == "QualityRequirement":
        return m.QualityRequirement(**common, kind=_str(d, "type", where, False),
                                    metric=_str(d, "metric", where),
                                    target_value=_str(d, "value", where))
    return m.TestCase(**common, traces_to=_str(d, "traces", where, False),
                      scenario_ref=_str(d, "scenario", where),
                      given=_strs(d, "given", where), when=_strs(d, "when", where),
                      then=_strs(d, "then", where))


def import_json(text: str) -> m.SpecificationModel:
    """Inverse of :func:`export_json`; raises RslError (T010/T011/T012/C001)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _malformed(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise _malformed("top level must be an object")
    if "schemaVersion" in doc and doc["schemaVersion"] != SCHEMA_VERSION:
        raise RslError(diagnostic(
            "RSL-T011", f"unsupported schemaVersion {doc['schemaVersion']!r}; "
                        f"expected {SCHEMA_VERSION!r}"))
    _obj(doc, "document", TOP_KEYS, TOP_KEYS)
    try:
        model = m.new_model(_str(doc, "package", "document", False))
        imports = []
        for i, imp in enumerate(_list(doc, "imports", "document")):
            w = f"imports[{i}]"
            _obj(imp, w, IMPORT_KEYS, ("target",))
            imports.append(m.ImportDecl(m.QualifiedName.parse(_str(imp, "target", w, False)),
                                        _str(imp, "alias", w)))
        for i, el in enumerate(_list(doc, "elements", "document")):
            model = m.add_element(model, _element(el, f"elements[{i}]"))
        return m.SpecificationModel(model.package_name, tuple(imports), model.elements)
    except ValueError as exc:
        raise _malformed(str(exc)) from None
