"""Linguistic patterns (attribute and vocabulary rules per element kind) and styles."""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Union

from . import model as m

ONE = "1"
OPTIONAL = "0..1"
MANY = "0..n"


@dataclass(frozen=True)
class AttributeRule:
    name: str
    required: bool
    multiplicity: str

    @property
    def is_collection(self) -> bool:
        return self.multiplicity.endswith("..n")


@dataclass(frozen=True)
class VocabularyRule:
    attribute: str  # dotted path for nested fields, e.g. "scenarios.kind"
    terms: tuple[str, ...]


@dataclass(frozen=True)
class LinguisticPattern:
    element_kind: str
    attribute_rules: tuple[AttributeRule, ...]
    vocabulary_rules: tuple[VocabularyRule, ...]

    def rule(self, name: str) -> Optional[AttributeRule]:
        for r in self.attribute_rules:
            if r.name == name:
                return r
        return None

    @property
    def attribute_names(self) -> list[str]:
        return [r.name for r in self.attribute_rules]


_COMMON = (
    AttributeRule("id", True, ONE),
    AttributeRule("name", False, OPTIONAL),
    AttributeRule("description", False, OPTIONAL),
)


def _pattern(kind, rules, vocab=()):
    return LinguisticPattern(kind, _COMMON + tuple(AttributeRule(*r) for r in rules),
                             tuple(VocabularyRule(a, t) for a, t in vocab))


_PATTERNS = {
    p.element_kind: p for p in (
        _pattern("Actor", [("kind", True, ONE)], [("kind", m.ACTOR_KINDS)]),
        _pattern("DataEntity",
                 [("kind", True, ONE), ("attributes", False, MANY)],
                 [("kind", m.ENTITY_KINDS),
                  ("attributes.datatype", m.DATATYPES),
                  ("attributes.constraints", m.CONSTRAINTS)]),
        _pattern("UseCase",
                 [("kind", True, ONE), ("primary_actor", True, ONE),
                  ("data_entities", False, MANY), ("scenarios", False, MANY)],
                 [("kind", m.USE_CASE_KINDS),
                  ("scenarios.kind", m.SCENARIO_KINDS),
                  ("scenarios.steps.performer", m.PERFORMERS)]),
        _pattern("UserStory",
                 [("as_a", True, ONE), ("i_want", True, ONE),
                  ("so_that", False, OPTIONAL), ("priority", True, ONE)],
                 [("priority", m.PRIORITIES)]),
        _pattern("Goal",
                 [("parent", False, OPTIONAL), ("priority", True, ONE)],
                 [("priority", m.PRIORITIES)]),
        _pattern("QualityRequirement",
                 [("kind", True, ONE), ("metric", False, OPTIONAL),
                  ("target_value", False, OPTIONAL)],
                 [("kind", m.QR_KINDS)]),
        _pattern("TestCase",
                 [("traces_to", True, ONE), ("scenario_ref", False, OPTIONAL),
                  ("given", False, MANY), ("when", False, MANY), ("then", False, MANY)]),
        _pattern("GlossaryTerm",
                 [("term", True, ONE), ("part_of_speech", True, ONE),
                  ("definition", False, OPTIONAL), ("synonyms", False, MANY),
                  ("preferred", True, ONE)],
                 [("part_of_speech", m.PARTS_OF_SPEECH)]),
    )
}


def pattern_for(kind: str) -> LinguisticPattern:
    try:
        return _PATTERNS[kind]
    except KeyError:
        raise KeyError(f"unknown element kind {kind!r}") from None


def vocabulary_values(obj, path: str) -> list:
    """Every leaf value reached by a dotted ``path`` from ``obj``."""
    values = [obj]
    for part in path.split("."):
        nxt = []
        for v in values:
            v = getattr(v, part)
            if isinstance(v, (tuple, list, frozenset, set)):
                nxt.extend(v)
            else:
                nxt.append(v)
        values = nxt
    return values


PLACEHOLDER_RE = re.compile(r"\{\{\s*([A-Za-z_][A-Za-z0-9_.]*)\s*\}\}")


@dataclass(frozen=True)
class LinguisticStyle:
    style_id: str
    pattern: str
    template: str

    def __post_init__(self):
        try:
            p = pattern_for(self.pattern)
        except KeyError as exc:
            raise ValueError(f"style {self.style_id}: {exc.args[0]}") from None
        if not m.IDENT_RE.match(self.style_id):
            raise ValueError(f"style id {self.style_id!r} is not an identifier")
        for name in self.placeholders:
            if p.rule(name) is None:
                raise ValueError(
                    f"style {self.style_id}: placeholder {{{{{name}}}}} is not an "
                    f"attribute of {self.pattern}")

    @property
    def placeholders(self) -> list[str]:
        return PLACEHOLDER_RE.findall(self.template)


def parse_styles(text: str) -> list[LinguisticStyle]:
    """Read a styles file: blank-line separated blocks of ``key: value`` lines.

    Each block has ``style``, ``kind`` and ``template`` keys; ``#`` starts a
    comment line.
    """
    styles = []
    blocks = re.split(r"\n\s*\n", text.replace("\r\n", "\n"))
    for block in blocks:
        fields = {}
        for line in block.splitlines():
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            key, sep, value = line.partition(":")
            if not sep:
                raise ValueError(f"style line without ':': {line!r}")
            fields[key.strip()] = value.strip()
        if not fields:
            continue
        missing = {"style", "kind", "template"} - fields.keys()
        if missing:
            raise ValueError(f"style block missing {sorted(missing)}")
        styles.append(LinguisticStyle(fields["style"], fields["kind"], fields["template"]))
    return styles


def load_styles(path: Union[str, Path, None] = None) -> list[LinguisticStyle]:
    if path is None:
        text = resources.files("rslkit").joinpath("styles/builtin.styles").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return parse_styles(text)


def style_index(styles: Iterable[LinguisticStyle]) -> dict[str, LinguisticStyle]:
    return {s.style_id: s for s in styles}
