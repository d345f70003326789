"""Typed in-memory model of a specification package.

Models and elements are frozen dataclasses; every operation returns a new
value. Source spans are carried for diagnostics but never take part in
equality.
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass, field
from typing import ClassVar, Optional, Union

from .diagnostics import RslError, SourceSpan, diagnostic

IDENT_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")

KEYWORDS = frozenset({
    "Package", "Import", "as",
    "Actor", "DataEntity", "UseCase", "UserStory", "Goal", "QR", "TestCase", "Term",
    "attribute", "constraints", "references",
    "actorInitiates", "dataEntity", "scenario", "step", "System",
    "asA", "iWant", "soThat", "priority",
    "partOf", "metric", "value",
    "traces", "given", "when", "then",
    "definition", "synonym", "notPreferred", "description",
})

ELEMENT_KEYWORDS = {
    "Actor": "Actor",
    "DataEntity": "DataEntity",
    "UseCase": "UseCase",
    "UserStory": "UserStory",
    "Goal": "Goal",
    "QR": "QualityRequirement",
    "TestCase": "TestCase",
    "Term": "GlossaryTerm",
}

ACTOR_KINDS = ("User", "ExternalSystem", "Timer", "Other")
ENTITY_KINDS = ("Master", "Transaction", "Reference", "Parameter", "Other")
DATATYPES = ("Integer", "Decimal", "Boolean", "Date", "DateTime", "Text")
CONSTRAINTS = ("PrimaryKey", "NotNull", "Unique")
USE_CASE_KINDS = ("EntityCreate", "EntityBrowse", "EntityManage", "Report", "Interaction", "Other")
SCENARIO_KINDS = ("Main", "Alternative", "Exception")
PERFORMERS = ("Actor", "System")
PRIORITIES = ("Must", "Should", "Could", "Wont", "Unset")
QR_KINDS = ("Usability", "Security", "Performance", "Reliability", "Maintainability", "Other")
PARTS_OF_SPEECH = ("Noun", "Verb", "Adjective")


def is_identifier(text: str) -> bool:
    return bool(IDENT_RE.match(text)) and text not in KEYWORDS


def is_reference(text: str) -> bool:
    """A reference is a bare identifier or an ``alias.id`` qualified name."""
    return bool(text) and all(is_identifier(s) for s in text.split("."))


def _check_ident(value: str, what: str) -> None:
    if not isinstance(value, str) or not is_identifier(value):
        raise ValueError(f"{what} {value!r} is not a valid identifier")


def _check_ref(value: Optional[str], what: str) -> None:
    if value is not None and (not isinstance(value, str) or not is_reference(value)):
        raise ValueError(f"{what} {value!r} is not a valid reference")


def _check_vocab(value: str, vocab: tuple[str, ...], what: str) -> None:
    if value not in vocab:
        raise ValueError(f"{what} {value!r} not in {{{', '.join(vocab)}}}")


def _check_text(value: Optional[str], what: str, required: bool = False) -> None:
    if value is None:
        if required:
            raise ValueError(f"{what} is required")
        return
    if not isinstance(value, str):
        raise ValueError(f"{what} must be text")
    if required and not value.strip():
        raise ValueError(f"{what} must be non-empty")
    if "\n" in value or "\r" in value:
        raise ValueError(f"{what} must be a single line")


def _opt_text(obj, name: str) -> None:
    # "" and None are the same thing for optional display text
    if getattr(obj, name) == "":
        object.__setattr__(obj, name, None)


@dataclass(frozen=True)
class QualifiedName:
    segments: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if not self.segments:
            raise ValueError("qualified name needs at least one segment")
        for s in self.segments:
            _check_ident(s, "name segment")

    @classmethod
    def parse(cls, text: Union[str, QualifiedName]) -> QualifiedName:
        if isinstance(text, QualifiedName):
            return text
        return cls(tuple(text.split(".")))

    @property
    def last(self) -> str:
        return self.segments[-1]

    def __str__(self) -> str:
        return ".".join(self.segments)


@dataclass(frozen=True)
class ImportDecl:
    target: QualifiedName
    alias: Optional[str] = None
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "target", QualifiedName.parse(self.target))
        if self.alias is not None:
            _check_ident(self.alias, "import alias")

    @property
    def prefix(self) -> str:
        """Namespace prefix that imported elements receive when merged."""
        return self.alias or self.target.last


@dataclass(frozen=True)
class Element:
    """Fields shared by every element kind."""

    KIND: ClassVar[str] = ""

    id: str
    name: Optional[str] = None
    description: Optional[str] = None
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        _check_ref(self.id, "element id")
        if not self.id:
            raise ValueError("element id is required")
        _opt_text(self, "name")
        _opt_text(self, "description")
        _check_text(self.name, "name")
        _check_text(self.description, "description")

    @property
    def element_kind(self) -> str:
        return self.KIND


@dataclass(frozen=True)
class Actor(Element):
    KIND: ClassVar[str] = "Actor"

    kind: str = "User"

    def __post_init__(self):
        super().__post_init__()
        _check_vocab(self.kind, ACTOR_KINDS, "actor kind")


@dataclass(frozen=True)
class DataAttribute:
    name: str
    datatype: str = "Text"
    constraints: frozenset = frozenset()
    foreign_key_target: Optional[str] = None
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        _check_ident(self.name, "attribute name")
        _check_vocab(self.datatype, DATATYPES, "datatype")
        cons = frozenset(self.constraints)
        for c in cons:
            _check_vocab(c, CONSTRAINTS, "constraint")
        if "PrimaryKey" in cons:
            cons = cons | {"NotNull"}
        object.__setattr__(self, "constraints", cons)
        _check_ref(self.foreign_key_target, "foreign key target")

    @property
    def sorted_constraints(self) -> list[str]:
        return [c for c in CONSTRAINTS if c in self.constraints]

    @property
    def is_primary_key(self) -> bool:
        return "PrimaryKey" in self.constraints


@dataclass(frozen=True)
class DataEntity(Element):
    KIND: ClassVar[str] = "DataEntity"

    kind: str = "Other"
    attributes: tuple[DataAttribute, ...] = ()

    def __post_init__(self):
        super().__post_init__()
        _check_vocab(self.kind, ENTITY_KINDS, "entity kind")
        object.__setattr__(self, "attributes", tuple(self.attributes))

    @property
    def primary_key(self) -> Optional[DataAttribute]:
        for a in self.attributes:
            if a.is_primary_key:
                return a
        return None


@dataclass(frozen=True)
class Step:
    order: int
    performer: str
    action: str
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if isinstance(self.order, bool) or not isinstance(self.order, int) or self.order < 1:
            raise ValueError(f"step order must be a positive integer, got {self.order!r}")
        _check_vocab(self.performer, PERFORMERS, "step performer")
        _check_text(self.action, "step action", required=True)


@dataclass(frozen=True)
class Scenario:
    id: str
    kind: str = "Main"
    steps: tuple[Step, ...] = ()
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        _check_ident(self.id, "scenario id")
        _check_vocab(self.kind, SCENARIO_KINDS, "scenario kind")
        object.__setattr__(self, "steps", tuple(self.steps))


@dataclass(frozen=True)
class UseCase(Element):
    KIND: ClassVar[str] = "UseCase"

    kind: str = "Other"
    primary_actor: Optional[str] = None
    data_entities: tuple[str, ...] = ()
    scenarios: tuple[Scenario, ...] = ()

    def __post_init__(self):
        super().__post_init__()
        _check_vocab(self.kind, USE_CASE_KINDS, "use case kind")
        _check_ref(self.primary_actor, "primary actor")
        object.__setattr__(self, "data_entities", tuple(self.data_entities))
        for d in self.data_entities:
            _check_ref(d, "data entity reference")
        object.__setattr__(self, "scenarios", tuple(self.scenarios))

    def scenario(self, scenario_id: str) -> Optional[Scenario]:
        for s in self.scenarios:
            if s.id == scenario_id:
                return s
        return None


@dataclass(frozen=True)
class UserStory(Element):
    KIND: ClassVar[str] = "UserStory"

    as_a: str = ""
    i_want: str = ""
    so_that: Optional[str] = None
    priority: str = "Unset"

    def __post_init__(self):
        super().__post_init__()
        _check_ref(self.as_a, "asA reference")
        if not self.as_a:
            raise ValueError("user story needs an asA actor")
        _check_text(self.i_want, "iWant", required=True)
        _opt_text(self, "so_that")
        _check_text(self.so_that, "soThat")
        _check_vocab(self.priority, PRIORITIES, "priority")


@dataclass(frozen=True)
class Goal(Element):
    KIND: ClassVar[str] = "Goal"

    parent: Optional[str] = None
    priority: str = "Unset"

    def __post_init__(self):
        super().__post_init__()
        _check_ref(self.parent, "partOf reference")
        _check_vocab(self.priority, PRIORITIES, "priority")


@dataclass(frozen=True)
class QualityRequirement(Element):
    KIND: ClassVar[str] = "QualityRequirement"

    kind: str = "Other"
    metric: Optional[str] = None
    target_value: Optional[str] = None

    def __post_init__(self):
        super().__post_init__()
        _check_vocab(self.kind, QR_KINDS, "quality requirement kind")
        _opt_text(self, "metric")
        _opt_text(self, "target_value")
        _check_text(self.metric, "metric")
        _check_text(self.target_value, "value")


@dataclass(frozen=True)
class TestCase(Element):
    KIND: ClassVar[str] = "TestCase"
    __test__: ClassVar[bool] = False  # keep pytest from collecting it

    traces_to: str = ""
    scenario_ref: Optional[str] = None
    given: tuple[str, ...] = ()
    when: tuple[str, ...] = ()
    then: tuple[str, ...] = ()

    def __post_init__(self):
        super().__post_init__()
        if not self.traces_to:
            raise ValueError("test case needs a traces target")
        _check_ref(self.traces_to, "traces reference")
        if self.scenario_ref is not None:
            _check_ident(self.scenario_ref, "scenario reference")
        for part in ("given", "when", "then"):
            texts = tuple(getattr(self, part))
            for t in texts:
                _check_text(t, part, required=True)
            object.__setattr__(self, part, texts)


def term_id(term: str) -> str:
    """Element id of a glossary term, derived from its text."""
    return "t_" + re.sub(r"[^a-z0-9]", "_", term.strip().lower())


@dataclass(frozen=True)
class GlossaryTerm(Element):
    """Glossary entries have no declared id; it is derived from the term."""

    KIND: ClassVar[str] = "GlossaryTerm"

    id: str = ""
    term: str = ""
    part_of_speech: str = "Noun"
    definition: Optional[str] = None
    synonyms: tuple[str, ...] = ()
    preferred: bool = True

    def __post_init__(self):
        _check_text(self.term, "term", required=True)
        if not self.id:
            object.__setattr__(self, "id", term_id(self.term))
        super().__post_init__()
        _check_vocab(self.part_of_speech, PARTS_OF_SPEECH, "part of speech")
        _opt_text(self, "definition")
        _check_text(self.definition, "definition")
        syns = tuple(self.synonyms)
        for s in syns:
            _check_text(s, "synonym", required=True)
            if s.strip().lower() == self.term.strip().lower():
                raise ValueError(f"synonym {s!r} equals its own term")
        object.__setattr__(self, "synonyms", syns)
        if not isinstance(self.preferred, bool):
            raise ValueError("preferred must be a boolean")


ELEMENT_TYPES: dict[str, type[Element]] = {
    cls.KIND: cls
    for cls in (Actor, DataEntity, UseCase, UserStory, Goal, QualityRequirement,
                TestCase, GlossaryTerm)
}
ELEMENT_KINDS = tuple(ELEMENT_TYPES)


@dataclass(frozen=True)
class SpecificationModel:
    package_name: QualifiedName
    imports: tuple[ImportDecl, ...] = ()
    elements: tuple[Element, ...] = ()
    source: Optional[str] = field(default=None, compare=False)
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "package_name", QualifiedName.parse(self.package_name))
        object.__setattr__(self, "imports", tuple(self.imports))
        object.__setattr__(self, "elements", tuple(self.elements))
        aliases = [i.alias for i in self.imports if i.alias is not None]
        if len(aliases) != len(set(aliases)):
            raise ValueError("import aliases must be unique")
        ids = [e.id for e in self.elements]
        if len(ids) != len(set(ids)):
            raise ValueError("element ids must be unique")

    def of_kind(self, kind: str) -> list[Element]:
        return [e for e in self.elements if e.KIND == kind]

    def index(self) -> dict[str, Element]:
        return {e.id: e for e in self.elements}


def new_model(package_name: Union[str, QualifiedName]) -> SpecificationModel:
    return SpecificationModel(QualifiedName.parse(package_name))


def add_element(model: SpecificationModel, element: Element) -> SpecificationModel:
    """Return ``model`` with ``element`` appended.

    Raises RslError(RSL-C001) if the id is already taken; dangling references
    are accepted and left to the validator.
    """
    existing = resolve(model, element.id)
    if existing is not None:
        related = [(existing.span, "first declared here")] if existing.span else []
        raise RslError(diagnostic("RSL-C001", f"duplicate identifier '{element.id}'",
                                  element.span, related=related))
    return dataclasses.replace(model, elements=model.elements + (element,))


def resolve(model: SpecificationModel, ref: str) -> Optional[Element]:
    for e in model.elements:
        if e.id == ref:
            return e
    return None


class Resolver:
    """Indexed lookup for repeated resolution over one model."""

    def __init__(self, model: SpecificationModel):
        self._by_id = model.index()

    def __call__(self, ref: Optional[str]) -> Optional[Element]:
        if ref is None:
            return None
        return self._by_id.get(ref)


def _canonical_use_case(uc: UseCase) -> UseCase:
    scenarios = []
    for sc in uc.scenarios:
        steps = tuple(dataclasses.replace(st, order=i) for i, st in enumerate(sc.steps, 1))
        scenarios.append(dataclasses.replace(sc, steps=steps))
    return dataclasses.replace(uc, scenarios=tuple(scenarios))


def canonicalize(model: SpecificationModel) -> SpecificationModel:
    """Renumber steps to 1..n; constraint normalisation already happens on construction."""
    elements = tuple(_canonical_use_case(e) if isinstance(e, UseCase) else e
                     for e in model.elements)
    return dataclasses.replace(model, elements=elements)


def structural_eq(a: SpecificationModel, b: SpecificationModel) -> bool:
    return canonicalize(a) == canonicalize(b)
