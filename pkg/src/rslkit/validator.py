"""Consistency, completeness and ambiguity checks over a specification model."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Optional

from . import model as m
from .config import WARNINGS_AS_ERRORS, CheckConfig, ConstructRule, parse_rule
from .diagnostics import ERROR, INFO, SEVERITIES, WARNING, Diagnostic, diagnostic

# reference field -> element kinds it may point to
REFERENCE_KINDS = {
    "primary_actor": ("Actor",),
    "as_a": ("Actor",),
    "data_entities": ("DataEntity",),
    "traces_to": ("UseCase", "UserStory"),
    "foreign_key_target": ("DataEntity",),
    "parent": ("Goal",),
}


@dataclass
class ValidationReport:
    diagnostics: list[Diagnostic]
    strictness: str = "ErrorsOnly"
    counts: dict = field(init=False)
    passed: bool = field(init=False)

    def __post_init__(self):
        self.counts = {s: 0 for s in SEVERITIES}
        for d in self.diagnostics:
            self.counts[d.severity] += 1
        failing = self.counts[ERROR]
        if self.strictness == WARNINGS_AS_ERRORS:
            failing += self.counts[WARNING]
        self.passed = failing == 0

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "counts": dict(self.counts),
            "diagnostics": [d.to_dict() for d in self.diagnostics],
        }


def references(e: m.Element) -> Iterator[tuple[str, str, Optional[object]]]:
    """Yield (field, target id, span owner) for every reference an element holds."""
    if isinstance(e, m.UseCase):
        if e.primary_actor is not None:
            yield "primary_actor", e.primary_actor, e
        for d in e.data_entities:
            yield "data_entities", d, e
    elif isinstance(e, m.UserStory):
        yield "as_a", e.as_a, e
    elif isinstance(e, m.TestCase):
        yield "traces_to", e.traces_to, e
    elif isinstance(e, m.Goal):
        if e.parent is not None:
            yield "parent", e.parent, e
    elif isinstance(e, m.DataEntity):
        for a in e.attributes:
            if a.foreign_key_target is not None:
                yield "foreign_key_target", a.foreign_key_target, a


def _span(owner, fallback: m.Element):
    return getattr(owner, "span", None) or fallback.span


def _check_references(e: m.Element, lookup: m.Resolver) -> list[Diagnostic]:
    out = []
    for fld, target, owner in references(e):
        found = lookup(target)
        expected = REFERENCE_KINDS[fld]
        if found is None:
            out.append(diagnostic(
                "RSL-C010", f"{e.id}: {fld} '{target}' does not resolve to any element",
                _span(owner, e)))
        elif found.KIND not in expected:
            out.append(diagnostic(
                "RSL-C011",
                f"{e.id}: {fld} '{target}' is a {found.KIND}, expected {' or '.join(expected)}",
                _span(owner, e), related=[(found.span, "declared here")] if found.span else []))
    if isinstance(e, m.TestCase) and e.scenario_ref is not None:
        traced = lookup(e.traces_to)
        if isinstance(traced, m.UseCase):
            if traced.scenario(e.scenario_ref) is None:
                out.append(diagnostic(
                    "RSL-C010",
                    f"{e.id}: scenario '{e.scenario_ref}' not found in use case '{traced.id}'",
                    e.span))
        elif isinstance(traced, m.UserStory):
            out.append(diagnostic(
                "RSL-C011",
                f"{e.id}: scenario '{e.scenario_ref}' given but '{traced.id}' is a UserStory",
                e.span))
    return out


def _check_use_case(uc: m.UseCase) -> list[Diagnostic]:
    out = []
    seen: set = set()
    mains = 0
    for sc in uc.scenarios:
        if sc.id in seen:
            out.append(diagnostic(
                "RSL-C013", f"{uc.id}: duplicate scenario id '{sc.id}'", sc.span or uc.span))
        seen.add(sc.id)
        if sc.kind == "Main":
            mains += 1
            if mains > 1:
                out.append(diagnostic(
                    "RSL-C015", f"{uc.id}: scenario '{sc.id}' is a second Main scenario",
                    sc.span or uc.span))
        prev = None
        for st in sc.steps:
            if prev is not None and st.order <= prev:
                what = "duplicates" if st.order == prev else "follows"
                out.append(diagnostic(
                    "RSL-C012",
                    f"{uc.id}.{sc.id}: step {st.order} {what} step {prev}; orders must ascend",
                    st.span or sc.span or uc.span))
            prev = st.order
    return out


def _check_entity(de: m.DataEntity) -> list[Diagnostic]:
    out = []
    seen: set = set()
    pks = 0
    for a in de.attributes:
        span = a.span or de.span
        if a.name in seen:
            out.append(diagnostic("RSL-C017", f"{de.id}: duplicate attribute '{a.name}'", span))
        seen.add(a.name)
        if a.foreign_key_target is not None and a.datatype not in ("Integer", "Text"):
            out.append(diagnostic(
                "RSL-C016",
                f"{de.id}.{a.name}: foreign key needs Integer or Text, not {a.datatype}", span))
        if a.is_primary_key:
            pks += 1
            if pks > 1:
                out.append(diagnostic(
                    "RSL-C018", f"{de.id}.{a.name}: second PrimaryKey attribute", span))
    return out


def _goal_cycles(model: m.SpecificationModel, lookup: m.Resolver) -> list[Diagnostic]:
    goals = [e for e in model.elements if isinstance(e, m.Goal)]
    position = {g.id: i for i, g in enumerate(goals)}
    done: set = set()
    out = []
    for g in goals:
        path: list[str] = []
        on_path: dict[str, int] = {}
        cur: Optional[m.Element] = g
        while isinstance(cur, m.Goal) and cur.id not in done:
            if cur.id in on_path:
                cycle = path[on_path[cur.id]:]
                k = min(range(len(cycle)), key=lambda i: position[cycle[i]])
                cycle = cycle[k:] + cycle[:k]
                first = lookup(cycle[0])
                out.append(diagnostic(
                    "RSL-C014", "goal partOf cycle: " + " → ".join(cycle + [cycle[0]]),
                    first.span))
                break
            on_path[cur.id] = len(path)
            path.append(cur.id)
            cur = lookup(cur.parent)
        done.update(path)
    return out


def check_consistency(model: m.SpecificationModel) -> list[Diagnostic]:
    lookup = m.Resolver(model)
    out: list[Diagnostic] = []
    for e in model.elements:
        out.extend(_check_references(e, lookup))
        if isinstance(e, m.UseCase):
            out.extend(_check_use_case(e))
        elif isinstance(e, m.DataEntity):
            out.extend(_check_entity(e))
    out.extend(_goal_cycles(model, lookup))
    return out


def _is_set(value) -> bool:
    if value is None:
        return False
    if isinstance(value, str):
        return bool(value.strip()) and value != "Unset"
    if isinstance(value, (tuple, list, frozenset)):
        return len(value) > 0
    return True


def _satisfies(e: m.Element, rule: ConstructRule) -> bool:
    value = getattr(e, rule.field)
    if rule.minimum is None:
        return _is_set(value)
    return len(value) >= rule.minimum


def check_completeness(model: m.SpecificationModel, config: CheckConfig) -> list[Diagnostic]:
    severity = ERROR if config.strictness == WARNINGS_AS_ERRORS else WARNING
    rules = {kind: [parse_rule(kind, tok) for tok in tokens]
             for kind, tokens in config.construct_rules.items()}
    counts = {k: 0 for k in m.ELEMENT_KINDS}
    for e in model.elements:
        counts[e.KIND] += 1
    out = []
    for kind in m.ELEMENT_KINDS:
        if kind in config.model_required_kinds and counts[kind] == 0:
            out.append(diagnostic(
                "RSL-X010", f"model has no {kind} but the configuration requires one",
                model.span, severity=severity))
    for name in sorted(config.viewpoints):
        kinds = config.viewpoints[name]
        if sum(counts[k] for k in kinds) == 0:
            out.append(diagnostic(
                "RSL-X011",
                f"viewpoint '{name}' ({', '.join(sorted(kinds))}) has no instances",
                model.span, severity=severity))
    for e in model.elements:
        for rule in rules.get(e.KIND, ()):
            if not _satisfies(e, rule):
                out.append(diagnostic(
                    "RSL-X012", f"{e.KIND} {e.id} violates construct rule '{rule.token}'",
                    e.span, severity=severity))
    return out


_WORD = r"[A-Za-z0-9_]"


@lru_cache(maxsize=None)
def _phrase_re(phrase: str) -> re.Pattern:
    body = r"\s+".join(re.escape(w) for w in phrase.split())
    return re.compile(rf"(?<!{_WORD}){body}(?!{_WORD})", re.IGNORECASE)


def find_phrase(phrase: str, text: str) -> list[re.Match]:
    """Whole-word, case-insensitive occurrences of ``phrase`` in ``text``."""
    if not phrase.strip():
        return []
    return list(_phrase_re(phrase.strip()).finditer(text))


def text_fields(e: m.Element) -> Iterator[tuple[str, str, object]]:
    """(field label, text, span owner) for the fields ambiguity checks scan."""
    if e.name is not None:
        yield "name", e.name, e
    if e.description is not None:
        yield "description", e.description, e
    if isinstance(e, m.UserStory):
        yield "iWant", e.i_want, e
    if isinstance(e, m.UseCase):
        for sc in e.scenarios:
            for st in sc.steps:
                yield f"{sc.id} step {st.order}", st.action, st


def check_ambiguity(model: m.SpecificationModel, config: CheckConfig) -> list[Diagnostic]:
    terms = [e for e in model.elements if isinstance(e, m.GlossaryTerm)]
    preferred = [t for t in terms if t.preferred]
    out = []
    for e in model.elements:
        for label, text, owner in text_fields(e):
            span = _span(owner, e)
            hits = []
            for term in config.vague_terms:
                for mt in find_phrase(term, text):
                    hits.append((mt.start(), diagnostic(
                        "RSL-A010", f"{e.id} {label}: vague term '{mt.group(0)}'", span)))
            hits.sort(key=lambda h: h[0])
            out.extend(d for _, d in hits)
            hits = []
            for t in preferred:
                for syn in t.synonyms:
                    for mt in find_phrase(syn, text):
                        hits.append((mt.start(), diagnostic(
                            "RSL-A011",
                            f"{e.id} {label}: '{mt.group(0)}' is a non-preferred synonym; "
                            f"use '{t.term}'", span)))
            hits.sort(key=lambda h: h[0])
            out.extend(d for _, d in hits)
    for i, a in enumerate(preferred):
        for b in preferred[i + 1:]:
            a_syn = {s.lower() for s in a.synonyms}
            b_syn = {s.lower() for s in b.synonyms}
            if b.term.lower() in a_syn and a.term.lower() in b_syn:
                out.append(diagnostic(
                    "RSL-A012",
                    f"preferred terms '{a.term}' and '{b.term}' declare each other as synonyms",
                    b.span, related=[(a.span, "other term")] if a.span else []))
    return out


def check_all(model: m.SpecificationModel, config: CheckConfig) -> ValidationReport:
    diags = check_consistency(model)
    diags += check_completeness(model, config)
    diags += check_ambiguity(model, config)
    return ValidationReport(diags, config.strictness)
