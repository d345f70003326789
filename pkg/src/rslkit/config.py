"""Check configuration (``rslcheck.json``)."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Union

from .diagnostics import RslError, diagnostic
from .model import ELEMENT_KINDS

ERRORS_ONLY = "ErrorsOnly"
WARNINGS_AS_ERRORS = "WarningsAsErrors"

_KEYS = ("modelRequiredKinds", "viewpoints", "constructRules", "vagueTerms", "strictness")


@dataclass(frozen=True)
class CheckConfig:
    model_required_kinds: frozenset = frozenset()
    viewpoints: dict = field(default_factory=dict)
    construct_rules: dict = field(default_factory=dict)
    vague_terms: tuple = ()
    strictness: str = ERRORS_ONLY

    def __post_init__(self):
        problems = []
        object.__setattr__(self, "model_required_kinds", frozenset(self.model_required_kinds))
        object.__setattr__(self, "viewpoints",
                           {k: frozenset(v) for k, v in self.viewpoints.items()})
        object.__setattr__(self, "construct_rules",
                           {k: tuple(v) for k, v in self.construct_rules.items()})
        object.__setattr__(self, "vague_terms",
                           tuple(t.lower() for t in self.vague_terms))
        named = set(self.model_required_kinds) | set(self.construct_rules)
        for kinds in self.viewpoints.values():
            named |= kinds
        for kind in sorted(named - set(ELEMENT_KINDS)):
            problems.append(f"unknown element kind {kind!r}")
        if self.strictness not in (ERRORS_ONLY, WARNINGS_AS_ERRORS):
            problems.append(f"unknown strictness {self.strictness!r}")
        if problems:
            raise RslError([diagnostic("RSL-X002", p) for p in problems])

    @classmethod
    def from_dict(cls, data: dict) -> CheckConfig:
        if not isinstance(data, dict):
            raise RslError(diagnostic("RSL-X002", "configuration must be a JSON object"))
        unknown = [k for k in data if k not in _KEYS and not k.startswith("$")]
        if unknown:
            raise RslError(diagnostic("RSL-X002", f"unknown configuration keys {unknown}"))
        try:
            return cls(
                model_required_kinds=frozenset(data.get("modelRequiredKinds", [])),
                viewpoints={k: list(v) for k, v in data.get("viewpoints", {}).items()},
                construct_rules={k: list(v) for k, v in data.get("constructRules", {}).items()},
                vague_terms=tuple(data.get("vagueTerms", [])),
                strictness=data.get("strictness", ERRORS_ONLY),
            )
        except (TypeError, AttributeError) as exc:
            raise RslError(diagnostic("RSL-X002", f"malformed configuration: {exc}")) from None


def _strip_comments(text: str) -> str:
    return "\n".join(line for line in text.splitlines()
                     if not line.lstrip().startswith("//"))


def parse_config(text: str) -> CheckConfig:
    try:
        data = json.loads(_strip_comments(text))
    except json.JSONDecodeError as exc:
        raise RslError(diagnostic("RSL-X002", f"configuration is not valid JSON: {exc}")) from None
    return CheckConfig.from_dict(data)


def default_config_text() -> str:
    return resources.files("rslkit").joinpath("rslcheck.json").read_text("utf-8")


def default_config() -> CheckConfig:
    return parse_config(default_config_text())


def load_config(path: Union[str, Path, None] = None) -> CheckConfig:
    """Load ``path``, or ``./rslcheck.json`` if present, else the shipped default."""
    if path is None:
        local = Path("rslcheck.json")
        if not local.is_file():
            return default_config()
        path = local
    return parse_config(Path(path).read_text(encoding="utf-8"))


RULE_SET_RE = re.compile(r"^(?P<field>[a-z][a-z_]*):set$")
RULE_MIN_RE = re.compile(r"^(?P<field>[a-z][a-z_]*)>=(?P<n>[0-9]+)$")


@dataclass(frozen=True)
class ConstructRule:
    token: str
    field: str
    minimum: Optional[int]  # None means a ":set" rule


def parse_rule(kind: str, token: str) -> ConstructRule:
    """Parse one construct rule token for ``kind``; raises RslError(RSL-X001)."""
    from .patterns import pattern_for

    pattern = pattern_for(kind)
    mt = RULE_SET_RE.match(token)
    if mt:
        fld = mt["field"]
        if pattern.rule(fld) is None:
            raise RslError(diagnostic("RSL-X001", f"{kind} rule {token!r}: no field {fld!r}"))
        return ConstructRule(token, fld, None)
    mt = RULE_MIN_RE.match(token)
    if mt:
        fld = mt["field"]
        rule = pattern.rule(fld)
        if rule is None or not rule.is_collection:
            raise RslError(diagnostic(
                "RSL-X001", f"{kind} rule {token!r}: {fld!r} is not a collection of {kind}"))
        return ConstructRule(token, fld, int(mt["n"]))
    raise RslError(diagnostic(
        "RSL-X001", f"{kind} rule {token!r} is neither '<field>:set' nor '<collection>>=<n>'"))
