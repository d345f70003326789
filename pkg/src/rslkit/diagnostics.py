"""Diagnostic records, the code registry, and the exception that carries them."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional

ERROR = "Error"
WARNING = "Warning"
INFO = "Info"
SEVERITIES = (ERROR, WARNING, INFO)

CODE_RE = re.compile(r"^RSL-[PCXAITL][0-9]{3}$")

# code -> (default severity, one-line meaning)
REGISTRY: dict[str, tuple[str, str]] = {
    "RSL-P001": (ERROR, "unterminated string literal"),
    "RSL-P002": (ERROR, "illegal character"),
    "RSL-P010": (ERROR, "expected token not found"),
    "RSL-P011": (ERROR, "unknown element keyword"),
    "RSL-P012": (ERROR, "unknown vocabulary literal"),
    "RSL-P013": (ERROR, "element violates a construction rule"),
    "RSL-C001": (ERROR, "duplicate element identifier"),
    "RSL-C010": (ERROR, "unresolved reference"),
    "RSL-C011": (ERROR, "reference resolves to an element of the wrong kind"),
    "RSL-C012": (ERROR, "non-ascending or duplicate step order in a scenario"),
    "RSL-C013": (ERROR, "duplicate scenario id in a use case"),
    "RSL-C014": (ERROR, "goal partOf cycle"),
    "RSL-C015": (ERROR, "more than one Main scenario in a use case"),
    "RSL-C016": (ERROR, "foreign key on an attribute that is not Integer or Text"),
    "RSL-C017": (ERROR, "duplicate attribute name in a data entity"),
    "RSL-C018": (ERROR, "more than one PrimaryKey attribute in a data entity"),
    "RSL-X001": (ERROR, "malformed construct rule token in check configuration"),
    "RSL-X002": (ERROR, "invalid check configuration"),
    "RSL-X010": (WARNING, "required element kind has no instances"),
    "RSL-X011": (WARNING, "viewpoint has no instances"),
    "RSL-X012": (WARNING, "element violates a construct rule"),
    "RSL-A010": (WARNING, "vague term"),
    "RSL-A011": (WARNING, "non-preferred terminology"),
    "RSL-A012": (WARNING, "conflicting glossary terms"),
    "RSL-I010": (ERROR, "import not found"),
    "RSL-I011": (ERROR, "imported file fails to parse"),
    "RSL-I012": (ERROR, "import cycle"),
    "RSL-I013": (ERROR, "imported file declares a different package"),
    "RSL-T010": (ERROR, "unknown field in JSON document"),
    "RSL-T011": (ERROR, "unsupported JSON schema version"),
    "RSL-T012": (ERROR, "malformed JSON document"),
    "RSL-T020": (ERROR, "workbook I/O failure"),
    "RSL-T021": (ERROR, "orphan row in workbook"),
    "RSL-T022": (ERROR, "missing required workbook column or table"),
    "RSL-T023": (ERROR, "bad vocabulary literal in workbook"),
    "RSL-T024": (WARNING, "unknown workbook file ignored"),
    "RSL-T025": (ERROR, "malformed workbook value"),
    "RSL-T030": (ERROR, "unknown template path"),
    "RSL-T031": (ERROR, "unknown linguistic style"),
    "RSL-T032": (ERROR, "unbalanced or malformed template tags"),
    "RSL-T040": (ERROR, "foreign key target has no PrimaryKey attribute"),
    "RSL-T041": (ERROR, "code generation precondition violated"),
    "RSL-L010": (ERROR, "qualified name collision after merge"),
    "RSL-L011": (ERROR, "library manifest is malformed or names the wrong package"),
}

for _code in REGISTRY:
    assert CODE_RE.match(_code), _code


@dataclass(frozen=True, order=True)
class SourceSpan:
    """Inclusive 1-based region of a source file."""

    file: str
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def __post_init__(self):
        for v in (self.start_line, self.start_col, self.end_line, self.end_col):
            if v < 1:
                raise ValueError(f"span coordinates are 1-based, got {v}")
        if (self.start_line, self.start_col) > (self.end_line, self.end_col):
            raise ValueError("span start follows its end")

    def to(self, other: SourceSpan) -> SourceSpan:
        return SourceSpan(self.file, self.start_line, self.start_col,
                          other.end_line, other.end_col)

    def __str__(self) -> str:
        return f"{self.file}:{self.start_line}:{self.start_col}"


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    code: str
    message: str
    span: Optional[SourceSpan] = None
    related: tuple[tuple[SourceSpan, str], ...] = ()

    def __post_init__(self):
        if self.code not in REGISTRY:
            raise ValueError(f"unregistered diagnostic code {self.code}")
        if self.severity not in SEVERITIES:
            raise ValueError(f"bad severity {self.severity}")

    def render(self, fallback_file: str = "<input>") -> str:
        """Editor-style line: ``file:line:col: severity[code]: message``."""
        if self.span is not None:
            loc = f"{self.span.file}:{self.span.start_line}:{self.span.start_col}"
        else:
            loc = f"{fallback_file}:1:1"
        return f"{loc}: {self.severity.lower()}[{self.code}]: {self.message}"

    def to_dict(self) -> dict:
        span = None
        if self.span is not None:
            s = self.span
            span = {"file": s.file, "startLine": s.start_line, "startCol": s.start_col,
                    "endLine": s.end_line, "endCol": s.end_col}
        return {"severity": self.severity, "code": self.code,
                "message": self.message, "span": span}


def diagnostic(code: str, message: str, span: Optional[SourceSpan] = None, *,
               severity: Optional[str] = None,
               related: Iterable[tuple[SourceSpan, str]] = ()) -> Diagnostic:
    """Build a diagnostic, taking the severity from the registry unless overridden."""
    if code not in REGISTRY:
        raise ValueError(f"unregistered diagnostic code {code}")
    return Diagnostic(severity or REGISTRY[code][0], code, message, span, tuple(related))


def has_errors(diags: Iterable[Diagnostic]) -> bool:
    return any(d.severity == ERROR for d in diags)


class RslError(Exception):
    """Raised by operations whose failure is described by diagnostics."""

    def __init__(self, diagnostics: Iterable[Diagnostic] | Diagnostic):
        if isinstance(diagnostics, Diagnostic):
            diagnostics = [diagnostics]
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(f"{d.code}: {d.message}" for d in self.diagnostics))

    @property
    def codes(self) -> list[str]:
        return [d.code for d in self.diagnostics]


def registry_table() -> str:
    """Markdown table of every diagnostic code (source of docs/diagnostics.md)."""
    lines = [
        "# Diagnostic codes",
        "",
        "Generated from `rslkit.diagnostics.REGISTRY`; do not edit by hand.",
        "",
        "| Code | Severity | Meaning |",
        "|------|----------|---------|",
    ]
    for code, (sev, meaning) in REGISTRY.items():
        lines.append(f"| {code} | {sev} | {meaning} |")
    return "\n".join(lines) + "\n"
