from pathlib import Path

import pytest

from rslkit.config import default_config, load_config
from rslkit.diagnostics import (CODE_RE, REGISTRY, Diagnostic, RslError, SourceSpan,
                                diagnostic, has_errors, registry_table)

DOCS = Path(__file__).resolve().parent.parent / "docs"


def test_registry_codes_are_well_formed():
    assert all(CODE_RE.match(c) for c in REGISTRY)
    assert {sev for sev, _ in REGISTRY.values()} <= {"Error", "Warning", "Info"}


def test_render_with_span():
    d = diagnostic("RSL-C010", "unresolved reference 'x'", SourceSpan("a.rsl", 3, 7, 3, 9))
    assert d.render() == "a.rsl:3:7: error[RSL-C010]: unresolved reference 'x'"


def test_render_without_span_uses_fallback():
    d = diagnostic("RSL-X010", "no Goal")
    assert d.render("m.rsl") == "m.rsl:1:1: warning[RSL-X010]: no Goal"


def test_severity_override():
    assert diagnostic("RSL-A010", "vague", severity="Error").severity == "Error"


def test_unknown_code_rejected():
    with pytest.raises(ValueError):
        diagnostic("RSL-Z999", "nope")
    with pytest.raises(ValueError):
        Diagnostic("Error", "RSL-C999", "nope")


def test_span_validation():
    with pytest.raises(ValueError):
        SourceSpan("f", 0, 1, 1, 1)
    with pytest.raises(ValueError):
        SourceSpan("f", 2, 1, 1, 5)
    a, b = SourceSpan("f", 1, 2, 1, 4), SourceSpan("f", 3, 1, 3, 8)
    assert a.to(b) == SourceSpan("f", 1, 2, 3, 8)


def test_rsl_error_carries_codes():
    err = RslError([diagnostic("RSL-T012", "bad"), diagnostic("RSL-T010", "extra")])
    assert err.codes == ["RSL-T012", "RSL-T010"]
    assert has_errors(err.diagnostics)
    assert RslError(diagnostic("RSL-T012", "bad")).codes == ["RSL-T012"]


def test_to_dict():
    d = diagnostic("RSL-C017", "dup", SourceSpan("f", 1, 2, 3, 4))
    assert d.to_dict() == {"severity": "Error", "code": "RSL-C017", "message": "dup",
                           "span": {"file": "f", "startLine": 1, "startCol": 2,
                                    "endLine": 3, "endCol": 4}}


def test_docs_table_is_current():
    assert (DOCS / "diagnostics.md").read_text(encoding="utf-8") == registry_table()


def test_shipped_config_loads():
    cfg = default_config()
    assert load_config(None) == cfg
