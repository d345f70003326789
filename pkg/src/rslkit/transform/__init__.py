"""Model transformations: JSON and workbook interchange, documents, SQL."""

from .jsonio import export_json, import_json
from .render import render_document, render_style
from .sqlgen import generate_sql
from .workbook import export_workbook, import_workbook

__all__ = [
    "export_json",
    "import_json",
    "export_workbook",
    "import_workbook",
    "render_document",
    "render_style",
    "generate_sql",
]
