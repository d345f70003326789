"""Tagged-template document rendering.

Tag syntax:

* ``{{path}}`` substitutes a value looked up in the current context, then in
  enclosing ones;
* ``{{#each name}}...{{/each}}`` iterates an element kind (``Actor``,
  ``UseCase``...) at top level, or a collection field (``scenarios``,
  ``steps``, ``attributes``, ``given``...) inside an element; ``{{this}}``
  is the current item;
* ``{{#if path}}...{{else}}...{{/if}}`` renders the first branch when the
  value is present and non-empty;
* ``{{style:<id>}}`` renders the current element through a linguistic style.

A block tag alone on its line consumes that whole line. Unknown paths and
styles are errors, never empty output.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Union

from .. import model as m
from ..diagnostics import RslError, diagnostic
from ..patterns import LinguisticStyle, load_styles, pattern_for

TAG_RE = re.compile(r"\{\{(.*?)\}\}", re.DOTALL)
_PATH_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*(\.[A-Za-z_][A-Za-z0-9_]*)*$")
_STYLE_RE = re.compile(r"^style:([A-Za-z][A-Za-z0-9_]*)$")
_BLOCK_RE = re.compile(r"^(#each|#if)\s+(\S+)$")


@dataclass
class _Node:
    kind: str  # text | var | each | if | style
    value: str
    line: int
    children: list = field(default_factory=list)
    alternative: list = field(default_factory=list)


def _error(code: str, line: int, msg: str) -> RslError:
    return RslError(diagnostic(code, f"template line {line}: {msg}"))


def _strip_standalone(text: str) -> list[tuple[str, object, int]]:
    """Split into ('text', str, line) and ('tag', inner, line) pieces."""
    pieces = []
    pos = 0
    line = 1
    for mt in TAG_RE.finditer(text):
        pieces.append(("text", text[pos:mt.start()], line))
        line += text.count("\n", pos, mt.start())
        pieces.append(("tag", mt.group(1).strip(), line))
        line += mt.group(0).count("\n")
        pos = mt.end()
    pieces.append(("text", text[pos:], line))
    leftover = [p for p in pieces if p[0] == "text" and "{{" in p[1]]
    if leftover:
        raise _error("RSL-T032", leftover[0][2] + leftover[0][1].split("{{")[0].count("\n"),
                     "'{{' without matching '}}'")

    def is_block(inner: str) -> bool:
        return inner.startswith(("#", "/")) or inner == "else"

    # a block tag alone on its line swallows the line's indentation and newline
    line_start = True  # the text before pieces[i - 1] ended a line
    for i in range(1, len(pieces) - 1, 2):
        kind, inner, _ = pieces[i]
        before, after = pieces[i - 1][1], pieces[i + 1][1]
        head = before.rsplit("\n", 1)
        at_line_start = (len(head) == 2 or line_start) and head[-1].strip() == ""
        line_start = False
        if not is_block(inner):
            continue
        tail = after.split("\n", 1)
        at_line_end = len(tail) == 2 and tail[0].strip() == ""
        at_eof = len(tail) == 1 and tail[0].strip() == "" and i + 1 == len(pieces) - 1
        if at_line_start and (at_line_end or at_eof):
            pieces[i - 1] = ("text", before[:len(before) - len(head[-1])], pieces[i - 1][2])
            pieces[i + 1] = ("text", tail[1] if at_line_end else "", pieces[i + 1][2])
            line_start = True
    return pieces


def parse_template(text: str) -> list[_Node]:
    root: list[_Node] = []
    stack: list[tuple[_Node, list]] = []
    current = root
    for kind, value, line in _strip_standalone(text):
        if kind == "text":
            if value:
                current.append(_Node("text", value, line))
            continue
        inner = value
        mb = _BLOCK_RE.match(inner)
        if mb:
            node = _Node(mb.group(1)[1:], mb.group(2), line)
            current.append(node)
            stack.append((node, current))
            current = node.children
        elif inner in ("/each", "/if"):
            if not stack or stack[-1][0].kind != inner[1:]:
                raise _error("RSL-T032", line, f"'{{{{{inner}}}}}' does not close an open block")
            current = stack.pop()[1]
        elif inner == "else":
            if not stack or stack[-1][0].kind != "if":
                raise _error("RSL-T032", line, "'{{else}}' outside an '{{#if}}' block")
            current = stack[-1][0].alternative
        elif _STYLE_RE.match(inner):
            current.append(_Node("style", _STYLE_RE.match(inner).group(1), line))
        elif _PATH_RE.match(inner):
            current.append(_Node("var", inner, line))
        else:
            raise _error("RSL-T032", line, f"malformed tag '{{{{{inner}}}}}'")
    if stack:
        node = stack[-1][0]
        raise _error("RSL-T032", node.line, f"'{{{{#{node.kind} {node.value}}}}}' is never closed")
    return root


_MISSING = object()

_FIELDS = {
    m.Scenario: ("id", "kind", "steps"),
    m.Step: ("order", "performer", "action"),
    m.DataAttribute: ("name", "datatype", "constraints", "foreign_key_target"),
    m.ImportDecl: ("target", "alias"),
}


class _Root:
    def __init__(self, model: m.SpecificationModel):
        self.model = model

    def get(self, name: str):
        if name == "package":
            return str(self.model.package_name)
        if name == "imports":
            return list(self.model.imports)
        if name == "elements":
            return list(self.model.elements)
        if name in m.ELEMENT_TYPES:
            return self.model.of_kind(name)
        return _MISSING


def _lookup_in(obj, name: str):
    if isinstance(obj, _Root):
        return obj.get(name)
    if isinstance(obj, m.Element):
        if name == "element_kind":
            return obj.KIND
        if pattern_for(obj.KIND).rule(name) is not None:
            return getattr(obj, name)
        return _MISSING
    for cls, names in _FIELDS.items():
        if isinstance(obj, cls):
            return getattr(obj, name) if name in names else _MISSING
    if name == "this":
        return obj
    return _MISSING


def _text(value) -> Optional[str]:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (str, int, m.QualifiedName)):
        return str(value)
    if isinstance(value, frozenset):
        return ", ".join(c for c in m.CONSTRAINTS if c in value)
    if isinstance(value, (list, tuple)) and all(isinstance(v, str) for v in value):
        return ", ".join(value)
    return None


def _present(value) -> bool:
    if value is None or value is False or value == "Unset":
        return False
    if isinstance(value, (str, list, tuple, frozenset)):
        return len(value) > 0
    return True


class Renderer:
    def __init__(self, model: m.SpecificationModel, styles: Iterable[LinguisticStyle] = ()):
        self.model = model
        self.styles = {s.style_id: s for s in styles}
        self._style_cache: dict[str, list[_Node]] = {}

    def _resolve(self, stack: list, path: str, line: int):
        first, *rest = path.split(".")
        for obj in reversed(stack):
            value = _lookup_in(obj, first)
            if value is not _MISSING:
                break
        else:
            raise _error("RSL-T030", line, f"unknown path '{path}'")
        for part in rest:
            value = _lookup_in(value, part) if value is not None else None
            if value is _MISSING:
                raise _error("RSL-T030", line, f"unknown path '{path}'")
        return value

    def _render(self, nodes: list[_Node], stack: list, out: list[str]) -> None:
        for node in nodes:
            if node.kind == "text":
                out.append(node.value)
            elif node.kind == "var":
                value = self._resolve(stack, node.value, node.line)
                text = _text(value)
                if text is None:
                    raise _error("RSL-T030", node.line,
                                 f"'{node.value}' is a collection; iterate it with #each")
                out.append(text)
            elif node.kind == "if":
                value = self._resolve(stack, node.value, node.line)
                self._render(node.children if _present(value) else node.alternative, stack, out)
            elif node.kind == "each":
                value = self._resolve(stack, node.value, node.line)
                if value is None:
                    value = []
                if not isinstance(value, (list, tuple)):
                    raise _error("RSL-T030", node.line, f"'{node.value}' is not a collection")
                for item in value:
                    self._render(node.children, stack + [item], out)
            elif node.kind == "style":
                self._style(node, stack, out)

    def _style(self, node: _Node, stack: list, out: list[str]) -> None:
        style = self.styles.get(node.value)
        if style is None:
            raise _error("RSL-T031", node.line, f"unknown style '{node.value}'")
        element = next((o for o in reversed(stack) if isinstance(o, m.Element)), None)
        if element is None:
            raise _error("RSL-T031", node.line,
                         f"style '{node.value}' used outside an element block")
        if element.KIND != style.pattern:
            raise _error("RSL-T031", node.line,
                         f"style '{node.value}' renders {style.pattern}, not {element.KIND}")
        if style.style_id not in self._style_cache:
            self._style_cache[style.style_id] = parse_template(style.template)
        self._render(self._style_cache[style.style_id], [element], out)

    def render(self, template: str) -> str:
        nodes = parse_template(template)
        out: list[str] = []
        self._render(nodes, [_Root(self.model)], out)
        return "".join(out)


def render_document(model: m.SpecificationModel, template: str,
                    styles: Optional[Iterable[LinguisticStyle]] = None) -> str:
    """Expand ``template`` over ``model``; built-in styles are used when none are given."""
    if styles is None:
        styles = load_styles()
    return Renderer(model, styles).render(template)


def render_style(element: m.Element, style: LinguisticStyle) -> str:
    """Render one element through one style."""
    if element.KIND != style.pattern:
        raise RslError(diagnostic(
            "RSL-T031", f"style '{style.style_id}' renders {style.pattern}, not {element.KIND}"))
    out: list[str] = []
    Renderer(m.SpecificationModel(m.QualifiedName(("style",))), [style])._render(
        parse_template(style.template), [element], out)
    return "".join(out)


def default_template() -> str:
    return resources.files("rslkit").joinpath("templates/srs.md.tmpl").read_text("utf-8")


def load_template(path: Union[str, Path, None] = None) -> str:
    if path is None:
        return default_template()
    return Path(path).read_text(encoding="utf-8")
