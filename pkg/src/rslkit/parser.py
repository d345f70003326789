"""Recursive-descent parser for .rsl files.

Grammar (keywords are reserved and case-sensitive)::

    spec      := "Package" qname "{" { import | element } "}"
    import    := "Import" qname [ "as" ident ]
    actor     := "Actor" ident [ str ] ":" ident [ "[" [ "description" str ] "]" ]
    entity    := "DataEntity" ident [ str ] ":" ident "[" [ desc ] { attr } "]"
    attr      := "attribute" ident ":" ident [ "constraints" "(" ident { ident } ")" ]
                 [ "references" ref ]
    usecase   := "UseCase" ident [ str ] ":" ident "[" [ desc ] { ucprop | scenario } "]"
    ucprop    := "actorInitiates" ref | "dataEntity" ref { "," ref }
    scenario  := "scenario" ident ":" ident "[" { step } "]"
    step      := "step" int ":" ( "Actor" | "System" ) str
    story     := "UserStory" ident [ str ] "[" [ desc ] "asA" ref "iWant" str
                 [ "soThat" str ] [ "priority" ident ] "]"
    goal      := "Goal" ident [ str ] [ "[" [ desc ] [ "partOf" ref ] [ "priority" ident ] "]" ]
    qr        := "QR" ident [ str ] ":" ident [ "[" [ desc ] [ "metric" str ] [ "value" str ] "]" ]
    test      := "TestCase" ident [ str ] "[" [ desc ] "traces" ref [ "scenario" ident ]
                 { "given" str | "when" str | "then" str } "]"
    term      := "Term" str ":" ident [ "[" [ "definition" str ] { "synonym" str }
                 [ "notPreferred" ] "]" ]
    desc      := "description" str
    ref       := ident { "." ident }

On a malformed element the parser reports a diagnostic, drops the element and
resumes at the next element keyword outside any open bracket.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import model as m
from .diagnostics import Diagnostic, RslError, SourceSpan, diagnostic, has_errors
from .lexer import COMMENT, EOF, IDENTIFIER, INT, KEYWORD, PUNCT, STRING, Token, scan


@dataclass
class ParseResult:
    model: Optional[m.SpecificationModel]
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.model is not None and not has_errors(self.diagnostics)


class _Abort(Exception):
    """Unwinds out of a malformed element."""


def _describe(tok: Token) -> str:
    if tok.kind == EOF:
        return "end of file"
    if tok.kind == STRING:
        return "string literal"
    return f"'{tok.text}'"


class Parser:
    def __init__(self, tokens: list[Token], file: str):
        self.toks = [t for t in tokens if t.kind != COMMENT]
        self.file = file
        self.i = 0
        self.depth = 0
        self.diags: list[Diagnostic] = []
        self.bad = False  # current element had a non-fatal error

    # -- token helpers -------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def _next(self) -> Token:
        t = self.toks[self.i]
        if t.kind != EOF:
            self.i += 1
        if t.kind == PUNCT:
            if t.text == "[":
                self.depth += 1
            elif t.text == "]":
                self.depth -= 1
        return t

    def _is(self, text: str, kind: Optional[str] = None) -> bool:
        t = self.tok
        return t.text == text and t.kind in ((kind,) if kind else (KEYWORD, PUNCT))

    def _accept(self, text: str) -> Optional[Token]:
        if self._is(text):
            return self._next()
        return None

    def _fail(self, what: str) -> None:
        self.diags.append(diagnostic(
            "RSL-P010", f"expected {what}, found {_describe(self.tok)}", self.tok.span))
        raise _Abort

    def _expect(self, text: str) -> Token:
        if not self._is(text):
            self._fail(f"'{text}'")
        return self._next()

    def _ident(self, what: str = "identifier") -> Token:
        if self.tok.kind != IDENTIFIER:
            self._fail(what)
        return self._next()

    def _ref(self, what: str = "reference") -> str:
        parts = [self._ident(what).text]
        while self._is(".") and self.toks[self.i + 1].kind == IDENTIFIER:
            self._next()
            parts.append(self._next().text)
        return ".".join(parts)

    def _string(self, what: str = "string literal") -> str:
        if self.tok.kind != STRING:
            self._fail(what)
        return self._next().value

    def _opt_string(self) -> Optional[str]:
        if self.tok.kind == STRING:
            return self._next().value
        return None

    def _vocab(self, vocab: tuple[str, ...], what: str) -> str:
        t = self._ident(what)
        if t.text not in vocab:
            self.diags.append(diagnostic(
                "RSL-P012",
                f"unknown {what} '{t.text}'; allowed: {{{', '.join(vocab)}}}", t.span))
            self.bad = True
            return vocab[-1] if "Other" in vocab else vocab[0]
        return t.text

    def _once(self, seen: set, key: str, tok: Token) -> None:
        if key in seen:
            self.diags.append(diagnostic("RSL-P013", f"'{key}' given more than once", tok.span))
            self.bad = True
        seen.add(key)

    def _span(self, start: Token) -> SourceSpan:
        prev = self.toks[self.i - 1] if self.i > 0 else start
        return start.span.to(prev.span)

    # -- entry point ---------------------------------------------------

    def parse(self) -> Optional[m.SpecificationModel]:
        try:
            start = self._expect("Package")
            qname = [self._ident("package name").text]
            while self._accept("."):
                qname.append(self._ident("package name segment").text)
            self._expect("{")
        except _Abort:
            return None
        model = m.SpecificationModel(m.QualifiedName(tuple(qname)), source=self.file)
        imports: list[m.ImportDecl] = []
        while True:
            t = self.tok
            if t.kind == EOF:
                self.diags.append(diagnostic(
                    "RSL-P010", "expected '}' to close the package, found end of file", t.span))
                break
            if self._is("}"):
                self._next()
                if self.tok.kind != EOF:
                    self.diags.append(diagnostic(
                        "RSL-P010", f"expected end of file, found {_describe(self.tok)}",
                        self.tok.span))
                break
            if self._is("Import"):
                imp = self._guarded(self._import)
                if imp is not None:
                    if imp.alias is not None and any(i.alias == imp.alias for i in imports):
                        self.diags.append(diagnostic(
                            "RSL-P013", f"import alias '{imp.alias}' used twice", imp.span))
                    else:
                        imports.append(imp)
                continue
            if t.kind == KEYWORD and t.text in m.ELEMENT_KEYWORDS:
                el = self._guarded(getattr(self, "_" + m.ELEMENT_KEYWORDS[t.text]))
                if el is not None:
                    try:
                        model = m.add_element(model, el)
                    except RslError as exc:
                        self.diags.extend(exc.diagnostics)
                continue
            self.diags.append(diagnostic(
                "RSL-P011", f"unknown element keyword {_describe(t)}", t.span))
            self._next()
            self._recover()
        end = self.toks[self.i - 1] if self.i > 0 else start
        return m.SpecificationModel(model.package_name, tuple(imports), model.elements,
                                    source=self.file, span=start.span.to(end.span))

    def _guarded(self, fn):
        self.depth = 0
        self.bad = False
        start = self.tok
        try:
            result = fn()
        except _Abort:
            self._recover()
            return None
        except ValueError as exc:
            self.diags.append(diagnostic("RSL-P013", str(exc), self._span(start)))
            return None
        if self.bad:
            return None
        return result

    def _recover(self) -> None:
        depth = max(self.depth, 0)
        while True:
            t = self.tok
            if t.kind == EOF:
                return
            if depth == 0 and t.kind == KEYWORD and (t.text in m.ELEMENT_KEYWORDS or t.text == "Import"):
                return
            if depth == 0 and t.kind == PUNCT and t.text == "}":
                return
            if t.kind == PUNCT and t.text == "[":
                depth += 1
            elif t.kind == PUNCT and t.text == "]":
                depth = max(depth - 1, 0)
            self.i += 1

    # -- productions ---------------------------------------------------

    def _import(self) -> m.ImportDecl:
        start = self._expect("Import")
        parts = [self._ident("package name").text]
        while self._accept("."):
            parts.append(self._ident("package name segment").text)
        alias = None
        if self._accept("as"):
            alias = self._ident("import alias").text
        return m.ImportDecl(m.QualifiedName(tuple(parts)), alias, span=self._span(start))

    def _header(self, keyword: str):
        start = self._expect(keyword)
        ident = self._ident("element identifier").text
        name = self._opt_string()
        return start, ident, name

    def _description(self) -> Optional[str]:
        if self._accept("description"):
            return self._string()
        return None

    def _Actor(self) -> m.Actor:
        start, ident, name = self._header("Actor")
        self._expect(":")
        kind = self._vocab(m.ACTOR_KINDS, "actor kind")
        desc = None
        if self._accept("["):
            desc = self._description()
            self._expect("]")
        return m.Actor(ident, name, desc, span=self._span(start), kind=kind)

    def _DataEntity(self) -> m.DataEntity:
        start, ident, name = self._header("DataEntity")
        self._expect(":")
        kind = self._vocab(m.ENTITY_KINDS, "entity kind")
        self._expect("[")
        desc = self._description()
        attrs = []
        while self._is("attribute"):
            attrs.append(self._attribute())
        self._expect("]")
        return m.DataEntity(ident, name, desc, span=self._span(start), kind=kind,
                            attributes=tuple(attrs))

    def _attribute(self) -> m.DataAttribute:
        start = self._expect("attribute")
        name = self._ident("attribute name").text
        self._expect(":")
        datatype = self._vocab(m.DATATYPES, "datatype")
        cons = []
        if self._accept("constraints"):
            self._expect("(")
            cons.append(self._vocab(m.CONSTRAINTS, "constraint"))
            while not self._is(")"):
                cons.append(self._vocab(m.CONSTRAINTS, "constraint"))
            self._expect(")")
        target = None
        if self._accept("references"):
            target = self._ref("referenced data entity")
        return m.DataAttribute(name, datatype, frozenset(cons), target, span=self._span(start))

    def _UseCase(self) -> m.UseCase:
        start, ident, name = self._header("UseCase")
        self._expect(":")
        kind = self._vocab(m.USE_CASE_KINDS, "use case kind")
        self._expect("[")
        desc = self._description()
        actor = None
        entities: list[str] = []
        scenarios = []
        seen: set = set()
        while not self._is("]"):
            t = self.tok
            if self._accept("actorInitiates"):
                self._once(seen, "actorInitiates", t)
                actor = self._ref("actor reference")
            elif self._accept("dataEntity"):
                entities.append(self._ref("data entity reference"))
                while self._accept(","):
                    entities.append(self._ref("data entity reference"))
            elif self._is("scenario"):
                scenarios.append(self._scenario())
            else:
                self._fail("'actorInitiates', 'dataEntity', 'scenario' or ']'")
        self._expect("]")
        return m.UseCase(ident, name, desc, span=self._span(start), kind=kind,
                         primary_actor=actor, data_entities=tuple(entities),
                         scenarios=tuple(scenarios))

    def _scenario(self) -> m.Scenario:
        start = self._expect("scenario")
        sid = self._ident("scenario identifier").text
        self._expect(":")
        kind = self._vocab(m.SCENARIO_KINDS, "scenario kind")
        self._expect("[")
        steps = []
        while self._is("step"):
            st = self._next()
            if self.tok.kind != INT:
                self._fail("step number")
            order = int(self._next().text)
            self._expect(":")
            if self._is("Actor") or self._is("System"):
                performer = self._next().text
            else:
                self._fail("'Actor' or 'System'")
            action = self._string("step action")
            steps.append(m.Step(order, performer, action, span=self._span(st)))
        self._expect("]")
        return m.Scenario(sid, kind, tuple(steps), span=self._span(start))

    def _UserStory(self) -> m.UserStory:
        start, ident, name = self._header("UserStory")
        self._expect("[")
        desc = self._description()
        self._expect("asA")
        as_a = self._ref("actor reference")
        self._expect("iWant")
        i_want = self._string()
        so_that = None
        if self._accept("soThat"):
            so_that = self._string()
        priority = "Unset"
        if self._accept("priority"):
            priority = self._vocab(m.PRIORITIES, "priority")
        self._expect("]")
        return m.UserStory(ident, name, desc, span=self._span(start), as_a=as_a,
                           i_want=i_want, so_that=so_that, priority=priority)

    def _Goal(self) -> m.Goal:
        start, ident, name = self._header("Goal")
        desc, parent, priority = None, None, "Unset"
        if self._accept("["):
            desc = self._description()
            if self._accept("partOf"):
                parent = self._ref("goal reference")
            if self._accept("priority"):
                priority = self._vocab(m.PRIORITIES, "priority")
            self._expect("]")
        return m.Goal(ident, name, desc, span=self._span(start), parent=parent,
                      priority=priority)

    def _QualityRequirement(self) -> m.QualityRequirement:
        start, ident, name = self._header("QR")
        self._expect(":")
        kind = self._vocab(m.QR_KINDS, "quality requirement kind")
        desc = metric = value = None
        if self._accept("["):
            desc = self._description()
            if self._accept("metric"):
                metric = self._string()
            if self._accept("value"):
                value = self._string()
            self._expect("]")
        return m.QualityRequirement(ident, name, desc, span=self._span(start), kind=kind,
                                    metric=metric, target_value=value)

    def _TestCase(self) -> m.TestCase:
        start, ident, name = self._header("TestCase")
        self._expect("[")
        desc = self._description()
        self._expect("traces")
        traces = self._ref("use case or user story reference")
        scenario = None
        if self._accept("scenario"):
            scenario = self._ident("scenario identifier").text
        parts: dict[str, list[str]] = {"given": [], "when": [], "then": []}
        while not self._is("]"):
            t = self.tok
            if t.kind == KEYWORD and t.text in parts:
                self._next()
                parts[t.text].append(self._string())
            else:
                self._fail("'given', 'when', 'then' or ']'")
        self._expect("]")
        return m.TestCase(ident, name, desc, span=self._span(start), traces_to=traces,
                          scenario_ref=scenario, given=tuple(parts["given"]),
                          when=tuple(parts["when"]), then=tuple(parts["then"]))

    def _GlossaryTerm(self) -> m.GlossaryTerm:
        start = self._expect("Term")
        term = self._string("term text")
        self._expect(":")
        pos = self._vocab(m.PARTS_OF_SPEECH, "part of speech")
        definition, synonyms, preferred = None, [], True
        if self._accept("["):
            if self._accept("definition"):
                definition = self._string()
            while self._accept("synonym"):
                synonyms.append(self._string())
            if self._accept("notPreferred"):
                preferred = False
            self._expect("]")
        return m.GlossaryTerm(term=term, part_of_speech=pos, definition=definition,
                              synonyms=tuple(synonyms), preferred=preferred,
                              span=self._span(start))


def parse(source: str, file: str = "<input>") -> ParseResult:
    tokens, diags = scan(source, file)
    p = Parser(tokens, file)
    model = p.parse()
    diags = diags + p.diags
    if model is None and not has_errors(diags):
        diags.append(diagnostic("RSL-P010", "expected 'Package'", tokens[0].span))
    return ParseResult(model, diags)


def parse_file(path) -> ParseResult:
    with open(path, encoding="utf-8", newline="") as fh:
        text = fh.read()
    return parse(text, str(path))
