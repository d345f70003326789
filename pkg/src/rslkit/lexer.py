"""Tokenizer for .rsl source text."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .diagnostics import Diagnostic, RslError, SourceSpan, diagnostic
from .model import KEYWORDS

KEYWORD = "Keyword"
IDENTIFIER = "Identifier"
STRING = "StringLiteral"
INT = "IntLiteral"
PUNCT = "Punct"
COMMENT = "Comment"
EOF = "EOF"

PUNCTUATION = set("{}[]():,.")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str  # exact source slice
    span: SourceSpan
    value: Optional[str] = None  # decoded string literal contents

    def __repr__(self) -> str:
        return f"{self.kind}({self.value if self.kind == STRING else self.text})"


def _is_ident_start(c: str) -> bool:
    return ("a" <= c <= "z") or ("A" <= c <= "Z")


def _is_ident_char(c: str) -> bool:
    return _is_ident_start(c) or ("0" <= c <= "9") or c == "_"


class Lexer:
    def __init__(self, source: str, file: str = "<input>"):
        self.src = source
        self.file = file
        self.pos = 0
        self.line = 1
        self.col = 1
        self.tokens: list[Token] = []
        self.diagnostics: list[Diagnostic] = []

    def _advance(self) -> str:
        c = self.src[self.pos]
        self.pos += 1
        if c == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        return c

    def _peek(self, k: int = 0) -> str:
        i = self.pos + k
        return self.src[i] if i < len(self.src) else ""

    def _span_from(self, line: int, col: int) -> SourceSpan:
        # inclusive end: the column of the last consumed character
        end_line, end_col = self.line, self.col - 1
        if end_col < 1:
            end_line, end_col = line, col
        return SourceSpan(self.file, line, col, end_line, end_col)

    def run(self) -> list[Token]:
        src = self.src
        while self.pos < len(src):
            c = src[self.pos]
            if c in " \t\r\n﻿":
                self._advance()
                continue
            line, col, start = self.line, self.col, self.pos
            if c == "/" and self._peek(1) == "/":
                while self.pos < len(src) and src[self.pos] != "\n":
                    self._advance()
                text = src[start:self.pos].rstrip("\r")
                self.tokens.append(Token(COMMENT, text, self._span_from(line, col)))
            elif c == '"':
                self._string(line, col, start)
            elif _is_ident_start(c):
                while self.pos < len(src) and _is_ident_char(src[self.pos]):
                    self._advance()
                text = src[start:self.pos]
                kind = KEYWORD if text in KEYWORDS else IDENTIFIER
                self.tokens.append(Token(kind, text, self._span_from(line, col)))
            elif "0" <= c <= "9":
                while self.pos < len(src) and "0" <= src[self.pos] <= "9":
                    self._advance()
                self.tokens.append(Token(INT, src[start:self.pos], self._span_from(line, col)))
            elif c in PUNCTUATION:
                self._advance()
                self.tokens.append(Token(PUNCT, c, self._span_from(line, col)))
            else:
                self._advance()
                self.diagnostics.append(diagnostic(
                    "RSL-P002", f"illegal character {c!r}", self._span_from(line, col)))
        span = SourceSpan(self.file, self.line, self.col, self.line, self.col)
        self.tokens.append(Token(EOF, "", span))
        return self.tokens

    def _string(self, line: int, col: int, start: int) -> None:
        self._advance()
        chars = []
        while True:
            c = self._peek()
            if c == "" or c == "\n" or c == "\r":
                # recover by closing the literal at end of line
                self.diagnostics.append(diagnostic(
                    "RSL-P001", "unterminated string literal", self._span_from(line, col)))
                break
            self._advance()
            if c == '"':
                break
            if c == "\\" and self._peek() in ('"', "\\"):
                chars.append(self._advance())
            else:
                chars.append(c)
        self.tokens.append(Token(STRING, self.src[start:self.pos],
                                 self._span_from(line, col), "".join(chars)))


def scan(source: str, file: str = "<input>") -> tuple[list[Token], list[Diagnostic]]:
    """Tokenize with recovery; returns every token plus lexical diagnostics."""
    lx = Lexer(source, file)
    tokens = lx.run()
    return tokens, lx.diagnostics


def tokenize(source: str, file: str = "<input>") -> list[Token]:
    """Tokenize ``source``; raises RslError on the first lexical error."""
    tokens, diags = scan(source, file)
    if diags:
        raise RslError(diags[0])
    return tokens


def quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'
