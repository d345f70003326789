"""Rule-based extraction of specification elements from free text.

Rules are tried in a fixed order and the first match wins:

1. ``As a[n] <X>, I want <Y>[,] so that <Z>``      -> UserStory
2. ``<subject> shall <predicate>`` with a quality keyword -> QualityRequirement
3. ``<subject> shall <verb phrase>``               -> UseCase stub
4. ``The goal is`` / ``We aim to`` / ``The objective is`` -> Goal
5. anything else                                   -> Unclassified
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import model as m
from .diagnostics import SourceSpan

USER_STORY = "UserStory"
USE_CASE = "UseCase"
QUALITY = "QualityRequirement"
GOAL = "Goal"
UNCLASSIFIED = "Unclassified"
CATEGORIES = (USER_STORY, USE_CASE, QUALITY, GOAL, UNCLASSIFIED)

QUALITY_KEYWORDS = ("secure", "usable", "reliable", "available", "maintainable", "respond",
                    "performance", "encrypted")

KEYWORD_QR_KIND = {
    "respond": "Performance",
    "performance": "Performance",
    "secure": "Security",
    "encrypted": "Security",
    "usable": "Usability",
    "reliable": "Reliability",
    "available": "Reliability",
    "maintainable": "Maintainability",
}

ID_PREFIX = {USER_STORY: "us", USE_CASE: "uc", QUALITY: "qr", GOAL: "g"}

_ABBREV_RE = re.compile(r"(?<![A-Za-z])(?:e\.g\.|i\.e\.|etc\.)", re.IGNORECASE)
_BLANK_LINE_RE = re.compile(r"\n[ \t\r]*\n")

_STORY_RE = re.compile(
    r"^as\s+an?\s+(?P<as_a>.+?)\s*,\s*i\s+want\s+(?P<i_want>.+?)\s*,?\s+so\s+that\s+(?P<so_that>.+)$",
    re.IGNORECASE | re.DOTALL)
_SHALL_RE = re.compile(r"^(?P<subject>.+?)\s+shall\s+(?P<predicate>.+)$",
                       re.IGNORECASE | re.DOTALL)
_GOAL_RE = re.compile(r"^(?:the\s+goal\s+is|we\s+aim\s+to|the\s+objective\s+is)(?![A-Za-z0-9_])"
                      r"\s*(?P<statement>.*)$", re.IGNORECASE | re.DOTALL)


def _squash(text: str) -> str:
    return " ".join(text.split())


def _body(sentence: str) -> str:
    """Sentence without surrounding whitespace and trailing terminators."""
    return _squash(sentence).rstrip(".!?").rstrip()


class _Positions:
    def __init__(self, text: str):
        self.starts = [0] + [i + 1 for i, c in enumerate(text) if c == "\n"]

    def at(self, offset: int) -> tuple[int, int]:
        lo, hi = 0, len(self.starts) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self.starts[mid] <= offset:
                lo = mid
            else:
                hi = mid - 1
        return lo + 1, offset - self.starts[lo] + 1


def split_sentences(text: str, file: str = "<text>") -> list[tuple[str, SourceSpan]]:
    """Split on ``.``, ``!``, ``?`` and blank lines.

    Dots of "e.g.", "i.e." and "etc.", and dots between two digits, do not end
    a sentence. Spans are inclusive and cover each trimmed sentence exactly.
    """
    protected = {mt.start() + i for mt in _ABBREV_RE.finditer(text)
                 for i, c in enumerate(mt.group(0)) if c == "."}
    breaks = {mt.start() for mt in _BLANK_LINE_RE.finditer(text)}
    pos = _Positions(text)
    segments = []
    start = 0
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if i in breaks:
            segments.append((start, i))
            start = i + 1
        elif c in ".!?":
            digit_dot = (c == "." and 0 < i < n - 1 and text[i - 1].isdigit()
                         and text[i + 1].isdigit())
            if i not in protected and not digit_dot:
                j = i + 1
                while j < n and text[j] in ".!?":
                    j += 1
                segments.append((start, j))
                start = j
                i = j
                continue
        i += 1
    segments.append((start, n))

    out = []
    for a, b in segments:
        chunk = text[a:b]
        stripped = chunk.strip()
        if not stripped:
            continue
        lead = len(chunk) - len(chunk.lstrip())
        s = a + lead
        e = s + len(stripped) - 1
        sl, sc = pos.at(s)
        el, ec = pos.at(e)
        out.append((stripped, SourceSpan(file, sl, sc, el, ec)))
    return out


def _find_keyword(predicate: str, keywords: Sequence[str]) -> Optional[str]:
    best = None
    for kw in keywords:
        mt = re.search(rf"(?<![A-Za-z0-9_]){re.escape(kw)}(?![A-Za-z0-9_])", predicate,
                       re.IGNORECASE)
        if mt and (best is None or mt.start() < best[0]):
            best = (mt.start(), kw)
    return best[1] if best else None


def classify_sentence(sentence: str,
                      quality_keywords: Sequence[str] = QUALITY_KEYWORDS) -> tuple[str, dict]:
    s = _body(sentence)
    mt = _STORY_RE.match(s)
    if mt:
        frags = {k: _squash(mt[k]) for k in ("as_a", "i_want", "so_that")}
        if all(frags.values()):
            return USER_STORY, frags
    mt = _SHALL_RE.match(s)
    if mt:
        subject, predicate = _squash(mt["subject"]), _squash(mt["predicate"])
        kw = _find_keyword(predicate, quality_keywords)
        if kw is not None:
            return QUALITY, {"subject": subject, "predicate": predicate, "keyword": kw}
        return USE_CASE, {"subject": subject, "action": predicate}
    mt = _GOAL_RE.match(s)
    if mt and mt["statement"].strip():
        return GOAL, {"statement": _squash(mt["statement"])}
    return UNCLASSIFIED, {}


def actor_id(phrase: str) -> str:
    return "a_" + re.sub(r"[^a-z0-9]", "_", phrase.strip().lower())


@dataclass(frozen=True)
class SentenceRecord:
    index: int
    text: str
    span: SourceSpan
    category: str
    extracted: Optional[str] = None
    fragments: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        s = self.span
        return {
            "index": self.index,
            "text": self.text,
            "span": {"startLine": s.start_line, "startCol": s.start_col,
                     "endLine": s.end_line, "endCol": s.end_col},
            "category": self.category,
            "element": self.extracted,
            "fragments": dict(self.fragments),
        }


@dataclass(frozen=True)
class ExtractionReport:
    sentences: tuple[SentenceRecord, ...]
    model: m.SpecificationModel
    counts: dict
    sources: dict  # element id -> index of the sentence that created it

    def to_dict(self) -> dict:
        return {
            "package": str(self.model.package_name),
            "sentences": [r.to_dict() for r in self.sentences],
            "counts": {c: self.counts[c] for c in CATEGORIES},
            "elementSources": dict(self.sources),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2) + "\n"


def extract_model(text: str, package_name, file: str = "<text>",
                  quality_keywords: Sequence[str] = QUALITY_KEYWORDS) -> ExtractionReport:
    sentences = split_sentences(text, file)
    classified = [classify_sentence(s, quality_keywords) for s, _ in sentences]

    # ids are assigned sequentially in sentence order
    model = m.new_model(package_name)
    counters = {c: 0 for c in ID_PREFIX}
    counts = {c: 0 for c in CATEGORIES}
    sources: dict[str, int] = {}
    records = []
    for index, ((sentence, span), (category, frags)) in enumerate(zip(sentences, classified)):
        counts[category] += 1
        if category == UNCLASSIFIED:
            records.append(SentenceRecord(index, sentence, span, category))
            continue
        counters[category] += 1
        eid = f"{ID_PREFIX[category]}_{counters[category]}"
        if category == USER_STORY:
            aid = actor_id(frags["as_a"])
            if m.resolve(model, aid) is None:
                model = m.add_element(model, m.Actor(aid, frags["as_a"], span=span, kind="User"))
                sources[aid] = index
            el = m.UserStory(eid, span=span, as_a=aid, i_want=frags["i_want"],
                             so_that=frags["so_that"])
        elif category == QUALITY:
            el = m.QualityRequirement(eid, _body(sentence), span=span,
                                      kind=KEYWORD_QR_KIND.get(frags["keyword"], "Other"))
        elif category == USE_CASE:
            el = m.UseCase(eid, frags["action"], _body(sentence), span=span, kind="Other")
        else:
            el = m.Goal(eid, frags["statement"], span=span)
        model = m.add_element(model, el)
        sources[eid] = index
        records.append(SentenceRecord(index, sentence, span, category, eid, frags))
    return ExtractionReport(tuple(records), model, counts, sources)
