"""Tabular workbook: a directory of RFC-4180 CSV files, one table per element kind.

Element tables carry a ``seq`` column holding the element's position in the
model, so the cross-kind element order survives the split into files.
Multi-valued cells (data entity lists, constraints, synonyms) are
space-separated when they hold identifiers and newline-separated when they
hold text.
"""

from __future__ import annotations

import csv
import os
from collections import defaultdict
from pathlib import Path
from typing import Union

from .. import model as m
from ..diagnostics import Diagnostic, RslError, SourceSpan, diagnostic, has_errors
from ..parser import ParseResult

TABLES: dict[str, tuple[str, ...]] = {
    "package.csv": ("record", "name", "alias"),
    "actors.csv": ("seq", "id", "name", "description", "kind"),
    "data_entities.csv": ("seq", "id", "name", "description", "kind"),
    "attributes.csv": ("entity_id", "name", "datatype", "constraints", "references"),
    "use_cases.csv": ("seq", "id", "name", "description", "kind", "primary_actor",
                      "data_entities"),
    "scenarios.csv": ("use_case_id", "id", "kind"),
    "steps.csv": ("scenario_id", "use_case_id", "order", "performer", "action"),
    "user_stories.csv": ("seq", "id", "name", "description", "as_a", "i_want", "so_that",
                         "priority"),
    "goals.csv": ("seq", "id", "name", "description", "part_of", "priority"),
    "quality_requirements.csv": ("seq", "id", "name", "description", "kind", "metric",
                                 "target_value"),
    "test_cases.csv": ("seq", "id", "name", "description", "traces_to", "scenario", "given",
                       "when", "then"),
    "glossary.csv": ("seq", "term", "part_of_speech", "definition", "synonyms", "preferred"),
}

ELEMENT_TABLES = {
    "Actor": "actors.csv",
    "DataEntity": "data_entities.csv",
    "UseCase": "use_cases.csv",
    "UserStory": "user_stories.csv",
    "Goal": "goals.csv",
    "QualityRequirement": "quality_requirements.csv",
    "TestCase": "test_cases.csv",
    "GlossaryTerm": "glossary.csv",
}


def _t(v) -> str:
    return "" if v is None else v


def _lines(items) -> str:
    return "\n".join(items)


def _rows(model: m.SpecificationModel) -> dict[str, list[list]]:
    rows: dict[str, list[list]] = {name: [] for name in TABLES}
    rows["package.csv"].append(["package", str(model.package_name), ""])
    for imp in model.imports:
        rows["package.csv"].append(["import", str(imp.target), _t(imp.alias)])
    for seq, e in enumerate(model.elements, 1):
        common = [seq, e.id, _t(e.name), _t(e.description)]
        if isinstance(e, m.Actor):
            rows["actors.csv"].append(common + [e.kind])
        elif isinstance(e, m.DataEntity):
            rows["data_entities.csv"].append(common + [e.kind])
            for a in e.attributes:
                rows["attributes.csv"].append([e.id, a.name, a.datatype,
                                               " ".join(a.sorted_constraints),
                                               _t(a.foreign_key_target)])
        elif isinstance(e, m.UseCase):
            rows["use_cases.csv"].append(common + [e.kind, _t(e.primary_actor),
                                                   " ".join(e.data_entities)])
            for sc in e.scenarios:
                rows["scenarios.csv"].append([e.id, sc.id, sc.kind])
                for st in sc.steps:
                    rows["steps.csv"].append([sc.id, e.id, st.order, st.performer, st.action])
        elif isinstance(e, m.UserStory):
            rows["user_stories.csv"].append(common + [e.as_a, e.i_want, _t(e.so_that),
                                                      e.priority])
        elif isinstance(e, m.Goal):
            rows["goals.csv"].append(common + [_t(e.parent), e.priority])
        elif isinstance(e, m.QualityRequirement):
            rows["quality_requirements.csv"].append(common + [e.kind, _t(e.metric),
                                                              _t(e.target_value)])
        elif isinstance(e, m.TestCase):
            rows["test_cases.csv"].append(common + [e.traces_to, _t(e.scenario_ref),
                                                    _lines(e.given), _lines(e.when),
                                                    _lines(e.then)])
        elif isinstance(e, m.GlossaryTerm):
            rows["glossary.csv"].append([seq, e.term, e.part_of_speech, _t(e.definition),
                                         _lines(e.synonyms),
                                         "true" if e.preferred else "false"])
    return rows


def export_workbook(model: m.SpecificationModel, directory: Union[str, os.PathLike]) -> Path:
    """Write all twelve tables into ``directory``; raises RslError(RSL-T020) on I/O failure."""
    out = Path(directory)
    try:
        out.mkdir(parents=True, exist_ok=True)
        for name, rows in _rows(model).items():
            with open(out / name, "w", encoding="utf-8", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(TABLES[name])
                w.writerows(rows)
    except OSError as exc:
        raise RslError(diagnostic("RSL-T020", f"cannot write workbook: {exc}")) from None
    return out


class _Reader:
    def __init__(self, directory: Path):
        self.dir = directory
        self.diags: list[Diagnostic] = []

    def span(self, name: str, line: int) -> SourceSpan:
        return SourceSpan(str(self.dir / name), max(line, 1), 1, max(line, 1), 1)

    def error(self, code: str, name: str, line: int, msg: str) -> None:
        self.diags.append(diagnostic(code, f"{name} line {line}: {msg}", self.span(name, line)))

    def table(self, name: str) -> list[tuple[int, dict]]:
        path = self.dir / name
        if not path.is_file():
            if name == "package.csv":
                self.diags.append(diagnostic("RSL-T022", "package.csv is missing",
                                             SourceSpan(str(path), 1, 1, 1, 1)))
            return []
        with open(path, encoding="utf-8-sig", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None:
                self.error("RSL-T022", name, 1, "header row is missing")
                return []
            missing = [c for c in TABLES[name] if c not in header]
            if missing:
                self.error("RSL-T022", name, 1, f"missing column(s) {', '.join(missing)}")
                return []
            rows = []
            end = reader.line_num
            for raw in reader:
                start, end = end + 1, reader.line_num  # a record may span lines
                if not any(cell.strip() for cell in raw):
                    continue
                raw = raw + [""] * (len(header) - len(raw))
                rows.append((start, dict(zip(header, raw))))
            return rows

    def vocab(self, value: str, vocab, name: str, line: int, what: str) -> str:
        if value not in vocab:
            self.error("RSL-T023", name, line,
                       f"bad {what} '{value}'; allowed: {{{', '.join(vocab)}}}")
        return value

    def integer(self, value: str, name: str, line: int, what: str):
        try:
            n = int(value)
        except ValueError:
            n = 0
        if n < 1:
            self.error("RSL-T025", name, line, f"{what} must be a positive integer, got '{value}'")
            return None
        return n


def _opt(v: str):
    return v if v != "" else None


def _split_lines(v: str) -> tuple[str, ...]:
    return tuple(x for x in v.replace("\r\n", "\n").split("\n") if x != "") if v else ()


def import_workbook(directory: Union[str, os.PathLike]) -> ParseResult:
    """Assemble a model from a workbook directory.

    Warnings (unknown files) accompany a model; any Error diagnostic
    suppresses the model.
    """
    d = Path(directory)
    rd = _Reader(d)
    if not d.is_dir():
        return ParseResult(None, [diagnostic("RSL-T020", f"{d} is not a directory")])
    for p in sorted(d.iterdir()):
        if p.is_file() and p.name not in TABLES:
            rd.diags.append(diagnostic("RSL-T024", f"unknown workbook file {p.name} ignored",
                                       SourceSpan(str(p), 1, 1, 1, 1)))
    try:
        return _assemble(rd)
    except (OSError, UnicodeDecodeError, csv.Error) as exc:
        return ParseResult(None, rd.diags + [diagnostic("RSL-T020", f"cannot read workbook: {exc}")])


def _assemble(rd: _Reader) -> ParseResult:
    t = {name: rd.table(name) for name in TABLES}
    package = None
    imports = []
    for line, row in t["package.csv"]:
        if row["record"] == "package":
            if package is not None:
                rd.error("RSL-T025", "package.csv", line, "more than one package row")
            package = row["name"]
        elif row["record"] == "import":
            imports.append((line, row["name"], _opt(row["alias"])))
        else:
            rd.error("RSL-T025", "package.csv", line, f"unknown record type '{row['record']}'")
    if package is None and not has_errors(rd.diags):
        rd.error("RSL-T022", "package.csv", 1, "no package row")

    # child tables
    entity_ids = {row["id"] for _, row in t["data_entities.csv"]}
    attrs = defaultdict(list)
    for line, row in t["attributes.csv"]:
        if row["entity_id"] not in entity_ids:
            rd.error("RSL-T021", "attributes.csv", line,
                     f"data entity '{row['entity_id']}' not found in data_entities.csv")
            continue
        rd.vocab(row["datatype"], m.DATATYPES, "attributes.csv", line, "datatype")
        cons = row["constraints"].split()
        for c in cons:
            rd.vocab(c, m.CONSTRAINTS, "attributes.csv", line, "constraint")
        attrs[row["entity_id"]].append((line, row, cons))

    uc_ids = {row["id"] for _, row in t["use_cases.csv"]}
    scen = defaultdict(list)
    scen_keys = set()
    for line, row in t["scenarios.csv"]:
        if row["use_case_id"] not in uc_ids:
            rd.error("RSL-T021", "scenarios.csv", line,
                     f"use case '{row['use_case_id']}' not found in use_cases.csv")
            continue
        rd.vocab(row["kind"], m.SCENARIO_KINDS, "scenarios.csv", line, "scenario kind")
        scen[row["use_case_id"]].append((line, row))
        scen_keys.add((row["use_case_id"], row["id"]))
    steps = defaultdict(list)
    for line, row in t["steps.csv"]:
        key = (row["use_case_id"], row["scenario_id"])
        if key not in scen_keys:
            rd.error("RSL-T021", "steps.csv", line,
                     f"scenario '{row['scenario_id']}' of use case '{row['use_case_id']}' "
                     f"not found in scenarios.csv")
            continue
        rd.vocab(row["performer"], m.PERFORMERS, "steps.csv", line, "performer")
        order = rd.integer(row["order"], "steps.csv", line, "order")
        steps[key].append((line, order, row))

    # element tables
    vocab_cols = {
        "actors.csv": ("kind", m.ACTOR_KINDS),
        "data_entities.csv": ("kind", m.ENTITY_KINDS),
        "use_cases.csv": ("kind", m.USE_CASE_KINDS),
        "user_stories.csv": ("priority", m.PRIORITIES),
        "goals.csv": ("priority", m.PRIORITIES),
        "quality_requirements.csv": ("kind", m.QR_KINDS),
        "glossary.csv": ("part_of_speech", m.PARTS_OF_SPEECH),
    }
    pending = []
    for kind, name in ELEMENT_TABLES.items():
        for line, row in t[name]:
            if name in vocab_cols:
                col, vocab = vocab_cols[name]
                rd.vocab(row[col], vocab, name, line, col.replace("_", " "))
            if name == "glossary.csv" and row["preferred"] not in ("true", "false"):
                rd.error("RSL-T025", name, line,
                         f"preferred must be 'true' or 'false', got '{row['preferred']}'")
            seq = rd.integer(row["seq"], name, line, "seq")
            pending.append((seq, kind, name, line, row))

    if has_errors(rd.diags):
        return ParseResult(None, rd.diags)

    seqs = defaultdict(list)
    for seq, _, name, line, _ in pending:
        seqs[seq].append((name, line))
    for seq, where in sorted(seqs.items()):
        for name, line in where[1:]:
            rd.error("RSL-T025", name, line, f"seq {seq} used more than once")
    if has_errors(rd.diags):
        return ParseResult(None, rd.diags)

    pending.sort(key=lambda p: p[0])
    model = m.SpecificationModel(package, source=str(rd.dir)) if _valid_package(rd, package) else None
    if model is None:
        return ParseResult(None, rd.diags)
    try:
        model = m.SpecificationModel(model.package_name,
                                     tuple(m.ImportDecl(m.QualifiedName.parse(tg), al)
                                           for _, tg, al in imports),
                                     source=str(rd.dir))
    except ValueError as exc:
        rd.error("RSL-T025", "package.csv", imports[0][0] if imports else 1, str(exc))
        return ParseResult(None, rd.diags)

    for _, kind, name, line, row in pending:
        try:
            el = _element(kind, row, attrs, scen, steps, rd.span(name, line))
        except ValueError as exc:
            rd.error("RSL-T025", name, line, str(exc))
            continue
        try:
            model = m.add_element(model, el)
        except RslError as exc:
            rd.diags.extend(exc.diagnostics)
    if has_errors(rd.diags):
        return ParseResult(None, rd.diags)
    return ParseResult(model, rd.diags)


def _valid_package(rd: _Reader, package) -> bool:
    try:
        m.QualifiedName.parse(package)
        return True
    except ValueError as exc:
        rd.error("RSL-T025", "package.csv", 2, f"bad package name: {exc}")
        return False


def _element(kind, row, attrs, scen, steps, span) -> m.Element:
    common = dict(id=row.get("id", ""), name=_opt(row.get("name", "")),
                  description=_opt(row.get("description", "")), span=span)
    if kind == "Actor":
        return m.Actor(**common, kind=row["kind"])
    if kind == "DataEntity":
        return m.DataEntity(**common, kind=row["kind"], attributes=tuple(
            m.DataAttribute(r["name"], r["datatype"], frozenset(cons), _opt(r["references"]))
            for _, r, cons in attrs[row["id"]]))
    if kind == "UseCase":
        scenarios = []
        for _, s in scen[row["id"]]:
            sts = tuple(m.Step(order, r["performer"], r["action"])
                        for _, order, r in steps[(row["id"], s["id"])])
            scenarios.append(m.Scenario(s["id"], s["kind"], sts))
        return m.UseCase(**common, kind=row["kind"], primary_actor=_opt(row["primary_actor"]),
                         data_entities=tuple(row["data_entities"].split()),
                         scenarios=tuple(scenarios))
    if kind == "UserStory":
        return m.UserStory(**common, as_a=row["as_a"], i_want=row["i_want"],
                           so_that=_opt(row["so_that"]), priority=row["priority"])
    if kind == "Goal":
        return m.Goal(**common, parent=_opt(row["part_of"]), priority=row["priority"])
    if kind == "QualityRequirement":
        return m.QualityRequirement(**common, kind=row["kind"], metric=_opt(row["metric"]),
                                    target_value=_opt(row["target_value"]))
    if kind == "TestCase":
        return m.TestCase(**common, traces_to=row["traces_to"],
                          scenario_ref=_opt(row["scenario"]),
                          given=_split_lines(row["given"]), when=_split_lines(row["when"]),
                          then=_split_lines(row["then"]))
    return m.GlossaryTerm(term=row["term"], part_of_speech=row["part_of_speech"],
                          definition=_opt(row["definition"]),
                          synonyms=_split_lines(row["synonyms"]),
                          preferred=row["preferred"] == "true", span=span)
