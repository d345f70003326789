import csv
import random

import pytest

from rslkit import model as m
from rslkit.diagnostics import RslError
from rslkit.parser import parse_file
from rslkit.transform import export_json, export_workbook, import_json, import_workbook
from rslkit.transform.workbook import TABLES

from conftest import FIXTURES
from modelgen import gen_model


def rows(path):
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.reader(fh))


def test_empty_model_writes_twelve_files(tmp_path):
    export_workbook(m.new_model("p"), tmp_path)
    files = sorted(p.name for p in tmp_path.iterdir())
    assert files == sorted(TABLES) and len(files) == 12
    for name in files:
        data = rows(tmp_path / name)
        assert data[0] == list(TABLES[name])
        # package.csv carries the package name; every other table is header-only
        assert len(data) == (2 if name == "package.csv" else 1)


def test_orders_steps(tmp_path):
    export_workbook(parse_file(FIXTURES / "orders.rsl").model, tmp_path)
    data = rows(tmp_path / "steps.csv")
    assert [r[2] for r in data[1:]] == ["1", "2", "3"]


def test_crlf_and_quoting(tmp_path):
    mdl = m.SpecificationModel(m.QualifiedName.parse("p"), (),
                               [m.Actor("a", 'says "hi", twice')])
    export_workbook(mdl, tmp_path)
    raw = (tmp_path / "actors.csv").read_bytes()
    assert raw.endswith(b"\r\n")
    assert b'"says ""hi"", twice"' in raw


def test_round_trip_generated(tmp_path):
    rnd = random.Random(23)
    for i in range(150):
        mdl = gen_model(rnd)
        d = tmp_path / str(i)
        export_workbook(mdl, d)
        r = import_workbook(d)
        assert r.diagnostics == []
        assert m.structural_eq(r.model, m.canonicalize(mdl))


def test_formats_commute(tmp_path):
    rnd = random.Random(29)
    for i in range(60):
        mdl = gen_model(rnd)
        d = tmp_path / str(i)
        export_workbook(import_json(export_json(mdl)), d)
        via_csv = import_workbook(d).model
        assert export_json(m.canonicalize(via_csv)) == export_json(m.canonicalize(mdl))


def _orders(tmp_path):
    export_workbook(parse_file(FIXTURES / "orders.rsl").model, tmp_path)
    return tmp_path


def test_orphan_step(tmp_path):
    d = _orders(tmp_path)
    with open(d / "steps.csv", "a", encoding="utf-8", newline="") as fh:
        csv.writer(fh).writerow(["s_gone", "uc_PlaceOrder", "4", "System", "x"])
    r = import_workbook(d)
    assert r.model is None
    (diag,) = r.diagnostics
    assert diag.code == "RSL-T021"
    assert "steps.csv line 5" in diag.message
    assert diag.span.file.endswith("steps.csv") and diag.span.start_line == 5


def test_missing_column(tmp_path):
    d = _orders(tmp_path)
    data = rows(d / "actors.csv")
    with open(d / "actors.csv", "w", encoding="utf-8", newline="") as fh:
        csv.writer(fh).writerows([r[:-1] for r in data])
    r = import_workbook(d)
    assert r.model is None and [x.code for x in r.diagnostics] == ["RSL-T022"]
    assert "kind" in r.diagnostics[0].message


def test_bad_vocabulary(tmp_path):
    d = _orders(tmp_path)
    text = (d / "actors.csv").read_text(encoding="utf-8").replace(",User", ",Pilot")
    (d / "actors.csv").write_text(text, encoding="utf-8", newline="")
    r = import_workbook(d)
    assert r.model is None and [x.code for x in r.diagnostics] == ["RSL-T023"]


def test_unknown_file_is_a_warning(tmp_path):
    d = _orders(tmp_path)
    (d / "notes.txt").write_text("hello")
    r = import_workbook(d)
    assert r.model is not None
    assert [(x.code, x.severity) for x in r.diagnostics] == [("RSL-T024", "Warning")]


def test_missing_package_table(tmp_path):
    d = _orders(tmp_path)
    (d / "package.csv").unlink()
    r = import_workbook(d)
    assert r.model is None and r.diagnostics[0].code == "RSL-T022"


def test_bad_seq(tmp_path):
    d = _orders(tmp_path)
    data = (d / "use_cases.csv").read_bytes().replace(b"\r\n3,", b"\r\n1,")
    (d / "use_cases.csv").write_bytes(data)
    r = import_workbook(d)
    assert r.model is None and [x.code for x in r.diagnostics] == ["RSL-T025"]


def test_unwritable_target(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(RslError) as exc:
        export_workbook(m.new_model("p"), blocker / "sub")
    assert exc.value.codes == ["RSL-T020"]
