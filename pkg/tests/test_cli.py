import json
import re

import pytest

from rslkit import model as m
from rslkit.parser import parse, parse_file
from rslkit.transform import export_workbook

from climatrix import FIXTURES, OUTCOMES, cases, rsl
from conftest import read_fixture

LINE = re.compile(r"^(?P<file>.+):(?P<line>\d+):(?P<col>\d+): (?P<sev>error|warning|info)"
                  r"\[(?P<code>RSL-[PCXAITL]\d{3})\]: (?P<msg>.+)$")


@pytest.fixture(scope="module")
def matrix(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("matrix")
    return {(c.command, c.outcome): c for c in cases(tmp)}


@pytest.mark.parametrize("outcome", OUTCOMES)
@pytest.mark.parametrize("command", ["check", "import", "export", "gen", "lib"])
def test_exit_matrix(matrix, command, outcome):
    case = matrix[(command, outcome)]
    r = rsl(*case.argv)
    assert r.returncode == case.expected, r.stderr
    if case.output is not None and case.expected >= 2:
        assert not case.output.exists()


def test_check_valid():
    r = rsl("check", FIXTURES / "shop.rsl")
    assert r.returncode == 0
    assert r.stderr.strip() == "0 errors, 0 warnings"
    assert r.stdout == ""


def test_check_dangling_reference(tmp_path):
    src = read_fixture("shop.rsl").replace("asA a_Customer", "asA a_Nobody")
    f = tmp_path / "d.rsl"
    f.write_text(src)
    r = rsl("check", f)
    assert r.returncode == 1
    lines = [ln for ln in r.stderr.splitlines() if LINE.match(ln)]
    assert len(lines) == 1
    mt = LINE.match(lines[0])
    assert mt["code"] == "RSL-C010" and mt["file"] == str(f)
    assert (int(mt["line"]), int(mt["col"])) == (45, 5)


def test_check_json_format():
    r = rsl("check", "--format", "json", FIXTURES / "orders.rsl", FIXTURES / "sql_chain.rsl")
    docs = json.loads(r.stdout)
    assert [d["file"] for d in docs] == [str(FIXTURES / "orders.rsl"),
                                        str(FIXTURES / "sql_chain.rsl")]
    assert list(docs[0]) == ["file", "exitCode", "passed", "counts", "diagnostics"]
    assert docs[1]["counts"]["Warning"] == 3 and docs[1]["passed"]


def test_check_output_follows_argument_order(tmp_path):
    files = []
    for i in range(6):
        f = tmp_path / f"f{i}.rsl"
        f.write_text(f"Package p{i} {{ Goal g [ partOf nowhere{i} ] }}")
        files.append(f)
    r = rsl("check", *files)
    named = [LINE.match(ln)["file"] for ln in r.stderr.splitlines() if LINE.match(ln)
             and LINE.match(ln)["code"] == "RSL-C010"]
    assert named == [str(f) for f in files]


def test_check_config_and_lib_path(tmp_path):
    cfg = tmp_path / "strict.json"
    cfg.write_text('{"vagueTerms": ["cart"], "strictness": "WarningsAsErrors"}')
    assert rsl("check", "--config", cfg, FIXTURES / "shop.rsl").returncode == 1
    bad = tmp_path / "bad.json"
    bad.write_text('{"strictness": "Sometimes"}')
    assert rsl("check", "--config", bad, FIXTURES / "shop.rsl").returncode == 3
    assert rsl("check", "--config", tmp_path / "none.json", FIXTURES / "shop.rsl").returncode == 3
    lib = tmp_path / "lib" / "acme"
    lib.mkdir(parents=True)
    (lib / "extra.rsl").write_text("Package acme.extra { Actor a_Bot : Timer }")
    user = tmp_path / "user.rsl"
    user.write_text(read_fixture("shop.rsl").replace(
        "Package org.acme.shop {", "Package org.acme.shop {\n    Import acme.extra as x"))
    assert rsl("check", user).returncode == 2
    assert rsl("check", "--lib-path", tmp_path / "lib", user).returncode == 0


def test_check_uses_config_in_working_directory(tmp_path):
    (tmp_path / "rslcheck.json").write_text('{"modelRequiredKinds": ["Goal"]}')
    r = rsl("check", FIXTURES / "orders.rsl", cwd=tmp_path)
    assert "RSL-X010" in r.stderr and r.returncode == 0


def test_export_json_golden():
    r = rsl("export", FIXTURES / "orders.rsl", "--to", "json")
    assert r.returncode == 0 and r.stderr == ""
    assert r.stdout == read_fixture("orders.json")


def test_export_md_golden(tmp_path):
    out = tmp_path / "orders.md"
    assert rsl("export", FIXTURES / "orders.rsl", "--to", "md", "--out", out).returncode == 0
    assert out.read_bytes() == (FIXTURES / "orders.srs.md").read_bytes()


def test_export_md_custom_template(tmp_path):
    tpl = tmp_path / "t.tmpl"
    tpl.write_text("{{#each Actor}}{{style:actor_line}}\n{{/each}}")
    r = rsl("export", FIXTURES / "orders.rsl", "--to", "md", "--template", tpl)
    assert r.returncode == 0 and "a_Customer" in r.stdout
    tpl.write_text("{{#each Actor}}")
    r = rsl("export", FIXTURES / "orders.rsl", "--to", "md", "--template", tpl)
    assert r.returncode == 2 and "RSL-T032" in r.stderr


def test_export_csv(tmp_path):
    out = tmp_path / "wb"
    assert rsl("export", FIXTURES / "orders.rsl", "--to", "csv", "--out", out).returncode == 0
    assert len(list(out.iterdir())) == 12
    assert rsl("export", FIXTURES / "orders.rsl", "--to", "csv").returncode == 4


def test_import_json_round_trip(tmp_path):
    out = tmp_path / "orders.rsl"
    assert rsl("import", "--from", "json", FIXTURES / "orders.json", "--out", out).returncode == 0
    assert m.structural_eq(parse_file(out).model, parse_file(FIXTURES / "orders.rsl").model)


def test_import_csv_orphan(tmp_path):
    wb = tmp_path / "wb"
    export_workbook(parse_file(FIXTURES / "orders.rsl").model, wb)
    with open(wb / "steps.csv", "a", encoding="utf-8") as fh:
        fh.write("s_gone,uc_PlaceOrder,9,System,x\r\n")
    out = tmp_path / "o.rsl"
    r = rsl("import", "--from", "csv", wb, "--out", out)
    assert r.returncode == 2 and "RSL-T021" in r.stderr and "steps.csv line 5" in r.stderr
    assert not out.exists()


def test_import_text_writes_report(tmp_path):
    out = tmp_path / "stories.rsl"
    r = rsl("import", "--from", "text", FIXTURES / "corpus.txt", "--out", out,
            "--package", "org.acme.stories")
    assert r.returncode == 0
    report = json.loads((tmp_path / "stories.rsl.report.json").read_text())
    assert report["package"] == "org.acme.stories" and len(report["sentences"]) == 30
    assert str(parse_file(out).model.package_name) == "org.acme.stories"


def test_gen_counts_tables():
    r = rsl("gen", FIXTURES / "shop.rsl", "--target", "sql")
    assert r.returncode == 0 and r.stdout.count("CREATE TABLE") == 2


def test_gen_inconsistent(tmp_path):
    f = tmp_path / "x.rsl"
    f.write_text("Package p { DataEntity e : Master [ attribute r : Integer references zz ] }")
    r = rsl("gen", f, "--target", "sql")
    assert r.returncode == 1 and "RSL-T041" in r.stderr


def test_usage_errors(tmp_path):
    out = tmp_path / "x.sql"
    r = rsl("gen", FIXTURES / "shop.rsl", "--target", "cobol", "--out", out)
    assert r.returncode == 4 and not out.exists()
    assert rsl().returncode == 4
    assert rsl("frobnicate").returncode == 4
    assert rsl("lib").returncode == 4


def test_lib_list():
    r = rsl("lib", "list")
    lines = r.stdout.splitlines()
    assert r.returncode == 0
    assert lines[0].split() == ["PACKAGE", "VERSION", "DESCRIPTION"]
    assert [ln.split()[0] for ln in lines[1:]] == ["itlingo.security", "itlingo.usability"]


def test_lib_list_empty_path():
    r = rsl("lib", "list", "--no-builtin")
    assert r.returncode == 0 and r.stdout.split() == ["PACKAGE", "VERSION", "DESCRIPTION"]


@pytest.mark.parametrize("argv", [(), ("check",), ("import",), ("export",), ("gen",),
                                  ("lib", "list")])
def test_version_and_help(argv):
    v = rsl(*argv, "--version")
    assert v.returncode == 0 and v.stdout.startswith("rsl ")
    h = rsl(*argv, "--help")
    assert h.returncode == 0 and "usage:" in h.stdout


def test_commands_are_idempotent(tmp_path):
    runs = [rsl("check", "--format", "json", FIXTURES / "shop.rsl") for _ in range(2)]
    assert runs[0].stdout == runs[1].stdout and runs[0].returncode == runs[1].returncode
    a = rsl("export", FIXTURES / "shop.rsl", "--to", "md").stdout
    assert a == rsl("export", FIXTURES / "shop.rsl", "--to", "md").stdout
