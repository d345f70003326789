import dataclasses
import os
import random

import pytest

from rslkit import model as m
from rslkit.config import default_config
from rslkit.diagnostics import RslError
from rslkit.libraries import (builtin_catalog_dir, list_catalog, merge, merge_resolved,
                              resolve_imports, search_path)
from rslkit.parser import parse, parse_file
from rslkit.validator import check_all, check_consistency

from conftest import FIXTURES
from faults import consistent_model


def write(root, rel, text):
    p = root / rel
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(text, encoding="utf-8")
    return p


def test_builtin_import_resolves():
    mdl = parse("Package p { Import itlingo.usability }").model
    resolved = resolve_imports(mdl, search_path(env={}))
    assert list(resolved) == ["itlingo.usability"]
    assert resolved["itlingo.usability"].path == builtin_catalog_dir() / "itlingo" / "usability.rsl"


def test_missing_import_lists_probes(tmp_path):
    mdl = parse("Package p { Import lib.absent }").model
    with pytest.raises(RslError) as exc:
        resolve_imports(mdl, [tmp_path / "one", tmp_path / "two"])
    (d,) = exc.value.diagnostics
    assert d.code == "RSL-I010"
    assert str(tmp_path / "one" / "lib" / "absent.rsl") in d.message
    assert str(tmp_path / "two" / "lib" / "absent.rsl") in d.message


def test_first_hit_wins(tmp_path):
    write(tmp_path / "a", "lib/x.rsl", "Package lib.x { Goal g_a }")
    write(tmp_path / "b", "lib/x.rsl", "Package lib.x { Goal g_b }")
    mdl = parse("Package p { Import lib.x }").model
    for order in ([tmp_path / "a", tmp_path / "b"], [tmp_path / "b", tmp_path / "a"]):
        got = resolve_imports(mdl, order)["lib.x"].model.elements[0].id
        assert got == ("g_a" if order[0].name == "a" else "g_b")


def test_cycle(tmp_path):
    write(tmp_path, "A.rsl", "Package A { Import B }")
    write(tmp_path, "B.rsl", "Package B { Import A }")
    with pytest.raises(RslError) as exc:
        resolve_imports(parse_file(tmp_path / "A.rsl").model, [tmp_path])
    (d,) = exc.value.diagnostics
    assert d.code == "RSL-I012" and "A → B → A" in d.message


def test_broken_import(tmp_path):
    write(tmp_path, "bad.rsl", "Package bad { Actor }")
    with pytest.raises(RslError) as exc:
        resolve_imports(parse("Package p { Import bad }").model, [tmp_path])
    assert exc.value.codes == ["RSL-I011"]


def test_transitive_imports(tmp_path):
    write(tmp_path, "lib/a.rsl", "Package lib.a { Import lib.b Goal g_a }")
    write(tmp_path, "lib/b.rsl", "Package lib.b { Goal g_b }")
    mdl = parse("Package p { Import lib.a as x }").model
    merged = merge_resolved(mdl, resolve_imports(mdl, [tmp_path]))
    assert [e.id for e in merged.elements] == ["x.g_a", "b.g_b"]


def test_alias_and_qualified_lookup():
    base = parse("Package p { Import itlingo.usability as u }").model
    merged = merge_resolved(base, resolve_imports(base, search_path(env={})))
    assert m.resolve(merged, "u.qr_login_time").KIND == "QualityRequirement"


def test_identical_aliases_collide():
    lib = parse("Package lib.x { Goal g }").model
    other = parse("Package lib.y { Goal g }").model
    with pytest.raises(RslError) as exc:
        merge(m.new_model("p"), [("u", lib), ("u", other)])
    assert exc.value.codes == ["RSL-L010"]


def test_local_references_are_qualified():
    lib = parse("Package lib.x { Goal g1 Goal g2 [ partOf g1 ] }").model
    merged = merge(m.new_model("p"), [(None, lib)])
    assert merged.elements[1].parent == "x.g1"
    assert check_consistency(merged) == []


def test_base_can_reference_library():
    base = parse("Package p { Import lib.x as l Goal mine [ partOf l.g1 ] }").model
    lib = parse("Package lib.x { Goal g1 }").model
    assert check_consistency(merge(base, [("l", lib)])) == []
    assert [d.code for d in check_consistency(merge(base, []))] == ["RSL-C010"]


def _pair(seed):
    rnd = random.Random(seed)
    a = consistent_model(rnd, 30)
    b = consistent_model(rnd, 30)
    return a, dataclasses.replace(b, package_name=m.QualifiedName.parse("lib.other"))


@pytest.mark.parametrize("seed", range(5))
def test_merge_preserves_consistency(seed):
    base, lib = _pair(seed)
    assert check_consistency(merge(base, [("o", lib)])) == []
    # a base reference into the library only resolves once merged
    dangling = dataclasses.replace(base, elements=base.elements + (
        m.Goal("extra", parent="o.x4"),))
    assert [d.code for d in check_consistency(dangling)] == ["RSL-C010"]
    assert check_consistency(merge(dangling, [("o", lib)])) == []


def test_merge_is_associative_on_names():
    base = parse("Package p { Goal g }").model
    l1 = parse("Package lib.a { Goal g Actor x : User }").model
    l2 = parse("Package lib.b { Goal g QR q : Security }").model
    together = merge(base, [(None, l1), (None, l2)])
    stepwise = merge(merge(base, [(None, l1)]), [(None, l2)])
    assert {e.id for e in together.elements} == {e.id for e in stepwise.elements}


def test_merge_does_not_mutate():
    base = parse("Package p { Goal g }").model
    lib = parse("Package lib.a { Goal g }").model
    before = (base, lib, base.elements, lib.elements)
    merge(base, [(None, lib)])
    assert (base, lib, base.elements, lib.elements) == before


def test_catalog_listing():
    names = [mf.package for mf in list_catalog([builtin_catalog_dir()])]
    assert names == ["itlingo.security", "itlingo.usability"]


def test_empty_path():
    assert list_catalog([]) == []


def test_manifest_mismatch(tmp_path):
    write(tmp_path, "lib/x.rsl", "Package lib.x { Goal g }")
    write(tmp_path, "lib/x.manifest", "package: lib.y\nversion: 1.0.0\ndescription: d\n")
    with pytest.raises(RslError) as exc:
        list_catalog([tmp_path])
    assert exc.value.codes == ["RSL-L011"]


@pytest.mark.parametrize("manifest", ["package lib.x\n", "package: lib.x\nversion: 1\n"
                                      "description: d\n", "package: lib.x\n"])
def test_corrupted_manifest(tmp_path, manifest):
    write(tmp_path, "lib/x.rsl", "Package lib.x { Goal g }")
    write(tmp_path, "lib/x.manifest", manifest)
    with pytest.raises(RslError) as exc:
        list_catalog([tmp_path])
    assert exc.value.codes == ["RSL-L011"]


def test_listing_ignores_directory_order(tmp_path):
    for name in ["zeta", "alpha", "mid"]:
        write(tmp_path, f"{name}.rsl", f"Package {name} {{ Goal g }}")
        write(tmp_path, f"{name}.manifest", f"package: {name}\nversion: 0.1.0\ndescription: x\n")
    assert [mf.package for mf in list_catalog([tmp_path])] == ["alpha", "mid", "zeta"]


def test_search_path_order(tmp_path):
    env = {"RSL_LIB_PATH": os.pathsep.join([str(tmp_path / "e1"), str(tmp_path / "e2")])}
    assert search_path([tmp_path / "cli"], env=env) == [
        tmp_path / "cli", tmp_path / "e1", tmp_path / "e2", builtin_catalog_dir()]


def test_catalogs_with_shop_fixture():
    src = (FIXTURES / "shop.rsl").read_text("utf-8").replace(
        "Package org.acme.shop {",
        "Package org.acme.shop {\n    Import itlingo.usability as u\n    Import itlingo.security")
    base = parse(src).model
    merged = merge_resolved(base, resolve_imports(base, search_path(env={})))
    assert check_all(merged, default_config()).counts["Error"] == 0
