"""Import resolution, library merging and the shipped catalogs."""

from __future__ import annotations

import dataclasses
import os
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from . import model as m
from .diagnostics import Diagnostic, RslError, SourceSpan, diagnostic, has_errors
from .parser import parse_file

PathLike = Union[str, os.PathLike]
VERSION_RE = re.compile(r"^[0-9]+\.[0-9]+\.[0-9]+$")


def builtin_catalog_dir() -> Path:
    return Path(str(resources.files("rslkit").joinpath("catalogs")))


def search_path(cli_paths: Sequence[PathLike] = (), *, env: Optional[dict] = None,
                builtin: bool = True) -> list[Path]:
    """``--lib-path`` entries, then ``RSL_LIB_PATH``, then the shipped catalogs."""
    env = os.environ if env is None else env
    out = [Path(p) for p in cli_paths]
    out += [Path(p) for p in env.get("RSL_LIB_PATH", "").split(os.pathsep) if p]
    if builtin:
        out.append(builtin_catalog_dir())
    return out


def candidate_paths(target: m.QualifiedName, path: Sequence[PathLike]) -> list[Path]:
    rel = Path(*target.segments[:-1], target.segments[-1] + ".rsl")
    return [Path(d) / rel for d in path]


@dataclass(frozen=True)
class ResolvedImport:
    package: str
    path: Path
    model: m.SpecificationModel


def resolve_imports(model: m.SpecificationModel,
                    search: Sequence[PathLike]) -> dict[str, ResolvedImport]:
    """Load every transitively imported package.

    Returns package name -> ResolvedImport in discovery order; raises RslError
    with RSL-I010/I011/I012/I013 diagnostics.
    """
    resolved: dict[str, ResolvedImport] = {}
    diags: list[Diagnostic] = []

    def visit(current: m.SpecificationModel, chain: list[str]) -> None:
        for imp in current.imports:
            name = str(imp.target)
            if name in chain:
                cycle = chain[chain.index(name):] + [name]
                diags.append(diagnostic("RSL-I012", "import cycle: " + " → ".join(cycle),
                                        imp.span))
                continue
            if name in resolved:
                continue
            probes = candidate_paths(imp.target, search)
            hit = next((p for p in probes if p.is_file()), None)
            if hit is None:
                diags.append(diagnostic(
                    "RSL-I010", f"import '{name}' not found; probed: "
                                + ", ".join(str(p) for p in probes) if probes else
                                f"import '{name}' not found; search path is empty",
                    imp.span))
                continue
            result = parse_file(hit)
            if result.model is None or has_errors(result.diagnostics):
                first = next(d for d in result.diagnostics if d.severity == "Error")
                diags.append(diagnostic(
                    "RSL-I011", f"imported file {hit} fails to parse: {first.message}",
                    imp.span, related=[(d.span, d.message) for d in result.diagnostics
                                       if d.span is not None]))
                continue
            if str(result.model.package_name) != name:
                diags.append(diagnostic(
                    "RSL-I013", f"{hit} declares package '{result.model.package_name}', "
                                f"expected '{name}'", imp.span))
                continue
            resolved[name] = ResolvedImport(name, hit, result.model)
            visit(result.model, chain + [name])

    visit(model, [str(model.package_name)])
    if diags:
        raise RslError(diags)
    return resolved


def _qualify(prefix: str, ref: Optional[str], local: set) -> Optional[str]:
    if ref is None or ref not in local:
        return ref
    return f"{prefix}.{ref}"


def qualify_element(e: m.Element, prefix: str, local: set) -> m.Element:
    """Copy of ``e`` with its id and its model-local references put under ``prefix``."""
    q = lambda ref: _qualify(prefix, ref, local)  # noqa: E731
    changes: dict = {"id": f"{prefix}.{e.id}"}
    if isinstance(e, m.UseCase):
        changes.update(primary_actor=q(e.primary_actor),
                       data_entities=tuple(q(d) for d in e.data_entities))
    elif isinstance(e, m.UserStory):
        changes["as_a"] = q(e.as_a)
    elif isinstance(e, m.TestCase):
        changes["traces_to"] = q(e.traces_to)
    elif isinstance(e, m.Goal):
        changes["parent"] = q(e.parent)
    elif isinstance(e, m.DataEntity):
        changes["attributes"] = tuple(
            dataclasses.replace(a, foreign_key_target=q(a.foreign_key_target))
            for a in e.attributes)
    return dataclasses.replace(e, **changes)


def merge(base: m.SpecificationModel,
          imported: Iterable[tuple[Optional[str], m.SpecificationModel]]) -> m.SpecificationModel:
    """Bring imported elements into ``base`` under ``<alias or last segment>.<id>``.

    Base elements keep their ids. Raises RslError(RSL-L010) on collisions.
    """
    elements = list(base.elements)
    taken = {e.id: "the base model" for e in elements}
    diags = []
    for alias, lib in imported:
        prefix = alias or lib.package_name.last
        local = {e.id for e in lib.elements}
        for e in lib.elements:
            qe = qualify_element(e, prefix, local)
            if qe.id in taken:
                diags.append(diagnostic(
                    "RSL-L010", f"'{qe.id}' from {lib.package_name} collides with an element "
                                f"from {taken[qe.id]}", e.span))
                continue
            taken[qe.id] = str(lib.package_name)
            elements.append(qe)
    if diags:
        raise RslError(diags)
    return dataclasses.replace(base, elements=tuple(elements))


def merge_resolved(base: m.SpecificationModel,
                   resolved: dict[str, ResolvedImport]) -> m.SpecificationModel:
    """Merge direct imports under their alias and transitive ones under their last segment."""
    direct = {str(i.target): i.alias for i in base.imports}
    libs = [(direct.get(name), r.model) for name, r in resolved.items()]
    return merge(base, libs)


@dataclass(frozen=True)
class LibraryManifest:
    package: str
    version: str
    description: str
    source: Path


def read_manifest(path: PathLike) -> dict:
    fields = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise ValueError(f"line without ':': {line!r}")
        fields[key.strip()] = value.strip()
    return fields


def list_catalog(search: Sequence[PathLike]) -> list[LibraryManifest]:
    """Every ``.rsl`` file with a sidecar ``.manifest`` on the path, sorted by package.

    When a package appears in several directories the first one wins.
    Raises RslError (RSL-L011/I011) if any manifest is inconsistent.
    """
    found: dict[str, LibraryManifest] = {}
    diags = []
    for directory in search:
        directory = Path(directory)
        if not directory.is_dir():
            continue
        for rsl in sorted(directory.rglob("*.rsl")):
            mf = rsl.with_suffix(".manifest")
            if not mf.is_file():
                continue
            span = SourceSpan(str(mf), 1, 1, 1, 1)
            try:
                fields = read_manifest(mf)
            except (ValueError, UnicodeDecodeError) as exc:
                diags.append(diagnostic("RSL-L011", str(exc), span))
                continue
            missing = [k for k in ("package", "version", "description") if k not in fields]
            if missing:
                diags.append(diagnostic("RSL-L011", f"missing {', '.join(missing)}", span))
                continue
            if not VERSION_RE.match(fields["version"]):
                diags.append(diagnostic(
                    "RSL-L011", f"version '{fields['version']}' is not MAJOR.MINOR.PATCH",
                    span))
                continue
            result = parse_file(rsl)
            if result.model is None or has_errors(result.diagnostics):
                diags.append(diagnostic("RSL-I011", f"{rsl} fails to parse", span))
                continue
            if str(result.model.package_name) != fields["package"]:
                diags.append(diagnostic(
                    "RSL-L011", f"{mf} names package '{fields['package']}' but {rsl.name} "
                                f"declares '{result.model.package_name}'", span))
                continue
            found.setdefault(fields["package"], LibraryManifest(
                fields["package"], fields["version"], fields["description"], rsl))
    if diags:
        raise RslError(diags)
    return [found[k] for k in sorted(found)]
