"""``rsl`` command line: check, import, export, gen, lib."""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from . import libraries
from .config import load_config
from .diagnostics import ERROR, WARNING, Diagnostic, RslError, has_errors
from .extractor import extract_model
from .formatter import format_model
from .parser import parse
from .patterns import load_styles
from .transform import (export_json, export_workbook, generate_sql, import_json,
                        import_workbook, render_document)
from .transform.render import load_template
from .validator import ValidationReport, check_all, check_consistency

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_MALFORMED = 2
EXIT_IO = 3
EXIT_USAGE = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(diags: Sequence[Diagnostic], fallback: str = "<input>") -> None:
    for d in diags:
        print(d.render(fallback), file=sys.stderr)


def _fail(msg: str, code: int) -> int:
    print(f"rsl: error: {msg}", file=sys.stderr)
    return code


def _read(path: str) -> str:
    with open(path, encoding="utf-8", newline="") as fh:
        return fh.read()


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _load_model(path: str):
    """(model, diagnostics, exit code) for an .rsl file."""
    try:
        text = _read(path)
    except OSError as exc:
        return None, [], _fail(f"cannot read {path}: {exc.strerror or exc}", EXIT_IO)
    result = parse(text, path)
    if result.model is None or has_errors(result.diagnostics):
        return None, result.diagnostics, EXIT_MALFORMED
    return result.model, result.diagnostics, EXIT_OK


def _consistency_code(model, fallback: str) -> int:
    """Print the model's consistency errors; EXIT_INVALID if there are any."""
    errors = [d for d in check_consistency(model) if d.severity == ERROR]
    _emit(errors, fallback)
    return EXIT_INVALID if errors else EXIT_OK


# -- check ------------------------------------------------------------------


@dataclass
class _FileOutcome:
    file: str
    code: int
    diagnostics: list = field(default_factory=list)
    report: Optional[ValidationReport] = None
    message: Optional[str] = None


def _check_one(path: str, config, search) -> _FileOutcome:
    try:
        text = _read(path)
    except OSError as exc:
        return _FileOutcome(path, EXIT_IO, message=f"cannot read {path}: {exc.strerror or exc}")
    result = parse(text, path)
    if result.model is None or has_errors(result.diagnostics):
        return _FileOutcome(path, EXIT_MALFORMED, result.diagnostics)
    try:
        resolved = libraries.resolve_imports(result.model, search)
        model = libraries.merge_resolved(result.model, resolved)
    except RslError as exc:
        return _FileOutcome(path, EXIT_MALFORMED, result.diagnostics + exc.diagnostics)
    try:
        report = check_all(model, config)
    except RslError as exc:
        return _FileOutcome(path, EXIT_IO, exc.diagnostics)
    diags = result.diagnostics + report.diagnostics
    return _FileOutcome(path, EXIT_OK if report.passed else EXIT_INVALID, diags, report)


def cmd_check(args) -> int:
    try:
        config = load_config(args.config)
    except OSError as exc:
        return _fail(f"cannot read configuration {args.config}: {exc.strerror or exc}", EXIT_IO)
    except RslError as exc:
        _emit(exc.diagnostics, args.config or "rslcheck.json")
        return EXIT_IO
    bad = [p for p in args.lib_path if not Path(p).is_dir()]
    if bad:
        return _fail(f"library path {bad[0]} is not a readable directory", EXIT_IO)
    search = libraries.search_path(args.lib_path)
    with ThreadPoolExecutor() as pool:
        outcomes = list(pool.map(lambda f: _check_one(f, config, search), args.files))

    errors = sum(1 for o in outcomes for d in o.diagnostics if d.severity == ERROR)
    warnings = sum(1 for o in outcomes for d in o.diagnostics if d.severity == WARNING)
    if args.format == "json":
        docs = []
        for o in outcomes:
            for_file = {"file": o.file, "exitCode": o.code}
            if o.report is not None:
                for_file.update(o.report.to_dict())
            else:
                for_file.update(passed=False, counts=None,
                                diagnostics=[d.to_dict() for d in o.diagnostics],
                                message=o.message)
            docs.append(for_file)
        print(json.dumps(docs, ensure_ascii=False, indent=2))
    else:
        for o in outcomes:
            if o.message:
                print(f"rsl: error: {o.message}", file=sys.stderr)
            _emit(o.diagnostics, o.file)
        print(f"{errors} error{'s' if errors != 1 else ''}, "
              f"{warnings} warning{'s' if warnings != 1 else ''}", file=sys.stderr)
    return max((o.code for o in outcomes), default=EXIT_OK)


# -- import -----------------------------------------------------------------


def cmd_import(args) -> int:
    src = Path(args.src)
    if not src.exists():
        return _fail(f"{src} does not exist", EXIT_IO)
    report_text = None
    if args.from_ == "csv":
        if not src.is_dir():
            return _fail(f"{src} is not a workbook directory", EXIT_IO)
        result = import_workbook(src)
        _emit(result.diagnostics, str(src))
        if result.model is None:
            return EXIT_MALFORMED
        model = result.model
    else:
        try:
            text = _read(str(src))
        except OSError as exc:
            return _fail(f"cannot read {src}: {exc.strerror or exc}", EXIT_IO)
        if args.from_ == "json":
            try:
                model = import_json(text)
            except RslError as exc:
                _emit(exc.diagnostics, str(src))
                return EXIT_MALFORMED
        else:
            try:
                report = extract_model(text, args.package, str(src))
            except ValueError as exc:
                return _fail(f"bad package name: {exc}", EXIT_USAGE)
            model = report.model
            report_text = report.to_json()
    out = format_model(model)
    if args.out is None:
        sys.stdout.write(out)
    else:
        try:
            _write(args.out, out)
            if report_text is not None:
                _write(args.out + ".report.json", report_text)
        except OSError as exc:
            return _fail(f"cannot write {args.out}: {exc.strerror or exc}", EXIT_IO)
    return _consistency_code(model, str(src))


# -- export -----------------------------------------------------------------


def cmd_export(args) -> int:
    if args.to == "csv" and args.out is None:
        return _fail("--to csv needs --out <directory>", EXIT_USAGE)
    model, diags, code = _load_model(args.file)
    _emit(diags, args.file)
    if model is None:
        return code
    if args.to == "csv":
        try:
            export_workbook(model, args.out)
        except RslError as exc:
            _emit(exc.diagnostics, args.out)
            return EXIT_IO
        return _consistency_code(model, args.file)
    if args.to == "json":
        text = export_json(model) + "\n"
    else:
        try:
            template = load_template(args.template)
            styles = load_styles(args.styles)
        except OSError as exc:
            return _fail(f"cannot read template or styles: {exc}", EXIT_IO)
        except ValueError as exc:
            return _fail(f"bad styles file: {exc}", EXIT_MALFORMED)
        try:
            text = render_document(model, template, styles)
        except RslError as exc:
            _emit(exc.diagnostics, args.template or "srs.md.tmpl")
            return EXIT_MALFORMED
    if args.out is None:
        sys.stdout.write(text)
    else:
        try:
            _write(args.out, text)
        except OSError as exc:
            return _fail(f"cannot write {args.out}: {exc.strerror or exc}", EXIT_IO)
    return _consistency_code(model, args.file)


# -- gen --------------------------------------------------------------------


def cmd_gen(args) -> int:
    model, diags, code = _load_model(args.file)
    _emit(diags, args.file)
    if model is None:
        return code
    try:
        sql = generate_sql(model)
    except RslError as exc:
        _emit(exc.diagnostics, args.file)
        return EXIT_INVALID
    if args.out is None:
        sys.stdout.write(sql)
        return EXIT_OK
    try:
        _write(args.out, sql)
    except OSError as exc:
        return _fail(f"cannot write {args.out}: {exc.strerror or exc}", EXIT_IO)
    return EXIT_OK


# -- lib --------------------------------------------------------------------


def cmd_lib(args) -> int:
    bad = [p for p in args.lib_path if not Path(p).is_dir()]
    if bad:
        return _fail(f"library path {bad[0]} is not a readable directory", EXIT_IO)
    search = libraries.search_path(args.lib_path, builtin=not args.no_builtin)
    try:
        manifests = libraries.list_catalog(search)
    except RslError as exc:
        _emit(exc.diagnostics)
        return EXIT_MALFORMED
    except OSError as exc:
        return _fail(f"cannot read library path: {exc}", EXIT_IO)
    rows = [("PACKAGE", "VERSION", "DESCRIPTION")]
    rows += [(mf.package, mf.version, mf.description) for mf in manifests]
    w0 = max(len(r[0]) for r in rows)
    w1 = max(len(r[1]) for r in rows)
    for r in rows:
        print(f"{r[0]:<{w0}}  {r[1]:<{w1}}  {r[2]}".rstrip())
    # a catalog is only useful for composition if it is consistent on its own
    code = EXIT_OK
    for mf in manifests:
        model, _, _ = _load_model(str(mf.source))
        code = max(code, _consistency_code(model, str(mf.source)))
    return code


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rsl", description="Toolchain for RSL-style requirement specifications.")
    p.add_argument("--version", action="version", version=f"rsl {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="parse, resolve imports and validate .rsl files")
    c.add_argument("files", nargs="+")
    c.add_argument("--config", help="rslcheck.json (default: ./rslcheck.json or shipped)")
    c.add_argument("--lib-path", action="append", default=[], metavar="DIR")
    c.add_argument("--format", choices=("text", "json"), default="text")
    c.add_argument("--version", action="version", version=f"rsl {__version__}")
    c.set_defaults(func=cmd_check)

    i = sub.add_parser("import", help="create an .rsl file from CSV, JSON or free text")
    i.add_argument("--from", dest="from_", choices=("csv", "json", "text"), required=True)
    i.add_argument("src")
    i.add_argument("--out", help="output .rsl file (default: stdout)")
    i.add_argument("--package", default="extracted", help="package name for text input")
    i.add_argument("--version", action="version", version=f"rsl {__version__}")
    i.set_defaults(func=cmd_import)

    e = sub.add_parser("export", help="export an .rsl file to JSON, CSV or a document")
    e.add_argument("file")
    e.add_argument("--to", choices=("json", "csv", "md"), required=True)
    e.add_argument("--template", help="document template (default: shipped SRS template)")
    e.add_argument("--styles", help="linguistic styles file (default: built-in styles)")
    e.add_argument("--out")
    e.add_argument("--version", action="version", version=f"rsl {__version__}")
    e.set_defaults(func=cmd_export)

    g = sub.add_parser("gen", help="generate code from data entities")
    g.add_argument("file")
    g.add_argument("--target", choices=("sql",), required=True)
    g.add_argument("--out")
    g.add_argument("--version", action="version", version=f"rsl {__version__}")
    g.set_defaults(func=cmd_gen)

    lib = sub.add_parser("lib", help="inspect specification libraries")
    lib_sub = lib.add_subparsers(dest="lib_command", required=True, parser_class=_Parser)
    ls = lib_sub.add_parser("list", help="list catalogs on the library search path")
    ls.add_argument("--lib-path", action="append", default=[], metavar="DIR")
    ls.add_argument("--no-builtin", action="store_true",
                    help="leave the shipped catalogs off the search path")
    ls.add_argument("--version", action="version", version=f"rsl {__version__}")
    ls.set_defaults(func=cmd_lib)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)
