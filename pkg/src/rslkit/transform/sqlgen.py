"""DataEntity -> SQL DDL.

Tables are emitted in foreign-key dependency order (referenced tables
first, model order breaking ties). Foreign keys between entities of the same
dependency cycle cannot be declared inline; those tables are created first
and the constraints added afterwards with ``ALTER TABLE``.

Identifiers are emitted bare when they match ``[A-Za-z][A-Za-z0-9_]*`` and
double-quoted otherwise (embedded quotes doubled).
"""

from __future__ import annotations

import re

from .. import model as m
from ..diagnostics import ERROR, RslError, diagnostic
from ..validator import check_consistency

SQL_TYPES = {
    "Integer": "INTEGER",
    "Decimal": "NUMERIC(18,4)",
    "Boolean": "BOOLEAN",
    "Date": "DATE",
    "DateTime": "TIMESTAMP",
    "Text": "TEXT",
}

_BARE = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")


def quote_ident(name: str) -> str:
    if _BARE.match(name):
        return name
    return '"' + name.replace('"', '""') + '"'


def unquote_ident(text: str) -> str:
    if text.startswith('"') and text.endswith('"') and len(text) >= 2:
        return text[1:-1].replace('""', '"')
    return text


def _sccs(nodes: list[str], edges: dict[str, list[str]]) -> list[list[str]]:
    """Tarjan's strongly connected components."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    stack: list[str] = []
    on_stack: set = set()
    out: list[list[str]] = []
    counter = [0]

    def visit(v: str) -> None:
        index[v] = low[v] = counter[0]
        counter[0] += 1
        stack.append(v)
        on_stack.add(v)
        for w in edges[v]:
            if w not in index:
                visit(w)
                low[v] = min(low[v], low[w])
            elif w in on_stack:
                low[v] = min(low[v], index[w])
        if low[v] == index[v]:
            comp = []
            while True:
                w = stack.pop()
                on_stack.discard(w)
                comp.append(w)
                if w == v:
                    break
            out.append(comp)

    for v in nodes:
        if v not in index:
            visit(v)
    return out


def emission_order(entities: list[m.DataEntity]) -> tuple[list[m.DataEntity], set]:
    """Dependency order plus the set of entity-id pairs whose FK must be deferred."""
    ids = [e.id for e in entities]
    position = {eid: i for i, eid in enumerate(ids)}
    deps = {e.id: sorted({a.foreign_key_target for a in e.attributes
                          if a.foreign_key_target in position
                          and a.foreign_key_target != e.id}, key=position.get)
            for e in entities}
    comps = _sccs(ids, deps)
    comp_of = {v: i for i, c in enumerate(comps) for v in c}
    deferred = {(a, b) for a in ids for b in deps[a] if comp_of[a] == comp_of[b]}

    # Kahn over components; the ready component with the earliest member wins
    comp_deps = {i: {comp_of[b] for v in c for b in deps[v]} - {i} for i, c in enumerate(comps)}
    first = {i: min(position[v] for v in c) for i, c in enumerate(comps)}
    done: set = set()
    order: list[str] = []
    while len(done) < len(comps):
        ready = [i for i in comp_deps if i not in done and comp_deps[i] <= done]
        nxt = min(ready, key=first.get)
        done.add(nxt)
        order.extend(sorted(comps[nxt], key=position.get))
    by_id = {e.id: e for e in entities}
    return [by_id[i] for i in order], deferred


def generate_sql(model: m.SpecificationModel) -> str:
    """One CREATE TABLE per DataEntity; raises RslError (RSL-T040/T041)."""
    problems = [d for d in check_consistency(model) if d.severity == ERROR]
    if problems:
        raise RslError([diagnostic(
            "RSL-T041", f"model has {len(problems)} consistency error(s); "
                        f"SQL generation needs a consistent model")] + problems)
    entities = [e for e in model.elements if isinstance(e, m.DataEntity)]
    if not entities:
        return ""
    by_id = {e.id: e for e in entities}
    missing_pk = []
    for e in entities:
        for a in e.attributes:
            if a.foreign_key_target is not None and by_id[a.foreign_key_target].primary_key is None:
                missing_pk.append(diagnostic(
                    "RSL-T040",
                    f"{e.id}.{a.name} references {a.foreign_key_target}, which has no "
                    f"PrimaryKey attribute", a.span or e.span))
    if missing_pk:
        raise RslError(missing_pk)

    ordered, deferred = emission_order(entities)
    statements = []
    alters = []
    for e in ordered:
        cols = []
        for a in e.attributes:
            col = f"{quote_ident(a.name)} {SQL_TYPES[a.datatype]}"
            if a.is_primary_key:
                col += " PRIMARY KEY"
            elif "NotNull" in a.constraints:
                col += " NOT NULL"
            if "Unique" in a.constraints:
                col += " UNIQUE"
            target = a.foreign_key_target
            if target is not None:
                pk = quote_ident(by_id[target].primary_key.name)
                if (e.id, target) in deferred:
                    alters.append(
                        f"ALTER TABLE {quote_ident(e.id)} ADD CONSTRAINT "
                        f"{quote_ident(f'fk_{e.id}_{a.name}')} FOREIGN KEY "
                        f"({quote_ident(a.name)}) REFERENCES {quote_ident(target)}({pk});")
                else:
                    col += f" REFERENCES {quote_ident(target)}({pk})"
            cols.append(col)
        body = ",\n".join("    " + c for c in cols)
        statements.append(f"CREATE TABLE {quote_ident(e.id)} (\n{body}\n);")
    return "\n\n".join(statements + alters) + "\n"
