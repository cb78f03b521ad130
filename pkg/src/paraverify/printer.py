"""Canonical text rendering of a protocol back into DSL source.

``parse(print(parse(text)))`` equals ``parse(text)``; the printer is the
normalizing half of that round trip.
"""

from __future__ import annotations

from .ast import (
    Assign,
    BinderRef,
    BoolSort,
    EnumSort,
    ForallLit,
    Literal,
    ParamSort,
    ProtocolSpec,
    Term,
    VarRef,
)


def term_text(t: Term) -> str:
    if isinstance(t, VarRef):
        return t.name + "".join(f"[{term_text(i)}]" for i in t.indices)
    if isinstance(t, BinderRef):
        return t.name
    if isinstance(t, bool):
        return "true" if t else "false"
    return str(t)


def literal_text(lit: Literal) -> str:
    return f"{term_text(lit.lhs)} {lit.op} {term_text(lit.rhs)}"


def _guard_item_text(item) -> str:
    if isinstance(item, ForallLit):
        binders = ", ".join(f"{n} : {t}" for n, t in item.binders)
        return f"forall {binders} . {literal_text(item.body)}"
    return literal_text(item)


def _binder_head(binders, distinct) -> str:
    args = ", ".join(f"{n} : {t}" for n, t in binders)
    head = f"({args})"
    if distinct:
        conds = " & ".join(f"{a} != {b}" for a, b in distinct)
        head += f" where {conds}"
    return head


def print_protocol(spec: ProtocolSpec) -> str:
    """Render a spec as DSL source text."""
    out: list[str] = []
    for t in spec.param_types:
        out.append(f"type {t};")
    for e in spec.enums:
        out.append(f"enum {e.name} {{ {', '.join(e.members)} }};")
    for v in spec.variables:
        if isinstance(v.sort, BoolSort):
            sort = "boolean"
        elif isinstance(v.sort, EnumSort):
            sort = v.sort.enum
        else:
            assert isinstance(v.sort, ParamSort)
            sort = v.sort.param_type
        if v.index_types:
            arr = "".join(f"[{t}]" for t in v.index_types)
            out.append(f"var {v.name} : array{arr} of {sort};")
        else:
            out.append(f"var {v.name} : {sort};")
    items = " ".join(f"{_guard_item_text(i)};" for i in spec.init)
    out.append(f"init {{ {items} }}")
    for r in spec.rules:
        guard = " & ".join(_guard_item_text(g) for g in r.guard)
        action = ", ".join(f"{term_text(a.target)} := {term_text(a.rhs)}" for a in r.action)
        out.append(f"rule {r.name}{_binder_head(r.binders, r.distinct)} guard {guard} action {action};")
    for p in spec.safety:
        body = " & ".join(literal_text(l) for l in p.body)
        out.append(f"invariant {p.name}{_binder_head(p.binders, p.distinct)} : !({body});")
    return "\n".join(out) + "\n"
