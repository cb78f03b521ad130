"""Ground clause invariants and quantified parameterized invariants.

A concrete invariant is the negation of a conjunction of ground equality
literals (``~(x[1] = A & lock = false)``).  A parameterized invariant adds a
quantifier prefix over parameter types; its ground expansion at a given
concretization is again a list of clauses, because a disjunction of negated
conjunctions collapses into a single negated conjunction of the union.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .ast import BinderRef, ParamSort, ProtocolSpec, Value

# A ground state-variable instance: name plus concrete index values.
GroundVar = tuple[str, tuple[int, ...]]


def _value_key(v: Value) -> tuple:
    if isinstance(v, bool):
        return (0, "", int(v))
    if isinstance(v, int):
        return (1, "", v)
    return (2, v, 0)


def literal_key(lit: tuple[GroundVar, Value]) -> tuple:
    (name, idx), val = lit
    return (name, idx, _value_key(val))


@dataclass(frozen=True)
class Clause:
    """Negated conjunction of ground equality literals (a concrete invariant)."""

    literals: tuple[tuple[GroundVar, Value], ...]

    def canonical(self) -> "Clause":
        return Clause(tuple(sorted(set(self.literals), key=literal_key)))

    def vars(self) -> tuple[GroundVar, ...]:
        seen: dict[GroundVar, None] = {}
        for gv, _ in self.literals:
            seen.setdefault(gv)
        return tuple(seen)

    def consistent(self) -> bool:
        """False when two literals pin one variable to different values."""
        bound: dict[GroundVar, Value] = {}
        for gv, val in self.literals:
            if gv in bound and bound[gv] != val:
                return False
            bound[gv] = val
        return True

    def violated_by(self, assignment: dict[GroundVar, Value]) -> bool:
        return all(assignment.get(gv) == val for gv, val in self.literals)

    def text(self) -> str:
        parts = [f"{_gvar_text(gv)} = {_val_text(v)}" for gv, v in self.literals]
        return "~(" + " & ".join(parts) + ")"


def _gvar_text(gv: GroundVar) -> str:
    name, idx = gv
    return name + "".join(f"[{i}]" for i in idx)


def _val_text(v: Value) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def clause_values_by_type(clause: Clause, spec: ProtocolSpec) -> dict[str, list[int]]:
    """Distinct parameter values per type occurring in a clause.

    Values occur as array indices and as values of parameter-sorted
    variables; per type they are reported in first-occurrence order over the
    clause's literal list.
    """
    found: dict[str, list[int]] = {}
    for (name, idx), val in clause.literals:
        decl = spec.var(name)
        for pos, t in zip(idx, decl.index_types):
            found.setdefault(t, [])
            if pos not in found[t]:
                found[t].append(pos)
        if isinstance(decl.sort, ParamSort) and isinstance(val, int):
            t = decl.sort.param_type
            found.setdefault(t, [])
            if val not in found[t]:
                found[t].append(val)
    return found


# -- parameterized invariants ------------------------------------------------


@dataclass(frozen=True)
class ParamLiteral:
    """Equality literal over binder-indexed variables."""

    var: str
    indices: tuple[BinderRef | int, ...]
    value: Value | BinderRef


@dataclass(frozen=True)
class ParamInvariant:
    """Quantified clause: prefix of Forall then Exists binders over a body.

    ``distinct`` lists binder pairs constrained to differ; only universal
    binders carry distinctness.  The body is a negated conjunction.
    """

    binders: tuple[tuple[str, str, str], ...]  # (name, param type, "forall"|"exists")
    distinct: tuple[tuple[str, str], ...]
    body: tuple[ParamLiteral, ...]
    provenance: dict = field(default_factory=dict, compare=False, hash=False)

    def forall_binders(self) -> tuple[tuple[str, str, str], ...]:
        return tuple(b for b in self.binders if b[2] == "forall")

    def exists_binders(self) -> tuple[tuple[str, str, str], ...]:
        return tuple(b for b in self.binders if b[2] == "exists")

    def text(self) -> str:
        parts = []
        fa = self.forall_binders()
        ex = self.exists_binders()
        if fa:
            parts.append("forall " + ", ".join(f"{n}:{t}" for n, t, _ in fa) + " .")
        if ex:
            parts.append("exists " + ", ".join(f"{n}:{t}" for n, t, _ in ex) + " .")
        body = "~(" + " & ".join(_plit_text(l) for l in self.body) + ")"
        if self.distinct:
            conds = " & ".join(f"{a} ~= {b}" for a, b in self.distinct)
            parts.append(f"{conds} -> {body}")
        else:
            parts.append(body)
        return " ".join(parts)

    def min_sizes(self) -> dict[str, int]:
        """Smallest per-type size admitting an instantiation of the prefix."""
        out: dict[str, int] = {}
        for t in {ty for _, ty, _ in self.binders}:
            names = [n for n, ty, q in self.binders if ty == t and q == "forall"]
            edges = [(a, b) for a, b in self.distinct if a in names and b in names]
            n = 1
            while not _colorable(names, edges, n):
                n += 1
            out[t] = max(n, 1)
        return out


def _colorable(names: list[str], edges: list[tuple[str, str]], n: int) -> bool:
    if not names:
        return True

    def assign(i: int, colors: dict[str, int]) -> bool:
        if i == len(names):
            return True
        for c in range(n):
            colors[names[i]] = c
            if all(colors.get(a) != colors.get(b) or a not in colors or b not in colors
                   for a, b in edges if names[i] in (a, b)):
                if assign(i + 1, colors):
                    return True
            del colors[names[i]]
        return False

    return assign(0, {})


def _plit_text(lit: ParamLiteral) -> str:
    idx = "".join(f"[{i.name if isinstance(i, BinderRef) else i}]" for i in lit.indices)
    val = lit.value.name if isinstance(lit.value, BinderRef) else _val_text(lit.value)
    return f"{lit.var}{idx} = {val}"


def instantiate_body(
    body: tuple[ParamLiteral, ...], env: dict[str, int]
) -> tuple[tuple[GroundVar, Value], ...]:
    lits = []
    for l in body:
        idx = tuple(env[i.name] if isinstance(i, BinderRef) else i for i in l.indices)
        val = env[l.value.name] if isinstance(l.value, BinderRef) else l.value
        lits.append(((l.var, idx), val))
    return tuple(lits)


def ground_expand(inv: ParamInvariant, sizes: dict[str, int]) -> list[Clause]:
    """Expand a parameterized invariant into ground clauses at ``sizes``.

    Universal binders range over injective-on-distinct-pairs assignments;
    the existential disjunction collapses into the literal union per
    universal instance.  Instances whose conjunction is inconsistent are
    trivially true and dropped.  Returns deduplicated canonical clauses.
    """
    fa = inv.forall_binders()
    ex = inv.exists_binders()
    fa_domains = [range(1, sizes[t] + 1) for _, t, _ in fa]
    ex_domains = [range(1, sizes[t] + 1) for _, t, _ in ex]
    out: list[Clause] = []
    seen = set()
    for fa_vals in itertools.product(*fa_domains):
        env = {n: v for (n, _, _), v in zip(fa, fa_vals)}
        if any(env[a] == env[b] for a, b in inv.distinct if a in env and b in env):
            continue
        union: list[tuple[GroundVar, Value]] = []
        for ex_vals in itertools.product(*ex_domains):
            env2 = dict(env)
            env2.update({n: v for (n, _, _), v in zip(ex, ex_vals)})
            union.extend(instantiate_body(inv.body, env2))
        clause = Clause(tuple(union)).canonical()
        if not clause.consistent():
            continue
        if clause.literals not in seen:
            seen.add(clause.literals)
            out.append(clause)
    return out


def canonical_param(inv: ParamInvariant) -> ParamInvariant:
    """Alpha-normalize binder names; deterministic across equivalent inputs.

    Binders within one (quantifier, type) class are interchangeable modulo
    distinctness structure, so all class-internal orderings are tried and
    the lexicographically least rendering wins.  Names become i1, i2, ...
    in prefix order.
    """
    classes: dict[tuple[str, str], list[str]] = {}
    order: list[tuple[str, str]] = []
    for n, t, q in inv.binders:
        key = (q, t)
        if key not in classes:
            classes[key] = []
            order.append(key)
        classes[key].append(n)
    order.sort(key=lambda k: (0 if k[0] == "forall" else 1, k[1]))
    best = None
    for perms in itertools.product(*[itertools.permutations(classes[k]) for k in order]):
        ordered: list[tuple[str, str, str]] = []
        for key, perm in zip(order, perms):
            q, t = key
            ordered.extend((n, t, q) for n in perm)
        rename = {n: f"i{k + 1}" for k, (n, _, _) in enumerate(ordered)}
        binders = tuple((rename[n], t, q) for n, t, q in ordered)
        body = tuple(
            ParamLiteral(
                l.var,
                tuple(BinderRef(rename[i.name]) if isinstance(i, BinderRef) else i for i in l.indices),
                BinderRef(rename[l.value.name]) if isinstance(l.value, BinderRef) else l.value,
            )
            for l in inv.body
        )
        body = tuple(sorted(set(body), key=_plit_key))
        distinct = tuple(sorted(tuple(sorted((rename[a], rename[b]))) for a, b in inv.distinct))
        key = (tuple(_plit_key(l) for l in body), distinct, binders)
        if best is None or key < best[0]:
            best = (key, ParamInvariant(binders, distinct, body, provenance=inv.provenance))
    assert best is not None
    return best[1]


def _plit_key(l: ParamLiteral) -> tuple:
    idx = tuple(("b", i.name) if isinstance(i, BinderRef) else ("v", str(i)) for i in l.indices)
    val = ("b", l.value.name, 0) if isinstance(l.value, BinderRef) else ("v",) + _value_key(l.value)[:2]
    return (l.var, idx, val)


def param_from_safety(prop, spec: ProtocolSpec) -> ParamInvariant:
    """Lift a declared safety property to a parameterized invariant."""
    binders = tuple((n, t, "forall") for n, t in prop.binders)
    body = []
    for lit in prop.body:
        idx = tuple(i if isinstance(i, int) else BinderRef(i.name) for i in lit.lhs.indices)
        body.append(ParamLiteral(lit.lhs.name, idx, lit.rhs))
    return ParamInvariant(
        binders,
        tuple(tuple(sorted(p)) for p in prop.distinct),
        tuple(body),
        provenance={"kind": "safety", "property": prop.name},
    )
