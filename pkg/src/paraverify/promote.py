"""Promotion of concrete invariants to quantified parameterized form.

Type saturation drives the quantifier choice: a parameter type whose
distinct values in a clause do not exhaust the instance size is
size-independent and universalizes directly.  A saturated type may depend
on the instance size, so candidate quantifier assignments are validated
against the next larger instance: universal promotion corresponds to
rechecking the clause's value-renamings one size up, and existential
promotion of a value group corresponds to rechecking the group's
universally extended clause (the clause plus the group's literals copied
at every value).  Candidates are tried most-universal first; a candidate
must also imply the original clause back at the reference sizes, so
promotion never loses strength at the size it came from.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .ast import BinderRef, ParamSort, ProtocolSpec
from .checker import Checker
from .errors import PromotionError
from .formulas import (
    Clause,
    ParamInvariant,
    ParamLiteral,
    canonical_param,
    clause_values_by_type,
    ground_expand,
)
from .solver import Csp


@dataclass(frozen=True)
class SaturationReport:
    """Per-type occurrence counts and saturation for one clause."""

    entries: tuple[tuple[str, int, int], ...]  # (type, count, size)

    def gamma(self, t: str) -> float:
        for ty, count, size in self.entries:
            if ty == t:
                return count / size
        raise KeyError(t)

    def types(self) -> list[str]:
        return [t for t, _, _ in self.entries]

    def saturated_types(self) -> list[str]:
        return [t for t, count, size in self.entries if count == size]


def compute_saturation(clause: Clause, spec: ProtocolSpec, sizes: dict[str, int]) -> SaturationReport:
    """Distinct parameter values per type over the clause's literals."""
    values = clause_values_by_type(clause, spec)
    entries = []
    for t in spec.param_types:
        if t in values:
            entries.append((t, len(values[t]), sizes[t]))
    return SaturationReport(tuple(entries))


def group_literals(clause: Clause, spec: ProtocolSpec, t: str, value: int) -> Clause:
    """The minimal grouping of one concrete value: literals mentioning it."""
    lits = []
    for (name, idx), val in clause.literals:
        decl = spec.var(name)
        hit = any(i == value and ty == t for i, ty in zip(idx, decl.index_types))
        if isinstance(decl.sort, ParamSort) and decl.sort.param_type == t and val == value:
            hit = True
        if hit:
            lits.append(((name, idx), val))
    return Clause(tuple(lits))


def extend_group(
    clause: Clause, spec: ProtocolSpec, t: str, value: int, sizes: dict[str, int]
) -> Clause:
    """Universally extended clause for one value group, one size up.

    Contains every literal of the clause plus the group's literals with
    the grouped value substituted by each value 1..C(t)+1; duplicates
    collapse.  Raises ``ValueError`` when the value has no group.
    """
    group = group_literals(clause, spec, t, value)
    if not group.literals:
        raise ValueError(f"no literals of {clause.text()} mention {t}={value}")
    lits = list(clause.literals)
    for w in range(1, sizes[t] + 2):
        for (name, idx), val in group.literals:
            decl = spec.var(name)
            new_idx = tuple(
                w if (i == value and ty == t) else i
                for i, ty in zip(idx, decl.index_types)
            )
            new_val = val
            if isinstance(decl.sort, ParamSort) and decl.sort.param_type == t and val == value:
                new_val = w
            lits.append(((name, new_idx), new_val))
    return Clause(tuple(lits)).canonical()


def build_param_invariant(
    clause: Clause, spec: ProtocolSpec, exists_values: dict[str, tuple[int, ...]]
) -> ParamInvariant:
    """Replace concrete values by binders; chosen values become existential.

    Universal binders keep pairwise distinctness (their source values were
    distinct); existential binders range freely, matching the collapsed
    disjunctive reading of a saturated group.
    """
    values = clause_values_by_type(clause, spec)
    binder_of: dict[tuple[str, int], str] = {}
    binders: list[tuple[str, str, str]] = []
    ordered: list[tuple[str, int, str]] = []
    for t in spec.param_types:
        for v in values.get(t, []):
            quant = "exists" if v in exists_values.get(t, ()) else "forall"
            ordered.append((t, v, quant))
    ordered.sort(key=lambda item: (0 if item[2] == "forall" else 1))
    for k, (t, v, quant) in enumerate(ordered):
        name = f"i{k + 1}"
        binder_of[(t, v)] = name
        binders.append((name, t, quant))
    distinct = []
    for t in spec.param_types:
        names = [
            binder_of[(t, v)]
            for v in values.get(t, [])
            if v not in exists_values.get(t, ())
        ]
        for a, b in itertools.combinations(sorted(names), 2):
            distinct.append((a, b))
    body = []
    for (name, idx), val in clause.literals:
        decl = spec.var(name)
        new_idx = tuple(
            BinderRef(binder_of[(ty, i)]) for i, ty in zip(idx, decl.index_types)
        )
        new_val: object = val
        if isinstance(decl.sort, ParamSort) and isinstance(val, int):
            new_val = BinderRef(binder_of[(decl.sort.param_type, val)])
        body.append(ParamLiteral(name, new_idx, new_val))
    return ParamInvariant(tuple(binders), tuple(distinct), tuple(body))


def _clause_problem(p, compiled, var_index, forced, target_codes, state_limit) -> bool:
    """Unsatisfiability of (all clauses) /\\ (target conjunction), restricted
    to the relevance closure of the target plus completion-violated clauses."""
    from .checker import relevant_clause_indices

    csp = Csp([len(d) for d in p.domains])
    core = set()
    for pos, code in target_codes:
        csp.add_eq(pos, code)
        core.add(pos)
    for ci in relevant_clause_indices(compiled, var_index, core, forced):
        csp.add_clause(compiled[ci])
    return csp.solve(node_limit=state_limit) is None


def _compile_premises(p, clauses: list[Clause]):
    compiled = [p.clause_codes(c) for c in clauses]
    var_index: dict[int, list[int]] = {}
    for ci, codes in enumerate(compiled):
        for pos, _ in codes:
            var_index.setdefault(pos, []).append(ci)
    completion = p.init_states[0]
    forced = tuple(
        ci for ci, codes in enumerate(compiled)
        if all(completion[pos] == code for pos, code in codes)
    )
    return compiled, var_index, forced


def _implied_at(
    clauses: list[Clause], target: Clause, checker: Checker, sizes: dict[str, int]
) -> bool:
    """Does the conjunction of clause invariants imply the target clause?

    Valid over all states of the declared domains: unsatisfiability of
    (all clauses) /\\ (target's conjunction).
    """
    p = checker.protocol(sizes)
    compiled, var_index, forced = _compile_premises(p, clauses)
    return _clause_problem(
        p, compiled, var_index, forced, p.clause_codes(target), checker.state_limit
    )


def promote(
    clause: Clause, spec: ProtocolSpec, sizes: dict[str, int], checker: Checker
) -> ParamInvariant:
    """Quantified form of a concrete invariant, validated one size up.

    Unsaturated types universalize outright.  For saturated types,
    candidate existential value-subsets are tried in ascending size
    (all-universal first); a candidate is adopted when its ground
    expansion implies the clause at the reference sizes, holds there, and
    holds at C(t)+1 for every saturated type t.
    """
    sat = compute_saturation(clause, spec, sizes)
    flex = sat.saturated_types()
    values = clause_values_by_type(clause, spec)
    decisions: dict = {"saturation": {t: f"{c}/{s}" for t, c, s in sat.entries}}
    if not flex:
        inv = canonical_param(build_param_invariant(clause, spec, {}))
        for c in ground_expand(inv, dict(sizes)):
            if not checker.holds(sizes, c):
                raise PromotionError(
                    f"universal promotion of {clause.text()} fails at reference sizes"
                )
        decisions["branch"] = "unsaturated-forall"
        inv.provenance.update(decisions)
        return inv

    subset_axes = []
    for t in flex:
        vals = tuple(values[t])
        subsets = []
        for n in range(0, len(vals) + 1):
            subsets.extend(itertools.combinations(vals, n))
        subset_axes.append([(t, s) for s in subsets])
    candidates = sorted(
        itertools.product(*subset_axes),
        key=lambda combo: (sum(len(s) for _, s in combo), tuple(s for _, s in combo)),
    )
    trace = []
    for combo in candidates:
        exists_values = {t: s for t, s in combo if s}
        inv = canonical_param(build_param_invariant(clause, spec, exists_values))
        verdicts = _validate_candidate(inv, clause, spec, sizes, flex, checker)
        trace.append({"exists": {t: list(s) for t, s in exists_values.items()}, "ok": verdicts})
        if verdicts == "ok":
            decisions["branch"] = "saturated-ladder"
            decisions["groups"] = {
                t: {str(v): ("exists" if v in exists_values.get(t, ()) else "forall")
                    for v in values[t]}
                for t in flex
            }
            decisions["ladder"] = trace
            inv.provenance.update(decisions)
            return inv
    raise PromotionError(f"no validated quantifier assignment for {clause.text()}")


def _validate_candidate(
    inv: ParamInvariant,
    clause: Clause,
    spec: ProtocolSpec,
    sizes: dict[str, int],
    flex: list[str],
    checker: Checker,
) -> str:
    ref_clauses = ground_expand(inv, dict(sizes))
    if not _implied_at(ref_clauses, clause, checker, sizes):
        return "does-not-imply-source"
    for c in ref_clauses:
        if not checker.holds(sizes, c):
            return "fails-at-reference"
    for t in flex:
        up = dict(sizes)
        up[t] = sizes[t] + 1
        for c in ground_expand(inv, up):
            if not checker.holds(up, c):
                return f"fails-at-{t}-plus-one"
    return "ok"


# -- bounded implication and merging ----------------------------------------


def _size_vectors(
    spec: ProtocolSpec, invs: list[ParamInvariant], bound: int
) -> list[dict[str, int]]:
    floors = {t: 1 for t in spec.param_types}
    for inv in invs:
        for t, n in inv.min_sizes().items():
            floors[t] = max(floors[t], n)
    axes = [range(floors[t], max(floors[t], bound) + 1) for t in spec.param_types]
    return [dict(zip(spec.param_types, combo)) for combo in itertools.product(*axes)]


def _conj_implies(
    premises: list[ParamInvariant],
    conclusion: ParamInvariant,
    spec: ProtocolSpec,
    bound: int,
    checker: Checker,
) -> bool:
    for sizes in _size_vectors(spec, premises + [conclusion], bound):
        p = checker.protocol(sizes)
        premise_clauses = [
            c for inv in premises for c in ground_expand(inv, sizes)
        ]
        compiled, var_index, forced = _compile_premises(p, premise_clauses)
        for target in ground_expand(conclusion, sizes):
            if not _clause_problem(
                p, compiled, var_index, forced, p.clause_codes(target), checker.state_limit
            ):
                return False
    return True


def implies_semantically(
    phi: ParamInvariant,
    psi: ParamInvariant,
    spec: ProtocolSpec,
    size_bound: int,
    checker: Checker | None = None,
) -> bool:
    """Bounded implication: over every concretization with sizes up to the
    bound (and at least the binder minimum), every state satisfying phi's
    ground expansion satisfies psi's.  Sound and complete only up to the
    bound."""
    checker = checker or Checker(spec)
    return _conj_implies([phi], psi, spec, size_bound, checker)


def merge_invariants(
    invs: list[ParamInvariant],
    spec: ProtocolSpec,
    size_bound: int,
    checker: Checker,
    reference_sizes: dict[str, int],
) -> tuple[list[ParamInvariant], list[dict]]:
    """Deduplicate, collapse implied invariants, and strengthen mergeable groups.

    Processing order is canonical, so output is deterministic.  Returns
    the merged list plus a log of merge events.
    """
    events: list[dict] = []
    by_key: dict = {}
    for inv in invs:
        canon = canonical_param(inv)
        key = (canon.binders, canon.distinct, canon.body)
        if key in by_key:
            events.append({"kind": "equivalence", "kept": canon.text()})
        else:
            by_key[key] = canon
    current = sorted(by_key.values(), key=lambda i: i.text())

    # Implication collapse: drop any invariant implied by a strictly
    # stronger single survivor; iterate to a fixpoint.
    changed = True
    while changed:
        changed = False
        for a, b in itertools.permutations(list(current), 2):
            if a not in current or b not in current:
                continue
            if implies_semantically(a, b, spec, size_bound, checker) and not implies_semantically(
                b, a, spec, size_bound, checker
            ):
                current.remove(b)
                events.append({"kind": "implication", "kept": a.text(), "dropped": b.text()})
                changed = True

    # Strengthening merge over groups with identical universal skeletons
    # and matching existential type signatures.
    groups: dict = {}
    for inv in current:
        fa = inv.forall_binders()
        ex = inv.exists_binders()
        if not ex:
            continue
        fa_names = {n for n, _, _ in fa}
        fa_lits = tuple(
            l for l in inv.body
            if all(not isinstance(i, BinderRef) or i.name in fa_names for i in l.indices)
            and (not isinstance(l.value, BinderRef) or l.value.name in fa_names)
        )
        key = (
            tuple((t, q) for _, t, q in fa),
            inv.distinct,
            fa_lits,
            tuple(sorted(t for _, t, _ in ex)),
        )
        groups.setdefault(key, []).append(inv)
    for key in sorted(groups, key=str):
        group = groups[key]
        if not 2 <= len(group) <= 4:
            continue
        merged = _strengthen(group)
        if merged is None:
            continue
        strict = all(
            _conj_implies([merged], g, spec, size_bound, checker) for g in group
        ) and not _conj_implies(group, merged, spec, size_bound, checker)
        holds = all(
            checker.holds(reference_sizes, c)
            for c in ground_expand(merged, reference_sizes)
        )
        if strict and holds:
            for g in group:
                current.remove(g)
            current.append(merged)
            events.append(
                {
                    "kind": "strengthening",
                    "kept": merged.text(),
                    "dropped": [g.text() for g in group],
                }
            )
    current.sort(key=lambda i: i.text())
    return current, events


def _strengthen(group: list[ParamInvariant]) -> ParamInvariant | None:
    """Unify the existential parts of structurally compatible invariants.

    Members share the universal skeleton; their existential binders are
    renamed positionally onto the first member's, and the disjunction of
    bodies collapses into the union clause.
    """
    head = group[0]
    ex_head = head.exists_binders()
    body: list[ParamLiteral] = list(head.body)
    for other in group[1:]:
        ex_other = other.exists_binders()
        if [t for _, t, _ in ex_other] != [t for _, t, _ in ex_head]:
            return None
        rename = {n: hn for (n, _, _), (hn, _, _) in zip(ex_other, ex_head)}
        fa_pairs = list(zip(other.forall_binders(), head.forall_binders()))
        for (n, t1, _), (hn, t2, _) in fa_pairs:
            if t1 != t2:
                return None
            rename[n] = hn
        for l in other.body:
            idx = tuple(
                BinderRef(rename[i.name]) if isinstance(i, BinderRef) else i
                for i in l.indices
            )
            val = (
                BinderRef(rename[l.value.name])
                if isinstance(l.value, BinderRef)
                else l.value
            )
            body.append(ParamLiteral(l.var, idx, val))
    merged = ParamInvariant(
        head.binders,
        head.distinct,
        tuple(dict.fromkeys(body)),
        provenance={"kind": "strengthening-merge"},
    )
    return canonical_param(merged)
