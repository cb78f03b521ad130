"""Independent brute-force oracles used to cross-check the engines.

These interpret the symbolic ground forms directly over decoded value
dictionaries: no code sharing with the compiled checker paths, no
propagation, no caching.  Exponential; only for small instances.
"""

from __future__ import annotations

import itertools

from paraverify.concrete import ConcreteProtocol, GroundRule
from paraverify.formulas import Clause, GroundVar

State = dict


def all_states(p: ConcreteProtocol):
    axes = [p.domains[i] for i in range(len(p.ground_vars))]
    for combo in itertools.product(*axes):
        yield dict(zip(p.ground_vars, combo))


def decode_init(p: ConcreteProtocol):
    for s in p.init_states:
        yield {gv: p.domains[i][s[i]] for i, gv in enumerate(p.ground_vars)}


def guard_holds(rule: GroundRule, state: State) -> bool:
    for lhs, op, rhs in rule.guard:
        left = state[lhs]
        right = state[rhs] if isinstance(rhs, tuple) else rhs
        if (left == right) != (op == "="):
            return False
    return True


def apply_rule(rule: GroundRule, state: State) -> State:
    nxt = dict(state)
    for gv, rhs in rule.action:
        nxt[gv] = state[rhs] if isinstance(rhs, tuple) else rhs
    return nxt


def clause_satisfied(clause: Clause, state: State) -> bool:
    return not all(state.get(gv) == val for gv, val in clause.literals)


def naive_reachable(p: ConcreteProtocol) -> set[tuple]:
    """Fixpoint over explicitly enumerated successors; states as sorted item tuples."""

    def key(state: State) -> tuple:
        return tuple(state[gv] for gv in p.ground_vars)

    seen = {key(s) for s in decode_init(p)}
    frontier = [dict(s) for s in decode_init(p)]
    while frontier:
        fresh = []
        for s in frontier:
            for rule in p.rules:
                if guard_holds(rule, s):
                    t = apply_rule(rule, s)
                    k = key(t)
                    if k not in seen:
                        seen.add(k)
                        fresh.append(t)
        frontier = fresh
    return seen


def naive_invariant_holds(p: ConcreteProtocol, clause: Clause) -> bool:
    order = list(p.ground_vars)
    for state_key in naive_reachable(p):
        state = dict(zip(order, state_key))
        if not clause_satisfied(clause, state):
            return False
    return True


def naive_inductive(p: ConcreteProtocol, clauses: list[Clause]) -> bool:
    """Full-product enumeration of the satisfying states, then consecution."""
    for s in decode_init(p):
        if not all(clause_satisfied(c, s) for c in clauses):
            return False
    for s in all_states(p):
        if not all(clause_satisfied(c, s) for c in clauses):
            continue
        for rule in p.rules:
            if guard_holds(rule, s):
                t = apply_rule(rule, s)
                if not all(clause_satisfied(c, t) for c in clauses):
                    return False
    return True


def naive_obligation_satisfiable(
    p: ConcreteProtocol,
    rule: GroundRule,
    target: Clause,
    store_clauses: list[Clause],
) -> bool:
    """Exhaustive pre-state search over the variables the problem mentions.

    A pre-state is a witness when the guard holds, every store clause is
    satisfied, and the rule's successor makes the target clause's whole
    conjunction true.  Variables mentioned nowhere cannot matter and keep
    a fixed value.
    """
    relevant: list[GroundVar] = []

    def note(gv: GroundVar) -> None:
        if gv not in relevant:
            relevant.append(gv)

    for lhs, _, rhs in rule.guard:
        note(lhs)
        if isinstance(rhs, tuple):
            note(rhs)
    for gv, rhs in rule.action:
        if isinstance(rhs, tuple):
            note(rhs)
    for gv, _ in target.literals:
        note(gv)
    for c in store_clauses:
        for gv, _ in c.literals:
            note(gv)

    base = {gv: p.domains[p.var_pos[gv]][0] for gv in p.ground_vars}
    domains = [p.domains[p.var_pos[gv]] for gv in relevant]
    position = {gv: i for i, gv in enumerate(relevant)}

    # Constraints become checkable once their last relevant variable is set.
    guard_at: dict[int, list] = {}
    for lit in rule.guard:
        lhs, _, rhs = lit
        last = max(position[lhs], position[rhs] if isinstance(rhs, tuple) else 0)
        guard_at.setdefault(last, []).append(lit)
    store_at: dict[int, list[Clause]] = {}
    for c in store_clauses:
        last = max(position[gv] for gv, _ in c.literals)
        store_at.setdefault(last, []).append(c)

    def lit_holds(lit, state: State) -> bool:
        lhs, op, rhs = lit
        right = state[rhs] if isinstance(rhs, tuple) else rhs
        return (state[lhs] == right) == (op == "=")

    def conj_true_at_post(state: State) -> bool:
        post = apply_rule(rule, state)
        return all(post[gv] == val for gv, val in target.literals)

    def search(i: int, state: State) -> bool:
        if i == len(relevant):
            return conj_true_at_post(state)
        gv = relevant[i]
        for val in domains[i]:
            state[gv] = val
            if all(lit_holds(l, state) for l in guard_at.get(i, ())) and all(
                clause_satisfied(c, state) for c in store_at.get(i, ())
            ):
                if search(i + 1, state):
                    return True
        state[gv] = base[gv]
        return False

    return search(0, dict(base))


def naive_implies(
    p: ConcreteProtocol, premise: list[Clause], conclusion: list[Clause]
) -> bool:
    for s in all_states(p):
        if all(clause_satisfied(c, s) for c in premise) and not all(
            clause_satisfied(c, s) for c in conclusion
        ):
            return False
    return True
