"""Inductive proof obligations and their finite-domain solutions.

An obligation pairs a ground rule with a ground clause invariant and asks
for a pre-state from which the rule's successor violates the clause.  The
post-state condition is pulled back through the rule's assignments by
literal substitution, so the whole problem lives over pre-state variables
and is decided by the finite-domain solver together with every blocked
assertion accumulated so far.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ast import Value
from .concrete import ConcreteProtocol, GroundRule
from .formulas import Clause, GroundVar
from .solver import Csp


@dataclass(frozen=True)
class IndObligation:
    """Four-part obligation: guard, action effects, frame, negated goal."""

    rule: GroundRule
    target: Clause
    guard_part: tuple  # pre-state literals (lhs, op, rhs)
    action_part: tuple[tuple[GroundVar, "Value | GroundVar"], ...]
    frame_part: tuple[GroundVar, ...]  # post var = pre var, for these vars
    neg_goal: tuple[tuple[GroundVar, Value], ...]  # post-state conjunction


@dataclass(frozen=True)
class EquationSet:
    """Solver solution: ordered, deduplicated pre-state equality literals."""

    literals: tuple[tuple[GroundVar, Value], ...]

    def to_clause(self) -> Clause:
        return Clause(self.literals)


class BlockedAssertionStore:
    """Insert-only set of clause constraints asserted into every solve.

    Grows with each generalized invariant and its symmetric images; a
    solution can never satisfy the conjunction of a stored clause.
    Snapshots are prefix lengths, usable to replay a solve later.
    """

    def __init__(self) -> None:
        self.clauses: list[Clause] = []
        self._keys: set[tuple] = set()

    def add(self, clause: Clause) -> bool:
        canon = clause.canonical()
        if canon.literals in self._keys:
            return False
        self._keys.add(canon.literals)
        self.clauses.append(canon)
        return True

    def __len__(self) -> int:
        return len(self.clauses)

    def __contains__(self, clause: Clause) -> bool:
        return clause.canonical().literals in self._keys

    def snapshot(self) -> int:
        return len(self.clauses)

    def view(self, upto: int | None = None) -> list[Clause]:
        return self.clauses if upto is None else self.clauses[:upto]


def build_obligation(rule: GroundRule, target: Clause) -> IndObligation | None:
    """Construct the obligation, or None when it is trivially unviolable.

    When the rule assigns no variable of the target clause, the clause is
    preserved outright, so no counterexample can exist and the pair is
    filtered.
    """
    assigned = rule.assigned_vars()
    target_vars = set(target.vars())
    if not (assigned & target_vars):
        return None
    frame = tuple(gv for gv in target.vars() if gv not in assigned)
    return IndObligation(
        rule=rule,
        target=target,
        guard_part=rule.guard,
        action_part=rule.action,
        frame_part=frame,
        neg_goal=target.literals,
    )


def pulled_back_goal(
    obl: IndObligation,
) -> list[tuple[GroundVar, Value]] | None:
    """Negated goal rewritten over the pre-state; None if contradictory.

    Assigned variables are substituted by their right-hand sides
    (constants evaluate eagerly, variable copies redirect the literal);
    framed variables keep their literal unchanged.
    """
    assigned = dict(obl.action_part)
    out: list[tuple[GroundVar, Value]] = []
    for gv, val in obl.neg_goal:
        if gv in assigned:
            rhs = assigned[gv]
            if isinstance(rhs, tuple):
                out.append((rhs, val))
            elif rhs != val:
                return None
        else:
            out.append((gv, val))
    return out


def solve_obligation(
    obl: IndObligation,
    store: BlockedAssertionStore,
    protocol: ConcreteProtocol,
    node_limit: int | None = None,
    store_upto: int | None = None,
) -> EquationSet | None:
    """First solution of the obligation under all blocked assertions.

    The search assigns variables in declaration order with values in
    domain order; the returned equations cover exactly the variables the
    obligation constrains (guard variables, then pulled-back goal
    variables, in first-occurrence order).  None means no counterexample
    to induction exists for this pair.
    """
    goal = pulled_back_goal(obl)
    if goal is None:
        return None
    csp = Csp([len(d) for d in protocol.domains])
    order: list[GroundVar] = []

    def note(gv: GroundVar) -> None:
        if gv not in order:
            order.append(gv)

    for lhs, op, rhs in obl.guard_part:
        lp = protocol.var_pos[lhs]
        note(lhs)
        if isinstance(rhs, tuple):
            note(rhs)
            rp = protocol.var_pos[rhs]
            if op == "=":
                csp.add_eqvar(lp, rp)
            else:
                csp.add_neqvar(lp, rp)
        else:
            code = protocol.codes[lp][rhs]
            if op == "=":
                csp.add_eq(lp, code)
            else:
                csp.add_neq(lp, code)
    for gv, val in goal:
        note(gv)
        pos = protocol.var_pos[gv]
        csp.add_eq(pos, protocol.codes[pos][val])
    for clause in store.view(store_upto):
        csp.add_clause(protocol.clause_codes(clause))
    solution = csp.solve(node_limit=node_limit)
    if solution is None:
        return None
    literals = []
    seen: set[GroundVar] = set()
    for gv in order:
        if gv in seen:
            continue
        seen.add(gv)
        pos = protocol.var_pos[gv]
        literals.append((gv, protocol.domains[pos][solution[pos]]))
    return EquationSet(tuple(literals))


def candidate_invariant(sol: EquationSet) -> Clause:
    """Negate the solution's conjunction; canonical literal order."""
    if not sol.literals:
        raise ValueError("empty solution would denote falsum")
    clause = Clause(sol.literals).canonical()
    assert clause.consistent()
    return clause


def block_assertion(
    inv: Clause, symmetries: list[Clause], store: BlockedAssertionStore
) -> BlockedAssertionStore:
    """Assert the invariant and every symmetric image; idempotent."""
    store.add(inv)
    for s in symmetries:
        store.add(s)
    return store
