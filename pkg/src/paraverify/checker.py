"""Explicit-state reachability and invariant checking on finite instances.

One :class:`Checker` serves a whole verification run: reachable-state sets
are computed once per concretization, and clause verdicts are cached by
canonical form, so repeated queries (including symmetric rediscoveries)
cost nothing.  ``computed_checks`` counts fresh model-checking work and is
the basis for strategy-comparison statistics.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ast import ProtocolSpec
from .concrete import ConcreteProtocol, GroundRule, concretize, sizes_key
from .errors import ResourceLimitError
from .formulas import Clause
from .solver import Csp

DEFAULT_STATE_LIMIT = 10**7


@dataclass(frozen=True)
class CheckResult:
    verdict: str  # "holds" | "violated"
    witness: dict | None = None
    stats: dict = field(default_factory=dict, compare=False)

    @property
    def holds(self) -> bool:
        return self.verdict == "holds"


class Checker:
    """Reachability engine with a monotone (insert-only) verdict cache."""

    def __init__(self, spec: ProtocolSpec, state_limit: int = DEFAULT_STATE_LIMIT):
        self.spec = spec
        self.state_limit = state_limit
        self._protocols: dict[tuple, ConcreteProtocol] = {}
        self._reachable: dict[tuple, tuple[tuple[int, ...], ...]] = {}
        self.cache: dict[tuple, CheckResult] = {}
        self.computed_checks = 0
        self.cache_hits = 0

    def protocol(self, sizes: dict[str, int]) -> ConcreteProtocol:
        key = sizes_key(sizes)
        if key not in self._protocols:
            self._protocols[key] = concretize(self.spec, sizes, check_properties=False)
        return self._protocols[key]

    def adopt_reachability(self, other: "Checker") -> None:
        """Reuse another checker's reachable-state sets (warm service context).

        Verdict caches and counters are not shared, so fresh-check counts
        stay comparable across runs.
        """
        self._protocols.update(other._protocols)
        self._reachable.update(other._reachable)

    # -- reachability -------------------------------------------------------

    def reachable_states(self, p: ConcreteProtocol) -> frozenset[tuple[int, ...]]:
        """Exact breadth-first fixed point from the initial states."""
        return frozenset(self._reachable_sorted(p))

    def _reachable_sorted(self, p: ConcreteProtocol) -> tuple[tuple[int, ...], ...]:
        key = sizes_key(p.sizes)
        if key in self._reachable:
            return self._reachable[key]
        seen: set[tuple[int, ...]] = set(p.init_states)
        frontier = list(p.init_states)
        n_rules = len(p.rules)
        while frontier:
            fresh: list[tuple[int, ...]] = []
            for s in frontier:
                for ri in range(n_rules):
                    if p.enabled(ri, s):
                        t = p.successor(ri, s)
                        if t not in seen:
                            seen.add(t)
                            fresh.append(t)
            if len(seen) > self.state_limit:
                raise ResourceLimitError(
                    f"reachable set exceeds state limit {self.state_limit}"
                )
            frontier = fresh
        states = tuple(sorted(seen))
        self._reachable[key] = states
        return states

    # -- invariant checking --------------------------------------------------

    def check_invariant(self, p: ConcreteProtocol, inv: Clause) -> CheckResult:
        """Does every reachable state satisfy the clause?

        Cached by (concretization, canonical form); the reported witness is
        the least violating reachable state in canonical order.
        """
        canon = inv.canonical()
        key = (sizes_key(p.sizes), canon.literals)
        if key in self.cache:
            self.cache_hits += 1
            hit = self.cache[key]
            return CheckResult(hit.verdict, hit.witness, dict(hit.stats, cache_hit=True))
        states = self._reachable_sorted(p)
        self.computed_checks += 1
        tests = p.clause_codes(canon)
        witness = None
        for s in states:
            if all(s[pos] == code for pos, code in tests):
                witness = s
                break
        stats = {"states_visited": len(states), "cache_hit": False}
        if witness is None:
            result = CheckResult("holds", None, stats)
        else:
            result = CheckResult("violated", p.decode(witness), stats)
        self.cache[key] = result
        return result

    def holds(self, sizes: dict[str, int], inv: Clause) -> bool:
        return self.check_invariant(self.protocol(sizes), inv).holds

    def check_all(self, p: ConcreteProtocol, clauses: list[Clause]) -> CheckResult:
        """Conjunction of clause checks; first violated clause wins."""
        visited = 0
        for c in clauses:
            r = self.check_invariant(p, c)
            visited = max(visited, r.stats.get("states_visited", 0))
            if not r.holds:
                return CheckResult(
                    "violated", r.witness, dict(r.stats, clause=c.text())
                )
        return CheckResult("holds", None, {"states_visited": visited})

    # -- inductiveness ---------------------------------------------------------

    def check_inductive(self, p: ConcreteProtocol, invs: list[Clause]) -> CheckResult:
        """Initiation plus consecution over all states satisfying the set.

        Consecution quantifies over every state satisfying the conjunction,
        reachable or not: for each ground rule and each clause the rule can
        touch, a constraint problem asks for a pre-state that satisfies all
        clauses and the guard while the successor violates the clause.
        Clauses outside the relevance closure of a problem's core are
        discharged by completing the witness from an initial state, which
        initiation has already shown satisfies the whole set.  The witness
        is the pre-state of the first failing pair in deterministic order.
        """
        clauses = [c.canonical() for c in invs]
        compiled = [p.clause_codes(c) for c in clauses]
        for s in p.init_states:
            for c, tests in zip(clauses, compiled):
                if all(s[pos] == code for pos, code in tests):
                    return CheckResult(
                        "violated", p.decode(s), {"phase": "initiation", "clause": c.text()}
                    )
        completion = p.init_states[0]
        var_index: dict[int, list[int]] = {}
        for ci, codes in enumerate(compiled):
            for pos, _ in codes:
                var_index.setdefault(pos, []).append(ci)
        clause_vars = [frozenset(pos for pos, _ in codes) for codes in compiled]
        for rule in p.rules:
            assigned = {p.var_pos[gv] for gv in rule.assigned_vars()}
            for ci, c in enumerate(clauses):
                if not (assigned & clause_vars[ci]):
                    continue
                witness = self._consecution_counterexample(
                    p, rule, c, compiled, var_index, completion
                )
                if witness is not None:
                    return CheckResult(
                        "violated",
                        p.decode(witness),
                        {"phase": "consecution", "rule": rule.label(), "clause": c.text()},
                    )
        return CheckResult("holds", None, {})

    def _consecution_counterexample(
        self,
        p: ConcreteProtocol,
        rule: GroundRule,
        target: Clause,
        compiled: list[list[tuple[int, int]]],
        var_index: dict[int, list[int]],
        completion: tuple[int, ...],
    ) -> tuple[int, ...] | None:
        csp = Csp([len(d) for d in p.domains])
        assigned = dict(rule.action)
        core: set[int] = set()
        # Post-state violation of the target, pulled back through the rule.
        for gv, val in target.literals:
            if gv in assigned:
                rhs = assigned[gv]
                if isinstance(rhs, tuple):
                    pos = p.var_pos[rhs]
                    csp.add_eq(pos, p.codes[pos][val])
                    core.add(pos)
                elif rhs != val:
                    return None
            else:
                pos = p.var_pos[gv]
                csp.add_eq(pos, p.codes[pos][val])
                core.add(pos)
        for lhs, op, rhs in rule.guard:
            lp = p.var_pos[lhs]
            core.add(lp)
            if isinstance(rhs, tuple):
                rp = p.var_pos[rhs]
                core.add(rp)
                csp.add_eqvar(lp, rp) if op == "=" else csp.add_neqvar(lp, rp)
            else:
                code = p.codes[lp][rhs]
                csp.add_eq(lp, code) if op == "=" else csp.add_neq(lp, code)
        for ci in relevant_clause_indices(compiled, var_index, core):
            csp.add_clause(compiled[ci])
        sol = csp.solve(node_limit=self.state_limit)
        if sol is None:
            return None
        return tuple(
            sol.get(i, completion[i]) for i in range(len(p.ground_vars))
        )


def relevant_clause_indices(
    compiled: list[list[tuple[int, int]]],
    var_index: dict[int, list[int]],
    core: set[int],
    forced: tuple[int, ...] = (),
) -> list[int]:
    """Clauses transitively sharing variables with the core variable set.

    Clauses outside the closure can be satisfied independently by any
    fixed state known to satisfy them, so a caller holding such a
    completion state may soundly drop them from the problem; ``forced``
    names clauses the completion does not satisfy, which therefore seed
    the closure.
    """
    include: set[int] = set()
    reached = set(core)
    queue = list(core)
    for ci in forced:
        include.add(ci)
        for pos, _ in compiled[ci]:
            if pos not in reached:
                reached.add(pos)
                queue.append(pos)
    while queue:
        v = queue.pop()
        for ci in var_index.get(v, ()):
            if ci in include:
                continue
            include.add(ci)
            for pos, _ in compiled[ci]:
                if pos not in reached:
                    reached.add(pos)
                    queue.append(pos)
    return sorted(include)
