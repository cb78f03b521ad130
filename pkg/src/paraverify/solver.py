"""Finite-domain equality solver over ground protocol variables.

Constraints are equalities/disequalities against constants or other
variables plus blocked clauses ("not all of these equalities hold").
Search is chronological backtracking with forward pruning and unit
propagation on blocked clauses; branching follows variable declaration
order and ascending value codes, so the first solution found is the
lexicographically least one over the constrained variables.
"""

from __future__ import annotations

from .errors import ResourceLimitError


class Csp:
    """One satisfiability problem over integer-coded variable domains."""

    def __init__(self, domain_sizes: list[int]):
        self.sizes = domain_sizes
        self.dom: dict[int, set[int]] = {}
        self.eqvar: list[tuple[int, int]] = []
        self.neqvar: list[tuple[int, int]] = []
        self.clauses: list[list[tuple[int, int]]] = []
        self.failed = False

    def _d(self, p: int) -> set[int]:
        if p not in self.dom:
            self.dom[p] = set(range(self.sizes[p]))
        return self.dom[p]

    def add_eq(self, p: int, c: int) -> None:
        d = self._d(p)
        if c in d:
            self.dom[p] = {c}
        else:
            self.failed = True

    def add_neq(self, p: int, c: int) -> None:
        d = self._d(p)
        d.discard(c)
        if not d:
            self.failed = True

    def add_eqvar(self, a: int, b: int) -> None:
        if a == b:
            return
        self._d(a), self._d(b)
        self.eqvar.append((a, b))

    def add_neqvar(self, a: int, b: int) -> None:
        if a == b:
            self.failed = True
            return
        self._d(a), self._d(b)
        self.neqvar.append((a, b))

    def add_clause(self, lits: list[tuple[int, int]]) -> None:
        """Forbid the conjunction of the given (variable, code) equalities."""
        if not lits:
            self.failed = True
            return
        for p, _ in lits:
            self._d(p)
        self.clauses.append(list(lits))

    # -- search -----------------------------------------------------------

    def _propagate(self, dom: dict[int, set[int]]) -> bool:
        changed = True
        while changed:
            changed = False
            for a, b in self.eqvar:
                inter = dom[a] & dom[b]
                if not inter:
                    return False
                if inter != dom[a]:
                    dom[a] = set(inter)
                    changed = True
                if inter != dom[b]:
                    dom[b] = set(inter)
                    changed = True
            for a, b in self.neqvar:
                if len(dom[a]) == 1:
                    (v,) = dom[a]
                    if v in dom[b]:
                        if len(dom[b]) == 1:
                            return False
                        dom[b].discard(v)
                        changed = True
                if len(dom[b]) == 1:
                    (v,) = dom[b]
                    if v in dom[a]:
                        if len(dom[a]) == 1:
                            return False
                        dom[a].discard(v)
                        changed = True
            for cl in self.clauses:
                undetermined = None
                count = 0
                satisfied = False
                for p, c in cl:
                    d = dom[p]
                    if c not in d:
                        satisfied = True
                        break
                    if len(d) > 1:
                        undetermined = (p, c)
                        count += 1
                        if count > 1:
                            break
                if satisfied:
                    continue
                if count == 0:
                    return False
                if count == 1:
                    p, c = undetermined
                    dom[p].discard(c)
                    if not dom[p]:
                        return False
                    changed = True
        return True

    def _active_vars(self, dom: dict[int, set[int]]) -> list[int]:
        active: set[int] = set()
        for a, b in self.eqvar:
            if len(dom[a]) > 1 or len(dom[b]) > 1:
                active.update((a, b))
        for a, b in self.neqvar:
            if len(dom[a]) > 1 or len(dom[b]) > 1:
                active.update((a, b))
        for cl in self.clauses:
            if all(c in dom[p] for p, c in cl):
                active.update(p for p, c in cl if len(dom[p]) > 1)
        return sorted(v for v in active if len(dom[v]) > 1)

    def solve(self, node_limit: int | None = None) -> dict[int, int] | None:
        """First satisfying assignment over touched variables, or None."""
        if self.failed:
            return None
        nodes = 0

        def branch(dom: dict[int, set[int]]) -> dict[int, set[int]] | None:
            nonlocal nodes
            nodes += 1
            if node_limit is not None and nodes > node_limit:
                raise ResourceLimitError("solver node limit exceeded")
            if not self._propagate(dom):
                return None
            active = self._active_vars(dom)
            if not active:
                return dom
            p = active[0]
            for c in sorted(dom[p]):
                child = {q: set(s) for q, s in dom.items()}
                child[p] = {c}
                r = branch(child)
                if r is not None:
                    return r
            return None

        result = branch({p: set(d) for p, d in self.dom.items()})
        if result is None:
            return None
        return {p: min(d) for p, d in result.items()}
