"""Shrinking counterexample solutions into concise auxiliary invariants.

Two base strategies minimize a solution's literal list: the decreasing
strategy starts from the full negated conjunction and recursively descends
into the first passing shorter sublist; the increasing strategy scans
sublists by ascending length and returns the first that passes.  The
heuristic search first intersects the solution with the equality terms of
already-known invariants (the join set) and grows it with solution-unique
terms (the diff set), which typically reaches a near-minimal candidate in
a couple of checks; a base strategy then strips residual terms.

Because invariance of a negated conjunction is upward closed under adding
literals, both strategies return subset-minimal invariants.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .checker import Checker
from .cti import BlockedAssertionStore, EquationSet, block_assertion
from .formulas import Clause

Lits = tuple


@dataclass(frozen=True)
class GeneralizeContext:
    """Known invariants, their equality-term pool, and strategy switches."""

    known: tuple[Clause, ...]
    strategy: str = "decreasing"  # or "increasing"
    heuristic: bool = True

    @property
    def eq_terms(self) -> frozenset:
        return frozenset(l for inv in self.known for l in inv.literals)


def compute_join_diff(
    sol: EquationSet, ctx: GeneralizeContext
) -> tuple[EquationSet, EquationSet]:
    """Split the solution into known-term and solution-unique parts, order-stable."""
    eq1 = ctx.eq_terms
    join = tuple(l for l in sol.literals if l in eq1)
    diff = tuple(l for l in sol.literals if l not in eq1)
    return EquationSet(join), EquationSet(diff)


def _passes(lits: Lits, checker: Checker, sizes: dict[str, int]) -> bool:
    return checker.holds(sizes, Clause(tuple(lits)))


def simplify_aux_inv_decreasing(
    sol: EquationSet | Lits, checker: Checker, sizes: dict[str, int]
) -> Clause | None:
    """Remove irrelevant terms from the largest candidate, first-success descent."""
    lits = sol.literals if isinstance(sol, EquationSet) else tuple(sol)

    def descend(current: Lits) -> Clause | None:
        if not _passes(current, checker, sizes):
            return None
        best = Clause(tuple(current)).canonical()
        if len(current) > 1:
            for sub in itertools.combinations(current, len(current) - 1):
                deeper = descend(sub)
                if deeper is not None:
                    best = deeper
                    break
        return best

    return descend(lits)


def simplify_aux_inv_increasing(
    sol: EquationSet | Lits, checker: Checker, sizes: dict[str, int]
) -> Clause | None:
    """Scan sublists by ascending length, lexicographic within a length."""
    lits = sol.literals if isinstance(sol, EquationSet) else tuple(sol)
    for n in range(1, len(lits) + 1):
        for sub in itertools.combinations(lits, n):
            if _passes(sub, checker, sizes):
                return Clause(tuple(sub)).canonical()
    return None


def simplify_aux_inv(
    sol: EquationSet | Lits, checker: Checker, sizes: dict[str, int], strategy: str
) -> Clause | None:
    if strategy == "decreasing":
        return simplify_aux_inv_decreasing(sol, checker, sizes)
    if strategy == "increasing":
        return simplify_aux_inv_increasing(sol, checker, sizes)
    raise ValueError(f"unknown strategy {strategy!r}")


def is_legal(inv: Clause, known: tuple[Clause, ...]) -> bool:
    """Nonempty and not syntactically identical to a known invariant."""
    if not inv.literals:
        return False
    canon = inv.canonical().literals
    return all(canon != k.canonical().literals for k in known)


def _finalize(
    inv: Clause | None,
    ctx: GeneralizeContext,
    store: BlockedAssertionStore | None,
    symmetries_fn,
) -> Clause | None:
    if inv is None or not is_legal(inv, ctx.known):
        return None
    if store is not None:
        images = symmetries_fn(inv) if symmetries_fn is not None else []
        block_assertion(inv, images, store)
    return inv


def regular_generalize(
    sol: EquationSet,
    ctx: GeneralizeContext,
    checker: Checker,
    sizes: dict[str, int],
    store: BlockedAssertionStore | None = None,
    symmetries_fn=None,
) -> Clause | None:
    """Base path: minimize the full solution, then legality-check and block."""
    inv = simplify_aux_inv(sol, checker, sizes, ctx.strategy)
    return _finalize(inv, ctx, store, symmetries_fn)


def heuristic_generalize(
    sol: EquationSet,
    ctx: GeneralizeContext,
    checker: Checker,
    sizes: dict[str, int],
    store: BlockedAssertionStore | None = None,
    symmetries_fn=None,
) -> Clause | None:
    """Join-guided candidate search with base-strategy stripping and fallback.

    Grows join with n-subsets of diff until a candidate passes, strips the
    passing candidate with the configured strategy, and falls back to the
    base path when the join is empty or no candidate passes.  On success
    the invariant and its symmetric images are asserted into the store.
    """
    join, diff = compute_join_diff(sol, ctx)
    aux: Clause | None = None
    if join.literals:
        found: Lits | None = None
        for n in range(1, len(diff.literals) + 1):
            for sub in itertools.combinations(diff.literals, n):
                cand = join.literals + sub
                if _passes(cand, checker, sizes):
                    found = cand
                    break
            if found is not None:
                break
        if found is not None:
            aux = simplify_aux_inv(found, checker, sizes, ctx.strategy)
    if aux is not None:
        final = _finalize(aux, ctx, store, symmetries_fn)
        if final is not None:
            return final
    return regular_generalize(sol, ctx, checker, sizes, store, symmetries_fn)


def generalize(
    sol: EquationSet,
    ctx: GeneralizeContext,
    checker: Checker,
    sizes: dict[str, int],
    store: BlockedAssertionStore | None = None,
    symmetries_fn=None,
) -> Clause | None:
    """Dispatch on the context's heuristic flag."""
    if ctx.heuristic:
        return heuristic_generalize(sol, ctx, checker, sizes, store, symmetries_fn)
    return regular_generalize(sol, ctx, checker, sizes, store, symmetries_fn)
