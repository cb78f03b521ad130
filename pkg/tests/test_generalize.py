from __future__ import annotations

import itertools

from paraverify import (
    Checker,
    Clause,
    GeneralizeContext,
    compute_join_diff,
    heuristic_generalize,
    simplify_aux_inv_decreasing,
    simplify_aux_inv_increasing,
)
from paraverify.cti import BlockedAssertionStore, EquationSet
from paraverify.generalize import regular_generalize
from paraverify.parser import parse_protocol

SIZES = {"NODE": 3}

SOL = EquationSet((
    (("st", (1,)), "Trying"),
    (("lock", ()), False),
    (("st", (2,)), "Critical"),
))
MUTUAL12 = Clause(((("st", (1,)), "Critical"), (("st", (2,)), "Critical")))
TARGET = "~(lock = false & st[2] = Critical)"


class RecordingChecker(Checker):
    """Checker that logs the literal sets of fresh (non-cached) checks."""

    def __init__(self, spec):
        super().__init__(spec)
        self.trace = []

    def check_invariant(self, p, inv):
        before = self.computed_checks
        r = super().check_invariant(p, inv)
        if self.computed_checks > before:
            self.trace.append((inv.canonical().literals, r.verdict))
        return r


def test_join_diff_examples():
    ctx = GeneralizeContext(known=(MUTUAL12,))
    join, diff = compute_join_diff(SOL, ctx)
    assert join.literals == ((("st", (2,)), "Critical"),)
    assert diff.literals == ((("st", (1,)), "Trying"), (("lock", ()), False))

    disjoint = GeneralizeContext(known=(Clause(((("lock", ()), True),)),))
    join2, diff2 = compute_join_diff(SOL, disjoint)
    assert join2.literals == () and diff2.literals == SOL.literals

    superset = GeneralizeContext(
        known=(Clause(SOL.literals), Clause(((("lock", ()), True),)))
    )
    join3, diff3 = compute_join_diff(SOL, superset)
    assert join3.literals == SOL.literals and diff3.literals == ()


def test_decreasing_trace_six_calls(mux):
    ch = RecordingChecker(mux)
    inv = simplify_aux_inv_decreasing(SOL, ch, SIZES)
    assert inv.text() == TARGET
    assert ch.computed_checks == 6
    verdicts = [v for _, v in ch.trace]
    assert verdicts == ["holds", "violated", "violated", "holds", "violated", "violated"]


def test_increasing_trace_six_calls(mux):
    ch = RecordingChecker(mux)
    inv = simplify_aux_inv_increasing(SOL, ch, SIZES)
    assert inv.text() == TARGET
    assert ch.computed_checks == 6
    verdicts = [v for _, v in ch.trace]
    assert verdicts == ["violated"] * 5 + ["holds"]


def test_increasing_exhaustion_costs_all_sublists(mux):
    ch = Checker(mux)
    hopeless = EquationSet((
        (("st", (1,)), "Idle"),
        (("st", (2,)), "Idle"),
        (("lock", ()), False),
    ))
    assert simplify_aux_inv_increasing(hopeless, ch, SIZES) is None
    assert ch.computed_checks == 2 ** 3 - 1


def test_decreasing_absent_when_full_set_fails(mux):
    ch = Checker(mux)
    reachable = EquationSet(((("lock", ()), True),))
    assert simplify_aux_inv_decreasing(reachable, ch, SIZES) is None
    assert ch.computed_checks == 1


def test_single_literal_pass_costs_one_call():
    spec = parse_protocol(
        "type NODE;\nenum E { A, B, C };\nvar x : array[NODE] of E;\n"
        "init { forall n : NODE . x[n] = A; }\n"
        "rule r(i : NODE) guard x[i] = A action x[i] := B;\n"
        "invariant f(a : NODE) : !(x[a] = C);\n"
    )
    ch = Checker(spec)
    sol = EquationSet(((("x", (1,)), "C"),))
    inv = simplify_aux_inv_decreasing(sol, ch, SIZES)
    assert inv.text() == "~(x[1] = C)"
    assert ch.computed_checks == 1
    ch2 = Checker(spec)
    sol2 = EquationSet(((("x", (2,)), "B"), (("x", (1,)), "C")))
    inv2 = simplify_aux_inv_increasing(sol2, ch2, SIZES)
    assert inv2.text() == "~(x[1] = C)"
    assert ch2.computed_checks <= 2


def test_heuristic_trace_four_fresh_calls(mux):
    ch = RecordingChecker(mux)
    ctx = GeneralizeContext(known=(MUTUAL12,), strategy="decreasing", heuristic=True)
    inv = heuristic_generalize(SOL, ctx, ch, SIZES)
    assert inv.text() == TARGET
    assert ch.computed_checks == 4
    assert ch.cache_hits == 1  # the strip re-checks the passing candidate
    first_candidate = ch.trace[0][0]
    assert first_candidate == ((("st", (1,)), "Trying"), (("st", (2,)), "Critical"))


def test_heuristic_empty_join_falls_back(mux):
    ctx = GeneralizeContext(known=(Clause(((("lock", ()), True),)),), heuristic=True)
    a = heuristic_generalize(SOL, ctx, Checker(mux), SIZES)
    b = simplify_aux_inv_decreasing(SOL, Checker(mux), SIZES)
    assert a == b


def test_heuristic_exhaustion_returns_absent(mux):
    ch = Checker(mux)
    hopeless = EquationSet(((("st", (1,)), "Idle"), (("lock", ()), False)))
    ctx = GeneralizeContext(known=(MUTUAL12,), heuristic=True)
    assert heuristic_generalize(hopeless, ctx, ch, SIZES) is None


def test_generalize_installs_blocking_assertions(mux):
    from paraverify.symmetry import get_symmetry_invs

    store = BlockedAssertionStore()
    ctx = GeneralizeContext(known=(MUTUAL12,), heuristic=True)
    inv = heuristic_generalize(
        SOL, ctx, Checker(mux), SIZES, store,
        lambda c: get_symmetry_invs(c, {"NODE": "forall"}, SIZES, mux),
    )
    assert inv is not None
    assert inv in store
    assert len(store) == 3


def test_is_legal_rejects_known(mux):
    ctx = GeneralizeContext(
        known=(MUTUAL12, Clause(TARGETS := ((("lock", ()), False), (("st", (2,)), "Critical")))),
        heuristic=False,
    )
    out = regular_generalize(SOL, ctx, Checker(mux), SIZES)
    assert out is None  # minimal result is already known


def test_minimality_of_results(mux):
    ch = Checker(mux)
    for strategy, fn in (
        ("dec", simplify_aux_inv_decreasing),
        ("inc", simplify_aux_inv_increasing),
    ):
        inv = fn(SOL, ch, SIZES)
        lits = inv.literals
        for n in range(1, len(lits)):
            for sub in itertools.combinations(lits, n):
                assert not ch.holds(SIZES, Clause(sub)), (strategy, sub)


def test_strategy_agreement_both_pass(mux):
    ch = Checker(mux)
    dec = simplify_aux_inv_decreasing(SOL, ch, SIZES)
    inc = simplify_aux_inv_increasing(SOL, ch, SIZES)
    assert ch.holds(SIZES, dec) and ch.holds(SIZES, inc)


def test_heuristic_conservativity(mux):
    """A heuristic result always passes the checker at the reference sizes."""
    ch = Checker(mux)
    ctx = GeneralizeContext(known=(MUTUAL12,), heuristic=True)
    inv = heuristic_generalize(SOL, ctx, ch, SIZES)
    assert ch.holds(SIZES, inv)
