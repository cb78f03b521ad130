from __future__ import annotations

import pytest

from paraverify import (
    BlockedAssertionStore,
    Checker,
    Clause,
    block_assertion,
    build_obligation,
    candidate_invariant,
    solve_obligation,
)
from paraverify.cti import EquationSet
from paraverify.symmetry import get_symmetry_invs

from oracles import naive_obligation_satisfiable


def clause(*lits):
    return Clause(tuple(lits))


@pytest.fixture(scope="module")
def mux3(mux):
    return Checker(mux).protocol({"NODE": 3})


def _mutual12(mux, mux3):
    return mux3.ground_property_at(mux.safety[0], (1, 2)).clause


def test_obligation_parts_for_crit1(mux, mux3):
    crit1 = mux3.ground_rule_at(mux.rule("crit"), (1,))
    obl = build_obligation(crit1, _mutual12(mux, mux3))
    assert obl.guard_part == (
        (("st", (1,)), "=", "Trying"),
        (("lock", ()), "=", False),
    )
    assert obl.action_part == ((("st", (1,)), "Critical"), (("lock", ()), True))
    assert obl.frame_part == (("st", (2,)),)
    assert obl.neg_goal == (
        (("st", (1,)), "Critical"),
        (("st", (2,)), "Critical"),
    )


def test_disjoint_pair_is_filtered(mux, mux3):
    try3 = mux3.ground_rule_at(mux.rule("try"), (3,))
    assert build_obligation(try3, _mutual12(mux, mux3)) is None


def test_overlapping_pair_is_built(mux, mux3):
    exit1 = mux3.ground_rule_at(mux.rule("exit"), (1,))
    assert build_obligation(exit1, _mutual12(mux, mux3)) is not None


def test_filter_soundness_by_state_pair_enumeration(mux):
    """Filtered pairs preserve the clause along every transition."""
    from oracles import all_states, apply_rule, clause_satisfied, guard_holds

    p = Checker(mux).protocol({"NODE": 2})
    targets = [gp.clause for gp in p.properties]
    for rule in p.rules:
        for target in targets:
            if build_obligation(rule, target) is not None:
                continue
            for s in all_states(p):
                if guard_holds(rule, s) and clause_satisfied(target, s):
                    assert clause_satisfied(target, apply_rule(rule, s))


def test_solve_first_solution(mux, mux3):
    crit1 = mux3.ground_rule_at(mux.rule("crit"), (1,))
    obl = build_obligation(crit1, _mutual12(mux, mux3))
    sol = solve_obligation(obl, BlockedAssertionStore(), mux3)
    assert sol.literals == (
        (("st", (1,)), "Trying"),
        (("lock", ()), False),
        (("st", (2,)), "Critical"),
    )


def test_solve_respects_blocked_store(mux, mux3):
    crit1 = mux3.ground_rule_at(mux.rule("crit"), (1,))
    obl = build_obligation(crit1, _mutual12(mux, mux3))
    store = BlockedAssertionStore()
    store.add(clause((("lock", ()), False), (("st", (2,)), "Critical")))
    assert solve_obligation(obl, store, mux3) is None


def test_solve_constant_clash_unsat(mux, mux3):
    exit1 = mux3.ground_rule_at(mux.rule("exit"), (1,))
    obl = build_obligation(exit1, _mutual12(mux, mux3))
    assert solve_obligation(obl, BlockedAssertionStore(), mux3) is None


def test_solve_deterministic(mux, mux3):
    crit1 = mux3.ground_rule_at(mux.rule("crit"), (1,))
    obl = build_obligation(crit1, _mutual12(mux, mux3))
    a = solve_obligation(obl, BlockedAssertionStore(), mux3)
    b = solve_obligation(obl, BlockedAssertionStore(), mux3)
    assert a == b


def test_candidate_invariant_examples():
    sol = EquationSet((
        (("st", (1,)), "Trying"),
        (("lock", ()), False),
        (("st", (2,)), "Critical"),
    ))
    inv = candidate_invariant(sol)
    assert inv.text() == "~(lock = false & st[1] = Trying & st[2] = Critical)"
    single = candidate_invariant(EquationSet(((("lock", ()), True),)))
    assert single.text() == "~(lock = true)"
    with pytest.raises(ValueError):
        candidate_invariant(EquationSet(()))


def test_block_assertion_with_symmetries(mux):
    store = BlockedAssertionStore()
    inv = clause((("lock", ()), False), (("st", (2,)), "Critical"))
    images = get_symmetry_invs(inv, {"NODE": "forall"}, {"NODE": 3}, mux)
    block_assertion(inv, images, store)
    assert len(store) == 3
    block_assertion(inv, images, store)
    assert len(store) == 3  # idempotent


def test_block_assertion_globals_only(mux):
    store = BlockedAssertionStore()
    inv = clause((("lock", ()), True))
    images = get_symmetry_invs(inv, {"NODE": "forall"}, {"NODE": 3}, mux)
    block_assertion(inv, images, store)
    assert len(store) == 1


def test_blocking_monotonicity(mux, mux3):
    """Adding assertions never turns an unsatisfiable obligation satisfiable."""
    store = BlockedAssertionStore()
    extra = [
        clause((("st", (1,)), "Idle"), (("st", (2,)), "Idle")),
        clause((("lock", ()), True)),
    ]
    for rule_name in ("try", "crit", "exit"):
        for binding in ((1,), (2,), (3,)):
            rule = mux3.ground_rule_at(mux.rule(rule_name), binding)
            obl = build_obligation(rule, _mutual12(mux, mux3))
            if obl is None:
                continue
            before = solve_obligation(obl, store, mux3)
            grown = BlockedAssertionStore()
            for c in extra:
                grown.add(c)
            after = solve_obligation(obl, grown, mux3)
            if before is None:
                assert after is None


def test_solver_verdicts_match_oracle_on_mux(mux, mux3):
    store = BlockedAssertionStore()
    store.add(clause((("lock", ()), False), (("st", (1,)), "Critical")))
    for rule_name in ("try", "crit", "exit"):
        for binding in ((1,), (2,), (3,)):
            rule = mux3.ground_rule_at(mux.rule(rule_name), binding)
            obl = build_obligation(rule, _mutual12(mux, mux3))
            if obl is None:
                continue
            got = solve_obligation(obl, store, mux3) is not None
            want = naive_obligation_satisfiable(
                mux3, rule, _mutual12(mux, mux3), store.view()
            )
            assert got == want, (rule_name, binding)
