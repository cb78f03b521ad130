from __future__ import annotations

import itertools
import math
import random

from hypothesis import given, strategies as st

from paraverify import Checker, Clause, canonical_form, get_symmetry_invs
from paraverify.formulas import literal_key
from paraverify.symmetry import apply_permutation, build_plan, orbit_representative


def clause(*lits):
    return Clause(tuple(lits))


AUX = clause((("lock", ()), False), (("st", (2,)), "Critical"))


def test_orbit_example_forall_free(mux):
    orbit = get_symmetry_invs(AUX, {"NODE": "forall"}, {"NODE": 3}, mux)
    assert [c.text() for c in orbit] == [
        "~(lock = false & st[1] = Critical)",
        "~(lock = false & st[3] = Critical)",
    ]


def test_orbit_globals_only_is_empty(mux):
    assert get_symmetry_invs(clause((("lock", ()), True)), {"NODE": "forall"}, {"NODE": 3}, mux) == []


def test_orbit_swap_collapses(mux):
    pair = clause((("st", (1,)), "Critical"), (("st", (2,)), "Critical"))
    assert get_symmetry_invs(pair, {"NODE": "forall"}, {"NODE": 2}, mux) == []


def test_split_classification_restricts_permutations(mux):
    plan = build_plan(["NODE"], {"NODE": ("split", (1,), (2, 3))}, {"NODE": 3})
    perms = plan.permutations()
    # value 1 is pinned inside its own block; 2 and 3 swap freely
    assert len(perms) == 2
    for mapping in perms:
        assert mapping["NODE"][1] == 1


def test_orbit_closure(mux):
    orbit = get_symmetry_invs(AUX, {"NODE": "forall"}, {"NODE": 3}, mux)
    full = sorted(
        [AUX.canonical()] + orbit, key=lambda c: tuple(literal_key(l) for l in c.literals)
    )
    for member in full:
        again = get_symmetry_invs(member, {"NODE": "forall"}, {"NODE": 3}, mux)
        regrown = sorted(
            [member.canonical()] + again,
            key=lambda c: tuple(literal_key(l) for l in c.literals),
        )
        assert regrown == full


def test_orbit_size_divides_group_order(mux):
    rng = random.Random(5)
    p = Checker(mux).protocol({"NODE": 3})
    for _ in range(40):
        n = rng.randint(1, 3)
        lits = []
        for _ in range(n):
            pos = rng.randrange(len(p.ground_vars))
            lits.append((p.ground_vars[pos], rng.choice(p.domains[pos])))
        c = Clause(tuple(lits))
        orbit = get_symmetry_invs(c, {"NODE": "forall"}, {"NODE": 3}, mux)
        assert math.factorial(3) % (len(orbit) + 1) == 0


def test_orbit_members_have_equal_verdicts(mux):
    ch = Checker(mux)
    p = ch.protocol({"NODE": 3})
    rng = random.Random(9)
    for _ in range(30):
        n = rng.randint(1, 3)
        lits = []
        for _ in range(n):
            pos = rng.randrange(len(p.ground_vars))
            lits.append((p.ground_vars[pos], rng.choice(p.domains[pos])))
        c = Clause(tuple(lits))
        verdict = ch.check_invariant(p, c).holds
        for image in get_symmetry_invs(c, {"NODE": "forall"}, {"NODE": 3}, mux):
            assert ch.check_invariant(p, image).holds == verdict


def test_canonical_form_sorts_and_is_stable():
    c = clause((("st", (2,)), "Critical"), (("lock", ()), False))
    canon = canonical_form(c)
    assert canon.text() == "~(lock = false & st[2] = Critical)"
    assert canonical_form(canon) == canon


@given(st.permutations([
    (("lock", ()), False),
    (("st", (1,)), "Trying"),
    (("st", (2,)), "Critical"),
]))
def test_canonical_form_order_independent(perm):
    assert canonical_form(Clause(tuple(perm))) == canonical_form(
        Clause((
            (("lock", ()), False),
            (("st", (1,)), "Trying"),
            (("st", (2,)), "Critical"),
        ))
    )


def test_permutation_acts_on_indices_and_param_values():
    from paraverify.parser import parse_protocol

    spec = parse_protocol(
        "type T;\nvar owner : T;\nvar busy : array[T] of boolean;\n"
        "init { owner = 1; }\n"
        "rule r(i : T) guard busy[i] = false action owner := i;\n"
        "invariant f(a : T) : !(busy[a] = true);\n"
    )
    c = clause((("owner", ()), 2), (("busy", (1,)), True))
    image = apply_permutation(c, {"T": {1: 2, 2: 1}}, spec)
    assert image == clause((("owner", ()), 1), (("busy", (2,)), True)).canonical()


def test_orbit_representative_is_least_and_stable(mux):
    variants = [
        clause((("lock", ()), False), (("st", (v,)), "Critical")) for v in (1, 2, 3)
    ]
    reps = {orbit_representative(c, {"NODE": 3}, mux) for c in variants}
    assert reps == {variants[0].canonical()}
