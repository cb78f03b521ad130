"""Concretization of parameterized protocols to finite instances.

Covers the finite-instance semantics (ground variables, rules, and initial
states), the minimum-size computation for a safety property, and the
symmetry-reduced enumeration of rule instances against a fixed property
instance.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .ast import (
    Assign,
    BinderRef,
    BoolSort,
    EnumSort,
    ForallLit,
    Literal,
    ParamSort,
    ProtocolSpec,
    Rule,
    SafetyProperty,
    Value,
    VarRef,
)
from .errors import ConcretizeError
from .formulas import Clause, GroundVar

_INIT_STATE_CAP = 10**6

# Ground guard literal: (lhs ground var, "=" or "!=", value or ground var).
GroundGuardLit = tuple[GroundVar, str, "Value | GroundVar"]


def sizes_key(sizes: dict[str, int]) -> tuple[tuple[str, int], ...]:
    return tuple(sorted(sizes.items()))


@dataclass(frozen=True)
class GroundRule:
    """One rule instance: binder values plus fully ground guard and action."""

    name: str
    binding: tuple[int, ...]
    guard: tuple[GroundGuardLit, ...]
    action: tuple[tuple[GroundVar, "Value | GroundVar"], ...]

    def label(self) -> str:
        if not self.binding:
            return f"{self.name}()"
        return f"{self.name}({', '.join(map(str, self.binding))})"

    def assigned_vars(self) -> frozenset[GroundVar]:
        return frozenset(gv for gv, _ in self.action)


@dataclass(frozen=True)
class GroundProperty:
    name: str
    binding: tuple[int, ...]
    clause: Clause

    def label(self) -> str:
        if not self.binding:
            return f"{self.name}()"
        return f"{self.name}({', '.join(map(str, self.binding))})"


class ConcreteProtocol:
    """A protocol instance at fixed per-type sizes.

    States are tuples of domain codes aligned with ``ground_vars``; codes
    index into per-variable ``domains`` (declaration order, then index
    tuples lexicographically).
    """

    def __init__(self, spec: ProtocolSpec, sizes: dict[str, int]):
        for t in spec.param_types:
            if sizes.get(t, 0) < 1:
                raise ConcretizeError(f"size for parameter type {t!r} must be >= 1")
        self.spec = spec
        self.sizes = dict(sizes)
        self.ground_vars: list[GroundVar] = []
        self.domains: list[tuple[Value, ...]] = []
        for v in spec.variables:
            ranges = [range(1, sizes[t] + 1) for t in v.index_types]
            if isinstance(v.sort, BoolSort):
                dom: tuple[Value, ...] = (False, True)
            elif isinstance(v.sort, EnumSort):
                dom = tuple(spec.enum_of(v.sort.enum).members)
            else:
                dom = tuple(range(1, sizes[v.sort.param_type] + 1))
            for idx in itertools.product(*ranges):
                self.ground_vars.append((v.name, idx))
                self.domains.append(dom)
        self.var_pos = {gv: i for i, gv in enumerate(self.ground_vars)}
        self.codes = [{val: c for c, val in enumerate(dom)} for dom in self.domains]
        self.rules: list[GroundRule] = [
            g for r in spec.rules for g in self._ground_rule(r)
        ]
        self._properties: list[GroundProperty] | None = None
        self.init_states: tuple[tuple[int, ...], ...] = self._ground_init()
        self._compiled: list[tuple] = [self._compile(r) for r in self.rules]
        self._clause_code_cache: dict[tuple, list[tuple[int, int]]] = {}

    # -- grounding ------------------------------------------------------

    def _bindings(self, binders, distinct) -> list[dict[str, int]]:
        out = []
        doms = [range(1, self.sizes[t] + 1) for _, t in binders]
        for vals in itertools.product(*doms):
            env = {n: v for (n, _), v in zip(binders, vals)}
            if any(env[a] == env[b] for a, b in distinct):
                continue
            out.append(env)
        return out

    def _gvar(self, ref: VarRef, env: dict[str, int]) -> GroundVar:
        idx = tuple(env[i.name] if isinstance(i, BinderRef) else i for i in ref.indices)
        decl = self.spec.var(ref.name)
        for v, t in zip(idx, decl.index_types):
            if not 1 <= v <= self.sizes[t]:
                raise ConcretizeError(f"index {v} out of range for type {t!r}")
        return (ref.name, idx)

    def _gterm(self, term, env: dict[str, int]):
        if isinstance(term, VarRef):
            return self._gvar(term, env)
        if isinstance(term, BinderRef):
            return env[term.name]
        return term

    def _ground_literals(self, item, env: dict[str, int]) -> list[GroundGuardLit]:
        if isinstance(item, ForallLit):
            out = []
            for sub in self._bindings(item.binders, ()):
                env2 = dict(env)
                env2.update(sub)
                out.append(
                    (self._gvar(item.body.lhs, env2), item.body.op, self._gterm(item.body.rhs, env2))
                )
            return out
        assert isinstance(item, Literal)
        return [(self._gvar(item.lhs, env), item.op, self._gterm(item.rhs, env))]

    def ground_rule_at(self, rule: Rule, binding: tuple[int, ...]) -> GroundRule:
        env = {n: v for (n, _), v in zip(rule.binders, binding)}
        guard: list[GroundGuardLit] = []
        for item in rule.guard:
            for lit in self._ground_literals(item, env):
                if lit not in guard:
                    guard.append(lit)
        action = []
        targets = set()
        for a in rule.action:
            gv = self._gvar(a.target, env)
            if gv in targets:
                raise ConcretizeError(
                    f"rule {rule.name!r} instance {binding} assigns {gv} twice"
                )
            targets.add(gv)
            action.append((gv, self._gterm(a.rhs, env)))
        return GroundRule(rule.name, binding, tuple(guard), tuple(action))

    def _ground_rule(self, rule: Rule) -> list[GroundRule]:
        return [
            self.ground_rule_at(rule, tuple(env[n] for n, _ in rule.binders))
            for env in self._bindings(rule.binders, rule.distinct)
        ]

    def ground_property_at(self, prop: SafetyProperty, binding: tuple[int, ...]) -> GroundProperty:
        env = {n: v for (n, _), v in zip(prop.binders, binding)}
        lits = []
        for lit in prop.body:
            gv = self._gvar(lit.lhs, env)
            lits.append((gv, self._gterm(lit.rhs, env)))
        return GroundProperty(prop.name, binding, Clause(tuple(lits)).canonical())

    def _ground_property(self, prop: SafetyProperty) -> list[GroundProperty]:
        return [
            self.ground_property_at(prop, tuple(env[n] for n, _ in prop.binders))
            for env in self._bindings(prop.binders, prop.distinct)
        ]

    @property
    def properties(self) -> list[GroundProperty]:
        """All ground safety instances; errors when distinctness makes one vacuous."""
        if self._properties is None:
            out: list[GroundProperty] = []
            for p in self.spec.safety:
                insts = self._ground_property(p)
                if not insts:
                    raise ConcretizeError(
                        f"property {p.name!r} has no instances at sizes {self.sizes}"
                    )
                out.extend(insts)
            self._properties = out
        return self._properties

    def _ground_init(self) -> tuple[tuple[int, ...], ...]:
        pinned: dict[int, int] = {}
        for item in self.spec.init:
            for gv, op, rhs in self._ground_literals(item, {}):
                assert op == "=" and not isinstance(rhs, tuple)
                pos = self.var_pos[gv]
                code = self.codes[pos][rhs]
                if pos in pinned and pinned[pos] != code:
                    raise ConcretizeError(f"init pins {gv} to two different values")
                pinned[pos] = code
        free = [i for i in range(len(self.ground_vars)) if i not in pinned]
        count = 1
        for i in free:
            count *= len(self.domains[i])
            if count > _INIT_STATE_CAP:
                raise ConcretizeError("initial-state set too large to enumerate")
        states = []
        for combo in itertools.product(*[range(len(self.domains[i])) for i in free]):
            state = [0] * len(self.ground_vars)
            for pos, code in pinned.items():
                state[pos] = code
            for pos, code in zip(free, combo):
                state[pos] = code
            states.append(tuple(state))
        return tuple(sorted(states))

    # -- execution --------------------------------------------------------

    def _compile(self, rule: GroundRule):
        eq, neq, eqv, neqv = [], [], [], []
        for lhs, op, rhs in rule.guard:
            lp = self.var_pos[lhs]
            if isinstance(rhs, tuple):
                (eqv if op == "=" else neqv).append((lp, self.var_pos[rhs]))
            else:
                (eq if op == "=" else neq).append((lp, self.codes[lp][rhs]))
        action = []
        for gv, rhs in rule.action:
            tp = self.var_pos[gv]
            if isinstance(rhs, tuple):
                action.append((tp, None, self.var_pos[rhs]))
            else:
                action.append((tp, self.codes[tp][rhs], None))
        return (eq, neq, eqv, neqv, action)

    def enabled(self, rule_index: int, state: tuple[int, ...]) -> bool:
        eq, neq, eqv, neqv, _ = self._compiled[rule_index]
        return (
            all(state[p] == c for p, c in eq)
            and all(state[p] != c for p, c in neq)
            and all(state[a] == state[b] for a, b in eqv)
            and all(state[a] != state[b] for a, b in neqv)
        )

    def successor(self, rule_index: int, state: tuple[int, ...]) -> tuple[int, ...]:
        """Apply the rule's parallel assignment; right-hand sides read the pre-state."""
        _, _, _, _, action = self._compiled[rule_index]
        nxt = list(state)
        for tp, code, src in action:
            nxt[tp] = state[src] if code is None else code
        return tuple(nxt)

    def decode(self, state: tuple[int, ...]) -> dict[str, Value]:
        from .formulas import _gvar_text

        return {
            _gvar_text(gv): self.domains[i][state[i]]
            for i, gv in enumerate(self.ground_vars)
        }

    def clause_codes(self, clause: Clause) -> list[tuple[int, int]]:
        """Compile a clause's conjunction to (position, code) pairs; memoized."""
        cached = self._clause_code_cache.get(clause.literals)
        if cached is not None:
            return cached
        out = []
        for gv, val in clause.literals:
            if gv not in self.var_pos:
                raise ValueError(f"clause mentions unknown ground variable {gv}")
            pos = self.var_pos[gv]
            if val not in self.codes[pos]:
                raise ValueError(f"value {val!r} outside the domain of {gv}")
            out.append((pos, self.codes[pos][val]))
        self._clause_code_cache[clause.literals] = out
        return out


def concretize(
    spec: ProtocolSpec, sizes: dict[str, int], check_properties: bool = True
) -> ConcreteProtocol:
    """Instantiate ``spec`` at the given per-type sizes.

    With ``check_properties`` (the default), sizes too small to admit any
    instance of some safety property are rejected; reachability-only
    callers may skip that validation.
    """
    missing = [t for t in spec.param_types if t not in sizes]
    if missing:
        raise ConcretizeError(f"no size given for parameter types {missing}")
    p = ConcreteProtocol(spec, sizes)
    if check_properties:
        p.properties
    return p


def uniform_sizes(spec: ProtocolSpec, n: int) -> dict[str, int]:
    return {t: n for t in spec.param_types}


def min_concretization(spec: ProtocolSpec, prop: SafetyProperty) -> dict[str, int]:
    """Smallest sizes covering all overlap patterns between ``prop`` and rules.

    Per type, the property occupies m fixed values and a rule may map each
    of its k slots to one of them or to a fresh value, pairwise-distinct
    fresh values being the worst case; hence m + k values suffice and are
    required, with a floor of one.
    """
    out: dict[str, int] = {}
    for t in spec.param_types:
        m = sum(1 for _, ty in prop.binders if ty == t)
        k = max((sum(1 for _, ty in r.binders if ty == t) for r in spec.rules), default=0)
        out[t] = max(1, m + k)
    return out


def rule_instance_representatives(
    used: dict[str, tuple[int, ...]], rule: Rule, sizes: dict[str, int]
) -> list[tuple[int, ...]]:
    """One rule instance per overlap-pattern equivalence class.

    ``used`` fixes the property-side values per type.  Two instances are
    equivalent when they map rule slots onto the same fixed values and
    share the same equality pattern among their fresh slots.  Fresh values
    are drawn past the fixed ones; patterns not realizable within
    ``sizes`` are omitted.  Output is lexicographic over instance tuples.
    """
    slots = rule.binders
    must_differ = {frozenset(p) for p in rule.distinct}
    out: list[tuple[int, ...]] = []

    def extend(i: int, chosen: list[int], fresh: dict[str, list[int]]) -> None:
        if i == len(slots):
            out.append(tuple(chosen))
            return
        name, t = slots[i]
        base = used.get(t, ())
        options = list(base) + fresh.get(t, [])
        next_fresh = len(base) + len(fresh.get(t, [])) + 1
        if next_fresh <= sizes.get(t, 0):
            options.append(next_fresh)
        for v in sorted(set(options)):
            clash = any(
                chosen[j] == v and frozenset((slots[j][0], name)) in must_differ
                for j in range(i)
                if slots[j][1] == t
            )
            if clash:
                continue
            is_new = v == next_fresh
            if is_new:
                fresh.setdefault(t, []).append(v)
            chosen.append(v)
            extend(i + 1, chosen, fresh)
            chosen.pop()
            if is_new:
                fresh[t].pop()

    extend(0, [], {})
    return out


def enumerate_instance_pairs(
    prop: SafetyProperty, rule: Rule, sizes: dict[str, int] | int, spec: ProtocolSpec | None = None
) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Pairs (property instance, rule instance) up to overlap symmetry.

    The property is fixed at values 1..m per type (binder order); rule
    instances come from :func:`rule_instance_representatives`.
    """
    if isinstance(sizes, int):
        types = {t for _, t in prop.binders} | {t for _, t in rule.binders}
        sizes = {t: sizes for t in types}
    counters: dict[str, int] = {}
    f_instance = []
    used: dict[str, list[int]] = {}
    for _, t in prop.binders:
        counters[t] = counters.get(t, 0) + 1
        f_instance.append(counters[t])
        used.setdefault(t, []).append(counters[t])
    f_tuple = tuple(f_instance)
    reps = rule_instance_representatives({t: tuple(v) for t, v in used.items()}, rule, sizes)
    return [(f_tuple, r) for r in reps]
