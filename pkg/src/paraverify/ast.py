"""Abstract syntax for the guarded-command protocol language.

A protocol declares symmetric parameter types (scalar sorts of unbounded
size), finite enumerations, state variables (optionally arrayed over up to
two parameter types), an initial-state predicate, guarded rules, and safety
properties stated as negated conjunctions of equality literals.

All nodes are immutable; construction-time validation lives in the parser.
"""

from __future__ import annotations

from dataclasses import dataclass, field

# A constant value: bool, an enum member name, or a concrete parameter value.
Value = bool | str | int


@dataclass(frozen=True)
class BinderRef:
    """Reference to a quantified or rule/property formal parameter."""

    name: str


@dataclass(frozen=True)
class VarRef:
    """Reference to a state variable, possibly indexed by binders or values."""

    name: str
    indices: tuple["BinderRef | int", ...] = ()


# Right-hand sides of literals and assignments.
Term = VarRef | BinderRef | Value


@dataclass(frozen=True)
class Literal:
    """Equality or disequality between a variable reference and a term."""

    lhs: VarRef
    op: str  # "=" or "!="
    rhs: Term


@dataclass(frozen=True)
class ForallLit:
    """A single universally quantified literal, e.g. ``forall n : NODE . st[n] = Idle``."""

    binders: tuple[tuple[str, str], ...]  # (binder name, parameter type)
    body: Literal


GuardItem = Literal | ForallLit
InitItem = Literal | ForallLit


@dataclass(frozen=True)
class Assign:
    target: VarRef
    rhs: Term


@dataclass(frozen=True)
class BoolSort:
    pass


@dataclass(frozen=True)
class EnumSort:
    enum: str


@dataclass(frozen=True)
class ParamSort:
    param_type: str


ValueSort = BoolSort | EnumSort | ParamSort


@dataclass(frozen=True)
class VarDecl:
    """State variable: scalar when ``index_types`` is empty, else an array.

    Index signatures are limited to length 2.
    """

    name: str
    index_types: tuple[str, ...]
    sort: ValueSort


@dataclass(frozen=True)
class Rule:
    """Guarded command: binders, conjunction guard, parallel assignments.

    The guard is a conjunction of (dis)equality literals with at most one
    universally quantified literal.  Assignments read the pre-state.
    """

    name: str
    binders: tuple[tuple[str, str], ...]
    distinct: tuple[tuple[str, str], ...]
    guard: tuple[GuardItem, ...]
    action: tuple[Assign, ...]


@dataclass(frozen=True)
class SafetyProperty:
    """Clause-shaped safety property: ``!(lit & ... & lit)`` under binders."""

    name: str
    binders: tuple[tuple[str, str], ...]
    distinct: tuple[tuple[str, str], ...]
    body: tuple[Literal, ...]


@dataclass(frozen=True)
class EnumDecl:
    name: str
    members: tuple[str, ...]


@dataclass(frozen=True)
class ProtocolSpec:
    param_types: tuple[str, ...]
    enums: tuple[EnumDecl, ...]
    variables: tuple[VarDecl, ...]
    init: tuple[InitItem, ...]
    rules: tuple[Rule, ...]
    safety: tuple[SafetyProperty, ...]
    name: str = field(default="", compare=False)

    def enum_of(self, name: str) -> EnumDecl:
        for e in self.enums:
            if e.name == name:
                return e
        raise KeyError(name)

    def var(self, name: str) -> VarDecl:
        for v in self.variables:
            if v.name == name:
                return v
        raise KeyError(name)

    def rule(self, name: str) -> Rule:
        for r in self.rules:
            if r.name == name:
                return r
        raise KeyError(name)

    def property(self, name: str) -> SafetyProperty:
        for p in self.safety:
            if p.name == name:
                return p
        raise KeyError(name)
