"""Parser for the protocol DSL.

Recursive descent over a hand-rolled token stream.  Parsing is total and
deterministic: any malformed input raises :class:`ParseError` carrying the
offending line/column.  Identifier resolution and structural validation
happen in the same pass, so a returned spec is always well-formed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .ast import (
    Assign,
    BinderRef,
    BoolSort,
    EnumDecl,
    EnumSort,
    ForallLit,
    GuardItem,
    InitItem,
    Literal,
    ParamSort,
    ProtocolSpec,
    Rule,
    SafetyProperty,
    Term,
    ValueSort,
    VarDecl,
    VarRef,
)

KEYWORDS = {
    "type", "enum", "var", "array", "of", "boolean", "init", "forall",
    "rule", "guard", "action", "invariant", "where", "true", "false",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>//[^\n]*|--[^\n]*)
  | (?P<assign>:=)
  | (?P<neq>!=)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<int>[0-9]+)
  | (?P<sym>[{}\[\]():;,.=&!])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "int", "kw", or the literal symbol text
    text: str
    line: int
    col: int


class ParseError(Exception):
    """Syntax or resolution error with source location."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


def _tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        raw = m.group()
        if kind not in ("ws", "comment"):
            if kind == "ident":
                tokens.append(Token("kw" if raw in KEYWORDS else "ident", raw, line, col))
            elif kind == "int":
                tokens.append(Token("int", raw, line, col))
            else:
                tokens.append(Token(raw, raw, line, col))
        newlines = raw.count("\n")
        if newlines:
            line += newlines
            col = len(raw) - raw.rfind("\n")
        else:
            col += len(raw)
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.param_types: list[str] = []
        self.enums: list[EnumDecl] = []
        self.enum_member_owner: dict[str, str] = {}
        self.variables: list[VarDecl] = []
        self.init: list[InitItem] = []
        self.rules: list[Rule] = []
        self.safety: list[SafetyProperty] = []
        self.decl_names: set[str] = set()

    # -- token helpers -------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def expect(self, kind: str, what: str | None = None) -> Token:
        t = self.peek()
        if t.kind != kind and not (kind == "kw" and t.kind == "kw"):
            raise ParseError(f"expected {what or kind}, found {t.text or 'end of file'!r}", t.line, t.col)
        return self.next()

    def expect_kw(self, word: str) -> Token:
        t = self.peek()
        if t.kind != "kw" or t.text != word:
            raise ParseError(f"expected {word!r}, found {t.text or 'end of file'!r}", t.line, t.col)
        return self.next()

    def at_kw(self, word: str) -> bool:
        t = self.peek()
        return t.kind == "kw" and t.text == word

    def err(self, message: str, tok: Token | None = None) -> ParseError:
        t = tok or self.peek()
        return ParseError(message, t.line, t.col)

    # -- declarations ---------------------------------------------------

    def parse(self) -> ProtocolSpec:
        if self.peek().kind == "eof":
            raise self.err("expected declaration")
        while self.peek().kind != "eof":
            t = self.peek()
            if t.kind != "kw":
                raise self.err(f"expected declaration, found {t.text!r}")
            if t.text == "type":
                self.parse_type()
            elif t.text == "enum":
                self.parse_enum()
            elif t.text == "var":
                self.parse_var()
            elif t.text == "init":
                self.parse_init()
            elif t.text == "rule":
                self.parse_rule()
            elif t.text == "invariant":
                self.parse_invariant()
            else:
                raise self.err(f"expected declaration, found {t.text!r}")
        return ProtocolSpec(
            param_types=tuple(self.param_types),
            enums=tuple(self.enums),
            variables=tuple(self.variables),
            init=tuple(self.init),
            rules=tuple(self.rules),
            safety=tuple(self.safety),
        )

    def declare(self, name: str, tok: Token) -> None:
        if name in self.decl_names:
            raise self.err(f"duplicate declaration of {name!r}", tok)
        self.decl_names.add(name)

    def parse_type(self) -> None:
        self.expect_kw("type")
        t = self.expect("ident", "type name")
        self.declare(t.text, t)
        self.param_types.append(t.text)
        self.expect(";")

    def parse_enum(self) -> None:
        self.expect_kw("enum")
        t = self.expect("ident", "enum name")
        self.declare(t.text, t)
        self.expect("{")
        members = []
        while True:
            m = self.expect("ident", "enum member")
            self.declare(m.text, m)
            self.enum_member_owner[m.text] = t.text
            members.append(m.text)
            if self.peek().kind == ",":
                self.next()
                continue
            break
        self.expect("}")
        self.expect(";")
        self.enums.append(EnumDecl(t.text, tuple(members)))

    def parse_value_sort(self) -> ValueSort:
        t = self.peek()
        if t.kind == "kw" and t.text == "boolean":
            self.next()
            return BoolSort()
        t = self.expect("ident", "sort name")
        if any(e.name == t.text for e in self.enums):
            return EnumSort(t.text)
        if t.text in self.param_types:
            return ParamSort(t.text)
        raise self.err(f"unresolved sort {t.text!r}", t)

    def parse_var(self) -> None:
        self.expect_kw("var")
        t = self.expect("ident", "variable name")
        self.declare(t.text, t)
        self.expect(":")
        index_types: list[str] = []
        if self.at_kw("array"):
            self.next()
            while self.peek().kind == "[":
                self.next()
                it = self.expect("ident", "parameter type")
                if it.text not in self.param_types:
                    raise self.err(f"array index must be a parameter type, got {it.text!r}", it)
                index_types.append(it.text)
                self.expect("]")
            if len(index_types) == 0:
                raise self.err("array variable needs at least one index type")
            if len(index_types) > 2:
                raise self.err("array index signature limited to length 2")
            self.expect_kw("of")
        sort = self.parse_value_sort()
        self.expect(";")
        self.variables.append(VarDecl(t.text, tuple(index_types), sort))

    # -- terms and literals ----------------------------------------------

    def parse_term(self, binders: dict[str, str]) -> Term:
        t = self.peek()
        if t.kind == "kw" and t.text in ("true", "false"):
            self.next()
            return t.text == "true"
        if t.kind == "int":
            self.next()
            return int(t.text)
        if t.kind == "ident":
            self.next()
            name = t.text
            if self.peek().kind == "[":
                return self.parse_indices(name, t, binders)
            if name in binders:
                return BinderRef(name)
            if name in self.enum_member_owner:
                return name
            if any(v.name == name for v in self.variables):
                var = next(v for v in self.variables if v.name == name)
                if var.index_types:
                    raise self.err(f"array variable {name!r} used without indices", t)
                return VarRef(name)
            raise self.err(f"unresolved identifier {name!r}", t)
        raise self.err(f"expected term, found {t.text or 'end of file'!r}")

    def parse_indices(self, name: str, tok: Token, binders: dict[str, str]) -> VarRef:
        if not any(v.name == name for v in self.variables):
            raise self.err(f"unresolved identifier {name!r}", tok)
        var = next(v for v in self.variables if v.name == name)
        indices: list[BinderRef | int] = []
        while self.peek().kind == "[":
            self.next()
            it = self.peek()
            if it.kind == "int":
                self.next()
                indices.append(int(it.text))
            elif it.kind == "ident":
                self.next()
                if it.text not in binders:
                    raise self.err(f"unresolved identifier {it.text!r}", it)
                indices.append(BinderRef(it.text))
            else:
                raise self.err("expected array index")
            self.expect("]")
        if len(indices) != len(var.index_types):
            raise self.err(
                f"{name!r} expects {len(var.index_types)} indices, got {len(indices)}", tok
            )
        for idx, it in zip(indices, var.index_types):
            if isinstance(idx, BinderRef) and binders[idx.name] != it:
                raise self.err(
                    f"index {idx.name!r} has type {binders[idx.name]}, expected {it}", tok
                )
        return VarRef(name, tuple(indices))

    def parse_literal(self, binders: dict[str, str], clause_body: bool = False) -> Literal:
        t = self.peek()
        lhs = self.parse_term(binders)
        if not isinstance(lhs, VarRef):
            raise self.err("left-hand side of a literal must be a state variable", t)
        op_tok = self.peek()
        if op_tok.kind == "=":
            self.next()
            op = "="
        elif op_tok.kind == "!=":
            self.next()
            op = "!="
        else:
            raise self.err("expected '=' or '!='")
        if clause_body and op == "!=":
            raise self.err("property bodies use equality literals only", op_tok)
        rhs_tok = self.peek()
        rhs = self.parse_term(binders)
        if clause_body and isinstance(rhs, VarRef):
            raise self.err("property literals compare a variable with a constant", rhs_tok)
        self.check_literal_sorts(lhs, rhs, rhs_tok, binders)
        return Literal(lhs, op, rhs)

    def check_literal_sorts(self, lhs: VarRef, rhs: Term, tok: Token, binders: dict[str, str]) -> None:
        sort = next(v for v in self.variables if v.name == lhs.name).sort
        if isinstance(rhs, bool):
            if not isinstance(sort, BoolSort):
                raise self.err(f"{lhs.name!r} is not boolean", tok)
        elif isinstance(rhs, int):
            if not isinstance(sort, ParamSort):
                raise self.err(f"{lhs.name!r} does not hold parameter values", tok)
        elif isinstance(rhs, str):
            if not isinstance(sort, EnumSort) or self.enum_member_owner[rhs] != sort.enum:
                raise self.err(f"enum member {rhs!r} does not belong to the sort of {lhs.name!r}", tok)
        elif isinstance(rhs, BinderRef):
            if not isinstance(sort, ParamSort) or binders[rhs.name] != sort.param_type:
                raise self.err(f"{lhs.name!r} cannot hold values of {rhs.name!r}'s type", tok)

    def parse_binder_list(self) -> tuple[tuple[str, str], ...]:
        out: list[tuple[str, str]] = []
        while True:
            n = self.expect("ident", "binder name")
            if n.text in self.decl_names or any(b[0] == n.text for b in out):
                raise self.err(f"duplicate declaration of {n.text!r}", n)
            self.expect(":")
            t = self.expect("ident", "parameter type")
            if t.text not in self.param_types:
                raise self.err(f"unresolved parameter type {t.text!r}", t)
            out.append((n.text, t.text))
            if self.peek().kind == ",":
                self.next()
                continue
            break
        return tuple(out)

    def parse_forall(self, outer: dict[str, str], single_binder: bool) -> ForallLit:
        self.expect_kw("forall")
        binders = self.parse_binder_list()
        if single_binder and len(binders) > 1:
            raise self.err("guard quantifier binds a single variable")
        for name, _ in binders:
            if name in outer:
                raise self.err(f"binder {name!r} shadows an outer binder")
        self.expect(".")
        inner = dict(outer)
        inner.update(dict(binders))
        body = self.parse_literal(inner)
        return ForallLit(binders, body)

    # -- sections ---------------------------------------------------------

    def parse_init(self) -> None:
        self.expect_kw("init")
        if self.init:
            raise self.err("duplicate init section")
        self.expect("{")
        while self.peek().kind != "}":
            if self.at_kw("forall"):
                self.init.append(self.parse_forall({}, single_binder=False))
            else:
                lit = self.parse_literal({})
                if lit.op != "=" or isinstance(lit.rhs, VarRef):
                    raise self.err("init constrains variables to constant values")
                self.init.append(lit)
            self.expect(";")
        self.expect("}")

    def parse_where(self, binders: dict[str, str]) -> tuple[tuple[str, str], ...]:
        if not self.at_kw("where"):
            return ()
        self.next()
        pairs: list[tuple[str, str]] = []
        while True:
            a = self.expect("ident", "binder name")
            if a.text not in binders:
                raise self.err(f"unresolved identifier {a.text!r}", a)
            self.expect("!=", "'!='")
            b = self.expect("ident", "binder name")
            if b.text not in binders:
                raise self.err(f"unresolved identifier {b.text!r}", b)
            if a.text == b.text:
                raise self.err("distinctness condition relates two different binders", a)
            pairs.append((a.text, b.text))
            if self.peek().kind == "&":
                self.next()
                continue
            break
        return tuple(pairs)

    def parse_rule(self) -> None:
        self.expect_kw("rule")
        t = self.expect("ident", "rule name")
        self.declare(t.text, t)
        self.expect("(")
        binders: tuple[tuple[str, str], ...] = ()
        if self.peek().kind != ")":
            binders = self.parse_binder_list()
        self.expect(")")
        env = dict(binders)
        distinct = self.parse_where(env)
        self.expect_kw("guard")
        guard: list[GuardItem] = []
        forall_seen = False
        while True:
            if self.at_kw("forall"):
                if forall_seen:
                    raise self.err("a guard admits at most one quantified literal")
                forall_seen = True
                guard.append(self.parse_forall(env, single_binder=True))
            else:
                guard.append(self.parse_literal(env))
            if self.peek().kind == "&":
                self.next()
                continue
            break
        self.expect_kw("action")
        action: list[Assign] = []
        targets: set[tuple] = set()
        while True:
            at = self.peek()
            target = self.parse_term(env)
            if not isinstance(target, VarRef):
                raise self.err("assignment target must be a state variable", at)
            key = (target.name, target.indices)
            if key in targets:
                raise self.err(f"rule assigns {target.name!r} twice", at)
            targets.add(key)
            self.expect(":=", "':='")
            rhs_tok = self.peek()
            rhs = self.parse_term(env)
            self.check_literal_sorts(target, rhs, rhs_tok, env)
            action.append(Assign(target, rhs))
            if self.peek().kind == ",":
                self.next()
                continue
            break
        self.expect(";")
        self.rules.append(Rule(t.text, binders, distinct, tuple(guard), tuple(action)))

    def parse_invariant(self) -> None:
        self.expect_kw("invariant")
        t = self.expect("ident", "invariant name")
        self.declare(t.text, t)
        self.expect("(")
        binders: tuple[tuple[str, str], ...] = ()
        if self.peek().kind != ")":
            binders = self.parse_binder_list()
        self.expect(")")
        env = dict(binders)
        distinct = self.parse_where(env)
        self.expect(":")
        self.expect("!")
        self.expect("(")
        body: list[Literal] = []
        while True:
            body.append(self.parse_literal(env, clause_body=True))
            if self.peek().kind == "&":
                self.next()
                continue
            break
        self.expect(")")
        self.expect(";")
        self.safety.append(SafetyProperty(t.text, binders, distinct, tuple(body)))


def parse_protocol(text: str, name: str = "") -> ProtocolSpec:
    """Parse DSL source into a validated :class:`ProtocolSpec`.

    Raises :class:`ParseError` with a line/column on syntax errors,
    unresolved identifiers, duplicate declarations, and arity mismatches.
    """
    spec = _Parser(text).parse()
    if name:
        spec = ProtocolSpec(
            spec.param_types, spec.enums, spec.variables, spec.init,
            spec.rules, spec.safety, name=name,
        )
    return spec
