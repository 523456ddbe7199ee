"""Textual rule format (.atree): lexer, parser, diagnostics, serializer.

A document declares context variables, UI features, and adaption trees:

    # theme adaptation
    context first_time: bool
    context last_unit_accuracy: int[0, 100]

    feature theme

    tree theme priority 1 {
      cond first_time {
        case true -> action { theme = default }
        case false -> cond last_unit_accuracy {
          case [0, 60] -> action { theme = default }
          case (60, 90) -> action { theme = preferred_color }
          case [90, 100] -> action { theme = weather_time }
        }
      }
    }

Keywords are contextual, so `default`, `time`, etc. stay usable as names and
enum tokens. `#` starts a line comment unless it spells a #RRGGBB color. Time
windows `HH:MM..HH:MM` are half-open and may wrap midnight; equal endpoints
cover the whole day. In action-value position, `black` and `white` are color
aliases for #000000/#FFFFFF.

Parsing never partially succeeds: `parse` returns a document only when there
are no error diagnostics, and every diagnostic carries a source position.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from enum import Enum
from importlib.resources import files

from .errors import AdaptreeError
from .model import (
    NULL,
    ActionSet,
    ActionValue,
    BoolDomain,
    Color,
    ContextSchema,
    ContextVariable,
    Domain,
    EnumDomain,
    IntRangeDomain,
    TimeDomain,
    UIFeature,
    format_action_value,
    format_minutes,
)
from .tree import (
    AdaptionTree,
    Branch,
    ConclusionNode,
    ConditionNode,
    DEFAULT,
    DefaultGuard,
    EqualsGuard,
    Guard,
    IntervalGuard,
    Loc,
    Node,
    Severity,
    TimeWindowGuard,
    TreeGuard,
)

_HEX = set(string.hexdigits)
_DIGITS = set(string.digits)
_IDENT_START = set(string.ascii_letters + "_")
_IDENT_CONT = set(string.ascii_letters + string.digits + "_")


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    code: str
    message: str
    line: int
    column: int
    length: int = 1

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.severity.value}: {self.message} [{self.code}]"


class RuleParseError(AdaptreeError):
    """Parse failed; carries every diagnostic collected."""

    def __init__(self, diagnostics: list[Diagnostic]):
        first = next((d for d in diagnostics if d.severity is Severity.ERROR), None)
        super().__init__(str(first) if first else "parse failed")
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class RuleDocument:
    """A parsed rule file: schema, feature vocabulary, and trees."""

    contexts: tuple[ContextVariable, ...] = ()
    features: tuple[UIFeature, ...] = ()
    trees: tuple[AdaptionTree, ...] = ()

    @property
    def schema(self) -> ContextSchema:
        return ContextSchema(self.contexts)

    def tree(self, name: str) -> AdaptionTree:
        for tree in self.trees:
            if tree.name == name:
                return tree
        raise KeyError(f"no tree named {name!r}")

    def chain(self) -> list[AdaptionTree]:
        """Trees in evaluation order: ascending priority, declaration order on ties."""
        return sorted(self.trees, key=lambda t: t.priority)


# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

class TokKind(Enum):
    IDENT = "identifier"
    INT = "integer"
    COLOR = "color"
    TIME = "time"
    LBRACE = "'{'"
    RBRACE = "'}'"
    LPAREN = "'('"
    RPAREN = "')'"
    LBRACKET = "'['"
    RBRACKET = "']'"
    COLON = "':'"
    COMMA = "','"
    EQUALS = "'='"
    ARROW = "'->'"
    DOTDOT = "'..'"
    EOF = "end of input"


_PUNCT = {
    "{": TokKind.LBRACE,
    "}": TokKind.RBRACE,
    "(": TokKind.LPAREN,
    ")": TokKind.RPAREN,
    "[": TokKind.LBRACKET,
    "]": TokKind.RBRACKET,
    ":": TokKind.COLON,
    ",": TokKind.COMMA,
    "=": TokKind.EQUALS,
}


@dataclass(frozen=True)
class Token:
    kind: TokKind
    text: str
    value: object
    line: int
    column: int

    @property
    def loc(self) -> Loc:
        return Loc(self.line, self.column, max(len(self.text), 1))


def _lex(source: str) -> tuple[list[Token], list[Diagnostic]]:
    tokens: list[Token] = []
    diagnostics: list[Diagnostic] = []
    i, line, col = 0, 1, 1
    n = len(source)

    def err(message: str, length: int = 1, at_line: int | None = None, at_col: int | None = None) -> None:
        diagnostics.append(Diagnostic(
            Severity.ERROR, "lexical-error", message,
            at_line if at_line is not None else line,
            at_col if at_col is not None else col,
            length,
        ))

    while i < n:
        ch = source[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            candidate = source[i + 1:i + 7]
            boundary = i + 7 >= n or source[i + 7] not in _IDENT_CONT
            if len(candidate) == 6 and all(c in _HEX for c in candidate) and boundary:
                tokens.append(Token(TokKind.COLOR, source[i:i + 7], Color.parse(source[i:i + 7]), line, col))
                i += 7
                col += 7
                continue
            while i < n and source[i] != "\n":
                i += 1
            continue
        if ch in _PUNCT:
            tokens.append(Token(_PUNCT[ch], ch, None, line, col))
            i += 1
            col += 1
            continue
        if ch == "-" and not (i + 1 < n and source[i + 1] in _DIGITS):
            if i + 1 < n and source[i + 1] == ">":
                tokens.append(Token(TokKind.ARROW, "->", None, line, col))
                i += 2
                col += 2
                continue
            err("stray '-' (expected '->' or a negative integer)")
            i += 1
            col += 1
            continue
        if ch == ".":
            if i + 1 < n and source[i + 1] == ".":
                tokens.append(Token(TokKind.DOTDOT, "..", None, line, col))
                i += 2
                col += 2
                continue
            err("stray '.' (expected '..')")
            i += 1
            col += 1
            continue
        if ch in _DIGITS or ch == "-":
            start, start_col = i, col
            if ch == "-":
                i += 1
                col += 1
            while i < n and source[i] in _DIGITS:
                i += 1
                col += 1
            digits = source[start:i]
            minutes = source[i + 1:i + 3]
            is_time = (
                not digits.startswith("-")
                and i < n
                and source[i] == ":"
                and len(minutes) == 2
                and all(c in _DIGITS for c in minutes)
                and (i + 3 >= n or source[i + 3] not in _DIGITS)
            )
            if is_time:
                text = source[start:i + 3]
                i += 3
                col += 3
                hour, minute = int(digits), int(minutes)
                if hour > 23 or minute > 59:
                    err(f"time out of range: {text}", len(text), line, start_col)
                    hour, minute = hour % 24, minute % 60
                tokens.append(Token(TokKind.TIME, text, hour * 60 + minute, line, start_col))
                continue
            tokens.append(Token(TokKind.INT, digits, int(digits), line, start_col))
            continue
        if ch in _IDENT_START:
            start, start_col = i, col
            while i < n and source[i] in _IDENT_CONT:
                i += 1
                col += 1
            text = source[start:i]
            tokens.append(Token(TokKind.IDENT, text, text, line, start_col))
            continue
        err(f"unexpected character {ch!r}")
        i += 1
        col += 1

    tokens.append(Token(TokKind.EOF, "", None, line, col))
    return tokens, diagnostics


# ---------------------------------------------------------------------------
# Raw parse shapes (resolved against declarations in a second pass, so that
# reference errors carry precise positions)
# ---------------------------------------------------------------------------

@dataclass
class _RawConclusion:
    assignments: list[tuple[Token, ActionValue]]
    action_tok: Token


@dataclass
class _RawBranch:
    guard: Guard
    guard_tok: Token
    child: "_RawConclusion | _RawCond"


@dataclass
class _RawCond:
    variable: Token
    branches: list[_RawBranch]


@dataclass
class _RawTreeGuard:
    feature: Token
    value: ActionValue


@dataclass
class _RawTree:
    name: Token
    priority: int
    guard: _RawTreeGuard | None
    root: "_RawConclusion | _RawCond"


class _SyntaxFailure(Exception):
    """Internal: unwinds to the declaration loop for recovery."""


_DECL_KEYWORDS = {"context", "feature", "tree"}

# spellings the value grammar claims for itself (booleans, null, color aliases)
_RESERVED_VALUE_WORDS = {"true", "false", "null", "black", "white"}


class _Parser:
    def __init__(self, tokens: list[Token], diagnostics: list[Diagnostic]):
        self.tokens = tokens
        self.pos = 0
        self.diagnostics = diagnostics

    # token plumbing

    @property
    def cur(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.cur
        if tok.kind is not TokKind.EOF:
            self.pos += 1
        return tok

    def at(self, kind: TokKind) -> bool:
        return self.cur.kind is kind

    def at_word(self, word: str) -> bool:
        return self.cur.kind is TokKind.IDENT and self.cur.text == word

    def error(self, message: str, tok: Token | None = None, code: str = "syntax-error") -> None:
        tok = tok or self.cur
        if tok.kind is TokKind.EOF and self.pos > 0:
            anchor = self.tokens[self.pos - 1]
            line, column, length = anchor.line, anchor.column, max(len(anchor.text), 1)
        else:
            line, column, length = tok.line, tok.column, max(len(tok.text), 1)
        self.diagnostics.append(Diagnostic(Severity.ERROR, code, message, line, column, length))

    def fail(self, message: str, tok: Token | None = None) -> None:
        self.error(message, tok)
        raise _SyntaxFailure()

    def expect(self, kind: TokKind, what: str) -> Token:
        if not self.at(kind):
            self.fail(f"expected {what}, found {self.cur.text or 'end of input'!r}")
        return self.advance()

    def expect_word(self, word: str) -> Token:
        if not self.at_word(word):
            self.fail(f"expected '{word}', found {self.cur.text or 'end of input'!r}")
        return self.advance()

    def ident(self, what: str) -> Token:
        if not self.at(TokKind.IDENT):
            self.fail(f"expected {what}, found {self.cur.text or 'end of input'!r}")
        return self.advance()

    def recover_to_decl(self) -> None:
        depth = 0
        while not self.at(TokKind.EOF):
            if self.cur.kind is TokKind.LBRACE:
                depth += 1
            elif self.cur.kind is TokKind.RBRACE:
                depth = max(depth - 1, 0)
            elif depth == 0 and self.cur.kind is TokKind.IDENT and self.cur.text in _DECL_KEYWORDS:
                return
            self.advance()

    # grammar

    def document(self) -> tuple[list[tuple[ContextVariable, Token]], list[tuple[UIFeature, Token]], list[_RawTree]]:
        contexts: list[tuple[ContextVariable, Token]] = []
        features: list[tuple[UIFeature, Token]] = []
        trees: list[_RawTree] = []
        any_decl = False
        while not self.at(TokKind.EOF):
            try:
                if self.at_word("context"):
                    contexts.append(self.context_decl())
                elif self.at_word("feature"):
                    features.append(self.feature_decl())
                elif self.at_word("tree"):
                    trees.append(self.tree_decl())
                else:
                    self.fail("expected declaration ('context', 'feature' or 'tree')")
                any_decl = True
            except _SyntaxFailure:
                self.recover_to_decl()
        if not any_decl and not self.diagnostics:
            self.error("expected declaration ('context', 'feature' or 'tree')")
        return contexts, features, trees

    def context_decl(self) -> tuple[ContextVariable, Token]:
        self.expect_word("context")
        name = self.ident("context variable name")
        self.expect(TokKind.COLON, "':'")
        domain = self.domain()
        return ContextVariable(name.text, domain), name

    def domain(self) -> Domain:
        if self.at_word("bool"):
            self.advance()
            return BoolDomain()
        if self.at_word("time"):
            self.advance()
            return TimeDomain()
        if self.at_word("enum"):
            self.advance()
            self.expect(TokKind.LPAREN, "'('")
            values = [self.enum_value([])]
            while self.at(TokKind.COMMA):
                self.advance()
                values.append(self.enum_value(values))
            self.expect(TokKind.RPAREN, "')'")
            return EnumDomain(tuple(values))
        if self.at_word("int"):
            self.advance()
            self.expect(TokKind.LBRACKET, "'['")
            lo = self.expect(TokKind.INT, "integer")
            self.expect(TokKind.COMMA, "','")
            hi = self.expect(TokKind.INT, "integer")
            self.expect(TokKind.RBRACKET, "']'")
            if int(lo.value) > int(hi.value):  # type: ignore[arg-type]
                self.fail(f"integer range has lo > hi: [{lo.value}, {hi.value}]", lo)
            return IntRangeDomain(int(lo.value), int(hi.value))  # type: ignore[arg-type]
        self.fail("expected a domain ('bool', 'enum(...)', 'int[lo, hi]' or 'time')")
        raise AssertionError("unreachable")

    def enum_value(self, taken: list[str]) -> str:
        tok = self.ident("enum value")
        if tok.text in _RESERVED_VALUE_WORDS:
            self.fail(f"{tok.text!r} is a reserved value spelling and cannot name an enum value", tok)
        if tok.text in taken:
            self.fail(f"duplicate enum value {tok.text!r}", tok)
        return tok.text

    def feature_decl(self) -> tuple[UIFeature, Token]:
        self.expect_word("feature")
        name = self.ident("feature name")
        return UIFeature(name.text), name

    def tree_decl(self) -> _RawTree:
        self.expect_word("tree")
        name = self.ident("tree name")
        self.expect_word("priority")
        priority = self.expect(TokKind.INT, "priority integer")
        guard = None
        if self.at_word("when"):
            self.advance()
            feature = self.ident("feature name")
            self.expect(TokKind.EQUALS, "'='")
            value, _ = self.value("guard value")
            guard = _RawTreeGuard(feature, value)
        self.expect(TokKind.LBRACE, "'{'")
        root = self.node()
        self.expect(TokKind.RBRACE, "'}'")
        return _RawTree(name, int(priority.value), guard, root)  # type: ignore[arg-type]

    def node(self) -> "_RawConclusion | _RawCond":
        if self.at_word("cond"):
            return self.cond()
        if self.at_word("action"):
            return self.conclusion()
        self.fail("expected a node ('cond' or 'action')")
        raise AssertionError("unreachable")

    def cond(self) -> _RawCond:
        self.expect_word("cond")
        variable = self.ident("context variable name")
        self.expect(TokKind.LBRACE, "'{'")
        branches: list[_RawBranch] = []
        saw_default = False
        while True:
            if self.at_word("case"):
                case_tok = self.advance()
                if saw_default:
                    self.error("'case' branches cannot follow the default branch", case_tok)
                guard, guard_tok = self.guard()
                self.expect(TokKind.ARROW, "'->'")
                branches.append(_RawBranch(guard, guard_tok, self.node()))
            elif self.at_word("default"):
                default_tok = self.advance()
                if saw_default:
                    self.error("a condition node can have only one default branch", default_tok)
                saw_default = True
                self.expect(TokKind.ARROW, "'->'")
                branches.append(_RawBranch(DEFAULT, default_tok, self.node()))
            else:
                break
        self.expect(TokKind.RBRACE, "'}' (or another branch)")
        if len(branches) < 2:
            self.error(
                f"condition node on {variable.text!r} needs at least two branches "
                "(one branch plus a default also counts)",
                variable, code="structure-error")
        return _RawCond(variable, branches)

    def guard(self) -> tuple[Guard, Token]:
        tok = self.cur
        if self.at(TokKind.LBRACKET) or self.at(TokKind.LPAREN):
            lo_inclusive = self.at(TokKind.LBRACKET)
            self.advance()
            lo = self.expect(TokKind.INT, "integer")
            self.expect(TokKind.COMMA, "','")
            hi = self.expect(TokKind.INT, "integer")
            if self.at(TokKind.RBRACKET):
                hi_inclusive = True
            elif self.at(TokKind.RPAREN):
                hi_inclusive = False
            else:
                self.fail("expected ']' or ')'")
                raise AssertionError("unreachable")
            self.advance()
            return IntervalGuard(int(lo.value), int(hi.value), lo_inclusive, hi_inclusive), tok  # type: ignore[arg-type]
        if self.at(TokKind.TIME):
            start = self.advance()
            self.expect(TokKind.DOTDOT, "'..'")
            end = self.expect(TokKind.TIME, "time")
            return TimeWindowGuard(int(start.value), int(end.value)), start  # type: ignore[arg-type]
        value, value_tok = self.value("guard value")
        return EqualsGuard(value), value_tok  # type: ignore[arg-type]

    def value(self, what: str) -> tuple[ActionValue, Token]:
        tok = self.cur
        if self.at(TokKind.INT):
            self.advance()
            return int(tok.value), tok  # type: ignore[arg-type]
        if self.at(TokKind.COLOR):
            self.advance()
            return tok.value, tok  # type: ignore[return-value]
        if self.at(TokKind.IDENT):
            self.advance()
            if tok.text == "null":
                return NULL, tok
            if tok.text == "true":
                return True, tok
            if tok.text == "false":
                return False, tok
            if tok.text in Color.NAMED:
                return Color.parse(tok.text), tok
            return tok.text, tok
        self.fail(f"expected {what}, found {tok.text or 'end of input'!r}")
        raise AssertionError("unreachable")

    def conclusion(self) -> _RawConclusion:
        kw = self.expect_word("action")
        self.expect(TokKind.LBRACE, "'{'")
        assignments: list[tuple[Token, ActionValue]] = []

        def one() -> None:
            feature = self.ident("feature name")
            self.expect(TokKind.EQUALS, "'='")
            assignments.append((feature, self.value("action value")[0]))

        one()
        while self.at(TokKind.COMMA):
            self.advance()
            one()
        self.expect(TokKind.RBRACE, "'}'")
        return _RawConclusion(assignments, kw)


# ---------------------------------------------------------------------------
# Name and type resolution
# ---------------------------------------------------------------------------

class _Resolver:
    def __init__(
        self,
        contexts: list[tuple[ContextVariable, Token]],
        features: list[tuple[UIFeature, Token]],
        diagnostics: list[Diagnostic],
    ):
        self.variables = {v.name: v for v, _ in contexts}
        self.features = {f.name for f, _ in features}
        self.diagnostics = diagnostics

    def diag(self, severity: Severity, code: str, message: str, tok: Token) -> None:
        self.diagnostics.append(Diagnostic(
            severity, code, message, tok.line, tok.column, max(len(tok.text), 1)))

    def resolve_tree(self, raw: _RawTree) -> AdaptionTree | None:
        guard = None
        if raw.guard is not None:
            if raw.guard.feature.text not in self.features:
                self.diag(Severity.ERROR, "undeclared-identifier",
                          f"'when' references undeclared feature {raw.guard.feature.text!r}",
                          raw.guard.feature)
            guard = TreeGuard(raw.guard.feature.text, raw.guard.value)
        root = self.resolve_node(raw.root)
        if root is None:
            return None
        return AdaptionTree(raw.name.text, raw.priority, root, guard, raw.name.loc)

    def resolve_node(self, raw: "_RawConclusion | _RawCond") -> Node | None:
        if isinstance(raw, _RawConclusion):
            seen: dict[str, ActionValue] = {}
            for feature_tok, value in raw.assignments:
                name = feature_tok.text
                if name not in self.features:
                    self.diag(Severity.ERROR, "undeclared-identifier",
                              f"action assigns undeclared feature {name!r}", feature_tok)
                if name in seen:
                    self.diag(Severity.ERROR, "duplicate-name",
                              f"feature {name!r} assigned twice in one action", feature_tok)
                seen[name] = value
            return ConclusionNode(ActionSet(seen), raw.action_tok.loc)
        variable = raw.variable.text
        var = self.variables.get(variable)
        if var is None:
            self.diag(Severity.ERROR, "undeclared-identifier",
                      f"condition tests undeclared context variable {variable!r}", raw.variable)
        branches: list[Branch] = []
        for raw_branch in raw.branches:
            if var is not None:
                self.check_guard(raw_branch.guard, var, raw_branch.guard_tok)
            child = self.resolve_node(raw_branch.child)
            if child is None:
                return None
            branches.append(Branch(raw_branch.guard, child, raw_branch.guard_tok.loc))
        if len(branches) < 2:
            return None  # structure-error already reported by the parser
        try:
            return ConditionNode(variable, tuple(branches), raw.variable.loc)
        except ValueError as exc:
            # misplaced/duplicate default: already diagnosed during parsing,
            # but keep the resolver total either way
            self.diag(Severity.ERROR, "structure-error", str(exc), raw.variable)
            return None

    def check_guard(self, guard: Guard, var: ContextVariable, tok: Token) -> None:
        if isinstance(guard, DefaultGuard):
            return
        domain = var.domain
        mismatch = None
        if isinstance(guard, EqualsGuard):
            if isinstance(domain, BoolDomain):
                if not isinstance(guard.value, bool):
                    mismatch = "a boolean domain is matched with 'true' or 'false'"
            elif isinstance(domain, EnumDomain):
                if not isinstance(guard.value, str):
                    mismatch = "an enum domain is matched with one of its tokens"
                elif guard.value not in domain.tokens:
                    mismatch = f"{guard.value!r} is not a value of {domain}"
            else:
                mismatch = f"domain {domain} is matched with intervals, not single values"
        elif isinstance(guard, IntervalGuard):
            if not isinstance(domain, (IntRangeDomain, TimeDomain)):
                mismatch = f"interval guards need a numeric domain, {var.name} is {domain}"
        elif isinstance(guard, TimeWindowGuard):
            if not isinstance(domain, TimeDomain):
                mismatch = f"time windows need a time domain, {var.name} is {domain}"
        if mismatch:
            self.diag(Severity.ERROR, "type-mismatch", mismatch, tok)


def _check_duplicates(
    contexts: list[tuple[ContextVariable, Token]],
    features: list[tuple[UIFeature, Token]],
    raw_trees: list[_RawTree],
    diagnostics: list[Diagnostic],
) -> None:
    def report(kind: str, items: list[tuple[str, Token]]) -> None:
        seen: set[str] = set()
        for name, tok in items:
            if name in seen:
                diagnostics.append(Diagnostic(
                    Severity.ERROR, "duplicate-name",
                    f"{kind} {name!r} declared more than once",
                    tok.line, tok.column, max(len(tok.text), 1)))
            seen.add(name)

    report("context variable", [(v.name, tok) for v, tok in contexts])
    report("feature", [(f.name, tok) for f, tok in features])
    report("tree", [(t.name.text, t.name) for t in raw_trees])

    context_names = {v.name for v, _ in contexts}
    for feature, tok in features:
        if feature.name in context_names:
            diagnostics.append(Diagnostic(
                Severity.WARNING, "name-collision",
                f"{feature.name!r} names both a context variable and a feature; "
                "chain evaluation will shadow the variable",
                tok.line, tok.column, max(len(tok.text), 1)))


def parse(source: str) -> RuleDocument:
    """Parse .atree source; raises RuleParseError when anything is wrong."""
    doc, diagnostics = try_parse(source)
    if doc is None:
        raise RuleParseError(diagnostics)
    return doc


def try_parse(source: str) -> tuple[RuleDocument | None, list[Diagnostic]]:
    """Like parse, but returns (document-or-None, diagnostics) and never raises.

    The document is None exactly when an error diagnostic was produced;
    warnings alone do not fail the parse.
    """
    tokens, diagnostics = _lex(source)
    parser = _Parser(tokens, diagnostics)
    contexts, features, raw_trees = parser.document()
    _check_duplicates(contexts, features, raw_trees, diagnostics)

    resolver = _Resolver(contexts, features, diagnostics)
    trees = []
    for raw in raw_trees:
        tree = resolver.resolve_tree(raw)
        if tree is not None:
            trees.append(tree)

    if any(d.severity is Severity.ERROR for d in diagnostics):
        return None, diagnostics
    return RuleDocument(
        tuple(v for v, _ in contexts),
        tuple(f for f, _ in features),
        tuple(trees),
    ), diagnostics


# ---------------------------------------------------------------------------
# Serializer
# ---------------------------------------------------------------------------

def _format_guard(guard: Guard) -> str:
    if isinstance(guard, EqualsGuard):
        return format_action_value(guard.value)
    if isinstance(guard, IntervalGuard):
        open_b = "[" if guard.lo_inclusive else "("
        close_b = "]" if guard.hi_inclusive else ")"
        return f"{open_b}{guard.lo}, {guard.hi}{close_b}"
    if isinstance(guard, TimeWindowGuard):
        return f"{format_minutes(guard.start)}..{format_minutes(guard.end)}"
    raise TypeError(f"cannot format guard {guard!r}")


def _format_domain(domain: Domain) -> str:
    if isinstance(domain, EnumDomain):
        return f"enum({', '.join(domain.tokens)})"
    if isinstance(domain, IntRangeDomain):
        return f"int[{domain.lo}, {domain.hi}]"
    return str(domain)


def _format_conclusion(node: ConclusionNode) -> str:
    inner = ", ".join(f"{k} = {format_action_value(v)}" for k, v in sorted(node.action.items()))
    return f"action {{ {inner} }}"


def serialize(doc: RuleDocument) -> str:
    """Canonical text form: 2-space indent, sorted action assignments,
    declaration order preserved.

    parse(serialize(doc)) is structurally equal to doc, and serialize is
    idempotent on parsed documents. Output has no trailing whitespace and
    ends with a newline.
    """
    def emit_tree(tree: AdaptionTree) -> list[str]:
        lines: list[str] = []

        def emit_node(node: Node, indent: int) -> None:
            pad = "  " * indent
            if isinstance(node, ConclusionNode):
                lines[-1] += _format_conclusion(node)
                return
            lines[-1] += f"cond {node.variable} {{"
            for branch in node.branches:
                if isinstance(branch.guard, DefaultGuard):
                    lines.append(f"{pad}  default -> ")
                else:
                    lines.append(f"{pad}  case {_format_guard(branch.guard)} -> ")
                emit_node(branch.child, indent + 1)
            lines.append(f"{pad}}}")

        header = f"tree {tree.name} priority {tree.priority}"
        if tree.guard is not None:
            header += f" when {tree.guard.feature} = {format_action_value(tree.guard.value)}"
        lines.append(header + " {")
        lines.append("  ")
        emit_node(tree.root, 1)
        lines.append("}")
        return lines

    sections: list[list[str]] = []
    if doc.contexts:
        sections.append([f"context {v.name}: {_format_domain(v.domain)}" for v in doc.contexts])
    if doc.features:
        sections.append([f"feature {f.name}" for f in doc.features])
    for tree in doc.trees:
        sections.append(emit_tree(tree))

    text = "\n\n".join("\n".join(section) for section in sections)
    cleaned = "\n".join(line.rstrip() for line in text.split("\n"))
    return cleaned + "\n" if cleaned else ""


# ---------------------------------------------------------------------------
# Bundled rule files
# ---------------------------------------------------------------------------

def bundled_rules_text(name: str = "arith_game.atree") -> str:
    """Source text of a rule file shipped inside the package."""
    return (files("adaptree") / "rules" / name).read_text(encoding="utf-8")


def load_bundled(name: str = "arith_game.atree") -> RuleDocument:
    return parse(bundled_rules_text(name))


def load_document(path: str) -> RuleDocument:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())
