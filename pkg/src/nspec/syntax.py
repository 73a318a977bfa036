"""Concrete syntax: parsing and printing of programs and terms.

Program files declare symbols, then give rules::

    % Peano naturals
    constructors 0/0 s/1 true/0 false/0 ;
    operations leq/2 add/2 ;

    leq(0, N) -> true ;
    leq(s(M), s(N)) -> M <= N ;

Variables start with an uppercase letter; every other identifier must be
declared with its arity.  `%` starts a comment.  Four infix forms are
accepted as sugar when the corresponding symbol is declared: `+` (add),
`<=` (leq), `~` (eq) and the right-associative `:` (cons).  The printer
always emits plain prefix applications, so print/parse round-trips are
exact.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple

from .program import Program, ProgramError, Rule, Signature
from .terms import App, CONSTRUCTOR, OPERATION, Symbol, Term, Var

_TOKEN_RE = re.compile(
    r"""
      (?P<ws>\s+)
    | (?P<comment>%[^\n]*)
    | (?P<arrow>->)
    | (?P<leq><=)
    | (?P<punct>[(),;/~+:])
    | (?P<var>[A-Z][A-Za-z0-9_]*)
    | (?P<name>[a-z0-9][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)


class ParseError(Exception):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str) -> List[_Token]:
    tokens: List[_Token] = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        lexeme = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind if kind not in ("arrow", "leq") else "punct",
                                 lexeme, line, col))
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            col = len(lexeme) - lexeme.rfind("\n")
        else:
            col += len(lexeme)
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


_SUGAR = {"+": "add", "<=": "leq", "~": "eq", ":": "cons"}


class _Parser:
    def __init__(self, tokens: List[_Token], signature: Signature):
        self.tokens = tokens
        self.i = 0
        self.signature = signature

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> _Token:
        tok = self.peek()
        if tok.text != text:
            shown = tok.text or "end of input"
            raise ParseError(f"expected {text!r}, found {shown!r}", tok.line, tok.column)
        return self.advance()

    def error(self, message: str) -> ParseError:
        tok = self.peek()
        return ParseError(message, tok.line, tok.column)

    def _sugar_symbol(self, op_text: str, tok: _Token) -> Symbol:
        name = _SUGAR[op_text]
        sym = self.signature.get(name)
        if sym is None or sym.arity != 2:
            raise ParseError(
                f"infix {op_text!r} needs a declared binary symbol {name!r}",
                tok.line, tok.column)
        return sym

    # precedence: ~ < <= < : (right) < +  (left)
    def term(self) -> Term:
        left = self.leq_term()
        if self.peek().text == "~":
            tok = self.advance()
            right = self.leq_term()
            return App(self._sugar_symbol("~", tok), (left, right))
        return left

    def leq_term(self) -> Term:
        left = self.cons_term()
        if self.peek().text == "<=":
            tok = self.advance()
            right = self.cons_term()
            return App(self._sugar_symbol("<=", tok), (left, right))
        return left

    def cons_term(self) -> Term:
        left = self.add_term()
        if self.peek().text == ":":
            tok = self.advance()
            right = self.cons_term()
            return App(self._sugar_symbol(":", tok), (left, right))
        return left

    def add_term(self) -> Term:
        left = self.primary()
        while self.peek().text == "+":
            tok = self.advance()
            right = self.primary()
            left = App(self._sugar_symbol("+", tok), (left, right))
        return left

    def primary(self) -> Term:
        tok = self.peek()
        if tok.text == "(":
            self.advance()
            inner = self.term()
            self.expect(")")
            return inner
        if tok.kind == "var":
            self.advance()
            return Var(tok.text)
        if tok.kind == "name":
            self.advance()
            sym = self.signature.get(tok.text)
            if sym is None:
                raise ParseError(f"undeclared symbol {tok.text!r}", tok.line, tok.column)
            args: Tuple[Term, ...] = ()
            if self.peek().text == "(":
                self.advance()
                collected = [self.term()]
                while self.peek().text == ",":
                    self.advance()
                    collected.append(self.term())
                self.expect(")")
                args = tuple(collected)
            if len(args) != sym.arity:
                raise ParseError(
                    f"{sym} applied to {len(args)} argument(s)", tok.line, tok.column)
            return App(sym, args)
        shown = tok.text or "end of input"
        raise ParseError(f"expected a term, found {shown!r}", tok.line, tok.column)


def _parse_declaration(parser: _Parser, kind: str) -> None:
    parser.advance()  # the keyword
    while parser.peek().text != ";":
        tok = parser.peek()
        if tok.kind not in ("name", "var"):
            raise parser.error("expected NAME/ARITY in declaration")
        if tok.kind == "var":
            raise ParseError(
                f"symbol names must not start uppercase: {tok.text!r}",
                tok.line, tok.column)
        parser.advance()
        parser.expect("/")
        num = parser.peek()
        if num.kind != "name" or not num.text.isdigit():
            raise parser.error("expected a numeric arity")
        parser.advance()
        try:
            parser.signature.declare(Symbol(tok.text, int(num.text), kind))
        except ProgramError as exc:
            raise ParseError(str(exc), tok.line, tok.column) from exc
    parser.expect(";")


def parse_program(text: str) -> Program:
    """Parse a program file into a Program."""
    tokens = _tokenize(text)
    signature = Signature()
    parser = _Parser(tokens, signature)
    rules: List[Rule] = []
    while parser.peek().kind != "eof":
        tok = parser.peek()
        if tok.kind == "name" and tok.text in ("constructors", "operations"):
            _parse_declaration(
                parser, CONSTRUCTOR if tok.text == "constructors" else OPERATION)
            continue
        lhs = parser.term()
        parser.expect("->")
        rhs = parser.term()
        parser.expect(";")
        if isinstance(lhs, Var):
            raise ParseError("rule left-hand side must not be a variable",
                             tok.line, tok.column)
        try:
            rules.append(Rule(lhs, rhs, label=f"R{len(rules) + 1}"))
        except ProgramError as exc:
            raise ParseError(str(exc), tok.line, tok.column) from exc
    try:
        return Program(signature, rules)
    except ProgramError as exc:
        raise ParseError(str(exc), tokens[-1].line, tokens[-1].column) from exc


def parse_term(text: str, signature: Signature) -> Term:
    """Parse a single term (goal syntax) against a signature."""
    parser = _Parser(_tokenize(text), signature)
    t = parser.term()
    tok = parser.peek()
    if tok.kind != "eof":
        raise ParseError(f"trailing input {tok.text!r}", tok.line, tok.column)
    return t


def print_program(program: Program) -> str:
    """Canonical text for a program; parsing it back is structurally exact."""
    lines: List[str] = []
    ctors = program.signature.constructors()
    ops = program.signature.operations()
    if ctors:
        lines.append("constructors " + " ".join(str(s) for s in ctors) + " ;")
    if ops:
        lines.append("operations " + " ".join(str(s) for s in ops) + " ;")
    if program.rules:
        lines.append("")
    for r in program.rules:
        lines.append(f"{r.lhs} -> {r.rhs} ;")
    return "\n".join(lines) + "\n"
