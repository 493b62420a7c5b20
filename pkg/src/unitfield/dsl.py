"""Small expression language for metric components and field components.

Expressions are parsed into an immutable AST that supports IEEE-double
evaluation, exact symbolic differentiation (with constant folding), and
pretty-printing.  Grammar, with '^' right-associative and binding tighter
than unary minus:

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := '-' factor | power
    power  := atom ('^' factor)?
    atom   := number | name | name '(' expr ')' | '(' expr ')'

Numbers are decimal with optional fraction and exponent; there is no
implicit multiplication.  Known functions: sin cos tan atan sqrt exp log
abs; the name ``pi`` denotes the constant.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .errors import (
    DifferentiationUnsupported,
    EvalError,
    ParseError,
    UnknownIdentifier,
)

FUNCTIONS = ("sin", "cos", "tan", "atan", "sqrt", "exp", "log", "abs")


@dataclass(frozen=True)
class SourceSpan:
    """Byte offsets [start, end) into the source text."""

    start: int
    end: int

    def merge(self, other: "SourceSpan") -> "SourceSpan":
        return SourceSpan(min(self.start, other.start), max(self.end, other.end))


_NOSPAN = SourceSpan(0, 0)


class Expr:
    """Base AST node.  Nodes are immutable and shareable across threads."""

    __slots__ = ("span",)

    def __str__(self):
        return to_string(self)


class Constant(Expr):
    __slots__ = ("value",)

    def __init__(self, value: float, span: SourceSpan = _NOSPAN):
        object.__setattr__(self, "value", float(value))
        object.__setattr__(self, "span", span)

    def __setattr__(self, *a):
        raise AttributeError("Expr nodes are immutable")

    def __repr__(self):
        return f"Constant({self.value!r})"


class Variable(Expr):
    __slots__ = ("name",)

    def __init__(self, name: str, span: SourceSpan = _NOSPAN):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "span", span)

    def __setattr__(self, *a):
        raise AttributeError("Expr nodes are immutable")

    def __repr__(self):
        return f"Variable({self.name!r})"


class Unary(Expr):
    """op in {'neg','sin','cos','tan','atan','sqrt','exp','log','abs'}."""

    __slots__ = ("op", "operand")

    def __init__(self, op: str, operand: Expr, span: SourceSpan = _NOSPAN):
        object.__setattr__(self, "op", op)
        object.__setattr__(self, "operand", operand)
        object.__setattr__(self, "span", span)

    def __setattr__(self, *a):
        raise AttributeError("Expr nodes are immutable")

    def __repr__(self):
        return f"Unary({self.op!r}, {self.operand!r})"


class Binary(Expr):
    """op in {'add','sub','mul','div','pow'}."""

    __slots__ = ("op", "left", "right")

    def __init__(self, op: str, left: Expr, right: Expr, span: SourceSpan = _NOSPAN):
        object.__setattr__(self, "op", op)
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        object.__setattr__(self, "span", span)

    def __setattr__(self, *a):
        raise AttributeError("Expr nodes are immutable")

    def __repr__(self):
        return f"Binary({self.op!r}, {self.left!r}, {self.right!r})"


# --- tokenizer -------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[+\-*/^()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # 'number' | 'name' | 'op' | 'end'
    text: str
    span: SourceSpan


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(
                f"unexpected character {text[pos]!r}", SourceSpan(pos, pos + 1)
            )
        pos = m.end()
        if m.lastgroup == "ws":
            continue
        tokens.append(_Token(m.lastgroup, m.group(), SourceSpan(m.start(), m.end())))
    tokens.append(_Token("end", "", SourceSpan(len(text), len(text))))
    return tokens


# --- parser ----------------------------------------------------------------

class _Parser:
    def __init__(self, tokens: list[_Token], coords: tuple[str, ...]):
        self.tokens = tokens
        self.pos = 0
        self.coords = coords

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op: str) -> _Token:
        tok = self.peek()
        if tok.kind == "op" and tok.text == op:
            return self.advance()
        raise ParseError(f"expected {op!r}", tok.span)

    def parse_expr(self) -> Expr:
        node = self.parse_term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.advance()
            rhs = self.parse_term()
            kind = "add" if op.text == "+" else "sub"
            node = Binary(kind, node, rhs, node.span.merge(rhs.span))
        return node

    def parse_term(self) -> Expr:
        node = self.parse_factor()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.advance()
            rhs = self.parse_factor()
            kind = "mul" if op.text == "*" else "div"
            node = Binary(kind, node, rhs, node.span.merge(rhs.span))
        return node

    def parse_factor(self) -> Expr:
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            operand = self.parse_factor()
            return Unary("neg", operand, tok.span.merge(operand.span))
        return self.parse_power()

    def parse_power(self) -> Expr:
        base = self.parse_atom()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.advance()
            # right-associative; exponent may carry its own unary minus
            exponent = self.parse_factor()
            return Binary("pow", base, exponent, base.span.merge(exponent.span))
        return base

    def parse_atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "number":
            self.advance()
            return Constant(float(tok.text), tok.span)
        if tok.kind == "name":
            self.advance()
            nxt = self.peek()
            if nxt.kind == "op" and nxt.text == "(":
                if tok.text not in FUNCTIONS:
                    raise UnknownIdentifier(f"unknown function {tok.text!r}", tok.span)
                self.advance()
                arg = self.parse_expr()
                close = self.expect_op(")")
                return Unary(tok.text, arg, tok.span.merge(close.span))
            if tok.text == "pi":
                return Constant(math.pi, tok.span)
            if tok.text not in self.coords:
                raise UnknownIdentifier(f"unknown identifier {tok.text!r}", tok.span)
            return Variable(tok.text, tok.span)
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            inner = self.parse_expr()
            self.expect_op(")")
            return inner
        raise ParseError("expected operand", tok.span)


def parse(text: str, coords) -> Expr:
    """Parse ``text`` into an Expr; variables must come from ``coords``.

    Raises ParseError (with a SourceSpan) on malformed input and
    UnknownIdentifier for names outside coords, the function set, and 'pi'.
    """
    coords = tuple(coords)
    tokens = _tokenize(text)
    parser = _Parser(tokens, coords)
    node = parser.parse_expr()
    trailing = parser.peek()
    if trailing.kind != "end":
        raise ParseError(f"unexpected trailing input {trailing.text!r}", trailing.span)
    return node


# --- evaluation -------------------------------------------------------------

def _check_finite(value: float, span: SourceSpan) -> float:
    if not math.isfinite(value):
        raise EvalError("non-finite result", span)
    return value


def evaluate(expr: Expr, env: dict) -> float:
    """Evaluate in IEEE double arithmetic; every variable must be bound.

    Division by zero, log of a non-positive value, sqrt of a negative value,
    and any NaN/Inf intermediate raise EvalError carrying the node's span.
    """
    if isinstance(expr, Constant):
        return expr.value
    if isinstance(expr, Variable):
        try:
            return float(env[expr.name])
        except KeyError:
            raise EvalError(f"unbound variable {expr.name!r}", expr.span) from None
    if isinstance(expr, Unary):
        if expr.op == "neg":
            return -evaluate(expr.operand, env)
        arg = evaluate(expr.operand, env)
        try:
            if expr.op == "sqrt" and arg < 0.0:
                raise ValueError("sqrt of negative")
            if expr.op == "log" and arg <= 0.0:
                raise ValueError("log of non-positive")
            if expr.op == "abs":
                value = abs(arg)
            else:
                value = getattr(math, expr.op)(arg)
        except (ValueError, OverflowError) as exc:
            raise EvalError(str(exc), expr.span) from None
        return _check_finite(value, expr.span)
    if isinstance(expr, Binary):
        lhs = evaluate(expr.left, env)
        rhs = evaluate(expr.right, env)
        try:
            if expr.op == "add":
                value = lhs + rhs
            elif expr.op == "sub":
                value = lhs - rhs
            elif expr.op == "mul":
                value = lhs * rhs
            elif expr.op == "div":
                value = lhs / rhs
            else:
                value = lhs ** rhs
        except ZeroDivisionError:
            raise EvalError("division by zero", expr.span) from None
        except (ValueError, OverflowError) as exc:
            raise EvalError(str(exc), expr.span) from None
        if isinstance(value, complex):
            raise EvalError("complex power result", expr.span)
        return _check_finite(value, expr.span)
    raise TypeError(f"not an Expr: {expr!r}")


# --- folding constructors ----------------------------------------------------

def _const(e: Expr):
    return e.value if isinstance(e, Constant) else None


def neg(e: Expr) -> Expr:
    if isinstance(e, Constant):
        return Constant(-e.value, e.span)
    if isinstance(e, Unary) and e.op == "neg":
        return e.operand
    return Unary("neg", e, e.span)


def add(a: Expr, b: Expr) -> Expr:
    if _const(a) == 0.0:
        return b
    if _const(b) == 0.0:
        return a
    if isinstance(a, Constant) and isinstance(b, Constant):
        return Constant(a.value + b.value, a.span.merge(b.span))
    return Binary("add", a, b, a.span.merge(b.span))


def sub(a: Expr, b: Expr) -> Expr:
    if _const(b) == 0.0:
        return a
    if _const(a) == 0.0:
        return neg(b)
    if isinstance(a, Constant) and isinstance(b, Constant):
        return Constant(a.value - b.value, a.span.merge(b.span))
    return Binary("sub", a, b, a.span.merge(b.span))


def mul(a: Expr, b: Expr) -> Expr:
    if _const(a) == 0.0 or _const(b) == 0.0:
        return Constant(0.0)
    if _const(a) == 1.0:
        return b
    if _const(b) == 1.0:
        return a
    if isinstance(a, Constant) and isinstance(b, Constant):
        return Constant(a.value * b.value, a.span.merge(b.span))
    return Binary("mul", a, b, a.span.merge(b.span))


def div(a: Expr, b: Expr) -> Expr:
    if _const(a) == 0.0 and _const(b) != 0.0:
        return Constant(0.0)
    if _const(b) == 1.0:
        return a
    if isinstance(a, Constant) and isinstance(b, Constant) and b.value != 0.0:
        return Constant(a.value / b.value, a.span.merge(b.span))
    return Binary("div", a, b, a.span.merge(b.span))


def pow_(a: Expr, b: Expr) -> Expr:
    if _const(b) == 1.0:
        return a
    if _const(b) == 0.0:
        return Constant(1.0)
    return Binary("pow", a, b, a.span.merge(b.span))


def fn(op: str, e: Expr) -> Expr:
    return Unary(op, e, e.span)


# --- differentiation ---------------------------------------------------------

def _variables(expr: Expr, acc: set) -> set:
    if isinstance(expr, Variable):
        acc.add(expr.name)
    elif isinstance(expr, Unary):
        _variables(expr.operand, acc)
    elif isinstance(expr, Binary):
        _variables(expr.left, acc)
        _variables(expr.right, acc)
    return acc


def constant_value(expr: Expr):
    """Value of a variable-free expression, else None."""
    if not _variables(expr, set()):
        try:
            return evaluate(expr, {})
        except EvalError:
            return None
    return None


def differentiate(expr: Expr, var: str) -> Expr:
    """Exact symbolic derivative with constant folding.

    Powers require a constant (variable-free) exponent; otherwise
    DifferentiationUnsupported is raised.
    """
    if isinstance(expr, Constant):
        return Constant(0.0)
    if isinstance(expr, Variable):
        return Constant(1.0 if expr.name == var else 0.0)
    if isinstance(expr, Unary):
        u = expr.operand
        du = differentiate(u, var)
        if expr.op == "neg":
            return neg(du)
        if expr.op == "sin":
            return mul(fn("cos", u), du)
        if expr.op == "cos":
            return neg(mul(fn("sin", u), du))
        if expr.op == "tan":
            return div(du, pow_(fn("cos", u), Constant(2.0)))
        if expr.op == "atan":
            return div(du, add(Constant(1.0), mul(u, u)))
        if expr.op == "sqrt":
            return div(du, mul(Constant(2.0), fn("sqrt", u)))
        if expr.op == "exp":
            return mul(fn("exp", u), du)
        if expr.op == "log":
            return div(du, u)
        if expr.op == "abs":
            # d|u| = sign(u) du, undefined at u = 0
            return mul(div(u, fn("abs", u)), du)
        raise DifferentiationUnsupported(f"unknown function {expr.op!r}", expr.span)
    if isinstance(expr, Binary):
        a, b = expr.left, expr.right
        if expr.op == "add":
            return add(differentiate(a, var), differentiate(b, var))
        if expr.op == "sub":
            return sub(differentiate(a, var), differentiate(b, var))
        if expr.op == "mul":
            return add(mul(differentiate(a, var), b), mul(a, differentiate(b, var)))
        if expr.op == "div":
            num = sub(mul(differentiate(a, var), b), mul(a, differentiate(b, var)))
            return div(num, pow_(b, Constant(2.0)))
        if expr.op == "pow":
            c = constant_value(b)
            if c is None:
                raise DifferentiationUnsupported(
                    "power with non-constant exponent", expr.span
                )
            da = differentiate(a, var)
            return mul(mul(Constant(c), pow_(a, Constant(c - 1.0))), da)
    raise TypeError(f"not an Expr: {expr!r}")


# --- pretty printer ----------------------------------------------------------

_PREC = {"add": 1, "sub": 1, "mul": 2, "div": 2, "neg": 2.5, "pow": 4}


def _prec(expr: Expr) -> float:
    if isinstance(expr, Binary):
        return _PREC[expr.op]
    if isinstance(expr, Unary) and expr.op == "neg":
        return _PREC["neg"]
    if isinstance(expr, Constant) and expr.value < 0:
        return _PREC["neg"]
    return 5.0


def _fmt_number(value: float) -> str:
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def to_string(expr: Expr) -> str:
    """Render with the minimal parentheses that preserve the parse."""
    if isinstance(expr, Constant):
        return _fmt_number(expr.value)
    if isinstance(expr, Variable):
        return expr.name
    if isinstance(expr, Unary):
        if expr.op == "neg":
            inner = to_string(expr.operand)
            if _prec(expr.operand) < _PREC["neg"]:
                inner = f"({inner})"
            return f"-{inner}"
        return f"{expr.op}({to_string(expr.operand)})"
    if isinstance(expr, Binary):
        op_char = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}[expr.op]
        my = _PREC[expr.op]
        lhs = to_string(expr.left)
        rhs = to_string(expr.right)
        if expr.op == "pow":
            if _prec(expr.left) <= my:
                lhs = f"({lhs})"
            if _prec(expr.right) < my:
                rhs = f"({rhs})"
        else:
            if _prec(expr.left) < my:
                lhs = f"({lhs})"
            if _prec(expr.right) < my or (
                _prec(expr.right) == my and expr.op in ("sub", "div")
            ):
                rhs = f"({rhs})"
        return f"{lhs}{op_char}{rhs}"
    raise TypeError(f"not an Expr: {expr!r}")
