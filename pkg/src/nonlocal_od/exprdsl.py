"""A small expression language for the coefficient functions A and B.

Grammar::

    expr    := term (('+'|'-') term)*
    term    := factor (('*'|'/') factor)*
    factor  := ('-')? power
    power   := atom ('^' power)?
    atom    := NUMBER | 'pi' | 'e' | VAR | FUNC '(' expr ')' | '(' expr ')'
    FUNC    := 'exp' | 'log' | 'sqrt' | 'abs'
    VAR     := 'n' DIGIT+

``n1 .. nk`` name the norm arguments passed to the coefficient, 1-based.
Exponentiation is right associative and binds tighter than unary minus,
so ``-n1^2`` is ``-(n1^2)``.
"""

import math
import re
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ExpressionError",
    "ExpressionSyntaxError",
    "UnknownIdentifierError",
    "VariableIndexError",
    "ExpressionEvalError",
    "Num",
    "Const",
    "Var",
    "Neg",
    "BinOp",
    "Call",
    "CoefficientExpr",
    "parse_expression",
    "eval_expression",
    "eval_array",
    "to_text",
]

FUNCTIONS = ("exp", "log", "sqrt", "abs")
CONSTANTS = {"pi": math.pi, "e": math.e}
MAX_VARIABLE = 99


class ExpressionError(ValueError):
    """Base class for parse errors; ``offset`` is a byte offset into the text."""

    def __init__(self, message, offset=None):
        self.offset = offset
        if offset is not None:
            message = f"{message} at offset {offset}"
        super().__init__(message)


class ExpressionSyntaxError(ExpressionError):
    pass


class UnknownIdentifierError(ExpressionError):
    pass


class VariableIndexError(ExpressionError):
    pass


class ExpressionEvalError(ArithmeticError):
    pass


# -- tree -------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Var:
    index: int  # 1-based


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    func: str
    arg: object


@dataclass(frozen=True)
class CoefficientExpr:
    root: object
    arg_count: int
    text: str = ""

    def __call__(self, *args):
        return eval_expression(self, args)

    def __str__(self):
        return to_text(self.root)


# -- lexer ------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # number | ident | op | end
    text: str
    offset: int


def _byte_offset(text, char_index):
    return len(text[:char_index].encode("utf-8"))


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExpressionSyntaxError(
                f"unexpected character {text[pos]!r}", _byte_offset(text, pos)
            )
        if m.lastgroup != "ws":
            tokens.append(_Token(m.lastgroup, m.group(), _byte_offset(text, pos)))
        pos = m.end()
    tokens.append(_Token("end", "", _byte_offset(text, len(text))))
    return tokens


# -- parser -----------------------------------------------------------------

class _Parser:
    def __init__(self, text, arg_count):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.arg_count = arg_count

    @property
    def tok(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def at_op(self, *ops):
        return self.tok.kind == "op" and self.tok.text in ops

    def expect_op(self, op):
        if not self.at_op(op):
            raise ExpressionSyntaxError(
                f"expected {op!r}, found {self._describe(self.tok)}", self.tok.offset
            )
        return self.advance()

    @staticmethod
    def _describe(tok):
        return "end of input" if tok.kind == "end" else repr(tok.text)

    def parse(self):
        node = self.expr()
        if self.tok.kind != "end":
            raise ExpressionSyntaxError(
                f"unexpected {self._describe(self.tok)}", self.tok.offset
            )
        return node

    def expr(self):
        node = self.term()
        while self.at_op("+", "-"):
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.at_op("*", "/"):
            op = self.advance().text
            node = BinOp(op, node, self.factor())
        return node

    def factor(self):
        if self.at_op("-"):
            self.advance()
            return Neg(self.power())
        return self.power()

    def power(self):
        base = self.atom()
        if self.at_op("^"):
            self.advance()
            return BinOp("^", base, self.power())
        return base

    def atom(self):
        tok = self.tok
        if tok.kind == "number":
            self.advance()
            value = float(tok.text)
            if not math.isfinite(value):
                raise ExpressionSyntaxError(f"numeric literal {tok.text!r} overflows", tok.offset)
            return Num(value)
        if tok.kind == "ident":
            self.advance()
            name = tok.text
            if name in CONSTANTS:
                return Const(name)
            if name in FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Call(name, arg)
            m = re.fullmatch(r"n(\d+)", name)
            if m:
                index = int(m.group(1))
                if not 1 <= index <= min(self.arg_count, MAX_VARIABLE):
                    raise VariableIndexError(
                        f"variable {name} out of range (have {self.arg_count} argument(s))",
                        tok.offset,
                    )
                return Var(index)
            raise UnknownIdentifierError(f"unknown identifier {name!r}", tok.offset)
        if self.at_op("("):
            self.advance()
            node = self.expr()
            self.expect_op(")")
            return node
        raise ExpressionSyntaxError(f"unexpected {self._describe(tok)}", tok.offset)


def parse_expression(text, arg_count=1):
    """Parse ``text`` into a :class:`CoefficientExpr` over ``arg_count`` slots."""
    if int(arg_count) != arg_count or arg_count < 1:
        raise ValueError(f"arg_count must be a positive integer, got {arg_count!r}")
    if not text or not text.strip():
        raise ExpressionSyntaxError("empty expression", 0)
    root = _Parser(text, int(arg_count)).parse()
    return CoefficientExpr(root, int(arg_count), text)


# -- printing ---------------------------------------------------------------

def to_text(node):
    """Fully parenthesised text that parses back to the same tree."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Const):
        return node.name
    if isinstance(node, Var):
        return f"n{node.index}"
    if isinstance(node, Neg):
        return f"(-{to_text(node.operand)})"
    if isinstance(node, BinOp):
        return f"({to_text(node.left)} {node.op} {to_text(node.right)})"
    if isinstance(node, Call):
        return f"{node.func}({to_text(node.arg)})"
    raise TypeError(f"not an expression node: {node!r}")


# -- scalar evaluation ------------------------------------------------------

def _pow(a, b):
    if a < 0 and b != int(b):
        raise ExpressionEvalError(f"non-real power {a!r}^{b!r}")
    if a == 0 and b < 0:
        raise ExpressionEvalError("zero raised to a negative power")
    try:
        return math.pow(a, b)
    except OverflowError:
        if a < 0 and int(b) % 2 == 1:
            return -math.inf
        return math.inf


def _exp(x):
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def _log(x):
    if x <= 0:
        raise ExpressionEvalError(f"log of nonpositive value {x!r}")
    return math.log(x)


def _sqrt(x):
    if x < 0:
        raise ExpressionEvalError(f"sqrt of negative value {x!r}")
    return math.sqrt(x)


_SCALAR_FUNCS = {"exp": _exp, "log": _log, "sqrt": _sqrt, "abs": abs}


def _eval(node, args):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return args[node.index - 1]
    if isinstance(node, BinOp):
        a = _eval(node.left, args)
        b = _eval(node.right, args)
        op = node.op
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            if b == 0:
                raise ExpressionEvalError("division by zero")
            return a / b
        return _pow(a, b)
    if isinstance(node, Neg):
        return -_eval(node.operand, args)
    if isinstance(node, Call):
        return _SCALAR_FUNCS[node.func](_eval(node.arg, args))
    if isinstance(node, Const):
        return CONSTANTS[node.name]
    raise TypeError(f"not an expression node: {node!r}")


def eval_expression(expr, binding):
    """Evaluate ``expr`` at the argument values in ``binding``."""
    values = [float(v) for v in binding]
    if len(values) != expr.arg_count:
        raise ValueError(
            f"expression takes {expr.arg_count} argument(s), got {len(values)}"
        )
    value = _eval(expr.root, values)
    if math.isnan(value):
        raise ExpressionEvalError(f"expression {expr} evaluated to NaN")
    return value


# -- vectorised evaluation --------------------------------------------------

def _eval_array(node, args):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return args[node.index - 1]
    if isinstance(node, Const):
        return CONSTANTS[node.name]
    if isinstance(node, Neg):
        return -_eval_array(node.operand, args)
    if isinstance(node, BinOp):
        a = _eval_array(node.left, args)
        b = _eval_array(node.right, args)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            if np.any(np.asarray(b) == 0):
                raise ExpressionEvalError("division by zero")
            return a / b
        a_arr, b_arr = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float))
        if np.any((a_arr < 0) & (b_arr != np.round(b_arr))):
            raise ExpressionEvalError("non-real power")
        if np.any((a_arr == 0) & (b_arr < 0)):
            raise ExpressionEvalError("zero raised to a negative power")
        return np.power(a_arr, b_arr)
    if isinstance(node, Call):
        x = np.asarray(_eval_array(node.arg, args), float)
        if node.func == "log":
            if np.any(x <= 0):
                raise ExpressionEvalError("log of nonpositive value")
            return np.log(x)
        if node.func == "sqrt":
            if np.any(x < 0):
                raise ExpressionEvalError("sqrt of negative value")
            return np.sqrt(x)
        if node.func == "exp":
            return np.exp(x)
        return np.abs(x)
    raise TypeError(f"not an expression node: {node!r}")


def eval_array(expr, binding):
    """Evaluate ``expr`` elementwise over arrays of argument values.

    Agrees with :func:`eval_expression` point by point; used to scan
    the reduced equation on a grid.
    """
    if len(binding) != expr.arg_count:
        raise ValueError(
            f"expression takes {expr.arg_count} argument(s), got {len(binding)}"
        )
    args = [np.asarray(v, float) for v in binding]
    shape = np.broadcast_shapes(*(a.shape for a in args))
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        value = np.broadcast_to(np.asarray(_eval_array(expr.root, args), float), shape)
    if np.any(np.isnan(value)):
        raise ExpressionEvalError(f"expression {expr} evaluated to NaN")
    return np.array(value)
