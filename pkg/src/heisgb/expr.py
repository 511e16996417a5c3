"""Scalar expressions: parsing, printing and evaluation as values or jets.

Grammar (EBNF)::

    expr     = term { ("+" | "-") term } ;
    term     = unary { ("*" | "/") unary } ;
    unary    = "-" unary | power ;
    power    = atom { "^" exponent } ;          (* left associative *)
    exponent = "-" exponent | atom ;            (* must be constant *)
    atom     = number | constant | variable
             | function "(" expr ")" | "(" expr ")" ;
    number   = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ]
             | "." digits [ exponent part ] ;
    constant = "pi" ;
    function = "sin" | "cos" | "tan" | "exp" | "log" | "sqrt"
             | "sinh" | "cosh" | "atan" | "abs" ;

Precedence from tight to loose is ``^``, unary minus, ``* /``, ``+ -``; all
binary operators associate to the left, so ``2^3^2`` is ``(2^3)^2``.
The exponent of ``^`` may not depend on a variable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np

from .jet import Jet2

FIELD_VARS = ("x1", "x2", "x3")
CURVE_VARS = ("t",)
CHART_VARS = ("s1", "s2")
DEFAULT_VARS = FIELD_VARS + CURVE_VARS

FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt", "sinh", "cosh", "atan", "abs")
CONSTANTS = {"pi": math.pi}


class ExprError(ValueError):
    """Base class for expression errors."""


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, source: str, offset: int, expected: Sequence[str] = ()):
        self.source = source
        self.offset = offset
        self.expected = tuple(expected)
        self.reason = message
        text = f"{message} at offset {offset}"
        if self.expected:
            text += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(f"{text}\n{caret_line(source, offset)}")


class UnknownIdentifierError(ExprSyntaxError):
    def __init__(self, name: str, source: str, offset: int, allowed: Sequence[str]):
        self.name = name
        super().__init__(f"unknown identifier {name!r}", source, offset, allowed)


class ExprDomainError(ExprError, ArithmeticError):
    def __init__(self, message: str, subexpr: "Expr", point: Mapping[str, float]):
        self.subexpr = subexpr
        self.point = dict(point)
        where = ", ".join(f"{k}={v:.17g}" for k, v in self.point.items())
        super().__init__(f"{message} in {to_source(subexpr)!r} at ({where})")


def caret_line(source: str, offset: int) -> str:
    return f"  {source}\n  {' ' * offset}^"


# -- AST -------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Const:
    name: str

    @property
    def value(self) -> float:
        return CONSTANTS[self.name]


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: "Expr"

    @property
    def exponent_value(self) -> float:
        return evaluate(self.exponent, {})


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Num, Const, Var, Neg, BinOp, Pow, Call]


def variables(e: Expr) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, (Num, Const)):
        return set()
    if isinstance(e, Neg):
        return variables(e.operand)
    if isinstance(e, Call):
        return variables(e.arg)
    if isinstance(e, Pow):
        return variables(e.base)
    return variables(e.left) | variables(e.right)


def depth(e: Expr) -> int:
    """Number of operator levels; leaves have depth 0."""
    if isinstance(e, (Num, Const, Var)):
        return 0
    if isinstance(e, Neg):
        return 1 + depth(e.operand)
    if isinstance(e, Call):
        return 1 + depth(e.arg)
    if isinstance(e, Pow):
        return 1 + max(depth(e.base), depth(e.exponent))
    return 1 + max(depth(e.left), depth(e.right))


def to_source(e: Expr) -> str:
    """Fully parenthesised source text that parses back to an equal tree."""
    if isinstance(e, Num):
        return repr(float(e.value))
    if isinstance(e, Const):
        return e.name
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        return f"(-{to_source(e.operand)})"
    if isinstance(e, Call):
        return f"{e.func}({to_source(e.arg)})"
    if isinstance(e, Pow):
        return f"({to_source(e.base)}^{to_source(e.exponent)})"
    return f"({to_source(e.left)} {e.op} {to_source(e.right)})"


# -- tokenizer ---------------------------------------------------------------


@dataclass(frozen=True)
class _Tok:
    kind: str  # "num", "ident", "op", "end"
    text: str
    offset: int


def _tokenize(source: str) -> list[_Tok]:
    toks: list[_Tok] = []
    i, n = 0, len(source)
    while i < n:
        c = source[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit() or (c == "." and i + 1 < n and source[i + 1].isdigit()):
            j = i
            while j < n and source[j].isdigit():
                j += 1
            if j < n and source[j] == ".":
                j += 1
                while j < n and source[j].isdigit():
                    j += 1
            if j < n and source[j] in "eE":
                k = j + 1
                if k < n and source[k] in "+-":
                    k += 1
                if k < n and source[k].isdigit():
                    while k < n and source[k].isdigit():
                        k += 1
                    j = k
                else:
                    raise ExprSyntaxError("malformed number exponent", source, k, ("digit",))
            toks.append(_Tok("num", source[i:j], i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i + 1
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            toks.append(_Tok("ident", source[i:j], i))
            i = j
            continue
        if c in "+-*/^(),":
            toks.append(_Tok("op", c, i))
            i += 1
            continue
        raise ExprSyntaxError(f"unexpected character {c!r}", source, i)
    toks.append(_Tok("end", "", n))
    return toks


# -- parser -------------------------------------------------------------------

_BINARY_BP = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 40}
_UNARY_BP = 30
_OPERAND_START = ("number", "identifier", "(", "-")
_AFTER_OPERAND = ("+", "-", "*", "/", "^", ")", "end of input")


class _Parser:
    def __init__(self, source: str, allowed: Sequence[str]):
        self.source = source
        self.allowed = tuple(allowed)
        self.toks = _tokenize(source)
        self.pos = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.pos]

    def advance(self) -> _Tok:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def error(self, message: str, expected: Sequence[str] = ()) -> ExprSyntaxError:
        return ExprSyntaxError(message, self.source, self.tok.offset, expected)

    def expect(self, text: str) -> None:
        if self.tok.kind == "op" and self.tok.text == text:
            self.advance()
            return
        raise self.error(f"unexpected {self._describe()}", (text,))

    def _describe(self) -> str:
        return "end of input" if self.tok.kind == "end" else f"token {self.tok.text!r}"

    def parse(self) -> Expr:
        e = self.expression(0)
        if self.tok.kind != "end":
            raise self.error(f"unexpected {self._describe()}", _AFTER_OPERAND)
        return e

    def expression(self, rbp: int) -> Expr:
        left = self.prefix()
        while True:
            t = self.tok
            if t.kind != "op" or t.text not in _BINARY_BP:
                break
            lbp = _BINARY_BP[t.text]
            if lbp <= rbp:
                break
            self.advance()
            if t.text == "^":
                start = self.tok.offset
                right = self.exponent()
                if variables(right):
                    raise ExprSyntaxError(
                        "exponent must be constant", self.source, start, ("number", "pi")
                    )
                left = Pow(left, right)
            else:
                left = BinOp(t.text, left, self.expression(lbp))
        return left

    def exponent(self) -> Expr:
        if self.tok.kind == "op" and self.tok.text == "-":
            self.advance()
            return Neg(self.exponent())
        return self.atom()

    def prefix(self) -> Expr:
        if self.tok.kind == "op" and self.tok.text == "-":
            self.advance()
            return Neg(self.expression(_UNARY_BP))
        return self.atom()

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Num(float(t.text))
        if t.kind == "ident":
            self.advance()
            if t.text in FUNCTIONS:
                self.expect("(")
                arg = self.expression(0)
                self.expect(")")
                return Call(t.text, arg)
            if t.text in CONSTANTS:
                return Const(t.text)
            if t.text in self.allowed:
                return Var(t.text)
            raise UnknownIdentifierError(
                t.text, self.source, t.offset, self.allowed + tuple(CONSTANTS) + FUNCTIONS
            )
        if t.kind == "op" and t.text == "(":
            self.advance()
            e = self.expression(0)
            self.expect(")")
            return e
        raise self.error(f"unexpected {self._describe()}", _OPERAND_START)


def parse(source: str, variables: Sequence[str] = DEFAULT_VARS) -> Expr:
    """Parse ``source`` into an expression tree over the given variable names."""
    if not source or not source.strip():
        raise ExprSyntaxError("empty expression", source or "", 0, _OPERAND_START)
    return _Parser(source, variables).parse()


# -- evaluation --------------------------------------------------------------


def _first_bad(mask, env: Mapping[str, object]) -> dict[str, float]:
    mask = np.asarray(mask)
    if mask.ndim == 0:
        idx: tuple = ()
    else:
        idx = tuple(int(i[0]) for i in np.nonzero(mask))
    point = {}
    for name, val in env.items():
        arr = np.asarray(val.v if isinstance(val, Jet2) else val, dtype=float)
        point[name] = float(arr[idx] if arr.ndim else arr)
    return point


def _check(bad, message: str, e: Expr, env: Mapping[str, object]) -> None:
    if np.any(bad):
        raise ExprDomainError(message, e, _first_bad(bad, env))


def _is_integer(x: float) -> bool:
    return float(x).is_integer() and abs(x) < 2**31


_VALUE_FUNCS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "atan": np.arctan,
    "abs": np.abs,
}


def evaluate(e: Expr, env: Mapping[str, object]):
    """Plain value of ``e``; ``env`` maps variable names to floats or arrays."""
    return _eval_value(e, env, env)


def _eval_value(e: Expr, env, root_env):
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        try:
            return np.asarray(env[e.name], dtype=float)
        except KeyError:
            raise ExprError(f"variable {e.name!r} has no value") from None
    if isinstance(e, Neg):
        return -_eval_value(e.operand, env, root_env)
    if isinstance(e, BinOp):
        a = _eval_value(e.left, env, root_env)
        b = _eval_value(e.right, env, root_env)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        _check(np.asarray(b) == 0, "division by zero", e, root_env)
        return a / b
    if isinstance(e, Pow):
        a = _eval_value(e.base, env, root_env)
        b = e.exponent_value
        if _is_integer(b):
            if b < 0:
                _check(np.asarray(a) == 0, "zero to a negative power", e, root_env)
            return np.asarray(a, dtype=float) ** int(b)
        _check(np.asarray(a) <= 0, "non-integer power of a non-positive base", e, root_env)
        return np.asarray(a, dtype=float) ** b
    if isinstance(e, Call):
        x = _eval_value(e.arg, env, root_env)
        x = np.asarray(x, dtype=float)
        if e.func == "log":
            _check(x <= 0, "log of a non-positive value", e, root_env)
        elif e.func == "sqrt":
            _check(x < 0, "sqrt of a negative value", e, root_env)
        elif e.func == "tan":
            _check(np.cos(x) == 0, "tan pole", e, root_env)
        return _VALUE_FUNCS[e.func](x)
    raise TypeError(f"not an expression node: {e!r}")


def evaluate_jet(e: Expr, env: Mapping[str, Jet2]) -> Jet2:
    """Jet of ``e`` given jets for its variables."""
    return _eval_jet(e, env, env)


def _eval_jet(e: Expr, env, root_env) -> Jet2:
    if isinstance(e, (Num, Const)):
        return Jet2.constant(e.value)
    if isinstance(e, Var):
        try:
            return env[e.name]
        except KeyError:
            raise ExprError(f"variable {e.name!r} has no value") from None
    if isinstance(e, Neg):
        return -_eval_jet(e.operand, env, root_env)
    if isinstance(e, BinOp):
        # literal operands stay plain floats, which takes the cheap scalar
        # paths of the jet operators
        a = e.left.value if isinstance(e.left, (Num, Const)) else _eval_jet(e.left, env, root_env)
        b = e.right.value if isinstance(e.right, (Num, Const)) else _eval_jet(e.right, env, root_env)
        if not isinstance(a, Jet2) and not isinstance(b, Jet2):
            return Jet2.constant(_eval_value(e, env, root_env))
        if e.op == "+":
            return a + b if isinstance(a, Jet2) else b + a
        if e.op == "-":
            return a - b if isinstance(a, Jet2) else -b + a
        if e.op == "*":
            return a * b if isinstance(a, Jet2) else b * a
        _check((b.v if isinstance(b, Jet2) else np.asarray(b)) == 0, "division by zero", e, root_env)
        return a / b
    if isinstance(e, Pow):
        a = _eval_jet(e.base, env, root_env)
        b = e.exponent_value
        if _is_integer(b):
            if b < 0:
                _check(a.v == 0, "zero to a negative power", e, root_env)
            return a.int_power(int(b))
        _check(a.v <= 0, "non-integer power of a non-positive base", e, root_env)
        return a.real_power(b)
    if isinstance(e, Call):
        x = _eval_jet(e.arg, env, root_env)
        f = e.func
        if f == "log":
            _check(x.v <= 0, "log of a non-positive value", e, root_env)
        elif f == "sqrt":
            _check(x.v <= 0, "sqrt is not differentiable at or below zero", e, root_env)
        elif f == "abs":
            _check(x.v == 0, "abs is not differentiable at zero", e, root_env)
        elif f == "tan":
            _check(np.cos(x.v) == 0, "tan pole", e, root_env)
        return getattr(x, f)()
    raise TypeError(f"not an expression node: {e!r}")


def _as_expr(e: Union[Expr, str], allowed: Sequence[str]) -> Expr:
    return parse(e, allowed) if isinstance(e, str) else e


def eval_jet(e: Union[Expr, str], p) -> Jet2:
    """Value, gradient and Hessian of a field expression at ``p = (x1, x2, x3)``.

    ``p`` may carry a trailing axis of length 3 over a batch of points.
    """
    e = _as_expr(e, FIELD_VARS)
    extra = variables(e) - set(FIELD_VARS)
    if extra:
        raise ExprError(f"field expression uses non-field variables {sorted(extra)}")
    p = np.asarray(p, dtype=float)
    env = {name: Jet2.variable(p[..., k], k) for k, name in enumerate(FIELD_VARS)}
    return _broadcast(evaluate_jet(e, env), p.shape[:-1])


def eval_chart_jet(e: Union[Expr, str], s) -> Jet2:
    """Jet of a chart component in ``(s1, s2)``; the third slot is unused."""
    e = _as_expr(e, CHART_VARS)
    s = np.asarray(s, dtype=float)
    env = {name: Jet2.variable(s[..., k], k) for k, name in enumerate(CHART_VARS)}
    return _broadcast(evaluate_jet(e, env), s.shape[:-1])


def eval_curve_jet(components: Sequence[Union[Expr, str]], t):
    """Position, velocity and acceleration of ``t -> (c1, c2, c3)``.

    Returns three arrays of shape ``shape(t) + (3,)``.
    """
    if len(components) != 3:
        raise ExprError("a curve needs exactly three components")
    exprs = [_as_expr(c, CURVE_VARS) for c in components]
    for c in exprs:
        extra = variables(c) - set(CURVE_VARS)
        if extra:
            raise ExprError(f"curve component uses non-curve variables {sorted(extra)}")
    t = np.asarray(t, dtype=float)
    env = {"t": Jet2.variable(t, 0)}
    jets = [_broadcast(evaluate_jet(c, env), t.shape) for c in exprs]
    pos = np.stack([j.v for j in jets], axis=-1)
    vel = np.stack([j.d[..., 0] for j in jets], axis=-1)
    acc = np.stack([j.h[..., 0] for j in jets], axis=-1)
    return pos, vel, acc


def _broadcast(j: Jet2, shape: tuple) -> Jet2:
    return Jet2(
        np.broadcast_to(j.v, shape).copy(),
        np.broadcast_to(j.d, shape + (3,)).copy(),
        np.broadcast_to(j.h, shape + (6,)).copy(),
    )
