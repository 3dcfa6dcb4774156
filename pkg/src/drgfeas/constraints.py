"""Search constraints written as small arithmetic comparisons, e.g. ``"a1 >= k/2 - 1"``.

Expressions use + - * / on integers and named array parameters.  They are
evaluated exactly: on numpy integer arrays as (numerator, denominator) pairs,
on scalars with Fractions, and on eigenvalues through certified comparison.
"""

from __future__ import annotations

import ast
import functools
import operator
import re
from dataclasses import dataclass
from fractions import Fraction
import numpy as np

from .spectral import compare_sign

_CMP = {
    ast.Lt: operator.lt,
    ast.LtE: operator.le,
    ast.Gt: operator.gt,
    ast.GtE: operator.ge,
    ast.Eq: operator.eq,
    ast.NotEq: operator.ne,
}
_BIN = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}

_VAR = re.compile(r"^(k|v|D|[abck][0-9]|theta[0-9]|m[0-9])$")
SPECTRAL = re.compile(r"^(theta|m)[0-9]$")


class ConstraintError(ValueError):
    pass


def _check(node: ast.AST, names: set[str]):
    if isinstance(node, ast.Expression):
        return _check(node.body, names)
    if isinstance(node, ast.BoolOp):
        for v in node.values:
            _check_bool(v, names)
    elif isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.Not):
        _check_bool(node.operand, names)
    elif isinstance(node, ast.Compare):
        if len(node.ops) != 1 or type(node.ops[0]) not in _CMP:
            raise ConstraintError("exactly one comparison (<, <=, >, >=, ==, !=) is required")
        _check(node.left, names)
        _check(node.comparators[0], names)
    elif isinstance(node, ast.BinOp):
        if type(node.op) not in _BIN:
            raise ConstraintError(f"operator {type(node.op).__name__} not allowed")
        _check(node.left, names)
        _check(node.right, names)
    elif isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        _check(node.operand, names)
    elif isinstance(node, ast.Constant) and type(node.value) is int:
        pass
    elif isinstance(node, ast.Name):
        if not _VAR.match(node.id):
            raise ConstraintError(f"unknown name {node.id!r}")
        names.add(node.id)
    else:
        raise ConstraintError(f"unsupported syntax: {ast.dump(node)[:40]}")


def _is_bool(node) -> bool:
    return isinstance(node, (ast.BoolOp, ast.Compare)) or (
        isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.Not)
    )


def _check_bool(node, names):
    if not _is_bool(node):
        raise ConstraintError("and/or/not need comparisons as operands")
    _check(node, names)


def _eval(node, env):
    if isinstance(node, ast.BinOp):
        return _BIN[type(node.op)](_eval(node.left, env), _eval(node.right, env))
    if isinstance(node, ast.UnaryOp):
        x = _eval(node.operand, env)
        return -x if isinstance(node.op, ast.USub) else x
    if isinstance(node, ast.Constant):
        return Fraction(node.value)
    return env[node.id]


@dataclass(frozen=True)
class Expr:
    """An arithmetic expression (no comparison), e.g. an eigenvalue target."""

    text: str

    def __post_init__(self):
        tree = _parse(self.text)
        if isinstance(tree.body, ast.Compare):
            raise ConstraintError("expected an expression, got a comparison")
        names: set[str] = set()
        _check(tree, names)
        object.__setattr__(self, "_tree", tree.body)
        object.__setattr__(self, "names", frozenset(names))

    def __call__(self, env):
        return _eval(self._tree, env)


@dataclass(frozen=True)
class Constraint:
    text: str

    def __post_init__(self):
        tree = _parse(self.text)
        if not _is_bool(tree.body):
            raise ConstraintError(f"{self.text!r} is not a comparison")
        names: set[str] = set()
        _check(tree, names)
        object.__setattr__(self, "_tree", tree.body)
        object.__setattr__(self, "names", frozenset(names))

    @property
    def spectral(self) -> bool:
        return any(SPECTRAL.match(n) for n in self.names)

    def holds(self, env: dict) -> bool:
        """Scalar evaluation; env values are ints or Fractions."""

        def cmp(node):
            diff = _eval(node.left, env) - _eval(node.comparators[0], env)
            return _CMP[type(node.ops[0])](diff, 0)

        return _truth(self._tree, cmp, all, any, operator.not_)

    def mask(self, env: dict) -> np.ndarray:
        """Vectorized evaluation; env values are ints or integer numpy arrays."""
        qenv = {n: Q.of(env[n]) for n in self.names}

        def cmp(node):
            diff = _eval_q(node.left, qenv) - _eval_q(node.comparators[0], qenv)
            # den > 0, so the sign of diff is the sign of its numerator
            return np.asarray(_CMP[type(node.ops[0])](diff.num, 0))

        def conj(xs):
            return functools.reduce(np.logical_and, xs)

        def disj(xs):
            return functools.reduce(np.logical_or, xs)

        return _truth(self._tree, cmp, conj, disj, np.logical_not)

    def holds_spectral(self, env: dict, thetas: dict) -> bool:
        """env: rational parameters and multiplicities; thetas: name -> AlgebraicScalar."""

        def cmp(node):
            names = sorted(n for n in thetas if _mentions(node, n))

            def diff(*vals):
                local = dict(env)
                local.update(zip(names, vals))
                return _eval(node.left, local) - _eval(node.comparators[0], local)

            sign = compare_sign(diff, [thetas[n] for n in names]) if names else diff()
            return _CMP[type(node.ops[0])](sign, 0)

        return _truth(self._tree, cmp, all, any, operator.not_)

    def __str__(self):
        return self.text


def _truth(node, cmp, conj, disj, neg):
    if isinstance(node, ast.Compare):
        return cmp(node)
    if isinstance(node, ast.UnaryOp):
        return neg(_truth(node.operand, cmp, conj, disj, neg))
    parts = (_truth(v, cmp, conj, disj, neg) for v in node.values)
    return conj(parts) if isinstance(node.op, ast.And) else disj(parts)


def _mentions(node, name) -> bool:
    return any(isinstance(n, ast.Name) and n.id == name for n in ast.walk(node))


def _parse(text: str) -> ast.Expression:
    try:
        return ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ConstraintError(f"cannot parse {text!r}: {exc.msg}") from None


class Q:
    """Exact rationals num/den over numpy int64 arrays (den > 0)."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=1):
        self.num = num
        self.den = den

    @classmethod
    def of(cls, x) -> "Q":
        if isinstance(x, Q):
            return x
        if isinstance(x, Fraction):
            return cls(x.numerator, x.denominator)
        return cls(x, 1)

    def __add__(self, o):
        o = Q.of(o)
        return Q(self.num * o.den + o.num * self.den, self.den * o.den)

    def __sub__(self, o):
        o = Q.of(o)
        return Q(self.num * o.den - o.num * self.den, self.den * o.den)

    def __mul__(self, o):
        o = Q.of(o)
        return Q(self.num * o.num, self.den * o.den)

    def __truediv__(self, o):
        o = Q.of(o)
        sgn = np.sign(o.num)
        if np.any(sgn == 0):
            raise ZeroDivisionError("division by zero in constraint")
        return Q(self.num * o.den * sgn, self.den * o.num * sgn)

    def __neg__(self):
        return Q(-self.num, self.den)


def _eval_q(node, env):
    if isinstance(node, ast.BinOp):
        return _BIN[type(node.op)](_eval_q(node.left, env), _eval_q(node.right, env))
    if isinstance(node, ast.UnaryOp):
        x = _eval_q(node.operand, env)
        return -x if isinstance(node.op, ast.USub) else x
    if isinstance(node, ast.Constant):
        return Q(node.value)
    return env[node.id]


def eval_q(expr: Expr, env: dict) -> Q:
    return _eval_q(expr._tree, {n: Q.of(env[n]) for n in expr.names})


def parse_constraints(texts) -> tuple[Constraint, ...]:
    return tuple(Constraint(t) for t in texts)
