"""Minimal arithmetic expression parser for problem definitions.

Grammar: +, -, *, /, ^ (power), unary minus, abs, sign, sin, cos, exp,
numeric literals and a single free variable (``r`` or ``u``).  Expressions
are compiled once into vectorized numpy callables.
"""

from __future__ import annotations

import ast

import numpy as np

from .errors import ExpressionError

_FUNCTIONS = {
    "abs": np.abs,
    "sign": np.sign,
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
}

_BINOPS = {
    ast.Add: np.add,
    ast.Sub: np.subtract,
    ast.Mult: np.multiply,
    ast.Div: np.divide,
    ast.Pow: np.power,
}

_UNARYOPS = {
    ast.UAdd: lambda x: x,
    ast.USub: np.negative,
}


def _validate(node: ast.AST, variable: str) -> None:
    if isinstance(node, ast.Expression):
        _validate(node.body, variable)
    elif isinstance(node, ast.BinOp):
        if type(node.op) not in _BINOPS:
            raise ExpressionError(f"operator {type(node.op).__name__} not allowed")
        _validate(node.left, variable)
        _validate(node.right, variable)
    elif isinstance(node, ast.UnaryOp):
        if type(node.op) not in _UNARYOPS:
            raise ExpressionError(f"operator {type(node.op).__name__} not allowed")
        _validate(node.operand, variable)
    elif isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCTIONS:
            raise ExpressionError("only abs, sign, sin, cos, exp calls are allowed")
        if len(node.args) != 1 or node.keywords:
            raise ExpressionError("functions take exactly one positional argument")
        _validate(node.args[0], variable)
    elif isinstance(node, ast.Name):
        if node.id != variable:
            raise ExpressionError(f"unknown name {node.id!r}; the variable is {variable!r}")
    elif isinstance(node, ast.Constant):
        if not isinstance(node.value, (int, float)):
            raise ExpressionError(f"literal {node.value!r} is not numeric")
    else:
        raise ExpressionError(f"syntax element {type(node).__name__} not allowed")


def compile_expression(text: str, variable: str):
    """Compile an expression string into a numpy-vectorized callable.

    ``variable`` is the single admissible free variable name ("r" or "u").
    After whitelist validation the expression is compiled to a code object,
    so repeated evaluation (integrator right-hand sides) stays cheap.
    """
    if variable not in ("r", "u"):
        raise ExpressionError("variable must be 'r' or 'u'")
    source = text.replace("^", "**")
    try:
        tree = ast.parse(source, mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {text!r}: {exc}") from exc
    _validate(tree, variable)
    code = compile(tree, filename=f"<expr {text!r}>", mode="eval")
    namespace = {"__builtins__": {}, **_FUNCTIONS}

    def fn(x):
        if isinstance(x, np.ndarray):
            out = np.asarray(eval(code, namespace, {variable: x}), dtype=float)
            if out.shape != x.shape:  # constant expressions collapse to scalars
                out = np.broadcast_to(out, x.shape).copy()
            return out
        return float(eval(code, namespace, {variable: float(x)}))

    fn.__name__ = f"expr_{variable}"
    fn.expression = text
    return fn
