"""Strict evaluation of side-effect-free expressions and guards.

Environments are ChainMaps (composition with left bias, so pattern
bindings layered over an outer scope win on lookup).  Function bodies
evaluate under a fresh environment binding only the formals; they never
see the caller's variables.  Rationals stay exact throughout.
"""

from __future__ import annotations

from collections import ChainMap
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

from .errors import (
    CallDepthError, DivisionByZeroError, EvalTypeError, MatchFailureError,
    UnboundVariableError,
)
from .nodes import (
    Apply, BinOp, CaseExpr, ClassDecl, DeadlineExpr, DestinyExpr, Expr,
    FuncDecl, GBool, GConj, GDuration, GFut, Guard, IfExpr, Lit, Model,
    NowExpr, PCtor, PLit, PName, Pattern, PWildcard, RBool, RConj, RDur,
    RFut, RtGuard, ThisExpr, Unary, Var,
)
from .values import (
    BoolVal, DataVal, FALSE, FutRef, NumVal, StrVal, TRUE, Value,
    mk_duration, mk_time, render_value,
)

Env = Mapping[str, Value]


@dataclass
class Program:
    """Static tables extracted from a (merged, desugared) model."""

    functions: dict[str, FuncDecl]
    ctor_arity: dict[str, int]
    classes: dict[str, ClassDecl]

    @staticmethod
    def from_model(model: Model) -> Program:
        functions: dict[str, FuncDecl] = {}
        for fd in model.functions:
            functions[fd.name] = fd  # later definitions shadow earlier ones
        ctor_arity: dict[str, int] = {}
        for dd in model.datatypes:
            for ctor in dd.ctors:
                ctor_arity[ctor.name] = len(ctor.arg_types)
        classes = {cd.name: cd for cd in model.classes}
        return Program(functions, ctor_arity, classes)


@dataclass
class EvalContext:
    program: Program
    clock: Fraction = Fraction(0)
    is_resolved: Callable[[int], bool] = lambda fid: False
    max_depth: int = 100_000
    depth: int = field(default=0)


def eval_expr(expr: Expr, env: Env, ctx: EvalContext) -> Value:
    try:
        return _eval(expr, env, ctx)
    except RecursionError:
        raise CallDepthError(
            "expression nesting exhausted the host stack") from None


def _eval(expr: Expr, env: Env, ctx: EvalContext) -> Value:
    if isinstance(expr, Lit):
        return expr.value
    if isinstance(expr, Var):
        name = expr.name
        if name in env:
            return env[name]
        if ctx.program.ctor_arity.get(name) == 0:
            return DataVal(name)
        raise UnboundVariableError(f"unbound variable {name}", expr.pos)
    if isinstance(expr, ThisExpr):
        if "this" in env:
            return env["this"]
        raise UnboundVariableError("this is not bound here", expr.pos)
    if isinstance(expr, NowExpr):
        return mk_time(ctx.clock)
    if isinstance(expr, DeadlineExpr):
        if "deadline" in env:
            return env["deadline"]
        raise UnboundVariableError("deadline is not bound here", expr.pos)
    if isinstance(expr, DestinyExpr):
        if "destiny" in env:
            return env["destiny"]
        raise UnboundVariableError("destiny is not bound here", expr.pos)
    if isinstance(expr, Unary):
        operand = _eval(expr.operand, env, ctx)
        if expr.op == "!":
            if isinstance(operand, BoolVal):
                return FALSE if operand.value else TRUE
            raise EvalTypeError(f"! applied to {render_value(operand)}", expr.pos)
        if isinstance(operand, NumVal):
            return NumVal(-operand.value)
        raise EvalTypeError(f"- applied to {render_value(operand)}", expr.pos)
    if isinstance(expr, BinOp):
        return _eval_binop(expr, env, ctx)
    if isinstance(expr, Apply):
        return _eval_apply(expr, env, ctx)
    if isinstance(expr, IfExpr):
        cond = _eval(expr.cond, env, ctx)
        if not isinstance(cond, BoolVal):
            raise EvalTypeError(
                f"if condition is {render_value(cond)}, not a Bool", expr.pos)
        return _eval(expr.then if cond.value else expr.els, env, ctx)
    if isinstance(expr, CaseExpr):
        scrutinee = _eval(expr.scrutinee, env, ctx)
        for branch in expr.branches:
            bindings = match_pattern(branch.pattern, scrutinee, ctx.program)
            if bindings is not None:
                return _eval(branch.body, ChainMap(bindings, env), ctx)
        raise MatchFailureError(
            f"no branch matches {render_value(scrutinee)}", expr.pos)
    raise EvalTypeError(f"cannot evaluate {expr!r}", getattr(expr, "pos", None))


def _eval_apply(expr: Apply, env: Env, ctx: EvalContext) -> Value:
    args = [_eval(a, env, ctx) for a in expr.args]
    fd = ctx.program.functions.get(expr.name)
    if fd is not None:
        if len(args) != len(fd.params):
            raise EvalTypeError(
                f"{expr.name} expects {len(fd.params)} argument(s), "
                f"got {len(args)}", expr.pos)
        if ctx.depth >= ctx.max_depth:
            raise CallDepthError(
                f"call depth exceeded {ctx.max_depth} in {expr.name}", expr.pos)
        ctx.depth += 1
        try:
            scope = {name: val for (_, name), val in zip(fd.params, args)}
            return _eval(fd.body, scope, ctx)
        finally:
            ctx.depth -= 1
    arity = ctx.program.ctor_arity.get(expr.name)
    if arity is not None:
        if arity != len(args):
            raise EvalTypeError(
                f"constructor {expr.name} expects {arity} argument(s), "
                f"got {len(args)}", expr.pos)
        return DataVal(expr.name, tuple(args))
    raise UnboundVariableError(
        f"unknown function or constructor {expr.name}", expr.pos)


def _as_num(v: Value, op: str, pos) -> Fraction:
    if isinstance(v, NumVal):
        return v.value
    raise EvalTypeError(f"{op} applied to {render_value(v)}", pos)


def _is_time(v: Value) -> bool:
    return isinstance(v, DataVal) and v.ctor == "Time" and len(v.args) == 1


def _eval_binop(expr: BinOp, env: Env, ctx: EvalContext) -> Value:
    op = expr.op
    if op in ("&&", "||"):
        left = _eval(expr.left, env, ctx)
        if not isinstance(left, BoolVal):
            raise EvalTypeError(f"{op} applied to {render_value(left)}", expr.pos)
        if op == "&&" and not left.value:
            return FALSE
        if op == "||" and left.value:
            return TRUE
        right = _eval(expr.right, env, ctx)
        if not isinstance(right, BoolVal):
            raise EvalTypeError(f"{op} applied to {render_value(right)}", expr.pos)
        return right
    left = _eval(expr.left, env, ctx)
    right = _eval(expr.right, env, ctx)
    if op == "==":
        return TRUE if left == right else FALSE
    if op == "!=":
        return TRUE if left != right else FALSE
    if op in ("<", "<=", ">", ">="):
        if isinstance(left, NumVal) and isinstance(right, NumVal):
            a, b = left.value, right.value
        elif isinstance(left, StrVal) and isinstance(right, StrVal):
            a, b = left.value, right.value
        elif _is_time(left) and _is_time(right):
            a, b = left.args[0].value, right.args[0].value
        else:
            raise EvalTypeError(
                f"{op} applied to {render_value(left)} and "
                f"{render_value(right)}", expr.pos)
        result = {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[op]
        return TRUE if result else FALSE
    if op == "+":
        if isinstance(left, NumVal) and isinstance(right, NumVal):
            return NumVal(left.value + right.value)
        if isinstance(left, StrVal) and isinstance(right, StrVal):
            return StrVal(left.value + right.value)
        raise EvalTypeError(
            f"+ applied to {render_value(left)} and {render_value(right)}",
            expr.pos)
    if op == "-":
        if _is_time(left) and _is_time(right):
            # Time subtraction yields a Duration
            return mk_duration(left.args[0].value - right.args[0].value)
        return NumVal(_as_num(left, op, expr.pos) - _as_num(right, op, expr.pos))
    if op == "*":
        return NumVal(_as_num(left, op, expr.pos) * _as_num(right, op, expr.pos))
    if op == "/":
        denominator = _as_num(right, op, expr.pos)
        if denominator == 0:
            raise DivisionByZeroError("division by zero", expr.pos)
        return NumVal(_as_num(left, op, expr.pos) / denominator)
    raise EvalTypeError(f"unknown operator {op}", expr.pos)


def match_pattern(pat: Pattern, value: Value,
                  program: Program) -> dict[str, Value] | None:
    if isinstance(pat, PWildcard):
        return {}
    if isinstance(pat, PLit):
        return {} if pat.value == value else None
    if isinstance(pat, PName):
        if program.ctor_arity.get(pat.name) == 0:
            return {} if value == DataVal(pat.name) else None
        return {pat.name: value}
    if isinstance(pat, PCtor):
        if not isinstance(value, DataVal) or value.ctor != pat.name:
            return None
        if len(pat.args) != len(value.args):
            return None
        bindings: dict[str, Value] = {}
        for sub, arg in zip(pat.args, value.args):
            inner = match_pattern(sub, arg, program)
            if inner is None:
                return None
            bindings.update(inner)
        return bindings
    raise EvalTypeError(f"cannot match {pat!r}")


def eval_guard(guard: Guard | RtGuard, env: Env, ctx: EvalContext) -> bool:
    """Reduce a guard to a boolean.  Handles both source guards (duration
    bounds still expressions) and runtime guards (bounds sampled)."""
    if isinstance(guard, (GBool, RBool)):
        value = eval_expr(guard.expr, env, ctx)
        if not isinstance(value, BoolVal):
            raise EvalTypeError(
                f"guard is {render_value(value)}, not a Bool",
                getattr(guard, "pos", None))
        return value.value
    if isinstance(guard, (GFut, RFut)):
        if guard.var not in env:
            raise UnboundVariableError(f"unbound variable {guard.var}",
                                       getattr(guard, "pos", None))
        value = env[guard.var]
        if not isinstance(value, FutRef):
            raise EvalTypeError(
                f"{guard.var}? applied to {render_value(value)}, not a future",
                getattr(guard, "pos", None))
        return ctx.is_resolved(value.fid)
    if isinstance(guard, GDuration):
        best = eval_expr(guard.best, env, ctx)
        return _as_num(best, "duration", guard.pos) <= 0
    if isinstance(guard, RDur):
        return guard.best <= 0
    if isinstance(guard, (GConj, RConj)):
        return eval_guard(guard.left, env, ctx) and eval_guard(guard.right, env, ctx)
    raise EvalTypeError(f"cannot evaluate guard {guard!r}")
