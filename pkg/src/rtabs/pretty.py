"""Source rendering of syntax trees.

parse(render(model)) equals model structurally, which the test suite
relies on.  Runtime forms render in a readable bracketed style for
error and deadlock reports; they have no source syntax.
"""

from __future__ import annotations

from .nodes import (
    Apply, BinOp, CallAnnots, CaseExpr, ClassDecl, DataDecl, DeadlineExpr,
    DestinyExpr, Expr, FuncDecl, GBool, GConj, GDuration, GFut, Guard,
    IfExpr, InterfaceDecl, Lit, MethodDecl, Model, NowExpr, PCtor, PLit,
    PName, Pattern, PWildcard, RBool, RCall, RConj, RDur, RExpr, RFut,
    RGet, RNew, RSyncCall, Rhs, RtGuard, SAssign, SAwait, SAwaitCall,
    SAwaitReady, SCallStmt, SDuration, SDuration2, SIf, SReturn, SSkip,
    SSuspend, SWhile, Stmt, ThisExpr, TypeAst, Unary, Var,
)
from .values import format_rat, render_value

_PRECEDENCE = {
    "||": 1, "&&": 2,
    "==": 3, "!=": 3, "<": 3, "<=": 3, ">": 3, ">=": 3,
    "+": 4, "-": 4,
    "*": 5, "/": 5,
}


def render_type(ty: TypeAst) -> str:
    return str(ty)


def render_expr(expr: Expr, parent_prec: int = 0) -> str:
    if isinstance(expr, Lit):
        return render_value(expr.value)
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, ThisExpr):
        return "this"
    if isinstance(expr, NowExpr):
        return "now"
    if isinstance(expr, DeadlineExpr):
        return "deadline"
    if isinstance(expr, DestinyExpr):
        return "destiny"
    if isinstance(expr, Unary):
        return expr.op + render_expr(expr.operand, 6)
    if isinstance(expr, BinOp):
        prec = _PRECEDENCE[expr.op]
        text = (render_expr(expr.left, prec) + " " + expr.op + " "
                + render_expr(expr.right, prec + 1))
        if prec < parent_prec:
            return "(" + text + ")"
        return text
    if isinstance(expr, Apply):
        return expr.name + "(" + ", ".join(render_expr(a) for a in expr.args) + ")"
    if isinstance(expr, IfExpr):
        text = (f"if {render_expr(expr.cond)} then {render_expr(expr.then)} "
                f"else {render_expr(expr.els)}")
        if parent_prec > 0:
            return "(" + text + ")"
        return text
    if isinstance(expr, CaseExpr):
        branches = " ".join(
            f"{render_pattern(b.pattern)} => {render_expr(b.body)};"
            for b in expr.branches)
        return f"case {render_expr(expr.scrutinee)} {{ {branches} }}"
    raise TypeError(f"cannot render {expr!r}")


def render_pattern(pat: Pattern) -> str:
    if isinstance(pat, PWildcard):
        return "_"
    if isinstance(pat, PLit):
        return render_value(pat.value)
    if isinstance(pat, PName):
        return pat.name
    if isinstance(pat, PCtor):
        return pat.name + "(" + ", ".join(render_pattern(a) for a in pat.args) + ")"
    raise TypeError(f"cannot render {pat!r}")


def render_guard(guard: Guard | RtGuard) -> str:
    if isinstance(guard, GBool):
        return render_expr(guard.expr)
    if isinstance(guard, GFut):
        return guard.var + "?"
    if isinstance(guard, GDuration):
        return f"duration({render_expr(guard.best)}, {render_expr(guard.worst)})"
    if isinstance(guard, GConj):
        return render_guard(guard.left) + " && " + render_guard(guard.right)
    if isinstance(guard, RBool):
        return render_expr(guard.expr)
    if isinstance(guard, RFut):
        return guard.var + "?"
    if isinstance(guard, RDur):
        return f"duration[{format_rat(guard.best)}, {format_rat(guard.worst)}]"
    if isinstance(guard, RConj):
        return render_guard(guard.left) + " && " + render_guard(guard.right)
    raise TypeError(f"cannot render {guard!r}")


def _render_call_annots(annots: CallAnnots) -> str:
    parts = []
    if annots.deadline is not None:
        parts.append(f"Deadline: {render_expr(annots.deadline)}")
    if annots.critical is not None:
        parts.append(f"Critical: {render_expr(annots.critical)}")
    if parts:
        return "[" + ", ".join(parts) + "] "
    return ""


def _render_rhs(rhs: Rhs) -> str:
    if isinstance(rhs, RExpr):
        return render_expr(rhs.expr)
    if isinstance(rhs, RNew):
        args = ", ".join(render_expr(a) for a in rhs.args)
        return f"new {rhs.cls}({args})"
    if isinstance(rhs, (RCall, RSyncCall)):
        sep = "!" if isinstance(rhs, RCall) else "."
        args = ", ".join(render_expr(a) for a in rhs.args)
        return f"{render_expr(rhs.callee)}{sep}{rhs.method}({args})"
    if isinstance(rhs, RGet):
        return render_expr(rhs.expr) + ".get"
    raise TypeError(f"cannot render {rhs!r}")


def render_stmt(stmt: Stmt, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(stmt, SSkip):
        return pad + "skip;"
    if isinstance(stmt, SAssign):
        head = ""
        if isinstance(stmt.rhs, RNew) and stmt.rhs.scheduler is not None:
            head = f"[Scheduler: {render_expr(stmt.rhs.scheduler)}] "
        elif isinstance(stmt.rhs, (RCall, RSyncCall)):
            head = _render_call_annots(stmt.rhs.annots)
        decl = f"{render_type(stmt.decl_type)} " if stmt.decl_type else ""
        if stmt.rhs is None:
            return f"{pad}{head}{decl}{stmt.name};"
        return f"{pad}{head}{decl}{stmt.name} = {_render_rhs(stmt.rhs)};"
    if isinstance(stmt, SIf):
        out = f"{pad}if {render_expr(stmt.cond)} {render_block(stmt.then, indent)}"
        if stmt.els:
            out += f" else {render_block(stmt.els, indent)}"
        return out
    if isinstance(stmt, SWhile):
        return f"{pad}while {render_expr(stmt.cond)} {render_block(stmt.body, indent)}"
    if isinstance(stmt, SReturn):
        return f"{pad}return {render_expr(stmt.expr)};"
    if isinstance(stmt, SSuspend):
        return pad + "suspend;"
    if isinstance(stmt, SAwait):
        return f"{pad}await {render_guard(stmt.guard)};"
    if isinstance(stmt, SAwaitCall):
        decl = f"{render_type(stmt.decl_type)} " if stmt.decl_type else ""
        args = ", ".join(render_expr(a) for a in stmt.args)
        annots = _render_call_annots(stmt.annots)
        return (f"{pad}{annots}await {decl}{stmt.name} = "
                f"{render_expr(stmt.callee)}.{stmt.method}({args});")
    if isinstance(stmt, SCallStmt):
        args = ", ".join(render_expr(a) for a in stmt.args)
        annots = _render_call_annots(stmt.annots)
        return f"{pad}{annots}{render_expr(stmt.callee)}!{stmt.method}({args});"
    if isinstance(stmt, SDuration):
        return f"{pad}duration({render_expr(stmt.best)}, {render_expr(stmt.worst)});"
    if isinstance(stmt, SDuration2):
        return f"{pad}duration[{format_rat(stmt.best)}, {format_rat(stmt.worst)}];"
    if isinstance(stmt, SAwaitReady):
        return f"{pad}await {render_guard(stmt.guard)};"
    raise TypeError(f"cannot render {stmt!r}")


def render_block(stmts: list[Stmt], indent: int = 0) -> str:
    if not stmts:
        return "{ }"
    inner = "\n".join(render_stmt(s, indent + 1) for s in stmts)
    return "{\n" + inner + "\n" + "  " * indent + "}"


def _render_params(params: list[tuple[TypeAst, str]]) -> str:
    return ", ".join(f"{render_type(t)} {n}" for t, n in params)


def render_model(model: Model) -> str:
    parts: list[str] = []
    for dd in model.datatypes:
        head = f"data {dd.name}"
        if dd.typarams:
            head += "<" + ", ".join(dd.typarams) + ">"
        if dd.ctors:
            ctors = []
            for ctor in dd.ctors:
                if ctor.arg_types:
                    ctors.append(ctor.name + "("
                                 + ", ".join(render_type(t) for t in ctor.arg_types)
                                 + ")")
                else:
                    ctors.append(ctor.name)
            head += " = " + " | ".join(ctors)
        parts.append(head + ";")
    for fd in model.functions:
        head = f"def {render_type(fd.ret)} {fd.name}"
        if fd.typarams:
            head += "<" + ", ".join(fd.typarams) + ">"
        parts.append(f"{head}({_render_params(fd.params)}) = {render_expr(fd.body)};")
    for idecl in model.interfaces:
        sigs = "\n".join(
            f"  {render_type(s.ret)} {s.name}({_render_params(s.params)});"
            for s in idecl.sigs)
        body = f"\n{sigs}\n" if sigs else " "
        parts.append(f"interface {idecl.name} {{{body}}}")
    for cd in model.classes:
        lines: list[str] = []
        for name, expr in cd.annots:
            lines.append(f"[{name}: {render_expr(expr)}]")
        head = f"class {cd.name}"
        if cd.params:
            head += f"({_render_params(cd.params)})"
        if cd.interfaces:
            head += " implements " + ", ".join(cd.interfaces)
        lines.append(head + " {")
        for fld in cd.fields:
            init = f" = {render_expr(fld.init)}" if fld.init is not None else ""
            lines.append(f"  {render_type(fld.type)} {fld.name}{init};")
        for mth in cd.methods:
            for name, expr in mth.annots:
                lines.append(f"  [{name}: {render_expr(expr)}]")
            lines.append(f"  {render_type(mth.ret)} {mth.name}"
                         f"({_render_params(mth.params)}) "
                         + render_block(mth.body, 1))
        lines.append("}")
        parts.append("\n".join(lines))
    if model.main is not None:
        parts.append(render_block(model.main, 0))
    return "\n\n".join(parts) + "\n"
