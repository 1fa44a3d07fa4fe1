"""Source-to-core lowering.

After this pass:
- synchronous calls, await-calls and fire-and-forget calls are
  expressed with async call + await + get on `$n` temporaries (the
  lexer rejects `$` in identifiers, so these never collide);
- every async call carries explicit Deadline/Critical expressions
  (defaults InfDuration / False);
- every method has a cost expression (default Duration(0));
- every new-object statement carries a scheduler expression, resolved
  from its own annotation, the class annotation, or default(queue);
- every method body and the main block end in an explicit return
  (Unit), so futures always resolve;
- each class gets a synthesized init process body: field initializers,
  the user's init code if any, then an async self-call to run if
  defined.  The user's `init` leaves the method table; it only ever
  runs as the creation process.

The pass is idempotent: desugar(desugar(m)) == desugar(m).
"""

from __future__ import annotations

from dataclasses import dataclass

from .nodes import (
    Apply, CallAnnots, ClassDecl, Expr, GFut, Lit, MethodDecl, Model,
    RCall, RExpr, RGet, RNew, RSyncCall, SAssign, SAwait, SAwaitCall,
    SCallStmt, SIf, SReturn, SWhile, Stmt, ThisExpr, TypeAst, Var,
)
from .values import FALSE, INF_DURATION, UNIT, mk_duration

DEFAULT_POLICY_SOURCE = "default(queue)"


def default_policy() -> Expr:
    return Apply("default", [Var("queue")])


def _fut_type() -> TypeAst:
    return TypeAst("Fut", [TypeAst("Unit", [])])


@dataclass
class _Fresh:
    counter: int = 0

    def name(self) -> str:
        name = f"$t{self.counter}"
        self.counter += 1
        return name


def desugar(model: Model) -> Model:
    fresh = _Fresh()
    classes = [_desugar_class(cd, fresh) for cd in model.classes]
    main = None
    if model.main is not None:
        main = _terminate(_desugar_stmts(model.main, fresh))
    out = Model(model.datatypes, model.functions, model.interfaces,
                classes, main, pos=model.pos)
    _resolve_new_schedulers(out)
    return out


def _desugar_class(cd: ClassDecl, fresh: _Fresh) -> ClassDecl:
    scheduler = cd.scheduler
    if scheduler is None:
        for name, expr in cd.annots:
            if name == "Scheduler":
                scheduler = expr
                break
    methods = [_desugar_method(m, fresh) for m in cd.methods if m.name != "init"]
    init_body = cd.init_body
    if init_body is None:
        user_init = next((m for m in cd.methods if m.name == "init"), None)
        init_body = _build_init_body(cd, user_init, methods, fresh)
    return ClassDecl(cd.name, cd.params, cd.interfaces, cd.fields, methods,
                     scheduler=scheduler, annots=cd.annots,
                     init_body=init_body, pos=cd.pos)


def _desugar_method(mth: MethodDecl, fresh: _Fresh) -> MethodDecl:
    cost = mth.cost
    if cost is None:
        for name, expr in mth.annots:
            if name == "Cost":
                cost = expr
                break
    if cost is None:
        cost = Lit(mk_duration(0))
    body = _terminate(_desugar_stmts(mth.body, fresh))
    return MethodDecl(mth.ret, mth.name, mth.params, body, cost=cost,
                      annots=mth.annots, pos=mth.pos)


def _build_init_body(cd: ClassDecl, user_init: MethodDecl | None,
                     methods: list[MethodDecl], fresh: _Fresh) -> list[Stmt] | None:
    stmts: list[Stmt] = []
    for fld in cd.fields:
        if fld.init is not None:
            stmts.append(SAssign(None, fld.name, RExpr(fld.init)))
    if user_init is not None:
        init_stmts = _desugar_stmts(user_init.body, fresh)
        # drop a trailing explicit return so the run self-call still fires
        if init_stmts and isinstance(init_stmts[-1], SReturn):
            init_stmts = init_stmts[:-1]
        stmts.extend(init_stmts)
    if any(m.name == "run" for m in methods):
        call = RCall(ThisExpr(), "run", [], annots=_full_annots(CallAnnots()))
        stmts.append(SAssign(_fut_type(), fresh.name(), call))
    if not stmts:
        return None
    stmts.append(SReturn(Lit(UNIT)))
    return stmts


def _terminate(stmts: list[Stmt]) -> list[Stmt]:
    if stmts and isinstance(stmts[-1], SReturn):
        return stmts
    return stmts + [SReturn(Lit(UNIT))]


def _full_annots(annots: CallAnnots) -> CallAnnots:
    deadline = annots.deadline if annots.deadline is not None else Lit(INF_DURATION)
    critical = annots.critical if annots.critical is not None else Lit(FALSE)
    return CallAnnots(deadline=deadline, critical=critical)


def _desugar_stmts(stmts: list[Stmt], fresh: _Fresh) -> list[Stmt]:
    out: list[Stmt] = []
    for stmt in stmts:
        out.extend(_desugar_stmt(stmt, fresh))
    return out


def _desugar_stmt(stmt: Stmt, fresh: _Fresh) -> list[Stmt]:
    if isinstance(stmt, SAssign):
        rhs = stmt.rhs
        if isinstance(rhs, RSyncCall):
            tmp = fresh.name()
            call = RCall(rhs.callee, rhs.method, rhs.args,
                         annots=_full_annots(rhs.annots), pos=rhs.pos)
            return [SAssign(_fut_type(), tmp, call, pos=stmt.pos),
                    SAssign(stmt.decl_type, stmt.name, RGet(Var(tmp)), pos=stmt.pos)]
        if isinstance(rhs, RCall):
            lowered = RCall(rhs.callee, rhs.method, rhs.args,
                            annots=_full_annots(rhs.annots), pos=rhs.pos)
            return [SAssign(stmt.decl_type, stmt.name, lowered, pos=stmt.pos)]
        return [stmt]
    if isinstance(stmt, SAwaitCall):
        tmp = fresh.name()
        call = RCall(stmt.callee, stmt.method, stmt.args,
                     annots=_full_annots(stmt.annots), pos=stmt.pos)
        return [SAssign(_fut_type(), tmp, call, pos=stmt.pos),
                SAwait(GFut(tmp), pos=stmt.pos),
                SAssign(stmt.decl_type, stmt.name, RGet(Var(tmp)), pos=stmt.pos)]
    if isinstance(stmt, SCallStmt):
        call = RCall(stmt.callee, stmt.method, stmt.args,
                     annots=_full_annots(stmt.annots), pos=stmt.pos)
        return [SAssign(_fut_type(), fresh.name(), call, pos=stmt.pos)]
    if isinstance(stmt, SIf):
        return [SIf(stmt.cond, _desugar_stmts(stmt.then, fresh),
                    _desugar_stmts(stmt.els, fresh), pos=stmt.pos)]
    if isinstance(stmt, SWhile):
        return [SWhile(stmt.cond, _desugar_stmts(stmt.body, fresh), pos=stmt.pos)]
    return [stmt]


def _resolve_new_schedulers(model: Model) -> None:
    classes = {cd.name: cd for cd in model.classes}

    def walk(stmts: list[Stmt]) -> None:
        for stmt in stmts:
            if isinstance(stmt, SAssign) and isinstance(stmt.rhs, RNew):
                rhs = stmt.rhs
                if rhs.scheduler is None:
                    cd = classes.get(rhs.cls)
                    if cd is not None and cd.scheduler is not None:
                        rhs.scheduler = cd.scheduler
                    else:
                        rhs.scheduler = default_policy()
            elif isinstance(stmt, SIf):
                walk(stmt.then)
                walk(stmt.els)
            elif isinstance(stmt, SWhile):
                walk(stmt.body)

    for cd in model.classes:
        for mth in cd.methods:
            walk(mth.body)
        if cd.init_body is not None:
            walk(cd.init_body)
    if model.main is not None:
        walk(model.main)
