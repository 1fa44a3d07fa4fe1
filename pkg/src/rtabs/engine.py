"""Timed simulation engine for concurrent object models.

A Configuration holds concurrent objects (each with at most one active
process and a queue of suspended/pending ones), undelivered invocation
messages, futures, and the global clock.  Execution alternates two
phases: apply instantaneous rules until quiescence, then advance the
clock by the maximum time elapse (mte) and decrement every live
deadline and pending duration by exactly that amount.

Rule choice is determinized for reproducibility: objects are visited in
creation order; per visit, pending activations are bound first, then
one rule for the active process, else a scheduling decision.  Any run
produced this way is one of the legal interleavings of the underlying
nondeterministic semantics.

Scheduling decisions call back into the modeled language: the object's
policy expression is evaluated with `queue` bound to the reflected list
of ready processes, and must return one of them.
"""

from __future__ import annotations

import random
from collections import ChainMap
from dataclasses import dataclass, field
from fractions import Fraction

from .desugar import default_policy
from .errors import (
    EvalTypeError, PolicyError, RtRuntimeError, UnboundVariableError,
    UnknownMethodError,
)
from .evaluator import EvalContext, Program, eval_expr, eval_guard
from .nodes import (
    Expr, GBool, GConj, GDuration, GFut, Guard, Lit, Model, RBool, RCall,
    RConj, RDur, RExpr, RFut, RGet, RNew, RtGuard, SAssign, SAwait,
    SAwaitReady, SDuration, SDuration2, SIf, SReturn, SSkip, SSuspend,
    SWhile, Stmt, TypeAst,
)
from .pretty import render_expr, render_guard, render_stmt
from .trace import Trace, TraceEvent
from .values import (
    FALSE, INF_DURATION, NULL, BoolVal, DataVal, FutRef, NumVal,
    ObjRef, StrVal, Value, duration_rat, format_rat, is_duration,
    is_inf_duration, mk_duration, mk_list, mk_time, num, render_duration_field,
    render_value,
)

MAIN_CLASS = "<main>"

DURATION_POLICIES = ("worst", "best", "uniform")

# the nine reserved process locals, in reflection order
PROC_FIELDS = ("destiny", "method", "arrival", "cost", "deadline",
               "start", "finish", "critical", "value")


@dataclass
class ProcessRecord:
    pid: int
    oid: int
    method: str
    locals: dict[str, Value]
    body: list[Stmt]
    dispatched: bool = False
    label: str | None = None


@dataclass
class ObjectState:
    oid: int
    cls: str
    policy: Expr
    attrs: dict[str, Value]
    active: ProcessRecord | None = None
    queue: list[ProcessRecord] = field(default_factory=list)

    def processes(self) -> list[ProcessRecord]:
        out = [self.active] if self.active is not None else []
        return out + list(self.queue)


@dataclass
class InvocationMessage:
    method: str
    callee: int
    args: tuple[Value, ...]
    fid: int
    deadline: Value
    critical: Value
    timestamp: Fraction


@dataclass
class FutureCell:
    fid: int
    resolved: bool = False
    value: Value | None = None

    def resolve(self, value: Value) -> None:
        assert not self.resolved, f"future f{self.fid} resolved twice"
        self.resolved = True
        self.value = value


@dataclass
class Configuration:
    objects: dict[int, ObjectState] = field(default_factory=dict)
    messages: list[InvocationMessage] = field(default_factory=list)
    futures: dict[int, FutureCell] = field(default_factory=dict)
    clock: Fraction = Fraction(0)


@dataclass
class RunResult:
    status: str  # finished | time_limit | deadlock | error | step_limit
    trace: Trace
    clock: Fraction
    steps: int
    error: RtRuntimeError | None = None
    blocked: list[str] = field(default_factory=list)


# ------------------------------------------------------- process reflection


def lift(p: ProcessRecord) -> DataVal:
    """Project a process's reserved locals into a Proc value."""
    return DataVal("Proc", tuple(p.locals[name] for name in PROC_FIELDS))


def liftall(processes: list[ProcessRecord]) -> Value:
    return mk_list([lift(p) for p in processes])


def select(pid_value: Value, processes: list[ProcessRecord]) -> ProcessRecord | None:
    """Find the process whose identity matches a reflected pid; None on miss."""
    for p in processes:
        if p.locals["destiny"] == pid_value:
            return p
    return None


# ------------------------------------------------------------ time machinery
#
# mte answers "how far may the clock advance without skipping an enabled
# event"; adv performs the advance.  Both require await guards in head
# position to be in their sampled runtime form already (the engine fixes
# them before consulting either).

_INF = None  # infinity marker for raw mte arithmetic


def _min_d(a: Fraction | None, b: Fraction | None) -> Fraction | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _max_d(a: Fraction | None, b: Fraction | None) -> Fraction | None:
    if a is None or b is None:
        return _INF
    return max(a, b)


def _guard_mte(guard: RtGuard, env, ctx: EvalContext) -> Fraction | None:
    if isinstance(guard, RConj):
        return _max_d(_guard_mte(guard.left, env, ctx),
                      _guard_mte(guard.right, env, ctx))
    if isinstance(guard, RDur):
        return Fraction(0) if guard.best <= 0 else guard.worst
    return Fraction(0) if eval_guard(guard, env, ctx) else _INF


def _process_mte(p: ProcessRecord, obj: ObjectState, ctx: EvalContext) -> Fraction | None:
    head = p.body[0]
    env = ChainMap(p.locals, obj.attrs)
    if isinstance(head, SDuration2):
        return Fraction(0) if head.best <= 0 else head.worst
    if isinstance(head, SAwaitReady):
        return _guard_mte(head.guard, env, ctx)
    if isinstance(head, SAwait):
        raise AssertionError("mte on an unsampled await guard")
    if isinstance(head, SAssign) and isinstance(head.rhs, RGet):
        fut = eval_expr(head.rhs.expr, env, ctx)
        if isinstance(fut, FutRef) and not ctx.is_resolved(fut.fid):
            return _INF
    return Fraction(0)  # head enabled


def _object_mte(obj: ObjectState, ctx: EvalContext) -> Fraction | None:
    if obj.active is not None:
        return _process_mte(obj.active, obj, ctx)
    out: Fraction | None = _INF
    for p in obj.queue:
        out = _min_d(out, _process_mte(p, obj, ctx))
    return out


def mte_raw(config: Configuration, program: Program) -> Fraction | None:
    ctx = EvalContext(program, config.clock,
                      is_resolved=lambda fid: config.futures[fid].resolved)
    out: Fraction | None = _INF
    for obj in config.objects.values():
        out = _min_d(out, _object_mte(obj, ctx))
    return out


def mte(config: Configuration, program: Program) -> Value:
    raw = mte_raw(config, program)
    return INF_DURATION if raw is None else mk_duration(raw)


def _adv_guard(guard: RtGuard, delta: Fraction) -> RtGuard:
    if isinstance(guard, RConj):
        return RConj(_adv_guard(guard.left, delta), _adv_guard(guard.right, delta))
    if isinstance(guard, RDur):
        return RDur(guard.best - delta, guard.worst - delta)
    return guard


def adv(config: Configuration, delta: Fraction) -> None:
    """Advance the clock by delta, decrementing every live deadline and
    every pending duration; all other terms are left unchanged."""
    config.clock += delta
    for obj in config.objects.values():
        for p in obj.processes():
            d = p.locals["deadline"]
            if not is_inf_duration(d):
                p.locals["deadline"] = mk_duration(duration_rat(d) - delta)
            head = p.body[0] if p.body else None
            if isinstance(head, SDuration2):
                p.body[0] = SDuration2(head.best - delta, head.worst - delta)
            elif isinstance(head, SAwaitReady):
                p.body[0] = SAwaitReady(_adv_guard(head.guard, delta))


# ------------------------------------------------------------------- engine


class Engine:
    """Deterministic interpreter for a checked, desugared model."""

    def __init__(self, model: Model, seed: int = 0,
                 duration_policy: str = "worst", trace: Trace | None = None):
        if duration_policy not in DURATION_POLICIES:
            raise ValueError(f"unknown duration policy {duration_policy!r}")
        self.model = model
        self.program = Program.from_model(model)
        self.rng = random.Random(seed)
        self.duration_policy = duration_policy
        self.trace = trace if trace is not None else Trace()
        self.config = Configuration()
        self.booted = False
        self._next_oid = 0
        self._next_fid = 0

    # ------------------------------------------------------------- plumbing

    def _fresh_oid(self) -> int:
        oid = self._next_oid
        self._next_oid += 1
        return oid

    def _fresh_fid(self) -> int:
        fid = self._next_fid
        self._next_fid += 1
        self.config.futures[fid] = FutureCell(fid)
        return fid

    def _ctx(self) -> EvalContext:
        return EvalContext(self.program, self.config.clock,
                           is_resolved=lambda fid: self.config.futures[fid].resolved)

    def _emit(self, kind: str, obj: int | None = None, pid: int | None = None,
              method: str | None = None, data: tuple = ()) -> None:
        self.trace.append(TraceEvent(self.config.clock, kind, obj, pid,
                                     method, tuple(data)))

    def _sample(self, best: Fraction, worst: Fraction) -> Fraction:
        if self.duration_policy == "worst":
            return worst
        if self.duration_policy == "best":
            return best
        return best + (worst - best) * Fraction(self.rng.randint(0, 1000), 1000)

    # ----------------------------------------------------------------- boot

    def boot(self) -> None:
        """Install the synthetic main object and its main-block process."""
        assert not self.booted
        self.booted = True
        oid = self._fresh_oid()
        obj = ObjectState(oid, MAIN_CLASS, default_policy(),
                          {"this": ObjRef(oid)})
        self.config.objects[oid] = obj
        self._emit("new_object", obj=oid, data=(("class", MAIN_CLASS),))
        if self.model.main is None:
            return
        fid = self._fresh_fid()
        p = ProcessRecord(
            pid=fid, oid=oid, method="main",
            locals=self._reserved_locals(fid, "main", INF_DURATION, FALSE,
                                         mk_duration(0)),
            body=list(self.model.main), dispatched=True)
        p.locals["start"] = mk_time(self.config.clock)
        obj.active = p
        self._emit("activate", obj=oid, pid=fid, method="main",
                   data=(("deadline", "inf"), ("cost", "0"),
                         ("critical", "False")))
        self._emit("schedule", obj=oid, pid=fid, method="main",
                   data=(("deadline", "inf"),))

    def _reserved_locals(self, fid: int, method: str, deadline: Value,
                         critical: Value, cost: Value) -> dict[str, Value]:
        return {
            "destiny": FutRef(fid),
            "method": StrVal(method),
            "arrival": mk_time(self.config.clock),
            "cost": cost,
            "deadline": deadline,
            "start": mk_time(0),
            "finish": mk_time(0),
            "critical": critical,
            "value": num(0),
        }

    # ------------------------------------------------------- guard sampling

    def _fix_guard(self, guard: Guard, env, ctx: EvalContext) -> RtGuard:
        if isinstance(guard, GConj):
            return RConj(self._fix_guard(guard.left, env, ctx),
                         self._fix_guard(guard.right, env, ctx))
        if isinstance(guard, GDuration):
            best = self._bound_rat(eval_expr(guard.best, env, ctx), guard.pos)
            worst = self._bound_rat(eval_expr(guard.worst, env, ctx), guard.pos)
            self._check_bounds(best, worst, guard.pos)
            delta = self._sample(best, worst)
            return RDur(delta, delta)
        if isinstance(guard, GFut):
            return RFut(guard.var)
        if isinstance(guard, GBool):
            return RBool(guard.expr)
        raise AssertionError(f"unexpected guard {guard!r}")

    def _bound_rat(self, v: Value, pos) -> Fraction:
        if isinstance(v, NumVal):
            return v.value
        if is_duration(v) and not is_inf_duration(v):
            return duration_rat(v)
        raise EvalTypeError(
            f"duration bound is {render_value(v)}, not a finite number", pos)

    def _check_bounds(self, best: Fraction, worst: Fraction, pos) -> None:
        if best < 0 or worst < best:
            raise RtRuntimeError(
                f"malformed duration bounds ({format_rat(best)}, "
                f"{format_rat(worst)})", pos)

    def _fix_head(self, p: ProcessRecord, obj: ObjectState) -> None:
        if p.body and isinstance(p.body[0], SAwait):
            env = ChainMap(p.locals, obj.attrs)
            p.body[0] = SAwaitReady(
                self._fix_guard(p.body[0].guard, env, self._ctx()))

    def _fix_all_heads(self) -> None:
        for obj in self.config.objects.values():
            for p in obj.processes():
                self._fix_head(p, obj)

    # -------------------------------------------------------- instantaneous

    def exec_step(self) -> str | None:
        """Apply one instantaneous rule; None when quiescent."""
        for oid, obj in self.config.objects.items():
            try:
                rule = self._visit_object(oid, obj)
            except RtRuntimeError as err:
                if err.obj is None:
                    err.obj = oid
                if err.pid is None and obj.active is not None:
                    err.pid = obj.active.pid
                if err.stmt is None and obj.active is not None and obj.active.body:
                    err.stmt = render_stmt(obj.active.body[0]).strip()
                raise
            if rule is not None:
                return rule
        return None

    def _visit_object(self, oid: int, obj: ObjectState) -> str | None:
        for i, msg in enumerate(self.config.messages):
            if msg.callee == oid:
                del self.config.messages[i]
                self._bind_and_enqueue(obj, msg)
                return "activation"
        if obj.active is not None:
            return self._step_active(obj)
        if obj.queue and self._try_schedule(obj):
            return "schedule"
        return None

    # --- Activation

    def bind_activation(self, msg: InvocationMessage) -> ProcessRecord:
        """Turn an invocation message into a queued process."""
        obj = self.config.objects[msg.callee]
        cd = self.program.classes.get(obj.cls)
        if cd is None:
            raise UnknownMethodError(f"object o{obj.oid} has no class {obj.cls}")
        mth = next((m for m in cd.methods if m.name == msg.method), None)
        if mth is None:
            raise UnknownMethodError(
                f"class {obj.cls} has no method {msg.method}")
        formals = [name for _, name in mth.params]
        if len(formals) != len(msg.args):
            raise RtRuntimeError(
                f"{obj.cls}.{msg.method} expects {len(formals)} argument(s), "
                f"got {len(msg.args)}")
        arg_env = dict(zip(formals, msg.args))
        cost = eval_expr(mth.cost, arg_env, self._ctx())
        if not is_duration(cost):
            raise EvalTypeError(
                f"cost of {obj.cls}.{msg.method} is {render_value(cost)}, "
                f"not a Duration")
        locals_ = self._reserved_locals(msg.fid, msg.method, msg.deadline,
                                        msg.critical, cost)
        locals_["arrival"] = mk_time(msg.timestamp)
        locals_.update(arg_env)
        label = next((a.value for a in msg.args if isinstance(a, StrVal)), None)
        return ProcessRecord(pid=msg.fid, oid=obj.oid, method=msg.method,
                             locals=locals_, body=list(mth.body), label=label)

    def _bind_and_enqueue(self, obj: ObjectState, msg: InvocationMessage) -> None:
        p = self.bind_activation(msg)
        obj.queue.append(p)
        data = [("deadline", render_duration_field(msg.deadline)),
                ("cost", render_duration_field(p.locals["cost"])),
                ("critical", render_value(msg.critical))]
        if p.label is not None:
            data.append(("label", p.label))
        self._emit("activate", obj=obj.oid, pid=p.pid, method=p.method,
                   data=tuple(data))

    # --- rules for the active process

    def _step_active(self, obj: ObjectState) -> str | None:
        p = obj.active
        assert p is not None and p.body, "active process with empty body"
        env = ChainMap(p.locals, obj.attrs)
        ctx = self._ctx()
        s = p.body[0]

        if isinstance(s, SSkip):
            del p.body[0]
            return "skip"

        if isinstance(s, SAssign):
            return self._step_assign(obj, p, s, env, ctx)

        if isinstance(s, SIf):
            cond = eval_expr(s.cond, env, ctx)
            self._require_bool(cond, s.pos)
            p.body[0:1] = s.then if cond.value else s.els
            return "cond"

        if isinstance(s, SWhile):
            p.body[0:1] = [SIf(s.cond, s.body + [s], [], pos=s.pos)]
            return "while"

        if isinstance(s, SReturn):
            self._do_return(obj, p, s, env, ctx)
            return "return"

        if isinstance(s, SSuspend):
            del p.body[0]
            self._suspend(obj, p, ())
            return "suspend"

        if isinstance(s, SAwait):
            self._fix_head(p, obj)
            s = p.body[0]

        if isinstance(s, SAwaitReady):
            if eval_guard(s.guard, env, ctx):
                del p.body[0]
                return "await-true"
            self._suspend(obj, p, (("guard", render_guard(s.guard)),))
            return "await-false"

        if isinstance(s, SDuration):
            best = self._bound_rat(eval_expr(s.best, env, ctx), s.pos)
            worst = self._bound_rat(eval_expr(s.worst, env, ctx), s.pos)
            self._check_bounds(best, worst, s.pos)
            delta = self._sample(best, worst)
            p.body[0] = SDuration2(delta, delta)
            return "duration"

        if isinstance(s, SDuration2):
            if s.best <= 0:
                del p.body[0]
                return "duration-done"
            return None  # object waits for the clock

        raise RtRuntimeError(f"statement was not lowered: {type(s).__name__}",
                             getattr(s, "pos", None))

    def _step_assign(self, obj: ObjectState, p: ProcessRecord, s: SAssign,
                     env, ctx: EvalContext) -> str | None:
        rhs = s.rhs
        if rhs is None:
            self._assign(obj, p, s, _type_default(s.decl_type))
            del p.body[0]
            return "assign"
        if isinstance(rhs, RExpr):
            self._assign(obj, p, s, eval_expr(rhs.expr, env, ctx))
            del p.body[0]
            return "assign"
        if isinstance(rhs, RNew):
            ref = self._new_object(rhs, env, ctx)
            p.body[0] = SAssign(s.decl_type, s.name, RExpr(Lit(ref)), pos=s.pos)
            return "new-object"
        if isinstance(rhs, RCall):
            fut = self._async_call(obj, rhs, env, ctx)
            p.body[0] = SAssign(s.decl_type, s.name, RExpr(Lit(fut)), pos=s.pos)
            return "async-call"
        if isinstance(rhs, RGet):
            fut = eval_expr(rhs.expr, env, ctx)
            if not isinstance(fut, FutRef):
                raise EvalTypeError(
                    f"get applied to {render_value(fut)}, not a future", rhs.pos)
            cell = self.config.futures[fut.fid]
            if not cell.resolved:
                return None  # object blocks until the future resolves
            p.body[0] = SAssign(s.decl_type, s.name, RExpr(Lit(cell.value)),
                                pos=s.pos)
            return "read-fut"
        raise RtRuntimeError(f"call was not lowered: {type(rhs).__name__}",
                             s.pos)

    def _assign(self, obj: ObjectState, p: ProcessRecord, s: SAssign,
                value: Value) -> None:
        if s.decl_type is not None or s.name in p.locals:
            p.locals[s.name] = value
        elif s.name in obj.attrs:
            obj.attrs[s.name] = value
        else:
            raise UnboundVariableError(f"unbound variable {s.name}", s.pos)

    def _require_bool(self, v: Value, pos) -> None:
        if not isinstance(v, BoolVal):
            raise EvalTypeError(
                f"condition is {render_value(v)}, not a Bool", pos)

    def _suspend(self, obj: ObjectState, p: ProcessRecord, data: tuple) -> None:
        obj.active = None
        obj.queue.append(p)
        self._emit("suspend", obj=obj.oid, pid=p.pid, method=p.method,
                   data=data)

    def _do_return(self, obj: ObjectState, p: ProcessRecord, s: SReturn,
                   env, ctx: EvalContext) -> None:
        value = eval_expr(s.expr, env, ctx)
        p.locals["finish"] = mk_time(self.config.clock)
        remaining = p.locals["deadline"]
        self.config.futures[p.pid].resolve(value)
        obj.active = None
        rendered = render_value(value)
        self._emit("return", obj=obj.oid, pid=p.pid, method=p.method,
                   data=(("value", rendered),
                         ("deadline", render_duration_field(remaining))))
        self._emit("resolve", obj=obj.oid, pid=p.pid, method=p.method,
                   data=(("value", rendered),))
        if not is_inf_duration(remaining) and duration_rat(remaining) < 0:
            self._emit("deadline_miss", obj=obj.oid, pid=p.pid,
                       method=p.method,
                       data=(("lateness", format_rat(-duration_rat(remaining))),))

    # --- Async-Call

    def _async_call(self, obj: ObjectState, rhs: RCall, env,
                    ctx: EvalContext) -> FutRef:
        callee = eval_expr(rhs.callee, env, ctx)
        if callee == NULL:
            raise RtRuntimeError(f"call to {rhs.method} on null", rhs.pos)
        if not isinstance(callee, ObjRef):
            raise EvalTypeError(
                f"call target is {render_value(callee)}, not an object",
                rhs.pos)
        args = tuple(eval_expr(a, env, ctx) for a in rhs.args)
        deadline = eval_expr(rhs.annots.deadline, env, ctx)
        if not is_duration(deadline):
            raise EvalTypeError(
                f"deadline is {render_value(deadline)}, not a Duration",
                rhs.pos)
        critical = eval_expr(rhs.annots.critical, env, ctx)
        if not isinstance(critical, BoolVal):
            raise EvalTypeError(
                f"criticality is {render_value(critical)}, not a Bool",
                rhs.pos)
        fid = self._fresh_fid()
        self.config.messages.append(InvocationMessage(
            rhs.method, callee.oid, args, fid, deadline, critical,
            self.config.clock))
        self._emit("invoke", obj=callee.oid, pid=fid, method=rhs.method,
                   data=(("caller", f"o{obj.oid}"),
                         ("deadline", render_duration_field(deadline)),
                         ("critical", render_value(critical))))
        return FutRef(fid)

    # --- New-Object

    def _new_object(self, rhs: RNew, env, ctx: EvalContext) -> ObjRef:
        cd = self.program.classes.get(rhs.cls)
        if cd is None:
            raise RtRuntimeError(f"unknown class {rhs.cls}", rhs.pos)
        if len(cd.params) != len(rhs.args):
            raise RtRuntimeError(
                f"class {rhs.cls} expects {len(cd.params)} argument(s), "
                f"got {len(rhs.args)}", rhs.pos)
        args = [eval_expr(a, env, ctx) for a in rhs.args]
        oid = self._fresh_oid()
        attrs: dict[str, Value] = {}
        for (_, name), value in zip(cd.params, args):
            attrs[name] = value
        for fd in cd.fields:
            attrs[fd.name] = _type_default(fd.type)
        attrs["this"] = ObjRef(oid)
        policy = rhs.scheduler if rhs.scheduler is not None else default_policy()
        obj = ObjectState(oid, rhs.cls, policy, attrs)
        self.config.objects[oid] = obj
        self._emit("new_object", obj=oid, data=(("class", rhs.cls),))
        if cd.init_body is not None:
            fid = self._fresh_fid()
            p = ProcessRecord(
                pid=fid, oid=oid, method="init",
                locals=self._reserved_locals(fid, "init", INF_DURATION, FALSE,
                                             mk_duration(0)),
                body=list(cd.init_body), dispatched=True)
            p.locals["start"] = mk_time(self.config.clock)
            obj.active = p
            self._emit("activate", obj=oid, pid=fid, method="init",
                       data=(("deadline", "inf"), ("cost", "0"),
                             ("critical", "False")))
            self._emit("schedule", obj=oid, pid=fid, method="init",
                       data=(("deadline", "inf"),))
        return ObjRef(oid)

    # --- Schedule

    def ready_set(self, obj: ObjectState) -> list[ProcessRecord]:
        """Queued processes whose head statement would not immediately
        suspend or block, in queue order."""
        ctx = self._ctx()
        out = []
        for p in obj.queue:
            self._fix_head(p, obj)
            if self._is_ready(p, obj, ctx):
                out.append(p)
        return out

    def _is_ready(self, p: ProcessRecord, obj: ObjectState,
                  ctx: EvalContext) -> bool:
        head = p.body[0]
        env = ChainMap(p.locals, obj.attrs)
        if isinstance(head, SAwaitReady):
            return eval_guard(head.guard, env, ctx)
        if isinstance(head, SDuration2):
            return head.best <= 0
        if isinstance(head, SAssign) and isinstance(head.rhs, RGet):
            fut = eval_expr(head.rhs.expr, env, ctx)
            return isinstance(fut, FutRef) and ctx.is_resolved(fut.fid)
        return True

    def _try_schedule(self, obj: ObjectState) -> bool:
        ready = self.ready_set(obj)
        if not ready:
            return False
        p = self.evaluate_policy(obj, ready)
        obj.queue.remove(p)
        obj.active = p
        if not p.dispatched:
            p.dispatched = True
            p.locals["start"] = mk_time(self.config.clock)
        self._emit("schedule", obj=obj.oid, pid=p.pid, method=p.method,
                   data=(("deadline",
                          render_duration_field(p.locals["deadline"])),))
        return True

    def evaluate_policy(self, obj: ObjectState,
                        ready: list[ProcessRecord]) -> ProcessRecord:
        """Run the object's scheduling expression over the reflected ready
        queue; the result must identify one of the ready processes."""
        env = ChainMap({"queue": liftall(ready)}, obj.attrs)
        try:
            choice = eval_expr(obj.policy, env, self._ctx())
        except RtRuntimeError as err:
            if err.stmt is None:
                err.stmt = f"[Scheduler: {render_expr(obj.policy)}]"
            raise
        if not (isinstance(choice, DataVal) and choice.ctor == "Proc"
                and len(choice.args) == len(PROC_FIELDS)):
            raise PolicyError(
                f"scheduler of o{obj.oid} returned {render_value(choice)}, "
                f"not a process", getattr(obj.policy, "pos", None))
        p = select(choice.args[0], ready)
        if p is None:
            raise PolicyError(
                f"scheduler of o{obj.oid} selected a process outside the "
                f"ready queue", getattr(obj.policy, "pos", None))
        return p

    # ------------------------------------------------------------ main loop

    def run_until(self, limit: Fraction | int,
                  max_steps: int | None = None) -> RunResult:
        """Alternate instantaneous steps and maximal time advances until
        the model terminates, the clock would pass the limit, the
        configuration deadlocks, or a runtime error surfaces."""
        limit = Fraction(limit)
        if not self.booted:
            self.boot()
        steps = 0
        while True:
            try:
                rule = self.exec_step()
            except RtRuntimeError as err:
                self._emit("error", obj=err.obj, pid=err.pid,
                           data=(("message", err.describe()),))
                return self._result("error", steps, error=err)
            if rule is not None:
                steps += 1
                if max_steps is not None and steps >= max_steps:
                    return self._result("step_limit", steps)
                continue
            if self._terminated():
                return self._result("finished", steps)
            self._fix_all_heads()
            delta = mte_raw(self.config, self.program)
            if delta is None:
                return self._result("deadlock", steps,
                                    blocked=self._blocked_report())
            assert delta > 0, "quiescent configuration with zero mte"
            if self.config.clock + delta > limit:
                return self._result("time_limit", steps)
            adv(self.config, delta)
            self._emit("tick", data=(("delta", format_rat(delta)),))

    def _result(self, status: str, steps: int,
                error: RtRuntimeError | None = None,
                blocked: list[str] | None = None) -> RunResult:
        return RunResult(status, self.trace, self.config.clock, steps,
                         error=error, blocked=blocked or [])

    def _terminated(self) -> bool:
        if self.config.messages:
            return False
        return all(obj.active is None and not obj.queue
                   for obj in self.config.objects.values())

    def _blocked_report(self) -> list[str]:
        out = []
        for oid, obj in self.config.objects.items():
            if obj.active is not None:
                p = obj.active
                head = render_stmt(p.body[0]).strip() if p.body else "?"
                out.append(f"o{oid} ({obj.cls}): process f{p.pid} "
                           f"({p.method}) blocked at `{head}`")
            elif obj.queue:
                pids = " ".join(f"f{p.pid}" for p in obj.queue)
                out.append(f"o{oid} ({obj.cls}): no ready process "
                           f"(queued: {pids})")
        return out


def _type_default(ty: TypeAst | None) -> Value:
    if ty is None:
        return NULL
    if ty.name in ("Int", "Rat"):
        return num(0)
    if ty.name == "Bool":
        return FALSE
    if ty.name == "String":
        return StrVal("")
    return NULL


def simulate(model: Model, limit: Fraction | int, seed: int = 0,
             duration_policy: str = "worst") -> RunResult:
    """One-call convenience wrapper: boot, run, return the result."""
    return Engine(model, seed=seed, duration_policy=duration_policy).run_until(limit)
