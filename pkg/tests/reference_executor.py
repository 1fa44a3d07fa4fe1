"""Exhaustive nondeterministic reference executor for tiny models.

The engine determinizes rule choice (object visit order, message pick,
policy-driven scheduling).  This module re-implements the concurrent
rules independently and explores EVERY choice: any undelivered message
may bind, any object's enabled active step may fire, any ready queued
process may be scheduled, and the clock advances only at quiescence.
A run of the engine is correct if every configuration it passes
through is reachable by the reference executor.

State digests canonicalize the two guard representations (source form
vs sampled runtime form) so that bookkeeping differences in when a
head guard was sampled do not count as semantic divergence.  That is
sound only because generated programs use literal, equal duration
bounds, for which sampling is the identity.

Only the concurrency layer is independent; pure expression evaluation
is shared with the package (it is vetted separately against host-level
oracles).
"""

from __future__ import annotations

import copy
import random
from collections import ChainMap
from dataclasses import dataclass, field
from fractions import Fraction

from rtabs import load_source
from rtabs.desugar import desugar
from rtabs.engine import MAIN_CLASS, Engine, adv, mte_raw
from rtabs.evaluator import EvalContext, Program, eval_expr, eval_guard
from rtabs.nodes import (
    GBool, GConj, GDuration, GFut, Lit, RBool, RCall, RConj, RDur, RExpr,
    RFut, RGet, RNew, SAssign, SAwait, SAwaitReady, SDuration, SDuration2,
    SIf, SReturn, SSkip, SSuspend, SWhile,
)
from rtabs.pretty import render_expr
from rtabs.values import (
    FALSE, INF_DURATION, NULL, FutRef, NumVal, ObjRef, StrVal, duration_rat,
    is_duration, is_inf_duration, mk_duration, mk_time, num, render_value,
)

LIMIT = Fraction(24)
STATE_CAP = 60_000


# ----------------------------------------------------------- program maker
#
# Constraints keeping the state space finite and allocator order fixed:
# every `new` and every call sits in the main block (a single sequential
# process), methods never block forever, duration bounds are equal
# integer literals, and the statement budget is 12.


class ProgramBuilder:
    def __init__(self, rng: random.Random):
        self.rng = rng
        self.budget = 12

    def _take(self) -> bool:
        if self.budget <= 0:
            return False
        self.budget -= 1
        return True

    def _dur(self) -> int:
        return self.rng.choice([0, 1, 1, 2, 3])

    def _method_stmt(self, fields: list[str], has_param: bool) -> str:
        d = self._dur()
        d2 = self._dur()
        opts = ["skip;", f"duration({d}, {d});",
                f"await duration({d2}, {d2});", "suspend;"]
        if fields:
            g = self.rng.choice(fields)
            opts.append(f"{g} = {g} + {self.rng.randint(1, 2)};")
            opts.append(f"if ({g} > {self.rng.randint(0, 2)}) "
                        f"{{ {g} = 0; }} else {{ skip; }}")
        if has_param:
            opts.append(f"value = v + {self.rng.randint(0, 2)};")
        return self.rng.choice(opts)

    def _ret_expr(self, fields: list[str], has_param: bool) -> str:
        opts = [str(self.rng.randint(0, 5))]
        if fields:
            opts.append(self.rng.choice(fields))
        if has_param:
            opts.append("v + 1")
        return self.rng.choice(opts)

    def build(self) -> tuple[str, dict[str, list[tuple[str, bool]]]]:
        rng = self.rng
        n_classes = rng.randint(1, 2)
        chunks = []
        methods_of: dict[str, list[tuple[str, bool]]] = {}
        for ci in range(n_classes):
            fields = [f"g{k}" for k in range(rng.randint(0, 2))]
            field_decls = [f"  Int {g} = {rng.randint(0, 2)};" for g in fields]
            for _ in field_decls:
                self._take()
            sigs, bodies, meths = [], [], []
            for mi in range(rng.randint(1, 2)):
                name = f"m{ci}{mi}"
                has_param = rng.random() < 0.5
                param = "Int v" if has_param else ""
                stmts = []
                for _ in range(rng.randint(0, 2)):
                    if self._take():
                        stmts.append("    " + self._method_stmt(fields, has_param))
                self._take()  # the return statement
                stmts.append(f"    return {self._ret_expr(fields, has_param)};")
                sigs.append(f"  Int {name}({param});")
                bodies.append(f"  Int {name}({param}) {{\n"
                              + "\n".join(stmts) + "\n  }")
                meths.append((name, has_param))
            methods_of[f"C{ci}"] = meths
            chunks.append(f"interface I{ci} {{\n" + "\n".join(sigs) + "\n}")
            chunks.append(f"class C{ci} implements I{ci} {{\n"
                          + "\n".join(field_decls + bodies) + "\n}")
        main = self._main(n_classes, methods_of)
        chunks.append("{\n" + "\n".join("  " + s for s in main) + "\n}")
        return "\n\n".join(chunks) + "\n", methods_of

    def _main(self, n_classes: int,
              methods_of: dict[str, list[tuple[str, bool]]]) -> list[str]:
        rng = self.rng
        out = []
        for ci in range(n_classes):
            out.append(f"I{ci} c{ci} = new C{ci}();")
            self._take()
        futs: list[str] = []
        n_calls = rng.randint(1, min(3, max(1, self.budget)))
        for j in range(n_calls):
            if not self._take():
                break
            ci = rng.randrange(n_classes)
            name, has_param = rng.choice(methods_of[f"C{ci}"])
            arg = str(rng.randint(0, 4)) if has_param else ""
            call = f"c{ci}!{name}({arg});"
            if rng.random() < 0.6:
                fut = f"f{j}"
                futs.append(fut)
                call = f"Fut<Int> {fut} = " + call
            if rng.random() < 0.5:
                call = f"[Deadline: Duration({rng.randint(1, 5)})] " + call
            out.append(call)
        tail = rng.randint(0, 3)
        got: set[str] = set()
        for _ in range(tail):
            if not self._take():
                break
            opts = ["skip;", "suspend;"]
            d = self._dur()
            opts.append(f"duration({d}, {d});")
            d2 = self._dur()
            opts.append(f"await duration({d2}, {d2});")
            for f in futs:
                opts.append(f"await {f}?;")
                if f not in got:
                    opts.append(f"Int r{f} = {f}.get;")
            pick = rng.choice(opts)
            if pick.endswith(".get;"):
                got.add(pick.split()[3].split(".")[0])
            out.append(pick)
        return out


def generate_model(seed: int):
    """A checked, desugared tiny model plus its source text."""
    source, _ = ProgramBuilder(random.Random(seed)).build()
    model, diags = load_source(source, f"<gen-{seed}>")
    assert not diags, (source, [d.render() for d in diags])
    return desugar(model), source


# ------------------------------------------------------------------ digests


def digest_guard(g):
    if isinstance(g, (GConj, RConj)):
        return ("conj", digest_guard(g.left), digest_guard(g.right))
    if isinstance(g, RDur):
        return ("dur", g.best, g.worst)
    if isinstance(g, GDuration):
        b, w = _lit_rat(g.best), _lit_rat(g.worst)
        if b is not None and w is not None:
            return ("dur", b, w)
        return ("dur-expr", render_expr(g.best), render_expr(g.worst))
    if isinstance(g, (GFut, RFut)):
        return ("fut", g.var)
    if isinstance(g, (GBool, RBool)):
        return ("bool", render_expr(g.expr))
    raise AssertionError(f"guard {g!r}")


def _lit_rat(e):
    if isinstance(e, Lit):
        if isinstance(e.value, NumVal):
            return e.value.value
        if is_duration(e.value) and not is_inf_duration(e.value):
            return duration_rat(e.value)
    return None


def digest_stmt(s):
    if isinstance(s, SSkip):
        return ("skip",)
    if isinstance(s, SAssign):
        decl = s.decl_type is not None
        if s.rhs is None:
            return ("declare", decl, s.name)
        if isinstance(s.rhs, RExpr):
            return ("assign", decl, s.name, render_expr(s.rhs.expr))
        if isinstance(s.rhs, RNew):
            return ("new", decl, s.name, s.rhs.cls,
                    tuple(render_expr(a) for a in s.rhs.args))
        if isinstance(s.rhs, RCall):
            return ("call", decl, s.name, render_expr(s.rhs.callee),
                    s.rhs.method, tuple(render_expr(a) for a in s.rhs.args),
                    render_expr(s.rhs.annots.deadline),
                    render_expr(s.rhs.annots.critical))
        if isinstance(s.rhs, RGet):
            return ("get", decl, s.name, render_expr(s.rhs.expr))
        raise AssertionError(f"rhs {s.rhs!r}")
    if isinstance(s, SIf):
        return ("if", render_expr(s.cond),
                tuple(digest_stmt(t) for t in s.then),
                tuple(digest_stmt(t) for t in s.els))
    if isinstance(s, SWhile):
        return ("while", render_expr(s.cond),
                tuple(digest_stmt(t) for t in s.body))
    if isinstance(s, SReturn):
        return ("return", render_expr(s.expr))
    if isinstance(s, SSuspend):
        return ("suspend",)
    if isinstance(s, (SAwait, SAwaitReady)):
        return ("await", digest_guard(s.guard))
    if isinstance(s, SDuration):
        b, w = _lit_rat(s.best), _lit_rat(s.worst)
        return ("duration-src", b if b is not None else render_expr(s.best),
                w if w is not None else render_expr(s.worst))
    if isinstance(s, SDuration2):
        return ("duration-rt", s.best, s.worst)
    raise AssertionError(f"stmt {s!r}")


def digest_proc(p):
    return (p.pid, p.method, p.dispatched,
            tuple(sorted((k, render_value(v)) for k, v in p.locals.items())),
            tuple(digest_stmt(s) for s in p.body))


def digest_config(cfg) -> tuple:
    """Canonical state key; works on engine configurations and reference
    states alike (same attribute names by construction)."""
    objs = tuple(
        (oid, o.cls,
         tuple(sorted((k, render_value(v)) for k, v in o.attrs.items())),
         digest_proc(o.active) if o.active is not None else None,
         tuple(digest_proc(p) for p in o.queue))
        for oid, o in sorted(cfg.objects.items()))
    msgs = tuple(sorted(
        (m.method, m.callee, m.fid, tuple(render_value(a) for a in m.args),
         render_value(m.deadline), render_value(m.critical), m.timestamp)
        for m in cfg.messages))
    futs = tuple((fid, f.resolved, render_value(f.value) if f.resolved else None)
                 for fid, f in sorted(cfg.futures.items()))
    return (cfg.clock, objs, msgs, futs)


# ----------------------------------------------------------- reference state


@dataclass
class RefProc:
    pid: int
    oid: int
    method: str
    locals: dict
    body: list
    dispatched: bool = False
    label: str | None = None


@dataclass
class RefObject:
    oid: int
    cls: str
    attrs: dict
    active: RefProc | None = None
    queue: list = field(default_factory=list)

    def processes(self):
        head = [self.active] if self.active is not None else []
        return head + list(self.queue)


@dataclass
class RefMessage:
    method: str
    callee: int
    args: tuple
    fid: int
    deadline: object
    critical: object
    timestamp: Fraction


@dataclass
class RefFuture:
    fid: int
    resolved: bool = False
    value: object = None


@dataclass
class RefState:
    objects: dict = field(default_factory=dict)
    messages: list = field(default_factory=list)
    futures: dict = field(default_factory=dict)
    clock: Fraction = Fraction(0)
    next_oid: int = 0
    next_fid: int = 0


def _type_default(ty):
    if ty is None:
        return NULL
    if ty.name in ("Int", "Rat"):
        return num(0)
    if ty.name == "Bool":
        return FALSE
    if ty.name == "String":
        return StrVal("")
    return NULL


def _reserved(fid, method, deadline, critical, cost, clock):
    return {
        "destiny": FutRef(fid), "method": StrVal(method),
        "arrival": mk_time(clock), "cost": cost, "deadline": deadline,
        "start": mk_time(0), "finish": mk_time(0), "critical": critical,
        "value": num(0),
    }


class ReferenceExecutor:
    """Breadth-unbounded exploration of all rule interleavings."""

    def __init__(self, model, limit: Fraction = LIMIT,
                 state_cap: int = STATE_CAP):
        self.model = model
        self.program = Program.from_model(model)
        self.limit = Fraction(limit)
        self.state_cap = state_cap

    # --- plumbing

    def _ctx(self, st: RefState) -> EvalContext:
        return EvalContext(self.program, st.clock,
                           is_resolved=lambda fid: st.futures[fid].resolved)

    def _fresh_fid(self, st: RefState) -> int:
        fid = st.next_fid
        st.next_fid += 1
        st.futures[fid] = RefFuture(fid)
        return fid

    # --- boot

    def boot(self) -> RefState:
        st = RefState()
        oid = st.next_oid
        st.next_oid += 1
        st.objects[oid] = RefObject(oid, MAIN_CLASS, {"this": ObjRef(oid)})
        if self.model.main is not None:
            fid = self._fresh_fid(st)
            p = RefProc(fid, oid, "main",
                        _reserved(fid, "main", INF_DURATION, FALSE,
                                  mk_duration(0), st.clock),
                        list(self.model.main), dispatched=True)
            p.locals["start"] = mk_time(st.clock)
            st.objects[oid].active = p
        return st

    # --- one-rule successors

    def successors(self, st: RefState) -> list[RefState]:
        out = []
        for i in range(len(st.messages)):
            out.append(self._bind(st, i))
        for oid, obj in st.objects.items():
            if obj.active is not None:
                nxt = self._step_active(st, oid)
                if nxt is not None:
                    out.append(nxt)
            else:
                for j, p in enumerate(obj.queue):
                    if self._is_ready(st, obj, p):
                        out.append(self._schedule(st, oid, j))
        if not out:
            nxt = self._tick(st)
            if nxt is not None:
                out.append(nxt)
        return out

    def _bind(self, st: RefState, idx: int) -> RefState:
        st = copy.deepcopy(st)
        msg = st.messages.pop(idx)
        obj = st.objects[msg.callee]
        cd = self.program.classes[obj.cls]
        mth = next(m for m in cd.methods if m.name == msg.method)
        arg_env = dict(zip([name for _, name in mth.params], msg.args))
        cost = eval_expr(mth.cost, arg_env, self._ctx(st))
        locals_ = _reserved(msg.fid, msg.method, msg.deadline, msg.critical,
                            cost, st.clock)
        locals_["arrival"] = mk_time(msg.timestamp)
        locals_.update(arg_env)
        label = next((a.value for a in msg.args if isinstance(a, StrVal)), None)
        obj.queue.append(RefProc(msg.fid, obj.oid, msg.method, locals_,
                                 list(mth.body), label=label))
        return st

    def _is_ready(self, st: RefState, obj: RefObject, p: RefProc) -> bool:
        head = p.body[0]
        env = ChainMap(p.locals, obj.attrs)
        ctx = self._ctx(st)
        if isinstance(head, (SAwait, SAwaitReady)):
            return eval_guard(head.guard, env, ctx)
        if isinstance(head, SDuration2):
            return head.best <= 0
        if isinstance(head, SAssign) and isinstance(head.rhs, RGet):
            fut = eval_expr(head.rhs.expr, env, ctx)
            return isinstance(fut, FutRef) and st.futures[fut.fid].resolved
        return True

    def _schedule(self, st: RefState, oid: int, j: int) -> RefState:
        st = copy.deepcopy(st)
        obj = st.objects[oid]
        p = obj.queue.pop(j)
        obj.active = p
        if not p.dispatched:
            p.dispatched = True
            p.locals["start"] = mk_time(st.clock)
        return st

    def _step_active(self, st: RefState, oid: int) -> RefState | None:
        st = copy.deepcopy(st)
        obj = st.objects[oid]
        p = obj.active
        env = ChainMap(p.locals, obj.attrs)
        ctx = self._ctx(st)
        s = p.body[0]

        if isinstance(s, SSkip):
            del p.body[0]
            return st
        if isinstance(s, SAssign):
            return self._step_assign(st, obj, p, s, env, ctx)
        if isinstance(s, SIf):
            cond = eval_expr(s.cond, env, ctx)
            p.body[0:1] = s.then if cond.value else s.els
            return st
        if isinstance(s, SWhile):
            p.body[0:1] = [SIf(s.cond, s.body + [s], [], pos=s.pos)]
            return st
        if isinstance(s, SReturn):
            value = eval_expr(s.expr, env, ctx)
            p.locals["finish"] = mk_time(st.clock)
            fut = st.futures[p.pid]
            assert not fut.resolved
            fut.resolved = True
            fut.value = value
            obj.active = None
            return st
        if isinstance(s, SSuspend):
            del p.body[0]
            obj.active = None
            obj.queue.append(p)
            return st
        if isinstance(s, (SAwait, SAwaitReady)):
            if eval_guard(s.guard, env, ctx):
                del p.body[0]
                return st
            obj.active = None
            obj.queue.append(p)
            return st
        if isinstance(s, SDuration):
            best = _as_rat(eval_expr(s.best, env, ctx))
            worst = _as_rat(eval_expr(s.worst, env, ctx))
            assert best == worst, "generated durations must be degenerate"
            p.body[0] = SDuration2(best, worst)
            return st
        if isinstance(s, SDuration2):
            if s.best <= 0:
                del p.body[0]
                return st
            return None  # waits for the clock
        raise AssertionError(f"statement {s!r}")

    def _step_assign(self, st, obj, p, s, env, ctx) -> RefState | None:
        rhs = s.rhs
        if rhs is None:
            self._write(obj, p, s, _type_default(s.decl_type))
            del p.body[0]
            return st
        if isinstance(rhs, RExpr):
            self._write(obj, p, s, eval_expr(rhs.expr, env, ctx))
            del p.body[0]
            return st
        if isinstance(rhs, RNew):
            ref = self._new_object(st, rhs, env, ctx)
            p.body[0] = SAssign(s.decl_type, s.name, RExpr(Lit(ref)), pos=s.pos)
            return st
        if isinstance(rhs, RCall):
            fut = self._async_call(st, obj, rhs, env, ctx)
            p.body[0] = SAssign(s.decl_type, s.name, RExpr(Lit(fut)), pos=s.pos)
            return st
        if isinstance(rhs, RGet):
            fut = eval_expr(rhs.expr, env, ctx)
            assert isinstance(fut, FutRef)
            cell = st.futures[fut.fid]
            if not cell.resolved:
                return None  # blocks
            p.body[0] = SAssign(s.decl_type, s.name, RExpr(Lit(cell.value)),
                                pos=s.pos)
            return st
        raise AssertionError(f"rhs {rhs!r}")

    def _write(self, obj, p, s, value) -> None:
        if s.decl_type is not None or s.name in p.locals:
            p.locals[s.name] = value
        elif s.name in obj.attrs:
            obj.attrs[s.name] = value
        else:
            raise AssertionError(f"unbound {s.name}")

    def _async_call(self, st, obj, rhs, env, ctx) -> FutRef:
        callee = eval_expr(rhs.callee, env, ctx)
        args = tuple(eval_expr(a, env, ctx) for a in rhs.args)
        deadline = eval_expr(rhs.annots.deadline, env, ctx)
        critical = eval_expr(rhs.annots.critical, env, ctx)
        fid = self._fresh_fid(st)
        st.messages.append(RefMessage(rhs.method, callee.oid, args, fid,
                                      deadline, critical, st.clock))
        return FutRef(fid)

    def _new_object(self, st, rhs, env, ctx) -> ObjRef:
        cd = self.program.classes[rhs.cls]
        args = [eval_expr(a, env, ctx) for a in rhs.args]
        oid = st.next_oid
        st.next_oid += 1
        attrs = {}
        for (_, name), value in zip(cd.params, args):
            attrs[name] = value
        for fd in cd.fields:
            attrs[fd.name] = _type_default(fd.type)
        attrs["this"] = ObjRef(oid)
        obj = RefObject(oid, rhs.cls, attrs)
        st.objects[oid] = obj
        if cd.init_body is not None:
            fid = self._fresh_fid(st)
            p = RefProc(fid, oid, "init",
                        _reserved(fid, "init", INF_DURATION, FALSE,
                                  mk_duration(0), st.clock),
                        list(cd.init_body), dispatched=True)
            p.locals["start"] = mk_time(st.clock)
            obj.active = p
        return ObjRef(oid)

    # --- clock advance at quiescence

    def _fix_heads(self, st: RefState) -> None:
        for obj in st.objects.values():
            for p in obj.processes():
                if p.body and isinstance(p.body[0], SAwait):
                    env = ChainMap(p.locals, obj.attrs)
                    p.body[0] = SAwaitReady(
                        self._fix_guard(st, p.body[0].guard, env))

    def _fix_guard(self, st, g, env):
        if isinstance(g, GConj):
            return RConj(self._fix_guard(st, g.left, env),
                         self._fix_guard(st, g.right, env))
        if isinstance(g, GDuration):
            best = _as_rat(eval_expr(g.best, env, self._ctx(st)))
            worst = _as_rat(eval_expr(g.worst, env, self._ctx(st)))
            assert best == worst, "generated durations must be degenerate"
            return RDur(best, worst)
        if isinstance(g, GFut):
            return RFut(g.var)
        if isinstance(g, GBool):
            return RBool(g.expr)
        return g

    def _guard_mte(self, st, g, env):
        if isinstance(g, (GConj, RConj)):
            a = self._guard_mte(st, g.left, env)
            b = self._guard_mte(st, g.right, env)
            return None if (a is None or b is None) else max(a, b)
        if isinstance(g, RDur):
            return Fraction(0) if g.best <= 0 else g.worst
        return (Fraction(0)
                if eval_guard(g, env, self._ctx(st)) else None)

    def _proc_mte(self, st, obj, p):
        head = p.body[0]
        env = ChainMap(p.locals, obj.attrs)
        if isinstance(head, SDuration2):
            return Fraction(0) if head.best <= 0 else head.worst
        if isinstance(head, (SAwait, SAwaitReady)):
            return self._guard_mte(st, head.guard, env)
        if isinstance(head, SAssign) and isinstance(head.rhs, RGet):
            fut = eval_expr(head.rhs.expr, env, self._ctx(st))
            if not st.futures[fut.fid].resolved:
                return None
        return Fraction(0)

    def _mte(self, st: RefState):
        best = None
        for obj in st.objects.values():
            if obj.active is not None:
                contribs = [self._proc_mte(st, obj, obj.active)]
            else:
                contribs = [self._proc_mte(st, obj, p) for p in obj.queue]
            for c in contribs:
                if c is not None:
                    best = c if best is None else min(best, c)
        return best

    def _tick(self, st: RefState) -> RefState | None:
        st = copy.deepcopy(st)
        self._fix_heads(st)
        delta = self._mte(st)
        if delta is None:
            return None  # deadlock or termination
        assert delta > 0, "quiescent state with zero time bound"
        if st.clock + delta > self.limit:
            return None  # horizon reached
        st.clock += delta
        for obj in st.objects.values():
            for p in obj.processes():
                d = p.locals["deadline"]
                if not is_inf_duration(d):
                    p.locals["deadline"] = mk_duration(duration_rat(d) - delta)
                head = p.body[0] if p.body else None
                if isinstance(head, SDuration2):
                    p.body[0] = SDuration2(head.best - delta,
                                           head.worst - delta)
                elif isinstance(head, SAwaitReady):
                    p.body[0] = SAwaitReady(_adv_guard(head.guard, delta))
        return st

    # --- exploration

    def explore(self) -> set:
        init = self.boot()
        seen = {digest_config(init)}
        frontier = [init]
        while frontier:
            st = frontier.pop()
            for nxt in self.successors(st):
                d = digest_config(nxt)
                if d not in seen:
                    if len(seen) >= self.state_cap:
                        raise RuntimeError("state cap exceeded")
                    seen.add(d)
                    frontier.append(nxt)
        return seen


def _adv_guard(g, delta):
    if isinstance(g, RConj):
        return RConj(_adv_guard(g.left, delta), _adv_guard(g.right, delta))
    if isinstance(g, RDur):
        return RDur(g.best - delta, g.worst - delta)
    return g


def _as_rat(v) -> Fraction:
    if isinstance(v, NumVal):
        return v.value
    assert is_duration(v) and not is_inf_duration(v)
    return duration_rat(v)


# ------------------------------------------------------- engine trajectory


def engine_digests(model, limit: Fraction = LIMIT) -> list:
    """Every configuration the deterministic engine passes through, at
    single-rule granularity, up to the time horizon."""
    eng = Engine(model)
    eng.boot()
    out = [digest_config(eng.config)]
    limit = Fraction(limit)
    while True:
        rule = eng.exec_step()
        if rule is not None:
            out.append(digest_config(eng.config))
            continue
        if eng._terminated():
            return out
        eng._fix_all_heads()
        delta = mte_raw(eng.config, eng.program)
        if delta is None:
            return out
        if eng.config.clock + delta > limit:
            return out
        adv(eng.config, delta)
        out.append(digest_config(eng.config))


def check_inclusion(seed: int, limit: Fraction = LIMIT):
    """Engine trajectory must stay inside the reference-reachable set.
    Returns (trajectory length, reference state count)."""
    model, source = generate_model(seed)
    reachable = ReferenceExecutor(model, limit).explore()
    trajectory = engine_digests(model, limit)
    for i, d in enumerate(trajectory):
        assert d in reachable, (
            f"seed {seed}: engine state {i}/{len(trajectory)} is not "
            f"reference-reachable\n{source}\n{d}")
    return len(trajectory), len(reachable)
