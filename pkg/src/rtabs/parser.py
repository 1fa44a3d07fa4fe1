"""Recursive-descent parser.

Statements that begin with a type and statements that begin with an
expression are disambiguated by backtracking.  Guards are parsed as
expressions with two extra atoms (`x?`, `duration(b,w)`) and converted
afterwards: `&&` above guard atoms becomes guard conjunction, and guard
atoms anywhere else are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError
from .lexer import Token, tokenize
from .nodes import (
    Apply, BinOp, CallAnnots, CaseBranch, CaseExpr, ClassDecl, CtorDecl,
    DataDecl, DeadlineExpr, DestinyExpr, Expr, FieldDecl, FuncDecl, GBool,
    GConj, GDuration, GFut, Guard, IfExpr, InterfaceDecl, Lit, MethodDecl,
    MethodSig, Model, NowExpr, PCtor, PLit, PName, Pattern, Pos, PWildcard,
    RCall, RExpr, RGet, RNew, RSyncCall, Rhs, SAssign, SAwait, SAwaitCall,
    SCallStmt, SDuration, SIf, SReturn, SSkip, SSuspend, SWhile, Stmt,
    ThisExpr, TypeAst, Unary, Var,
)
from .values import FALSE, NULL, TRUE, NumVal, StrVal


@dataclass
class _FutAtom(Expr):
    """Parser-internal: x? before guard conversion."""

    name: str
    pos: Pos | None = None


@dataclass
class _DurAtom(Expr):
    """Parser-internal: duration(b,w) before guard conversion."""

    best: Expr
    worst: Expr
    pos: Pos | None = None


class Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.idx = 0

    # ------------------------------------------------------- plumbing

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.idx + ahead, len(self.toks) - 1)]

    def next(self) -> Token:
        tok = self.toks[self.idx]
        if tok.kind != "eof":
            self.idx += 1
        return tok

    def at(self, kind: str, text: str | None = None) -> bool:
        tok = self.peek()
        return tok.kind == kind and (text is None or tok.text == text)

    def accept(self, kind: str, text: str | None = None) -> Token | None:
        if self.at(kind, text):
            return self.next()
        return None

    def expect(self, kind: str, text: str | None = None) -> Token:
        tok = self.peek()
        if not self.at(kind, text):
            want = text if text is not None else kind
            raise ParseError(f"unexpected {tok.text!r}", tok.pos, {want})
        return self.next()

    def mark(self) -> int:
        return self.idx

    def restore(self, mark: int) -> None:
        self.idx = mark

    # ---------------------------------------------------------- model

    def parse_model(self) -> Model:
        model = Model([], [], [], [], None, pos=self.peek().pos)
        while not self.at("eof"):
            if self.at("kw", "data"):
                model.datatypes.append(self.parse_data())
            elif self.at("kw", "def"):
                model.functions.append(self.parse_func())
            elif self.at("kw", "interface"):
                model.interfaces.append(self.parse_interface())
            elif self.at("kw", "class") or (self.at("op", "[") and self._annots_precede_class()):
                model.classes.append(self.parse_class())
            elif self.at("op", "{"):
                if model.main is not None:
                    raise ParseError("duplicate main block", self.peek().pos)
                model.main = self.parse_block()
            else:
                raise ParseError(
                    f"unexpected {self.peek().text!r} at top level", self.peek().pos,
                    {"data", "def", "interface", "class", "{"})
        return model

    def _annots_precede_class(self) -> bool:
        # lookahead across one or more [...] groups for the class keyword
        depth = 0
        j = self.idx
        while j < len(self.toks):
            tok = self.toks[j]
            if tok.kind == "op" and tok.text == "[":
                depth += 1
            elif tok.kind == "op" and tok.text == "]":
                depth -= 1
                if depth == 0 and j + 1 < len(self.toks):
                    after = self.toks[j + 1]
                    if after.kind == "kw" and after.text == "class":
                        return True
                    if after.kind == "op" and after.text == "[":
                        j += 1
                        continue
                    return False
            elif tok.kind == "eof":
                return False
            j += 1
        return False

    # ---------------------------------------------------- declarations

    def parse_typarams(self) -> list[str]:
        params: list[str] = []
        if self.accept("op", "<"):
            params.append(self.expect("name").text)
            while self.accept("op", ","):
                params.append(self.expect("name").text)
            self.expect("op", ">")
        return params

    def parse_data(self) -> DataDecl:
        pos = self.expect("kw", "data").pos
        name = self.expect("name").text
        typarams = self.parse_typarams()
        ctors: list[CtorDecl] = []
        if self.accept("op", "="):
            ctors.append(self.parse_ctor())
            while self.accept("op", "|"):
                ctors.append(self.parse_ctor())
        self.expect("op", ";")
        return DataDecl(name, typarams, ctors, pos=pos)

    def parse_ctor(self) -> CtorDecl:
        tok = self.expect("name")
        arg_types: list[TypeAst] = []
        if self.accept("op", "("):
            if not self.at("op", ")"):
                arg_types.append(self._parse_ctor_arg())
                while self.accept("op", ","):
                    arg_types.append(self._parse_ctor_arg())
            self.expect("op", ")")
        return CtorDecl(tok.text, arg_types, pos=tok.pos)

    def _parse_ctor_arg(self) -> TypeAst:
        ty = self.parse_type()
        self.accept("name")  # optional documentation-only field name
        return ty

    def parse_func(self) -> FuncDecl:
        pos = self.expect("kw", "def").pos
        ret = self.parse_type()
        # `deadline`/`destiny` are expression keywords but legal function
        # names; the process-observer library defines deadline(p)
        if self.at("kw", "deadline") or self.at("kw", "destiny"):
            name = self.next().text
        else:
            name = self.expect("name").text
        typarams = self.parse_typarams()
        self.expect("op", "(")
        params = self.parse_params()
        self.expect("op", ")")
        self.expect("op", "=")
        body = self.parse_expr()
        self.expect("op", ";")
        return FuncDecl(ret, name, typarams, params, body, pos=pos)

    def parse_params(self) -> list[tuple[TypeAst, str]]:
        params: list[tuple[TypeAst, str]] = []
        if self.at("op", ")"):
            return params
        while True:
            ty = self.parse_type()
            name = self.expect("name").text
            params.append((ty, name))
            if not self.accept("op", ","):
                return params

    def parse_type(self) -> TypeAst:
        tok = self.expect("name")
        args: list[TypeAst] = []
        if self.accept("op", "<"):
            args.append(self.parse_type())
            while self.accept("op", ","):
                args.append(self.parse_type())
            self.expect("op", ">")
        return TypeAst(tok.text, args, pos=tok.pos)

    def parse_interface(self) -> InterfaceDecl:
        pos = self.expect("kw", "interface").pos
        name = self.expect("name").text
        self.expect("op", "{")
        sigs: list[MethodSig] = []
        while not self.accept("op", "}"):
            ret = self.parse_type()
            mname = self.expect("name").text
            self.expect("op", "(")
            params = self.parse_params()
            self.expect("op", ")")
            self.expect("op", ";")
            sigs.append(MethodSig(ret, mname, params, pos=ret.pos))
        return InterfaceDecl(name, sigs, pos=pos)

    def parse_annotations(self) -> list[tuple[str, Expr]]:
        annots: list[tuple[str, Expr]] = []
        while self.accept("op", "["):
            while True:
                name = self.expect("name").text
                self.expect("op", ":")
                annots.append((name, self.parse_expr()))
                if not self.accept("op", ","):
                    break
            self.expect("op", "]")
        return annots

    def parse_class(self) -> ClassDecl:
        annots = self.parse_annotations()
        pos = self.expect("kw", "class").pos
        name = self.expect("name").text
        params: list[tuple[TypeAst, str]] = []
        if self.accept("op", "("):
            params = self.parse_params()
            self.expect("op", ")")
        interfaces: list[str] = []
        if self.accept("kw", "implements"):
            interfaces.append(self.expect("name").text)
            while self.accept("op", ","):
                interfaces.append(self.expect("name").text)
        self.expect("op", "{")
        fields: list[FieldDecl] = []
        methods: list[MethodDecl] = []
        while not self.accept("op", "}"):
            member_annots = self.parse_annotations()
            mark = self.mark()
            try:
                ty = self.parse_type()
                fname = self.expect("name").text
                if self.at("op", "=") or self.at("op", ";"):
                    if member_annots:
                        raise ParseError("annotations are not allowed on fields",
                                         self.peek().pos)
                    init = None
                    if self.accept("op", "="):
                        init = self.parse_expr()
                    self.expect("op", ";")
                    fields.append(FieldDecl(ty, fname, init, pos=ty.pos))
                    continue
                if not self.at("op", "("):
                    raise ParseError("expected field or method", self.peek().pos)
            except ParseError:
                self.restore(mark)
                raise
            self.expect("op", "(")
            mparams = self.parse_params()
            self.expect("op", ")")
            body = self.parse_block()
            methods.append(MethodDecl(ty, fname, mparams, body,
                                      annots=member_annots, pos=ty.pos))
        return ClassDecl(name, params, interfaces, fields, methods,
                         annots=annots, pos=pos)

    # ------------------------------------------------------ statements

    def parse_block(self) -> list[Stmt]:
        self.expect("op", "{")
        stmts: list[Stmt] = []
        while not self.accept("op", "}"):
            stmts.append(self.parse_stmt())
        return stmts

    def parse_stmt(self) -> Stmt:
        annots = self.parse_annotations()
        tok = self.peek()
        if annots and not (tok.kind == "kw" and tok.text == "await"):
            # annotations otherwise belong to assignment/call statements
            return self._parse_simple_stmt(annots)
        if tok.kind == "kw":
            if tok.text == "skip":
                self.next()
                self.expect("op", ";")
                return SSkip(pos=tok.pos)
            if tok.text == "if":
                return self._parse_if()
            if tok.text == "while":
                self.next()
                cond = self.parse_expr()
                body = self.parse_block()
                return SWhile(cond, body, pos=tok.pos)
            if tok.text == "return":
                self.next()
                expr = self.parse_expr()
                self.expect("op", ";")
                return SReturn(expr, pos=tok.pos)
            if tok.text == "suspend":
                self.next()
                self.expect("op", ";")
                return SSuspend(pos=tok.pos)
            if tok.text == "await":
                return self._parse_await(annots)
            if tok.text == "duration":
                self.next()
                self.expect("op", "(")
                best = self.parse_expr()
                self.expect("op", ",")
                worst = self.parse_expr()
                self.expect("op", ")")
                self.expect("op", ";")
                return SDuration(best, worst, pos=tok.pos)
        return self._parse_simple_stmt(annots)

    def _parse_if(self) -> Stmt:
        tok = self.expect("kw", "if")
        cond = self.parse_expr()
        then = self.parse_block()
        els: list[Stmt] = []
        if self.accept("kw", "else"):
            if self.at("kw", "if"):
                els = [self._parse_if()]
            else:
                els = self.parse_block()
        return SIf(cond, then, els, pos=tok.pos)

    def _parse_await(self, annots: list[tuple[str, Expr]]) -> Stmt:
        tok = self.expect("kw", "await")
        mark = self.mark()
        # await [T] x = o.m(args);  (call sugar)
        decl_type: TypeAst | None = None
        name: str | None = None
        try:
            ty = self.parse_type()
            nm = self.accept("name")
            if nm is not None and self.at("op", "="):
                decl_type, name = ty, nm.text
        except ParseError:
            pass
        if name is None:
            self.restore(mark)
            if self.at("name") and self.peek(1).kind == "op" and self.peek(1).text == "=":
                name = self.next().text
        if name is not None:
            self.expect("op", "=")
            callee = self.parse_expr()
            self.expect("op", ".")
            method = self.expect("name").text
            self.expect("op", "(")
            args = self.parse_args()
            self.expect("op", ")")
            self.expect("op", ";")
            return SAwaitCall(decl_type, name, callee, method, args,
                              annots=self._call_annots(annots), pos=tok.pos)
        self.restore(mark)
        if annots:
            raise ParseError("annotations are not allowed on await guards", tok.pos)
        guard = self.parse_guard()
        self.expect("op", ";")
        return SAwait(guard, pos=tok.pos)

    def _parse_simple_stmt(self, annots: list[tuple[str, Expr]]) -> Stmt:
        start = self.peek()
        mark = self.mark()
        # declaration: Type name [= rhs] ;
        if self.at("name"):
            try:
                ty = self.parse_type()
                nm = self.accept("name")
                if nm is not None and (self.at("op", "=") or self.at("op", ";")):
                    rhs: Rhs | None = None
                    if self.accept("op", "="):
                        rhs = self.parse_rhs(annots)
                    elif annots:
                        raise ParseError(
                            "annotations are not allowed on bare declarations", start.pos)
                    self.expect("op", ";")
                    self._check_stmt_annots(annots, rhs, start.pos)
                    return SAssign(ty, nm.text, rhs, pos=start.pos)
            except ParseError:
                pass
            self.restore(mark)
        # assignment: name = rhs ;
        if self.at("name") and self.peek(1).kind == "op" and self.peek(1).text == "=":
            name = self.next().text
            self.next()
            rhs = self.parse_rhs(annots)
            self.expect("op", ";")
            self._check_stmt_annots(annots, rhs, start.pos)
            return SAssign(None, name, rhs, pos=start.pos)
        # fire-and-forget call: expr ! m (args) ;
        callee = self.parse_expr()
        if self.accept("op", "!"):
            method = self.expect("name").text
            self.expect("op", "(")
            args = self.parse_args()
            self.expect("op", ")")
            self.expect("op", ";")
            return SCallStmt(callee, method, args,
                             annots=self._call_annots(annots), pos=start.pos)
        raise ParseError("expected a statement", start.pos)

    def _check_stmt_annots(self, annots: list[tuple[str, Expr]], rhs: Rhs | None,
                           pos: Pos) -> None:
        if annots and not isinstance(rhs, (RNew, RCall, RSyncCall)):
            raise ParseError(
                "annotations are only allowed on calls and new-object statements", pos)

    def _call_annots(self, annots: list[tuple[str, Expr]]) -> CallAnnots:
        out = CallAnnots()
        for name, expr in annots:
            if name == "Deadline" and out.deadline is None:
                out.deadline = expr
            elif name == "Critical" and out.critical is None:
                out.critical = expr
            else:
                raise ParseError(f"annotation {name} is not allowed on a call",
                                 expr.pos if hasattr(expr, "pos") else None)
        return out

    def parse_rhs(self, annots: list[tuple[str, Expr]]) -> Rhs:
        tok = self.peek()
        if self.accept("kw", "new"):
            cls = self.expect("name").text
            args: list[Expr] = []
            if self.accept("op", "("):
                args = self.parse_args()
                self.expect("op", ")")
            scheduler = None
            for name, expr in annots:
                if name == "Scheduler" and scheduler is None:
                    scheduler = expr
                else:
                    raise ParseError(
                        f"annotation {name} is not allowed on new", tok.pos)
            return RNew(cls, args, scheduler=scheduler, pos=tok.pos)
        expr = self.parse_expr()
        if self.accept("op", "!"):
            method = self.expect("name").text
            self.expect("op", "(")
            args = self.parse_args()
            self.expect("op", ")")
            return RCall(expr, method, args,
                         annots=self._call_annots(annots), pos=tok.pos)
        if self.accept("op", "."):
            if self.accept("kw", "get"):
                return RGet(expr, pos=tok.pos)
            method = self.expect("name").text
            self.expect("op", "(")
            args = self.parse_args()
            self.expect("op", ")")
            return RSyncCall(expr, method, args,
                             annots=self._call_annots(annots), pos=tok.pos)
        return RExpr(expr)

    def parse_args(self) -> list[Expr]:
        args: list[Expr] = []
        if self.at("op", ")"):
            return args
        args.append(self.parse_expr())
        while self.accept("op", ","):
            args.append(self.parse_expr())
        return args

    # ---------------------------------------------------------- guards

    def parse_guard(self) -> Guard:
        expr = self.parse_expr(guard_atoms=True)
        return self._to_guard(expr)

    def _to_guard(self, expr: Expr) -> Guard:
        if isinstance(expr, BinOp) and expr.op == "&&":
            return GConj(self._to_guard(expr.left), self._to_guard(expr.right),
                         pos=expr.pos)
        if isinstance(expr, _FutAtom):
            return GFut(expr.name, pos=expr.pos)
        if isinstance(expr, _DurAtom):
            return GDuration(expr.best, expr.worst, pos=expr.pos)
        bad = self._find_guard_atom(expr)
        if bad is not None:
            raise ParseError(
                "future and duration guards cannot appear inside expressions", bad)
        return GBool(expr, pos=getattr(expr, "pos", None))

    def _find_guard_atom(self, expr: Expr) -> Pos | None:
        if isinstance(expr, (_FutAtom, _DurAtom)):
            return expr.pos
        children: list[Expr] = []
        if isinstance(expr, Unary):
            children = [expr.operand]
        elif isinstance(expr, BinOp):
            children = [expr.left, expr.right]
        elif isinstance(expr, Apply):
            children = list(expr.args)
        elif isinstance(expr, IfExpr):
            children = [expr.cond, expr.then, expr.els]
        elif isinstance(expr, CaseExpr):
            children = [expr.scrutinee] + [b.body for b in expr.branches]
        for child in children:
            found = self._find_guard_atom(child)
            if found is not None:
                return found
        return None

    # ----------------------------------------------------- expressions

    def parse_expr(self, guard_atoms: bool = False) -> Expr:
        return self._parse_or(guard_atoms)

    def _parse_or(self, ga: bool) -> Expr:
        left = self._parse_and(ga)
        while self.at("op", "||"):
            pos = self.next().pos
            right = self._parse_and(ga)
            left = BinOp("||", left, right, pos=pos)
        return left

    def _parse_and(self, ga: bool) -> Expr:
        left = self._parse_cmp(ga)
        while self.at("op", "&&"):
            pos = self.next().pos
            right = self._parse_cmp(ga)
            left = BinOp("&&", left, right, pos=pos)
        return left

    def _parse_cmp(self, ga: bool) -> Expr:
        left = self._parse_add(ga)
        while self.peek().kind == "op" and self.peek().text in (
                "==", "!=", "<", "<=", ">", ">="):
            op = self.next()
            right = self._parse_add(ga)
            left = BinOp(op.text, left, right, pos=op.pos)
        return left

    def _parse_add(self, ga: bool) -> Expr:
        left = self._parse_mul(ga)
        while self.peek().kind == "op" and self.peek().text in ("+", "-"):
            op = self.next()
            right = self._parse_mul(ga)
            left = BinOp(op.text, left, right, pos=op.pos)
        return left

    def _parse_mul(self, ga: bool) -> Expr:
        left = self._parse_unary(ga)
        while self.peek().kind == "op" and self.peek().text in ("*", "/"):
            op = self.next()
            right = self._parse_unary(ga)
            left = BinOp(op.text, left, right, pos=op.pos)
        return left

    def _parse_unary(self, ga: bool) -> Expr:
        tok = self.peek()
        if tok.kind == "op" and tok.text in ("!", "-"):
            self.next()
            operand = self._parse_unary(ga)
            return Unary(tok.text, operand, pos=tok.pos)
        return self._parse_postfix(ga)

    def _parse_postfix(self, ga: bool) -> Expr:
        expr = self._parse_primary(ga)
        if ga and isinstance(expr, Var) and self.at("op", "?"):
            pos = self.next().pos
            return _FutAtom(expr.name, pos=pos)
        return expr

    def _parse_primary(self, ga: bool) -> Expr:
        tok = self.peek()
        if tok.kind == "int" or tok.kind == "rat":
            self.next()
            return Lit(NumVal(tok.value), pos=tok.pos)
        if tok.kind == "string":
            self.next()
            return Lit(StrVal(tok.value), pos=tok.pos)
        if tok.kind == "kw":
            if tok.text == "True":
                self.next()
                return Lit(TRUE, pos=tok.pos)
            if tok.text == "False":
                self.next()
                return Lit(FALSE, pos=tok.pos)
            if tok.text == "null":
                self.next()
                return Lit(NULL, pos=tok.pos)
            if tok.text == "this":
                self.next()
                return ThisExpr(pos=tok.pos)
            if tok.text == "now":
                self.next()
                return NowExpr(pos=tok.pos)
            if tok.text in ("deadline", "destiny"):
                self.next()
                if self.at("op", "("):
                    # observer call on a reflected process value
                    self.next()
                    args = self.parse_args()
                    self.expect("op", ")")
                    return Apply(tok.text, args, pos=tok.pos)
                if tok.text == "deadline":
                    return DeadlineExpr(pos=tok.pos)
                return DestinyExpr(pos=tok.pos)
            if tok.text == "case":
                return self._parse_case()
            if tok.text == "if":
                self.next()
                cond = self.parse_expr(ga)
                self.expect("kw", "then")
                then = self.parse_expr(ga)
                self.expect("kw", "else")
                els = self.parse_expr(ga)
                return IfExpr(cond, then, els, pos=tok.pos)
            if tok.text == "duration":
                if not ga:
                    raise ParseError(
                        "duration(...) is a statement or guard, not an expression",
                        tok.pos)
                self.next()
                self.expect("op", "(")
                best = self.parse_expr()
                self.expect("op", ",")
                worst = self.parse_expr()
                self.expect("op", ")")
                return _DurAtom(best, worst, pos=tok.pos)
        if tok.kind == "name":
            self.next()
            if self.at("op", "("):
                self.next()
                args = self.parse_args()
                self.expect("op", ")")
                return Apply(tok.text, args, pos=tok.pos)
            return Var(tok.text, pos=tok.pos)
        if tok.kind == "op" and tok.text == "(":
            self.next()
            expr = self.parse_expr(ga)
            self.expect("op", ")")
            return expr
        raise ParseError(f"unexpected {tok.text!r} in expression", tok.pos)

    def _parse_case(self) -> Expr:
        tok = self.expect("kw", "case")
        scrutinee = self.parse_expr()
        self.expect("op", "{")
        branches: list[CaseBranch] = []
        while not self.accept("op", "}"):
            pat = self.parse_pattern()
            self.expect("op", "=>")
            body = self.parse_expr()
            self.expect("op", ";")
            branches.append(CaseBranch(pat, body, pos=tok.pos))
        if not branches:
            raise ParseError("case expression needs at least one branch", tok.pos)
        return CaseExpr(scrutinee, branches, pos=tok.pos)

    def parse_pattern(self) -> Pattern:
        tok = self.peek()
        if tok.kind == "op" and tok.text == "_":
            self.next()
            return PWildcard(pos=tok.pos)
        if tok.kind == "op" and tok.text == "-":
            self.next()
            lit = self.expect("int") if self.at("int") else self.expect("rat")
            return PLit(NumVal(-lit.value), pos=tok.pos)
        if tok.kind in ("int", "rat"):
            self.next()
            return PLit(NumVal(tok.value), pos=tok.pos)
        if tok.kind == "string":
            self.next()
            return PLit(StrVal(tok.value), pos=tok.pos)
        if tok.kind == "kw" and tok.text in ("True", "False", "null"):
            self.next()
            value = {"True": TRUE, "False": FALSE, "null": NULL}[tok.text]
            return PLit(value, pos=tok.pos)
        if tok.kind == "name":
            self.next()
            if self.at("op", "("):
                self.next()
                args: list[Pattern] = []
                if not self.at("op", ")"):
                    args.append(self.parse_pattern())
                    while self.accept("op", ","):
                        args.append(self.parse_pattern())
                self.expect("op", ")")
                return PCtor(tok.text, args, pos=tok.pos)
            return PName(tok.text, pos=tok.pos)
        raise ParseError(f"unexpected {tok.text!r} in pattern", tok.pos)


def parse_model(source: str, filename: str | None = None) -> Model:
    parser = Parser(tokenize(source, filename))
    return parser.parse_model()


def parse_expr(source: str, filename: str | None = None) -> Expr:
    parser = Parser(tokenize(source, filename))
    expr = parser.parse_expr()
    parser.expect("eof")
    return expr
