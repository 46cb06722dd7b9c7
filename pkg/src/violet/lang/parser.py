"""Recursive-descent parser for ConfScript.

The grammar is documented as EBNF in docs/confscript.md.  Syntax errors
carry the position and the set of expected tokens at the failure point.
"""

from __future__ import annotations

from ..diagnostics import ConfScriptError, Diagnostic
from . import ast
from .lexer import Token, tokenize


class _SyntaxFailure(Exception):
    def __init__(self, tok: Token, expected: set[str]):
        self.tok = tok
        self.expected = expected
        super().__init__()


class Parser:
    def __init__(self, tokens: list[Token], file_name: str):
        self.toks = tokens
        self.i = 0
        self.file = file_name

    # -- token plumbing -----------------------------------------------------

    def peek(self) -> Token:
        return self.toks[self.i]

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.peek()
        return t.kind == kind and (text is None or t.text == text)

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind: str, text: str | None = None) -> Token:
        if self.at(kind, text):
            return self.advance()
        raise _SyntaxFailure(self.peek(), {text if text is not None else kind})

    def accept(self, kind: str, text: str | None = None) -> Token | None:
        if self.at(kind, text):
            return self.advance()
        return None

    # -- declarations -------------------------------------------------------

    def parse_program(self) -> ast.Program:
        configs: list[ast.ConfigParam] = []
        inputs: list[ast.InputParam] = []
        functions: list[ast.FunctionDef] = []
        while not self.at("eof"):
            if self.at("keyword", "config"):
                configs.append(self.parse_config())
            elif self.at("keyword", "input"):
                inputs.append(self.parse_input())
            elif self.at("keyword", "extern"):
                functions.append(self.parse_extern())
            elif self.at("keyword", "fn"):
                functions.append(self.parse_fn())
            else:
                raise _SyntaxFailure(self.peek(), {"config", "input", "extern", "fn"})
        return ast.Program(configs, inputs, functions, source_name=self.file)

    def parse_config(self) -> ast.ConfigParam:
        kw = self.expect("keyword", "config")
        name = self.expect("ident")
        self.expect(":")
        domain = self.parse_domain()
        self.expect("=")
        default = self.parse_default_literal(domain)
        self.expect(";")
        return ast.ConfigParam(name.text, domain, default, pos=kw.pos)

    def parse_input(self) -> ast.InputParam:
        kw = self.expect("keyword", "input")
        name = self.expect("ident")
        self.expect(":")
        domain = self.parse_domain()
        self.expect(";")
        return ast.InputParam(name.text, domain, pos=kw.pos)

    def parse_domain(self) -> ast.Domain:
        if self.accept("keyword", "bool"):
            return ast.BoolDomain()
        if self.accept("keyword", "int"):
            self.expect("keyword", "in")
            self.expect("[")
            lo = self.parse_signed_int()
            self.expect(",")
            hi = self.parse_signed_int()
            self.expect("]")
            return ast.IntDomain(lo, hi)
        if self.accept("keyword", "enum"):
            self.expect("{")
            members = [self.expect("ident").text]
            while self.accept(","):
                members.append(self.expect("ident").text)
            self.expect("}")
            return ast.EnumDomain(tuple(members))
        raise _SyntaxFailure(self.peek(), {"bool", "int", "enum"})

    def parse_signed_int(self) -> int:
        neg = self.accept("-") is not None
        tok = self.expect("int")
        v = int(tok.text)
        return -v if neg else v

    def parse_default_literal(self, domain: ast.Domain) -> int:
        tok = self.peek()
        if self.accept("keyword", "true"):
            return 1
        if self.accept("keyword", "false"):
            return 0
        if tok.kind in ("int", "-"):
            return self.parse_signed_int()
        if tok.kind == "ident":
            self.advance()
            if isinstance(domain, ast.EnumDomain) and tok.text in domain.members:
                return domain.members.index(tok.text)
            raise ConfScriptError([
                Diagnostic(self.file, tok.line, tok.col, "error",
                           f"default {tok.text!r} is not a member of the declared enum")
            ])
        raise _SyntaxFailure(tok, {"true", "false", "int", "ident"})

    def parse_extern(self) -> ast.FunctionDef:
        kw = self.expect("keyword", "extern")
        attrs = {"extern"}
        while self.at("keyword", "pure") or self.at("keyword", "benign"):
            attrs.add(self.advance().text)
        self.expect("keyword", "fn")
        name = self.expect("ident")
        params = self.parse_params()
        ret = None
        if self.accept("->"):
            ret = self.parse_domain()
        self.expect(";")
        return ast.FunctionDef(name.text, params, [], frozenset(attrs), ret, pos=kw.pos)

    def parse_fn(self) -> ast.FunctionDef:
        kw = self.expect("keyword", "fn")
        name = self.expect("ident")
        params = self.parse_params()
        body = self.parse_block()
        return ast.FunctionDef(name.text, params, body, frozenset(), None, pos=kw.pos)

    def parse_params(self) -> list[ast.Param]:
        self.expect("(")
        params: list[ast.Param] = []
        if not self.at(")"):
            while True:
                pname = self.expect("ident")
                self.expect(":")
                pdom = self.parse_domain()
                params.append(ast.Param(pname.text, pdom))
                if not self.accept(","):
                    break
        self.expect(")")
        return params

    # -- statements ---------------------------------------------------------

    def parse_block(self) -> list[ast.Stmt]:
        self.expect("{")
        body: list[ast.Stmt] = []
        while not self.at("}"):
            body.append(self.parse_stmt())
        self.expect("}")
        return body

    def parse_stmt(self) -> ast.Stmt:
        if self.at("keyword", "if"):
            return self.parse_if()
        if self.at("keyword", "while"):
            return self.parse_while()
        if self.at("keyword", "cost"):
            return self.parse_cost()
        if self.at("keyword", "return"):
            return self.parse_return()
        if self.at("ident"):
            return self.parse_ident_stmt()
        raise _SyntaxFailure(self.peek(), {"if", "while", "cost", "return", "ident"})

    def parse_if(self) -> ast.If:
        kw = self.expect("keyword", "if")
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        then_body = self.parse_block()
        else_body: list[ast.Stmt] = []
        if self.accept("keyword", "else"):
            if self.at("keyword", "if"):
                else_body = [self.parse_if()]
            else:
                else_body = self.parse_block()
        return ast.If(cond, then_body, else_body, pos=kw.pos)

    def parse_while(self) -> ast.While:
        kw = self.expect("keyword", "while")
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        self.expect("keyword", "bound")
        bound_tok = self.expect("int")
        body = self.parse_block()
        return ast.While(cond, int(bound_tok.text), body, pos=kw.pos)

    def parse_cost(self) -> ast.Cost:
        kw = self.expect("keyword", "cost")
        metric = self.expect("ident")
        amount = self.expect("int")
        self.expect(";")
        return ast.Cost(metric.text, int(amount.text), pos=kw.pos)

    def parse_return(self) -> ast.Return:
        kw = self.expect("keyword", "return")
        value = None
        if not self.at(";"):
            value = self.parse_expr()
        self.expect(";")
        return ast.Return(value, pos=kw.pos)

    def parse_ident_stmt(self) -> ast.Stmt:
        name = self.expect("ident")
        if self.accept(":="):
            if self.at("ident") and self.toks[self.i + 1].kind == "(":
                callee = self.expect("ident")
                args = self.parse_args()
                value: ast.Expr | ast.CallExpr = ast.CallExpr(callee.text, args, pos=callee.pos)
            else:
                value = self.parse_expr()
            self.expect(";")
            return ast.Assign(name.text, value, pos=name.pos)
        if self.at("("):
            args = self.parse_args()
            self.expect(";")
            if name.text == "trace_on":
                return ast.TraceOn(pos=name.pos)
            if name.text == "trace_off":
                return ast.TraceOff(pos=name.pos)
            if name.text == "concretize_all":
                if len(args) != 1 or not isinstance(args[0], ast.Var):
                    raise ConfScriptError([
                        Diagnostic(self.file, name.line, name.col, "error",
                                   "concretize_all takes exactly one variable argument")
                    ])
                return ast.ConcretizeAll(args[0].name, pos=name.pos)
            return ast.CallStmt(name.text, args, pos=name.pos)
        raise _SyntaxFailure(self.peek(), {":=", "("})

    def parse_args(self) -> tuple[ast.Expr, ...]:
        self.expect("(")
        args: list[ast.Expr] = []
        if not self.at(")"):
            while True:
                args.append(self.parse_expr())
                if not self.accept(","):
                    break
        self.expect(")")
        return tuple(args)

    # -- expressions ----------------------------------------------------------

    def parse_expr(self) -> ast.Expr:
        return self.parse_or()

    def parse_or(self) -> ast.Expr:
        left = self.parse_and()
        while self.at("||"):
            op = self.advance()
            right = self.parse_and()
            left = ast.Binary("||", left, right, pos=op.pos)
        return left

    def parse_and(self) -> ast.Expr:
        left = self.parse_not()
        while self.at("&&"):
            op = self.advance()
            right = self.parse_not()
            left = ast.Binary("&&", left, right, pos=op.pos)
        return left

    def parse_not(self) -> ast.Expr:
        if self.at("!"):
            op = self.advance()
            return ast.Unary("!", self.parse_not(), pos=op.pos)
        return self.parse_cmp()

    def parse_cmp(self) -> ast.Expr:
        left = self.parse_sum()
        if self.peek().kind in ast.CMP_OPS:
            op = self.advance()
            right = self.parse_sum()
            return ast.Binary(op.kind, left, right, pos=op.pos)
        return left

    def parse_sum(self) -> ast.Expr:
        left = self.parse_term()
        while self.peek().kind in ("+", "-"):
            op = self.advance()
            right = self.parse_term()
            left = ast.Binary(op.kind, left, right, pos=op.pos)
        return left

    def parse_term(self) -> ast.Expr:
        left = self.parse_atom()
        while self.at("*"):
            op = self.advance()
            right = self.parse_atom()
            left = ast.Binary("*", left, right, pos=op.pos)
        return left

    def parse_atom(self) -> ast.Expr:
        tok = self.peek()
        if tok.kind == "int":
            self.advance()
            return ast.IntLit(int(tok.text), pos=tok.pos)
        if tok.kind == "-":
            self.advance()
            lit = self.expect("int")
            return ast.IntLit(-int(lit.text), pos=tok.pos)
        if self.at("keyword", "true"):
            self.advance()
            return ast.BoolLit(True, pos=tok.pos)
        if self.at("keyword", "false"):
            self.advance()
            return ast.BoolLit(False, pos=tok.pos)
        if tok.kind == "ident":
            self.advance()
            return ast.Var(tok.text, pos=tok.pos)
        if self.accept("("):
            e = self.parse_expr()
            self.expect(")")
            return e
        raise _SyntaxFailure(tok, {"int", "true", "false", "ident", "("})


def parse_tokens(source: str, file_name: str) -> ast.Program:
    """Parse source text; raises ConfScriptError on the first syntax error."""
    toks = tokenize(source, file_name)
    parser = Parser(toks, file_name)
    try:
        return parser.parse_program()
    except _SyntaxFailure as f:
        found = f.tok.text if f.tok.kind != "eof" else "end of input"
        expected = ", ".join(sorted(f.expected))
        raise ConfScriptError([
            Diagnostic(file_name, f.tok.line, f.tok.col, "error",
                       f"expected {expected}, found {found!r}")
        ]) from None
