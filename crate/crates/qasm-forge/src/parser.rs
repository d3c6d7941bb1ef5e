//! Recursive-descent parser producing the AST from a token stream.

use crate::ast::*;
use crate::diag::{Diagnostic, SourceLocation};
use crate::lexer::{Token, TokenKind};

pub fn parse(tokens: Vec<Token>) -> Result<Program, Vec<Diagnostic>> {
    let mut p = Parser {
        toks: tokens,
        pos: 0,
        diags: Vec::new(),
    };
    let prog = p.program();
    if p.diags.is_empty() {
        let mut checker = DupChecker::default();
        checker.check_block(&prog.stmts);
        if checker.diags.is_empty() {
            return Ok(prog);
        }
        return Err(checker.diags);
    }
    Err(p.diags)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    diags: Vec<Diagnostic>,
}

type PResult<T> = Result<T, ()>;

impl Parser {
    fn cur(&self) -> &Token {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    fn next_tok(&self) -> &Token {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)]
    }

    fn at_eof(&self) -> bool {
        self.cur().kind == TokenKind::Eof
    }

    fn bump(&mut self) -> Token {
        let t = self.cur().clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&mut self, msg: impl Into<String>, loc: SourceLocation) -> PResult<T> {
        self.diags.push(Diagnostic::error(msg, loc));
        Err(())
    }

    fn expect(&mut self, text: &str) -> PResult<Token> {
        if self.cur().is(text) {
            Ok(self.bump())
        } else {
            let (found, loc) = (self.cur().text.clone(), self.cur().loc);
            let shown = if found.is_empty() { "<eof>".into() } else { found };
            self.err(format!("expected `{text}`, found `{shown}`"), loc)
        }
    }

    /// Keywords that may double as ordinary names (`def compute` appears in
    /// real programs).
    fn is_soft_ident(&self) -> bool {
        self.cur().kind == TokenKind::Identifier
            || (self.cur().kind == TokenKind::Keyword
                && matches!(self.cur().text.as_str(), "compute" | "action"))
    }

    fn expect_ident(&mut self) -> PResult<(String, SourceLocation)> {
        if self.is_soft_ident() {
            let t = self.bump();
            Ok((t.text, t.loc))
        } else {
            let (found, loc) = (self.cur().text.clone(), self.cur().loc);
            self.err(format!("expected identifier, found `{found}`"), loc)
        }
    }

    /// Skip to just past the next `;` (or a `}`) after a statement error.
    fn synchronize(&mut self) {
        let mut depth = 0usize;
        while !self.at_eof() {
            let t = self.bump();
            match t.text.as_str() {
                ";" if depth == 0 => return,
                "{" => depth += 1,
                "}" => {
                    if depth == 0 {
                        return;
                    }
                    depth -= 1;
                }
                _ => {}
            }
        }
    }

    fn program(&mut self) -> Program {
        let mut prog = Program {
            version: None,
            includes: Vec::new(),
            stmts: Vec::new(),
        };
        if self.cur().is("OPENQASM") {
            self.bump();
            let mut ver = String::new();
            while !self.cur().is(";") && !self.at_eof() {
                ver.push_str(&self.bump().text);
            }
            let _ = self.expect(";");
            prog.version = Some(ver);
        }
        while self.cur().is("include") {
            let loc = self.bump().loc;
            if self.cur().kind == TokenKind::StringLiteral {
                let name = self.bump().text;
                if name != "stdgates.inc" {
                    self.diags
                        .push(Diagnostic::error(format!("unknown include `{name}`"), loc));
                }
                prog.includes.push(name);
            } else {
                self.diags
                    .push(Diagnostic::error("expected string after `include`", loc));
            }
            let _ = self.expect(";");
        }
        while !self.at_eof() {
            match self.statement() {
                Ok(s) => prog.stmts.push(s),
                Err(()) => self.synchronize(),
            }
        }
        prog
    }

    fn block(&mut self) -> PResult<Vec<Stmt>> {
        self.expect("{")?;
        let mut stmts = Vec::new();
        while !self.cur().is("}") {
            if self.at_eof() {
                let loc = self.cur().loc;
                return self.err("unclosed block", loc);
            }
            match self.statement() {
                Ok(s) => stmts.push(s),
                Err(()) => self.synchronize(),
            }
        }
        self.bump();
        Ok(stmts)
    }

    fn statement(&mut self) -> PResult<Stmt> {
        let loc = self.cur().loc;
        let kind = match self.cur().text.as_str() {
            "const" => self.const_decl()?,
            "qubit" => self.qubit_decl()?,
            "bit" => self.bit_decl()?,
            "int" | "int64_t" | "uint" | "float" | "double" | "bool" => self.classical_decl()?,
            "let" => self.alias_decl()?,
            "def" => self.subroutine_def()?,
            "extern" => self.extern_decl()?,
            "return" => {
                self.bump();
                let value = if self.cur().is(";") {
                    None
                } else {
                    Some(self.expr()?)
                };
                self.expect(";")?;
                StmtKind::Return(value)
            }
            "if" => self.if_stmt()?,
            "for" => self.for_stmt()?,
            "while" => {
                self.bump();
                self.expect("(")?;
                let cond = self.expr()?;
                self.expect(")")?;
                let body = self.block()?;
                StmtKind::While { cond, body }
            }
            "compute" if self.next_tok().is("{") => {
                self.bump();
                let compute_block = self.block()?;
                self.expect("action")?;
                let action_block = self.block()?;
                StmtKind::ComputeAction {
                    compute_block,
                    action_block,
                }
            }
            // `compute` or `action` used as an ordinary name.
            "compute" | "action" => self.ident_statement()?,
            "print" => {
                self.bump();
                self.expect("(")?;
                let mut args = Vec::new();
                if !self.cur().is(")") {
                    loop {
                        if self.cur().kind == TokenKind::StringLiteral {
                            args.push(PrintArg::Str(self.bump().text));
                        } else {
                            args.push(PrintArg::Expr(self.expr()?));
                        }
                        if self.cur().is(",") {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                }
                self.expect(")")?;
                self.expect(";")?;
                StmtKind::Print(args)
            }
            "measure" => {
                self.bump();
                let qubit = self.qubit_arg()?;
                self.expect(";")?;
                StmtKind::Measure {
                    target: None,
                    qubit,
                }
            }
            "reset" => {
                self.bump();
                let q = self.qubit_arg()?;
                self.expect(";")?;
                StmtKind::Reset(q)
            }
            "ctrl" | "inv" | "pow" => self.modified_call()?,
            _ if self.cur().kind == TokenKind::Identifier => self.ident_statement()?,
            _ => {
                let (found, loc) = (self.cur().text.clone(), self.cur().loc);
                let shown = if found.is_empty() { "<eof>".into() } else { found };
                return self.err(format!("unexpected token `{shown}`"), loc);
            }
        };
        Ok(Stmt { kind, loc })
    }

    fn const_decl(&mut self) -> PResult<StmtKind> {
        self.bump();
        let (name, _) = self.expect_ident()?;
        self.expect("=")?;
        let value = self.expr()?;
        self.expect(";")?;
        Ok(StmtKind::ConstDecl { name, value })
    }

    fn qubit_decl(&mut self) -> PResult<StmtKind> {
        self.bump();
        let mut decls = Vec::new();
        loop {
            let (name, loc) = self.expect_ident()?;
            let size = if self.cur().is("[") {
                self.bump();
                let e = self.expr()?;
                self.expect("]")?;
                Some(e)
            } else {
                None
            };
            decls.push(QubitDeclarator { name, size, loc });
            if self.cur().is(",") {
                self.bump();
            } else {
                break;
            }
        }
        self.expect(";")?;
        Ok(StmtKind::QubitDecl(decls))
    }

    fn bit_decl(&mut self) -> PResult<StmtKind> {
        self.bump();
        let size = if self.cur().is("[") {
            self.bump();
            let e = self.expr()?;
            self.expect("]")?;
            Some(e)
        } else {
            None
        };
        let decls = self.declarator_list()?;
        Ok(StmtKind::BitDecl { size, decls })
    }

    fn scalar_type(&mut self) -> PResult<ScalarType> {
        let t = self.bump();
        let (kind, mut width) = match t.text.as_str() {
            "bit" => (ScalarKind::Bit, 1),
            "bool" => (ScalarKind::Bool, 1),
            "int" | "uint" => (ScalarKind::Int, 32),
            "int64_t" => (ScalarKind::Int, 64),
            "float" => (ScalarKind::Float, 32),
            "double" => (ScalarKind::Float, 64),
            other => {
                let msg = format!("expected type, found `{other}`");
                return self.err(msg, t.loc);
            }
        };
        if self.cur().is("[") && matches!(kind, ScalarKind::Int | ScalarKind::Float) {
            self.bump();
            let w = self.bump();
            match w.text.parse::<u8>() {
                Ok(n) if matches!(n, 1 | 8 | 16 | 32 | 64) => width = n,
                _ => {
                    let msg = format!("unsupported width `{}`", w.text);
                    return self.err(msg, w.loc);
                }
            }
            self.expect("]")?;
        }
        Ok(ScalarType { kind, width })
    }

    fn classical_decl(&mut self) -> PResult<StmtKind> {
        let ty = self.scalar_type()?;
        let decls = self.declarator_list()?;
        Ok(StmtKind::ClassicalDecl { ty, decls })
    }

    fn declarator_list(&mut self) -> PResult<Vec<Declarator>> {
        let mut decls = Vec::new();
        loop {
            let (name, loc) = self.expect_ident()?;
            let init = if self.cur().is("=") {
                self.bump();
                Some(self.expr()?)
            } else {
                None
            };
            decls.push(Declarator {
                name,
                size: None,
                init,
                loc,
            });
            if self.cur().is(",") {
                self.bump();
            } else {
                break;
            }
        }
        self.expect(";")?;
        Ok(decls)
    }

    fn alias_decl(&mut self) -> PResult<StmtKind> {
        self.bump();
        let (name, _) = self.expect_ident()?;
        self.expect("=")?;
        let (reg, _) = self.expect_ident()?;
        let source = if self.cur().is("[") {
            self.bump();
            let start = self.expr()?;
            self.expect(":")?;
            let a = self.expr()?;
            let (step, stop) = if self.cur().is(":") {
                self.bump();
                (Some(a), self.expr()?)
            } else {
                (None, a)
            };
            self.expect("]")?;
            AliasSource::Slice {
                reg,
                start,
                step,
                stop,
            }
        } else if self.cur().is("||") {
            self.bump();
            let (rhs, _) = self.expect_ident()?;
            AliasSource::Concat(reg, rhs)
        } else {
            let loc = self.cur().loc;
            return self.err("expected `[` slice or `||` concatenation", loc);
        };
        self.expect(";")?;
        Ok(StmtKind::AliasDecl { name, source })
    }

    fn subroutine_def(&mut self) -> PResult<StmtKind> {
        self.bump();
        let (name, _) = self.expect_ident()?;
        let mut params = Vec::new();
        if self.cur().is("(") {
            self.bump();
            while !self.cur().is(")") {
                let ty = self.scalar_type()?;
                self.expect(":")?;
                let (pname, _) = self.expect_ident()?;
                params.push(Param { ty, name: pname });
                if self.cur().is(",") {
                    self.bump();
                }
            }
            self.bump();
        }
        let mut qubit_params = Vec::new();
        while self.cur().is("qubit") {
            self.bump();
            let size = if self.cur().is("[") {
                self.bump();
                let e = self.expr()?;
                self.expect("]")?;
                Some(e)
            } else {
                None
            };
            self.expect(":")?;
            let (qname, _) = self.expect_ident()?;
            qubit_params.push(QubitParam { name: qname, size });
            if self.cur().is(",") && self.next_tok().is("qubit") {
                self.bump();
            } else {
                break;
            }
        }
        let return_type = if self.cur().is("->") {
            self.bump();
            Some(self.scalar_type()?)
        } else {
            None
        };
        let body = self.block()?;
        Ok(StmtKind::SubroutineDef {
            name,
            params,
            qubit_params,
            return_type,
            body,
        })
    }

    fn extern_decl(&mut self) -> PResult<StmtKind> {
        self.bump();
        let (name, _) = self.expect_ident()?;
        self.expect("(")?;
        let mut params = Vec::new();
        while !self.cur().is(")") {
            params.push(self.scalar_type()?);
            if self.cur().is(",") {
                self.bump();
            }
        }
        self.bump();
        let return_type = if self.cur().is("->") {
            self.bump();
            Some(self.scalar_type()?)
        } else {
            None
        };
        self.expect(";")?;
        Ok(StmtKind::ExternDecl {
            name,
            params,
            return_type,
        })
    }

    fn if_stmt(&mut self) -> PResult<StmtKind> {
        self.bump();
        self.expect("(")?;
        let cond = self.expr()?;
        self.expect(")")?;
        let then_body = self.block()?;
        let else_body = if self.cur().is("else") {
            self.bump();
            if self.cur().is("if") {
                let loc = self.cur().loc;
                let kind = self.if_stmt()?;
                vec![Stmt { kind, loc }]
            } else {
                self.block()?
            }
        } else {
            Vec::new()
        };
        Ok(StmtKind::If {
            cond,
            then_body,
            else_body,
        })
    }

    fn for_stmt(&mut self) -> PResult<StmtKind> {
        self.bump();
        if self.cur().is("(") {
            // C-style: for (init; cond; iter) { ... }
            self.bump();
            let init = Box::new(self.statement()?);
            let cond = self.expr()?;
            self.expect(";")?;
            let iter_loc = self.cur().loc;
            let iter_kind = self.simple_assignment_no_semi()?;
            self.expect(")")?;
            let body = self.block()?;
            Ok(StmtKind::ForCStyle {
                init,
                cond,
                iter: Box::new(Stmt {
                    kind: iter_kind,
                    loc: iter_loc,
                }),
                body,
            })
        } else {
            let (var, _) = self.expect_ident()?;
            self.expect("in")?;
            self.expect("[")?;
            let start = self.expr()?;
            self.expect(":")?;
            let a = self.expr()?;
            let (step, stop) = if self.cur().is(":") {
                self.bump();
                (Some(a), self.expr()?)
            } else {
                (None, a)
            };
            self.expect("]")?;
            let body = self.block()?;
            Ok(StmtKind::ForRange {
                var,
                start,
                step,
                stop,
                body,
            })
        }
    }

    /// Assignment forms allowed in a C-style `for` iteration slot.
    fn simple_assignment_no_semi(&mut self) -> PResult<StmtKind> {
        let (name, loc) = self.expect_ident()?;
        let target = LValue {
            name,
            index: None,
            loc,
        };
        let t = self.cur().clone();
        match t.text.as_str() {
            "=" => {
                self.bump();
                let value = self.expr()?;
                Ok(StmtKind::Assignment { target, value })
            }
            "+=" | "-=" | "*=" | "/=" => {
                self.bump();
                let value = self.expr()?;
                Ok(StmtKind::CompoundAssignment {
                    target,
                    op: compound_op(&t.text),
                    value,
                })
            }
            "++" | "--" => {
                self.bump();
                Ok(StmtKind::CompoundAssignment {
                    target,
                    op: if t.text == "++" { BinOp::Add } else { BinOp::Sub },
                    value: Expr::int(1, t.loc),
                })
            }
            other => {
                let msg = format!("expected assignment, found `{other}`");
                self.err(msg, t.loc)
            }
        }
    }

    fn modified_call(&mut self) -> PResult<StmtKind> {
        let mut modifiers = Vec::new();
        loop {
            match self.cur().text.as_str() {
                "ctrl" => {
                    self.bump();
                    modifiers.push(Modifier::Ctrl);
                }
                "inv" => {
                    self.bump();
                    modifiers.push(Modifier::Inv);
                }
                "pow" => {
                    self.bump();
                    self.expect("(")?;
                    let k = self.expr()?;
                    self.expect(")")?;
                    modifiers.push(Modifier::Pow(k));
                }
                _ => break,
            }
            self.expect("@")?;
        }
        let (name, _) = self.expect_ident()?;
        let params = if self.cur().is("(") {
            self.call_params()?
        } else {
            Vec::new()
        };
        let qubit_args = self.qubit_arg_list()?;
        self.expect(";")?;
        Ok(StmtKind::GateCall {
            name,
            modifiers,
            params,
            qubit_args,
        })
    }

    /// Statements that begin with an identifier: gate/subroutine calls,
    /// assignments, compound assignments, and increment expressions.
    fn ident_statement(&mut self) -> PResult<StmtKind> {
        let (name, loc) = self.expect_ident()?;
        let t = self.cur().clone();
        match t.text.as_str() {
            "=" | "+=" | "-=" | "*=" | "/=" => {
                self.bump();
                let target = LValue {
                    name,
                    index: None,
                    loc,
                };
                self.assignment_rhs(target, &t.text)
            }
            "++" | "--" => {
                self.bump();
                self.expect(";")?;
                Ok(StmtKind::CompoundAssignment {
                    target: LValue {
                        name,
                        index: None,
                        loc,
                    },
                    op: if t.text == "++" { BinOp::Add } else { BinOp::Sub },
                    value: Expr::int(1, t.loc),
                })
            }
            "[" => {
                // `name[i] = ...` assignment, or `name[i]` as the first
                // qubit argument of a modifier-free gate call.
                let save = self.pos;
                self.bump();
                let index = self.expr()?;
                self.expect("]")?;
                let t2 = self.cur().clone();
                match t2.text.as_str() {
                    "=" | "+=" | "-=" | "*=" | "/=" => {
                        self.bump();
                        let target = LValue {
                            name,
                            index: Some(Box::new(index)),
                            loc,
                        };
                        self.assignment_rhs(target, &t2.text)
                    }
                    _ => {
                        self.pos = save;
                        self.gate_call_tail(name, Vec::new())
                    }
                }
            }
            "(" => {
                let params = self.call_params()?;
                if self.cur().is(";") {
                    self.bump();
                    Ok(StmtKind::ExpressionStatement(Expr {
                        kind: ExprKind::Call {
                            name,
                            params,
                            qubit_args: Vec::new(),
                        },
                        loc,
                    }))
                } else {
                    self.gate_call_tail(name, params)
                }
            }
            _ if t.kind == TokenKind::Identifier => self.gate_call_tail(name, Vec::new()),
            other => {
                let msg = format!("unexpected token `{other}` after `{name}`");
                self.err(msg, t.loc)
            }
        }
    }

    fn assignment_rhs(&mut self, target: LValue, op_text: &str) -> PResult<StmtKind> {
        if op_text == "=" && self.cur().is("measure") {
            self.bump();
            let qubit = self.qubit_arg()?;
            self.expect(";")?;
            return Ok(StmtKind::Measure {
                target: Some(target),
                qubit,
            });
        }
        let mut value = self.expr()?;
        // `x = sub(theta) qq;` — a subroutine call with trailing qubit args.
        if let ExprKind::Call {
            name,
            params,
            qubit_args,
        } = &value.kind
        {
            if qubit_args.is_empty() && self.cur().kind == TokenKind::Identifier {
                let qargs = self.qubit_arg_list()?;
                value = Expr {
                    kind: ExprKind::Call {
                        name: name.clone(),
                        params: params.clone(),
                        qubit_args: qargs,
                    },
                    loc: value.loc,
                };
            }
        }
        self.expect(";")?;
        if op_text == "=" {
            Ok(StmtKind::Assignment { target, value })
        } else {
            Ok(StmtKind::CompoundAssignment {
                target,
                op: compound_op(op_text),
                value,
            })
        }
    }

    fn gate_call_tail(&mut self, name: String, params: Vec<Expr>) -> PResult<StmtKind> {
        let qubit_args = self.qubit_arg_list()?;
        self.expect(";")?;
        Ok(StmtKind::GateCall {
            name,
            modifiers: Vec::new(),
            params,
            qubit_args,
        })
    }

    fn call_params(&mut self) -> PResult<Vec<Expr>> {
        self.expect("(")?;
        let mut params = Vec::new();
        while !self.cur().is(")") {
            params.push(self.expr()?);
            if self.cur().is(",") {
                self.bump();
            } else {
                break;
            }
        }
        self.expect(")")?;
        Ok(params)
    }

    fn qubit_arg_list(&mut self) -> PResult<Vec<QubitArg>> {
        let mut args = vec![self.qubit_arg()?];
        while self.cur().is(",") {
            self.bump();
            args.push(self.qubit_arg()?);
        }
        Ok(args)
    }

    fn qubit_arg(&mut self) -> PResult<QubitArg> {
        let (name, loc) = self.expect_ident()?;
        if self.cur().is("[") {
            self.bump();
            let idx = self.expr()?;
            self.expect("]")?;
            Ok(QubitArg::Indexed(name, idx, loc))
        } else {
            Ok(QubitArg::Whole(name, loc))
        }
    }

    // ---- expressions, C precedence ----

    fn expr(&mut self) -> PResult<Expr> {
        self.or_expr()
    }

    fn or_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.and_expr()?;
        while self.cur().is("||") {
            let loc = self.bump().loc;
            let rhs = self.and_expr()?;
            lhs = bin(BinOp::Or, lhs, rhs, loc);
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.equality_expr()?;
        while self.cur().is("&&") {
            let loc = self.bump().loc;
            let rhs = self.equality_expr()?;
            lhs = bin(BinOp::And, lhs, rhs, loc);
        }
        Ok(lhs)
    }

    fn equality_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.relational_expr()?;
        loop {
            let op = match self.cur().text.as_str() {
                "==" => BinOp::Eq,
                "!=" => BinOp::Ne,
                _ => break,
            };
            let loc = self.bump().loc;
            let rhs = self.relational_expr()?;
            lhs = bin(op, lhs, rhs, loc);
        }
        Ok(lhs)
    }

    fn relational_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.additive_expr()?;
        loop {
            let op = match self.cur().text.as_str() {
                "<" => BinOp::Lt,
                "<=" => BinOp::Le,
                ">" => BinOp::Gt,
                ">=" => BinOp::Ge,
                _ => break,
            };
            let loc = self.bump().loc;
            let rhs = self.additive_expr()?;
            lhs = bin(op, lhs, rhs, loc);
        }
        Ok(lhs)
    }

    fn additive_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.multiplicative_expr()?;
        loop {
            let op = match self.cur().text.as_str() {
                "+" => BinOp::Add,
                "-" => BinOp::Sub,
                _ => break,
            };
            let loc = self.bump().loc;
            let rhs = self.multiplicative_expr()?;
            lhs = bin(op, lhs, rhs, loc);
        }
        Ok(lhs)
    }

    fn multiplicative_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary_expr()?;
        loop {
            let op = match self.cur().text.as_str() {
                "*" => BinOp::Mul,
                "/" => BinOp::Div,
                "%" => BinOp::Rem,
                _ => break,
            };
            let loc = self.bump().loc;
            let rhs = self.unary_expr()?;
            lhs = bin(op, lhs, rhs, loc);
        }
        Ok(lhs)
    }

    fn unary_expr(&mut self) -> PResult<Expr> {
        let t = self.cur().clone();
        match t.text.as_str() {
            "-" => {
                self.bump();
                let e = self.unary_expr()?;
                Ok(Expr {
                    kind: ExprKind::Unary(UnOp::Neg, Box::new(e)),
                    loc: t.loc,
                })
            }
            "!" => {
                self.bump();
                let e = self.unary_expr()?;
                Ok(Expr {
                    kind: ExprKind::Unary(UnOp::Not, Box::new(e)),
                    loc: t.loc,
                })
            }
            _ => self.primary_expr(),
        }
    }

    fn primary_expr(&mut self) -> PResult<Expr> {
        let t = self.cur().clone();
        match t.kind {
            TokenKind::IntLiteral => {
                self.bump();
                match t.text.parse::<i64>() {
                    Ok(v) => Ok(Expr::int(v, t.loc)),
                    Err(_) => self.err("integer literal out of range", t.loc),
                }
            }
            TokenKind::FloatLiteral => {
                self.bump();
                match t.text.parse::<f64>() {
                    Ok(v) => Ok(Expr {
                        kind: ExprKind::FloatLit(v),
                        loc: t.loc,
                    }),
                    Err(_) => self.err("malformed float literal", t.loc),
                }
            }
            TokenKind::Identifier | TokenKind::Keyword if self.is_soft_ident() => {
                self.bump();
                if self.cur().is("(") {
                    let params = self.call_params()?;
                    Ok(Expr {
                        kind: ExprKind::Call {
                            name: t.text,
                            params,
                            qubit_args: Vec::new(),
                        },
                        loc: t.loc,
                    })
                } else if self.cur().is("[") {
                    self.bump();
                    let idx = self.expr()?;
                    self.expect("]")?;
                    Ok(Expr {
                        kind: ExprKind::Index(t.text, Box::new(idx)),
                        loc: t.loc,
                    })
                } else {
                    Ok(Expr {
                        kind: ExprKind::Ident(t.text),
                        loc: t.loc,
                    })
                }
            }
            _ if t.is("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect(")")?;
                Ok(e)
            }
            _ => {
                let shown = if t.text.is_empty() {
                    "<eof>".into()
                } else {
                    t.text.clone()
                };
                self.err(format!("expected expression, found `{shown}`"), t.loc)
            }
        }
    }
}

fn bin(op: BinOp, lhs: Expr, rhs: Expr, loc: SourceLocation) -> Expr {
    Expr {
        kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
        loc,
    }
}

fn compound_op(text: &str) -> BinOp {
    match text {
        "+=" => BinOp::Add,
        "-=" => BinOp::Sub,
        "*=" => BinOp::Mul,
        "/=" => BinOp::Div,
        _ => unreachable!("not a compound operator"),
    }
}

/// Post-parse check for duplicate declarations within one scope.
#[derive(Default)]
struct DupChecker {
    diags: Vec<Diagnostic>,
}

impl DupChecker {
    fn check_block(&mut self, stmts: &[Stmt]) {
        let mut seen: std::collections::HashMap<&str, SourceLocation> =
            std::collections::HashMap::new();
        for s in stmts {
            match &s.kind {
                StmtKind::ConstDecl { name, .. } | StmtKind::AliasDecl { name, .. } => {
                    self.declare(&mut seen, name, s.loc);
                }
                StmtKind::QubitDecl(ds) => {
                    for d in ds {
                        self.declare(&mut seen, &d.name, d.loc);
                    }
                }
                StmtKind::BitDecl { decls, .. } | StmtKind::ClassicalDecl { decls, .. } => {
                    for d in decls {
                        self.declare(&mut seen, &d.name, d.loc);
                    }
                }
                StmtKind::SubroutineDef { name, body, .. } => {
                    self.declare(&mut seen, name, s.loc);
                    self.check_block(body);
                }
                StmtKind::ExternDecl { name, .. } => {
                    self.declare(&mut seen, name, s.loc);
                }
                StmtKind::If {
                    then_body,
                    else_body,
                    ..
                } => {
                    self.check_block(then_body);
                    self.check_block(else_body);
                }
                StmtKind::ForRange { body, .. }
                | StmtKind::ForCStyle { body, .. }
                | StmtKind::While { body, .. } => self.check_block(body),
                StmtKind::ComputeAction {
                    compute_block,
                    action_block,
                } => {
                    self.check_block(compute_block);
                    self.check_block(action_block);
                }
                _ => {}
            }
        }
    }

    fn declare<'a>(
        &mut self,
        seen: &mut std::collections::HashMap<&'a str, SourceLocation>,
        name: &'a str,
        loc: SourceLocation,
    ) {
        if seen.insert(name, loc).is_some() {
            self.diags.push(Diagnostic::error(
                format!("duplicate declaration of `{name}` in the same scope"),
                loc,
            ));
        }
    }
}
