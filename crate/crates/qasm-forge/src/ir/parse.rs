//! Parser for the textual IR emitted by [`super::print::print_ir`].

use super::*;
use crate::diag::Diagnostic;
use std::collections::HashMap;

pub fn parse_ir(text: &str) -> Result<IrModule, Diagnostic> {
    let toks = lex(text)?;
    let mut p = IrParser {
        toks,
        pos: 0,
        module: IrModule::new(),
        values: HashMap::new(),
    };
    p.module_body()?;
    Ok(p.module)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Value(String),
    Global(String),
    Seg(String),
    Int(i64),
    Float(f64),
    Str(String),
    Sym(char),
    Arrow,
    Eof,
}

impl Tok {
    fn text(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::Value(s) | Tok::Global(s) | Tok::Seg(s) | Tok::Str(s) => s.clone(),
            Tok::Int(v) => v.to_string(),
            Tok::Float(v) => v.to_string(),
            Tok::Sym(c) => c.to_string(),
            Tok::Arrow => "->".into(),
            Tok::Eof => "<eof>".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, u32)>, Diagnostic> {
    let mut out = Vec::new();
    let b = text.as_bytes();
    let mut i = 0usize;
    let mut line = 1u32;
    let err = |msg: String, line: u32| {
        Diagnostic::error(msg, crate::diag::SourceLocation::new(line, 0, 0))
    };
    while i < b.len() {
        let c = b[i];
        match c {
            b'\n' => {
                line += 1;
                i += 1;
            }
            _ if c.is_ascii_whitespace() => i += 1,
            b'/' if b.get(i + 1) == Some(&b'/') => {
                while i < b.len() && b[i] != b'\n' {
                    i += 1;
                }
            }
            b';' => {
                while i < b.len() && b[i] != b'\n' {
                    i += 1;
                }
            }
            b'%' | b'@' | b'#' | b'!' => {
                let start = i;
                i += 1;
                while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_' || b[i] == b'.') {
                    i += 1;
                }
                let s = &text[start + 1..i];
                let tok = match c {
                    b'%' => Tok::Value(s.to_string()),
                    b'@' => Tok::Global(s.to_string()),
                    b'#' => Tok::Seg(s.to_string()),
                    _ => Tok::Ident(format!("!{s}")),
                };
                out.push((tok, line));
            }
            b'"' => {
                i += 1;
                let mut s = String::new();
                loop {
                    if i >= b.len() {
                        return Err(err("unterminated string in IR text".into(), line));
                    }
                    match b[i] {
                        b'"' => {
                            i += 1;
                            break;
                        }
                        b'\\' => {
                            let esc = b.get(i + 1).copied().unwrap_or(b'\\');
                            s.push(match esc {
                                b'n' => '\n',
                                other => other as char,
                            });
                            i += 2;
                        }
                        other => {
                            s.push(other as char);
                            i += 1;
                        }
                    }
                }
                out.push((Tok::Str(s), line));
            }
            _ if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_' || b[i] == b'.') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), line));
            }
            _ if c.is_ascii_digit()
                || (c == b'-' && b.get(i + 1).is_some_and(|d| d.is_ascii_digit())) =>
            {
                let start = i;
                if c == b'-' {
                    i += 1;
                }
                let mut is_float = false;
                while i < b.len() {
                    match b[i] {
                        d if d.is_ascii_digit() => i += 1,
                        b'.' if !is_float => {
                            is_float = true;
                            i += 1;
                        }
                        b'e' | b'E' => {
                            is_float = true;
                            i += 1;
                            if matches!(b.get(i), Some(b'+') | Some(b'-')) {
                                i += 1;
                            }
                        }
                        b'x' => break,
                        _ => break,
                    }
                }
                let s = &text[start..i];
                let tok = if is_float {
                    Tok::Float(s.parse().map_err(|_| err(format!("bad float `{s}`"), line))?)
                } else {
                    Tok::Int(s.parse().map_err(|_| err(format!("bad int `{s}`"), line))?)
                };
                out.push((tok, line));
            }
            b'-' if b.get(i + 1) == Some(&b'>') => {
                out.push((Tok::Arrow, line));
                i += 2;
            }
            b'{' | b'}' | b'(' | b')' | b'[' | b']' | b'<' | b'>' | b',' | b':' | b'=' | b'?' => {
                out.push((Tok::Sym(c as char), line));
                i += 1;
            }
            other => {
                return Err(err(format!("unexpected character `{}`", other as char), line));
            }
        }
    }
    out.push((Tok::Eof, line));
    Ok(out)
}

struct IrParser {
    toks: Vec<(Tok, u32)>,
    pos: usize,
    module: IrModule,
    values: HashMap<String, ValueId>,
}

impl IrParser {
    fn cur(&self) -> &Tok {
        &self.toks[self.pos.min(self.toks.len() - 1)].0
    }

    fn line(&self) -> u32 {
        self.toks[self.pos.min(self.toks.len() - 1)].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.cur().clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T, Diagnostic> {
        Err(Diagnostic::error(
            format!("IR parse: {}", msg.into()),
            crate::diag::SourceLocation::new(self.line(), 0, 0),
        ))
    }

    fn expect_sym(&mut self, c: char) -> Result<(), Diagnostic> {
        if *self.cur() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            self.fail(format!("expected `{c}`, found `{}`", self.cur().text()))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), Diagnostic> {
        if matches!(self.cur(), Tok::Ident(s) if s == kw) {
            self.bump();
            Ok(())
        } else {
            self.fail(format!("expected `{kw}`, found `{}`", self.cur().text()))
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.cur(), Tok::Ident(s) if s == kw)
    }

    fn value_ref(&mut self) -> Result<ValueId, Diagnostic> {
        match self.bump() {
            Tok::Value(name) => match self.values.get(&name) {
                Some(v) => Ok(*v),
                None => self.fail(format!("use of undefined value `%{name}`")),
            },
            other => self.fail(format!("expected value, found `{}`", other.text())),
        }
    }

    fn module_body(&mut self) -> Result<(), Diagnostic> {
        self.expect_kw("module")?;
        self.expect_sym('{')?;
        loop {
            if self.is_kw("global") {
                self.bump();
                let name = match self.bump() {
                    Tok::Global(n) => n,
                    other => return self.fail(format!("expected @name, found `{}`", other.text())),
                };
                self.expect_sym('=')?;
                let raw = self.bump();
                self.expect_sym(':')?;
                let ty = self.parse_type()?;
                let value = match (raw, &ty) {
                    (Tok::Int(v), SemType::Int(_)) => ConstValue::Int(v),
                    (Tok::Int(v), SemType::Index) => ConstValue::Index(v),
                    (Tok::Int(v), SemType::Float(_)) => ConstValue::Float(v as f64),
                    (Tok::Float(v), SemType::Float(_)) => ConstValue::Float(v),
                    (Tok::Ident(s), SemType::Bool) if s == "true" => ConstValue::Bool(true),
                    (Tok::Ident(s), SemType::Bool) if s == "false" => ConstValue::Bool(false),
                    (t, _) => return self.fail(format!("bad global value `{}`", t.text())),
                };
                self.module.globals.push((name, value));
            } else if self.is_kw("func") {
                self.function()?;
            } else if *self.cur() == Tok::Sym('}') {
                self.bump();
                return Ok(());
            } else {
                return self.fail(format!("expected `global`, `func` or `}}`, found `{}`", self.cur().text()));
            }
        }
    }

    fn parse_type(&mut self) -> Result<SemType, Diagnostic> {
        let t = self.bump();
        let name = match t {
            Tok::Ident(s) => s,
            other => return self.fail(format!("expected type, found `{}`", other.text())),
        };
        match name.as_str() {
            "!q.qubit" => Ok(SemType::Qubit),
            "!q.result" => Ok(SemType::Result),
            "!q.array" => {
                self.expect_sym('<')?;
                let size = match self.bump() {
                    Tok::Int(n) => Some(n as u64),
                    Tok::Sym('?') => None,
                    other => return self.fail(format!("bad array size `{}`", other.text())),
                };
                self.expect_sym('>')?;
                Ok(SemType::QubitArray(size))
            }
            "index" => Ok(SemType::Index),
            "memref" => {
                self.expect_sym('<')?;
                let (size, elem) = match self.bump() {
                    // `memref<20xi1>` lexes as Int(20) + Ident("xi1").
                    Tok::Int(n) => match self.bump() {
                        Tok::Ident(s) if s.starts_with('x') => {
                            let elem = scalar_type_from(&s[1..]).ok_or_else(|| {
                                Diagnostic::error_nowhere(format!("bad memref element `{s}`"))
                            })?;
                            (Some(n as u64), elem)
                        }
                        other => return self.fail(format!("bad memref `{}`", other.text())),
                    },
                    Tok::Ident(s) => (None, scalar_type_from(&s).ok_or_else(|| {
                        Diagnostic::error_nowhere(format!("bad memref element `{s}`"))
                    })?),
                    other => return self.fail(format!("bad memref `{}`", other.text())),
                };
                self.expect_sym('>')?;
                Ok(SemType::Cell(Box::new(elem), size))
            }
            other => scalar_type_from(other)
                .ok_or_else(|| Diagnostic::error_nowhere(format!("unknown type `{other}`"))),
        }
    }

    fn function(&mut self) -> Result<(), Diagnostic> {
        self.bump(); // func
        let is_private = if self.is_kw("private") {
            self.bump();
            true
        } else {
            false
        };
        let name = match self.bump() {
            Tok::Global(n) => n,
            other => return self.fail(format!("expected @name, found `{}`", other.text())),
        };
        self.expect_sym('(')?;
        let mut param_names = Vec::new();
        let mut param_types = Vec::new();
        while *self.cur() != Tok::Sym(')') {
            if is_private {
                param_types.push(self.parse_type()?);
            } else {
                let pname = match self.bump() {
                    Tok::Value(n) => n,
                    other => return self.fail(format!("expected %arg, found `{}`", other.text())),
                };
                self.expect_sym(':')?;
                param_names.push(pname);
                param_types.push(self.parse_type()?);
            }
            if *self.cur() == Tok::Sym(',') {
                self.bump();
            }
        }
        self.bump(); // )
        let mut result_types = Vec::new();
        if *self.cur() == Tok::Arrow {
            self.bump();
            result_types.push(self.parse_type()?);
            while *self.cur() == Tok::Sym(',') {
                self.bump();
                result_types.push(self.parse_type()?);
            }
        }
        if is_private {
            self.module.functions.push(FunctionDef {
                name,
                param_types,
                result_types,
                entry: None,
            });
            return Ok(());
        }
        self.values.clear();
        let entry = self.module.new_block(param_types.clone());
        let args = self.module.block(entry).args.clone();
        for (n, v) in param_names.iter().zip(args) {
            self.values.insert(n.clone(), v);
        }
        self.expect_sym('{')?;
        self.parse_block_ops(entry)?;
        self.module.functions.push(FunctionDef {
            name,
            param_types,
            result_types,
            entry: Some(entry),
        });
        Ok(())
    }

    /// Parse ops until the closing `}` (consumed).
    fn parse_block_ops(&mut self, block: BlockId) -> Result<(), Diagnostic> {
        loop {
            if *self.cur() == Tok::Sym('}') {
                self.bump();
                return Ok(());
            }
            if *self.cur() == Tok::Eof {
                return self.fail("unexpected end of IR text");
            }
            self.parse_op(block)?;
        }
    }

    fn parse_op(&mut self, block: BlockId) -> Result<(), Diagnostic> {
        // Optional result list.
        let mut result_names = Vec::new();
        while let Tok::Value(_) = self.cur() {
            if let Tok::Value(n) = self.bump() {
                result_names.push(n);
            }
            if *self.cur() == Tok::Sym(',') {
                self.bump();
            } else {
                break;
            }
        }
        if !result_names.is_empty() {
            self.expect_sym('=')?;
        }
        let mnemonic = match self.bump() {
            Tok::Ident(s) => s,
            other => return self.fail(format!("expected op, found `{}`", other.text())),
        };
        let op_id = self.parse_op_body(&mnemonic, block)?;
        let results = self.module.op(op_id).results.clone();
        if results.len() != result_names.len() {
            return self.fail(format!(
                "op `{mnemonic}` produced {} results, {} named",
                results.len(),
                result_names.len()
            ));
        }
        for (n, v) in result_names.into_iter().zip(results) {
            self.values.insert(n, v);
        }
        Ok(())
    }

    fn segment(&mut self) -> Result<Segment, Diagnostic> {
        if let Tok::Seg(s) = self.cur() {
            let seg = match s.as_str() {
                "compute" => Segment::Compute,
                "uncompute" => Segment::Uncompute,
                other => return self.fail(format!("unknown segment `{other}`")),
            };
            self.bump();
            Ok(seg)
        } else {
            Ok(Segment::None)
        }
    }

    fn result_type_list(&mut self) -> Result<Vec<SemType>, Diagnostic> {
        self.expect_sym(':')?;
        let mut types = vec![self.parse_type()?];
        while *self.cur() == Tok::Sym(',') {
            self.bump();
            types.push(self.parse_type()?);
        }
        Ok(types)
    }

    fn finish_op(
        &mut self,
        block: BlockId,
        kind: OpKind,
        operands: Vec<ValueId>,
        result_types: Vec<SemType>,
        segment: Segment,
    ) -> OpId {
        let id = self.module.make_op(kind, operands, result_types, segment);
        self.module.push_op(block, id);
        id
    }

    fn parse_region_block(&mut self, arg_types: Vec<SemType>) -> Result<BlockId, Diagnostic> {
        let b = self.module.new_block(arg_types);
        self.expect_sym('{')?;
        self.parse_block_ops(b)?;
        Ok(b)
    }

    fn parse_op_body(&mut self, mnemonic: &str, block: BlockId) -> Result<OpId, Diagnostic> {
        match mnemonic {
            "q.alloc" => {
                self.expect_sym('{')?;
                self.expect_kw("size")?;
                self.expect_sym('=')?;
                let size = match self.bump() {
                    Tok::Int(n) => n as u64,
                    other => return self.fail(format!("bad size `{}`", other.text())),
                };
                self.expect_sym('}')?;
                let types = self.result_type_list()?;
                Ok(self.finish_op(block, OpKind::QAlloc { size }, vec![], types, Segment::None))
            }
            "q.dealloc" => {
                let arr = self.value_ref()?;
                Ok(self.finish_op(block, OpKind::QDealloc, vec![arr], vec![], Segment::None))
            }
            "q.extract" => {
                let arr = self.value_ref()?;
                self.expect_sym('[')?;
                let (index, operands) = match self.cur().clone() {
                    Tok::Int(i) => {
                        self.bump();
                        (Some(i), vec![arr])
                    }
                    Tok::Value(_) => {
                        let v = self.value_ref()?;
                        (None, vec![arr, v])
                    }
                    other => return self.fail(format!("bad extract index `{}`", other.text())),
                };
                self.expect_sym(']')?;
                let types = self.result_type_list()?;
                let seg = self.segment()?;
                Ok(self.finish_op(block, OpKind::Extract { index }, operands, types, seg))
            }
            "q.measure" => {
                let q = self.value_ref()?;
                let types = self.result_type_list()?;
                Ok(self.finish_op(block, OpKind::Measure, vec![q], types, Segment::None))
            }
            "q.reset" => {
                let q = self.value_ref()?;
                let types = self.result_type_list()?;
                let seg = self.segment()?;
                Ok(self.finish_op(block, OpKind::Reset, vec![q], types, seg))
            }
            "q.slice" => {
                let arr = self.value_ref()?;
                self.expect_sym('[')?;
                let start = self.int_tok()?;
                self.expect_sym(':')?;
                let step = self.int_tok()?;
                self.expect_sym(':')?;
                let stop = self.int_tok()?;
                self.expect_sym(']')?;
                let types = self.result_type_list()?;
                Ok(self.finish_op(
                    block,
                    OpKind::Slice { start, step, stop },
                    vec![arr],
                    types,
                    Segment::None,
                ))
            }
            "q.concat" => {
                let a = self.value_ref()?;
                self.expect_sym(',')?;
                let b = self.value_ref()?;
                let types = self.result_type_list()?;
                Ok(self.finish_op(block, OpKind::Concat, vec![a, b], types, Segment::None))
            }
            "q.ctrl_region" => {
                self.expect_sym('(')?;
                let ctrl = self.value_ref()?;
                self.expect_sym(')')?;
                let body = self.parse_region_block(vec![])?;
                let id = self.finish_op(block, OpKind::CtrlRegion, vec![ctrl], vec![], Segment::None);
                self.module.op_mut(id).regions = vec![body];
                Ok(id)
            }
            "q.adj_region" => {
                let body = self.parse_region_block(vec![])?;
                let id = self.finish_op(block, OpKind::AdjRegion, vec![], vec![], Segment::None);
                self.module.op_mut(id).regions = vec![body];
                Ok(id)
            }
            "q.pow_region" => {
                self.expect_sym('(')?;
                let (power, operands) = match self.cur().clone() {
                    Tok::Int(k) => {
                        self.bump();
                        (Some(k), vec![])
                    }
                    _ => (None, vec![self.value_ref()?]),
                };
                self.expect_sym(')')?;
                let body = self.parse_region_block(vec![])?;
                let id = self.finish_op(block, OpKind::PowRegion { power }, operands, vec![], Segment::None);
                self.module.op_mut(id).regions = vec![body];
                Ok(id)
            }
            "constant" => {
                let raw = self.bump();
                let types = self.result_type_list()?;
                let value = match (raw, &types[0]) {
                    (Tok::Int(v), SemType::Int(_)) => ConstValue::Int(v),
                    (Tok::Int(v), SemType::Index) => ConstValue::Index(v),
                    (Tok::Int(v), SemType::Float(_)) => ConstValue::Float(v as f64),
                    (Tok::Float(v), SemType::Float(_)) => ConstValue::Float(v),
                    (Tok::Ident(s), SemType::Bool) if s == "true" => ConstValue::Bool(true),
                    (Tok::Ident(s), SemType::Bool) if s == "false" => ConstValue::Bool(false),
                    (t, _) => return self.fail(format!("bad constant `{}`", t.text())),
                };
                Ok(self.finish_op(block, OpKind::Constant(value), vec![], types, Segment::None))
            }
            "get_global" => {
                let name = match self.bump() {
                    Tok::Global(n) => n,
                    other => return self.fail(format!("expected @name, found `{}`", other.text())),
                };
                let types = self.result_type_list()?;
                Ok(self.finish_op(block, OpKind::GetGlobal { name }, vec![], types, Segment::None))
            }
            "cell" => {
                let types = self.result_type_list()?;
                let size = match &types[0] {
                    SemType::Cell(_, s) => *s,
                    _ => return self.fail("cell result must be memref"),
                };
                Ok(self.finish_op(block, OpKind::CellAlloc { size }, vec![], types, Segment::None))
            }
            "load" => {
                let cell = self.value_ref()?;
                let mut operands = vec![cell];
                if *self.cur() == Tok::Sym('[') {
                    self.bump();
                    operands.push(self.value_ref()?);
                    self.expect_sym(']')?;
                }
                let types = self.result_type_list()?;
                Ok(self.finish_op(block, OpKind::Load, operands, types, Segment::None))
            }
            "store" => {
                let v = self.value_ref()?;
                self.expect_sym(',')?;
                let cell = self.value_ref()?;
                let mut operands = vec![v, cell];
                if *self.cur() == Tok::Sym('[') {
                    self.bump();
                    operands.push(self.value_ref()?);
                    self.expect_sym(']')?;
                }
                Ok(self.finish_op(block, OpKind::Store, operands, vec![], Segment::None))
            }
            "cmpi" | "cmpf" => {
                let float = mnemonic == "cmpf";
                let pred_name = match self.bump() {
                    Tok::Ident(s) => s,
                    other => return self.fail(format!("bad predicate `{}`", other.text())),
                };
                let pred = match pred_name.trim_start_matches('o') {
                    "eq" => CmpPred::Eq,
                    "ne" => CmpPred::Ne,
                    "slt" | "lt" => CmpPred::Lt,
                    "sle" | "le" => CmpPred::Le,
                    "sgt" | "gt" => CmpPred::Gt,
                    "sge" | "ge" => CmpPred::Ge,
                    other => return self.fail(format!("unknown predicate `{other}`")),
                };
                self.expect_sym(',')?;
                let a = self.value_ref()?;
                self.expect_sym(',')?;
                let b = self.value_ref()?;
                let types = self.result_type_list()?;
                Ok(self.finish_op(block, OpKind::Cmp { pred, float }, vec![a, b], types, Segment::None))
            }
            "sitofp" => {
                let a = self.value_ref()?;
                let types = self.result_type_list()?;
                Ok(self.finish_op(block, OpKind::Cast(CastKind::SiToFp), vec![a], types, Segment::None))
            }
            "index_cast" => {
                let a = self.value_ref()?;
                let types = self.result_type_list()?;
                Ok(self.finish_op(block, OpKind::Cast(CastKind::IndexCast), vec![a], types, Segment::None))
            }
            "scf.if" => {
                let cond = self.value_ref()?;
                let then_block = self.parse_region_block(vec![])?;
                let else_block = if self.is_kw("else") {
                    self.bump();
                    self.parse_region_block(vec![])?
                } else {
                    self.module.new_block(vec![])
                };
                let id = self.finish_op(block, OpKind::If, vec![cond], vec![], Segment::None);
                self.module.op_mut(id).regions = vec![then_block, else_block];
                Ok(id)
            }
            "affine.for" => {
                let iv_name = match self.bump() {
                    Tok::Value(n) => n,
                    other => return self.fail(format!("expected IV, found `{}`", other.text())),
                };
                self.expect_sym('=')?;
                let mut operands = Vec::new();
                let lower = self.bound(&mut operands)?;
                self.expect_kw("to")?;
                let upper = self.bound(&mut operands)?;
                self.expect_kw("step")?;
                let step = self.int_tok()?;
                self.expect_sym('{')?;
                let seg = self.segment()?;
                let body = self.module.new_block(vec![SemType::Index]);
                let iv = self.module.block(body).args[0];
                self.values.insert(iv_name, iv);
                self.parse_block_ops(body)?;
                let id = self.finish_op(block, OpKind::For { lower, upper, step }, operands, vec![], seg);
                self.module.op_mut(id).regions = vec![body];
                Ok(id)
            }
            "scf.while" => {
                let cond = self.parse_region_block(vec![])?;
                self.expect_kw("do")?;
                let body = self.parse_region_block(vec![])?;
                let id = self.finish_op(block, OpKind::While, vec![], vec![], Segment::None);
                self.module.op_mut(id).regions = vec![cond, body];
                Ok(id)
            }
            "yield" => {
                let v = self.value_ref()?;
                Ok(self.finish_op(block, OpKind::Yield, vec![v], vec![], Segment::None))
            }
            "call" => {
                let callee = match self.bump() {
                    Tok::Global(n) => n,
                    other => return self.fail(format!("expected @callee, found `{}`", other.text())),
                };
                self.expect_sym('(')?;
                let mut operands = Vec::new();
                while *self.cur() != Tok::Sym(')') {
                    operands.push(self.value_ref()?);
                    if *self.cur() == Tok::Sym(',') {
                        self.bump();
                    }
                }
                self.bump();
                let types = if *self.cur() == Tok::Sym(':') {
                    self.result_type_list()?
                } else {
                    vec![]
                };
                Ok(self.finish_op(block, OpKind::Call { callee }, operands, types, Segment::None))
            }
            "return" => {
                let mut operands = Vec::new();
                while let Tok::Value(_) = self.cur() {
                    operands.push(self.value_ref()?);
                    if *self.cur() == Tok::Sym(',') {
                        self.bump();
                    }
                }
                if *self.cur() == Tok::Sym(':') {
                    let _ = self.result_type_list()?;
                }
                Ok(self.finish_op(block, OpKind::Return, operands, vec![], Segment::None))
            }
            "print" => {
                self.expect_sym('(')?;
                let mut pieces = Vec::new();
                let mut operands = Vec::new();
                while *self.cur() != Tok::Sym(')') {
                    match self.cur().clone() {
                        Tok::Str(s) => {
                            self.bump();
                            pieces.push(PrintPiece::Str(s));
                        }
                        _ => {
                            let v = self.value_ref()?;
                            pieces.push(PrintPiece::Arg(operands.len()));
                            operands.push(v);
                        }
                    }
                    if *self.cur() == Tok::Sym(',') {
                        self.bump();
                    }
                }
                self.bump();
                Ok(self.finish_op(block, OpKind::Print { pieces }, operands, vec![], Segment::None))
            }
            name if name.starts_with("qvs.") => {
                let gate_name = name.trim_start_matches("qvs.").to_string();
                let info = match crate::gates::lookup(&gate_name) {
                    Some(i) => i,
                    None => return self.fail(format!("unknown gate `{gate_name}`")),
                };
                let mut angles: Option<Vec<f64>> = None;
                let mut operands = Vec::new();
                if *self.cur() == Tok::Sym('(') {
                    self.bump();
                    let mut lits = Vec::new();
                    let mut vals = Vec::new();
                    while *self.cur() != Tok::Sym(')') {
                        match self.cur().clone() {
                            Tok::Float(v) => {
                                self.bump();
                                lits.push(v);
                            }
                            Tok::Int(v) => {
                                self.bump();
                                lits.push(v as f64);
                            }
                            _ => vals.push(self.value_ref()?),
                        }
                        if *self.cur() == Tok::Sym(',') {
                            self.bump();
                        }
                    }
                    self.bump();
                    if !lits.is_empty() && !vals.is_empty() {
                        return self.fail("gate parameters must be all literal or all values");
                    }
                    if lits.is_empty() {
                        operands.extend(vals);
                    } else {
                        angles = Some(lits);
                    }
                }
                if info.num_params == 0 {
                    angles = Some(vec![]);
                }
                while let Tok::Value(_) = self.cur() {
                    operands.push(self.value_ref()?);
                    if *self.cur() == Tok::Sym(',') {
                        self.bump();
                    } else {
                        break;
                    }
                }
                let types = self.result_type_list()?;
                let seg = self.segment()?;
                Ok(self.finish_op(
                    block,
                    OpKind::Gate {
                        name: gate_name,
                        angles,
                    },
                    operands,
                    types,
                    seg,
                ))
            }
            name => {
                if let Some(kind) = arith_from_name(name) {
                    let a = self.value_ref()?;
                    let mut operands = vec![a];
                    if !kind.is_unary() {
                        self.expect_sym(',')?;
                        operands.push(self.value_ref()?);
                    }
                    let types = self.result_type_list()?;
                    Ok(self.finish_op(block, OpKind::Arith(kind), operands, types, Segment::None))
                } else {
                    self.fail(format!("unknown op `{name}`"))
                }
            }
        }
    }

    fn int_tok(&mut self) -> Result<i64, Diagnostic> {
        match self.bump() {
            Tok::Int(v) => Ok(v),
            other => self.fail(format!("expected integer, found `{}`", other.text())),
        }
    }

    fn bound(&mut self, operands: &mut Vec<ValueId>) -> Result<Bound, Diagnostic> {
        match self.cur().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(Bound::Const(v))
            }
            Tok::Value(_) => {
                operands.push(self.value_ref()?);
                Ok(Bound::Value)
            }
            other => self.fail(format!("bad loop bound `{}`", other.text())),
        }
    }
}

fn scalar_type_from(s: &str) -> Option<SemType> {
    match s {
        "i1" => Some(SemType::Bool),
        "i8" => Some(SemType::Int(8)),
        "i16" => Some(SemType::Int(16)),
        "i32" => Some(SemType::Int(32)),
        "i64" => Some(SemType::Int(64)),
        "f32" => Some(SemType::Float(32)),
        "f64" => Some(SemType::Float(64)),
        "index" => Some(SemType::Index),
        _ => None,
    }
}

fn arith_from_name(name: &str) -> Option<ArithKind> {
    Some(match name {
        "addi" => ArithKind::AddI,
        "subi" => ArithKind::SubI,
        "muli" => ArithKind::MulI,
        "divi" => ArithKind::DivI,
        "remi" => ArithKind::RemI,
        "addf" => ArithKind::AddF,
        "subf" => ArithKind::SubF,
        "mulf" => ArithKind::MulF,
        "divf" => ArithKind::DivF,
        "remf" => ArithKind::RemF,
        "negf" => ArithKind::NegF,
        "andi" => ArithKind::AndI,
        "ori" => ArithKind::OrI,
        "xori" => ArithKind::XorI,
        _ => return None,
    })
}
