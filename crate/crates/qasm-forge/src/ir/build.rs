//! AST-to-IR translation: depth-first statement walk emitting structured ops,
//! with the symbol table threading qubit use-define chains.

use super::*;
use crate::ast::{self, AliasSource, Expr, ExprKind, LValue, PrintArg, QubitArg, Stmt, StmtKind};
use crate::diag::{Diagnostic, SourceLocation};
use crate::gates;
use crate::symtab::{
    expect_const_int, AliasView, Binding, Num, QubitBinding, SymbolInfo, SymbolTable,
};
use std::collections::HashMap;

pub fn build_module(program: &ast::Program) -> Result<IrModule, Vec<Diagnostic>> {
    let mut b = Builder {
        module: IrModule::new(),
        table: SymbolTable::new(),
        block: BlockId(0),
        funcs: HashMap::new(),
        diags: Vec::new(),
        segment: Segment::None,
        current_fn_results: Vec::new(),
        pending_deallocs: vec![Vec::new()],
        in_subroutine: false,
    };
    let entry = b.module.new_block(vec![]);
    b.block = entry;
    for stmt in &program.stmts {
        match &stmt.kind {
            StmtKind::SubroutineDef { .. } | StmtKind::ExternDecl { .. } => {
                let saved_block = b.block;
                let _ = b.stmt(stmt);
                b.block = saved_block;
            }
            _ => {
                let _ = b.stmt(stmt);
            }
        }
    }
    b.emit_deallocs();
    b.emit_plain(OpKind::Return, vec![], vec![]);
    b.module.functions.push(FunctionDef {
        name: "main".into(),
        param_types: vec![],
        result_types: vec![],
        entry: Some(entry),
    });
    if b.diags.is_empty() {
        Ok(b.module)
    } else {
        Err(b.diags)
    }
}

#[derive(Debug, Clone)]
struct FuncSig {
    params: Vec<SemType>,
    qubit_params: Vec<Option<u64>>,
    results: Vec<SemType>,
}

struct Builder {
    module: IrModule,
    table: SymbolTable,
    block: BlockId,
    funcs: HashMap<String, FuncSig>,
    diags: Vec<Diagnostic>,
    segment: Segment,
    current_fn_results: Vec<SemType>,
    /// Registers allocated per region nesting level, deallocated on exit.
    pending_deallocs: Vec<Vec<ValueId>>,
    in_subroutine: bool,
}

type BResult<T> = Result<T, ()>;

impl Builder {
    fn err<T>(&mut self, msg: impl Into<String>, loc: SourceLocation) -> BResult<T> {
        self.diags.push(Diagnostic::error(msg, loc));
        Err(())
    }

    fn emit(&mut self, kind: OpKind, operands: Vec<ValueId>, result_types: Vec<SemType>) -> OpId {
        let op = self.module.make_op(kind, operands, result_types, self.segment);
        self.module.push_op(self.block, op);
        op
    }

    /// Emit with `Segment::None` regardless of the current compute flag.
    fn emit_plain(
        &mut self,
        kind: OpKind,
        operands: Vec<ValueId>,
        result_types: Vec<SemType>,
    ) -> OpId {
        let op = self.module.make_op(kind, operands, result_types, Segment::None);
        self.module.push_op(self.block, op);
        op
    }

    fn result(&self, op: OpId, i: usize) -> ValueId {
        self.module.op(op).results[i]
    }

    fn const_val(&mut self, c: ConstValue) -> ValueId {
        let ty = c.ty();
        let op = self.emit(OpKind::Constant(c), vec![], vec![ty]);
        self.result(op, 0)
    }

    fn emit_deallocs(&mut self) {
        let roots = self.pending_deallocs.last().cloned().unwrap_or_default();
        for root in roots.into_iter().rev() {
            self.emit_plain(OpKind::QDealloc, vec![root], vec![]);
        }
    }

    // ---- statements ----

    fn stmt(&mut self, stmt: &Stmt) -> BResult<()> {
        let loc = stmt.loc;
        match &stmt.kind {
            StmtKind::ConstDecl { name, value } => {
                let num = match self.table.eval_const_expr(value) {
                    Ok(Some(n)) => n,
                    Ok(None) => return self.err("const initializer must be constant", loc),
                    Err(d) => {
                        self.diags.push(d);
                        return Err(());
                    }
                };
                if !self.in_subroutine {
                    let global = match num {
                        Num::Int(v) => ConstValue::Int(v),
                        Num::Float(v) => ConstValue::Float(v),
                    };
                    self.module.globals.push((name.clone(), global));
                }
                self.declare(SymbolInfo {
                    name: name.clone(),
                    binding: Binding::Const(num),
                    is_const: true,
                    loc,
                })
            }
            StmtKind::QubitDecl(decls) => {
                for d in decls {
                    let size = match &d.size {
                        Some(e) => {
                            let v = self.const_int_expr(e, "qubit register size")?;
                            if v < 1 {
                                return self.err("qubit register size must be >= 1", d.loc);
                            }
                            v as u64
                        }
                        None => 1,
                    };
                    let op = self.emit_plain(
                        OpKind::QAlloc { size },
                        vec![],
                        vec![SemType::QubitArray(Some(size))],
                    );
                    let root = self.result(op, 0);
                    self.table.track_whole(root, root);
                    self.pending_deallocs
                        .last_mut()
                        .expect("dealloc stack never empty")
                        .push(root);
                    self.declare(SymbolInfo {
                        name: d.name.clone(),
                        binding: Binding::Qubits(QubitBinding {
                            root,
                            current: root,
                            size: Some(size),
                            view: None,
                        }),
                        is_const: false,
                        loc: d.loc,
                    })?;
                }
                Ok(())
            }
            StmtKind::BitDecl { size, decls } => {
                let size = match size {
                    Some(e) => Some(self.const_int_expr(e, "bit array size")? as u64),
                    None => None,
                };
                for d in decls {
                    self.classical_cell(SemType::Bool, size, d)?;
                }
                Ok(())
            }
            StmtKind::ClassicalDecl { ty, decls } => {
                let elem = scalar_sem_type(*ty);
                for d in decls {
                    self.classical_cell(elem.clone(), None, d)?;
                }
                Ok(())
            }
            StmtKind::AliasDecl { name, source } => self.alias_decl(name, source, loc),
            StmtKind::SubroutineDef {
                name,
                params,
                qubit_params,
                return_type,
                body,
            } => self.subroutine(name, params, qubit_params, return_type, body, loc),
            StmtKind::ExternDecl {
                name,
                params,
                return_type,
            } => {
                let param_types: Vec<SemType> =
                    params.iter().map(|t| scalar_sem_type(*t)).collect();
                let results: Vec<SemType> = return_type
                    .iter()
                    .map(|t| scalar_sem_type(*t))
                    .collect();
                self.funcs.insert(
                    name.clone(),
                    FuncSig {
                        params: param_types.clone(),
                        qubit_params: vec![],
                        results: results.clone(),
                    },
                );
                self.module.functions.push(FunctionDef {
                    name: name.clone(),
                    param_types,
                    result_types: results,
                    entry: None,
                });
                self.declare(SymbolInfo {
                    name: name.clone(),
                    binding: Binding::Callable,
                    is_const: false,
                    loc,
                })
            }
            StmtKind::GateCall {
                name,
                modifiers,
                params,
                qubit_args,
            } => self.modified_call(name, modifiers, params, qubit_args, loc),
            StmtKind::Measure { target, qubit } => {
                let tip = self.qubit_elem_arg(qubit)?;
                let op = self.emit(
                    OpKind::Measure,
                    vec![tip],
                    vec![SemType::Bool, SemType::Qubit],
                );
                let bit = self.result(op, 0);
                let fresh = self.result(op, 1);
                if self.table.is_tracked(tip) {
                    self.table.update_qubit_value(tip, fresh);
                }
                if let Some(target) = target {
                    self.store_lvalue(target, bit, loc)?;
                }
                Ok(())
            }
            StmtKind::Reset(arg) => {
                match self.classify_args(std::slice::from_ref(arg))? {
                    ArgsMode::Elements(tips) => {
                        let tip = tips[0];
                        let op = self.emit(OpKind::Reset, vec![tip], vec![SemType::Qubit]);
                        let fresh = self.result(op, 0);
                        if self.table.is_tracked(tip) {
                            self.table.update_qubit_value(tip, fresh);
                        }
                    }
                    ArgsMode::Broadcast(arrays) => {
                        let arr = arrays[0];
                        let ty = self.module.value_ty(arr).clone();
                        let op = self.emit(OpKind::Reset, vec![arr], vec![ty]);
                        let fresh = self.result(op, 0);
                        if self.table.is_tracked(arr) {
                            self.table.update_qubit_value(arr, fresh);
                        }
                        self.invalidate_through_views(arg)?;
                    }
                }
                Ok(())
            }
            StmtKind::Assignment { target, value } => {
                let v = self.expr(value)?;
                self.store_lvalue(target, v, loc)
            }
            StmtKind::CompoundAssignment { target, op, value } => {
                let cell_info = self.lvalue_cell(target)?;
                let loaded = self.load_cell(cell_info.clone());
                let rhs = self.expr(value)?;
                let combined = self.binary_op(*op, loaded, rhs, loc)?;
                self.store_into(cell_info, combined, loc)
            }
            StmtKind::If {
                cond,
                then_body,
                else_body,
            } => {
                let c = self.expr(cond)?;
                let c = self.coerce_to_bool(c, loc)?;
                let then_block = self.build_region(then_body, vec![], None)?;
                let else_block = self.build_region(else_body, vec![], None)?;
                let op = self.emit_plain(OpKind::If, vec![c], vec![]);
                self.module.op_mut(op).regions = vec![then_block, else_block];
                Ok(())
            }
            StmtKind::ForRange {
                var,
                start,
                step,
                stop,
                body,
            } => self.for_range(var, start, step.as_ref(), stop, body, false),
            StmtKind::ForCStyle {
                init,
                cond,
                iter,
                body,
            } => {
                self.table.enter_scope();
                self.pending_deallocs.push(Vec::new());
                let result = (|| {
                    self.stmt(init)?;
                    let cond_block = {
                        let saved = self.table.save_and_reset_qubit_state();
                        let b = self.module.new_block(vec![]);
                        let outer = std::mem::replace(&mut self.block, b);
                        let c = self.expr(cond).and_then(|c| self.coerce_to_bool(c, cond.loc));
                        if let Ok(c) = c {
                            self.emit_plain(OpKind::Yield, vec![c], vec![]);
                        }
                        self.block = outer;
                        self.table.restore_qubit_state(saved);
                        b
                    };
                    let mut body_with_iter: Vec<Stmt> = body.clone();
                    body_with_iter.push((**iter).clone());
                    let body_block = self.build_region(&body_with_iter, vec![], None)?;
                    let op = self.emit_plain(OpKind::While, vec![], vec![]);
                    self.module.op_mut(op).regions = vec![cond_block, body_block];
                    Ok(())
                })();
                self.pending_deallocs.pop();
                self.table.exit_scope();
                result
            }
            StmtKind::While { cond, body } => {
                let cond_block = {
                    let saved = self.table.save_and_reset_qubit_state();
                    let b = self.module.new_block(vec![]);
                    let outer = std::mem::replace(&mut self.block, b);
                    let c = self.expr(cond).and_then(|c| self.coerce_to_bool(c, cond.loc));
                    if let Ok(c) = c {
                        self.emit_plain(OpKind::Yield, vec![c], vec![]);
                    }
                    self.block = outer;
                    self.table.restore_qubit_state(saved);
                    b
                };
                let body_block = self.build_region(body, vec![], None)?;
                let op = self.emit_plain(OpKind::While, vec![], vec![]);
                self.module.op_mut(op).regions = vec![cond_block, body_block];
                Ok(())
            }
            StmtKind::ComputeAction {
                compute_block,
                action_block,
            } => self.compute_action(compute_block, action_block, loc),
            StmtKind::Return(value) => {
                if !self.in_subroutine {
                    return self.err("`return` outside a subroutine", loc);
                }
                let mut operands = Vec::new();
                if let Some(e) = value {
                    let v = self.expr(e)?;
                    let v = match self.current_fn_results.first() {
                        Some(SemType::Float(_)) => self.coerce_to_f64(v, loc)?,
                        _ => v,
                    };
                    operands.push(v);
                }
                if operands.len() != self.current_fn_results.len() {
                    return self.err("return value count mismatch", loc);
                }
                self.emit_plain(OpKind::Return, operands, vec![]);
                Ok(())
            }
            StmtKind::Print(args) => {
                let mut pieces = Vec::new();
                let mut operands = Vec::new();
                for a in args {
                    match a {
                        PrintArg::Str(s) => pieces.push(PrintPiece::Str(s.clone())),
                        PrintArg::Expr(e) => {
                            let v = self.expr(e)?;
                            pieces.push(PrintPiece::Arg(operands.len()));
                            operands.push(v);
                        }
                    }
                }
                self.emit_plain(OpKind::Print { pieces }, operands, vec![]);
                Ok(())
            }
            StmtKind::ExpressionStatement(e) => {
                self.expr(e)?;
                Ok(())
            }
        }
    }

    fn declare(&mut self, info: SymbolInfo) -> BResult<()> {
        match self.table.declare(info) {
            Ok(()) => Ok(()),
            Err(d) => {
                self.diags.push(d);
                Err(())
            }
        }
    }

    fn classical_cell(
        &mut self,
        elem: SemType,
        size: Option<u64>,
        d: &ast::Declarator,
    ) -> BResult<()> {
        let cell_ty = SemType::Cell(Box::new(elem.clone()), size);
        let op = self.emit_plain(OpKind::CellAlloc { size }, vec![], vec![cell_ty]);
        let cell = self.result(op, 0);
        if let Some(init) = &d.init {
            let v = self.expr(init)?;
            let v = self.coerce_for_store(v, &elem, d.loc)?;
            self.emit_plain(OpKind::Store, vec![v, cell], vec![]);
        }
        self.declare(SymbolInfo {
            name: d.name.clone(),
            binding: Binding::Cell(cell),
            is_const: false,
            loc: d.loc,
        })
    }

    fn alias_decl(&mut self, name: &str, source: &AliasSource, loc: SourceLocation) -> BResult<()> {
        match source {
            AliasSource::Slice {
                reg,
                start,
                step,
                stop,
            } => {
                let start = self.const_int_expr(start, "slice start")?;
                let step = match step {
                    Some(e) => self.const_int_expr(e, "slice step")?,
                    None => 1,
                };
                let stop = self.const_int_expr(stop, "slice stop")?;
                if step < 1 || start < 0 || stop < start {
                    return self.err("malformed slice range", loc);
                }
                let (current, parent_size) = {
                    let q = self.register(reg, loc)?;
                    (q.current, q.size)
                };
                if let Some(n) = parent_size {
                    if stop as u64 >= n {
                        return self.err(
                            format!("slice stop {stop} out of range for register of size {n}"),
                            loc,
                        );
                    }
                }
                let size = ((stop - start) / step + 1) as u64;
                let op = self.emit_plain(
                    OpKind::Slice { start, step, stop },
                    vec![current],
                    vec![SemType::QubitArray(Some(size))],
                );
                let root = self.result(op, 0);
                self.table.track_whole(root, root);
                self.declare(SymbolInfo {
                    name: name.to_string(),
                    binding: Binding::Qubits(QubitBinding {
                        root,
                        current: root,
                        size: Some(size),
                        view: Some(AliasView::Slice {
                            parent: reg.clone(),
                            start,
                            step,
                        }),
                    }),
                    is_const: false,
                    loc,
                })
            }
            AliasSource::Concat(left, right) => {
                let (lcur, lsize) = {
                    let q = self.register(left, loc)?;
                    (q.current, q.size)
                };
                let (rcur, rsize) = {
                    let q = self.register(right, loc)?;
                    (q.current, q.size)
                };
                let (Some(ls), Some(rs)) = (lsize, rsize) else {
                    return self.err("concatenation requires sized registers", loc);
                };
                let op = self.emit_plain(
                    OpKind::Concat,
                    vec![lcur, rcur],
                    vec![SemType::QubitArray(Some(ls + rs))],
                );
                let root = self.result(op, 0);
                self.table.track_whole(root, root);
                self.declare(SymbolInfo {
                    name: name.to_string(),
                    binding: Binding::Qubits(QubitBinding {
                        root,
                        current: root,
                        size: Some(ls + rs),
                        view: Some(AliasView::Concat {
                            left: left.clone(),
                            left_size: ls,
                            right: right.clone(),
                        }),
                    }),
                    is_const: false,
                    loc,
                })
            }
        }
    }

    fn subroutine(
        &mut self,
        name: &str,
        params: &[ast::Param],
        qubit_params: &[ast::QubitParam],
        return_type: &Option<ast::ScalarType>,
        body: &[Stmt],
        loc: SourceLocation,
    ) -> BResult<()> {
        if self.in_subroutine {
            return self.err("nested subroutine definitions are not supported", loc);
        }
        let mut param_types: Vec<SemType> = params.iter().map(|p| scalar_sem_type(p.ty)).collect();
        let mut qp_sizes = Vec::new();
        for qp in qubit_params {
            let size = match &qp.size {
                Some(e) => {
                    let v = self.const_int_expr(e, "qubit parameter size")?;
                    Some(v as u64)
                }
                None => Some(1),
            };
            qp_sizes.push(size);
            param_types.push(SemType::QubitArray(size));
        }
        let results: Vec<SemType> = return_type.iter().map(|t| scalar_sem_type(*t)).collect();
        self.funcs.insert(
            name.to_string(),
            FuncSig {
                params: params.iter().map(|p| scalar_sem_type(p.ty)).collect(),
                qubit_params: qp_sizes.clone(),
                results: results.clone(),
            },
        );
        self.declare(SymbolInfo {
            name: name.to_string(),
            binding: Binding::Callable,
            is_const: false,
            loc,
        })?;

        let entry = self.module.new_block(param_types.clone());
        let args = self.module.block(entry).args.clone();
        let saved_state = self.table.save_and_reset_qubit_state();
        let saved_results = std::mem::replace(&mut self.current_fn_results, results.clone());
        self.table.enter_scope();
        self.pending_deallocs.push(Vec::new());
        self.in_subroutine = true;
        let outer_block = std::mem::replace(&mut self.block, entry);

        let build = (|| {
            for (p, arg) in params.iter().zip(args.iter()) {
                self.declare(SymbolInfo {
                    name: p.name.clone(),
                    binding: Binding::Value(*arg),
                    is_const: false,
                    loc,
                })?;
            }
            for (qp, arg) in qubit_params.iter().zip(args[params.len()..].iter()) {
                let size = self.module.value_ty(*arg).array_size();
                self.table.track_whole(*arg, *arg);
                self.declare(SymbolInfo {
                    name: qp.name.clone(),
                    binding: Binding::Qubits(QubitBinding {
                        root: *arg,
                        current: *arg,
                        size,
                        view: None,
                    }),
                    is_const: false,
                    loc,
                })?;
            }
            for s in body {
                self.stmt(s)?;
            }
            Ok(())
        })();

        // Ensure the body ends with a terminator.
        let needs_return = self
            .module
            .block(entry)
            .ops
            .last()
            .map_or(true, |op| !matches!(self.module.op(*op).kind, OpKind::Return));
        if needs_return {
            if results.is_empty() {
                self.emit_deallocs();
                self.emit_plain(OpKind::Return, vec![], vec![]);
            } else if build.is_ok() {
                self.diags.push(Diagnostic::error(
                    format!("subroutine `{name}` must end with a return"),
                    loc,
                ));
            }
        }

        self.block = outer_block;
        self.in_subroutine = false;
        self.pending_deallocs.pop();
        self.table.exit_scope();
        self.current_fn_results = saved_results;
        self.table.restore_qubit_state(saved_state);

        self.module.functions.push(FunctionDef {
            name: name.to_string(),
            param_types,
            result_types: results,
            entry: Some(entry),
        });
        build
    }

    /// Build `stmts` into a fresh single-block region with qubit chains reset
    /// at entry and exit; `bind_iv` names a block argument of index type.
    fn build_region(
        &mut self,
        stmts: &[Stmt],
        arg_types: Vec<SemType>,
        bind_iv: Option<&str>,
    ) -> BResult<BlockId> {
        let block = self.module.new_block(arg_types);
        let saved = self.table.save_and_reset_qubit_state();
        self.table.enter_scope();
        self.pending_deallocs.push(Vec::new());
        let outer = std::mem::replace(&mut self.block, block);
        let result = (|| {
            if let Some(name) = bind_iv {
                let iv = self.module.block(block).args[0];
                self.declare(SymbolInfo {
                    name: name.to_string(),
                    binding: Binding::Value(iv),
                    is_const: false,
                    loc: SourceLocation::default(),
                })?;
            }
            for s in stmts {
                self.stmt(s)?;
            }
            Ok(())
        })();
        self.emit_deallocs();
        self.block = outer;
        self.pending_deallocs.pop();
        self.table.exit_scope();
        self.table.restore_qubit_state(saved);
        result.map(|_| block)
    }

    fn for_range(
        &mut self,
        var: &str,
        start: &Expr,
        step: Option<&Expr>,
        stop: &Expr,
        body: &[Stmt],
        adjoint: bool,
    ) -> BResult<()> {
        let loc = start.loc;
        let step_val = match step {
            Some(e) => self.const_int_expr(e, "loop step")?,
            None => 1,
        };
        if step_val < 1 {
            return self.err("loop step must be a positive constant", loc);
        }
        let lower = self.bound(start)?;
        let upper = self.bound(stop)?;
        let mut operands = Vec::new();
        if let BoundBuild::Value(v) = lower {
            operands.push(v);
        }
        if let BoundBuild::Value(v) = upper {
            operands.push(v);
        }

        let body_block = if !adjoint {
            self.build_region(body, vec![SemType::Index], Some(var))?
        } else {
            // Reversed iteration: bind `var` to (last + first) - iv.
            let (BoundBuild::Const(a), BoundBuild::Const(b)) = (lower, upper) else {
                return self.err(
                    "compute-block loops need constant bounds for adjoint synthesis",
                    loc,
                );
            };
            if b <= a {
                // Empty loop; nothing to reverse.
                return Ok(());
            }
            let trips = (b - a + step_val - 1) / step_val;
            let last = a + (trips - 1) * step_val;
            let block = self.module.new_block(vec![SemType::Index]);
            let saved = self.table.save_and_reset_qubit_state();
            self.table.enter_scope();
            self.pending_deallocs.push(Vec::new());
            let outer = std::mem::replace(&mut self.block, block);
            let result = (|| {
                let iv = self.module.block(block).args[0];
                let sum = self.const_val(ConstValue::Index(last + a));
                let mapped_op = self.emit(OpKind::Arith(ArithKind::SubI), vec![sum, iv], vec![SemType::Index]);
                let mapped = self.result(mapped_op, 0);
                self.declare(SymbolInfo {
                    name: var.to_string(),
                    binding: Binding::Value(mapped),
                    is_const: false,
                    loc,
                })?;
                for s in body.iter().rev() {
                    self.adjoint_stmt(s)?;
                }
                Ok(())
            })();
            self.block = outer;
            self.pending_deallocs.pop();
            self.table.exit_scope();
            self.table.restore_qubit_state(saved);
            result?;
            block
        };

        let op = self.emit(
            OpKind::For {
                lower: lower.into(),
                upper: upper.into(),
                step: step_val,
            },
            operands,
            vec![],
        );
        self.module.op_mut(op).regions = vec![body_block];
        Ok(())
    }

    fn bound(&mut self, e: &Expr) -> BResult<BoundBuild> {
        match self.table.eval_const_expr(e) {
            Ok(Some(Num::Int(v))) => Ok(BoundBuild::Const(v)),
            Ok(Some(Num::Float(_))) => self.err("loop bound must be an integer", e.loc),
            Ok(None) => {
                let v = self.expr(e)?;
                let v = self.coerce_to_index(v, e.loc)?;
                Ok(BoundBuild::Value(v))
            }
            Err(d) => {
                self.diags.push(d);
                Err(())
            }
        }
    }

    // ---- compute / action ----

    fn compute_action(
        &mut self,
        compute_block: &[Stmt],
        action_block: &[Stmt],
        loc: SourceLocation,
    ) -> BResult<()> {
        if self.segment != Segment::None {
            return self.err("nested compute-action blocks are not supported", loc);
        }
        for s in compute_block {
            self.check_compute_stmt(s)?;
        }
        self.segment = Segment::Compute;
        let compute_result = (|| {
            for s in compute_block {
                self.stmt(s)?;
            }
            Ok(())
        })();
        self.segment = Segment::None;
        compute_result?;
        for s in action_block {
            self.stmt(s)?;
        }
        self.segment = Segment::Uncompute;
        let uncompute_result = (|| {
            for s in compute_block.iter().rev() {
                self.adjoint_stmt(s)?;
            }
            Ok(())
        })();
        self.segment = Segment::None;
        uncompute_result
    }

    fn check_compute_stmt(&mut self, s: &Stmt) -> BResult<()> {
        match &s.kind {
            StmtKind::GateCall {
                name, modifiers, ..
            } => {
                if !modifiers.is_empty() {
                    return self.err("gate modifiers are not allowed in compute blocks", s.loc);
                }
                if !gates::is_builtin_gate(name) {
                    return self.err(
                        "compute blocks may contain only built-in gates and range loops",
                        s.loc,
                    );
                }
                Ok(())
            }
            StmtKind::ForRange { body, .. } => {
                for inner in body {
                    self.check_compute_stmt(inner)?;
                }
                Ok(())
            }
            _ => self.err(
                "compute blocks may contain only built-in gates and range loops",
                s.loc,
            ),
        }
    }

    /// Emit the adjoint of a compute-block statement.
    fn adjoint_stmt(&mut self, s: &Stmt) -> BResult<()> {
        match &s.kind {
            StmtKind::GateCall {
                name,
                params,
                qubit_args,
                ..
            } => {
                let canonical = gates::canonical_name(name).to_string();
                let (dname, pmap) = gates::dagger_symbolic(&canonical);
                let built: Vec<ValueId> = {
                    let mut vs = Vec::new();
                    for p in params {
                        let v = self.gate_param(p)?;
                        vs.push(v);
                    }
                    vs
                };
                let mapped: Vec<ValueId> = match pmap {
                    gates::ParamMap::Same => built,
                    gates::ParamMap::Negate => {
                        let mut vs = Vec::new();
                        for v in built {
                            vs.push(self.negate_f64(v));
                        }
                        vs
                    }
                    gates::ParamMap::UDagger => {
                        let reordered = vec![built[0], built[2], built[1]];
                        let mut vs = Vec::new();
                        for v in reordered {
                            vs.push(self.negate_f64(v));
                        }
                        vs
                    }
                };
                self.gate_apply(dname.to_string(), mapped, qubit_args, s.loc)
            }
            StmtKind::ForRange {
                var,
                start,
                step,
                stop,
                body,
            } => self.for_range(var, start, step.as_ref(), stop, body, true),
            _ => self.err("statement not supported in compute block", s.loc),
        }
    }

    fn negate_f64(&mut self, v: ValueId) -> ValueId {
        // Fold constant negation instead of emitting negf.
        if let ValueDef::Op(op, 0) = self.module.value(v).def {
            if let OpKind::Constant(ConstValue::Float(c)) = self.module.op(op).kind {
                return self.const_val(ConstValue::Float(-c));
            }
        }
        let op = self.emit(OpKind::Arith(ArithKind::NegF), vec![v], vec![SemType::f64()]);
        self.result(op, 0)
    }

    // ---- calls and gates ----

    fn modified_call(
        &mut self,
        name: &str,
        modifiers: &[ast::Modifier],
        params: &[Expr],
        qubit_args: &[QubitArg],
        loc: SourceLocation,
    ) -> BResult<()> {
        let Some((first, rest)) = modifiers.split_first() else {
            // Unmodified: builtin gate application or subroutine call.
            if gates::is_builtin_gate(name) {
                let mut param_vals = Vec::new();
                for p in params {
                    param_vals.push(self.gate_param(p)?);
                }
                return self.gate_apply(
                    gates::canonical_name(name).to_string(),
                    param_vals,
                    qubit_args,
                    loc,
                );
            }
            return self.call_subroutine(name, params, qubit_args, loc).map(|_| ());
        };
        match first {
            ast::Modifier::Ctrl => {
                let Some((ctrl_arg, rest_args)) = qubit_args.split_first() else {
                    return self.err("ctrl modifier needs a control qubit argument", loc);
                };
                let ctrl = self.qubit_elem_arg(ctrl_arg)?;
                let body =
                    self.marker_region(|b| b.modified_call(name, rest, params, rest_args, loc))?;
                let op = self.emit_plain(OpKind::CtrlRegion, vec![ctrl], vec![]);
                self.module.op_mut(op).regions = vec![body];
                Ok(())
            }
            ast::Modifier::Inv => {
                let body =
                    self.marker_region(|b| b.modified_call(name, rest, params, qubit_args, loc))?;
                let op = self.emit_plain(OpKind::AdjRegion, vec![], vec![]);
                self.module.op_mut(op).regions = vec![body];
                Ok(())
            }
            ast::Modifier::Pow(k) => {
                let (power, operands) = match self.table.eval_const_expr(k) {
                    Ok(Some(Num::Int(v))) => (Some(v), vec![]),
                    Ok(Some(Num::Float(_))) => {
                        return self.err("pow modifier requires an integer power", k.loc)
                    }
                    Ok(None) => {
                        let v = self.expr(k)?;
                        let v = self.coerce_to_i64(v, k.loc)?;
                        (None, vec![v])
                    }
                    Err(d) => {
                        self.diags.push(d);
                        return Err(());
                    }
                };
                let body =
                    self.marker_region(|b| b.modified_call(name, rest, params, qubit_args, loc))?;
                let op = self.emit_plain(OpKind::PowRegion { power }, operands, vec![]);
                self.module.op_mut(op).regions = vec![body];
                Ok(())
            }
        }
    }

    /// Build a marker-region body block with chains reset around it.
    fn marker_region(
        &mut self,
        f: impl FnOnce(&mut Self) -> BResult<()>,
    ) -> BResult<BlockId> {
        let block = self.module.new_block(vec![]);
        let saved = self.table.save_and_reset_qubit_state();
        self.table.enter_scope();
        self.pending_deallocs.push(Vec::new());
        let outer = std::mem::replace(&mut self.block, block);
        let result = f(self);
        self.block = outer;
        self.pending_deallocs.pop();
        self.table.exit_scope();
        self.table.restore_qubit_state(saved);
        result.map(|_| block)
    }

    fn gate_param(&mut self, p: &Expr) -> BResult<ValueId> {
        let v = self.expr(p)?;
        self.coerce_to_f64(v, p.loc)
    }

    fn gate_apply(
        &mut self,
        name: String,
        param_vals: Vec<ValueId>,
        qubit_args: &[QubitArg],
        loc: SourceLocation,
    ) -> BResult<()> {
        let info = gates::lookup(&name).expect("caller checked gate exists");
        if param_vals.len() != info.num_params {
            return self.err(
                format!(
                    "gate `{name}` expects {} parameter(s), got {}",
                    info.num_params,
                    param_vals.len()
                ),
                loc,
            );
        }
        if qubit_args.len() != info.num_qubits {
            return self.err(
                format!(
                    "gate `{name}` expects {} qubit argument(s), got {}",
                    info.num_qubits,
                    qubit_args.len()
                ),
                loc,
            );
        }
        let angles = if info.num_params == 0 {
            Some(vec![])
        } else {
            None
        };
        match self.classify_args(qubit_args)? {
            ArgsMode::Elements(tips) => {
                for (i, a) in tips.iter().enumerate() {
                    if tips[..i].contains(a) {
                        return self.err("duplicate qubit argument in gate call", loc);
                    }
                }
                let mut operands = param_vals;
                operands.extend(&tips);
                let result_types = vec![SemType::Qubit; tips.len()];
                let op = self.emit(
                    OpKind::Gate {
                        name,
                        angles,
                    },
                    operands,
                    result_types,
                );
                let results = self.module.op(op).results.clone();
                for (old, new) in tips.iter().zip(results) {
                    if self.table.is_tracked(*old) {
                        self.table.update_qubit_value(*old, new);
                    }
                }
                Ok(())
            }
            ArgsMode::Broadcast(arrays) => {
                let sizes: Vec<Option<u64>> = arrays
                    .iter()
                    .map(|a| self.module.value_ty(*a).array_size())
                    .collect();
                let known: Vec<u64> = sizes.iter().flatten().copied().collect();
                if known.windows(2).any(|w| w[0] != w[1]) {
                    return self.err("broadcast registers must have equal sizes", loc);
                }
                let result_types: Vec<SemType> = arrays
                    .iter()
                    .map(|a| self.module.value_ty(*a).clone())
                    .collect();
                let mut operands = param_vals;
                operands.extend(&arrays);
                let op = self.emit(OpKind::Gate { name, angles }, operands, result_types);
                let results = self.module.op(op).results.clone();
                for (old, new) in arrays.iter().zip(results) {
                    if self.table.is_tracked(*old) {
                        self.table.update_qubit_value(*old, new);
                    }
                }
                for arg in qubit_args {
                    self.invalidate_through_views(arg)?;
                }
                Ok(())
            }
        }
    }

    fn call_subroutine(
        &mut self,
        name: &str,
        params: &[Expr],
        qubit_args: &[QubitArg],
        loc: SourceLocation,
    ) -> BResult<Vec<ValueId>> {
        let Some(sig) = self.funcs.get(name).cloned() else {
            return self.err(format!("unknown gate or subroutine `{name}`"), loc);
        };
        if params.len() != sig.params.len() {
            return self.err(
                format!(
                    "`{name}` expects {} classical argument(s), got {}",
                    sig.params.len(),
                    params.len()
                ),
                loc,
            );
        }
        if qubit_args.len() != sig.qubit_params.len() {
            return self.err(
                format!(
                    "`{name}` expects {} qubit argument(s), got {}",
                    sig.qubit_params.len(),
                    qubit_args.len()
                ),
                loc,
            );
        }
        let mut operands = Vec::new();
        for (p, ty) in params.iter().zip(&sig.params) {
            let v = self.expr(p)?;
            let v = match ty {
                SemType::Float(_) => self.coerce_to_f64(v, p.loc)?,
                _ => v,
            };
            operands.push(v);
        }
        for (arg, expected_size) in qubit_args.iter().zip(&sig.qubit_params) {
            let (reg_name, aloc, value, size) = match arg {
                QubitArg::Whole(reg_name, aloc) => {
                    let q = self.register(reg_name, *aloc)?;
                    (reg_name, *aloc, q.current, q.size)
                }
                // `oracle q[1]` passes a one-element view of the register.
                QubitArg::Indexed(reg_name, idx, aloc) => {
                    let k = self.const_int_expr(idx, "qubit argument index")?;
                    let q = self.register(reg_name, *aloc)?;
                    if let Some(n) = q.size {
                        if k < 0 || k as u64 >= n {
                            return self.err(
                                format!("index {k} out of range for `{reg_name}` of size {n}"),
                                *aloc,
                            );
                        }
                    }
                    let op = self.emit_plain(
                        OpKind::Slice {
                            start: k,
                            step: 1,
                            stop: k,
                        },
                        vec![q.current],
                        vec![SemType::QubitArray(Some(1))],
                    );
                    (reg_name, *aloc, self.result(op, 0), Some(1))
                }
            };
            if let (Some(got), Some(want)) = (size, *expected_size) {
                if got != want {
                    return self.err(
                        format!("register size mismatch: `{reg_name}` has {got} qubits, `{name}` wants {want}"),
                        aloc,
                    );
                }
            }
            operands.push(value);
            self.invalidate_by_name(&reg_name.clone(), aloc)?;
        }
        let op = self.emit_plain(OpKind::Call { callee: name.to_string() }, operands, sig.results.clone());
        Ok(self.module.op(op).results.clone())
    }

    // ---- qubit argument resolution ----

    fn register(&mut self, name: &str, loc: SourceLocation) -> BResult<QubitBinding> {
        match self.table.lookup(name) {
            Some(SymbolInfo {
                binding: Binding::Qubits(q),
                ..
            }) => Ok(q.clone()),
            Some(_) => self.err(format!("`{name}` is not a qubit register"), loc),
            None => self.err(format!("use of undeclared symbol `{name}`"), loc),
        }
    }

    /// Chain tip for one element: `reg[k]`, `reg[expr]`, or a scalar qubit.
    fn qubit_elem_arg(&mut self, arg: &QubitArg) -> BResult<ValueId> {
        match arg {
            QubitArg::Whole(name, loc) => {
                let q = self.register(name, *loc)?;
                if q.size != Some(1) {
                    return self.err(
                        format!("`{name}` is a register; index it or use it in broadcast position"),
                        *loc,
                    );
                }
                self.elem_tip_for(name, 0, *loc)
            }
            QubitArg::Indexed(name, idx, loc) => {
                match self.table.eval_const_expr(idx) {
                    Ok(Some(Num::Int(k))) => self.elem_tip_for(name, k, *loc),
                    Ok(Some(Num::Float(_))) => self.err("qubit index must be an integer", *loc),
                    Ok(None) => {
                        let q = self.register(name, *loc)?;
                        let iv = self.expr(idx)?;
                        let iv = self.coerce_to_index(iv, idx.loc)?;
                        let op = self.emit(
                            OpKind::Extract { index: None },
                            vec![q.current, iv],
                            vec![SemType::Qubit],
                        );
                        self.table.disable_tracking(q.root);
                        self.disable_view_parents(name, *loc)?;
                        Ok(self.result(op, 0))
                    }
                    Err(d) => {
                        self.diags.push(d);
                        Err(())
                    }
                }
            }
        }
    }

    /// Resolve `(register, const index)` to the current chain tip, emitting
    /// an extract when the line has no live tip. Aliases resolve into their
    /// parent register so `s[0]` and `q[1]` share one chain.
    fn elem_tip_for(&mut self, name: &str, index: i64, loc: SourceLocation) -> BResult<ValueId> {
        let q = self.register(name, loc)?;
        if let Some(size) = q.size {
            if index < 0 || index as u64 >= size {
                return self.err(
                    format!("index {index} out of range for `{name}` of size {size}"),
                    loc,
                );
            }
        }
        match &q.view {
            Some(AliasView::Slice {
                parent,
                start,
                step,
            }) => {
                let (parent, mapped) = (parent.clone(), start + index * step);
                return self.elem_tip_for(&parent, mapped, loc);
            }
            Some(AliasView::Concat {
                left,
                left_size,
                right,
            }) => {
                let (l, ls, r) = (left.clone(), *left_size, right.clone());
                return if (index as u64) < ls {
                    self.elem_tip_for(&l, index, loc)
                } else {
                    self.elem_tip_for(&r, index - ls as i64, loc)
                };
            }
            None => {}
        }
        if let Some(tip) = self.table.elem_tip(q.root, index) {
            return Ok(tip);
        }
        let op = self.emit(
            OpKind::Extract { index: Some(index) },
            vec![q.current],
            vec![SemType::Qubit],
        );
        let tip = self.result(op, 0);
        self.table.set_elem_tip(q.root, index, tip);
        Ok(tip)
    }

    /// Invalidate cached element chains of the registers under an alias.
    fn invalidate_through_views(&mut self, arg: &QubitArg) -> BResult<()> {
        let name = match arg {
            QubitArg::Whole(n, _) | QubitArg::Indexed(n, _, _) => n.clone(),
        };
        self.invalidate_by_name(&name, arg.loc())
    }

    fn invalidate_by_name(&mut self, name: &str, loc: SourceLocation) -> BResult<()> {
        let q = self.register(name, loc)?;
        self.table.invalidate_register(q.root);
        match q.view {
            Some(AliasView::Slice { parent, .. }) => self.invalidate_by_name(&parent, loc),
            Some(AliasView::Concat { left, right, .. }) => {
                self.invalidate_by_name(&left, loc)?;
                self.invalidate_by_name(&right, loc)
            }
            None => Ok(()),
        }
    }

    fn disable_view_parents(&mut self, name: &str, loc: SourceLocation) -> BResult<()> {
        let q = self.register(name, loc)?;
        match q.view {
            Some(AliasView::Slice { parent, .. }) => {
                let p = self.register(&parent, loc)?;
                self.table.disable_tracking(p.root);
                self.disable_view_parents(&parent, loc)
            }
            Some(AliasView::Concat { left, right, .. }) => {
                let l = self.register(&left, loc)?;
                self.table.disable_tracking(l.root);
                self.disable_view_parents(&left, loc)?;
                let r = self.register(&right, loc)?;
                self.table.disable_tracking(r.root);
                self.disable_view_parents(&right, loc)
            }
            None => Ok(()),
        }
    }

    fn classify_args(&mut self, args: &[QubitArg]) -> BResult<ArgsMode> {
        let mut whole_register = false;
        for a in args {
            if let QubitArg::Whole(name, loc) = a {
                let q = self.register(name, *loc)?;
                if q.size != Some(1) {
                    whole_register = true;
                }
            }
        }
        if whole_register {
            let mut arrays = Vec::new();
            for a in args {
                let QubitArg::Whole(name, loc) = a else {
                    return self.err(
                        "cannot mix indexed qubits with whole-register broadcast",
                        a.loc(),
                    );
                };
                let q = self.register(name, *loc)?;
                arrays.push(q.current);
            }
            Ok(ArgsMode::Broadcast(arrays))
        } else {
            let mut tips = Vec::new();
            for a in args {
                tips.push(self.qubit_elem_arg(a)?);
            }
            Ok(ArgsMode::Elements(tips))
        }
    }

    // ---- lvalues ----

    fn lvalue_cell(&mut self, target: &LValue) -> BResult<CellAccess> {
        let info = match self.table.lookup(&target.name) {
            Some(i) => i.clone(),
            None => {
                return self.err(
                    format!("use of undeclared symbol `{}`", target.name),
                    target.loc,
                )
            }
        };
        let Binding::Cell(cell) = info.binding else {
            return self.err(
                format!("`{}` is not assignable", target.name),
                target.loc,
            );
        };
        let index = match &target.index {
            Some(e) => {
                let v = self.expr(e)?;
                Some(self.coerce_to_i64(v, e.loc)?)
            }
            None => None,
        };
        let elem = match self.module.value_ty(cell) {
            SemType::Cell(elem, _) => (**elem).clone(),
            _ => unreachable!("cell binding always has cell type"),
        };
        Ok(CellAccess { cell, index, elem })
    }

    fn load_cell(&mut self, access: CellAccess) -> ValueId {
        let loaded_ty = match &access.elem {
            SemType::Bool => SemType::Bool,
            SemType::Int(_) => SemType::int64(),
            SemType::Float(_) => SemType::f64(),
            other => other.clone(),
        };
        let mut operands = vec![access.cell];
        if let Some(i) = access.index {
            operands.push(i);
        }
        let op = self.emit_plain(OpKind::Load, operands, vec![loaded_ty]);
        self.result(op, 0)
    }

    fn store_into(&mut self, access: CellAccess, value: ValueId, loc: SourceLocation) -> BResult<()> {
        let value = self.coerce_for_store(value, &access.elem.clone(), loc)?;
        let mut operands = vec![value, access.cell];
        if let Some(i) = access.index {
            operands.push(i);
        }
        self.emit_plain(OpKind::Store, operands, vec![]);
        Ok(())
    }

    fn store_lvalue(&mut self, target: &LValue, value: ValueId, loc: SourceLocation) -> BResult<()> {
        let access = self.lvalue_cell(target)?;
        self.store_into(access, value, loc)
    }

    // ---- expressions ----

    fn expr(&mut self, e: &Expr) -> BResult<ValueId> {
        // Fold whole constant subtrees, except bare global-const names which
        // stay symbolic for the constant-propagation pass.
        if !matches!(e.kind, ExprKind::Ident(_) | ExprKind::IntLit(_) | ExprKind::FloatLit(_)) {
            match self.table.eval_const_expr(e) {
                Ok(Some(Num::Int(v))) => return Ok(self.const_val(ConstValue::Int(v))),
                Ok(Some(Num::Float(v))) => return Ok(self.const_val(ConstValue::Float(v))),
                Ok(None) => {}
                Err(d) => {
                    self.diags.push(d);
                    return Err(());
                }
            }
        }
        match &e.kind {
            ExprKind::IntLit(v) => Ok(self.const_val(ConstValue::Int(*v))),
            ExprKind::FloatLit(v) => Ok(self.const_val(ConstValue::Float(*v))),
            ExprKind::Ident(name) => {
                if name == "pi" {
                    return Ok(self.const_val(ConstValue::Float(std::f64::consts::PI)));
                }
                let info = match self.table.lookup(name) {
                    Some(i) => i.clone(),
                    None => {
                        return self.err(format!("use of undeclared symbol `{name}`"), e.loc)
                    }
                };
                match info.binding {
                    Binding::Const(num) => {
                        if self.module.global(name).is_some() {
                            let ty = match num {
                                Num::Int(_) => SemType::int64(),
                                Num::Float(_) => SemType::f64(),
                            };
                            let op = self.emit_plain(
                                OpKind::GetGlobal { name: name.clone() },
                                vec![],
                                vec![ty],
                            );
                            Ok(self.result(op, 0))
                        } else {
                            Ok(match num {
                                Num::Int(v) => self.const_val(ConstValue::Int(v)),
                                Num::Float(v) => self.const_val(ConstValue::Float(v)),
                            })
                        }
                    }
                    Binding::Cell(cell) => {
                        let elem = match self.module.value_ty(cell) {
                            SemType::Cell(elem, _) => (**elem).clone(),
                            _ => unreachable!(),
                        };
                        Ok(self.load_cell(CellAccess {
                            cell,
                            index: None,
                            elem,
                        }))
                    }
                    Binding::Value(v) => Ok(v),
                    Binding::Qubits(_) => {
                        self.err(format!("register `{name}` used in classical expression"), e.loc)
                    }
                    Binding::Callable => {
                        self.err(format!("`{name}` is a subroutine, not a value"), e.loc)
                    }
                }
            }
            ExprKind::Index(name, idx) => {
                let access_target = LValue {
                    name: name.clone(),
                    index: Some(idx.clone()),
                    loc: e.loc,
                };
                let access = self.lvalue_cell(&access_target)?;
                Ok(self.load_cell(access))
            }
            ExprKind::Unary(op, inner) => {
                let v = self.expr(inner)?;
                match op {
                    ast::UnOp::Neg => match self.module.value_ty(v).clone() {
                        SemType::Float(_) => {
                            let o = self.emit_plain(
                                OpKind::Arith(ArithKind::NegF),
                                vec![v],
                                vec![SemType::f64()],
                            );
                            Ok(self.result(o, 0))
                        }
                        SemType::Int(_) | SemType::Bool => {
                            let zero = self.const_val(ConstValue::Int(0));
                            let o = self.emit_plain(
                                OpKind::Arith(ArithKind::SubI),
                                vec![zero, v],
                                vec![SemType::int64()],
                            );
                            Ok(self.result(o, 0))
                        }
                        SemType::Index => {
                            let zero = self.const_val(ConstValue::Index(0));
                            let o = self.emit_plain(
                                OpKind::Arith(ArithKind::SubI),
                                vec![zero, v],
                                vec![SemType::Index],
                            );
                            Ok(self.result(o, 0))
                        }
                        _ => self.err("cannot negate this value", e.loc),
                    },
                    ast::UnOp::Not => {
                        let b = self.coerce_to_bool(v, e.loc)?;
                        let t = self.const_val(ConstValue::Bool(true));
                        let o = self.emit_plain(
                            OpKind::Arith(ArithKind::XorI),
                            vec![b, t],
                            vec![SemType::Bool],
                        );
                        Ok(self.result(o, 0))
                    }
                }
            }
            ExprKind::Binary(op, lhs, rhs) => {
                let a = self.expr(lhs)?;
                let b = self.expr(rhs)?;
                self.binary_op(*op, a, b, e.loc)
            }
            ExprKind::Call {
                name,
                params,
                qubit_args,
            } => {
                let results = self.call_subroutine(name, params, qubit_args, e.loc)?;
                match results.first() {
                    Some(v) => Ok(*v),
                    None => self.err(
                        format!("`{name}` returns no value but is used in an expression"),
                        e.loc,
                    ),
                }
            }
        }
    }

    fn binary_op(
        &mut self,
        op: ast::BinOp,
        a: ValueId,
        b: ValueId,
        loc: SourceLocation,
    ) -> BResult<ValueId> {
        use ast::BinOp::*;
        // Logical connectives work on booleans.
        if matches!(op, And | Or) {
            let a = self.coerce_to_bool(a, loc)?;
            let b = self.coerce_to_bool(b, loc)?;
            let kind = if matches!(op, And) {
                ArithKind::AndI
            } else {
                ArithKind::OrI
            };
            let o = self.emit_plain(OpKind::Arith(kind), vec![a, b], vec![SemType::Bool]);
            return Ok(self.result(o, 0));
        }
        let (a, b, float) = self.unify_numeric(a, b, loc)?;
        if let Some(pred) = cmp_pred(op) {
            let o = self.emit_plain(
                OpKind::Cmp { pred, float },
                vec![a, b],
                vec![SemType::Bool],
            );
            return Ok(self.result(o, 0));
        }
        let kind = match (op, float) {
            (Add, false) => ArithKind::AddI,
            (Sub, false) => ArithKind::SubI,
            (Mul, false) => ArithKind::MulI,
            (Div, false) => ArithKind::DivI,
            (Rem, false) => ArithKind::RemI,
            (Add, true) => ArithKind::AddF,
            (Sub, true) => ArithKind::SubF,
            (Mul, true) => ArithKind::MulF,
            (Div, true) => ArithKind::DivF,
            (Rem, true) => ArithKind::RemF,
            _ => unreachable!("comparisons handled above"),
        };
        let ty = self.module.value_ty(a).clone();
        let o = self.emit_plain(OpKind::Arith(kind), vec![a, b], vec![ty]);
        Ok(self.result(o, 0))
    }

    /// Promote (a, b) to a common numeric type; returns `float = true` when
    /// promoted to f64.
    fn unify_numeric(
        &mut self,
        a: ValueId,
        b: ValueId,
        loc: SourceLocation,
    ) -> BResult<(ValueId, ValueId, bool)> {
        let ta = self.module.value_ty(a).clone();
        let tb = self.module.value_ty(b).clone();
        match (&ta, &tb) {
            (SemType::Float(_), SemType::Float(_)) => Ok((a, b, true)),
            (SemType::Float(_), _) => {
                let b = self.coerce_to_f64(b, loc)?;
                Ok((a, b, true))
            }
            (_, SemType::Float(_)) => {
                let a = self.coerce_to_f64(a, loc)?;
                Ok((a, b, true))
            }
            (SemType::Index, SemType::Index) => Ok((a, b, false)),
            (SemType::Index, _) => {
                let b = self.coerce_to_index(b, loc)?;
                Ok((a, b, false))
            }
            (_, SemType::Index) => {
                let a = self.coerce_to_index(a, loc)?;
                Ok((a, b, false))
            }
            (SemType::Int(_) | SemType::Bool, SemType::Int(_) | SemType::Bool) => {
                Ok((a, b, false))
            }
            _ => self.err("type mismatch in arithmetic expression", loc),
        }
    }

    fn coerce_to_f64(&mut self, v: ValueId, loc: SourceLocation) -> BResult<ValueId> {
        match self.module.value_ty(v).clone() {
            SemType::Float(_) => Ok(v),
            SemType::Int(_) | SemType::Bool => {
                let o = self.emit_plain(OpKind::Cast(CastKind::SiToFp), vec![v], vec![SemType::f64()]);
                Ok(self.result(o, 0))
            }
            SemType::Index => {
                let i = self.coerce_to_i64(v, loc)?;
                let o = self.emit_plain(OpKind::Cast(CastKind::SiToFp), vec![i], vec![SemType::f64()]);
                Ok(self.result(o, 0))
            }
            _ => self.err("expected a numeric value", loc),
        }
    }

    fn coerce_to_index(&mut self, v: ValueId, loc: SourceLocation) -> BResult<ValueId> {
        match self.module.value_ty(v).clone() {
            SemType::Index => Ok(v),
            SemType::Int(_) | SemType::Bool => {
                let o = self.emit_plain(
                    OpKind::Cast(CastKind::IndexCast),
                    vec![v],
                    vec![SemType::Index],
                );
                Ok(self.result(o, 0))
            }
            _ => self.err("expected an integer index", loc),
        }
    }

    fn coerce_to_i64(&mut self, v: ValueId, loc: SourceLocation) -> BResult<ValueId> {
        match self.module.value_ty(v).clone() {
            SemType::Int(_) => Ok(v),
            SemType::Bool => Ok(v),
            SemType::Index => {
                let o = self.emit_plain(
                    OpKind::Cast(CastKind::IndexCast),
                    vec![v],
                    vec![SemType::int64()],
                );
                Ok(self.result(o, 0))
            }
            _ => self.err("expected an integer value", loc),
        }
    }

    fn coerce_to_bool(&mut self, v: ValueId, loc: SourceLocation) -> BResult<ValueId> {
        match self.module.value_ty(v).clone() {
            SemType::Bool => Ok(v),
            SemType::Int(_) => {
                let zero = self.const_val(ConstValue::Int(0));
                let o = self.emit_plain(
                    OpKind::Cmp {
                        pred: CmpPred::Ne,
                        float: false,
                    },
                    vec![v, zero],
                    vec![SemType::Bool],
                );
                Ok(self.result(o, 0))
            }
            SemType::Float(_) => {
                let zero = self.const_val(ConstValue::Float(0.0));
                let o = self.emit_plain(
                    OpKind::Cmp {
                        pred: CmpPred::Ne,
                        float: true,
                    },
                    vec![v, zero],
                    vec![SemType::Bool],
                );
                Ok(self.result(o, 0))
            }
            _ => self.err("expected a boolean condition", loc),
        }
    }

    fn coerce_for_store(
        &mut self,
        v: ValueId,
        elem: &SemType,
        loc: SourceLocation,
    ) -> BResult<ValueId> {
        let vt = self.module.value_ty(v).clone();
        match (elem, &vt) {
            (SemType::Bool, SemType::Bool) => Ok(v),
            (SemType::Int(_), SemType::Int(_)) => Ok(v),
            (SemType::Int(_), SemType::Bool) => Ok(v),
            (SemType::Int(_), SemType::Index) => self.coerce_to_i64(v, loc),
            (SemType::Float(_), _) => self.coerce_to_f64(v, loc),
            _ => self.err("type mismatch in assignment", loc),
        }
    }

    fn const_int_expr(&mut self, e: &Expr, what: &str) -> BResult<i64> {
        match expect_const_int(&self.table, e, what) {
            Ok(v) => Ok(v),
            Err(d) => {
                self.diags.push(d);
                Err(())
            }
        }
    }
}

#[derive(Debug, Clone)]
struct CellAccess {
    cell: ValueId,
    index: Option<ValueId>,
    elem: SemType,
}

enum ArgsMode {
    Elements(Vec<ValueId>),
    Broadcast(Vec<ValueId>),
}

#[derive(Debug, Clone, Copy)]
enum BoundBuild {
    Const(i64),
    Value(ValueId),
}

impl From<BoundBuild> for Bound {
    fn from(b: BoundBuild) -> Bound {
        match b {
            BoundBuild::Const(v) => Bound::Const(v),
            BoundBuild::Value(_) => Bound::Value,
        }
    }
}

fn cmp_pred(op: ast::BinOp) -> Option<CmpPred> {
    Some(match op {
        ast::BinOp::Eq => CmpPred::Eq,
        ast::BinOp::Ne => CmpPred::Ne,
        ast::BinOp::Lt => CmpPred::Lt,
        ast::BinOp::Le => CmpPred::Le,
        ast::BinOp::Gt => CmpPred::Gt,
        ast::BinOp::Ge => CmpPred::Ge,
        _ => return None,
    })
}

fn scalar_sem_type(ty: ast::ScalarType) -> SemType {
    match ty.kind {
        ast::ScalarKind::Bit | ast::ScalarKind::Bool => SemType::Bool,
        ast::ScalarKind::Int => SemType::Int(ty.width),
        // Float widths unify to f64; declared width is surface-level only.
        ast::ScalarKind::Float => SemType::Float(64),
    }
}
