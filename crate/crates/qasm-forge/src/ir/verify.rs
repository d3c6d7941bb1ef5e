//! SSA well-formedness checks: define-before-use, qubit linearity, opcode
//! typing, and terminator placement. Runs after building and after every
//! pass.

use super::*;
use crate::diag::Diagnostic;
use crate::gates;
use std::collections::HashSet;

pub fn verify(module: &IrModule) -> Vec<Diagnostic> {
    let mut v = Verifier {
        module,
        diags: Vec::new(),
        consumed: Vec::new(),
        visible: Vec::new(),
        def_block: Vec::new(),
    };
    let mut seen_globals = HashSet::new();
    for (name, _) in &module.globals {
        if !seen_globals.insert(name.clone()) {
            v.internal(format!("duplicate global `@{name}`"));
        }
    }
    let mut seen_fns = HashSet::new();
    for f in &module.functions {
        if !seen_fns.insert(f.name.clone()) {
            v.internal(format!("duplicate function `@{}`", f.name));
        }
    }
    for f in &module.functions {
        if let Some(entry) = f.entry {
            let entry_args: Vec<SemType> = module
                .block(entry)
                .args
                .iter()
                .map(|a| module.value_ty(*a).clone())
                .collect();
            if entry_args != f.param_types {
                v.internal(format!("function `@{}` entry args mismatch signature", f.name));
            }
            v.consumed.clear();
            v.consumed.resize(module.values.len(), 0);
            v.visible.clear();
            v.visible.resize(module.values.len(), false);
            v.def_block.clear();
            v.def_block.resize(module.values.len(), u32::MAX);
            v.walk_block(entry, BlockRole::FunctionBody(f));
        }
    }
    v.diags
}

#[derive(Clone, Copy)]
enum BlockRole<'a> {
    FunctionBody(&'a FunctionDef),
    WhileCond,
    Plain,
}

struct Verifier<'a> {
    module: &'a IrModule,
    diags: Vec<Diagnostic>,
    consumed: Vec<u8>,
    visible: Vec<bool>,
    def_block: Vec<u32>,
}

impl<'a> Verifier<'a> {
    fn internal(&mut self, msg: impl Into<String>) {
        self.diags
            .push(Diagnostic::error_nowhere(format!("internal: {}", msg.into())));
    }

    fn op_err(&mut self, op: &Op, msg: impl Into<String>) {
        self.internal(format!("{} (op `{}`)", msg.into(), op_label(op)));
    }

    fn define(&mut self, v: ValueId, block: BlockId, defined_here: &mut Vec<ValueId>) {
        self.visible[v.0 as usize] = true;
        self.def_block[v.0 as usize] = block.0;
        defined_here.push(v);
    }

    fn walk_block(&mut self, block: BlockId, role: BlockRole) {
        let b = self.module.block(block);
        let mut defined_here: Vec<ValueId> = Vec::new();
        for a in b.args.iter() {
            self.define(*a, block, &mut defined_here);
        }
        let n_ops = b.ops.len();
        for (pos, &op_id) in b.ops.iter().enumerate() {
            let op = self.module.op(op_id);
            self.check_operands(op, block);
            self.check_types(op);
            self.check_consumption(op);
            let last = pos + 1 == n_ops;
            match &op.kind {
                OpKind::Return => {
                    match role {
                        BlockRole::FunctionBody(f) => {
                            if !last {
                                self.op_err(op, "return before end of function body");
                            }
                            let got: Vec<SemType> = op
                                .operands
                                .iter()
                                .map(|v| self.module.value_ty(*v).clone())
                                .collect();
                            if got != f.result_types {
                                self.op_err(op, "return operand types mismatch function results");
                            }
                        }
                        _ => self.op_err(op, "return inside a nested region"),
                    }
                }
                OpKind::Yield => match role {
                    BlockRole::WhileCond if last => {}
                    _ => self.op_err(op, "yield outside while-condition tail"),
                },
                _ => {}
            }
            // Nested regions see non-qubit outer values.
            for (ri, &region) in op.regions.iter().enumerate() {
                let inner_role = match (&op.kind, ri) {
                    (OpKind::While, 0) => BlockRole::WhileCond,
                    _ => BlockRole::Plain,
                };
                self.walk_block(region, inner_role);
            }
            for r in &op.results.clone() {
                self.define(*r, block, &mut defined_here);
            }
        }
        match role {
            BlockRole::FunctionBody(_) => {
                let terminated = b
                    .ops
                    .last()
                    .is_some_and(|o| matches!(self.module.op(*o).kind, OpKind::Return));
                if !terminated {
                    self.internal("function body does not end in return");
                }
            }
            BlockRole::WhileCond => {
                let terminated = b
                    .ops
                    .last()
                    .is_some_and(|o| matches!(self.module.op(*o).kind, OpKind::Yield));
                if !terminated {
                    self.internal("while condition does not end in yield");
                }
            }
            BlockRole::Plain => {}
        }
        for v in defined_here {
            self.visible[v.0 as usize] = false;
            self.def_block[v.0 as usize] = u32::MAX;
        }
    }

    fn check_operands(&mut self, op: &Op, block: BlockId) {
        for v in &op.operands {
            if !self.visible[v.0 as usize] {
                self.op_err(op, format!("operand %{} used before definition", v.0));
            } else if self.module.value_ty(*v).is_qubit()
                && self.def_block[v.0 as usize] != block.0
            {
                self.op_err(
                    op,
                    format!("qubit value %{} crosses a region boundary", v.0),
                );
            }
        }
    }

    /// Linearity: a qubit-typed value feeds at most one gate/measure/reset.
    fn check_consumption(&mut self, op: &Op) {
        let consuming = matches!(
            op.kind,
            OpKind::Gate { .. } | OpKind::Measure | OpKind::Reset
        );
        if !consuming {
            return;
        }
        for v in self.module.qubit_operands(op).to_vec() {
            if self.module.value_ty(v).is_qubit() {
                let count = &mut self.consumed[v.0 as usize];
                *count += 1;
                if *count > 1 {
                    let label = op_label(op);
                    self.internal(format!(
                        "qubit value %{} consumed more than once (op `{label}`)",
                        v.0
                    ));
                }
            }
        }
    }

    fn check_types(&mut self, op: &Op) {
        let ty = |v: &ValueId| self.module.value_ty(*v).clone();
        match &op.kind {
            OpKind::QAlloc { size } => {
                if op.results.len() != 1
                    || ty(&op.results[0]) != SemType::QubitArray(Some(*size))
                {
                    self.op_err(op, "q.alloc result must be a sized qubit array");
                }
            }
            OpKind::QDealloc => {
                if op.operands.len() != 1 || !ty(&op.operands[0]).is_qubit_array() {
                    self.op_err(op, "q.dealloc expects one qubit array");
                }
            }
            OpKind::Extract { index } => {
                let ok = match index {
                    Some(i) => {
                        op.operands.len() == 1
                            && ty(&op.operands[0]).is_qubit_array()
                            && match ty(&op.operands[0]).array_size() {
                                Some(n) => *i >= 0 && (*i as u64) < n,
                                None => *i >= 0,
                            }
                    }
                    None => {
                        op.operands.len() == 2
                            && ty(&op.operands[0]).is_qubit_array()
                            && matches!(ty(&op.operands[1]), SemType::Index | SemType::Int(_))
                    }
                };
                if !ok || op.results.len() != 1 || !ty(&op.results[0]).is_qubit() {
                    self.op_err(op, "malformed q.extract");
                }
            }
            OpKind::Gate { name, angles } => {
                let Some(info) = gates::lookup(name) else {
                    self.op_err(op, format!("unknown gate `{name}`"));
                    return;
                };
                let n_param_operands = match angles {
                    Some(a) => {
                        if a.len() != info.num_params {
                            self.op_err(op, "gate angle attribute arity mismatch");
                        }
                        0
                    }
                    None => info.num_params,
                };
                let qubit_operands = &op.operands[n_param_operands.min(op.operands.len())..];
                for p in &op.operands[..n_param_operands.min(op.operands.len())] {
                    if !matches!(ty(p), SemType::Float(_)) {
                        self.op_err(op, "gate parameter must be f64");
                    }
                }
                if qubit_operands.len() != info.num_qubits {
                    self.op_err(
                        op,
                        format!(
                            "gate `{name}` expects {} qubit operands, has {}",
                            info.num_qubits,
                            qubit_operands.len()
                        ),
                    );
                    return;
                }
                let all_qubit = qubit_operands.iter().all(|v| ty(v).is_qubit());
                let all_array = qubit_operands.iter().all(|v| ty(v).is_qubit_array());
                if !all_qubit && !all_array {
                    self.op_err(op, "gate operands mix qubits and arrays");
                }
                if op.results.len() != qubit_operands.len() {
                    self.op_err(op, "gate must yield one result per qubit operand");
                    return;
                }
                for (i, r) in op.results.iter().enumerate() {
                    if ty(r) != ty(&qubit_operands[i]) {
                        self.op_err(op, "gate result type mismatch");
                    }
                }
            }
            OpKind::Measure => {
                let ok = op.operands.len() == 1
                    && ty(&op.operands[0]).is_qubit()
                    && op.results.len() == 2
                    && ty(&op.results[0]) == SemType::Bool
                    && ty(&op.results[1]).is_qubit();
                if !ok {
                    self.op_err(op, "malformed q.measure");
                }
            }
            OpKind::Reset => {
                let ok = op.operands.len() == 1
                    && op.results.len() == 1
                    && ty(&op.operands[0]) == ty(&op.results[0])
                    && (ty(&op.operands[0]).is_qubit() || ty(&op.operands[0]).is_qubit_array());
                if !ok {
                    self.op_err(op, "malformed q.reset");
                }
            }
            OpKind::Slice { start, step, stop } => {
                let ok = op.operands.len() == 1
                    && ty(&op.operands[0]).is_qubit_array()
                    && *step >= 1
                    && *start >= 0
                    && stop >= start;
                if !ok {
                    self.op_err(op, "malformed q.slice");
                    return;
                }
                let expect = ((stop - start) / step + 1) as u64;
                if ty(&op.results[0]).array_size() != Some(expect) {
                    self.op_err(op, "q.slice result size mismatch");
                }
                if let Some(n) = ty(&op.operands[0]).array_size() {
                    if *stop as u64 >= n {
                        self.op_err(op, "q.slice range exceeds register size");
                    }
                }
            }
            OpKind::Concat => {
                let ok = op.operands.len() == 2
                    && ty(&op.operands[0]).is_qubit_array()
                    && ty(&op.operands[1]).is_qubit_array()
                    && op.results.len() == 1;
                if !ok {
                    self.op_err(op, "malformed q.concat");
                }
            }
            OpKind::CtrlRegion => {
                if op.operands.len() != 1 || !ty(&op.operands[0]).is_qubit() {
                    self.op_err(op, "ctrl region expects one control qubit");
                }
                self.check_region_count(op, 1);
            }
            OpKind::AdjRegion => {
                if !op.operands.is_empty() {
                    self.op_err(op, "adj region takes no operands");
                }
                self.check_region_count(op, 1);
            }
            OpKind::PowRegion { power } => {
                let ok = match power {
                    Some(_) => op.operands.is_empty(),
                    None => {
                        op.operands.len() == 1 && matches!(ty(&op.operands[0]), SemType::Int(_))
                    }
                };
                if !ok {
                    self.op_err(op, "malformed pow region operands");
                }
                self.check_region_count(op, 1);
            }
            OpKind::Constant(c) => {
                if op.results.len() != 1 || ty(&op.results[0]) != c.ty() {
                    self.op_err(op, "constant result type mismatch");
                }
            }
            OpKind::GetGlobal { name } => {
                match self.module.global(name) {
                    Some(c) => {
                        if ty(&op.results[0]) != c.ty() {
                            self.op_err(op, "get_global type mismatch");
                        }
                    }
                    None => self.op_err(op, format!("unknown global `@{name}`")),
                }
            }
            OpKind::CellAlloc { size } => {
                let ok = matches!(ty(&op.results[0]), SemType::Cell(_, s) if s == *size);
                if !ok {
                    self.op_err(op, "cell result type mismatch");
                }
            }
            OpKind::Load => {
                let SemType::Cell(elem, size) = ty(&op.operands[0]) else {
                    self.op_err(op, "load from non-cell");
                    return;
                };
                if size.is_some() != (op.operands.len() == 2) {
                    self.op_err(op, "load index arity mismatch");
                }
                let expect = widened(&elem);
                if ty(&op.results[0]) != expect {
                    self.op_err(op, "load result type mismatch");
                }
            }
            OpKind::Store => {
                if op.operands.len() < 2 {
                    self.op_err(op, "store needs value and cell");
                    return;
                }
                let SemType::Cell(elem, size) = ty(&op.operands[1]) else {
                    self.op_err(op, "store to non-cell");
                    return;
                };
                if size.is_some() != (op.operands.len() == 3) {
                    self.op_err(op, "store index arity mismatch");
                }
                let compatible = matches!(
                    (&*elem, ty(&op.operands[0])),
                    (SemType::Bool, SemType::Bool)
                        | (SemType::Int(_), SemType::Int(_))
                        | (SemType::Int(_), SemType::Bool)
                        | (SemType::Float(_), SemType::Float(_))
                );
                if !compatible {
                    self.op_err(op, "store value type mismatch");
                }
            }
            OpKind::Arith(kind) => {
                let arity = if kind.is_unary() { 1 } else { 2 };
                if op.operands.len() != arity {
                    self.op_err(op, "arith arity mismatch");
                    return;
                }
                let t0 = ty(&op.operands[0]);
                if kind.is_float() {
                    if !matches!(t0, SemType::Float(_)) {
                        self.op_err(op, "float arith on non-float");
                    }
                } else if !matches!(t0, SemType::Int(_) | SemType::Index | SemType::Bool) {
                    self.op_err(op, "integer arith on non-integer");
                }
                if arity == 2 && ty(&op.operands[1]) != t0 {
                    self.op_err(op, "arith operand type mismatch");
                }
                if ty(&op.results[0]) != t0 {
                    self.op_err(op, "arith result type mismatch");
                }
            }
            OpKind::Cmp { float, .. } => {
                if op.operands.len() != 2 {
                    self.op_err(op, "cmp arity mismatch");
                    return;
                }
                let t0 = ty(&op.operands[0]);
                if *float != matches!(t0, SemType::Float(_)) {
                    self.op_err(op, "cmp float flag mismatch");
                }
                if ty(&op.operands[1]) != t0 || ty(&op.results[0]) != SemType::Bool {
                    self.op_err(op, "cmp type mismatch");
                }
            }
            OpKind::Cast(kind) => {
                let t0 = ty(&op.operands[0]);
                let tr = ty(&op.results[0]);
                let ok = match kind {
                    CastKind::SiToFp => {
                        matches!(t0, SemType::Int(_) | SemType::Bool)
                            && matches!(tr, SemType::Float(_))
                    }
                    CastKind::IndexCast => matches!(
                        (&t0, &tr),
                        (SemType::Int(_), SemType::Index) | (SemType::Index, SemType::Int(_))
                    ),
                };
                if !ok {
                    self.op_err(op, "invalid cast");
                }
            }
            OpKind::If => {
                if op.operands.len() != 1 || ty(&op.operands[0]) != SemType::Bool {
                    self.op_err(op, "if condition must be i1");
                }
                self.check_region_count(op, 2);
            }
            OpKind::For { lower, upper, step } => {
                let wanted =
                    matches!(lower, Bound::Value) as usize + matches!(upper, Bound::Value) as usize;
                if op.operands.len() != wanted {
                    self.op_err(op, "loop bound operand arity mismatch");
                }
                for v in &op.operands {
                    if ty(v) != SemType::Index {
                        self.op_err(op, "loop bound must be index-typed");
                    }
                }
                if *step < 1 {
                    self.op_err(op, "loop step must be positive");
                }
                self.check_region_count(op, 1);
                if op.regions.len() == 1 {
                    let body = self.module.block(op.regions[0]);
                    let one_index_arg = body.args.len() == 1
                        && *self.module.value_ty(body.args[0]) == SemType::Index;
                    if !one_index_arg {
                        self.op_err(op, "loop body must take one index argument");
                    }
                }
            }
            OpKind::While => self.check_region_count(op, 2),
            OpKind::Yield => {
                if op.operands.len() != 1 || ty(&op.operands[0]) != SemType::Bool {
                    self.op_err(op, "yield operand must be i1");
                }
            }
            OpKind::Call { callee } => {
                let Some(f) = self.module.function(callee) else {
                    self.op_err(op, format!("call to unknown function `@{callee}`"));
                    return;
                };
                if f.param_types.len() != op.operands.len() {
                    self.op_err(op, "call operand arity mismatch");
                    return;
                }
                for (v, want) in op.operands.iter().zip(&f.param_types) {
                    let got = ty(v);
                    let ok = match (&got, want) {
                        (SemType::QubitArray(_), SemType::QubitArray(None)) => true,
                        (SemType::QubitArray(None), SemType::QubitArray(_)) => true,
                        _ => got == *want,
                    };
                    if !ok {
                        self.op_err(op, "call operand type mismatch");
                    }
                }
                let got: Vec<SemType> = op.results.iter().map(|r| ty(r)).collect();
                if got != f.result_types {
                    self.op_err(op, "call result type mismatch");
                }
            }
            OpKind::Return => {}
            OpKind::Print { pieces } => {
                for piece in pieces {
                    if let PrintPiece::Arg(i) = piece {
                        if *i >= op.operands.len() {
                            self.op_err(op, "print argument index out of range");
                        }
                    }
                }
            }
        }
    }

    fn check_region_count(&mut self, op: &Op, n: usize) {
        if op.regions.len() != n {
            self.op_err(op, format!("expected {n} region(s)"));
        }
    }
}

fn widened(elem: &SemType) -> SemType {
    match elem {
        SemType::Bool => SemType::Bool,
        SemType::Int(_) => SemType::int64(),
        SemType::Float(_) => SemType::f64(),
        other => other.clone(),
    }
}

fn op_label(op: &Op) -> String {
    match &op.kind {
        OpKind::Gate { name, .. } => format!("qvs.{name}"),
        OpKind::QAlloc { .. } => "q.alloc".into(),
        OpKind::QDealloc => "q.dealloc".into(),
        OpKind::Extract { .. } => "q.extract".into(),
        OpKind::Measure => "q.measure".into(),
        OpKind::Reset => "q.reset".into(),
        OpKind::Slice { .. } => "q.slice".into(),
        OpKind::Concat => "q.concat".into(),
        OpKind::CtrlRegion => "q.ctrl_region".into(),
        OpKind::AdjRegion => "q.adj_region".into(),
        OpKind::PowRegion { .. } => "q.pow_region".into(),
        OpKind::Constant(_) => "constant".into(),
        OpKind::GetGlobal { .. } => "get_global".into(),
        OpKind::CellAlloc { .. } => "cell".into(),
        OpKind::Load => "load".into(),
        OpKind::Store => "store".into(),
        OpKind::Arith(k) => k.name().into(),
        OpKind::Cmp { .. } => "cmp".into(),
        OpKind::Cast(_) => "cast".into(),
        OpKind::If => "scf.if".into(),
        OpKind::For { .. } => "affine.for".into(),
        OpKind::While => "scf.while".into(),
        OpKind::Yield => "yield".into(),
        OpKind::Call { callee } => format!("call @{callee}"),
        OpKind::Return => "return".into(),
        OpKind::Print { .. } => "print".into(),
    }
}
