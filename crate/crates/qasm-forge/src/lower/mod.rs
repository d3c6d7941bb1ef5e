//! Lowering from structured IR to a branch-based CFG whose instructions are
//! QIR-style runtime calls on opaque handles.
//!
//! Qubit SSA chains collapse to their root handles: every gate call receives
//! the handle produced by the extract (or allocation) at the start of its
//! chain. Structured `if` becomes a cond_br diamond; counted loops lower to
//! the header/body/exit pattern with an explicit induction cell; ctrl/adj/pow
//! markers become paired `__quantum__rt__start_*` / `__quantum__rt__end_*`
//! calls around the lowered body.

use crate::diag::Diagnostic;
use crate::ir::{
    ArithKind, Block as IrBlock, BlockId, Bound, CastKind, CmpPred, ConstValue, IrModule, Op,
    OpId, OpKind, PrintPiece, Segment, SemType, ValueId,
};
use std::collections::HashMap;
use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LirValue(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LirType {
    I1,
    I64,
    F64,
    Qubit,
    Array,
    Cell,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LirConst {
    Int(i64),
    Float(f64),
    Bool(bool),
}

#[derive(Debug, Clone, PartialEq)]
pub enum LirArg {
    Value(LirValue),
    Str(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum LirInst {
    Const {
        dst: LirValue,
        value: LirConst,
    },
    /// Runtime or user-function call; runtime symbols start `__quantum__`.
    Call {
        symbol: String,
        args: Vec<LirArg>,
        dst: Option<LirValue>,
        segment: Segment,
    },
    Arith {
        kind: ArithKind,
        dst: LirValue,
        args: Vec<LirValue>,
    },
    SiToFp {
        dst: LirValue,
        src: LirValue,
    },
    Cmp {
        pred: CmpPred,
        float: bool,
        dst: LirValue,
        lhs: LirValue,
        rhs: LirValue,
    },
    CellAlloc {
        dst: LirValue,
        size: Option<u64>,
    },
    Load {
        dst: LirValue,
        cell: LirValue,
        index: Option<LirValue>,
    },
    Store {
        value: LirValue,
        cell: LirValue,
        index: Option<LirValue>,
    },
    Br {
        target: usize,
    },
    CondBr {
        cond: LirValue,
        then_bb: usize,
        else_bb: usize,
    },
    Ret {
        value: Option<LirValue>,
    },
}

#[derive(Debug, Clone)]
pub struct LirFunction {
    pub name: String,
    pub params: Vec<LirValue>,
    pub blocks: Vec<Vec<LirInst>>,
    pub n_values: u32,
}

#[derive(Debug, Clone, Default)]
pub struct LirModule {
    pub functions: Vec<LirFunction>,
    /// All referenced external symbols, sorted for deterministic emission.
    pub declared_symbols: Vec<String>,
}

impl LirModule {
    pub fn function(&self, name: &str) -> Option<&LirFunction> {
        self.functions.iter().find(|f| f.name == name)
    }
}

pub mod symbols {
    pub const ALLOCATE: &str = "__quantum__rt__qubit_allocate_array";
    pub const GET_ELEMENT: &str = "__quantum__rt__array_get_element_ptr_1d";
    pub const RELEASE: &str = "__quantum__rt__qubit_release_array";
    pub const FINALIZE: &str = "__quantum__rt__finalize";
    pub const SLICE: &str = "__quantum__rt__array_slice";
    pub const CONCAT: &str = "__quantum__rt__array_concatenate";
    pub const START_CTRL: &str = "__quantum__rt__start_ctrl_u_region";
    pub const END_CTRL: &str = "__quantum__rt__end_ctrl_u_region";
    pub const START_ADJ: &str = "__quantum__rt__start_adj_u_region";
    pub const END_ADJ: &str = "__quantum__rt__end_adj_u_region";
    pub const START_POW: &str = "__quantum__rt__start_pow_u_region";
    pub const END_POW: &str = "__quantum__rt__end_pow_u_region";
    pub const MEASURE: &str = "__quantum__qis__mz";
    pub const RESET: &str = "__quantum__qis__reset";
    pub const PRINT: &str = "__quantum__rt__print";

    pub fn gate(name: &str) -> String {
        format!("__quantum__qis__{name}")
    }
}

pub fn lower_to_cfg(module: &IrModule) -> Result<LirModule, Diagnostic> {
    let mut lir = LirModule::default();
    let mut declared: std::collections::BTreeSet<String> = std::collections::BTreeSet::new();
    for f in &module.functions {
        match f.entry {
            Some(entry) => {
                let mut fl = FunctionLowerer {
                    module,
                    values: HashMap::new(),
                    types: Vec::new(),
                    blocks: vec![Vec::new()],
                    current: 0,
                    declared: &mut declared,
                    is_main: f.name == "main",
                };
                for arg in &module.block(entry).args {
                    let ty = lir_type(module.value_ty(*arg));
                    fl.bind(*arg, ty);
                }
                let params: Vec<LirValue> = module
                    .block(entry)
                    .args
                    .iter()
                    .map(|a| fl.values[a])
                    .collect();
                fl.lower_block(entry)?;
                // A trailing ret is guaranteed by the IR verifier; main gets
                // finalize() just before it (emitted by the Return case).
                lir.functions.push(LirFunction {
                    name: f.name.clone(),
                    params,
                    blocks: fl.blocks,
                    n_values: fl.types.len() as u32,
                });
            }
            None => {
                declared.insert(f.name.clone());
            }
        }
    }
    lir.declared_symbols = declared.into_iter().collect();
    Ok(lir)
}

fn lir_type(ty: &SemType) -> LirType {
    match ty {
        SemType::Qubit => LirType::Qubit,
        SemType::QubitArray(_) => LirType::Array,
        SemType::Bool => LirType::I1,
        SemType::Int(_) | SemType::Index => LirType::I64,
        SemType::Float(_) => LirType::F64,
        SemType::Cell(..) => LirType::Cell,
        SemType::Result => LirType::I1,
    }
}

struct FunctionLowerer<'m, 'd> {
    module: &'m IrModule,
    /// IR value -> LIR value. Qubit results map to their chain root handle.
    values: HashMap<ValueId, LirValue>,
    types: Vec<LirType>,
    blocks: Vec<Vec<LirInst>>,
    current: usize,
    declared: &'d mut std::collections::BTreeSet<String>,
    is_main: bool,
}

impl<'m, 'd> FunctionLowerer<'m, 'd> {
    fn new_value(&mut self, ty: LirType) -> LirValue {
        let v = LirValue(self.types.len() as u32);
        self.types.push(ty);
        v
    }

    fn bind(&mut self, ir: ValueId, ty: LirType) -> LirValue {
        let v = self.new_value(ty);
        self.values.insert(ir, v);
        v
    }

    fn get(&self, ir: ValueId) -> Result<LirValue, Diagnostic> {
        self.values.get(&ir).copied().ok_or_else(|| {
            Diagnostic::error_nowhere(format!("internal: unlowered value %{}", ir.0))
        })
    }

    fn push(&mut self, inst: LirInst) {
        self.blocks[self.current].push(inst);
    }

    fn new_block(&mut self) -> usize {
        self.blocks.push(Vec::new());
        self.blocks.len() - 1
    }

    fn const_i64(&mut self, v: i64) -> LirValue {
        let dst = self.new_value(LirType::I64);
        self.push(LirInst::Const {
            dst,
            value: LirConst::Int(v),
        });
        dst
    }

    fn const_f64(&mut self, v: f64) -> LirValue {
        let dst = self.new_value(LirType::F64);
        self.push(LirInst::Const {
            dst,
            value: LirConst::Float(v),
        });
        dst
    }

    fn call(
        &mut self,
        symbol: &str,
        args: Vec<LirArg>,
        result: Option<LirType>,
        segment: Segment,
    ) -> Option<LirValue> {
        self.declared.insert(symbol.to_string());
        let dst = result.map(|t| self.new_value(t));
        self.push(LirInst::Call {
            symbol: symbol.to_string(),
            args,
            dst,
            segment,
        });
        dst
    }

    fn lower_block(&mut self, block: BlockId) -> Result<(), Diagnostic> {
        let b: &IrBlock = self.module.block(block);
        for &op_id in &b.ops {
            self.lower_op(op_id)?;
        }
        Ok(())
    }

    fn lower_op(&mut self, op_id: OpId) -> Result<(), Diagnostic> {
        let op: &Op = self.module.op(op_id);
        match &op.kind {
            OpKind::QAlloc { size } => {
                let n = self.const_i64(*size as i64);
                let arr = self
                    .call(
                        symbols::ALLOCATE,
                        vec![LirArg::Value(n)],
                        Some(LirType::Array),
                        Segment::None,
                    )
                    .expect("allocate returns a handle");
                self.values.insert(op.results[0], arr);
            }
            OpKind::QDealloc => {
                let arr = self.get(op.operands[0])?;
                self.call(
                    symbols::RELEASE,
                    vec![LirArg::Value(arr)],
                    None,
                    Segment::None,
                );
            }
            OpKind::Extract { index } => {
                let arr = self.get(op.operands[0])?;
                let idx = match index {
                    Some(i) => self.const_i64(*i),
                    None => self.get(op.operands[1])?,
                };
                let q = self
                    .call(
                        symbols::GET_ELEMENT,
                        vec![LirArg::Value(arr), LirArg::Value(idx)],
                        Some(LirType::Qubit),
                        Segment::None,
                    )
                    .expect("extract returns a handle");
                self.values.insert(op.results[0], q);
            }
            OpKind::Gate { name, angles } => {
                let n_params = self.module.gate_param_operands(op);
                let mut args: Vec<LirArg> = Vec::new();
                match angles {
                    Some(a) => {
                        for v in a {
                            let c = self.const_f64(*v);
                            args.push(LirArg::Value(c));
                        }
                    }
                    None => {
                        for v in &op.operands[..n_params] {
                            args.push(LirArg::Value(self.get(*v)?));
                        }
                    }
                }
                let qubit_operands = &op.operands[n_params..];
                let is_broadcast = qubit_operands
                    .iter()
                    .any(|v| self.module.value_ty(*v).is_qubit_array());
                if is_broadcast {
                    // Expand per element using the compile-time length.
                    let mut size = None;
                    for v in qubit_operands {
                        size = size.or(self.module.value_ty(*v).array_size());
                    }
                    let Some(size) = size else {
                        return Err(Diagnostic::error_nowhere(format!(
                            "internal: cannot lower broadcast `{name}` over unsized register"
                        )));
                    };
                    let arrays: Vec<LirValue> = qubit_operands
                        .iter()
                        .map(|v| self.get(*v))
                        .collect::<Result<_, _>>()?;
                    for k in 0..size {
                        let idx = self.const_i64(k as i64);
                        let mut call_args = args.clone();
                        for arr in &arrays {
                            let q = self
                                .call(
                                    symbols::GET_ELEMENT,
                                    vec![LirArg::Value(*arr), LirArg::Value(idx)],
                                    Some(LirType::Qubit),
                                    Segment::None,
                                )
                                .expect("extract returns a handle");
                            call_args.push(LirArg::Value(q));
                        }
                        self.call(&symbols::gate(name), call_args, None, op.segment);
                    }
                    // Array results root to their input arrays.
                    for (res, input) in op.results.iter().zip(qubit_operands) {
                        let root = self.get(*input)?;
                        self.values.insert(*res, root);
                    }
                } else {
                    for v in qubit_operands {
                        args.push(LirArg::Value(self.get(*v)?));
                    }
                    self.call(&symbols::gate(name), args, None, op.segment);
                    for (res, input) in op.results.iter().zip(qubit_operands) {
                        let root = self.get(*input)?;
                        self.values.insert(*res, root);
                    }
                }
            }
            OpKind::Measure => {
                let q = self.get(op.operands[0])?;
                let bit = self
                    .call(
                        symbols::MEASURE,
                        vec![LirArg::Value(q)],
                        Some(LirType::I1),
                        Segment::None,
                    )
                    .expect("mz returns a bit");
                self.values.insert(op.results[0], bit);
                self.values.insert(op.results[1], q);
            }
            OpKind::Reset => {
                let ty = self.module.value_ty(op.operands[0]).clone();
                if let Some(size) = ty.array_size() {
                    let arr = self.get(op.operands[0])?;
                    for k in 0..size {
                        let idx = self.const_i64(k as i64);
                        let q = self
                            .call(
                                symbols::GET_ELEMENT,
                                vec![LirArg::Value(arr), LirArg::Value(idx)],
                                Some(LirType::Qubit),
                                Segment::None,
                            )
                            .expect("extract returns a handle");
                        self.call(symbols::RESET, vec![LirArg::Value(q)], None, op.segment);
                    }
                    self.values.insert(op.results[0], arr);
                } else if ty.is_qubit_array() {
                    return Err(Diagnostic::error_nowhere(
                        "internal: cannot lower reset over unsized register",
                    ));
                } else {
                    let q = self.get(op.operands[0])?;
                    self.call(symbols::RESET, vec![LirArg::Value(q)], None, op.segment);
                    self.values.insert(op.results[0], q);
                }
            }
            OpKind::Slice { start, step, stop } => {
                let arr = self.get(op.operands[0])?;
                let a = self.const_i64(*start);
                let s = self.const_i64(*step);
                let z = self.const_i64(*stop);
                let out = self
                    .call(
                        symbols::SLICE,
                        vec![
                            LirArg::Value(arr),
                            LirArg::Value(a),
                            LirArg::Value(s),
                            LirArg::Value(z),
                        ],
                        Some(LirType::Array),
                        Segment::None,
                    )
                    .expect("slice returns a handle");
                self.values.insert(op.results[0], out);
            }
            OpKind::Concat => {
                let a = self.get(op.operands[0])?;
                let b = self.get(op.operands[1])?;
                let out = self
                    .call(
                        symbols::CONCAT,
                        vec![LirArg::Value(a), LirArg::Value(b)],
                        Some(LirType::Array),
                        Segment::None,
                    )
                    .expect("concat returns a handle");
                self.values.insert(op.results[0], out);
            }
            OpKind::CtrlRegion => {
                let ctrl = self.get(op.operands[0])?;
                self.call(symbols::START_CTRL, vec![], None, Segment::None);
                self.lower_block(op.regions[0])?;
                self.call(
                    symbols::END_CTRL,
                    vec![LirArg::Value(ctrl)],
                    None,
                    Segment::None,
                );
            }
            OpKind::AdjRegion => {
                self.call(symbols::START_ADJ, vec![], None, Segment::None);
                self.lower_block(op.regions[0])?;
                self.call(symbols::END_ADJ, vec![], None, Segment::None);
            }
            OpKind::PowRegion { power } => {
                let k = match power {
                    Some(k) => self.const_i64(*k),
                    None => self.get(op.operands[0])?,
                };
                self.call(symbols::START_POW, vec![], None, Segment::None);
                self.lower_block(op.regions[0])?;
                self.call(symbols::END_POW, vec![LirArg::Value(k)], None, Segment::None);
            }
            OpKind::Constant(c) => {
                let (ty, value) = match c {
                    ConstValue::Int(v) | ConstValue::Index(v) => (LirType::I64, LirConst::Int(*v)),
                    ConstValue::Float(v) => (LirType::F64, LirConst::Float(*v)),
                    ConstValue::Bool(b) => (LirType::I1, LirConst::Bool(*b)),
                };
                let dst = self.new_value(ty);
                self.push(LirInst::Const { dst, value });
                self.values.insert(op.results[0], dst);
            }
            OpKind::GetGlobal { name } => {
                let c = self.module.global(name).ok_or_else(|| {
                    Diagnostic::error_nowhere(format!("internal: unknown global @{name}"))
                })?;
                let (ty, value) = match c {
                    ConstValue::Int(v) | ConstValue::Index(v) => (LirType::I64, LirConst::Int(v)),
                    ConstValue::Float(v) => (LirType::F64, LirConst::Float(v)),
                    ConstValue::Bool(b) => (LirType::I1, LirConst::Bool(b)),
                };
                let dst = self.new_value(ty);
                self.push(LirInst::Const { dst, value });
                self.values.insert(op.results[0], dst);
            }
            OpKind::CellAlloc { size } => {
                let dst = self.new_value(LirType::Cell);
                self.push(LirInst::CellAlloc { dst, size: *size });
                self.values.insert(op.results[0], dst);
            }
            OpKind::Load => {
                let cell = self.get(op.operands[0])?;
                let index = match op.operands.get(1) {
                    Some(v) => Some(self.get(*v)?),
                    None => None,
                };
                let dst = self.bind(op.results[0], lir_type(self.module.value_ty(op.results[0])));
                self.push(LirInst::Load { dst, cell, index });
            }
            OpKind::Store => {
                let value = self.get(op.operands[0])?;
                let cell = self.get(op.operands[1])?;
                let index = match op.operands.get(2) {
                    Some(v) => Some(self.get(*v)?),
                    None => None,
                };
                self.push(LirInst::Store { value, cell, index });
            }
            OpKind::Arith(kind) => {
                let args: Vec<LirValue> = op
                    .operands
                    .iter()
                    .map(|v| self.get(*v))
                    .collect::<Result<_, _>>()?;
                let dst = self.bind(op.results[0], lir_type(self.module.value_ty(op.results[0])));
                self.push(LirInst::Arith {
                    kind: *kind,
                    dst,
                    args,
                });
            }
            OpKind::Cmp { pred, float } => {
                let lhs = self.get(op.operands[0])?;
                let rhs = self.get(op.operands[1])?;
                let dst = self.bind(op.results[0], LirType::I1);
                self.push(LirInst::Cmp {
                    pred: *pred,
                    float: *float,
                    dst,
                    lhs,
                    rhs,
                });
            }
            OpKind::Cast(kind) => match kind {
                CastKind::SiToFp => {
                    let a = self.get(op.operands[0])?;
                    let dst = self.bind(op.results[0], LirType::F64);
                    self.push(LirInst::SiToFp { dst, src: a });
                }
                CastKind::IndexCast => {
                    // index and i64 share a representation.
                    let a = self.get(op.operands[0])?;
                    self.values.insert(op.results[0], a);
                }
            },
            OpKind::If => {
                let cond = self.get(op.operands[0])?;
                let then_bb = self.new_block();
                let else_empty = self.module.block(op.regions[1]).ops.is_empty();
                let else_bb = if else_empty { None } else { Some(self.new_block()) };
                let merge_bb = self.new_block();
                self.push(LirInst::CondBr {
                    cond,
                    then_bb,
                    else_bb: else_bb.unwrap_or(merge_bb),
                });
                self.current = then_bb;
                self.lower_block(op.regions[0])?;
                self.push(LirInst::Br { target: merge_bb });
                if let Some(else_bb) = else_bb {
                    self.current = else_bb;
                    self.lower_block(op.regions[1])?;
                    self.push(LirInst::Br { target: merge_bb });
                }
                self.current = merge_bb;
            }
            OpKind::For { lower, upper, step } => {
                // Induction variable lives in a cell: store lb; header loads
                // and compares; body loads for uses; latch increments.
                let mut slot = 0usize;
                let mut bound = |b: &Bound, fl: &mut Self| -> Result<LirValue, Diagnostic> {
                    match b {
                        Bound::Const(v) => Ok(fl.const_i64(*v)),
                        Bound::Value => {
                            let v = fl.get(op.operands[slot])?;
                            slot += 1;
                            Ok(v)
                        }
                    }
                };
                let lb = bound(lower, self)?;
                let ub = bound(upper, self)?;
                let iv_cell = self.new_value(LirType::Cell);
                self.push(LirInst::CellAlloc {
                    dst: iv_cell,
                    size: None,
                });
                self.push(LirInst::Store {
                    value: lb,
                    cell: iv_cell,
                    index: None,
                });
                let header = self.new_block();
                let body = self.new_block();
                let exit = self.new_block();
                self.push(LirInst::Br { target: header });

                self.current = header;
                let i = self.new_value(LirType::I64);
                self.push(LirInst::Load {
                    dst: i,
                    cell: iv_cell,
                    index: None,
                });
                let cond = self.new_value(LirType::I1);
                self.push(LirInst::Cmp {
                    pred: CmpPred::Lt,
                    float: false,
                    dst: cond,
                    lhs: i,
                    rhs: ub,
                });
                self.push(LirInst::CondBr {
                    cond,
                    then_bb: body,
                    else_bb: exit,
                });

                self.current = body;
                let iv = self.new_value(LirType::I64);
                self.push(LirInst::Load {
                    dst: iv,
                    cell: iv_cell,
                    index: None,
                });
                let iv_arg = self.module.block(op.regions[0]).args[0];
                self.values.insert(iv_arg, iv);
                self.lower_block(op.regions[0])?;
                let cur = self.new_value(LirType::I64);
                self.push(LirInst::Load {
                    dst: cur,
                    cell: iv_cell,
                    index: None,
                });
                let step_v = self.const_i64(*step);
                let next = self.new_value(LirType::I64);
                self.push(LirInst::Arith {
                    kind: ArithKind::AddI,
                    dst: next,
                    args: vec![cur, step_v],
                });
                self.push(LirInst::Store {
                    value: next,
                    cell: iv_cell,
                    index: None,
                });
                self.push(LirInst::Br { target: header });

                self.current = exit;
            }
            OpKind::While => {
                let header = self.new_block();
                let body = self.new_block();
                let exit = self.new_block();
                self.push(LirInst::Br { target: header });
                self.current = header;
                // Condition ops run in the header; yield becomes the branch.
                let cond_ops = self.module.block(op.regions[0]).ops.clone();
                let mut cond_value = None;
                for cop in cond_ops {
                    if let OpKind::Yield = self.module.op(cop).kind {
                        cond_value = Some(self.get(self.module.op(cop).operands[0])?);
                    } else {
                        self.lower_op(cop)?;
                    }
                }
                let cond = cond_value.ok_or_else(|| {
                    Diagnostic::error_nowhere("internal: while condition missing yield")
                })?;
                self.push(LirInst::CondBr {
                    cond,
                    then_bb: body,
                    else_bb: exit,
                });
                self.current = body;
                self.lower_block(op.regions[1])?;
                self.push(LirInst::Br { target: header });
                self.current = exit;
            }
            OpKind::Yield => {
                return Err(Diagnostic::error_nowhere(
                    "internal: yield outside while lowering",
                ));
            }
            OpKind::Call { callee } => {
                let args: Vec<LirArg> = op
                    .operands
                    .iter()
                    .map(|v| self.get(*v).map(LirArg::Value))
                    .collect::<Result<_, _>>()?;
                let dst = match op.results.first() {
                    Some(r) => Some(self.bind(*r, lir_type(self.module.value_ty(*r)))),
                    None => None,
                };
                if self.module.function(callee).map_or(true, |f| f.entry.is_none()) {
                    self.declared.insert(callee.clone());
                }
                self.push(LirInst::Call {
                    symbol: callee.clone(),
                    args,
                    dst,
                    segment: Segment::None,
                });
            }
            OpKind::Return => {
                if self.is_main {
                    self.call(symbols::FINALIZE, vec![], None, Segment::None);
                }
                let value = match op.operands.first() {
                    Some(v) => Some(self.get(*v)?),
                    None => None,
                };
                self.push(LirInst::Ret { value });
            }
            OpKind::Print { pieces } => {
                let mut args = Vec::new();
                for piece in pieces {
                    match piece {
                        PrintPiece::Str(s) => args.push(LirArg::Str(s.clone())),
                        PrintPiece::Arg(i) => args.push(LirArg::Value(self.get(op.operands[*i])?)),
                    }
                }
                self.call(symbols::PRINT, args, None, Segment::None);
            }
        }
        Ok(())
    }
}

/// Deterministic textual rendering: declared symbols first (sorted), then
/// each function with `^bbN` labels, one instruction per line.
pub fn emit_text(lir: &LirModule) -> String {
    let mut out = String::new();
    out.push_str("; lowered module\n");
    for sym in &lir.declared_symbols {
        let _ = writeln!(out, "declare @{sym}");
    }
    for f in &lir.functions {
        out.push('\n');
        let params: Vec<String> = f.params.iter().map(|p| format!("%{}", p.0)).collect();
        let _ = writeln!(out, "define @{}({}) {{", f.name, params.join(", "));
        for (bi, block) in f.blocks.iter().enumerate() {
            let _ = writeln!(out, "^bb{bi}:");
            for inst in block {
                let _ = writeln!(out, "  {}", render_inst(inst));
            }
        }
        out.push_str("}\n");
    }
    out
}

fn render_arg(a: &LirArg) -> String {
    match a {
        LirArg::Value(v) => format!("%{}", v.0),
        LirArg::Str(s) => format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\"")),
    }
}

fn render_inst(inst: &LirInst) -> String {
    match inst {
        LirInst::Const { dst, value } => match value {
            LirConst::Int(v) => format!("%{} = const {v}", dst.0),
            LirConst::Float(v) => format!("%{} = const {v:?}", dst.0),
            LirConst::Bool(v) => format!("%{} = const {v}", dst.0),
        },
        LirInst::Call {
            symbol,
            args,
            dst,
            segment,
        } => {
            let args: Vec<String> = args.iter().map(render_arg).collect();
            let seg = match segment {
                Segment::None => "",
                Segment::Compute => " {segment = compute}",
                Segment::Uncompute => " {segment = uncompute}",
            };
            match dst {
                Some(d) => format!("%{} = call @{symbol}({}){seg}", d.0, args.join(", ")),
                None => format!("call @{symbol}({}){seg}", args.join(", ")),
            }
        }
        LirInst::Arith { kind, dst, args } => {
            let args: Vec<String> = args.iter().map(|v| format!("%{}", v.0)).collect();
            format!("%{} = {} {}", dst.0, kind.name(), args.join(", "))
        }
        LirInst::SiToFp { dst, src } => format!("%{} = sitofp %{}", dst.0, src.0),
        LirInst::Cmp {
            pred,
            float,
            dst,
            lhs,
            rhs,
        } => {
            let name = if *float { "cmpf" } else { "cmpi" };
            format!(
                "%{} = {name} {}, %{}, %{}",
                dst.0,
                pred.name(*float),
                lhs.0,
                rhs.0
            )
        }
        LirInst::CellAlloc { dst, size } => match size {
            Some(n) => format!("%{} = cell[{n}]", dst.0),
            None => format!("%{} = cell", dst.0),
        },
        LirInst::Load { dst, cell, index } => match index {
            Some(i) => format!("%{} = load %{}[%{}]", dst.0, cell.0, i.0),
            None => format!("%{} = load %{}", dst.0, cell.0),
        },
        LirInst::Store { value, cell, index } => match index {
            Some(i) => format!("store %{}, %{}[%{}]", value.0, cell.0, i.0),
            None => format!("store %{}, %{}", value.0, cell.0),
        },
        LirInst::Br { target } => format!("br ^bb{target}"),
        LirInst::CondBr {
            cond,
            then_bb,
            else_bb,
        } => format!("cond_br %{}, ^bb{}, ^bb{}", cond.0, then_bb, else_bb),
        LirInst::Ret { value } => match value {
            Some(v) => format!("ret %{}", v.0),
            None => "ret".into(),
        },
    }
}

/// Static check: every start-region call is matched by exactly one end call
/// of the same kind on every path, with proper nesting.
pub fn check_region_pairing(lir: &LirModule) -> Result<(), Diagnostic> {
    for f in &lir.functions {
        let mut states: Vec<Option<Vec<u8>>> = vec![None; f.blocks.len()];
        let mut stack = vec![(0usize, Vec::<u8>::new())];
        while let Some((bi, mut depth)) = stack.pop() {
            if let Some(prev) = &states[bi] {
                if *prev != depth {
                    return Err(Diagnostic::error_nowhere(format!(
                        "region nesting differs across paths into ^bb{bi} of @{}",
                        f.name
                    )));
                }
                continue;
            }
            states[bi] = Some(depth.clone());
            let mut terminated = false;
            for inst in &f.blocks[bi] {
                if let LirInst::Call { symbol, .. } = inst {
                    let kind: Option<(u8, bool)> = match symbol.as_str() {
                        symbols::START_CTRL => Some((0, true)),
                        symbols::END_CTRL => Some((0, false)),
                        symbols::START_ADJ => Some((1, true)),
                        symbols::END_ADJ => Some((1, false)),
                        symbols::START_POW => Some((2, true)),
                        symbols::END_POW => Some((2, false)),
                        _ => None,
                    };
                    if let Some((k, is_start)) = kind {
                        if is_start {
                            depth.push(k);
                        } else if depth.pop() != Some(k) {
                            return Err(Diagnostic::error_nowhere(format!(
                                "mismatched region start/end in @{}",
                                f.name
                            )));
                        }
                    }
                }
                match inst {
                    LirInst::Br { target } => {
                        stack.push((*target, depth.clone()));
                        terminated = true;
                    }
                    LirInst::CondBr {
                        then_bb, else_bb, ..
                    } => {
                        stack.push((*then_bb, depth.clone()));
                        stack.push((*else_bb, depth.clone()));
                        terminated = true;
                    }
                    LirInst::Ret { .. } => {
                        if !depth.is_empty() {
                            return Err(Diagnostic::error_nowhere(format!(
                                "unclosed region at return of @{}",
                                f.name
                            )));
                        }
                        terminated = true;
                    }
                    _ => {}
                }
            }
            if !terminated && !f.blocks[bi].is_empty() {
                // Fallthrough does not exist in this CFG.
            }
        }
    }
    Ok(())
}
