//! Multi-level SSA IR with value-semantics quantum operations.
//!
//! Before lowering, control flow is structured: loop and conditional ops own
//! single-block regions, and every function body is one block ending in
//! `return`. Qubit values form explicit use-define chains: each gate consumes
//! qubit values and yields fresh ones.

pub mod build;
pub mod parse;
pub mod print;
pub mod verify;

use std::collections::HashMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ValueId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OpId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlockId(pub u32);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SemType {
    Qubit,
    /// Qubit register; the size is a compile-time constant when known.
    QubitArray(Option<u64>),
    Bool,
    Int(u8),
    Float(u8),
    Index,
    /// A mutable classical memory cell, optionally an array of `size` slots.
    Cell(Box<SemType>, Option<u64>),
    Result,
}

impl SemType {
    pub fn is_qubit(&self) -> bool {
        matches!(self, SemType::Qubit)
    }

    pub fn is_qubit_array(&self) -> bool {
        matches!(self, SemType::QubitArray(_))
    }

    pub fn int64() -> SemType {
        SemType::Int(64)
    }

    pub fn f64() -> SemType {
        SemType::Float(64)
    }

    pub fn array_size(&self) -> Option<u64> {
        match self {
            SemType::QubitArray(s) => *s,
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConstValue {
    Int(i64),
    Float(f64),
    Bool(bool),
    Index(i64),
}

impl ConstValue {
    pub fn ty(&self) -> SemType {
        match self {
            ConstValue::Int(_) => SemType::int64(),
            ConstValue::Float(_) => SemType::f64(),
            ConstValue::Bool(_) => SemType::Bool,
            ConstValue::Index(_) => SemType::Index,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            ConstValue::Int(v) | ConstValue::Index(v) => Some(*v),
            ConstValue::Bool(b) => Some(*b as i64),
            ConstValue::Float(_) => None,
        }
    }

    pub fn as_float(&self) -> Option<f64> {
        match self {
            ConstValue::Float(v) => Some(*v),
            ConstValue::Int(v) | ConstValue::Index(v) => Some(*v as f64),
            ConstValue::Bool(_) => None,
        }
    }
}

/// Compute-action segment marker carried by ops built from those blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Segment {
    #[default]
    None,
    Compute,
    Uncompute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithKind {
    AddI,
    SubI,
    MulI,
    DivI,
    RemI,
    AddF,
    SubF,
    MulF,
    DivF,
    RemF,
    NegF,
    AndI,
    OrI,
    XorI,
}

impl ArithKind {
    pub fn is_float(&self) -> bool {
        matches!(
            self,
            ArithKind::AddF
                | ArithKind::SubF
                | ArithKind::MulF
                | ArithKind::DivF
                | ArithKind::RemF
                | ArithKind::NegF
        )
    }

    pub fn is_unary(&self) -> bool {
        matches!(self, ArithKind::NegF)
    }

    pub fn name(&self) -> &'static str {
        match self {
            ArithKind::AddI => "addi",
            ArithKind::SubI => "subi",
            ArithKind::MulI => "muli",
            ArithKind::DivI => "divi",
            ArithKind::RemI => "remi",
            ArithKind::AddF => "addf",
            ArithKind::SubF => "subf",
            ArithKind::MulF => "mulf",
            ArithKind::DivF => "divf",
            ArithKind::RemF => "remf",
            ArithKind::NegF => "negf",
            ArithKind::AndI => "andi",
            ArithKind::OrI => "ori",
            ArithKind::XorI => "xori",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpPred {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpPred {
    pub fn name(&self, float: bool) -> &'static str {
        if float {
            match self {
                CmpPred::Eq => "oeq",
                CmpPred::Ne => "one",
                CmpPred::Lt => "olt",
                CmpPred::Le => "ole",
                CmpPred::Gt => "ogt",
                CmpPred::Ge => "oge",
            }
        } else {
            match self {
                CmpPred::Eq => "eq",
                CmpPred::Ne => "ne",
                CmpPred::Lt => "slt",
                CmpPred::Le => "sle",
                CmpPred::Gt => "sgt",
                CmpPred::Ge => "sge",
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CastKind {
    /// Signed int to f64.
    SiToFp,
    /// i64 <-> index (direction from the result type).
    IndexCast,
}

/// Either a compile-time constant or an SSA operand (stored in the op's
/// operand list at the position tracked by the op kind).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Const(i64),
    Value,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PrintPiece {
    Str(String),
    /// Index into the print op's operands.
    Arg(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum OpKind {
    /// Allocate a qubit register of compile-time-constant size.
    QAlloc { size: u64 },
    QDealloc,
    /// Extract one qubit from a register. Constant indices stay as
    /// attributes; runtime indices are the second operand.
    Extract { index: Option<i64> },
    /// Value-semantics gate. When all parameters are compile-time constants
    /// they live in `angles` and the operands are qubits only; otherwise the
    /// leading operands are f64 parameter values.
    Gate {
        name: String,
        angles: Option<Vec<f64>>,
    },
    /// Yields (Bool, fresh qubit).
    Measure,
    Reset,
    /// Inclusive slice `reg[start : step : stop]`.
    Slice { start: i64, step: i64, stop: i64 },
    Concat,
    /// Marker region: the runtime synthesizes the controlled form of the
    /// collected body. Operand 0 is the control qubit (a non-consuming use).
    CtrlRegion,
    AdjRegion,
    PowRegion { power: Option<i64> },
    Constant(ConstValue),
    GetGlobal { name: String },
    /// Classical memory cell (scalar or fixed-size array).
    CellAlloc { size: Option<u64> },
    Load,
    Store,
    Arith(ArithKind),
    Cmp { pred: CmpPred, float: bool },
    Cast(CastKind),
    /// Structured conditional; regions = [then, else].
    If,
    /// Structured counted loop over `[lower, upper)`; the body block has one
    /// index argument.
    For {
        lower: Bound,
        upper: Bound,
        step: i64,
    },
    /// Structured while; regions = [cond, body], cond ends in `yield`.
    While,
    Yield,
    Call { callee: String },
    Return,
    Print { pieces: Vec<PrintPiece> },
}

impl OpKind {
    pub fn is_terminator(&self) -> bool {
        matches!(self, OpKind::Return | OpKind::Yield)
    }

    pub fn has_regions(&self) -> bool {
        matches!(
            self,
            OpKind::CtrlRegion
                | OpKind::AdjRegion
                | OpKind::PowRegion { .. }
                | OpKind::If
                | OpKind::For { .. }
                | OpKind::While
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Op {
    pub kind: OpKind,
    pub operands: Vec<ValueId>,
    pub results: Vec<ValueId>,
    pub regions: Vec<BlockId>,
    pub segment: Segment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueDef {
    Op(OpId, u32),
    BlockArg(BlockId, u32),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Value {
    pub ty: SemType,
    pub def: ValueDef,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Block {
    pub args: Vec<ValueId>,
    pub ops: Vec<OpId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionDef {
    pub name: String,
    pub param_types: Vec<SemType>,
    pub result_types: Vec<SemType>,
    /// `None` for extern declarations.
    pub entry: Option<BlockId>,
}

#[derive(Debug, Clone, Default)]
pub struct IrModule {
    pub values: Vec<Value>,
    pub ops: Vec<Op>,
    pub blocks: Vec<Block>,
    pub functions: Vec<FunctionDef>,
    pub globals: Vec<(String, ConstValue)>,
}

impl IrModule {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn value(&self, v: ValueId) -> &Value {
        &self.values[v.0 as usize]
    }

    pub fn value_ty(&self, v: ValueId) -> &SemType {
        &self.values[v.0 as usize].ty
    }

    pub fn op(&self, o: OpId) -> &Op {
        &self.ops[o.0 as usize]
    }

    pub fn op_mut(&mut self, o: OpId) -> &mut Op {
        &mut self.ops[o.0 as usize]
    }

    pub fn block(&self, b: BlockId) -> &Block {
        &self.blocks[b.0 as usize]
    }

    pub fn block_mut(&mut self, b: BlockId) -> &mut Block {
        &mut self.blocks[b.0 as usize]
    }

    pub fn function(&self, name: &str) -> Option<&FunctionDef> {
        self.functions.iter().find(|f| f.name == name)
    }

    pub fn global(&self, name: &str) -> Option<ConstValue> {
        self.globals
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
    }

    pub fn new_block(&mut self, arg_types: Vec<SemType>) -> BlockId {
        let id = BlockId(self.blocks.len() as u32);
        self.blocks.push(Block::default());
        let args = arg_types
            .into_iter()
            .enumerate()
            .map(|(i, ty)| {
                self.new_value(
                    ty,
                    ValueDef::BlockArg(id, i as u32),
                )
            })
            .collect();
        self.blocks[id.0 as usize].args = args;
        id
    }

    pub fn new_value(&mut self, ty: SemType, def: ValueDef) -> ValueId {
        let id = ValueId(self.values.len() as u32);
        self.values.push(Value { ty, def });
        id
    }

    /// Create an op (not yet placed in a block) and its result values.
    pub fn make_op(
        &mut self,
        kind: OpKind,
        operands: Vec<ValueId>,
        result_types: Vec<SemType>,
        segment: Segment,
    ) -> OpId {
        let id = OpId(self.ops.len() as u32);
        self.ops.push(Op {
            kind,
            operands,
            results: Vec::new(),
            regions: Vec::new(),
            segment,
        });
        let results: Vec<ValueId> = result_types
            .into_iter()
            .enumerate()
            .map(|(i, ty)| self.new_value(ty, ValueDef::Op(id, i as u32)))
            .collect();
        self.ops[id.0 as usize].results = results;
        id
    }

    pub fn push_op(&mut self, block: BlockId, op: OpId) {
        self.blocks[block.0 as usize].ops.push(op);
    }

    /// Replace every use of `old` with `new` across the whole module.
    pub fn replace_all_uses(&mut self, old: ValueId, new: ValueId) {
        for op in &mut self.ops {
            for v in &mut op.operands {
                if *v == old {
                    *v = new;
                }
            }
        }
    }

    /// Gate parameter count (leading f64 operands) for a gate op.
    pub fn gate_param_operands(&self, op: &Op) -> usize {
        match &op.kind {
            OpKind::Gate { name, angles } => {
                if angles.is_some() {
                    0
                } else {
                    crate::gates::lookup(name).map_or(0, |g| g.num_params)
                }
            }
            _ => 0,
        }
    }

    /// Qubit-position operands of a gate/measure/reset op.
    pub fn qubit_operands<'a>(&self, op: &'a Op) -> &'a [ValueId] {
        match &op.kind {
            OpKind::Gate { .. } => &op.operands[self.gate_param_operands(op)..],
            OpKind::Measure | OpKind::Reset => &op.operands,
            _ => &[],
        }
    }

    /// Deep-clone `src` block's contents into `dst`, rewriting values through
    /// `map`. Block args of `src` must already be mapped.
    pub fn clone_block_contents(
        &mut self,
        src: BlockId,
        dst: BlockId,
        map: &mut HashMap<ValueId, ValueId>,
    ) {
        let ops = self.block(src).ops.clone();
        for op_id in ops {
            let cloned = self.clone_op(op_id, map);
            self.push_op(dst, cloned);
        }
    }

    /// Clone one op (and nested regions), mapping operands through `map` and
    /// recording its fresh results there.
    pub fn clone_op(&mut self, op_id: OpId, map: &mut HashMap<ValueId, ValueId>) -> OpId {
        let op = self.op(op_id).clone();
        let operands: Vec<ValueId> = op
            .operands
            .iter()
            .map(|v| *map.get(v).unwrap_or(v))
            .collect();
        let result_types: Vec<SemType> = op
            .results
            .iter()
            .map(|r| self.value_ty(*r).clone())
            .collect();
        let new_id = self.make_op(op.kind.clone(), operands, result_types, op.segment);
        for (old, new) in op.results.iter().zip(self.op(new_id).results.clone()) {
            map.insert(*old, new);
        }
        let mut new_regions = Vec::new();
        for region in &op.regions {
            let arg_types: Vec<SemType> = self
                .block(*region)
                .args
                .iter()
                .map(|a| self.value_ty(*a).clone())
                .collect();
            let new_block = self.new_block(arg_types);
            let old_args = self.block(*region).args.clone();
            let new_args = self.block(new_block).args.clone();
            for (o, n) in old_args.iter().zip(new_args.iter()) {
                map.insert(*o, *n);
            }
            self.clone_block_contents(*region, new_block, map);
            new_regions.push(new_block);
        }
        self.op_mut(new_id).regions = new_regions;
        new_id
    }

    /// Count ops in a block including nested regions.
    pub fn count_ops(&self, block: BlockId) -> usize {
        let mut n = 0;
        for &op_id in &self.block(block).ops {
            n += 1;
            for &r in &self.op(op_id).regions {
                n += self.count_ops(r);
            }
        }
        n
    }

    /// Total op count across all function bodies.
    pub fn total_ops(&self) -> usize {
        self.functions
            .iter()
            .filter_map(|f| f.entry)
            .map(|b| self.count_ops(b))
            .sum()
    }
}

impl fmt::Display for IrModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", print::print_ir(self))
    }
}

/// Use-define index rebuilt by each pass: value -> (op, operand slot) uses.
/// Dense (indexed by value id) so rebuilding is cheap.
#[derive(Debug, Default)]
pub struct UseDefIndex {
    users: Vec<Vec<(OpId, usize)>>,
}

impl UseDefIndex {
    /// Index every op reachable from the blocks of `module`'s functions.
    pub fn build(module: &IrModule) -> Self {
        let mut idx = UseDefIndex {
            users: vec![Vec::new(); module.values.len()],
        };
        for f in &module.functions {
            if let Some(entry) = f.entry {
                idx.index_block(module, entry);
            }
        }
        idx
    }

    fn index_block(&mut self, module: &IrModule, block: BlockId) {
        for &op_id in &module.block(block).ops {
            let op = module.op(op_id);
            for (slot, v) in op.operands.iter().enumerate() {
                self.users[v.0 as usize].push((op_id, slot));
            }
            for &r in &op.regions {
                self.index_block(module, r);
            }
        }
    }

    pub fn users(&self, v: ValueId) -> &[(OpId, usize)] {
        self.users.get(v.0 as usize).map_or(&[], |u| u.as_slice())
    }

    /// The single consuming op of `v`, if it has exactly one user.
    pub fn single_user(&self, v: ValueId) -> Option<OpId> {
        match self.users(v) {
            [(op, _)] => Some(*op),
            _ => None,
        }
    }

    pub fn is_unused(&self, v: ValueId) -> bool {
        self.users(v).is_empty()
    }
}
