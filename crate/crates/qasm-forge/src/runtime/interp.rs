//! In-process interpreter for the lowered module: walks the CFG and
//! dispatches `__quantum__*` calls into the execution context.

use super::backend::BackendStats;
use super::{ExecutionConfig, ExecutionContext, RegionKind, RegionOperand, RuntimeError};
use crate::ir::{ArithKind, CmpPred, Segment};
use crate::lower::{symbols, LirArg, LirConst, LirFunction, LirInst, LirModule, LirValue};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Slot {
    Uninit,
    I(i64),
    F(f64),
    B(bool),
    Qubit(u32),
    Array(u32),
    Cell(u32),
}

impl Slot {
    fn as_i64(&self) -> Result<i64, RuntimeError> {
        match self {
            Slot::I(v) => Ok(*v),
            Slot::B(b) => Ok(*b as i64),
            Slot::Uninit => Err(RuntimeError::UninitializedRead),
            _ => Err(RuntimeError::MalformedProgram("expected integer".into())),
        }
    }

    fn as_f64(&self) -> Result<f64, RuntimeError> {
        match self {
            Slot::F(v) => Ok(*v),
            Slot::Uninit => Err(RuntimeError::UninitializedRead),
            _ => Err(RuntimeError::MalformedProgram("expected float".into())),
        }
    }

    fn as_bool(&self) -> Result<bool, RuntimeError> {
        match self {
            Slot::B(v) => Ok(*v),
            Slot::Uninit => Err(RuntimeError::UninitializedRead),
            _ => Err(RuntimeError::MalformedProgram("expected bool".into())),
        }
    }

    fn render(&self) -> String {
        match self {
            Slot::I(v) => format!("{v}"),
            Slot::F(v) => format!("{v}"),
            Slot::B(v) => format!("{}", *v as u8),
            Slot::Uninit => "<uninit>".into(),
            Slot::Qubit(q) => format!("<qubit {q}>"),
            Slot::Array(a) => format!("<array {a}>"),
            Slot::Cell(c) => format!("<cell {c}>"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub stats: BackendStats,
    pub output: String,
}

/// Execute the lowered module's `main` once per configured shot.
pub fn run_program(lir: &LirModule, config: ExecutionConfig) -> Result<RunReport, RuntimeError> {
    let mut ctx = ExecutionContext::new(config.clone());
    run_program_with(lir, &mut ctx)?;
    Ok(RunReport {
        stats: ctx.stats(),
        output: ctx.take_output(),
    })
}

pub fn run_program_with(
    lir: &LirModule,
    ctx: &mut ExecutionContext,
) -> Result<(), RuntimeError> {
    let main = lir
        .function("main")
        .ok_or_else(|| RuntimeError::MalformedProgram("no main function".into()))?;
    for shot in 0..ctx.config.shots.max(1) {
        if shot > 0 {
            ctx.reset_for_next_shot();
        }
        let mut interp = Interp {
            lir,
            ctx,
            cells: Vec::new(),
            depth: 0,
        };
        interp.run_function(main, vec![])?;
    }
    Ok(())
}

struct Interp<'l, 'c> {
    lir: &'l LirModule,
    ctx: &'c mut ExecutionContext,
    cells: Vec<Vec<Slot>>,
    depth: usize,
}

impl<'l, 'c> Interp<'l, 'c> {
    fn run_function(
        &mut self,
        f: &LirFunction,
        args: Vec<Slot>,
    ) -> Result<Option<Slot>, RuntimeError> {
        self.depth += 1;
        if self.depth > 256 {
            return Err(RuntimeError::MalformedProgram(
                "call depth limit exceeded (recursion?)".into(),
            ));
        }
        let mut slots = vec![Slot::Uninit; f.n_values as usize];
        for (p, a) in f.params.iter().zip(args) {
            slots[p.0 as usize] = a;
        }
        let mut block = 0usize;
        let result = 'run: loop {
            let insts = &f.blocks[block];
            let mut next_block = None;
            for inst in insts {
                match inst {
                    LirInst::Const { dst, value } => {
                        slots[dst.0 as usize] = match value {
                            LirConst::Int(v) => Slot::I(*v),
                            LirConst::Float(v) => Slot::F(*v),
                            LirConst::Bool(v) => Slot::B(*v),
                        };
                    }
                    LirInst::Call {
                        symbol,
                        args,
                        dst,
                        segment,
                    } => {
                        let out = self.call(symbol, args, &slots, *segment)?;
                        if let Some(dst) = dst {
                            slots[dst.0 as usize] =
                                out.ok_or_else(|| RuntimeError::MalformedProgram(
                                    format!("call to `{symbol}` produced no value"),
                                ))?;
                        }
                    }
                    LirInst::Arith { kind, dst, args } => {
                        let out = self.arith(*kind, args, &slots)?;
                        slots[dst.0 as usize] = out;
                    }
                    LirInst::SiToFp { dst, src } => {
                        let v = slots[src.0 as usize].as_i64()?;
                        slots[dst.0 as usize] = Slot::F(v as f64);
                    }
                    LirInst::Cmp {
                        pred,
                        float,
                        dst,
                        lhs,
                        rhs,
                    } => {
                        let out = if *float {
                            let (a, b) = (
                                slots[lhs.0 as usize].as_f64()?,
                                slots[rhs.0 as usize].as_f64()?,
                            );
                            eval_pred_f(*pred, a, b)
                        } else {
                            let (a, b) = (
                                slots[lhs.0 as usize].as_i64()?,
                                slots[rhs.0 as usize].as_i64()?,
                            );
                            eval_pred_i(*pred, a, b)
                        };
                        slots[dst.0 as usize] = Slot::B(out);
                    }
                    LirInst::CellAlloc { dst, size } => {
                        let n = size.unwrap_or(1) as usize;
                        self.cells.push(vec![Slot::Uninit; n]);
                        slots[dst.0 as usize] = Slot::Cell(self.cells.len() as u32 - 1);
                    }
                    LirInst::Load { dst, cell, index } => {
                        let cell_id = match slots[cell.0 as usize] {
                            Slot::Cell(c) => c as usize,
                            _ => {
                                return Err(RuntimeError::MalformedProgram(
                                    "load from non-cell".into(),
                                ))
                            }
                        };
                        let idx = match index {
                            Some(i) => slots[i.0 as usize].as_i64()? as usize,
                            None => 0,
                        };
                        let data = self.cells.get(cell_id).ok_or_else(|| {
                            RuntimeError::DeadHandle(format!("cell #{cell_id}"))
                        })?;
                        let v = *data.get(idx).ok_or(RuntimeError::IndexOutOfRange {
                            index: idx as i64,
                            size: data.len(),
                        })?;
                        if matches!(v, Slot::Uninit) {
                            return Err(RuntimeError::UninitializedRead);
                        }
                        slots[dst.0 as usize] = v;
                    }
                    LirInst::Store { value, cell, index } => {
                        let cell_id = match slots[cell.0 as usize] {
                            Slot::Cell(c) => c as usize,
                            _ => {
                                return Err(RuntimeError::MalformedProgram(
                                    "store to non-cell".into(),
                                ))
                            }
                        };
                        let idx = match index {
                            Some(i) => slots[i.0 as usize].as_i64()? as usize,
                            None => 0,
                        };
                        let v = slots[value.0 as usize];
                        let data = self.cells.get_mut(cell_id).ok_or_else(|| {
                            RuntimeError::DeadHandle(format!("cell #{cell_id}"))
                        })?;
                        let len = data.len();
                        *data.get_mut(idx).ok_or(RuntimeError::IndexOutOfRange {
                            index: idx as i64,
                            size: len,
                        })? = v;
                    }
                    LirInst::Br { target } => {
                        next_block = Some(*target);
                        break;
                    }
                    LirInst::CondBr {
                        cond,
                        then_bb,
                        else_bb,
                    } => {
                        let c = slots[cond.0 as usize].as_bool()?;
                        next_block = Some(if c { *then_bb } else { *else_bb });
                        break;
                    }
                    LirInst::Ret { value } => {
                        let out = value.map(|v| slots[v.0 as usize]);
                        break 'run out;
                    }
                }
            }
            match next_block {
                Some(b) => block = b,
                None => break 'run None,
            }
        };
        self.depth -= 1;
        Ok(result)
    }

    fn arith(
        &mut self,
        kind: ArithKind,
        args: &[LirValue],
        slots: &[Slot],
    ) -> Result<Slot, RuntimeError> {
        use ArithKind::*;
        if kind.is_float() && !kind.is_unary() {
            let a = slots[args[0].0 as usize].as_f64()?;
            let b = slots[args[1].0 as usize].as_f64()?;
            let v = match kind {
                AddF => a + b,
                SubF => a - b,
                MulF => a * b,
                DivF => a / b,
                RemF => a % b,
                _ => unreachable!(),
            };
            return Ok(Slot::F(v));
        }
        match kind {
            NegF => Ok(Slot::F(-slots[args[0].0 as usize].as_f64()?)),
            AndI | OrI | XorI => {
                let a = slots[args[0].0 as usize].as_i64()? != 0;
                let b = slots[args[1].0 as usize].as_i64()? != 0;
                let v = match kind {
                    AndI => a && b,
                    OrI => a || b,
                    XorI => a ^ b,
                    _ => unreachable!(),
                };
                // Preserve boolean-ness when both inputs were bools.
                if matches!(slots[args[0].0 as usize], Slot::B(_)) {
                    Ok(Slot::B(v))
                } else {
                    Ok(Slot::I(v as i64))
                }
            }
            AddI | SubI | MulI | DivI | RemI => {
                let a = slots[args[0].0 as usize].as_i64()?;
                let b = slots[args[1].0 as usize].as_i64()?;
                let v = match kind {
                    AddI => a.wrapping_add(b),
                    SubI => a.wrapping_sub(b),
                    MulI => a.wrapping_mul(b),
                    DivI => {
                        if b == 0 {
                            return Err(RuntimeError::MalformedProgram(
                                "integer division by zero".into(),
                            ));
                        }
                        a.wrapping_div(b)
                    }
                    RemI => {
                        if b == 0 {
                            return Err(RuntimeError::MalformedProgram(
                                "integer remainder by zero".into(),
                            ));
                        }
                        a.wrapping_rem(b)
                    }
                    _ => unreachable!(),
                };
                Ok(Slot::I(v))
            }
            _ => unreachable!("float binary handled above"),
        }
    }

    fn call(
        &mut self,
        symbol: &str,
        args: &[LirArg],
        slots: &[Slot],
        segment: Segment,
    ) -> Result<Option<Slot>, RuntimeError> {
        let value = |a: &LirArg| -> Result<Slot, RuntimeError> {
            match a {
                LirArg::Value(v) => Ok(slots[v.0 as usize]),
                LirArg::Str(_) => Err(RuntimeError::MalformedProgram(
                    "string argument outside print".into(),
                )),
            }
        };
        match symbol {
            symbols::ALLOCATE => {
                let n = value(&args[0])?.as_i64()?;
                let arr = self.ctx.allocate_array(n as usize)?;
                Ok(Some(Slot::Array(arr)))
            }
            symbols::GET_ELEMENT => {
                let arr = match value(&args[0])? {
                    Slot::Array(a) => a,
                    _ => return Err(RuntimeError::MalformedProgram("expected array".into())),
                };
                let i = value(&args[1])?.as_i64()?;
                Ok(Some(Slot::Qubit(self.ctx.get_element(arr, i)?)))
            }
            symbols::RELEASE => {
                let arr = match value(&args[0])? {
                    Slot::Array(a) => a,
                    _ => return Err(RuntimeError::MalformedProgram("expected array".into())),
                };
                self.ctx.release_array(arr)?;
                Ok(None)
            }
            symbols::FINALIZE => Ok(None),
            symbols::SLICE => {
                let arr = match value(&args[0])? {
                    Slot::Array(a) => a,
                    _ => return Err(RuntimeError::MalformedProgram("expected array".into())),
                };
                let start = value(&args[1])?.as_i64()?;
                let step = value(&args[2])?.as_i64()?;
                let stop = value(&args[3])?.as_i64()?;
                Ok(Some(Slot::Array(
                    self.ctx.array_slice(arr, start, step, stop)?,
                )))
            }
            symbols::CONCAT => {
                let (a, b) = match (value(&args[0])?, value(&args[1])?) {
                    (Slot::Array(a), Slot::Array(b)) => (a, b),
                    _ => return Err(RuntimeError::MalformedProgram("expected arrays".into())),
                };
                Ok(Some(Slot::Array(self.ctx.array_concatenate(a, b)?)))
            }
            symbols::START_CTRL => {
                self.ctx.start_region(RegionKind::Ctrl);
                Ok(None)
            }
            symbols::START_ADJ => {
                self.ctx.start_region(RegionKind::Adj);
                Ok(None)
            }
            symbols::START_POW => {
                self.ctx.start_region(RegionKind::Pow);
                Ok(None)
            }
            symbols::END_CTRL => {
                let c = match value(&args[0])? {
                    Slot::Qubit(q) => q,
                    _ => return Err(RuntimeError::MalformedProgram("expected qubit".into())),
                };
                self.ctx.end_region(RegionKind::Ctrl, RegionOperand::Ctrl(c))?;
                Ok(None)
            }
            symbols::END_ADJ => {
                self.ctx.end_region(RegionKind::Adj, RegionOperand::None)?;
                Ok(None)
            }
            symbols::END_POW => {
                let k = value(&args[0])?.as_i64()?;
                self.ctx.end_region(RegionKind::Pow, RegionOperand::Power(k))?;
                Ok(None)
            }
            symbols::MEASURE => {
                let q = match value(&args[0])? {
                    Slot::Qubit(q) => q,
                    _ => return Err(RuntimeError::MalformedProgram("expected qubit".into())),
                };
                Ok(Some(Slot::B(self.ctx.measure(q)?)))
            }
            symbols::RESET => {
                let q = match value(&args[0])? {
                    Slot::Qubit(q) => q,
                    _ => return Err(RuntimeError::MalformedProgram("expected qubit".into())),
                };
                self.ctx.reset(q)?;
                Ok(None)
            }
            symbols::PRINT => {
                let mut line = String::new();
                for a in args {
                    match a {
                        LirArg::Str(s) => line.push_str(s),
                        LirArg::Value(v) => line.push_str(&slots[v.0 as usize].render()),
                    }
                }
                self.ctx.print_line(&line);
                Ok(None)
            }
            _ if symbol.starts_with("__quantum__qis__") => {
                let gate = symbol.trim_start_matches("__quantum__qis__");
                let mut params = Vec::new();
                let mut qubits = Vec::new();
                for a in args {
                    match value(a)? {
                        Slot::F(v) => params.push(v),
                        Slot::Qubit(q) => qubits.push(q),
                        other => {
                            return Err(RuntimeError::MalformedProgram(format!(
                                "bad gate argument {other:?}"
                            )))
                        }
                    }
                }
                self.ctx.apply_gate(gate, &params, &qubits, segment)?;
                Ok(None)
            }
            _ => {
                // User subroutine or extern.
                let Some(f) = self.lir.function(symbol) else {
                    return Err(RuntimeError::ExternNotLinked(symbol.into()));
                };
                let arg_slots: Vec<Slot> =
                    args.iter().map(value).collect::<Result<_, _>>()?;
                self.run_function(f, arg_slots)
            }
        }
    }
}

fn eval_pred_i(pred: CmpPred, a: i64, b: i64) -> bool {
    match pred {
        CmpPred::Eq => a == b,
        CmpPred::Ne => a != b,
        CmpPred::Lt => a < b,
        CmpPred::Le => a <= b,
        CmpPred::Gt => a > b,
        CmpPred::Ge => a >= b,
    }
}

fn eval_pred_f(pred: CmpPred, a: f64, b: f64) -> bool {
    match pred {
        CmpPred::Eq => a == b,
        CmpPred::Ne => a != b,
        CmpPred::Lt => a < b,
        CmpPred::Le => a <= b,
        CmpPred::Gt => a > b,
        CmpPred::Ge => a >= b,
    }
}
