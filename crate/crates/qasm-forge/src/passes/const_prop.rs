//! Constant propagation: global-constant loads become literals, arithmetic
//! over literals folds, constant rotation angles move into gate attributes,
//! and constant loop bounds and extract indices become attributes.

use super::*;
use std::collections::HashMap;

pub fn propagate_constants(module: &mut IrModule) -> bool {
    let mut changed = false;
    for fi in 0..module.functions.len() {
        let Some(entry) = module.functions[fi].entry else {
            continue;
        };
        let mut env: HashMap<ValueId, ConstValue> = HashMap::new();
        changed |= fold_block(module, entry, &mut env);
    }
    changed
}

fn fold_block(
    module: &mut IrModule,
    block: BlockId,
    env: &mut HashMap<ValueId, ConstValue>,
) -> bool {
    let mut changed = false;
    let ops = module.block(block).ops.clone();
    for op_id in ops {
        let op = module.op(op_id).clone();
        match &op.kind {
            OpKind::Constant(c) => {
                env.insert(op.results[0], *c);
            }
            OpKind::GetGlobal { name } => {
                if let Some(c) = module.global(name) {
                    module.op_mut(op_id).kind = OpKind::Constant(c);
                    env.insert(op.results[0], c);
                    changed = true;
                }
            }
            OpKind::Arith(kind) => {
                let vals: Option<Vec<ConstValue>> =
                    op.operands.iter().map(|v| env.get(v).copied()).collect();
                if let Some(vals) = vals {
                    if let Some(folded) = eval_arith(*kind, &vals) {
                        module.op_mut(op_id).kind = OpKind::Constant(folded);
                        module.op_mut(op_id).operands.clear();
                        env.insert(op.results[0], folded);
                        changed = true;
                    }
                }
            }
            OpKind::Cmp { pred, float } => {
                let vals: Option<Vec<ConstValue>> =
                    op.operands.iter().map(|v| env.get(v).copied()).collect();
                if let Some(vals) = vals {
                    if let Some(folded) = eval_cmp(*pred, *float, &vals) {
                        module.op_mut(op_id).kind = OpKind::Constant(folded);
                        module.op_mut(op_id).operands.clear();
                        env.insert(op.results[0], folded);
                        changed = true;
                    }
                }
            }
            OpKind::Cast(kind) => {
                if let Some(c) = env.get(&op.operands[0]).copied() {
                    let result_ty = module.value_ty(op.results[0]).clone();
                    let folded = match (kind, c, &result_ty) {
                        (CastKind::SiToFp, ConstValue::Int(v), _) => {
                            Some(ConstValue::Float(v as f64))
                        }
                        (CastKind::SiToFp, ConstValue::Bool(b), _) => {
                            Some(ConstValue::Float(b as i64 as f64))
                        }
                        (CastKind::IndexCast, ConstValue::Int(v), SemType::Index) => {
                            Some(ConstValue::Index(v))
                        }
                        (CastKind::IndexCast, ConstValue::Index(v), SemType::Int(_)) => {
                            Some(ConstValue::Int(v))
                        }
                        _ => None,
                    };
                    if let Some(folded) = folded {
                        module.op_mut(op_id).kind = OpKind::Constant(folded);
                        module.op_mut(op_id).operands.clear();
                        env.insert(op.results[0], folded);
                        changed = true;
                    }
                }
            }
            OpKind::Gate { name, angles } => {
                if angles.is_none() {
                    let n_params = module.gate_param_operands(&op);
                    let vals: Option<Vec<f64>> = op.operands[..n_params]
                        .iter()
                        .map(|v| env.get(v).and_then(|c| c.as_float()))
                        .collect();
                    if let Some(vals) = vals {
                        if n_params > 0 {
                            let name = name.clone();
                            let m = module.op_mut(op_id);
                            m.kind = OpKind::Gate {
                                name,
                                angles: Some(vals),
                            };
                            m.operands.drain(..n_params);
                            changed = true;
                        }
                    }
                }
            }
            OpKind::Extract { index: None } => {
                if let Some(c) = env.get(&op.operands[1]).copied() {
                    if let Some(i) = c.as_int() {
                        let m = module.op_mut(op_id);
                        m.kind = OpKind::Extract { index: Some(i) };
                        m.operands.truncate(1);
                        changed = true;
                    }
                }
            }
            OpKind::For { lower, upper, step } => {
                let mut new_lower = *lower;
                let mut new_upper = *upper;
                let mut keep = Vec::new();
                let mut slot = 0usize;
                for b in [&mut new_lower, &mut new_upper] {
                    if matches!(b, Bound::Value) {
                        let v = op.operands[slot];
                        slot += 1;
                        match env.get(&v).and_then(|c| c.as_int()) {
                            Some(c) => *b = Bound::Const(c),
                            None => keep.push(v),
                        }
                    }
                }
                if keep.len() != op.operands.len() {
                    let m = module.op_mut(op_id);
                    m.kind = OpKind::For {
                        lower: new_lower,
                        upper: new_upper,
                        step: *step,
                    };
                    m.operands = keep;
                    changed = true;
                }
            }
            OpKind::PowRegion { power: None } => {
                if let Some(c) = env.get(&op.operands[0]).and_then(|c| c.as_int()) {
                    let m = module.op_mut(op_id);
                    m.kind = OpKind::PowRegion { power: Some(c) };
                    m.operands.clear();
                    changed = true;
                }
            }
            _ => {}
        }
        for &r in &module.op(op_id).regions.clone() {
            changed |= fold_block(module, r, env);
        }
    }
    changed
}

fn eval_arith(kind: ArithKind, vals: &[ConstValue]) -> Option<ConstValue> {
    use ArithKind::*;
    match kind {
        NegF => match vals[0] {
            ConstValue::Float(a) => Some(ConstValue::Float(-a)),
            _ => None,
        },
        AddF | SubF | MulF | DivF | RemF => {
            let (ConstValue::Float(a), ConstValue::Float(b)) = (vals[0], vals[1]) else {
                return None;
            };
            let v = match kind {
                AddF => a + b,
                SubF => a - b,
                MulF => a * b,
                DivF => {
                    if b == 0.0 {
                        return None;
                    }
                    a / b
                }
                RemF => {
                    if b == 0.0 {
                        return None;
                    }
                    a % b
                }
                _ => unreachable!(),
            };
            Some(ConstValue::Float(v))
        }
        AddI | SubI | MulI | DivI | RemI | AndI | OrI | XorI => {
            let rewrap = |v: i64| match vals[0] {
                ConstValue::Index(_) => ConstValue::Index(v),
                ConstValue::Bool(_) => ConstValue::Bool(v != 0),
                _ => ConstValue::Int(v),
            };
            let a = vals[0].as_int()?;
            let b = vals[1].as_int()?;
            let v = match kind {
                AddI => a.checked_add(b)?,
                SubI => a.checked_sub(b)?,
                MulI => a.checked_mul(b)?,
                DivI => {
                    if b == 0 {
                        return None;
                    }
                    a.checked_div(b)?
                }
                RemI => {
                    if b == 0 {
                        return None;
                    }
                    a.checked_rem(b)?
                }
                AndI => ((a != 0) && (b != 0)) as i64,
                OrI => ((a != 0) || (b != 0)) as i64,
                XorI => ((a != 0) ^ (b != 0)) as i64,
                _ => unreachable!(),
            };
            Some(rewrap(v))
        }
    }
}

fn eval_cmp(pred: CmpPred, float: bool, vals: &[ConstValue]) -> Option<ConstValue> {
    let b = if float {
        let (ConstValue::Float(a), ConstValue::Float(b)) = (vals[0], vals[1]) else {
            return None;
        };
        match pred {
            CmpPred::Eq => a == b,
            CmpPred::Ne => a != b,
            CmpPred::Lt => a < b,
            CmpPred::Le => a <= b,
            CmpPred::Gt => a > b,
            CmpPred::Ge => a >= b,
        }
    } else {
        let a = vals[0].as_int()?;
        let b = vals[1].as_int()?;
        match pred {
            CmpPred::Eq => a == b,
            CmpPred::Ne => a != b,
            CmpPred::Lt => a < b,
            CmpPred::Le => a <= b,
            CmpPred::Gt => a > b,
            CmpPred::Ge => a >= b,
        }
    };
    Some(ConstValue::Bool(b))
}
