//! Loop unrolling for counted loops with constant bounds.
//!
//! Only isolated loops unroll: the body must contain no nested loop and the
//! loop itself must not sit inside another loop. Loop nests are preserved so
//! compilation time stays flat in the register size (the nest structure, not
//! the qubit count, determines the op count).

use super::*;
use std::collections::HashMap;

pub fn unroll_affine_loops(module: &mut IrModule, threshold: u64) -> bool {
    let mut changed = false;
    for fi in 0..module.functions.len() {
        let Some(entry) = module.functions[fi].entry else {
            continue;
        };
        let mut budget = threshold;
        changed |= unroll_in_block(module, entry, false, &mut budget);
    }
    changed
}

fn block_contains_loop(module: &IrModule, block: BlockId) -> bool {
    module.block(block).ops.iter().any(|&op_id| {
        let op = module.op(op_id);
        matches!(op.kind, OpKind::For { .. } | OpKind::While)
            || op.regions.iter().any(|&r| block_contains_loop(module, r))
    })
}

fn unroll_in_block(
    module: &mut IrModule,
    block: BlockId,
    in_loop: bool,
    budget: &mut u64,
) -> bool {
    let mut changed = false;
    let ops = module.block(block).ops.clone();
    let mut new_ops: Vec<OpId> = Vec::with_capacity(ops.len());
    for op_id in ops {
        let op = module.op(op_id).clone();
        match &op.kind {
            OpKind::For { lower, upper, step } if !in_loop => {
                let (Bound::Const(lb), Bound::Const(ub)) = (lower, upper) else {
                    new_ops.push(op_id);
                    continue;
                };
                let body = op.regions[0];
                if block_contains_loop(module, body) {
                    new_ops.push(op_id);
                    continue;
                }
                let trip = if ub > lb {
                    ((ub - lb) + step - 1) / step
                } else {
                    0
                };
                if trip as u64 > *budget {
                    new_ops.push(op_id);
                    continue;
                }
                *budget -= trip as u64;
                changed = true;
                let iv = module.block(body).args[0];
                for k in 0..trip {
                    let value = lb + k * step;
                    let const_op = module.make_op(
                        OpKind::Constant(ConstValue::Index(value)),
                        vec![],
                        vec![SemType::Index],
                        Segment::None,
                    );
                    new_ops.push(const_op);
                    let mut map: HashMap<ValueId, ValueId> = HashMap::new();
                    map.insert(iv, module.op(const_op).results[0]);
                    for &body_op in &module.block(body).ops.clone() {
                        let cloned = module.clone_op(body_op, &mut map);
                        new_ops.push(cloned);
                    }
                }
                // trip == 0: the loop disappears entirely.
            }
            _ => {
                let inner_loop = in_loop
                    || matches!(op.kind, OpKind::For { .. } | OpKind::While);
                for &r in &op.regions {
                    changed |= unroll_in_block(module, r, inner_loop, budget);
                }
                new_ops.push(op_id);
            }
        }
    }
    module.block_mut(block).ops = new_ops;
    changed
}
