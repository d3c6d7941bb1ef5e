//! Subroutine inlining. Call sites to defined functions are replaced by
//! cloned bodies with operands substituted; extern declarations are left
//! alone. Callees are processed before callers so one sweep flattens the
//! whole call tree.

use super::*;
use std::collections::HashMap;

pub fn inline_calls(module: &mut IrModule) -> Result<bool, Vec<Diagnostic>> {
    let order = inline_order(module)?;
    let mut changed = false;
    for name in order {
        let Some(f) = module.function(&name) else {
            continue;
        };
        let Some(entry) = f.entry else { continue };
        changed |= inline_into_block(module, entry)?;
    }
    Ok(changed)
}

/// Callees-first ordering; rejects recursive call chains.
fn inline_order(module: &IrModule) -> Result<Vec<String>, Vec<Diagnostic>> {
    let mut edges: HashMap<String, Vec<String>> = HashMap::new();
    for f in &module.functions {
        let mut callees = Vec::new();
        if let Some(entry) = f.entry {
            collect_callees(module, entry, &mut callees);
        }
        edges.insert(f.name.clone(), callees);
    }
    let mut order = Vec::new();
    let mut state: HashMap<String, u8> = HashMap::new(); // 1 = visiting, 2 = done
    fn visit(
        name: &str,
        edges: &HashMap<String, Vec<String>>,
        state: &mut HashMap<String, u8>,
        order: &mut Vec<String>,
    ) -> Result<(), Vec<Diagnostic>> {
        match state.get(name) {
            Some(2) => return Ok(()),
            Some(1) => {
                return Err(vec![Diagnostic::error_nowhere(format!(
                    "recursive subroutine calls are not supported (cycle through `{name}`)"
                ))])
            }
            _ => {}
        }
        state.insert(name.into(), 1);
        if let Some(callees) = edges.get(name) {
            for c in callees {
                if edges.contains_key(c) {
                    visit(c, edges, state, order)?;
                }
            }
        }
        state.insert(name.into(), 2);
        order.push(name.into());
        Ok(())
    }
    let names: Vec<String> = module.functions.iter().map(|f| f.name.clone()).collect();
    for name in names {
        visit(&name, &edges, &mut state, &mut order)?;
    }
    Ok(order)
}

fn collect_callees(module: &IrModule, block: BlockId, out: &mut Vec<String>) {
    for &op_id in &module.block(block).ops {
        let op = module.op(op_id);
        if let OpKind::Call { callee } = &op.kind {
            out.push(callee.clone());
        }
        for &r in &op.regions {
            collect_callees(module, r, out);
        }
    }
}

fn inline_into_block(module: &mut IrModule, block: BlockId) -> Result<bool, Vec<Diagnostic>> {
    let mut changed = false;
    // Nested regions first.
    for &op_id in &module.block(block).ops.clone() {
        for &r in &module.op(op_id).regions.clone() {
            changed |= inline_into_block(module, r)?;
        }
    }
    let ops = module.block(block).ops.clone();
    let mut new_ops: Vec<OpId> = Vec::with_capacity(ops.len());
    for op_id in ops {
        let op = module.op(op_id).clone();
        let OpKind::Call { callee } = &op.kind else {
            new_ops.push(op_id);
            continue;
        };
        let Some(f) = module.function(callee) else {
            new_ops.push(op_id);
            continue;
        };
        let Some(callee_entry) = f.entry else {
            // Extern: nothing to inline.
            new_ops.push(op_id);
            continue;
        };
        let mut map: HashMap<ValueId, ValueId> = HashMap::new();
        let callee_args = module.block(callee_entry).args.clone();
        for (param, arg) in callee_args.iter().zip(op.operands.iter()) {
            map.insert(*param, *arg);
        }
        let body_ops = module.block(callee_entry).ops.clone();
        for body_op in body_ops {
            if let OpKind::Return = module.op(body_op).kind {
                let returned: Vec<ValueId> = module
                    .op(body_op)
                    .operands
                    .iter()
                    .map(|v| *map.get(v).unwrap_or(v))
                    .collect();
                for (res, ret) in op.results.iter().zip(returned) {
                    module.replace_all_uses(*res, ret);
                }
                continue;
            }
            let cloned = module.clone_op(body_op, &mut map);
            new_ops.push(cloned);
        }
        changed = true;
    }
    module.block_mut(block).ops = new_ops;
    Ok(changed)
}
