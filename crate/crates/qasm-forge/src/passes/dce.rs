//! Dead code elimination. Pure ops with unused results go away transitively;
//! a register allocation whose qubits are never gated or measured is removed
//! together with its dealloc; cells that are only ever stored to disappear
//! with their stores; subroutines that are never called are dropped.

use super::*;
use std::collections::HashSet;

pub fn eliminate_dead_code(module: &mut IrModule) -> bool {
    let mut changed = false;
    loop {
        let round = dce_round(module);
        changed |= round;
        if !round {
            break;
        }
    }
    changed |= drop_uncalled_functions(module);
    changed
}

fn dce_round(module: &mut IrModule) -> bool {
    let users = UseDefIndex::build(module);
    let mut dead: HashSet<OpId> = HashSet::new();

    for f in &module.functions {
        let Some(entry) = f.entry else { continue };
        scan_block(module, entry, &users, &mut dead);
    }
    let changed = !dead.is_empty();
    erase_ops(module, &dead);
    changed
}

fn scan_block(module: &IrModule, block: BlockId, users: &UseDefIndex, dead: &mut HashSet<OpId>) {
    for &op_id in &module.block(block).ops {
        let op = module.op(op_id);
        match &op.kind {
            OpKind::Constant(_)
            | OpKind::GetGlobal { .. }
            | OpKind::Cast(_)
            | OpKind::Arith(_)
            | OpKind::Cmp { .. }
            | OpKind::Load
            | OpKind::Extract { .. }
            | OpKind::Slice { .. }
            | OpKind::Concat => {
                if !op.results.is_empty() && op.results.iter().all(|r| users.is_unused(*r)) {
                    dead.insert(op_id);
                }
            }
            OpKind::QAlloc { .. } => {
                // Removable when every user is a dealloc; the deallocs go too.
                let us = users.users(op.results[0]);
                if us
                    .iter()
                    .all(|(u, _)| matches!(module.op(*u).kind, OpKind::QDealloc))
                {
                    dead.insert(op_id);
                    for (u, _) in us {
                        dead.insert(*u);
                    }
                }
            }
            OpKind::CellAlloc { .. } => {
                // A cell that is never loaded is unobservable.
                let us = users.users(op.results[0]);
                let only_stores = us
                    .iter()
                    .all(|(u, slot)| matches!(module.op(*u).kind, OpKind::Store) && *slot == 1);
                if only_stores {
                    dead.insert(op_id);
                    for (u, _) in us {
                        dead.insert(*u);
                    }
                }
            }
            OpKind::If => {
                let empty = op
                    .regions
                    .iter()
                    .all(|r| module.block(*r).ops.is_empty());
                if empty {
                    dead.insert(op_id);
                } else {
                    for &r in &op.regions {
                        scan_block(module, r, users, dead);
                    }
                }
            }
            OpKind::For { .. } => {
                if module.block(op.regions[0]).ops.is_empty() {
                    dead.insert(op_id);
                } else {
                    scan_block(module, op.regions[0], users, dead);
                }
            }
            // A while loop's body may never terminate; keep it, but clean
            // inside the body.
            OpKind::While => {
                scan_block(module, op.regions[1], users, dead);
            }
            OpKind::CtrlRegion | OpKind::AdjRegion | OpKind::PowRegion { .. } => {
                if module.block(op.regions[0]).ops.is_empty() {
                    dead.insert(op_id);
                }
                // Marker bodies are runtime-synthesized; leave their contents.
            }
            _ => {}
        }
    }
}

fn drop_uncalled_functions(module: &mut IrModule) -> bool {
    let mut called: HashSet<String> = HashSet::new();
    for f in &module.functions {
        if let Some(entry) = f.entry {
            collect_calls(module, entry, &mut called);
        }
    }
    let before = module.functions.len();
    module
        .functions
        .retain(|f| f.name == "main" || called.contains(&f.name));
    module.functions.len() != before
}

fn collect_calls(module: &IrModule, block: BlockId, out: &mut HashSet<String>) {
    for &op_id in &module.block(block).ops {
        let op = module.op(op_id);
        if let OpKind::Call { callee } = &op.kind {
            out.insert(callee.clone());
        }
        for &r in &op.regions {
            collect_calls(module, r, out);
        }
    }
}
