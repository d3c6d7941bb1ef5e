//! Quantum peephole rewrites over value-semantics gate chains: identity-pair
//! removal, rotation merging, commuting-gate permutation, constant gate
//! sequence resynthesis, and duplicate-extract lifting.
//!
//! All matching stays within one block, between barrier ops, and never pairs
//! ops with different compute/uncompute flags. Rewrites are correct up to
//! global phase.

use super::*;
use crate::gates::{self, Axis};
use std::collections::{HashMap, HashSet};

/// Fixed rotation angle of a gate for its axis family (`z` = pi, `t` = pi/4,
/// parametric rotations read their attribute). `None` when the angle is not
/// a compile-time constant.
fn const_angle(op: &Op) -> Option<f64> {
    let OpKind::Gate { name, angles } = &op.kind else {
        return None;
    };
    let (_, fixed) = gates::rotation_family(name)?;
    match fixed {
        Some(a) => Some(a),
        None => angles.as_ref().and_then(|a| a.first().copied()),
    }
}

fn gate_name(op: &Op) -> Option<&str> {
    match &op.kind {
        OpKind::Gate { name, .. } => Some(name),
        _ => None,
    }
}

fn gate_angles(op: &Op) -> Option<&[f64]> {
    match &op.kind {
        OpKind::Gate { angles: Some(a), .. } => Some(a),
        _ => None,
    }
}

/// The op consuming `v`, when `v` has exactly one use.
fn single_user(users: &UseDefIndex, v: ValueId) -> Option<OpId> {
    users.single_user(v)
}

// ---- identity pair removal ----

/// Remove gates immediately followed by their adjoints on the same qubit
/// lines, and collapse repeated resets.
pub fn remove_identity_pairs(module: &mut IrModule) -> bool {
    let mut changed = false;
    while remove_identity_pairs_once(module) {
        changed = true;
    }
    changed
}

fn remove_identity_pairs_once(module: &mut IrModule) -> bool {
    let users = UseDefIndex::build(module);
    let positions = Positions::build(module);
    let mut dead: HashSet<OpId> = HashSet::new();

    for block in peephole_blocks(module) {
        let ops = module.block(block).ops.clone();
        for g1_id in ops {
            if dead.contains(&g1_id) {
                continue;
            }
            let g1 = module.op(g1_id);
            match &g1.kind {
                OpKind::Gate { name, angles } => {
                    let Some(g2_id) = all_results_feed_one_op(module, &users, g1) else {
                        continue;
                    };
                    if dead.contains(&g2_id) {
                        continue;
                    }
                    let g2 = module.op(g2_id);
                    let Some(name2) = gate_name(g2) else { continue };
                    if g2.segment != g1.segment || !positions.same_segment(module, g1_id, g2_id) {
                        continue;
                    }
                    // Operand k of g2 must be result k of g1 (same line order).
                    let q1 = module.qubit_operands(g1).len();
                    if module.gate_param_operands(g2) != 0 && gate_angles(g2).is_none() {
                        continue;
                    }
                    let g2_qubits = module.qubit_operands(g2);
                    if g2_qubits.len() != q1 || g2_qubits != g1.results.as_slice() {
                        continue;
                    }
                    let (Some(a1), Some(a2)) = (
                        angles.as_deref(),
                        gate_angles(g2),
                    ) else {
                        continue;
                    };
                    if !gates::is_adjoint_pair(name, a1, name2, a2) {
                        continue;
                    }
                    let inputs: Vec<ValueId> = module.qubit_operands(g1).to_vec();
                    for (res, inp) in module.op(g2_id).results.clone().into_iter().zip(inputs) {
                        module.replace_all_uses(res, inp);
                    }
                    dead.insert(g1_id);
                    dead.insert(g2_id);
                }
                OpKind::Reset => {
                    // reset; reset -> keep the first only.
                    let Some(g2_id) = single_user(&users, g1.results[0]) else {
                        continue;
                    };
                    if dead.contains(&g2_id) {
                        continue;
                    }
                    let g2 = module.op(g2_id);
                    if !matches!(g2.kind, OpKind::Reset)
                        || !positions.same_segment(module, g1_id, g2_id)
                        || g2.segment != g1.segment
                    {
                        continue;
                    }
                    let (old, new) = (g2.results[0], g1.results[0]);
                    module.replace_all_uses(old, new);
                    dead.insert(g2_id);
                }
                _ => {}
            }
        }
    }

    erase_ops(module, &dead);
    !dead.is_empty()
}

/// If every result of `op` is consumed by one single op, return it.
fn all_results_feed_one_op(module: &IrModule, users: &UseDefIndex, op: &Op) -> Option<OpId> {
    let mut target: Option<OpId> = None;
    for r in &op.results {
        if !module.value_ty(*r).is_qubit() && !module.value_ty(*r).is_qubit_array() {
            continue;
        }
        let u = single_user(users, *r)?;
        match target {
            None => target = Some(u),
            Some(t) if t == u => {}
            _ => return None,
        }
    }
    target
}

// ---- rotation merging (gate merging) ----

/// Merge consecutive mergeable gates along a qubit line: same-axis rotations
/// sum their angles (`z`/`s`/`t` fold in as fixed Z rotations), and sums that
/// reach zero cancel the pair. crz/cphase pairs on the same qubit pair merge
/// too. Follows the use-define chain: an op merges only with the single user
/// of its result.
pub fn merge_rotations(module: &mut IrModule) -> bool {
    let mut changed = false;
    while merge_rotations_once(module) {
        changed = true;
    }
    changed
}

fn merge_rotations_once(module: &mut IrModule) -> bool {
    let users = UseDefIndex::build(module);
    let positions = Positions::build(module);
    let mut dead: HashSet<OpId> = HashSet::new();
    let mut changed = false;

    for block in peephole_blocks(module) {
        let ops = module.block(block).ops.clone();
        for g1_id in ops {
            if dead.contains(&g1_id) {
                continue;
            }
            let g1 = module.op(g1_id).clone();
            let Some(name1) = gate_name(&g1).map(str::to_string) else {
                continue;
            };
            let Some(g2_id) = all_results_feed_one_op(module, &users, &g1) else {
                continue;
            };
            if dead.contains(&g2_id) {
                continue;
            }
            let g2 = module.op(g2_id).clone();
            let Some(name2) = gate_name(&g2).map(str::to_string) else {
                continue;
            };
            if g1.segment != g2.segment || !positions.same_segment(module, g1_id, g2_id) {
                continue;
            }
            if module.qubit_operands(&g2) != g1.results.as_slice() {
                continue;
            }

            let merged = plan_merge(module, &g1, &name1, &g2, &name2);
            let Some(plan) = merged else { continue };
            apply_merge(module, g1_id, g2_id, plan, &mut dead);
            changed = true;
        }
    }
    erase_ops(module, &dead);
    changed
}

enum MergePlan {
    /// Pair becomes a single const-angle rotation.
    ConstRotation { name: &'static str, angle: f64 },
    /// Pair cancels entirely.
    Cancel,
    /// Same-name parametric pair with value angles: sum via addf.
    ValueSum { name: String },
}

fn plan_merge(
    module: &IrModule,
    g1: &Op,
    name1: &str,
    g2: &Op,
    name2: &str,
) -> Option<MergePlan> {
    let n_qubits = module.qubit_operands(g1).len();
    if n_qubits == 1 {
        let (axis1, _) = gates::rotation_family(name1)?;
        let (axis2, _) = gates::rotation_family(name2)?;
        if axis1 != axis2 {
            return None;
        }
        match (const_angle(g1), const_angle(g2)) {
            (Some(a), Some(b)) => {
                let sum = normalize_angle(a + b);
                if sum == 0.0 {
                    Some(MergePlan::Cancel)
                } else {
                    Some(MergePlan::ConstRotation {
                        name: gates::rotation_gate_for_axis(axis1),
                        angle: sum,
                    })
                }
            }
            (None, None) if name1 == name2 && matches!(name1, "rx" | "ry" | "rz" | "phase") => {
                Some(MergePlan::ValueSum {
                    name: name1.to_string(),
                })
            }
            _ => None,
        }
    } else if n_qubits == 2 && name1 == name2 && matches!(name1, "crz" | "cphase") {
        match (gate_angles(g1), gate_angles(g2)) {
            (Some(a), Some(b)) => {
                let sum = normalize_angle(a[0] + b[0]);
                if sum == 0.0 {
                    Some(MergePlan::Cancel)
                } else {
                    Some(MergePlan::ConstRotation {
                        name: if name1 == "crz" { "crz" } else { "cphase" },
                        angle: sum,
                    })
                }
            }
            (None, None) => Some(MergePlan::ValueSum {
                name: name1.to_string(),
            }),
            _ => None,
        }
    } else {
        None
    }
}

/// Per Gate Merging: the merged op's inputs are g1's inputs and its outputs
/// replace g2's outputs; both originals join the dead list.
fn apply_merge(
    module: &mut IrModule,
    g1_id: OpId,
    g2_id: OpId,
    plan: MergePlan,
    dead: &mut HashSet<OpId>,
) {
    let g1 = module.op(g1_id).clone();
    let inputs: Vec<ValueId> = module.qubit_operands(&g1).to_vec();
    let g2_results = module.op(g2_id).results.clone();
    let segment = g1.segment;

    match plan {
        MergePlan::Cancel => {
            for (res, inp) in g2_results.into_iter().zip(inputs) {
                module.replace_all_uses(res, inp);
            }
        }
        MergePlan::ConstRotation { name, angle } => {
            let result_types: Vec<SemType> = inputs
                .iter()
                .map(|v| module.value_ty(*v).clone())
                .collect();
            let merged = module.make_op(
                OpKind::Gate {
                    name: name.to_string(),
                    angles: Some(vec![angle]),
                },
                inputs,
                result_types,
                segment,
            );
            insert_before(module, g1_id, vec![merged]);
            for (res, new) in g2_results
                .into_iter()
                .zip(module.op(merged).results.clone())
            {
                module.replace_all_uses(res, new);
            }
        }
        MergePlan::ValueSum { name } => {
            let p1 = g1.operands[0];
            let p2 = module.op(g2_id).operands[0];
            let sum = module.make_op(
                OpKind::Arith(ArithKind::AddF),
                vec![p1, p2],
                vec![SemType::f64()],
                Segment::None,
            );
            let result_types: Vec<SemType> = inputs
                .iter()
                .map(|v| module.value_ty(*v).clone())
                .collect();
            let mut operands = vec![module.op(sum).results[0]];
            operands.extend(&inputs);
            let merged = module.make_op(
                OpKind::Gate { name, angles: None },
                operands,
                result_types,
                segment,
            );
            insert_before(module, g1_id, vec![sum, merged]);
            for (res, new) in g2_results
                .into_iter()
                .zip(module.op(merged).results.clone())
            {
                module.replace_all_uses(res, new);
            }
        }
    }
    dead.insert(g1_id);
    dead.insert(g2_id);
}

/// Insert `new_ops` right before `anchor` within its block.
fn insert_before(module: &mut IrModule, anchor: OpId, new_ops: Vec<OpId>) {
    for b in 0..module.blocks.len() {
        let block = BlockId(b as u32);
        if let Some(pos) = module.block(block).ops.iter().position(|&o| o == anchor) {
            let ops = &mut module.block_mut(block).ops;
            for (i, op) in new_ops.into_iter().enumerate() {
                ops.insert(pos + i, op);
            }
            return;
        }
    }
    panic!("anchor op not found in any block");
}

// ---- gate permutation ----

/// Move a diagonal gate past the cnot whose control line it feeds, when the
/// op after the cnot on that line could merge with it (one-step lookahead).
pub fn permute_commuting_gates(module: &mut IrModule) -> bool {
    let users = UseDefIndex::build(module);
    let positions = Positions::build(module);
    let mut changed = false;

    for block in peephole_blocks(module) {
        let ops = module.block(block).ops.clone();
        for g1_id in ops {
            let g1 = module.op(g1_id).clone();
            let Some(name1) = gate_name(&g1) else { continue };
            if !gates::is_diagonal_1q(name1) || module.qubit_operands(&g1).len() != 1 {
                continue;
            }
            let r1 = g1.results[0];
            if !module.value_ty(r1).is_qubit() {
                continue;
            }
            let Some(cx_id) = single_user(&users, r1) else {
                continue;
            };
            let cx = module.op(cx_id).clone();
            if gate_name(&cx) != Some("cnot") || cx.segment != g1.segment {
                continue;
            }
            // The rotation must sit on the control line (operand 0).
            if cx.operands[0] != r1 {
                continue;
            }
            if !positions.same_segment(module, g1_id, cx_id) {
                continue;
            }
            // Lookahead: the control-line result must feed a Z-family gate
            // that could merge with g1.
            let ctrl_res = cx.results[0];
            let Some(g3_id) = single_user(&users, ctrl_res) else {
                continue;
            };
            let g3 = module.op(g3_id);
            let Some(name3) = gate_name(g3) else { continue };
            if g3.segment != g1.segment
                || !matches!(gates::rotation_family(name3), Some((Axis::Z, _)))
                || !positions.same_segment(module, cx_id, g3_id)
            {
                continue;
            }

            // Swap: cnot reads g1's input; g1 reads cnot's control result;
            // the downstream gate reads g1's result.
            let a = *module.qubit_operands(&g1).first().expect("1q gate");
            let params: Vec<ValueId> =
                g1.operands[..module.gate_param_operands(&g1)].to_vec();
            module.op_mut(cx_id).operands[0] = a;
            module.replace_all_uses(ctrl_res, r1);
            let g1_qubit_slot = params.len();
            module.op_mut(g1_id).operands[g1_qubit_slot] = ctrl_res;
            move_after(module, g1_id, cx_id);
            changed = true;
        }
    }
    changed
}

/// Move `op` to just after `anchor` in the shared block.
fn move_after(module: &mut IrModule, op: OpId, anchor: OpId) {
    for b in 0..module.blocks.len() {
        let block = BlockId(b as u32);
        let ops = &module.block(block).ops;
        let (Some(op_pos), Some(anchor_pos)) = (
            ops.iter().position(|&o| o == op),
            ops.iter().position(|&o| o == anchor),
        ) else {
            continue;
        };
        let ops = &mut module.block_mut(block).ops;
        ops.remove(op_pos);
        let anchor_pos = if op_pos < anchor_pos {
            anchor_pos - 1
        } else {
            anchor_pos
        };
        ops.insert(anchor_pos + 1, op);
        return;
    }
}

// ---- gate sequence simplification ----

/// Resynthesize known constant-gate windows to fewer gates:
/// h-t-h -> rx(pi/4), h-s-h -> rx(pi/2) (and dagger forms), h-z-h -> x,
/// h-x-h -> z, x-rz(t)-x -> rz(-t). Windows match greedily left to right on
/// single-qubit lines.
pub fn simplify_gate_sequences(module: &mut IrModule) -> bool {
    let mut changed = false;
    while simplify_once(module) {
        changed = true;
    }
    changed
}

fn simplify_once(module: &mut IrModule) -> bool {
    use std::f64::consts::PI;
    let users = UseDefIndex::build(module);
    let positions = Positions::build(module);
    let mut dead: HashSet<OpId> = HashSet::new();

    for block in peephole_blocks(module) {
        let ops = module.block(block).ops.clone();
        for g1_id in ops {
            if dead.contains(&g1_id) {
                continue;
            }
            let Some(window) = window3(module, &users, &positions, g1_id, &dead) else {
                continue;
            };
            let [g1_id, g2_id, g3_id] = window;
            let (n1, n2, n3) = (
                gate_name(module.op(g1_id)).unwrap_or("").to_string(),
                gate_name(module.op(g2_id)).unwrap_or("").to_string(),
                gate_name(module.op(g3_id)).unwrap_or("").to_string(),
            );
            let replacement: Option<(&str, Option<f64>)> = match (&*n1, &*n2, &*n3) {
                ("h", "t", "h") => Some(("rx", Some(PI / 4.0))),
                ("h", "tdg", "h") => Some(("rx", Some(-PI / 4.0))),
                ("h", "s", "h") => Some(("rx", Some(PI / 2.0))),
                ("h", "sdg", "h") => Some(("rx", Some(-PI / 2.0))),
                ("h", "z", "h") => Some(("x", None)),
                ("h", "x", "h") => Some(("z", None)),
                ("x", "rz", "x") => {
                    match gate_angles(module.op(g2_id)).and_then(|a| a.first().copied()) {
                        Some(theta) => Some(("rz", Some(normalize_angle(-theta)))),
                        None => None,
                    }
                }
                _ => None,
            };
            let Some((new_name, angle)) = replacement else {
                continue;
            };
            let g1 = module.op(g1_id).clone();
            let input = *module.qubit_operands(&g1).first().expect("1q gate");
            let segment = g1.segment;
            let g3_result = module.op(g3_id).results[0];
            if let Some(theta) = angle.filter(|t| *t == 0.0) {
                let _ = theta;
                module.replace_all_uses(g3_result, input);
            } else {
                let new_op = module.make_op(
                    OpKind::Gate {
                        name: new_name.to_string(),
                        angles: Some(angle.map(|a| vec![a]).unwrap_or_default()),
                    },
                    vec![input],
                    vec![SemType::Qubit],
                    segment,
                );
                insert_before(module, g1_id, vec![new_op]);
                let new_res = module.op(new_op).results[0];
                module.replace_all_uses(g3_result, new_res);
            }
            dead.insert(g1_id);
            dead.insert(g2_id);
            dead.insert(g3_id);
        }
    }
    erase_ops(module, &dead);
    !dead.is_empty()
}

/// A three-gate single-qubit chain starting at `g1`, all in one segment.
fn window3(
    module: &IrModule,
    users: &UseDefIndex,
    positions: &Positions,
    g1_id: OpId,
    dead: &HashSet<OpId>,
) -> Option<[OpId; 3]> {
    let chain_next = |id: OpId| -> Option<OpId> {
        let op = module.op(id);
        if !matches!(op.kind, OpKind::Gate { .. }) || module.qubit_operands(op).len() != 1 {
            return None;
        }
        let r = op.results[0];
        if !module.value_ty(r).is_qubit() {
            return None;
        }
        let next = single_user(users, r)?;
        let next_op = module.op(next);
        if !matches!(next_op.kind, OpKind::Gate { .. })
            || module.qubit_operands(next_op).len() != 1
            || next_op.segment != op.segment
            || !positions.same_segment(module, id, next)
            || dead.contains(&next)
        {
            return None;
        }
        Some(next)
    };
    let g2 = chain_next(g1_id)?;
    let g3 = chain_next(g2)?;
    Some([g1_id, g2, g3])
}

// ---- qubit extract lifting ----

/// Merge duplicate constant-index extracts of the same array value, fusing
/// the SSA chains that loop unrolling and inlining left split. Any op that
/// could touch the array through another route (runtime-index extracts,
/// broadcast gates, calls, nested regions) clears the tracked window.
pub fn lift_qubit_extracts(module: &mut IrModule) -> bool {
    let mut dead: HashSet<OpId> = HashSet::new();

    for block in peephole_blocks(module) {
        // (array value, index) -> live chain tip.
        let mut tips: HashMap<(ValueId, i64), ValueId> = HashMap::new();
        let mut tip_keys: HashMap<ValueId, (ValueId, i64)> = HashMap::new();
        let ops = module.block(block).ops.clone();
        for op_id in ops {
            let op = module.op(op_id).clone();
            match &op.kind {
                OpKind::Extract { index: Some(i) } => {
                    let key = (op.operands[0], *i);
                    match tips.get(&key) {
                        Some(tip) => {
                            let tip = *tip;
                            module.replace_all_uses(op.results[0], tip);
                            dead.insert(op_id);
                        }
                        None => {
                            tips.insert(key, op.results[0]);
                            tip_keys.insert(op.results[0], key);
                        }
                    }
                }
                OpKind::Extract { index: None } => {
                    // Unknown index may alias any tracked element.
                    let arr = op.operands[0];
                    clear_array(&mut tips, &mut tip_keys, arr);
                }
                OpKind::Gate { .. } | OpKind::Measure | OpKind::Reset => {
                    let qubit_operands: Vec<ValueId> = module.qubit_operands(&op).to_vec();
                    for (slot, v) in qubit_operands.iter().enumerate() {
                        if module.value_ty(*v).is_qubit_array() {
                            clear_array(&mut tips, &mut tip_keys, *v);
                        } else if let Some(key) = tip_keys.remove(v) {
                            // Thread the tip through this op. Measure results
                            // put the fresh qubit second.
                            let result = match op.kind {
                                OpKind::Measure => op.results[1],
                                _ => op.results[slot],
                            };
                            tips.insert(key, result);
                            tip_keys.insert(result, key);
                        }
                    }
                }
                _ if is_barrier(&op) || matches!(op.kind, OpKind::Slice { .. } | OpKind::Concat) => {
                    tips.clear();
                    tip_keys.clear();
                }
                _ => {}
            }
        }
    }

    let changed = !dead.is_empty();
    erase_ops(module, &dead);
    changed
}

fn clear_array(
    tips: &mut HashMap<(ValueId, i64), ValueId>,
    tip_keys: &mut HashMap<ValueId, (ValueId, i64)>,
    arr: ValueId,
) {
    let stale: Vec<(ValueId, i64)> = tips.keys().filter(|(a, _)| *a == arr).copied().collect();
    for key in stale {
        if let Some(tip) = tips.remove(&key) {
            tip_keys.remove(&tip);
        }
    }
}
