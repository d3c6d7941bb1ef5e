//! The optimization pipeline: inlining, loop unrolling, constant
//! propagation, the quantum peephole passes, and dead-code elimination,
//! run as rewrites over the structured IR.
//!
//! Pipeline order: Inliner, LoopUnroll, ConstantPropagation, then the
//! peephole group [IdentityPairRemoval, GateMerging, GatePermutation,
//! SequenceSimplification, ExtractLifting] repeated until a full round makes
//! no change (bounded by `peephole_repeat`), then DCE. The verifier runs
//! after every pass.

mod const_prop;
mod dce;
mod inline;
mod peephole;
mod unroll;

pub use const_prop::propagate_constants;
pub use dce::eliminate_dead_code;
pub use inline::inline_calls;
pub use peephole::{
    lift_qubit_extracts, merge_rotations, permute_commuting_gates, remove_identity_pairs,
    simplify_gate_sequences,
};
pub use unroll::unroll_affine_loops;

use crate::diag::Diagnostic;
use crate::ir::*;

#[derive(Debug, Clone)]
pub struct PassConfig {
    /// Passes enabled by name; `None` = the full default pipeline.
    pub enabled: Option<Vec<String>>,
    /// Upper bound on peephole rounds; each round stops early at fixpoint.
    pub peephole_repeat: usize,
    /// Total constant trip-count budget per function for unrolling.
    pub unroll_threshold: u64,
}

impl Default for PassConfig {
    fn default() -> Self {
        Self {
            enabled: None,
            peephole_repeat: 8,
            unroll_threshold: 1 << 20,
        }
    }
}

#[derive(Debug, Default)]
pub struct PipelineReport {
    /// (pass name, changed anything) in execution order.
    pub passes_run: Vec<(String, bool)>,
    pub peephole_rounds: usize,
}

pub const PEEPHOLE_PASSES: &[&str] = &[
    "identity-pairs",
    "gate-merging",
    "gate-permutation",
    "sequence-simplification",
    "extract-lifting",
];

pub const ALL_PASSES: &[&str] = &[
    "inline",
    "unroll",
    "constant-propagation",
    "identity-pairs",
    "gate-merging",
    "gate-permutation",
    "sequence-simplification",
    "extract-lifting",
    "dce",
];

pub fn run_named_pass(
    module: &mut IrModule,
    name: &str,
    config: &PassConfig,
) -> Result<bool, Vec<Diagnostic>> {
    let changed = match name {
        "inline" => inline_calls(module)?,
        "unroll" => unroll_affine_loops(module, config.unroll_threshold),
        "constant-propagation" => propagate_constants(module),
        "identity-pairs" => remove_identity_pairs(module),
        "gate-merging" => merge_rotations(module),
        "gate-permutation" => permute_commuting_gates(module),
        "sequence-simplification" => simplify_gate_sequences(module),
        "extract-lifting" => lift_qubit_extracts(module),
        "dce" => eliminate_dead_code(module),
        other => {
            return Err(vec![Diagnostic::error_nowhere(format!(
                "unknown pass `{other}`"
            ))])
        }
    };
    // An unchanged module keeps the verdict of the previous verification.
    if changed {
        let diags = verify::verify(module);
        if !diags.is_empty() {
            let mut all = vec![Diagnostic::error_nowhere(format!(
                "internal error: verification failed after pass `{name}`"
            ))];
            all.extend(diags);
            return Err(all);
        }
    }
    Ok(changed)
}

pub fn run_pipeline(
    module: &mut IrModule,
    config: &PassConfig,
) -> Result<PipelineReport, Vec<Diagnostic>> {
    let mut report = PipelineReport::default();
    if let Some(names) = &config.enabled {
        for name in names {
            let changed = run_named_pass(module, name, config)?;
            report.passes_run.push((name.clone(), changed));
        }
        return Ok(report);
    }
    for name in ["inline", "unroll", "constant-propagation"] {
        let changed = run_named_pass(module, name, config)?;
        report.passes_run.push((name.into(), changed));
    }
    for _ in 0..config.peephole_repeat {
        report.peephole_rounds += 1;
        let mut round_changed = false;
        for name in PEEPHOLE_PASSES {
            let changed = run_named_pass(module, name, config)?;
            report.passes_run.push(((*name).into(), changed));
            round_changed |= changed;
        }
        if !round_changed {
            break;
        }
    }
    let changed = run_named_pass(module, "dce", config)?;
    report.passes_run.push(("dce".into(), changed));
    Ok(report)
}

// ---- shared pass helpers ----

/// Blocks eligible for quantum peephole rewriting: function bodies and
/// loop/if/while regions, but never the bodies of ctrl/adj/pow marker
/// regions (those are synthesized at runtime and must stay intact).
pub(crate) fn peephole_blocks(module: &IrModule) -> Vec<BlockId> {
    let mut out = Vec::new();
    for f in &module.functions {
        if let Some(entry) = f.entry {
            collect_blocks(module, entry, &mut out);
        }
    }
    out
}

fn collect_blocks(module: &IrModule, block: BlockId, out: &mut Vec<BlockId>) {
    out.push(block);
    for &op_id in &module.block(block).ops {
        let op = module.op(op_id);
        match op.kind {
            OpKind::If | OpKind::For { .. } | OpKind::While => {
                for &r in &op.regions {
                    collect_blocks(module, r, out);
                }
            }
            // Marker region bodies are skipped.
            _ => {}
        }
    }
}

/// Ops that interrupt peephole windows: anything with nested regions, calls,
/// and deallocations. Rewrites never match across one of these.
pub(crate) fn is_barrier(op: &Op) -> bool {
    op.kind.has_regions() || matches!(op.kind, OpKind::Call { .. } | OpKind::QDealloc)
}

/// Positions of every op within the blocks it belongs to.
pub(crate) struct Positions {
    map: Vec<Option<(BlockId, usize)>>,
}

impl Positions {
    pub(crate) fn build(module: &IrModule) -> Self {
        let mut map = vec![None; module.ops.len()];
        for f in &module.functions {
            if let Some(entry) = f.entry {
                Self::index(module, entry, &mut map);
            }
        }
        Positions { map }
    }

    fn index(module: &IrModule, block: BlockId, map: &mut Vec<Option<(BlockId, usize)>>) {
        for (i, &op_id) in module.block(block).ops.iter().enumerate() {
            map[op_id.0 as usize] = Some((block, i));
            for &r in &module.op(op_id).regions {
                Self::index(module, r, map);
            }
        }
    }

    pub(crate) fn get(&self, op: OpId) -> Option<(BlockId, usize)> {
        self.map.get(op.0 as usize).copied().flatten()
    }

    /// True when `a` and `b` sit in the same block with no barrier between.
    pub(crate) fn same_segment(&self, module: &IrModule, a: OpId, b: OpId) -> bool {
        let (Some((ba, ia)), Some((bb, ib))) = (self.get(a), self.get(b)) else {
            return false;
        };
        if ba != bb {
            return false;
        }
        let (lo, hi) = if ia < ib { (ia, ib) } else { (ib, ia) };
        let ops = &module.block(ba).ops;
        ops[lo + 1..hi]
            .iter()
            .all(|&o| !is_barrier(module.op(o)))
    }
}

/// Remove ops (by id) from every block's op list.
pub(crate) fn erase_ops(module: &mut IrModule, dead: &std::collections::HashSet<OpId>) {
    if dead.is_empty() {
        return;
    }
    for b in 0..module.blocks.len() {
        let block = BlockId(b as u32);
        let ops = module.block(block).ops.clone();
        if ops.iter().any(|o| dead.contains(o)) {
            module.block_mut(block).ops = ops.into_iter().filter(|o| !dead.contains(o)).collect();
        }
    }
}

/// Wrap an angle into (-pi, pi]; values within 1e-12 of zero collapse to 0.
pub(crate) fn normalize_angle(theta: f64) -> f64 {
    use std::f64::consts::PI;
    let two_pi = 2.0 * PI;
    let mut t = theta % two_pi;
    if t > PI {
        t -= two_pi;
    } else if t <= -PI {
        t += two_pi;
    }
    if t.abs() < 1e-12 {
        0.0
    } else {
        t
    }
}
