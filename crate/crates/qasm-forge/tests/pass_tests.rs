//! Per-pass behavior on the documented rewrite cases, plus the pass-level
//! properties: gate-count monotonicity, pipeline idempotence, and clean
//! verification after every rewrite.

mod common;

use common::{
    circuit_unitary, extract_gates_from_ir, gates_to_source, random_program, rng,
    unitary_distance_up_to_phase,
};
use rand::Rng;
use qasm_forge::ir::parse::parse_ir;
use qasm_forge::ir::print::print_ir;
use qasm_forge::ir::IrModule;
use qasm_forge::passes::{run_named_pass, run_pipeline, PassConfig};

fn build(src: &str) -> IrModule {
    qasm_forge::frontend(src).unwrap_or_else(|e| panic!("build failed: {e:?}"))
}

fn run_passes(m: &mut IrModule, names: &[&str]) {
    let config = PassConfig::default();
    for n in names {
        run_named_pass(m, n, &config).unwrap_or_else(|e| panic!("pass {n} failed: {e:?}"));
    }
}

fn optimized(src: &str) -> IrModule {
    let mut m = build(src);
    run_pipeline(&mut m, &PassConfig::default()).unwrap();
    m
}

fn gate_names(m: &IrModule) -> Vec<String> {
    extract_gates_from_ir(m)
        .into_iter()
        .map(|g| g.name)
        .collect()
}

// ---- inlining ----

#[test]
fn inline_replaces_call_with_body() {
    let mut m = build(qasm_forge::fixtures::INLINE_CANCEL);
    run_passes(&mut m, &["inline"]);
    let text = print_ir(&m);
    assert!(!text.contains("call @foo"), "call should be gone:\n{text}");
    // Two cnots now sit in main (callee body + original).
    let main_gates = gate_names(&m);
    assert_eq!(main_gates, vec!["cnot", "cnot"]);
}

#[test]
fn inline_no_calls_unchanged() {
    let mut m = build(qasm_forge::fixtures::GHZ);
    let before = print_ir(&m);
    run_passes(&mut m, &["inline"]);
    assert_eq!(before, print_ir(&m));
}

#[test]
fn inline_skips_externs() {
    let mut m = build("extern f(float[64]) -> float[64];\nfloat[64] y;\ny = f(1.0);");
    run_passes(&mut m, &["inline"]);
    assert!(print_ir(&m).contains("call @f"));
}

#[test]
fn inline_rejects_recursion() {
    let mut m = build("def spin qubit[1]:q { spin q; }\nqubit r[1];\nspin r;");
    let err = run_named_pass(&mut m, "inline", &PassConfig::default()).unwrap_err();
    assert!(err[0].message.contains("recursive"));
}

// ---- unrolling ----

#[test]
fn unroll_clones_body_per_iteration() {
    let mut m = build("qubit q[4]; for i in [0:3] { cnot q[i], q[i+1]; }");
    run_passes(&mut m, &["unroll", "constant-propagation"]);
    let text = print_ir(&m);
    assert!(!text.contains("affine.for"));
    assert_eq!(text.matches("qvs.cnot").count(), 3);
    // Indices 0,1,2 substituted into the extracts.
    run_passes(&mut m, &["extract-lifting"]);
    let gates = extract_gates_from_ir(&m);
    assert_eq!(
        gates.iter().map(|g| g.qubits.clone()).collect::<Vec<_>>(),
        vec![vec![0, 1], vec![1, 2], vec![2, 3]]
    );
}

#[test]
fn unroll_deletes_zero_trip_loop() {
    let mut m = build("qubit q[1]; for i in [3:3] { x q[0]; }");
    run_passes(&mut m, &["unroll"]);
    let text = print_ir(&m);
    assert!(!text.contains("affine.for") && !text.contains("qvs.x"));
}

#[test]
fn unroll_keeps_runtime_bounds() {
    let mut m = build("qubit q[1]; int n = 4; for i in [0:n] { x q[0]; }");
    let before = print_ir(&m);
    run_passes(&mut m, &["unroll"]);
    assert_eq!(before, print_ir(&m));
}

#[test]
fn unroll_preserves_loop_nests() {
    let mut m = build(
        "qubit q[4]; for s in [0:10] { for i in [0:3] { cnot q[i], q[i+1]; } }",
    );
    let before_loops = print_ir(&m).matches("affine.for").count();
    run_passes(&mut m, &["unroll"]);
    assert_eq!(print_ir(&m).matches("affine.for").count(), before_loops);
}

// ---- constant propagation ----

#[test]
fn const_prop_folds_global_loop_bound() {
    // Hand-written IR with a get_global-fed loop bound.
    let text = r#"
module {
  global @shots = 1024 : i64
  func @main() {
    %0 = get_global @shots : i64
    %1 = index_cast %0 : index
    affine.for %arg0 = 0 to %1 step 1 {
      %2 = constant 1 : i64
    }
    return
  }
}
"#;
    let mut m = parse_ir(text).unwrap();
    run_passes(&mut m, &["constant-propagation"]);
    let out = print_ir(&m);
    assert!(out.contains("affine.for %arg0 = 0 to 1024 step 1"), "{out}");
}

#[test]
fn const_prop_moves_angle_into_attribute() {
    let mut m = build("qubit q[1]; rz(2*0.5) q[0];");
    run_passes(&mut m, &["constant-propagation"]);
    let gates = extract_gates_from_ir(&m);
    assert_eq!(gates[0].name, "rz");
    assert_eq!(gates[0].params, vec![1.0]);
    let text = print_ir(&m);
    assert!(text.contains("qvs.rz(1.0)"), "{text}");
}

#[test]
fn const_prop_leaves_runtime_values() {
    let mut m = build("qubit q[1]; float[64] a; a = 0.25; rz(a + 0.5) q[0];");
    run_passes(&mut m, &["constant-propagation"]);
    let text = print_ir(&m);
    // The load-fed addition cannot fold.
    assert!(text.contains("addf"));
}

// ---- identity pair removal ----

#[test]
fn identity_pairs_cancel() {
    for (src, leftover) in [
        ("qubit q[1]; x q[0]; x q[0];", 0usize),
        ("qubit q[1]; t q[0]; tdg q[0];", 0),
        ("qubit q[2]; cnot q[0], q[1]; cnot q[0], q[1];", 0),
        ("qubit q[1]; t q[0]; x q[0];", 2),
    ] {
        let mut m = build(src);
        run_passes(&mut m, &["identity-pairs"]);
        assert_eq!(
            gate_names(&m).len(),
            leftover,
            "wrong residue for {src}"
        );
    }
}

#[test]
fn repeated_resets_simplify_to_one() {
    let mut m = build("qubit q[1]; reset q; reset q;");
    run_passes(&mut m, &["identity-pairs"]);
    assert_eq!(print_ir(&m).matches("q.reset").count(), 1);
}

#[test]
fn crossed_cnot_pair_is_not_removed() {
    // Same qubits but swapped roles: not an identity.
    let mut m = build("qubit q[2]; cnot q[0], q[1]; cnot q[1], q[0];");
    run_passes(&mut m, &["identity-pairs"]);
    assert_eq!(gate_names(&m).len(), 2);
}

// ---- rotation merging ----

#[test]
fn merge_same_axis_rotations() {
    let mut m = build("qubit q[1]; rx(0.3) q[0]; rx(0.4) q[0];");
    run_passes(&mut m, &["constant-propagation", "gate-merging"]);
    let gates = extract_gates_from_ir(&m);
    assert_eq!(gates.len(), 1);
    assert_eq!(gates[0].name, "rx");
    assert!((gates[0].params[0] - 0.7).abs() < 1e-12);
}

#[test]
fn merge_pauli_with_rotation() {
    let mut m = build("qubit q[1]; z q[0]; rz(0.5) q[0];");
    run_passes(&mut m, &["constant-propagation", "gate-merging"]);
    let gates = extract_gates_from_ir(&m);
    assert_eq!(gates.len(), 1);
    assert_eq!(gates[0].name, "rz");
    // theta + pi, wrapped into (-pi, pi].
    let want = 0.5 + std::f64::consts::PI - 2.0 * std::f64::consts::PI;
    assert!((gates[0].params[0] - want).abs() < 1e-12);
}

#[test]
fn merge_skips_different_axes() {
    let mut m = build("qubit q[1]; rx(0.3) q[0]; rz(0.4) q[0];");
    run_passes(&mut m, &["constant-propagation", "gate-merging"]);
    assert_eq!(gate_names(&m).len(), 2);
}

#[test]
fn merge_cancels_exact_inverse_rotations() {
    let mut m = build("qubit q[1]; rz(0.7) q[0]; rz(-0.7) q[0];");
    run_passes(&mut m, &["constant-propagation", "gate-merging"]);
    assert_eq!(gate_names(&m).len(), 0);
}

#[test]
fn merge_follows_alg1_single_user_rule() {
    // The first rz result feeds a cnot control, not the second rz: no merge.
    let mut m = build("qubit q[2]; rz(0.1) q[0]; cnot q[0], q[1]; rz(0.2) q[1];");
    run_passes(&mut m, &["constant-propagation", "gate-merging"]);
    assert_eq!(gate_names(&m).len(), 3);
}

// ---- gate sequence simplification ----

#[test]
fn simplify_hth_family() {
    use std::f64::consts::PI;
    for (src, name, angle) in [
        ("qubit q[1]; h q[0]; t q[0]; h q[0];", "rx", Some(PI / 4.0)),
        ("qubit q[1]; h q[0]; s q[0]; h q[0];", "rx", Some(PI / 2.0)),
        ("qubit q[1]; h q[0]; z q[0]; h q[0];", "x", None),
        ("qubit q[1]; h q[0]; x q[0]; h q[0];", "z", None),
    ] {
        let mut m = build(src);
        run_passes(&mut m, &["sequence-simplification"]);
        let gates = extract_gates_from_ir(&m);
        assert_eq!(gates.len(), 1, "{src}");
        assert_eq!(gates[0].name, name, "{src}");
        if let Some(a) = angle {
            assert!((gates[0].params[0] - a).abs() < 1e-12);
        }
    }
}

#[test]
fn simplify_x_rz_x_negates() {
    let mut m = build("qubit q[1]; rz(0.3) q[0]; x q[0]; rz(0.3) q[0]; x q[0];");
    run_passes(
        &mut m,
        &["constant-propagation", "sequence-simplification", "gate-merging"],
    );
    // x rz(t) x -> rz(-t); rz(t) rz(-t) cancels.
    assert_eq!(gate_names(&m).len(), 0);
}

#[test]
fn simplify_leaves_unmatched_windows() {
    let mut m = build("qubit q[1]; h q[0]; rx(0.1) q[0];");
    run_passes(&mut m, &["constant-propagation", "sequence-simplification"]);
    assert_eq!(gate_names(&m).len(), 2);
}

// ---- extract lifting ----

#[test]
fn lift_merges_duplicate_extracts_after_unroll() {
    let mut m = build("qubit q[2]; for i in [0:2] { t q[1]; }");
    run_passes(&mut m, &["unroll", "constant-propagation"]);
    assert_eq!(print_ir(&m).matches("q.extract").count(), 2);
    run_passes(&mut m, &["extract-lifting"]);
    assert_eq!(print_ir(&m).matches("q.extract").count(), 1);
    // Chain fused: both t gates share one line now.
    run_passes(&mut m, &["gate-merging"]);
    let gates = extract_gates_from_ir(&m);
    assert_eq!(gates.len(), 1);
    assert_eq!(gates[0].name, "rz");
}

#[test]
fn lift_keeps_distinct_indices() {
    let mut m = build("qubit q[2]; x q[0]; x q[1];");
    run_passes(&mut m, &["extract-lifting"]);
    assert_eq!(print_ir(&m).matches("q.extract").count(), 2);
}

#[test]
fn lift_skips_runtime_indices() {
    let mut m = build("qubit q[4]; int j = 1; x q[j]; x q[j];");
    let before = print_ir(&m).matches("q.extract").count();
    run_passes(&mut m, &["extract-lifting"]);
    assert_eq!(print_ir(&m).matches("q.extract").count(), before);
}

// ---- gate permutation ----

#[test]
fn permute_rz_past_cnot_control_enables_merge() {
    let mut m = build("qubit q[2]; rz(0.25) q[0]; cnot q[0], q[1]; rz(0.5) q[0];");
    run_passes(&mut m, &["constant-propagation", "gate-permutation", "gate-merging"]);
    let gates = extract_gates_from_ir(&m);
    assert_eq!(gates.len(), 2);
    assert_eq!(gates[0].name, "cnot");
    assert_eq!(gates[1].name, "rz");
    assert!((gates[1].params[0] - 0.75).abs() < 1e-12);
}

#[test]
fn permute_leaves_rz_on_target() {
    let mut m = build("qubit q[2]; rz(0.25) q[1]; cnot q[0], q[1]; rz(0.5) q[1];");
    let before = print_ir(&m);
    run_passes(&mut m, &["gate-permutation"]);
    assert_eq!(before, print_ir(&m));
}

#[test]
fn permute_requires_downstream_benefit() {
    let mut m = build("qubit q[2]; rz(0.25) q[0]; cnot q[0], q[1]; h q[0];");
    let before = print_ir(&m);
    run_passes(&mut m, &["gate-permutation"]);
    assert_eq!(before, print_ir(&m));
}

// ---- dead code elimination ----

#[test]
fn dce_reduces_cancelled_program_to_return() {
    let mut m = build(qasm_forge::fixtures::INLINE_CANCEL);
    run_passes(&mut m, &["inline", "extract-lifting", "identity-pairs", "dce"]);
    let main = m.function("main").unwrap().entry.unwrap();
    assert_eq!(m.block(main).ops.len(), 1);
    assert!(matches!(
        m.op(m.block(main).ops[0]).kind,
        qasm_forge::ir::OpKind::Return
    ));
}

#[test]
fn dce_keeps_used_values() {
    let mut m = build(qasm_forge::fixtures::GHZ);
    let before_gates = gate_names(&m).len();
    run_passes(&mut m, &["dce"]);
    assert_eq!(gate_names(&m).len(), before_gates);
}

#[test]
fn dce_removes_unused_constant() {
    let text = r#"
module {
  func @main() {
    %0 = constant 42 : i64
    return
  }
}
"#;
    let mut m = parse_ir(text).unwrap();
    run_passes(&mut m, &["dce"]);
    let main = m.function("main").unwrap().entry.unwrap();
    assert_eq!(m.block(main).ops.len(), 1);
}

// ---- pipeline-level properties ----

#[test]
fn pipeline_is_idempotent_at_fixpoint() {
    for src in [
        qasm_forge::fixtures::GHZ,
        qasm_forge::fixtures::INLINE_CANCEL,
        qasm_forge::fixtures::COMPUTE_ACTION_DEMO,
        qasm_forge::fixtures::TROTTER_50,
    ] {
        let mut once = build(src);
        run_pipeline(&mut once, &PassConfig::default()).unwrap();
        let mut twice = once.clone();
        run_pipeline(&mut twice, &PassConfig::default()).unwrap();
        assert_eq!(print_ir(&once), print_ir(&twice), "pipeline not idempotent on {src}");
    }
}

#[test]
fn already_optimal_module_fixpoints_in_one_round() {
    let mut m = optimized(qasm_forge::fixtures::GHZ);
    let report = run_pipeline(&mut m, &PassConfig::default()).unwrap();
    assert_eq!(report.peephole_rounds, 1);
}

#[test]
fn odd_x_chain_leaves_single_gate() {
    // Independent oracle: pairwise cancellation on the gate string.
    let n = 7usize;
    let src = format!("qubit q[1];{}", " x q[0];".repeat(n));
    let m = optimized(&src);
    let expect = n % 2;
    assert_eq!(gate_names(&m).len(), expect);
}

#[test]
fn reduction_passes_never_increase_gate_count() {
    let mut r = rng(11);
    for _ in 0..60 {
        let n_qubits = r.gen_range(2..=5u32);
        let gates = random_program(&mut r, n_qubits, 24);
        let src = gates_to_source(&gates, n_qubits);
        for pass in [
            "identity-pairs",
            "gate-merging",
            "sequence-simplification",
            "dce",
        ] {
            let mut m = build(&src);
            run_passes(&mut m, &["constant-propagation"]);
            let before = gate_count(&m);
            run_passes(&mut m, &[pass]);
            assert!(
                gate_count(&m) <= before,
                "{pass} increased gate count on:\n{src}"
            );
        }
        // Permutation preserves the op count exactly.
        let mut m = build(&src);
        run_passes(&mut m, &["constant-propagation"]);
        let before = m.total_ops();
        run_passes(&mut m, &["gate-permutation"]);
        assert_eq!(m.total_ops(), before, "permutation changed op count");
    }
}

fn gate_count(m: &IrModule) -> usize {
    print_ir(m).matches("qvs.").count()
}

#[test]
fn every_pass_preserves_circuit_unitary() {
    // Smaller companion to the acceptance-criterion soundness oracle.
    let mut r = rng(5);
    let passes: &[&str] = &[
        "constant-propagation",
        "identity-pairs",
        "gate-merging",
        "gate-permutation",
        "sequence-simplification",
        "extract-lifting",
        "dce",
    ];
    for _ in 0..40 {
        let n_qubits = r.gen_range(1..=4u32);
        let gates = random_program(&mut r, n_qubits, 20);
        let src = gates_to_source(&gates, n_qubits);
        let reference = circuit_unitary(&gates, n_qubits as usize);
        for pass in passes {
            let mut m = build(&src);
            run_passes(&mut m, &["constant-propagation", pass]);
            let out_gates = extract_gates_from_ir(&m);
            let got = circuit_unitary(&out_gates, n_qubits as usize);
            let d = unitary_distance_up_to_phase(&reference, &got);
            assert!(
                d < 1e-9,
                "pass {pass} broke unitary (distance {d:.2e}) on:\n{src}"
            );
        }
    }
}

#[test]
fn compute_action_uncompute_is_reversed_dagger_at_gate_level() {
    let m = optimized(qasm_forge::fixtures::COMPUTE_ACTION_DEMO);
    // After unrolling, gather gates with segments from main.
    let entry = m.function("main").unwrap().entry.unwrap();
    let mut compute: Vec<(String, Vec<f64>, Vec<qasm_forge::ir::ValueId>)> = Vec::new();
    let mut uncompute: Vec<(String, Vec<f64>)> = Vec::new();
    for &op in &m.block(entry).ops {
        let o = m.op(op);
        if let qasm_forge::ir::OpKind::Gate { name, angles } = &o.kind {
            match o.segment {
                qasm_forge::ir::Segment::Compute => compute.push((
                    name.clone(),
                    angles.clone().unwrap_or_default(),
                    o.operands.clone(),
                )),
                qasm_forge::ir::Segment::Uncompute => {
                    uncompute.push((name.clone(), angles.clone().unwrap_or_default()))
                }
                qasm_forge::ir::Segment::None => {}
            }
        }
    }
    assert_eq!(compute.len(), uncompute.len());
    for ((cn, cp, _), (un, up)) in compute.iter().rev().zip(uncompute.iter()) {
        let (dn, dp) = qasm_forge::gates::dagger(cn, cp);
        assert_eq!(&dn, un);
        assert_eq!(dp.len(), up.len());
        for (a, b) in dp.iter().zip(up) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
