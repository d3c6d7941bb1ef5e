//! Lowering to the call-based CFG: golden shapes, handle-root collapsing,
//! region marker pairing, and statevector equivalence of the lowered module
//! against a direct interpretation of the structured IR.

mod common;

use common::{gates_to_source, phase_aligned_distance, random_program, rng, OracleSim};
use qasm_forge::driver::{compile_source, CompileOptions, OptLevel};
use qasm_forge::lower::{check_region_pairing, emit_text, lower_to_cfg};
use qasm_forge::runtime::interp::run_program_with;
use qasm_forge::runtime::{ExecutionConfig, ExecutionContext};

fn lowered_text(src: &str, opt: OptLevel) -> String {
    let artifacts = compile_source(
        src,
        &CompileOptions {
            opt,
            pass_list: None,
        },
    )
    .unwrap_or_else(|e| panic!("compile failed: {e:?}"));
    emit_text(&artifacts.lir)
}

#[test]
fn ghz_lowering_matches_expected_call_shape() {
    let text = lowered_text(qasm_forge::fixtures::GHZ, OptLevel::O1);
    assert_eq!(text.matches("call @__quantum__qis__h(").count(), 1);
    assert_eq!(text.matches("call @__quantum__qis__cnot(").count(), 2);
    // allocate ... gates ... release, finalize order.
    let alloc = text.find("call @__quantum__rt__qubit_allocate_array(").unwrap();
    let h = text.find("call @__quantum__qis__h").unwrap();
    let release = text.find("call @__quantum__rt__qubit_release_array").unwrap();
    let finalize = text.find("call @__quantum__rt__finalize").unwrap();
    assert!(alloc < h && h < release && release < finalize);
}

#[test]
fn chains_collapse_to_root_handles() {
    // Three sequential gates on q[0] call through one handle.
    let text = lowered_text("qubit q[1]; h q[0]; t q[0]; x q[0];", OptLevel::O0);
    let handle = text
        .lines()
        .find(|l| l.contains("= call @__quantum__rt__array_get_element_ptr_1d"))
        .and_then(|l| l.split(" = ").next())
        .unwrap()
        .trim()
        .to_string();
    for gate in ["h", "t", "x"] {
        let line = text
            .lines()
            .find(|l| l.contains(&format!("__quantum__qis__{gate}(")))
            .unwrap();
        assert!(
            line.contains(&format!("({handle})")),
            "gate {gate} does not use root {handle}: {line}"
        );
    }
    assert_eq!(
        text.matches("call @__quantum__rt__array_get_element_ptr_1d").count(),
        1
    );
}

#[test]
fn conditional_lowers_to_cond_br_diamond() {
    let text = lowered_text(
        "qubit q[1]; bit b; b = measure q[0]; if (b) { x q[0]; }",
        OptLevel::O0,
    );
    assert!(text.contains("cond_br"));
    assert!(text.contains("^bb1:"));
    assert!(text.contains("__quantum__qis__mz"));
}

#[test]
fn loop_lowers_to_header_body_exit_with_induction_cell() {
    let text = lowered_text("qubit q[1]; int n = 3; for i in [0:n] { x q[0]; }", OptLevel::O0);
    // Header: load, compare, conditional branch; latch: add + store.
    assert!(text.contains("cmpi slt"));
    assert!(text.contains("cond_br"));
    assert!(text.contains("addi"));
    let plain_branches = text
        .lines()
        .filter(|l| l.trim_start().starts_with("br ^bb"))
        .count();
    assert!(plain_branches >= 2, "expected loop CFG, got:\n{text}");
}

#[test]
fn measured_loop_body_has_two_mz_calls() {
    // At -O0 the loop structure survives, so the body's two measurements
    // appear exactly twice in the text.
    let text = lowered_text(qasm_forge::fixtures::DEUTERON, OptLevel::O0);
    assert_eq!(text.matches("call @__quantum__qis__mz").count(), 2);
    assert!(text.contains("cond_br"));
}

#[test]
fn adj_region_lowering_brackets_body() {
    let text = lowered_text("qubit q[1]; inv @ phase(pi) q[0];", OptLevel::O0);
    let start = text.find("call @__quantum__rt__start_adj_u_region").unwrap();
    let phase = text.find("call @__quantum__qis__phase").unwrap();
    let end = text.find("call @__quantum__rt__end_adj_u_region").unwrap();
    assert!(start < phase && phase < end);
}

#[test]
fn region_markers_pair_on_every_path() {
    for src in [
        "qubit q[2]; ctrl @ x q[0], q[1];",
        "qubit q[2]; inv @ pow(2) @ s q[1];",
        qasm_forge::fixtures::HEISENBERG_CTRL_6,
    ] {
        for opt in [OptLevel::O0, OptLevel::O1] {
            let artifacts = compile_source(
                src,
                &CompileOptions {
                    opt,
                    pass_list: None,
                },
            )
            .unwrap();
            check_region_pairing(&artifacts.lir).unwrap();
        }
    }
}

#[test]
fn empty_main_has_finalize_and_ret() {
    let text = lowered_text("", OptLevel::O1);
    assert!(text.contains("call @__quantum__rt__finalize()"));
    assert!(text.trim_end().ends_with("ret\n}"));
}

#[test]
fn broadcast_expands_per_element_at_lowering() {
    let text = lowered_text("qubit q[3]; h q;", OptLevel::O0);
    assert_eq!(text.matches("call @__quantum__qis__h(").count(), 3);
}

#[test]
fn emit_text_is_deterministic() {
    let a = lowered_text(qasm_forge::fixtures::DEUTERON, OptLevel::O1);
    let b = lowered_text(qasm_forge::fixtures::DEUTERON, OptLevel::O1);
    assert_eq!(a, b);
}

#[test]
fn lowered_module_matches_direct_ir_interpretation() {
    // Random straight-line programs: interpret the lowered module on the
    // statevector backend and compare against the oracle's direct gate
    // application, up to global phase.
    let mut r = rng(77);
    for _ in 0..50 {
        let n_qubits = r.gen_range(2..=5u32);
        let gates = random_program(&mut r, n_qubits, 30);
        let src = gates_to_source(&gates, n_qubits);
        for opt in [OptLevel::O0, OptLevel::O1] {
            let artifacts = compile_source(
                &src,
                &CompileOptions {
                    opt,
                    pass_list: None,
                },
            )
            .unwrap();
            let mut ctx = ExecutionContext::new(ExecutionConfig::default());
            run_program_with(&artifacts.lir, &mut ctx).unwrap();
            let got = ctx.backend().statevector().unwrap();

            let mut oracle = OracleSim::new(n_qubits as usize);
            for g in &gates {
                oracle.apply(g);
            }
            let d = phase_aligned_distance(&oracle.amps, got);
            assert!(
                d < 1e-9,
                "lowered execution diverged (distance {d:.2e}, {opt:?}) on:\n{src}"
            );
        }
    }
}

use rand::Rng;
