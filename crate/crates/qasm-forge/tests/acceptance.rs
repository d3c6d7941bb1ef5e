//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! with its runtime. Run with `cargo test --test acceptance -- --nocapture`.

mod common;

use common::{
    circuit_unitary, extract_gates_from_ir, gates_to_source, phase_aligned_distance,
    random_program, rng, unitary_distance_up_to_phase,
};
use num_complex::Complex64;
use qasm_forge::driver::{bench_trotter, compile_source, CompileOptions, OptLevel};
use qasm_forge::ir::print::print_ir;
use qasm_forge::lower::emit_text;
use qasm_forge::passes::{run_named_pass, run_pipeline, PassConfig};
use qasm_forge::runtime::backend::BackendKind;
use qasm_forge::runtime::interp::run_program;
use qasm_forge::runtime::{
    adjoint_records, power_records, synthesize_controlled, ExecutionConfig, GateRecord,
};
use rand::Rng;
use std::time::Instant;

fn criterion(index: u32, desc: &str, budget_s: f64, check: impl FnOnce() -> Result<(), String>) {
    let t0 = Instant::now();
    let result = check();
    let elapsed = t0.elapsed().as_secs_f64();
    match &result {
        Ok(()) => println!("ACCEPTANCE {index:02} PASS ({elapsed:.2}s, budget {budget_s}s) - {desc}"),
        Err(e) => println!("ACCEPTANCE {index:02} FAIL ({elapsed:.2}s) - {desc}: {e}"),
    }
    if let Err(e) = result {
        panic!("criterion {index} failed: {e}");
    }
    assert!(
        elapsed <= budget_s,
        "criterion {index} exceeded budget: {elapsed:.2}s > {budget_s}s"
    );
}

fn optimized(src: &str) -> qasm_forge::ir::IrModule {
    let artifacts = compile_source(src, &CompileOptions::default()).expect("compiles");
    artifacts.opt_ir
}

fn estimator_count(src: &str, ccx_cost: u64) -> Result<u64, String> {
    let artifacts = compile_source(src, &CompileOptions::default()).map_err(|e| format!("{e:?}"))?;
    let report = run_program(
        &artifacts.lir,
        ExecutionConfig {
            backend: BackendKind::Estimator,
            ccx_cost,
            ..Default::default()
        },
    )
    .map_err(|e| e.to_string())?;
    Ok(report.stats.controlled_ops_cx_crz)
}

#[test]
fn acceptance_01_pipeline_reduces_inline_cancel_to_return() {
    criterion(
        1,
        "full pipeline reduces the subroutine-cancel program to a lone return",
        1.0,
        || {
            let m = optimized(qasm_forge::fixtures::INLINE_CANCEL);
            let main = m.function("main").ok_or("no main")?;
            let entry = main.entry.ok_or("no body")?;
            let ops = &m.block(entry).ops;
            if ops.len() != 1 {
                return Err(format!(
                    "main body has {} ops:\n{}",
                    ops.len(),
                    print_ir(&m)
                ));
            }
            match m.op(ops[0]).kind {
                qasm_forge::ir::OpKind::Return => Ok(()),
                ref other => Err(format!("last op is {other:?}")),
            }
        },
    );
}

#[test]
fn acceptance_02_peephole_golden_rules() {
    criterion(2, "peephole rules: h.t.h, identity pairs, rotation merge", 1.0, || {
        // h t h -> rx(pi/4)
        let gates = extract_gates_from_ir(&optimized("qubit q[1]; h q[0]; t q[0]; h q[0];"));
        if gates.len() != 1 || gates[0].name != "rx" {
            return Err(format!("h.t.h gave {gates:?}"));
        }
        if (gates[0].params[0] - std::f64::consts::FRAC_PI_4).abs() > 1e-12 {
            return Err(format!("h.t.h angle {}", gates[0].params[0]));
        }
        // x x, t tdg, cnot cnot remove entirely.
        for src in [
            "qubit q[1]; x q[0]; x q[0];",
            "qubit q[1]; t q[0]; tdg q[0];",
            "qubit q[2]; cnot q[0], q[1]; cnot q[0], q[1];",
        ] {
            let gates = extract_gates_from_ir(&optimized(src));
            if !gates.is_empty() {
                return Err(format!("{src} left {gates:?}"));
            }
        }
        // rx(a) rx(b) -> rx(a+b)
        let gates =
            extract_gates_from_ir(&optimized("qubit q[1]; rx(0.3) q[0]; rx(0.4) q[0];"));
        if gates.len() != 1 || gates[0].name != "rx" || (gates[0].params[0] - 0.7).abs() > 1e-12 {
            return Err(format!("rx merge gave {gates:?}"));
        }
        Ok(())
    });
}

#[test]
fn acceptance_03_pass_soundness_oracle() {
    criterion(
        3,
        "500 random programs: every pass and the pipeline preserve the unitary (1e-9)",
        60.0,
        || {
            let mut r = rng(20260810);
            let passes: &[&str] = &[
                "constant-propagation",
                "identity-pairs",
                "gate-merging",
                "gate-permutation",
                "sequence-simplification",
                "extract-lifting",
                "dce",
            ];
            let config = PassConfig::default();
            for i in 0..500 {
                let n_qubits = r.gen_range(1..=5u32);
                let n_gates = r.gen_range(1..=40usize);
                let gates = random_program(&mut r, n_qubits, n_gates);
                let src = gates_to_source(&gates, n_qubits);
                let reference = circuit_unitary(&gates, n_qubits as usize);
                let built = qasm_forge::frontend(&src).map_err(|e| format!("{e:?}"))?;

                for pass in passes {
                    let mut m = built.clone();
                    run_named_pass(&mut m, "constant-propagation", &config)
                        .map_err(|e| format!("{e:?}"))?;
                    run_named_pass(&mut m, pass, &config).map_err(|e| format!("{e:?}"))?;
                    let got = circuit_unitary(&extract_gates_from_ir(&m), n_qubits as usize);
                    let d = unitary_distance_up_to_phase(&reference, &got);
                    if d > 1e-9 {
                        return Err(format!("program {i}, pass {pass}: distance {d:.2e}\n{src}"));
                    }
                }
                let mut m = built;
                run_pipeline(&mut m, &config).map_err(|e| format!("{e:?}"))?;
                let got = circuit_unitary(&extract_gates_from_ir(&m), n_qubits as usize);
                let d = unitary_distance_up_to_phase(&reference, &got);
                if d > 1e-9 {
                    return Err(format!("program {i}, pipeline: distance {d:.2e}\n{src}"));
                }
            }
            Ok(())
        },
    );
}

fn deuteron_expectation(theta: f64, seed: u64) -> Result<f64, String> {
    let src = qasm_forge::fixtures::deuteron(theta);
    let artifacts = compile_source(&src, &CompileOptions::default()).map_err(|e| format!("{e:?}"))?;
    let report = run_program(
        &artifacts.lir,
        ExecutionConfig {
            seed,
            ..Default::default()
        },
    )
    .map_err(|e| e.to_string())?;
    let line = report
        .output
        .lines()
        .find(|l| l.starts_with("Avg <X0X1> = "))
        .ok_or_else(|| format!("missing output line in {:?}", report.output))?;
    line.trim_start_matches("Avg <X0X1> = ")
        .trim()
        .parse::<f64>()
        .map_err(|e| e.to_string())
}

#[test]
fn acceptance_04_deuteron_expectation_tracks_sine() {
    criterion(
        4,
        "expectation workflow: <X0X1> within 3 sigma of sin(theta), 10-point sweep",
        10.0,
        || {
            let sigma = |theta: f64| ((1.0 - theta.sin().powi(2)) / 1024.0).sqrt();
            let v = deuteron_expectation(0.123, 7)?;
            let want = 0.123f64.sin();
            if (v - want).abs() > 3.0 * sigma(0.123) {
                return Err(format!("theta=0.123: got {v}, want {want} +- {}", 3.0 * sigma(0.123)));
            }
            for i in 0..10 {
                let theta = -1.35 + 0.3 * i as f64;
                let v = deuteron_expectation(theta, 7 + i as u64)?;
                let want = theta.sin();
                let tol = 3.0 * sigma(theta);
                if (v - want).abs() > tol {
                    return Err(format!("theta={theta}: got {v}, want {want} +- {tol}"));
                }
            }
            Ok(())
        },
    );
}

#[test]
fn acceptance_05_trotter_resource_counts() {
    criterion(
        5,
        "estimator totals for the Trotter program: 100*(n + 3(n-1))",
        5.0,
        || {
            for (n, want) in [(5u64, 1_700u64), (10, 3_700), (50, 19_700)] {
                let src = qasm_forge::fixtures::trotter(n as usize);
                let artifacts =
                    compile_source(&src, &CompileOptions::default()).map_err(|e| format!("{e:?}"))?;
                let report = run_program(
                    &artifacts.lir,
                    ExecutionConfig {
                        backend: BackendKind::Estimator,
                        ..Default::default()
                    },
                )
                .map_err(|e| e.to_string())?;
                if report.stats.total_gates != want {
                    return Err(format!(
                        "n={n}: total {} != {want}",
                        report.stats.total_gates
                    ));
                }
            }
            Ok(())
        },
    );
}

#[test]
fn acceptance_06_compute_action_controlled_synthesis() {
    criterion(
        6,
        "controlled synthesis: Jz layer 300(n-1), manual ratio >= 2.5, cost-7 reference",
        30.0,
        || {
            // (a) + (b) across the tested range.
            for n in [6usize, 8, 10, 14, 20, 26, 32, 40, 50] {
                let ca = estimator_count(&qasm_forge::fixtures::heisenberg_ctrl(n, false, true), 5)?
                    - estimator_count(&qasm_forge::fixtures::heisenberg_ctrl(n, false, false), 5)?;
                let want = 300 * (n as u64 - 1);
                if ca != want {
                    return Err(format!("n={n}: compute-action Jz layer {ca} != {want}"));
                }
                let manual =
                    estimator_count(&qasm_forge::fixtures::heisenberg_ctrl(n, true, true), 5)?
                        - estimator_count(
                            &qasm_forge::fixtures::heisenberg_ctrl(n, true, false),
                            5,
                        )?;
                if manual <= ca {
                    return Err(format!("n={n}: manual {manual} not larger than {ca}"));
                }
                let ratio = manual as f64 / ca as f64;
                if ratio < 2.5 {
                    return Err(format!("n={n}: ratio {ratio:.3} < 2.5"));
                }
            }
            // (c) reference comparison with the 7-op Toffoli cost.
            for (n, reference) in [(6usize, 7_700f64), (50, 73_700f64)] {
                let manual7 =
                    estimator_count(&qasm_forge::fixtures::heisenberg_ctrl(n, true, true), 7)?
                        - estimator_count(
                            &qasm_forge::fixtures::heisenberg_ctrl(n, true, false),
                            7,
                        )?;
                let rel = (manual7 as f64 - reference).abs() / reference;
                if rel > 0.05 {
                    return Err(format!(
                        "n={n}: manual at cost 7 = {manual7}, reference {reference} (off {:.1}%)",
                        rel * 100.0
                    ));
                }
            }
            Ok(())
        },
    );
}

#[test]
fn acceptance_07_compile_time_flatness() {
    criterion(
        7,
        "Trotter compile time at -O1: time(n=50) <= 2x time(n=5)",
        30.0,
        || {
            let rows = bench_trotter(&[5, 50], 7).map_err(|e| format!("{e:?}"))?;
            let t5 = rows[0].mean_s;
            let t50 = rows[1].mean_s;
            if t50 > 2.0 * t5 {
                return Err(format!("time(50)={t50:.6}s > 2x time(5)={t5:.6}s"));
            }
            Ok(())
        },
    );
}

#[test]
fn acceptance_08_region_synthesis_properties() {
    criterion(
        8,
        "200 random regions: adjoint inverts, ctrl conditions, pow repeats (1e-9)",
        30.0,
        || {
            use qasm_forge::runtime::backend::StateVec;
            let mut r = rng(880);
            let gate_set: &[&str] = &[
                "x", "y", "z", "h", "s", "sdg", "t", "tdg", "rx", "ry", "rz", "phase", "cnot",
                "cz", "swap", "crz",
            ];
            let random_region = |r: &mut rand::rngs::StdRng, n: u32, len: usize| -> Vec<GateRecord> {
                let mut out = Vec::new();
                for _ in 0..len {
                    let usable = if n >= 2 { gate_set.len() } else { 12 };
                    let name = gate_set[r.gen_range(0..usable)];
                    let info = qasm_forge::gates::lookup(name).unwrap();
                    let mut qubits = Vec::new();
                    while qubits.len() < info.num_qubits {
                        let q = r.gen_range(0..n);
                        if !qubits.contains(&q) {
                            qubits.push(q);
                        }
                    }
                    let params: Vec<f64> = (0..info.num_params)
                        .map(|_| r.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
                        .collect();
                    out.push(GateRecord::new(name, qubits, params));
                }
                out
            };
            let random_state = |r: &mut rand::rngs::StdRng, n: usize| -> Vec<Complex64> {
                let mut amps: Vec<Complex64> = (0..1usize << n)
                    .map(|_| Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
                    .collect();
                let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
                for a in &mut amps {
                    *a /= norm;
                }
                amps
            };
            let apply = |state: &mut StateVec, records: &[GateRecord]| {
                for rec in records {
                    state.apply(rec).unwrap();
                }
            };
            for i in 0..200 {
                let n = r.gen_range(1..=4u32);
                let region = random_region(&mut r, n, r.gen_range(1..=12usize));

                // adj(R) . R = identity.
                let init = random_state(&mut r, n as usize);
                let mut sv = StateVec::new(n as usize);
                sv.amps = init.clone();
                apply(&mut sv, &region);
                apply(&mut sv, &adjoint_records(&region));
                let d = phase_aligned_distance(&init, &sv.amps);
                if d > 1e-9 {
                    return Err(format!("region {i}: adjoint distance {d:.2e}"));
                }

                // pow(k) = k-fold repetition for k in -2..=3.
                for k in -2i64..=3 {
                    let powered = power_records(&region, k);
                    let mut got = StateVec::new(n as usize);
                    got.amps = init.clone();
                    apply(&mut got, &powered);
                    let mut want = StateVec::new(n as usize);
                    want.amps = init.clone();
                    let body = if k >= 0 {
                        region.clone()
                    } else {
                        adjoint_records(&region)
                    };
                    for _ in 0..k.abs() {
                        apply(&mut want, &body);
                    }
                    let d = phase_aligned_distance(&want.amps, &got.amps);
                    if d > 1e-9 {
                        return Err(format!("region {i}: pow({k}) distance {d:.2e}"));
                    }
                }

                // ctrl with control |0> is identity; with |1> equals R.
                let shifted: Vec<GateRecord> = region
                    .iter()
                    .map(|rec| {
                        GateRecord::new(
                            &rec.gate,
                            rec.qubits.iter().map(|q| q + 1).collect(),
                            rec.params.clone(),
                        )
                    })
                    .collect();
                let synth = synthesize_controlled(&shifted, 0).map_err(|e| e.to_string())?;
                let sub = random_state(&mut r, n as usize);
                for control_bit in [0usize, 1] {
                    let mut full = vec![Complex64::new(0.0, 0.0); 1 << (n + 1)];
                    for (idx, a) in sub.iter().enumerate() {
                        full[(idx << 1) | control_bit] = *a;
                    }
                    let mut got = StateVec::new((n + 1) as usize);
                    got.amps = full.clone();
                    apply(&mut got, &synth);
                    let mut want = StateVec::new((n + 1) as usize);
                    want.amps = full;
                    if control_bit == 1 {
                        apply(&mut want, &shifted);
                    }
                    let d = phase_aligned_distance(&want.amps, &got.amps);
                    if d > 1e-9 {
                        return Err(format!(
                            "region {i}: ctrl|{control_bit}> distance {d:.2e}"
                        ));
                    }
                }
            }
            Ok(())
        },
    );
}

#[test]
fn acceptance_09_ghz_lowering_golden() {
    criterion(
        9,
        "GHZ lowers to one h + two cnot calls with allocate/release/finalize order",
        1.0,
        || {
            let artifacts = compile_source(qasm_forge::fixtures::GHZ, &CompileOptions::default())
                .map_err(|e| format!("{e:?}"))?;
            let text = emit_text(&artifacts.lir);
            if text.matches("call @__quantum__qis__h(").count() != 1 {
                return Err("h call count != 1".into());
            }
            if text.matches("call @__quantum__qis__cnot(").count() != 2 {
                return Err("cnot call count != 2".into());
            }
            let alloc = text
                .find("call @__quantum__rt__qubit_allocate_array(")
                .ok_or("no allocate")?;
            let h = text.find("call @__quantum__qis__h(").ok_or("no h")?;
            let release = text
                .find("call @__quantum__rt__qubit_release_array(")
                .ok_or("no release")?;
            let finalize = text
                .find("call @__quantum__rt__finalize(")
                .ok_or("no finalize")?;
            if !(alloc < h && h < release && release < finalize) {
                return Err("allocate/gates/release/finalize out of order".into());
            }
            Ok(())
        },
    );
}

#[test]
fn acceptance_10_determinism() {
    criterion(
        10,
        "identical seeds give byte-identical stats reports and IR dumps",
        5.0,
        || {
            let compile_dump = || -> Result<(String, String, String), String> {
                let artifacts =
                    compile_source(qasm_forge::fixtures::DEUTERON, &CompileOptions::default())
                        .map_err(|e| format!("{e:?}"))?;
                let ir = print_ir(&artifacts.opt_ir);
                let lowered = emit_text(&artifacts.lir);
                let report = run_program(
                    &artifacts.lir,
                    ExecutionConfig {
                        seed: 123,
                        ..Default::default()
                    },
                )
                .map_err(|e| e.to_string())?;
                Ok((ir, lowered, report.stats.to_json() + &report.output))
            };
            let a = compile_dump()?;
            let b = compile_dump()?;
            if a != b {
                return Err("outputs differ between identical runs".into());
            }
            Ok(())
        },
    );
}
