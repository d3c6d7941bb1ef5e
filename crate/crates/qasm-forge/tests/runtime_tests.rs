//! Runtime semantics: gate application against the matrix oracle, exactness
//! of every controlled-form decomposition, region synthesis properties, and
//! statevector invariants.

mod common;

use common::{phase_aligned_distance, OracleSim};
use num_complex::Complex64;
use qasm_forge::ir::Segment;
use qasm_forge::runtime::backend::{BackendKind, StateVec};
use qasm_forge::runtime::{
    adjoint_records, ccx_decomposition, expand_controlled_gate, power_records,
    synthesize_controlled, ExecutionConfig, ExecutionContext, GateRecord, RegionKind,
    RegionOperand,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Region-level gate set for random blocks.
const REGION_GATES: &[&str] = &[
    "x", "y", "z", "h", "s", "sdg", "t", "tdg", "rx", "ry", "rz", "phase", "cnot", "cz", "swap",
    "crz",
];

fn random_records(rng: &mut StdRng, n_qubits: u32, n_gates: usize) -> Vec<GateRecord> {
    let mut out = Vec::new();
    for _ in 0..n_gates {
        let usable = if n_qubits >= 2 {
            REGION_GATES.len()
        } else {
            12 // single-qubit prefix of REGION_GATES
        };
        let name = REGION_GATES[rng.gen_range(0..usable)];
        let info = qasm_forge::gates::lookup(name).unwrap();
        let mut qubits = Vec::new();
        while qubits.len() < info.num_qubits {
            let q = rng.gen_range(0..n_qubits);
            if !qubits.contains(&q) {
                qubits.push(q);
            }
        }
        let params: Vec<f64> = (0..info.num_params)
            .map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
            .collect();
        out.push(GateRecord::new(name, qubits, params));
    }
    out
}

fn apply_records(state: &mut StateVec, records: &[GateRecord]) {
    for r in records {
        state.apply(r).unwrap_or_else(|e| panic!("apply {r:?}: {e}"));
    }
}

fn random_state(rng: &mut StdRng, n: usize) -> Vec<Complex64> {
    let mut amps: Vec<Complex64> = (0..1usize << n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    amps
}

// ---- backend vs oracle ----

#[test]
fn backend_gates_match_oracle_matrices() {
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..200 {
        let n = rng.gen_range(1..=4u32);
        let records = random_records(&mut rng, n, 12);
        let init = random_state(&mut rng, n as usize);
        let mut sv = StateVec::new(n as usize);
        sv.amps = init.clone();
        apply_records(&mut sv, &records);

        let mut oracle = OracleSim::new(n as usize);
        oracle.amps = init;
        for r in &records {
            oracle.apply(&common::GateSpec::new(&r.gate, r.params.clone(), r.qubits.clone()));
        }
        let d = phase_aligned_distance(&oracle.amps, &sv.amps);
        assert!(d < 1e-10, "backend diverged from oracle: {d:.2e}");
    }
}

#[test]
fn cx_is_a_basis_permutation_on_superposition() {
    // cx with control q1 on (|10> + |11>)/sqrt(2): amplitudes swap between
    // index 2 and 3; the norm is unchanged.
    let mut sv = StateVec::new(2);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    sv.amps = vec![
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(r, 0.0),
        Complex64::new(r, 0.0),
    ];
    sv.apply(&GateRecord::new("cnot", vec![1, 0], vec![])).unwrap();
    // Oracle: 4x4 controlled-X matrix application.
    let mut oracle = OracleSim::new(2);
    oracle.amps = vec![
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(r, 0.0),
        Complex64::new(r, 0.0),
    ];
    oracle.apply(&common::GateSpec::new("cnot", vec![], vec![1, 0]));
    assert!(phase_aligned_distance(&oracle.amps, &sv.amps) < 1e-12);
    assert!((sv.norm() - 1.0).abs() < 1e-12);
}

#[test]
fn norm_preserved_by_every_gate() {
    let mut rng = StdRng::seed_from_u64(9);
    for _ in 0..100 {
        let n = rng.gen_range(1..=5u32);
        let records = random_records(&mut rng, n, 20);
        let mut sv = StateVec::new(n as usize);
        sv.amps = random_state(&mut rng, n as usize);
        for r in &records {
            sv.apply(r).unwrap();
            assert!(
                (sv.norm() - 1.0).abs() < 1e-9,
                "norm drifted after {}",
                r.gate
            );
        }
    }
}

#[test]
fn measurement_collapse_renormalizes() {
    let mut ctx = ExecutionContext::new(ExecutionConfig {
        seed: 5,
        ..Default::default()
    });
    let arr = ctx.allocate_array(2).unwrap();
    let q0 = ctx.get_element(arr, 0).unwrap();
    let q1 = ctx.get_element(arr, 1).unwrap();
    ctx.apply_gate("h", &[], &[q0], Segment::None).unwrap();
    ctx.apply_gate("cnot", &[], &[q0, q1], Segment::None).unwrap();
    let a = ctx.measure(q0).unwrap();
    let b = ctx.measure(q1).unwrap();
    assert_eq!(a, b, "GHZ pair must agree");
    let amps = ctx.backend().statevector().unwrap();
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    assert!((norm - 1.0).abs() < 1e-9);
}

// ---- controlled decompositions are exact ----

#[test]
fn controlled_forms_are_exact_unitaries() {
    // For each base gate, compare synthesize_controlled's output against the
    // directly controlled unitary, on random states, exactly (phase checked
    // globally only).
    let mut rng = StdRng::seed_from_u64(21);
    for name in REGION_GATES {
        let info = qasm_forge::gates::lookup(name).unwrap();
        let n = info.num_qubits as u32 + 1;
        for _ in 0..12 {
            let params: Vec<f64> = (0..info.num_params)
                .map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
                .collect();
            let targets: Vec<u32> = (1..=info.num_qubits as u32).collect();
            let record = GateRecord::new(name, targets.clone(), params.clone());
            let synth = synthesize_controlled(std::slice::from_ref(&record), 0).unwrap();

            let init = random_state(&mut rng, n as usize);
            let mut got = StateVec::new(n as usize);
            got.amps = init.clone();
            apply_records(&mut got, &synth);

            // Reference: apply the base gate only on the control=1 subspace.
            let mut expect = init.clone();
            let mut sub = OracleSim::new(n as usize);
            sub.amps = init
                .iter()
                .enumerate()
                .map(|(i, a)| if i & 1 == 1 { *a } else { Complex64::new(0.0, 0.0) })
                .collect();
            sub.apply(&common::GateSpec::new(name, params, targets));
            for (i, e) in expect.iter_mut().enumerate() {
                if i & 1 == 1 {
                    *e = sub.amps[i];
                }
            }
            let d: f64 = expect
                .iter()
                .zip(&got.amps)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(d < 1e-10, "ctrl-{name} inexact: {d:.2e}");
        }
    }
}

#[test]
fn u_gate_controlled_form_is_exact() {
    let mut rng = StdRng::seed_from_u64(33);
    for _ in 0..25 {
        let params: Vec<f64> = (0..3)
            .map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
            .collect();
        let record = GateRecord::new("u", vec![1], params.clone());
        let synth = synthesize_controlled(std::slice::from_ref(&record), 0).unwrap();
        let init = random_state(&mut rng, 2);
        let mut got = StateVec::new(2);
        got.amps = init.clone();
        apply_records(&mut got, &synth);

        let mut expect = init.clone();
        let m = qasm_forge::gates::matrix_1q("u", &params);
        // Controlled-u on (control=bit0, target=bit1).
        let (a01, a11) = (expect[1], expect[3]);
        expect[1] = m[0][0] * a01 + m[0][1] * a11;
        expect[3] = m[1][0] * a01 + m[1][1] * a11;
        let d: f64 = expect
            .iter()
            .zip(&got.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(d < 1e-10, "ctrl-u inexact: {d:.2e}");
    }
}

#[test]
fn ccx_decomposition_is_exact() {
    let mut rng = StdRng::seed_from_u64(4);
    let decomp = ccx_decomposition(0, 1, 2);
    // Counted cost: 2 cnot + 3 crz under the {cnot, crz} metric.
    let counted = decomp
        .iter()
        .filter(|r| matches!(r.gate.as_str(), "cnot" | "crz"))
        .count();
    assert_eq!(counted, 5);
    for _ in 0..20 {
        let init = random_state(&mut rng, 3);
        let mut got = StateVec::new(3);
        got.amps = init.clone();
        apply_records(&mut got, &decomp);
        let mut expect = init.clone();
        expect.swap(3, 7); // |011> <-> |111>
        let d: f64 = expect
            .iter()
            .zip(&got.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(d < 1e-10, "ccx decomposition inexact: {d:.2e}");
    }
}

#[test]
fn expanded_controlled_gates_are_exact() {
    let mut rng = StdRng::seed_from_u64(14);
    for (name, params) in [
        ("cy", vec![]),
        ("cz", vec![]),
        ("ch", vec![]),
        ("crz", vec![0.77]),
        ("cphase", vec![-1.3]),
    ] {
        let record = GateRecord::new(name, vec![0, 1], params.clone());
        let expansion = expand_controlled_gate(&record).unwrap();
        for _ in 0..10 {
            let init = random_state(&mut rng, 2);
            let mut got = StateVec::new(2);
            got.amps = init.clone();
            apply_records(&mut got, &expansion);
            let mut expect = StateVec::new(2);
            expect.amps = init;
            expect.apply(&record).unwrap();
            let d: f64 = expect
                .amps
                .iter()
                .zip(&got.amps)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(d < 1e-10, "expansion of {name} inexact: {d:.2e}");
        }
    }
}

// ---- record-level region synthesis ----

#[test]
fn adjoint_region_restores_initial_state() {
    let mut rng = StdRng::seed_from_u64(6);
    for _ in 0..100 {
        let n = rng.gen_range(1..=5u32);
        let records = random_records(&mut rng, n, 15);
        let adj = adjoint_records(&records);
        let init = random_state(&mut rng, n as usize);
        let mut sv = StateVec::new(n as usize);
        sv.amps = init.clone();
        apply_records(&mut sv, &records);
        apply_records(&mut sv, &adj);
        let d = phase_aligned_distance(&init, &sv.amps);
        assert!(d < 1e-9, "adj(R) . R != identity: {d:.2e}");
    }
}

#[test]
fn power_region_equals_repetition() {
    let mut rng = StdRng::seed_from_u64(8);
    for k in -2i64..=3 {
        let n = 3u32;
        let records = random_records(&mut rng, n, 8);
        let powered = power_records(&records, k);
        let init = random_state(&mut rng, n as usize);
        let mut got = StateVec::new(n as usize);
        got.amps = init.clone();
        apply_records(&mut got, &powered);

        let mut expect = StateVec::new(n as usize);
        expect.amps = init;
        if k >= 0 {
            for _ in 0..k {
                apply_records(&mut expect, &records);
            }
        } else {
            let adj = adjoint_records(&records);
            for _ in 0..(-k) {
                apply_records(&mut expect, &adj);
            }
        }
        let d = phase_aligned_distance(&expect.amps, &got.amps);
        assert!(d < 1e-9, "pow({k}) mismatch: {d:.2e}");
    }
}

#[test]
fn controlled_region_conditioned_on_control_state() {
    let mut rng = StdRng::seed_from_u64(10);
    for _ in 0..60 {
        let n: u32 = rng.gen_range(2..=5);
        let block = random_records(&mut rng, n - 1, 10);
        // Shift block qubits up by one; control is qubit 0.
        let shifted: Vec<GateRecord> = block
            .iter()
            .map(|r| GateRecord::new(&r.gate, r.qubits.iter().map(|q| q + 1).collect(), r.params.clone()))
            .collect();
        let synth = synthesize_controlled(&shifted, 0).unwrap();

        // Control |0>: identity on the rest.
        let init = random_state(&mut rng, (n - 1) as usize);
        let mut zero_state: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); 1 << n];
        for (i, a) in init.iter().enumerate() {
            zero_state[i << 1] = *a;
        }
        let mut sv = StateVec::new(n as usize);
        sv.amps = zero_state.clone();
        apply_records(&mut sv, &synth);
        let d = phase_aligned_distance(&zero_state, &sv.amps);
        assert!(d < 1e-9, "ctrl|0> not identity: {d:.2e}");

        // Control |1>: equals the raw block on the rest.
        let mut one_state: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); 1 << n];
        for (i, a) in init.iter().enumerate() {
            one_state[(i << 1) | 1] = *a;
        }
        let mut sv = StateVec::new(n as usize);
        sv.amps = one_state.clone();
        apply_records(&mut sv, &synth);

        let mut expect = StateVec::new(n as usize);
        expect.amps = one_state;
        apply_records(&mut expect, &shifted);
        let d = phase_aligned_distance(&expect.amps, &sv.amps);
        assert!(d < 1e-9, "ctrl|1> != R: {d:.2e}");
    }
}

#[test]
fn compute_action_ctrl_equivalent_to_naive_and_cheaper() {
    let mut rng = StdRng::seed_from_u64(12);
    for _ in 0..40 {
        let n: u32 = rng.gen_range(2..=4);
        // Compute block U and action V on qubits 1..=n. U always carries at
        // least one entangling gate, the case the pattern exists for.
        let mut u_block = random_records(&mut rng, n, 6);
        u_block.push(GateRecord::new("cnot", vec![0, 1], vec![]));
        let v_block = random_records(&mut rng, n, 4);
        let shift = |rs: &[GateRecord], seg: Segment| -> Vec<GateRecord> {
            rs.iter()
                .map(|r| {
                    let mut g = GateRecord::new(
                        &r.gate,
                        r.qubits.iter().map(|q| q + 1).collect(),
                        r.params.clone(),
                    );
                    g.segment = seg;
                    g
                })
                .collect()
        };
        let u = shift(&u_block, Segment::Compute);
        let v = shift(&v_block, Segment::None);
        let u_dag: Vec<GateRecord> = adjoint_records(&u);
        let mut flagged = u.clone();
        flagged.extend(v.clone());
        flagged.extend(u_dag.clone());

        let mut naive = shift(&u_block, Segment::None);
        naive.extend(v.clone());
        naive.extend(adjoint_records(&shift(&u_block, Segment::None)));

        let smart = synthesize_controlled(&flagged, 0).unwrap();
        let brute = synthesize_controlled(&naive, 0).unwrap();

        let counted = |rs: &[GateRecord]| -> u64 {
            rs.iter()
                .map(|r| match r.gate.as_str() {
                    "cnot" | "crz" => 1,
                    "ccx" => 5,
                    _ => 0,
                })
                .sum()
        };
        assert!(
            counted(&smart) < counted(&brute),
            "compute-action not cheaper: {} vs {}",
            counted(&smart),
            counted(&brute)
        );

        let total_n = (n + 1) as usize;
        let init = random_state(&mut rng, total_n);
        let mut a = StateVec::new(total_n);
        a.amps = init.clone();
        apply_records(&mut a, &smart);
        let mut b = StateVec::new(total_n);
        b.amps = init;
        apply_records(&mut b, &brute);
        let d = phase_aligned_distance(&b.amps, &a.amps);
        assert!(d < 1e-9, "compute-action ctrl differs from naive: {d:.2e}");
    }
}

#[test]
fn nested_region_collection_composes() {
    // ctrl(adj(s)) == ctrl(sdg) == cphase(-pi/2).
    let mut ctx = ExecutionContext::new(ExecutionConfig {
        backend: BackendKind::Estimator,
        ..Default::default()
    });
    let arr = ctx.allocate_array(2).unwrap();
    let c = ctx.get_element(arr, 0).unwrap();
    let t = ctx.get_element(arr, 1).unwrap();
    ctx.start_region(RegionKind::Ctrl);
    ctx.start_region(RegionKind::Adj);
    ctx.apply_gate("s", &[], &[t], Segment::None).unwrap();
    ctx.end_region(RegionKind::Adj, RegionOperand::None).unwrap();
    ctx.end_region(RegionKind::Ctrl, RegionOperand::Ctrl(c)).unwrap();
    let stats = ctx.stats();
    assert_eq!(stats.per_gate.get("cphase"), Some(&1));
}

#[test]
fn deterministic_stats_and_streams_for_fixed_seed() {
    let run = || {
        let report = qasm_forge::runtime::interp::run_program(
            &qasm_forge::driver::compile_source(
                qasm_forge::fixtures::DEUTERON,
                &qasm_forge::driver::CompileOptions::default(),
            )
            .unwrap()
            .lir,
            ExecutionConfig {
                seed: 11,
                ..Default::default()
            },
        )
        .unwrap();
        (report.output, report.stats.to_json())
    };
    assert_eq!(run(), run());
}
