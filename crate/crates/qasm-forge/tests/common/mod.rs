//! Shared test helpers: an independent brute-force statevector oracle (its
//! own gate matrices, no code shared with the runtime backend), a random
//! circuit generator, and global-phase-insensitive comparisons.

#![allow(dead_code)]

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const C0: Complex64 = Complex64::new(0.0, 0.0);
pub const C1: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct GateSpec {
    pub name: String,
    pub params: Vec<f64>,
    pub qubits: Vec<u32>,
}

impl GateSpec {
    pub fn new(name: &str, params: Vec<f64>, qubits: Vec<u32>) -> Self {
        Self {
            name: name.into(),
            params,
            qubits,
        }
    }
}

/// Brute-force simulator used as the oracle side of equivalence checks.
pub struct OracleSim {
    pub n: usize,
    pub amps: Vec<Complex64>,
}

impl OracleSim {
    pub fn new(n: usize) -> Self {
        let mut amps = vec![C0; 1 << n];
        amps[0] = C1;
        Self { n, amps }
    }

    pub fn basis(n: usize, index: usize) -> Self {
        let mut amps = vec![C0; 1 << n];
        amps[index] = C1;
        Self { n, amps }
    }

    fn mat_1q(name: &str, p: &[f64]) -> [[Complex64; 2]; 2] {
        let i = Complex64::i();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        match name {
            "x" => [[C0, C1], [C1, C0]],
            "y" => [[C0, -i], [i, C0]],
            "z" => [[C1, C0], [C0, -C1]],
            "h" => [
                [Complex64::new(r, 0.0), Complex64::new(r, 0.0)],
                [Complex64::new(r, 0.0), Complex64::new(-r, 0.0)],
            ],
            "s" => [[C1, C0], [C0, i]],
            "sdg" => [[C1, C0], [C0, -i]],
            "t" => [[C1, C0], [C0, (i * std::f64::consts::FRAC_PI_4).exp()]],
            "tdg" => [[C1, C0], [C0, (-i * std::f64::consts::FRAC_PI_4).exp()]],
            "rx" => {
                let (c, s) = ((p[0] / 2.0).cos(), (p[0] / 2.0).sin());
                [[c.into(), -i * s], [-i * s, c.into()]]
            }
            "ry" => {
                let (c, s) = ((p[0] / 2.0).cos(), (p[0] / 2.0).sin());
                [[c.into(), (-s).into()], [s.into(), c.into()]]
            }
            "rz" => {
                let e = (i * (p[0] / 2.0)).exp();
                [[e.conj(), C0], [C0, e]]
            }
            "phase" | "p" => [[C1, C0], [C0, (i * p[0]).exp()]],
            "u" => {
                let (theta, phi, lambda) = (p[0], p[1], p[2]);
                let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
                [
                    [c.into(), -(i * lambda).exp() * s],
                    [(i * phi).exp() * s, (i * (phi + lambda)).exp() * c],
                ]
            }
            other => panic!("oracle: unknown 1q gate {other}"),
        }
    }

    pub fn apply(&mut self, g: &GateSpec) {
        let name = match g.name.as_str() {
            "cx" => "cnot",
            other => other,
        };
        match name {
            "cnot" | "cy" | "cz" | "ch" | "crz" | "cphase" => {
                let base = match name {
                    "cnot" => Self::mat_1q("x", &[]),
                    "cy" => Self::mat_1q("y", &[]),
                    "cz" => Self::mat_1q("z", &[]),
                    "ch" => Self::mat_1q("h", &[]),
                    "crz" => Self::mat_1q("rz", &g.params),
                    "cphase" => Self::mat_1q("phase", &g.params),
                    _ => unreachable!(),
                };
                self.apply_controlled(base, &[g.qubits[0] as usize], g.qubits[1] as usize);
            }
            "ccx" => {
                let x = Self::mat_1q("x", &[]);
                self.apply_controlled(
                    x,
                    &[g.qubits[0] as usize, g.qubits[1] as usize],
                    g.qubits[2] as usize,
                );
            }
            "swap" => {
                let (a, b) = (g.qubits[0] as usize, g.qubits[1] as usize);
                let (abit, bbit) = (1usize << a, 1usize << b);
                for idx in 0..self.amps.len() {
                    if idx & abit != 0 && idx & bbit == 0 {
                        let j = (idx & !abit) | bbit;
                        self.amps.swap(idx, j);
                    }
                }
            }
            _ => {
                let m = Self::mat_1q(name, &g.params);
                self.apply_1q(m, g.qubits[0] as usize);
            }
        }
    }

    fn apply_1q(&mut self, m: [[Complex64; 2]; 2], k: usize) {
        let bit = 1usize << k;
        for idx in 0..self.amps.len() {
            if idx & bit == 0 {
                let j = idx | bit;
                let (a0, a1) = (self.amps[idx], self.amps[j]);
                self.amps[idx] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[j] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn apply_controlled(&mut self, m: [[Complex64; 2]; 2], controls: &[usize], target: usize) {
        let tbit = 1usize << target;
        let cmask: usize = controls.iter().map(|c| 1usize << c).sum();
        for idx in 0..self.amps.len() {
            if idx & tbit == 0 && idx & cmask == cmask {
                let j = idx | tbit;
                let (a0, a1) = (self.amps[idx], self.amps[j]);
                self.amps[idx] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[j] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Column-by-column circuit unitary via basis-state application.
pub fn circuit_unitary(gates: &[GateSpec], n: usize) -> Vec<Vec<Complex64>> {
    (0..1usize << n)
        .map(|col| {
            let mut sim = OracleSim::basis(n, col);
            for g in gates {
                sim.apply(g);
            }
            sim.amps
        })
        .collect()
}

/// Max elementwise deviation after aligning global phase on the largest
/// reference amplitude.
pub fn phase_aligned_distance(reference: &[Complex64], candidate: &[Complex64]) -> f64 {
    assert_eq!(reference.len(), candidate.len());
    let pivot = reference
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| a.norm_sqr().total_cmp(&b.norm_sqr()))
        .map(|(i, _)| i)
        .expect("nonempty state");
    if reference[pivot].norm() < 1e-12 {
        return f64::INFINITY;
    }
    let phase = candidate[pivot] / reference[pivot];
    if (phase.norm() - 1.0).abs() > 1e-6 {
        return f64::INFINITY;
    }
    reference
        .iter()
        .zip(candidate)
        .map(|(r, c)| (c - phase * r).norm())
        .fold(0.0, f64::max)
}

pub fn unitary_distance_up_to_phase(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
    // Align phase on the largest entry of the whole reference matrix.
    let mut pivot = (0usize, 0usize);
    let mut best = -1.0f64;
    for (c, col) in a.iter().enumerate() {
        for (r, v) in col.iter().enumerate() {
            if v.norm_sqr() > best {
                best = v.norm_sqr();
                pivot = (c, r);
            }
        }
    }
    let (pc, pr) = pivot;
    if a[pc][pr].norm() < 1e-12 {
        return f64::INFINITY;
    }
    let phase = b[pc][pr] / a[pc][pr];
    if (phase.norm() - 1.0).abs() > 1e-6 {
        return f64::INFINITY;
    }
    let mut worst = 0.0f64;
    for (col_a, col_b) in a.iter().zip(b) {
        for (va, vb) in col_a.iter().zip(col_b) {
            worst = worst.max((vb - phase * va).norm());
        }
    }
    worst
}

pub const RANDOM_GATE_SET: &[&str] = &[
    "x", "z", "h", "s", "t", "sdg", "tdg", "rx", "ry", "rz", "cx",
];

/// Random straight-line program over `n_qubits`, biased so identity pairs
/// and mergeable neighbors actually occur.
pub fn random_program(rng: &mut StdRng, n_qubits: u32, n_gates: usize) -> Vec<GateSpec> {
    let mut out: Vec<GateSpec> = Vec::with_capacity(n_gates);
    while out.len() < n_gates {
        // Occasionally repeat or invert the previous gate on purpose.
        if !out.is_empty() && rng.gen_bool(0.25) {
            let prev = out.last().expect("nonempty").clone();
            let mirrored = match prev.name.as_str() {
                "s" => GateSpec::new("sdg", vec![], prev.qubits.clone()),
                "sdg" => GateSpec::new("s", vec![], prev.qubits.clone()),
                "t" => GateSpec::new("tdg", vec![], prev.qubits.clone()),
                "tdg" => GateSpec::new("t", vec![], prev.qubits.clone()),
                "rx" | "ry" | "rz" => {
                    let mut p = prev.clone();
                    if rng.gen_bool(0.5) {
                        p.params = vec![-p.params[0]];
                    }
                    p
                }
                _ => prev.clone(),
            };
            out.push(mirrored);
            continue;
        }
        let usable = if n_qubits >= 2 {
            RANDOM_GATE_SET.len()
        } else {
            // Two-qubit gates need two distinct qubits.
            RANDOM_GATE_SET.len() - 1
        };
        let name = RANDOM_GATE_SET[rng.gen_range(0..usable)];
        let (params, qubits) = match name {
            "rx" | "ry" | "rz" => (
                vec![rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)],
                vec![rng.gen_range(0..n_qubits)],
            ),
            "cx" => {
                let a = rng.gen_range(0..n_qubits);
                let mut b = rng.gen_range(0..n_qubits);
                while b == a {
                    b = rng.gen_range(0..n_qubits);
                }
                (vec![], vec![a, b])
            }
            _ => (vec![], vec![rng.gen_range(0..n_qubits)]),
        };
        out.push(GateSpec::new(name, params, qubits));
    }
    out
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Render a gate list as an OpenQASM program on one register.
pub fn gates_to_source(gates: &[GateSpec], n_qubits: u32) -> String {
    let mut src = format!("OPENQASM 3;\ninclude \"stdgates.inc\";\nqubit q[{n_qubits}];\n");
    for g in gates {
        let params = if g.params.is_empty() {
            String::new()
        } else {
            let ps: Vec<String> = g.params.iter().map(|p| format!("{p:?}")).collect();
            format!("({})", ps.join(", "))
        };
        let qubits: Vec<String> = g.qubits.iter().map(|q| format!("q[{q}]")).collect();
        src.push_str(&format!("{}{} {};\n", g.name, params, qubits.join(", ")));
    }
    src
}

/// Read the flat gate list back out of a structured-IR main function:
/// constant-index extracts feed gates whose results inherit the qubit index.
pub fn extract_gates_from_ir(module: &qasm_forge::ir::IrModule) -> Vec<GateSpec> {
    use qasm_forge::ir::{OpKind, ValueId};
    use std::collections::HashMap;
    let main = module.function("main").expect("main exists");
    let entry = main.entry.expect("main has a body");
    let mut line: HashMap<ValueId, u32> = HashMap::new();
    let mut consts: HashMap<ValueId, f64> = HashMap::new();
    let mut out = Vec::new();
    for &op_id in &module.block(entry).ops {
        let op = module.op(op_id);
        match &op.kind {
            OpKind::Constant(c) => {
                if let Some(v) = c.as_float() {
                    consts.insert(op.results[0], v);
                }
            }
            OpKind::Extract { index: Some(i) } => {
                line.insert(op.results[0], *i as u32);
            }
            OpKind::Gate { name, angles } => {
                let n_params = module.gate_param_operands(op);
                let qubit_operands = module.qubit_operands(op);
                let qubits: Vec<u32> = qubit_operands
                    .iter()
                    .map(|v| *line.get(v).expect("gate operand traces to an extract"))
                    .collect();
                for (res, q) in op.results.iter().zip(&qubits) {
                    line.insert(*res, *q);
                }
                let params = match angles {
                    Some(a) => a.clone(),
                    None => op.operands[..n_params]
                        .iter()
                        .map(|v| *consts.get(v).expect("constant gate parameter"))
                        .collect(),
                };
                out.push(GateSpec::new(name, params, qubits));
            }
            _ => {}
        }
    }
    out
}
