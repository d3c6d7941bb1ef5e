//! Execution backends: a full statevector simulator and a gate-counting
//! resource estimator.

use super::{GateRecord, RuntimeError};
use crate::gates::{self, C0, C1};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendKind {
    Estimator,
    Statevector,
}

impl std::str::FromStr for BackendKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "estimator" => Ok(BackendKind::Estimator),
            "statevector" => Ok(BackendKind::Statevector),
            other => Err(format!("unknown backend `{other}`")),
        }
    }
}

/// Deterministic, key-sorted statistics report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackendStats {
    pub total_gates: u64,
    pub per_gate: BTreeMap<String, u64>,
    pub controlled_ops_cx_crz: u64,
    pub shots: u64,
    pub seed: u64,
}

impl BackendStats {
    pub fn to_json(&self) -> String {
        let mut root = serde_json::Map::new();
        root.insert(
            "controlled_ops_cx_crz".into(),
            serde_json::json!(self.controlled_ops_cx_crz),
        );
        let per_gate: serde_json::Map<String, serde_json::Value> = self
            .per_gate
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::json!(v)))
            .collect();
        root.insert("per_gate".into(), serde_json::Value::Object(per_gate));
        root.insert("seed".into(), serde_json::json!(self.seed));
        root.insert("shots".into(), serde_json::json!(self.shots));
        root.insert("total_gates".into(), serde_json::json!(self.total_gates));
        serde_json::to_string_pretty(&serde_json::Value::Object(root))
            .expect("stats serialize")
    }
}

#[derive(Debug, Default)]
pub struct Counters {
    total_gates: u64,
    per_gate: BTreeMap<String, u64>,
    controlled: u64,
}

impl Counters {
    fn count(&mut self, record: &GateRecord, ccx_cost: u64) {
        self.total_gates += 1;
        *self.per_gate.entry(record.gate.clone()).or_insert(0) += 1;
        self.controlled += match record.gate.as_str() {
            "cnot" => 1,
            "crz" => 1,
            "ccx" => ccx_cost,
            _ => 0,
        };
    }
}

pub enum Backend {
    Estimator {
        counters: Counters,
    },
    Statevector {
        state: StateVec,
        rng: ChaCha8Rng,
        counters: Counters,
    },
}

impl Backend {
    pub fn new(config: &super::ExecutionConfig) -> Self {
        match config.backend {
            BackendKind::Estimator => Backend::Estimator {
                counters: Counters::default(),
            },
            BackendKind::Statevector => Backend::Statevector {
                state: StateVec::new(0),
                rng: ChaCha8Rng::seed_from_u64(config.seed),
                counters: Counters::default(),
            },
        }
    }

    pub fn grow_to(&mut self, n_qubits: usize) {
        if let Backend::Statevector { state, .. } = self {
            state.grow_to(n_qubits);
        }
    }

    pub fn reset_state(&mut self) {
        if let Backend::Statevector { state, .. } = self {
            *state = StateVec::new(0);
        }
    }

    pub fn execute(&mut self, record: &GateRecord, ccx_cost: u64) -> Result<(), RuntimeError> {
        match self {
            Backend::Estimator { counters } => {
                counters.count(record, ccx_cost);
                Ok(())
            }
            Backend::Statevector {
                state, counters, ..
            } => {
                counters.count(record, ccx_cost);
                state.apply(record)
            }
        }
    }

    /// Estimator counts the measurement and reports 0; the simulator samples
    /// and collapses.
    pub fn measure(&mut self, qubit: u32) -> bool {
        match self {
            Backend::Estimator { .. } => false,
            Backend::Statevector { state, rng, .. } => state.measure(qubit as usize, rng),
        }
    }

    pub fn reset(&mut self, qubit: u32) {
        if let Backend::Statevector { state, rng, .. } = self {
            if state.measure(qubit as usize, rng) {
                let x = GateRecord::new("x", vec![qubit], vec![]);
                state.apply(&x).expect("x is a known gate");
            }
        }
    }

    pub fn stats(&self, shots: u64, seed: u64) -> BackendStats {
        let counters = match self {
            Backend::Estimator { counters } => counters,
            Backend::Statevector { counters, .. } => counters,
        };
        BackendStats {
            total_gates: counters.total_gates,
            per_gate: counters.per_gate.clone(),
            controlled_ops_cx_crz: counters.controlled,
            shots,
            seed,
        }
    }

    pub fn statevector(&self) -> Option<&[Complex64]> {
        match self {
            Backend::Statevector { state, .. } => Some(&state.amps),
            Backend::Estimator { .. } => None,
        }
    }
}

/// Dense statevector over `n` qubits; qubit k is bit k of the amplitude
/// index (little-endian).
#[derive(Debug, Clone)]
pub struct StateVec {
    pub n_qubits: usize,
    pub amps: Vec<Complex64>,
}

impl StateVec {
    pub fn new(n_qubits: usize) -> Self {
        let mut amps = vec![C0; 1 << n_qubits];
        amps[0] = C1;
        Self { n_qubits, amps }
    }

    /// Extend with fresh |0> qubits (new high bits).
    pub fn grow_to(&mut self, n_qubits: usize) {
        if n_qubits <= self.n_qubits {
            return;
        }
        self.amps.resize(1 << n_qubits, C0);
        self.n_qubits = n_qubits;
    }

    pub fn apply(&mut self, record: &GateRecord) -> Result<(), RuntimeError> {
        let qs = &record.qubits;
        match record.gate.as_str() {
            "swap" => {
                let (a, b) = (qs[0] as usize, qs[1] as usize);
                self.apply_swap(a, b);
                Ok(())
            }
            name => {
                if let Some(info) = gates::lookup(name) {
                    if info.num_qubits == 1 {
                        let m = gates::matrix_1q(name, &record.params);
                        self.apply_1q(m, qs[0] as usize);
                        return Ok(());
                    }
                }
                match gates::controlled_target_matrix(name, &record.params) {
                    Some((n_controls, m)) => {
                        let controls: Vec<usize> =
                            qs[..n_controls].iter().map(|q| *q as usize).collect();
                        let target = qs[n_controls] as usize;
                        self.apply_controlled(m, &controls, target);
                        Ok(())
                    }
                    None => Err(RuntimeError::UnknownGate(record.gate.clone())),
                }
            }
        }
    }

    pub fn apply_1q(&mut self, m: [[Complex64; 2]; 2], k: usize) {
        let bit = 1usize << k;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let j = i | bit;
                let (a0, a1) = (self.amps[i], self.amps[j]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[j] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn apply_controlled(&mut self, m: [[Complex64; 2]; 2], controls: &[usize], target: usize) {
        let tbit = 1usize << target;
        let cmask: usize = controls.iter().map(|c| 1usize << c).sum();
        for i in 0..self.amps.len() {
            if i & tbit == 0 && (i & cmask) == cmask {
                let j = i | tbit;
                let (a0, a1) = (self.amps[i], self.amps[j]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[j] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn apply_swap(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let (abit, bbit) = (1usize << a, 1usize << b);
        for i in 0..self.amps.len() {
            // Visit each (01, 10) pair once.
            if i & abit != 0 && i & bbit == 0 {
                let j = (i & !abit) | bbit;
                self.amps.swap(i, j);
            }
        }
    }

    pub fn prob_one(&self, k: usize) -> f64 {
        let bit = 1usize << k;
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    pub fn measure(&mut self, k: usize, rng: &mut ChaCha8Rng) -> bool {
        let p1 = self.prob_one(k);
        let outcome = rng.gen::<f64>() < p1;
        let bit = 1usize << k;
        let keep_mask_set = outcome;
        let p = if outcome { p1 } else { 1.0 - p1 };
        let norm = if p > 0.0 { 1.0 / p.sqrt() } else { 1.0 };
        for (i, a) in self.amps.iter_mut().enumerate() {
            if ((i & bit != 0) == keep_mask_set) && p > 0.0 {
                *a *= norm;
            } else {
                *a = C0;
            }
        }
        outcome
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }
}
