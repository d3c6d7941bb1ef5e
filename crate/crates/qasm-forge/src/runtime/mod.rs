//! Runtime implementation of the lowered call interface: qubit and array
//! management, gate application against pluggable backends, measurement with
//! immediate (streamed) execution, and ctrl/adj/pow region synthesis via
//! instruction collection.

pub mod backend;
pub mod interp;

use crate::gates;
use crate::ir::Segment;
use backend::{Backend, BackendKind, BackendStats};
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum RuntimeError {
    UnknownGate(String),
    DeadHandle(String),
    IndexOutOfRange { index: i64, size: usize },
    QubitCapExceeded { requested: usize, cap: usize },
    RegionMismatch { expected: String, found: String },
    MeasureInRegion,
    UnsupportedControl(String),
    ExternNotLinked(String),
    DuplicateQubit(String),
    UninitializedRead,
    MalformedProgram(String),
}

impl fmt::Display for RuntimeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuntimeError::UnknownGate(g) => write!(f, "unknown gate `{g}`"),
            RuntimeError::DeadHandle(what) => write!(f, "use of dead handle ({what})"),
            RuntimeError::IndexOutOfRange { index, size } => {
                write!(f, "qubit index {index} out of range for array of size {size}")
            }
            RuntimeError::QubitCapExceeded { requested, cap } => write!(
                f,
                "statevector qubit cap exceeded ({requested} > {cap}); use the estimator backend for larger programs"
            ),
            RuntimeError::RegionMismatch { expected, found } => {
                write!(f, "mismatched region markers: expected end of `{expected}`, found `{found}`")
            }
            RuntimeError::MeasureInRegion => {
                write!(f, "measurement/reset inside a ctrl/adj/pow region cannot be synthesized")
            }
            RuntimeError::UnsupportedControl(g) => {
                write!(f, "no controlled form known for gate `{g}`")
            }
            RuntimeError::ExternNotLinked(name) => write!(f, "extern `{name}` is not linked"),
            RuntimeError::DuplicateQubit(g) => {
                write!(f, "duplicate qubit argument in `{g}`")
            }
            RuntimeError::UninitializedRead => write!(f, "read of uninitialized variable"),
            RuntimeError::MalformedProgram(m) => write!(f, "malformed program: {m}"),
        }
    }
}

impl std::error::Error for RuntimeError {}

#[derive(Debug, Clone)]
pub struct ExecutionConfig {
    pub backend: BackendKind,
    pub shots: u64,
    pub seed: u64,
    /// Statevector size limit, in qubits.
    pub qubit_cap: usize,
    /// Counted controlled-op cost booked per synthesized ccx (the default
    /// ccz-based decomposition costs 2 cx + 3 crz).
    pub ccx_cost: u64,
}

impl Default for ExecutionConfig {
    fn default() -> Self {
        Self {
            backend: BackendKind::Statevector,
            shots: 1,
            seed: 0,
            qubit_cap: 22,
            ccx_cost: 5,
        }
    }
}

/// One collected instruction: enough to replay, invert, or control it.
#[derive(Debug, Clone, PartialEq)]
pub struct GateRecord {
    pub gate: String,
    pub qubits: Vec<u32>,
    pub params: Vec<f64>,
    pub segment: Segment,
}

impl GateRecord {
    pub fn new(gate: &str, qubits: Vec<u32>, params: Vec<f64>) -> Self {
        Self {
            gate: gate.into(),
            qubits,
            params,
            segment: Segment::None,
        }
    }

    fn with_segment(mut self, segment: Segment) -> Self {
        self.segment = segment;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionKind {
    Ctrl,
    Adj,
    Pow,
}

impl RegionKind {
    fn name(&self) -> &'static str {
        match self {
            RegionKind::Ctrl => "ctrl",
            RegionKind::Adj => "adj",
            RegionKind::Pow => "pow",
        }
    }
}

#[derive(Debug)]
struct Frame {
    kind: RegionKind,
    records: Vec<GateRecord>,
}

/// Execution context for one program run: array table, collector stack, and
/// the backend. Gates stream to the backend as they are invoked unless a
/// region frame is open.
pub struct ExecutionContext {
    pub config: ExecutionConfig,
    backend: Backend,
    arrays: Vec<Option<Vec<u32>>>,
    total_qubits: u32,
    frames: Vec<Frame>,
    output: String,
}

impl ExecutionContext {
    pub fn new(config: ExecutionConfig) -> Self {
        let backend = Backend::new(&config);
        Self {
            config,
            backend,
            arrays: Vec::new(),
            total_qubits: 0,
            frames: Vec::new(),
            output: String::new(),
        }
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn output(&self) -> &str {
        &self.output
    }

    pub fn take_output(&mut self) -> String {
        std::mem::take(&mut self.output)
    }

    pub fn stats(&self) -> BackendStats {
        self.backend.stats(self.config.shots, self.config.seed)
    }

    /// Reset quantum state between whole-program shots; counters and the
    /// random stream carry over.
    pub fn reset_for_next_shot(&mut self) {
        self.arrays.clear();
        self.total_qubits = 0;
        self.frames.clear();
        self.backend.reset_state();
    }

    pub fn print_line(&mut self, line: &str) {
        self.output.push_str(line);
        self.output.push('\n');
    }

    // ---- arrays and handles ----

    pub fn allocate_array(&mut self, n: usize) -> Result<u32, RuntimeError> {
        let requested = self.total_qubits as usize + n;
        if matches!(self.config.backend, BackendKind::Statevector)
            && requested > self.config.qubit_cap
        {
            return Err(RuntimeError::QubitCapExceeded {
                requested,
                cap: self.config.qubit_cap,
            });
        }
        let ids: Vec<u32> = (self.total_qubits..self.total_qubits + n as u32).collect();
        self.total_qubits += n as u32;
        self.backend.grow_to(self.total_qubits as usize);
        self.arrays.push(Some(ids));
        Ok(self.arrays.len() as u32 - 1)
    }

    fn array(&self, handle: u32) -> Result<&Vec<u32>, RuntimeError> {
        self.arrays
            .get(handle as usize)
            .and_then(|a| a.as_ref())
            .ok_or_else(|| RuntimeError::DeadHandle(format!("array #{handle}")))
    }

    pub fn array_len(&self, handle: u32) -> Result<usize, RuntimeError> {
        Ok(self.array(handle)?.len())
    }

    pub fn get_element(&self, handle: u32, index: i64) -> Result<u32, RuntimeError> {
        let ids = self.array(handle)?;
        if index < 0 || index as usize >= ids.len() {
            return Err(RuntimeError::IndexOutOfRange {
                index,
                size: ids.len(),
            });
        }
        Ok(ids[index as usize])
    }

    pub fn release_array(&mut self, handle: u32) -> Result<(), RuntimeError> {
        match self.arrays.get_mut(handle as usize) {
            Some(slot @ Some(_)) => {
                *slot = None;
                Ok(())
            }
            _ => Err(RuntimeError::DeadHandle(format!("array #{handle}"))),
        }
    }

    pub fn array_slice(
        &mut self,
        handle: u32,
        start: i64,
        step: i64,
        stop: i64,
    ) -> Result<u32, RuntimeError> {
        let ids = self.array(handle)?;
        if start < 0 || stop < start || step < 1 || stop as usize >= ids.len() {
            return Err(RuntimeError::IndexOutOfRange {
                index: stop,
                size: ids.len(),
            });
        }
        let view: Vec<u32> = (start..=stop)
            .step_by(step as usize)
            .map(|i| ids[i as usize])
            .collect();
        self.arrays.push(Some(view));
        Ok(self.arrays.len() as u32 - 1)
    }

    pub fn array_concatenate(&mut self, a: u32, b: u32) -> Result<u32, RuntimeError> {
        let mut ids = self.array(a)?.clone();
        ids.extend(self.array(b)?.iter().copied());
        self.arrays.push(Some(ids));
        Ok(self.arrays.len() as u32 - 1)
    }

    // ---- gates, measurement ----

    /// Apply (or collect) one gate invocation.
    pub fn apply_gate(
        &mut self,
        name: &str,
        params: &[f64],
        qubits: &[u32],
        segment: Segment,
    ) -> Result<(), RuntimeError> {
        let canonical = gates::canonical_name(name);
        let info =
            gates::lookup(canonical).ok_or_else(|| RuntimeError::UnknownGate(name.into()))?;
        if info.num_params != params.len() || info.num_qubits != qubits.len() {
            return Err(RuntimeError::MalformedProgram(format!(
                "gate `{name}` arity mismatch"
            )));
        }
        for (i, q) in qubits.iter().enumerate() {
            if qubits[..i].contains(q) {
                return Err(RuntimeError::DuplicateQubit(name.into()));
            }
            if *q >= self.total_qubits {
                return Err(RuntimeError::DeadHandle(format!("qubit #{q}")));
            }
        }
        let record =
            GateRecord::new(canonical, qubits.to_vec(), params.to_vec()).with_segment(segment);
        self.emit(record)
    }

    fn emit(&mut self, record: GateRecord) -> Result<(), RuntimeError> {
        match self.frames.last_mut() {
            Some(frame) => {
                frame.records.push(record);
                Ok(())
            }
            None => self.backend.execute(&record, self.config.ccx_cost),
        }
    }

    pub fn measure(&mut self, qubit: u32) -> Result<bool, RuntimeError> {
        if !self.frames.is_empty() {
            return Err(RuntimeError::MeasureInRegion);
        }
        if qubit >= self.total_qubits {
            return Err(RuntimeError::DeadHandle(format!("qubit #{qubit}")));
        }
        Ok(self.backend.measure(qubit))
    }

    pub fn reset(&mut self, qubit: u32) -> Result<(), RuntimeError> {
        if !self.frames.is_empty() {
            return Err(RuntimeError::MeasureInRegion);
        }
        if qubit >= self.total_qubits {
            return Err(RuntimeError::DeadHandle(format!("qubit #{qubit}")));
        }
        self.backend.reset(qubit);
        Ok(())
    }

    // ---- region collection and synthesis ----

    pub fn start_region(&mut self, kind: RegionKind) {
        self.frames.push(Frame {
            kind,
            records: Vec::new(),
        });
    }

    pub fn end_region(&mut self, kind: RegionKind, operand: RegionOperand) -> Result<(), RuntimeError> {
        let frame = self.frames.pop().ok_or_else(|| RuntimeError::RegionMismatch {
            expected: "none".into(),
            found: kind.name().into(),
        })?;
        if frame.kind != kind {
            self.frames.push(frame);
            return Err(RuntimeError::RegionMismatch {
                expected: self
                    .frames
                    .last()
                    .map(|f| f.kind.name().to_string())
                    .unwrap_or_default(),
                found: kind.name().into(),
            });
        }
        let synthesized = match (kind, operand) {
            (RegionKind::Adj, RegionOperand::None) => adjoint_records(&frame.records),
            (RegionKind::Pow, RegionOperand::Power(k)) => power_records(&frame.records, k),
            (RegionKind::Ctrl, RegionOperand::Ctrl(c)) => {
                synthesize_controlled(&frame.records, c)?
            }
            _ => {
                return Err(RuntimeError::RegionMismatch {
                    expected: kind.name().into(),
                    found: "wrong operand".into(),
                })
            }
        };
        for r in synthesized {
            self.emit(r)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub enum RegionOperand {
    None,
    Ctrl(u32),
    Power(i64),
}

/// Reverse + dagger. Compute/uncompute flags swap so nested synthesis still
/// sees a well-formed sandwich.
pub fn adjoint_records(records: &[GateRecord]) -> Vec<GateRecord> {
    records
        .iter()
        .rev()
        .map(|r| {
            let (name, params) = gates::dagger(&r.gate, &r.params);
            GateRecord {
                gate: name,
                qubits: r.qubits.clone(),
                params,
                segment: match r.segment {
                    Segment::Compute => Segment::Uncompute,
                    Segment::Uncompute => Segment::Compute,
                    Segment::None => Segment::None,
                },
            }
        })
        .collect()
}

pub fn power_records(records: &[GateRecord], k: i64) -> Vec<GateRecord> {
    if k >= 0 {
        let mut out = Vec::with_capacity(records.len() * k as usize);
        for _ in 0..k {
            out.extend(records.iter().cloned());
        }
        out
    } else {
        let adj = adjoint_records(records);
        let mut out = Vec::with_capacity(records.len() * (-k) as usize);
        for _ in 0..(-k) {
            out.extend(adj.iter().cloned());
        }
        out
    }
}

/// Controlled synthesis of a collected block. Records flagged compute or
/// uncompute pass through uncontrolled (the W = U V U-dagger pattern needs
/// controls only on V); everything else maps to its controlled form.
pub fn synthesize_controlled(
    records: &[GateRecord],
    ctrl: u32,
) -> Result<Vec<GateRecord>, RuntimeError> {
    let mut out = Vec::new();
    for r in records {
        if r.segment != Segment::None {
            out.push(r.clone());
            continue;
        }
        if r.qubits.contains(&ctrl) {
            return Err(RuntimeError::DuplicateQubit(format!(
                "control qubit overlaps `{}` operands",
                r.gate
            )));
        }
        out.extend(controlled_one(r, ctrl)?);
    }
    Ok(out)
}

/// The controlled form of one record, exact as a unitary (no dropped
/// relative phases).
fn controlled_one(r: &GateRecord, c: u32) -> Result<Vec<GateRecord>, RuntimeError> {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
    let q = &r.qubits;
    let p = &r.params;
    let g = |name: &str, qubits: Vec<u32>, params: Vec<f64>| GateRecord::new(name, qubits, params);
    let one = |rec: GateRecord| -> Result<Vec<GateRecord>, RuntimeError> { Ok(vec![rec]) };
    match r.gate.as_str() {
        "x" => one(g("cnot", vec![c, q[0]], vec![])),
        "y" => one(g("cy", vec![c, q[0]], vec![])),
        "z" => one(g("cz", vec![c, q[0]], vec![])),
        "h" => one(g("ch", vec![c, q[0]], vec![])),
        "s" => one(g("cphase", vec![c, q[0]], vec![FRAC_PI_2])),
        "sdg" => one(g("cphase", vec![c, q[0]], vec![-FRAC_PI_2])),
        "t" => one(g("cphase", vec![c, q[0]], vec![FRAC_PI_4])),
        "tdg" => one(g("cphase", vec![c, q[0]], vec![-FRAC_PI_4])),
        "phase" => one(g("cphase", vec![c, q[0]], vec![p[0]])),
        "rz" => one(g("crz", vec![c, q[0]], vec![p[0]])),
        // rx = h rz h; conjugating hadamards cancel when the control is off.
        "rx" => Ok(vec![
            g("h", vec![q[0]], vec![]),
            g("crz", vec![c, q[0]], vec![p[0]]),
            g("h", vec![q[0]], vec![]),
        ]),
        "ry" => Ok(vec![
            g("ry", vec![q[0]], vec![p[0] / 2.0]),
            g("cnot", vec![c, q[0]], vec![]),
            g("ry", vec![q[0]], vec![-p[0] / 2.0]),
            g("cnot", vec![c, q[0]], vec![]),
        ]),
        // ABC decomposition of u(theta, phi, lambda) plus the phase carried
        // by the u convention, which lands on the control.
        "u" => {
            let (theta, phi, lambda) = (p[0], p[1], p[2]);
            Ok(vec![
                g("phase", vec![c], vec![(phi + lambda) / 2.0]),
                g("rz", vec![q[0]], vec![(lambda - phi) / 2.0]),
                g("cnot", vec![c, q[0]], vec![]),
                g("rz", vec![q[0]], vec![-(lambda + phi) / 2.0]),
                g("ry", vec![q[0]], vec![-theta / 2.0]),
                g("cnot", vec![c, q[0]], vec![]),
                g("ry", vec![q[0]], vec![theta / 2.0]),
                g("rz", vec![q[0]], vec![phi]),
            ])
        }
        "cnot" => one(g("ccx", vec![c, q[0], q[1]], vec![])),
        // Fredkin from one Toffoli and two flanking cnots.
        "swap" => Ok(vec![
            g("cnot", vec![q[1], q[0]], vec![]),
            g("ccx", vec![c, q[0], q[1]], vec![]),
            g("cnot", vec![q[1], q[0]], vec![]),
        ]),
        // Remaining controlled-family gates: expand into primitives that are
        // exactly equivalent, then control each primitive.
        "cy" | "cz" | "ch" | "crz" | "cphase" | "ccx" => {
            let mut out = Vec::new();
            for prim in expand_controlled_gate(r)? {
                if prim.qubits.contains(&c) {
                    return Err(RuntimeError::DuplicateQubit(format!(
                        "control qubit overlaps `{}` operands",
                        r.gate
                    )));
                }
                out.extend(controlled_one(&prim, c)?);
            }
            Ok(out)
        }
        other => Err(RuntimeError::UnsupportedControl(other.into())),
    }
}

/// Expand a controlled-family gate into an exactly-equivalent primitive
/// sequence (no global-phase slack; these run under further controls).
pub fn expand_controlled_gate(r: &GateRecord) -> Result<Vec<GateRecord>, RuntimeError> {
    use std::f64::consts::FRAC_PI_2;
    let q = &r.qubits;
    let p = &r.params;
    let g = |name: &str, qubits: Vec<u32>, params: Vec<f64>| GateRecord::new(name, qubits, params);
    match r.gate.as_str() {
        // cy = (I (x) s) cnot (I (x) sdg): exact because s x sdg = y.
        "cy" => Ok(vec![
            g("cphase", vec![q[0], q[1]], vec![-FRAC_PI_2]),
            g("cnot", vec![q[0], q[1]], vec![]),
            g("cphase", vec![q[0], q[1]], vec![FRAC_PI_2]),
        ]),
        // cz = (I (x) h) cnot (I (x) h): exact because h x h = z.
        "cz" => Ok(vec![
            g("h", vec![q[1]], vec![]),
            g("cnot", vec![q[0], q[1]], vec![]),
            g("h", vec![q[1]], vec![]),
        ]),
        "ch" => {
            // h = x * ry(pi/2) exactly; control both factors.
            let mut out = controlled_one(&g("ry", vec![q[1]], vec![FRAC_PI_2]), q[0])?;
            out.extend(controlled_one(&g("x", vec![q[1]], vec![]), q[0])?);
            Ok(out)
        }
        // crz(t) = rz(t/2) cnot rz(-t/2) cnot, exactly.
        "crz" => Ok(vec![
            g("rz", vec![q[1]], vec![p[0] / 2.0]),
            g("cnot", vec![q[0], q[1]], vec![]),
            g("rz", vec![q[1]], vec![-p[0] / 2.0]),
            g("cnot", vec![q[0], q[1]], vec![]),
        ]),
        // cphase(t) = crz(t) with the compensating phase(t/2) on the control.
        "cphase" => Ok(vec![
            g("rz", vec![q[1]], vec![p[0] / 2.0]),
            g("cnot", vec![q[0], q[1]], vec![]),
            g("rz", vec![q[1]], vec![-p[0] / 2.0]),
            g("cnot", vec![q[0], q[1]], vec![]),
            g("phase", vec![q[0]], vec![p[0] / 2.0]),
        ]),
        "ccx" => Ok(ccx_decomposition(q[0], q[1], q[2])),
        other => Err(RuntimeError::UnsupportedControl(other.into())),
    }
}

/// Default ccz-based Toffoli decomposition: h on the target around an exact
/// ccz built from 2 cnot + 3 crz + 1 cphase. Counted controlled ops
/// ({cnot, crz} metric): 5.
pub fn ccx_decomposition(a: u32, b: u32, t: u32) -> Vec<GateRecord> {
    use std::f64::consts::FRAC_PI_2;
    vec![
        GateRecord::new("h", vec![t], vec![]),
        GateRecord::new("crz", vec![b, t], vec![FRAC_PI_2]),
        GateRecord::new("cnot", vec![a, b], vec![]),
        GateRecord::new("crz", vec![b, t], vec![-FRAC_PI_2]),
        GateRecord::new("cnot", vec![a, b], vec![]),
        GateRecord::new("crz", vec![a, t], vec![FRAC_PI_2]),
        GateRecord::new("cphase", vec![a, b], vec![FRAC_PI_2]),
        GateRecord::new("h", vec![t], vec![]),
    ]
}
