//! The built-in gate set: arities, aliases, dagger rules, and 2x2/controlled
//! matrix definitions shared by the verifier, the peephole passes, and the
//! runtime backends.

use num_complex::Complex64;

pub const C0: Complex64 = Complex64::new(0.0, 0.0);
pub const C1: Complex64 = Complex64::new(1.0, 0.0);

/// Gates resolved from `include "stdgates.inc"` plus the controlled forms the
/// runtime synthesizes. Names are canonical (`cx` -> `cnot`, `p` -> `phase`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GateInfo {
    pub name: &'static str,
    pub num_params: usize,
    pub num_qubits: usize,
}

const GATES: &[GateInfo] = &[
    GateInfo { name: "x", num_params: 0, num_qubits: 1 },
    GateInfo { name: "y", num_params: 0, num_qubits: 1 },
    GateInfo { name: "z", num_params: 0, num_qubits: 1 },
    GateInfo { name: "h", num_params: 0, num_qubits: 1 },
    GateInfo { name: "s", num_params: 0, num_qubits: 1 },
    GateInfo { name: "sdg", num_params: 0, num_qubits: 1 },
    GateInfo { name: "t", num_params: 0, num_qubits: 1 },
    GateInfo { name: "tdg", num_params: 0, num_qubits: 1 },
    GateInfo { name: "rx", num_params: 1, num_qubits: 1 },
    GateInfo { name: "ry", num_params: 1, num_qubits: 1 },
    GateInfo { name: "rz", num_params: 1, num_qubits: 1 },
    GateInfo { name: "phase", num_params: 1, num_qubits: 1 },
    GateInfo { name: "u", num_params: 3, num_qubits: 1 },
    GateInfo { name: "cnot", num_params: 0, num_qubits: 2 },
    GateInfo { name: "cy", num_params: 0, num_qubits: 2 },
    GateInfo { name: "cz", num_params: 0, num_qubits: 2 },
    GateInfo { name: "ch", num_params: 0, num_qubits: 2 },
    GateInfo { name: "swap", num_params: 0, num_qubits: 2 },
    GateInfo { name: "crz", num_params: 1, num_qubits: 2 },
    GateInfo { name: "cphase", num_params: 1, num_qubits: 2 },
    GateInfo { name: "ccx", num_params: 0, num_qubits: 3 },
];

/// Map source-level aliases onto canonical gate names.
pub fn canonical_name(name: &str) -> &str {
    match name {
        "cx" => "cnot",
        "p" => "phase",
        "ccnot" | "toffoli" => "ccx",
        "crk" => "cphase",
        other => other,
    }
}

pub fn lookup(name: &str) -> Option<GateInfo> {
    let name = canonical_name(name);
    GATES.iter().copied().find(|g| g.name == name)
}

pub fn is_builtin_gate(name: &str) -> bool {
    lookup(name).is_some()
}

/// The adjoint of a gate application. Self-inverse gates map to themselves,
/// `s`/`t` swap with their dagger forms, rotations negate their angle, and
/// `u(theta, phi, lambda)` maps to `u(-theta, -lambda, -phi)`.
pub fn dagger(name: &str, params: &[f64]) -> (String, Vec<f64>) {
    let (n, p) = dagger_symbolic(name);
    let params = match p {
        ParamMap::Same => params.to_vec(),
        ParamMap::Negate => params.iter().map(|a| -a).collect(),
        ParamMap::UDagger => vec![-params[0], -params[2], -params[1]],
    };
    (n.to_string(), params)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamMap {
    Same,
    Negate,
    UDagger,
}

/// Dagger rule without concrete parameters: the replacement name and how the
/// parameter list transforms.
pub fn dagger_symbolic(name: &str) -> (&'static str, ParamMap) {
    match canonical_name(name) {
        "x" => ("x", ParamMap::Same),
        "y" => ("y", ParamMap::Same),
        "z" => ("z", ParamMap::Same),
        "h" => ("h", ParamMap::Same),
        "cnot" => ("cnot", ParamMap::Same),
        "cy" => ("cy", ParamMap::Same),
        "cz" => ("cz", ParamMap::Same),
        "ch" => ("ch", ParamMap::Same),
        "swap" => ("swap", ParamMap::Same),
        "ccx" => ("ccx", ParamMap::Same),
        "s" => ("sdg", ParamMap::Same),
        "sdg" => ("s", ParamMap::Same),
        "t" => ("tdg", ParamMap::Same),
        "tdg" => ("t", ParamMap::Same),
        "rx" => ("rx", ParamMap::Negate),
        "ry" => ("ry", ParamMap::Negate),
        "rz" => ("rz", ParamMap::Negate),
        "phase" => ("phase", ParamMap::Negate),
        "crz" => ("crz", ParamMap::Negate),
        "cphase" => ("cphase", ParamMap::Negate),
        "u" => ("u", ParamMap::UDagger),
        other => panic!("no dagger rule for gate `{other}`"),
    }
}

/// True when `g` followed by `h` (same qubit lines, same order) is the
/// identity.
pub fn is_adjoint_pair(g: &str, gp: &[f64], h: &str, hp: &[f64]) -> bool {
    let (dn, dp) = dagger(g, gp);
    dn == canonical_name(h) && dp.len() == hp.len() && dp.iter().zip(hp).all(|(a, b)| (a - b).abs() < 1e-12)
}

/// Rotation axis families used by the gate-merging pass. A member is either a
/// fixed gate equivalent (up to global phase) to a rotation by `angle`, or the
/// parametric rotation itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// If `name` belongs to a single-qubit rotation family, return the axis and
/// the fixed rotation angle for non-parametric members (e.g. `z` = rz(pi)).
pub fn rotation_family(name: &str) -> Option<(Axis, Option<f64>)> {
    use std::f64::consts::PI;
    Some(match canonical_name(name) {
        "x" => (Axis::X, Some(PI)),
        "rx" => (Axis::X, None),
        "y" => (Axis::Y, Some(PI)),
        "ry" => (Axis::Y, None),
        "z" => (Axis::Z, Some(PI)),
        "s" => (Axis::Z, Some(PI / 2.0)),
        "sdg" => (Axis::Z, Some(-PI / 2.0)),
        "t" => (Axis::Z, Some(PI / 4.0)),
        "tdg" => (Axis::Z, Some(-PI / 4.0)),
        "rz" | "phase" => (Axis::Z, None),
        _ => return None,
    })
}

pub fn rotation_gate_for_axis(axis: Axis) -> &'static str {
    match axis {
        Axis::X => "rx",
        Axis::Y => "ry",
        Axis::Z => "rz",
    }
}

/// Diagonal single-qubit gates (commute with the control line of a cnot).
pub fn is_diagonal_1q(name: &str) -> bool {
    matches!(
        canonical_name(name),
        "z" | "s" | "sdg" | "t" | "tdg" | "rz" | "phase"
    )
}

/// The 2x2 unitary of a single-qubit gate.
pub fn matrix_1q(name: &str, params: &[f64]) -> [[Complex64; 2]; 2] {
    use std::f64::consts::FRAC_1_SQRT_2 as R;
    let i = Complex64::i();
    match canonical_name(name) {
        "x" => [[C0, C1], [C1, C0]],
        "y" => [[C0, -i], [i, C0]],
        "z" => [[C1, C0], [C0, -C1]],
        "h" => [
            [Complex64::new(R, 0.0), Complex64::new(R, 0.0)],
            [Complex64::new(R, 0.0), Complex64::new(-R, 0.0)],
        ],
        "s" => [[C1, C0], [C0, i]],
        "sdg" => [[C1, C0], [C0, -i]],
        "t" => [[C1, C0], [C0, (i * std::f64::consts::FRAC_PI_4).exp()]],
        "tdg" => [[C1, C0], [C0, (-i * std::f64::consts::FRAC_PI_4).exp()]],
        "rx" => {
            let (c, s) = half_angle(params[0]);
            [[c.into(), -i * s], [-i * s, c.into()]]
        }
        "ry" => {
            let (c, s) = half_angle(params[0]);
            [[c.into(), Complex64::new(-s, 0.0)], [s.into(), c.into()]]
        }
        "rz" => {
            let e = (i * (params[0] / 2.0)).exp();
            [[e.conj(), C0], [C0, e]]
        }
        "phase" => [[C1, C0], [C0, (i * params[0]).exp()]],
        "u" => {
            // u(theta, phi, lambda): u(pi, 0, pi) = x exactly.
            let (theta, phi, lambda) = (params[0], params[1], params[2]);
            let (c, s) = half_angle(theta);
            [
                [c.into(), -(i * lambda).exp() * s],
                [(i * phi).exp() * s, (i * (phi + lambda)).exp() * c],
            ]
        }
        other => panic!("`{other}` is not a single-qubit gate"),
    }
}

fn half_angle(theta: f64) -> (f64, f64) {
    ((theta / 2.0).cos(), (theta / 2.0).sin())
}

/// For controlled two/three-qubit gates: the target-side 2x2 unitary applied
/// when all controls are set. `swap` is handled separately by callers.
pub fn controlled_target_matrix(name: &str, params: &[f64]) -> Option<(usize, [[Complex64; 2]; 2])> {
    let m = match canonical_name(name) {
        "cnot" => matrix_1q("x", &[]),
        "cy" => matrix_1q("y", &[]),
        "cz" => matrix_1q("z", &[]),
        "ch" => matrix_1q("h", &[]),
        "crz" => matrix_1q("rz", params),
        "cphase" => matrix_1q("phase", params),
        "ccx" => matrix_1q("x", &[]),
        _ => return None,
    };
    let controls = if canonical_name(name) == "ccx" { 2 } else { 1 };
    Some((controls, m))
}
