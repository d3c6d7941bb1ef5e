//! Built-in benchmark programs. The `.qasm` files under `fixtures/` carry
//! the same sources at their default sizes; the generators here template the
//! qubit count and angle parameters for sweeps.

/// 3-qubit GHZ state preparation.
pub const GHZ: &str = include_str!("../fixtures/ghz.qasm");

/// Subroutine call whose inlining exposes a cnot-cnot identity pair; the
/// full pipeline reduces main to a lone return.
pub const INLINE_CANCEL: &str = include_str!("../fixtures/inline_cancel.qasm");

/// Compute-action block over a sliced register (slice, broadcast, loop).
pub const COMPUTE_ACTION_DEMO: &str = include_str!("../fixtures/compute_action_demo.qasm");

/// Pauli-X expectation workflow with an ansatz subroutine, basis change,
/// measurement loop, and classical accumulation.
pub const DEUTERON: &str = include_str!("../fixtures/deuteron.qasm");

/// Trotterized Heisenberg evolution, manual three-gate form.
pub const TROTTER_50: &str = include_str!("../fixtures/trotter.qasm");

/// Controlled Trotter step generator using compute-action.
pub const HEISENBERG_CTRL_6: &str = include_str!("../fixtures/heisenberg_ctrl.qasm");

pub fn deuteron(theta: f64) -> String {
    DEUTERON.replace("theta = 0.123;", &format!("theta = {theta:?};"))
}

pub fn trotter(n: usize) -> String {
    TROTTER_50.replace(
        "const nb_qubits = 50;",
        &format!("const nb_qubits = {n};"),
    )
}

/// The controlled Heisenberg-step benchmark. `manual` lists the Jz layer as
/// explicit cx/rz/cx statements instead of compute-action; `jz_layer = false`
/// drops the Jz loop entirely (isolating the rx layer's contribution).
pub fn heisenberg_ctrl(n: usize, manual: bool, jz_layer: bool) -> String {
    let jz_body = if !jz_layer {
        ""
    } else if manual {
        r#"    for i in [0:nb_qubits-1] {
      cx r[i], r[i+1];
      rz(-Jz * step_size) r[i + 1];
      cx r[i], r[i+1];
    }
"#
    } else {
        r#"    for i in [0:nb_qubits-1] {
      compute {
        cx r[i], r[i+1];
      } action {
        rz(-Jz * step_size) r[i + 1];
      }
    }
"#
    };
    format!(
        r#"OPENQASM 3;
include "stdgates.inc";

const nb_qubits = {n};
def heisenberg_U() qubit[nb_qubits]:r {{
  int nb_steps = 100;
  double step_size = .01;
  double Jz = 1.0;
  double h = 1.0;

  for step in [0:nb_steps] {{
    rx(-h * step_size) r;

{jz_body}  }}
}}

qubit r[nb_qubits], c;

ctrl @ heisenberg_U c, r;
"#
    )
}
