use qasm_forge::ir::print::print_ir;
use qasm_forge::passes::{run_pipeline, PassConfig};

fn main() {
    // Fig. 6a-style program: inline -> cnot-cnot cancel -> DCE leaves return.
    let src = r#"
def foo qubit[2]:qq {
  cx qq[0], qq[1];
}

qubit q[2];
foo q;
cx q[0], q[1];
"#;
    let mut m = qasm_forge::frontend(src).unwrap();
    println!("== unoptimized ==\n{}", print_ir(&m));
    let report = run_pipeline(&mut m, &PassConfig::default()).unwrap();
    println!("== optimized ==\n{}", print_ir(&m));
    println!("rounds: {}", report.peephole_rounds);

    // Peephole cases.
    for (label, body) in [
        ("hth", "qubit q; h q[0]; t q[0]; h q[0];"),
        ("xx", "qubit q; x q[0]; x q[0];"),
        ("xxx", "qubit q; x q[0]; x q[0]; x q[0];"),
        ("rxrx", "qubit q; rx(0.3) q[0]; rx(0.4) q[0];"),
        ("z_rz", "qubit q; z q[0]; rz(0.5) q[0];"),
        ("perm", "qubit q[2]; rz(0.25) q[0]; cnot q[0], q[1]; rz(0.5) q[0];"),
        ("unroll", "qubit q[4]; for i in [0:3] { cnot q[i], q[i+1]; }"),
    ] {
        let mut m = qasm_forge::frontend(body).unwrap();
        run_pipeline(&mut m, &PassConfig::default()).unwrap();
        println!("== {label} ==\n{}", print_ir(&m));
    }
}
