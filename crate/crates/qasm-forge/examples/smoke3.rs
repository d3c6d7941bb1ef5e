use qasm_forge::lower::{check_region_pairing, emit_text, lower_to_cfg};
use qasm_forge::passes::{run_pipeline, PassConfig};

fn main() {
    let ghz = r#"
OPENQASM 3;
include "stdgates.inc";
qubit q[3];
h q[0];
cnot q[0], q[1];
cnot q[1], q[2];
"#;
    let mut m = qasm_forge::frontend(ghz).unwrap();
    run_pipeline(&mut m, &PassConfig::default()).unwrap();
    let lir = lower_to_cfg(&m).unwrap();
    check_region_pairing(&lir).unwrap();
    println!("{}", emit_text(&lir));

    let modifiers = r#"
qubit q[2];
inv @ phase(pi) q[0];
ctrl @ x q[0], q[1];
pow(3) @ s q[1];
"#;
    let mut m = qasm_forge::frontend(modifiers).unwrap();
    run_pipeline(&mut m, &PassConfig::default()).unwrap();
    let lir = lower_to_cfg(&m).unwrap();
    check_region_pairing(&lir).unwrap();
    println!("{}", emit_text(&lir));
}
