fn main() {
    let src = r#"
OPENQASM 3;
include "stdgates.inc";
qubit q[3];
h q[0];
cnot q[0], q[1];
cnot q[1], q[2];
"#;
    let m = qasm_forge::frontend(src).unwrap();
    println!("{}", qasm_forge::ir::print::print_ir(&m));
    let diags = qasm_forge::ir::verify::verify(&m);
    println!("verify: {diags:?}");
    let text = qasm_forge::ir::print::print_ir(&m);
    let m2 = qasm_forge::ir::parse::parse_ir(&text).unwrap();
    let text2 = qasm_forge::ir::print::print_ir(&m2);
    assert_eq!(text, text2, "round trip");
    println!("round-trip OK");

    let deuteron = r#"
OPENQASM 3;
include "stdgates.inc";

const shots = 1024;
def ansatz(float[64]:theta) qubit[2]:q {
    x q[0];
    ry(theta) q[1];
    cx q[1], q[0];
}

def compute(float[64]:theta) qubit[2]:q -> float[64] {
    bit first, second;
    float[64] num_parity_ones = 0.0;
    float[64] result;
    for i in [0:shots] {
        ansatz(theta) q;
        h q;
        first = measure q[0];
        second = measure q[1];
        if (first != second) {
            num_parity_ones += 1.0;
        }
        reset q;
    }
    result = (shots - num_parity_ones) / shots - num_parity_ones / shots;
    return result;
}

float[64] theta, exp_val;
qubit qq[2];
theta = 0.123;
exp_val = compute(theta) qq;
print("Avg <X0X1> = ", exp_val);
"#;
    match qasm_forge::frontend(deuteron) {
        Ok(m) => {
            let d = qasm_forge::ir::verify::verify(&m);
            println!("deuteron verify: {} diags", d.len());
            for x in &d { println!("  {x}"); }
            let t = qasm_forge::ir::print::print_ir(&m);
            let m2 = qasm_forge::ir::parse::parse_ir(&t).expect("reparse");
            assert_eq!(t, qasm_forge::ir::print::print_ir(&m2));
            println!("deuteron round-trip OK, {} chars", t.len());
            println!("{}", &t);
        }
        Err(ds) => {
            for d in ds { println!("DIAG: {d}"); }
            panic!("deuteron failed");
        }
    }
}
