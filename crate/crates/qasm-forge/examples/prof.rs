use qasm_forge::passes::*;
use std::time::Instant;

fn main() {
    let src = std::fs::read_to_string("/tmp/deuteron.qasm").unwrap();
    let mut m = qasm_forge::frontend(&src).unwrap();
    let config = PassConfig::default();
    for name in ["inline", "unroll", "constant-propagation"] {
        let t = Instant::now();
        run_named_pass(&mut m, name, &config).unwrap();
        println!("{name}: {:?} ({} ops)", t.elapsed(), m.total_ops());
    }
    for round in 0..3 {
        for name in PEEPHOLE_PASSES {
            let t = Instant::now();
            let changed = run_named_pass(&mut m, name, &config).unwrap();
            println!("r{round} {name}: {:?} changed={changed}", t.elapsed());
        }
    }
    let t = Instant::now();
    run_named_pass(&mut m, "dce", &config).unwrap();
    println!("dce: {:?} ({} ops)", t.elapsed(), m.total_ops());
}
