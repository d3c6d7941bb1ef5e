use qasm_forge::driver::{compile_source, CompileOptions};
use qasm_forge::fixtures;
use qasm_forge::runtime::backend::BackendKind;
use qasm_forge::runtime::interp::run_program;
use qasm_forge::runtime::ExecutionConfig;

fn count(src: &str, ccx_cost: u64) -> u64 {
    let artifacts = compile_source(src, &CompileOptions::default()).unwrap();
    let report = run_program(
        &artifacts.lir,
        ExecutionConfig {
            backend: BackendKind::Estimator,
            ccx_cost,
            ..Default::default()
        },
    )
    .unwrap();
    report.stats.controlled_ops_cx_crz
}

fn main() {
    for n in [6usize, 8, 50] {
        let ca_full = count(&fixtures::heisenberg_ctrl(n, false, true), 5);
        let ca_rx = count(&fixtures::heisenberg_ctrl(n, false, false), 5);
        let man_full = count(&fixtures::heisenberg_ctrl(n, true, true), 5);
        let man_rx = count(&fixtures::heisenberg_ctrl(n, true, false), 5);
        let man7_full = count(&fixtures::heisenberg_ctrl(n, true, true), 7);
        let man7_rx = count(&fixtures::heisenberg_ctrl(n, true, false), 7);
        let ca_jz = ca_full - ca_rx;
        let man_jz = man_full - man_rx;
        let man7_jz = man7_full - man7_rx;
        println!(
            "n={n}: CA jz={ca_jz} (want {}), manual jz={man_jz}, ratio={:.3}, manual7 jz={man7_jz} (paper {})",
            300 * (n - 1),
            man_jz as f64 / ca_jz as f64,
            if n == 6 { 7700 } else if n == 50 { 73700 } else { 0 },
        );
    }
}
