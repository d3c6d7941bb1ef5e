use qasm_forge::lower::lower_to_cfg;
use qasm_forge::passes::{run_pipeline, PassConfig};
use qasm_forge::runtime::backend::BackendKind;
use qasm_forge::runtime::interp::run_program;
use qasm_forge::runtime::ExecutionConfig;

fn compile(src: &str, opt: bool) -> qasm_forge::lower::LirModule {
    let mut m = qasm_forge::frontend(src).unwrap();
    if opt {
        run_pipeline(&mut m, &PassConfig::default()).unwrap();
    }
    lower_to_cfg(&m).unwrap()
}

fn main() {
    // Bell state amplitudes.
    let lir = compile("qubit q[2]; h q[0]; cnot q[0], q[1];", true);
    let mut ctx = qasm_forge::runtime::ExecutionContext::new(ExecutionConfig::default());
    qasm_forge::runtime::interp::run_program_with(&lir, &mut ctx).unwrap();
    println!("bell amps: {:?}", ctx.backend().statevector().unwrap());

    // Deuteron end-to-end at O1 on the statevector.
    let deuteron = std::fs::read_to_string("/tmp/deuteron.qasm").unwrap();
    let t0 = std::time::Instant::now();
    let lir = compile(&deuteron, true);
    println!("compile O1: {:?}", t0.elapsed());
    let t0 = std::time::Instant::now();
    let report = run_program(&lir, ExecutionConfig { seed: 7, ..Default::default() }).unwrap();
    println!("run: {:?}", t0.elapsed());
    print!("{}", report.output);
    println!("expected <XX> = sin(0.123) = {}", (0.123f64).sin());
    println!("stats:\n{}", report.stats.to_json());

    // Trotter estimator count at n=50 (O0 keeps loops; runtime streams).
    let trotter = std::fs::read_to_string("/tmp/trotter50.qasm").unwrap();
    let lir = compile(&trotter, true);
    let report = run_program(
        &lir,
        ExecutionConfig { backend: BackendKind::Estimator, ..Default::default() },
    )
    .unwrap();
    println!("trotter n=50 total gates = {} (want 19700)", report.stats.total_gates);
}
