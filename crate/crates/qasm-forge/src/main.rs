//! Command-line compiler driver.

use clap::Parser;
use qasm_forge::driver::{
    bench_csv, bench_trotter, compile_source, CompileOptions, OptLevel,
};
use qasm_forge::ir::print::print_ir;
use qasm_forge::lower::emit_text;
use qasm_forge::runtime::backend::BackendKind;
use qasm_forge::runtime::interp::run_program;
use qasm_forge::runtime::ExecutionConfig;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "qasm-forge",
    about = "Optimizing ahead-of-time compiler for gate-based OpenQASM 3",
    disable_version_flag = true
)]
struct Cli {
    /// Input .qasm file.
    file: Option<String>,

    /// Emit a compilation stage instead of running.
    #[arg(long, value_parser = ["ast", "ir", "ir-opt", "lowered"])]
    emit: Option<String>,

    /// Optimization level: -O0 (none) or -O1 (full pipeline).
    #[arg(short = 'O', value_parser = ["0", "1"], default_value = "1")]
    opt: String,

    /// Execution backend.
    #[arg(long, default_value = "statevector", value_parser = ["estimator", "statevector"])]
    backend: String,

    /// Whole-program repetitions.
    #[arg(long, default_value_t = 1)]
    shots: u64,

    /// Random seed for the statevector backend.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Statevector qubit cap.
    #[arg(long, default_value_t = 22)]
    qubit_cap: usize,

    /// Counted controlled-op cost per synthesized Toffoli.
    #[arg(long, default_value_t = 5)]
    ccx_cost: u64,

    /// Run only the named passes (comma separated), e.g.
    /// `--pass=identity-pairs,dce`.
    #[arg(long, value_delimiter = ',')]
    pass: Option<Vec<String>>,

    /// Benchmark compile time of the Trotter fixture for the given qubit
    /// counts (comma separated); prints CSV.
    #[arg(long, value_delimiter = ',')]
    bench_trotter: Option<Vec<usize>>,

    /// Repetitions per benchmark point.
    #[arg(long, default_value_t = 5)]
    bench_reps: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if let Some(ns) = &cli.bench_trotter {
        return match bench_trotter(ns, cli.bench_reps) {
            Ok(rows) => {
                print!("{}", bench_csv(&rows));
                ExitCode::SUCCESS
            }
            Err(diags) => {
                for d in diags {
                    eprintln!("<trotter>:{}", d.render());
                }
                ExitCode::from(1)
            }
        };
    }

    let Some(file) = &cli.file else {
        eprintln!("error: missing input file (see --help)");
        return ExitCode::from(1);
    };
    let source = match std::fs::read_to_string(file) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{file}: error: {e}");
            return ExitCode::from(1);
        }
    };

    let opts = CompileOptions {
        opt: if cli.opt == "0" {
            OptLevel::O0
        } else {
            OptLevel::O1
        },
        pass_list: cli.pass.clone(),
    };
    let artifacts = match compile_source(&source, &opts) {
        Ok(a) => a,
        Err(diags) => {
            for d in diags {
                eprintln!("{file}:{}", d.render());
            }
            return ExitCode::from(1);
        }
    };

    match cli.emit.as_deref() {
        Some("ast") => {
            println!("{:#?}", artifacts.ast);
            return ExitCode::SUCCESS;
        }
        Some("ir") => {
            print!("{}", print_ir(&artifacts.ir));
            return ExitCode::SUCCESS;
        }
        Some("ir-opt") => {
            print!("{}", print_ir(&artifacts.opt_ir));
            return ExitCode::SUCCESS;
        }
        Some("lowered") => {
            print!("{}", emit_text(&artifacts.lir));
            return ExitCode::SUCCESS;
        }
        _ => {}
    }

    let exec = ExecutionConfig {
        backend: cli.backend.parse::<BackendKind>().expect("validated by clap"),
        shots: cli.shots.max(1),
        seed: cli.seed,
        qubit_cap: cli.qubit_cap,
        ccx_cost: cli.ccx_cost,
    };
    match run_program(&artifacts.lir, exec) {
        Ok(report) => {
            print!("{}", report.output);
            println!("{}", report.stats.to_json());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{file}: runtime error: {e}");
            ExitCode::from(2)
        }
    }
}
