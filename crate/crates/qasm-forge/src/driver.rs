//! Compiler driver: source -> AST -> IR -> optimized IR -> lowered module,
//! plus execution and the compile-time benchmark harness.

use crate::diag::Diagnostic;
use crate::ir::{self, IrModule};
use crate::lower::{self, LirModule};
use crate::passes::{self, PassConfig};
use crate::runtime::interp::{run_program, RunReport};
use crate::runtime::{ExecutionConfig, RuntimeError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OptLevel {
    O0,
    #[default]
    O1,
}

#[derive(Debug, Clone, Default)]
pub struct CompileOptions {
    pub opt: OptLevel,
    /// Explicit pass list (overrides the default pipeline at any level).
    pub pass_list: Option<Vec<String>>,
}

pub struct Artifacts {
    pub ast: crate::ast::Program,
    /// IR as built (pre-optimization).
    pub ir: IrModule,
    /// IR after the selected pipeline.
    pub opt_ir: IrModule,
    pub lir: LirModule,
}

pub fn compile_source(source: &str, opts: &CompileOptions) -> Result<Artifacts, Vec<Diagnostic>> {
    let tokens = crate::lexer::tokenize(source).map_err(|d| vec![d])?;
    let ast = crate::parser::parse(tokens)?;
    let ir = ir::build::build_module(&ast)?;
    let build_diags = ir::verify::verify(&ir);
    if !build_diags.is_empty() {
        let mut all = vec![Diagnostic::error_nowhere(
            "internal error: built module failed verification",
        )];
        all.extend(build_diags);
        return Err(all);
    }
    let mut opt_ir = ir.clone();
    let run_passes = opts.pass_list.is_some() || opts.opt == OptLevel::O1;
    if run_passes {
        let config = PassConfig {
            enabled: opts.pass_list.clone(),
            ..PassConfig::default()
        };
        passes::run_pipeline(&mut opt_ir, &config)?;
    }
    let lir = lower::lower_to_cfg(&opt_ir).map_err(|d| vec![d])?;
    Ok(Artifacts {
        ast,
        ir,
        opt_ir,
        lir,
    })
}

/// Compile and execute in one step.
pub fn compile_and_run(
    source: &str,
    opts: &CompileOptions,
    exec: ExecutionConfig,
) -> Result<Result<RunReport, RuntimeError>, Vec<Diagnostic>> {
    let artifacts = compile_source(source, opts)?;
    Ok(run_program(&artifacts.lir, exec))
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub n: usize,
    pub mean_s: f64,
    pub std_s: f64,
}

/// Wall-clock compile time (parse through lowering, default -O1) of the
/// Trotter benchmark per qubit count, averaged over `reps` runs.
pub fn bench_trotter(ns: &[usize], reps: usize) -> Result<Vec<BenchRow>, Vec<Diagnostic>> {
    let opts = CompileOptions::default();
    let mut rows = Vec::new();
    for &n in ns {
        let source = crate::fixtures::trotter(n);
        // Warm-up run outside the timed set.
        compile_source(&source, &opts)?;
        let mut samples = Vec::with_capacity(reps.max(1));
        for _ in 0..reps.max(1) {
            let t0 = std::time::Instant::now();
            compile_source(&source, &opts)?;
            samples.push(t0.elapsed().as_secs_f64());
        }
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        let std = if samples.len() > 1 {
            (samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>()
                / (samples.len() - 1) as f64)
                .sqrt()
        } else {
            0.0
        };
        rows.push(BenchRow {
            n,
            mean_s: mean,
            std_s: std,
        });
    }
    Ok(rows)
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("n,mean_s,std_s\n");
    for r in rows {
        out.push_str(&format!("{},{:.6},{:.6}\n", r.n, r.mean_s, r.std_s));
    }
    out
}
