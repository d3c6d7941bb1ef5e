//! Textual IR emission. One op per line; values renumber densely per
//! function, so two structurally identical modules print identically.
//!
//! The grammar is documented in the README ("Textual IR format").

use super::*;
use std::collections::HashMap;
use std::fmt::Write;

pub fn print_ir(module: &IrModule) -> String {
    let mut out = String::new();
    out.push_str("module {\n");
    for (name, val) in &module.globals {
        match val {
            ConstValue::Int(v) => {
                let _ = writeln!(out, "  global @{name} = {v} : i64");
            }
            ConstValue::Float(v) => {
                let _ = writeln!(out, "  global @{name} = {v:?} : f64");
            }
            ConstValue::Bool(v) => {
                let _ = writeln!(out, "  global @{name} = {v} : i1");
            }
            ConstValue::Index(v) => {
                let _ = writeln!(out, "  global @{name} = {v} : index");
            }
        }
    }
    for func in &module.functions {
        print_function(module, func, &mut out);
    }
    out.push_str("}\n");
    out
}

pub fn type_text(ty: &SemType) -> String {
    match ty {
        SemType::Qubit => "!q.qubit".into(),
        SemType::QubitArray(Some(n)) => format!("!q.array<{n}>"),
        SemType::QubitArray(None) => "!q.array<?>".into(),
        SemType::Bool => "i1".into(),
        SemType::Int(w) => format!("i{w}"),
        SemType::Float(w) => format!("f{w}"),
        SemType::Index => "index".into(),
        SemType::Cell(elem, size) => match size {
            Some(n) => format!("memref<{n}x{}>", type_text(elem)),
            None => format!("memref<{}>", type_text(elem)),
        },
        SemType::Result => "!q.result".into(),
    }
}

struct Namer {
    names: HashMap<ValueId, String>,
    next_result: u32,
    next_arg: u32,
}

impl Namer {
    fn name(&self, v: ValueId) -> String {
        self.names
            .get(&v)
            .cloned()
            .unwrap_or_else(|| format!("%<unknown:{}>", v.0))
    }

    fn define_result(&mut self, v: ValueId) -> String {
        let n = format!("%{}", self.next_result);
        self.next_result += 1;
        self.names.insert(v, n.clone());
        n
    }

    fn define_arg(&mut self, v: ValueId) -> String {
        let n = format!("%arg{}", self.next_arg);
        self.next_arg += 1;
        self.names.insert(v, n.clone());
        n
    }
}

fn print_function(module: &IrModule, func: &FunctionDef, out: &mut String) {
    match func.entry {
        None => {
            let params: Vec<String> = func.param_types.iter().map(type_text).collect();
            let _ = write!(out, "  func private @{}({})", func.name, params.join(", "));
            if !func.result_types.is_empty() {
                let results: Vec<String> = func.result_types.iter().map(type_text).collect();
                let _ = write!(out, " -> {}", results.join(", "));
            }
            out.push('\n');
        }
        Some(entry) => {
            let mut namer = Namer {
                names: HashMap::new(),
                next_result: 0,
                next_arg: 0,
            };
            let args = module.block(entry).args.clone();
            let params: Vec<String> = args
                .iter()
                .map(|a| {
                    let n = namer.define_arg(*a);
                    format!("{n}: {}", type_text(module.value_ty(*a)))
                })
                .collect();
            let _ = write!(out, "  func @{}({})", func.name, params.join(", "));
            if !func.result_types.is_empty() {
                let results: Vec<String> = func.result_types.iter().map(type_text).collect();
                let _ = write!(out, " -> {}", results.join(", "));
            }
            out.push_str(" {\n");
            print_block(module, entry, &mut namer, 2, out);
            out.push_str("  }\n");
        }
    }
}

fn print_block(module: &IrModule, block: BlockId, namer: &mut Namer, depth: usize, out: &mut String) {
    for &op_id in &module.block(block).ops {
        print_op(module, op_id, namer, depth, out);
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', "\\n")
}

fn print_op(module: &IrModule, op_id: OpId, namer: &mut Namer, depth: usize, out: &mut String) {
    let indent = "  ".repeat(depth);
    let op = module.op(op_id);
    let operand = |namer: &Namer, i: usize| namer.name(op.operands[i]);
    let result_types = |op: &Op| -> String {
        op.results
            .iter()
            .map(|r| type_text(module.value_ty(*r)))
            .collect::<Vec<_>>()
            .join(", ")
    };

    // Result name list is assigned before rendering so operands of nested
    // regions can refer to them.
    let results: Vec<String> = op.results.iter().map(|r| namer.define_result(*r)).collect();
    let lhs = if results.is_empty() {
        String::new()
    } else {
        format!("{} = ", results.join(", "))
    };

    let seg = match op.segment {
        Segment::None => "",
        Segment::Compute => " #compute",
        Segment::Uncompute => " #uncompute",
    };

    match &op.kind {
        OpKind::QAlloc { size } => {
            let _ = writeln!(out, "{indent}{lhs}q.alloc {{size = {size}}} : {}", result_types(op));
        }
        OpKind::QDealloc => {
            let _ = writeln!(out, "{indent}q.dealloc {}", operand(namer, 0));
        }
        OpKind::Extract { index } => {
            let idx = match index {
                Some(i) => i.to_string(),
                None => operand(namer, 1),
            };
            let _ = writeln!(
                out,
                "{indent}{lhs}q.extract {}[{idx}] : !q.qubit{seg}",
                operand(namer, 0)
            );
        }
        OpKind::Gate { name, angles } => {
            let params = match angles {
                Some(a) => {
                    if a.is_empty() {
                        String::new()
                    } else {
                        let vals: Vec<String> = a.iter().map(|v| format!("{v:?}")).collect();
                        format!("({})", vals.join(", "))
                    }
                }
                None => {
                    let n = module.gate_param_operands(op);
                    if n == 0 {
                        String::new()
                    } else {
                        let vals: Vec<String> = (0..n).map(|i| operand(namer, i)).collect();
                        format!("({})", vals.join(", "))
                    }
                }
            };
            let qubits: Vec<String> = (module.gate_param_operands(op)..op.operands.len())
                .map(|i| operand(namer, i))
                .collect();
            let _ = writeln!(
                out,
                "{indent}{lhs}qvs.{name}{params} {} : {}{seg}",
                qubits.join(", "),
                result_types(op)
            );
        }
        OpKind::Measure => {
            let _ = writeln!(
                out,
                "{indent}{lhs}q.measure {} : {}",
                operand(namer, 0),
                result_types(op)
            );
        }
        OpKind::Reset => {
            let _ = writeln!(
                out,
                "{indent}{lhs}q.reset {} : {}{seg}",
                operand(namer, 0),
                result_types(op)
            );
        }
        OpKind::Slice { start, step, stop } => {
            let _ = writeln!(
                out,
                "{indent}{lhs}q.slice {}[{start}:{step}:{stop}] : {}",
                operand(namer, 0),
                result_types(op)
            );
        }
        OpKind::Concat => {
            let _ = writeln!(
                out,
                "{indent}{lhs}q.concat {}, {} : {}",
                operand(namer, 0),
                operand(namer, 1),
                result_types(op)
            );
        }
        OpKind::CtrlRegion => {
            let _ = writeln!(out, "{indent}q.ctrl_region({}) {{", operand(namer, 0));
            print_block(module, op.regions[0], namer, depth + 1, out);
            let _ = writeln!(out, "{indent}}}");
        }
        OpKind::AdjRegion => {
            let _ = writeln!(out, "{indent}q.adj_region {{");
            print_block(module, op.regions[0], namer, depth + 1, out);
            let _ = writeln!(out, "{indent}}}");
        }
        OpKind::PowRegion { power } => {
            let k = match power {
                Some(k) => k.to_string(),
                None => operand(namer, 0),
            };
            let _ = writeln!(out, "{indent}q.pow_region({k}) {{");
            print_block(module, op.regions[0], namer, depth + 1, out);
            let _ = writeln!(out, "{indent}}}");
        }
        OpKind::Constant(c) => {
            let text = match c {
                ConstValue::Int(v) => format!("{v} : i64"),
                ConstValue::Float(v) => format!("{v:?} : f64"),
                ConstValue::Bool(v) => format!("{v} : i1"),
                ConstValue::Index(v) => format!("{v} : index"),
            };
            let _ = writeln!(out, "{indent}{lhs}constant {text}");
        }
        OpKind::GetGlobal { name } => {
            let _ = writeln!(out, "{indent}{lhs}get_global @{name} : {}", result_types(op));
        }
        OpKind::CellAlloc { .. } => {
            let _ = writeln!(out, "{indent}{lhs}cell : {}", result_types(op));
        }
        OpKind::Load => {
            let idx = if op.operands.len() > 1 {
                format!("[{}]", operand(namer, 1))
            } else {
                String::new()
            };
            let _ = writeln!(
                out,
                "{indent}{lhs}load {}{idx} : {}",
                operand(namer, 0),
                result_types(op)
            );
        }
        OpKind::Store => {
            let idx = if op.operands.len() > 2 {
                format!("[{}]", operand(namer, 2))
            } else {
                String::new()
            };
            let _ = writeln!(
                out,
                "{indent}store {}, {}{idx}",
                operand(namer, 0),
                operand(namer, 1)
            );
        }
        OpKind::Arith(kind) => {
            let args: Vec<String> = (0..op.operands.len()).map(|i| operand(namer, i)).collect();
            let _ = writeln!(
                out,
                "{indent}{lhs}{} {} : {}",
                kind.name(),
                args.join(", "),
                result_types(op)
            );
        }
        OpKind::Cmp { pred, float } => {
            let name = if *float { "cmpf" } else { "cmpi" };
            let _ = writeln!(
                out,
                "{indent}{lhs}{name} {}, {}, {} : i1",
                pred.name(*float),
                operand(namer, 0),
                operand(namer, 1)
            );
        }
        OpKind::Cast(kind) => {
            let name = match kind {
                CastKind::SiToFp => "sitofp",
                CastKind::IndexCast => "index_cast",
            };
            let _ = writeln!(
                out,
                "{indent}{lhs}{name} {} : {}",
                operand(namer, 0),
                result_types(op)
            );
        }
        OpKind::If => {
            let _ = writeln!(out, "{indent}scf.if {} {{", operand(namer, 0));
            print_block(module, op.regions[0], namer, depth + 1, out);
            let else_block = op.regions[1];
            if !module.block(else_block).ops.is_empty() {
                let _ = writeln!(out, "{indent}}} else {{");
                print_block(module, else_block, namer, depth + 1, out);
            }
            let _ = writeln!(out, "{indent}}}");
        }
        OpKind::For { lower, upper, step } => {
            let mut slot = 0usize;
            let mut bound_text = |b: &Bound| match b {
                Bound::Const(v) => v.to_string(),
                Bound::Value => {
                    let s = operand(namer, slot);
                    slot += 1;
                    s
                }
            };
            let lo = bound_text(lower);
            let hi = bound_text(upper);
            let body = op.regions[0];
            let iv = module.block(body).args[0];
            let iv_name = namer.define_arg(iv);
            let _ = writeln!(
                out,
                "{indent}affine.for {iv_name} = {lo} to {hi} step {step} {{{seg}"
            );
            print_block(module, body, namer, depth + 1, out);
            let _ = writeln!(out, "{indent}}}");
        }
        OpKind::While => {
            let _ = writeln!(out, "{indent}scf.while {{");
            print_block(module, op.regions[0], namer, depth + 1, out);
            let _ = writeln!(out, "{indent}}} do {{");
            print_block(module, op.regions[1], namer, depth + 1, out);
            let _ = writeln!(out, "{indent}}}");
        }
        OpKind::Yield => {
            let _ = writeln!(out, "{indent}yield {}", operand(namer, 0));
        }
        OpKind::Call { callee } => {
            let args: Vec<String> = (0..op.operands.len()).map(|i| operand(namer, i)).collect();
            if op.results.is_empty() {
                let _ = writeln!(out, "{indent}call @{callee}({})", args.join(", "));
            } else {
                let _ = writeln!(
                    out,
                    "{indent}{lhs}call @{callee}({}) : {}",
                    args.join(", "),
                    result_types(op)
                );
            }
        }
        OpKind::Return => {
            if op.operands.is_empty() {
                let _ = writeln!(out, "{indent}return");
            } else {
                let args: Vec<String> = (0..op.operands.len()).map(|i| operand(namer, i)).collect();
                let types: Vec<String> = op
                    .operands
                    .iter()
                    .map(|v| type_text(module.value_ty(*v)))
                    .collect();
                let _ = writeln!(out, "{indent}return {} : {}", args.join(", "), types.join(", "));
            }
        }
        OpKind::Print { pieces } => {
            let mut parts = Vec::new();
            for piece in pieces {
                match piece {
                    PrintPiece::Str(s) => parts.push(format!("\"{}\"", escape(s))),
                    PrintPiece::Arg(i) => parts.push(operand(namer, *i)),
                }
            }
            let _ = writeln!(out, "{indent}print({})", parts.join(", "));
        }
    }
}
