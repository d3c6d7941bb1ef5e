//! Scope-aware symbol tracking, compile-time constant folding, and qubit
//! use-define chain maintenance during IR construction.
//!
//! Name lookup walks from the current scope upward to the nearest match.
//! Qubit registers carry their current array SSA value plus per-element chain
//! tips; each value-semantics gate moves a tip forward via
//! [`SymbolTable::update_qubit_value`].

use crate::ast::{BinOp, Expr, ExprKind, UnOp};
use crate::diag::{Diagnostic, SourceLocation};
use crate::ir::ValueId;
use std::collections::{HashMap, HashSet};

/// A compile-time number with C-like arithmetic semantics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Num {
    Int(i64),
    Float(f64),
}

impl Num {
    pub fn as_f64(&self) -> f64 {
        match self {
            Num::Int(v) => *v as f64,
            Num::Float(v) => *v,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Num::Int(v) => Some(*v),
            Num::Float(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Binding {
    /// `const` symbol with its folded value.
    Const(Num),
    /// Classical memory cell; the element type is tracked by the IR value.
    Cell(ValueId),
    /// A quantum register (or alias) with its root and current array values.
    Qubits(QubitBinding),
    /// An immutable SSA value (loop induction variables, parameters).
    Value(ValueId),
    /// Subroutine or extern name; signature data lives with the builder.
    Callable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QubitBinding {
    pub root: ValueId,
    pub current: ValueId,
    pub size: Option<u64>,
    /// For constant-parameter aliases: how an element index maps onto the
    /// parent register, letting `s[0]` share the chain of `q[1]`.
    pub view: Option<AliasView>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AliasView {
    Slice {
        parent: String,
        start: i64,
        step: i64,
    },
    Concat {
        left: String,
        left_size: u64,
        right: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolInfo {
    pub name: String,
    pub binding: Binding,
    pub is_const: bool,
    pub loc: SourceLocation,
}

/// Where a tracked qubit value sits: a whole register or one element line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum QubitSlot {
    Whole(ValueId),
    Elem(ValueId, i64),
}

#[derive(Debug, Default)]
pub struct SymbolTable {
    scopes: Vec<HashMap<String, SymbolInfo>>,
    /// (register root, const index) -> current chain tip.
    elem_tips: HashMap<(ValueId, i64), ValueId>,
    /// chain tip -> slot, for `update_qubit_value`.
    tip_slots: HashMap<ValueId, QubitSlot>,
    /// Registers whose per-element tracking is disabled in the current
    /// region (a non-constant index extraction was seen).
    disabled: HashSet<ValueId>,
}

impl SymbolTable {
    pub fn new() -> Self {
        let mut t = Self::default();
        t.scopes.push(HashMap::new());
        t
    }

    pub fn depth(&self) -> usize {
        self.scopes.len()
    }

    pub fn enter_scope(&mut self) {
        self.scopes.push(HashMap::new());
    }

    pub fn exit_scope(&mut self) {
        assert!(
            self.scopes.len() > 1,
            "internal error: exit_scope at global scope"
        );
        self.scopes.pop();
    }

    pub fn declare(&mut self, info: SymbolInfo) -> Result<(), Diagnostic> {
        let scope = self.scopes.last_mut().expect("scope stack never empty");
        if scope.contains_key(&info.name) {
            return Err(Diagnostic::error(
                format!("duplicate declaration of `{}` in the same scope", info.name),
                info.loc,
            ));
        }
        scope.insert(info.name.clone(), info);
        Ok(())
    }

    pub fn lookup(&self, name: &str) -> Option<&SymbolInfo> {
        self.scopes.iter().rev().find_map(|s| s.get(name))
    }

    // ---- qubit chain tracking ----

    /// Current chain tip for `(root, index)` if one is cached.
    pub fn elem_tip(&self, root: ValueId, index: i64) -> Option<ValueId> {
        if self.disabled.contains(&root) {
            return None;
        }
        self.elem_tips.get(&(root, index)).copied()
    }

    pub fn set_elem_tip(&mut self, root: ValueId, index: i64, tip: ValueId) {
        if self.disabled.contains(&root) {
            return;
        }
        if let Some(old) = self.elem_tips.insert((root, index), tip) {
            self.tip_slots.remove(&old);
        }
        self.tip_slots.insert(tip, QubitSlot::Elem(root, index));
    }

    /// Register the current whole-array value so broadcast gates can thread it.
    pub fn track_whole(&mut self, root: ValueId, current: ValueId) {
        self.tip_slots.insert(current, QubitSlot::Whole(root));
    }

    /// Replace a consumed qubit (or register) value with the op's fresh
    /// result; future lookups resolve to `new`.
    pub fn update_qubit_value(&mut self, old: ValueId, new: ValueId) {
        let slot = self
            .tip_slots
            .remove(&old)
            .expect("internal error: update_qubit_value on untracked value");
        match slot {
            QubitSlot::Elem(root, idx) => {
                if self.elem_tips.get(&(root, idx)) == Some(&old) {
                    self.elem_tips.insert((root, idx), new);
                }
                self.tip_slots.insert(new, QubitSlot::Elem(root, idx));
            }
            QubitSlot::Whole(root) => {
                self.tip_slots.insert(new, QubitSlot::Whole(root));
                if let Some(binding) = self.find_register_mut(root) {
                    binding.current = new;
                }
                self.invalidate_register(root);
            }
        }
    }

    pub fn is_tracked(&self, v: ValueId) -> bool {
        self.tip_slots.contains_key(&v)
    }

    fn find_register_mut(&mut self, root: ValueId) -> Option<&mut QubitBinding> {
        for scope in self.scopes.iter_mut().rev() {
            for info in scope.values_mut() {
                if let Binding::Qubits(q) = &mut info.binding {
                    if q.root == root {
                        return Some(q);
                    }
                }
            }
        }
        None
    }

    /// Drop every cached element tip of `root` (a broadcast, call, or region
    /// boundary made them stale).
    pub fn invalidate_register(&mut self, root: ValueId) {
        let stale: Vec<(ValueId, i64)> = self
            .elem_tips
            .keys()
            .filter(|(r, _)| *r == root)
            .copied()
            .collect();
        for key in stale {
            if let Some(tip) = self.elem_tips.remove(&key) {
                self.tip_slots.remove(&tip);
            }
        }
    }

    /// Non-constant index extraction: stop per-element tracking for this
    /// register within the enclosing region.
    pub fn disable_tracking(&mut self, root: ValueId) {
        self.invalidate_register(root);
        self.disabled.insert(root);
    }

    /// Snapshot and clear element state when entering a nested region; the
    /// returned state is restored on exit. Registers visible from enclosing
    /// scopes stay tracked at their current whole-array values so broadcast
    /// gates thread inside the region; those bindings are reset on restore
    /// because region-local values must not escape.
    pub fn save_and_reset_qubit_state(&mut self) -> QubitStateSnapshot {
        let snap = QubitStateSnapshot {
            elem_tips: std::mem::take(&mut self.elem_tips),
            tip_slots: std::mem::take(&mut self.tip_slots),
            disabled: std::mem::take(&mut self.disabled),
            bindings: self.collect_register_bindings(),
        };
        for (_, _, q) in &snap.bindings {
            self.tip_slots.insert(q.current, QubitSlot::Whole(q.root));
        }
        snap
    }

    pub fn restore_qubit_state(&mut self, snap: QubitStateSnapshot) {
        self.elem_tips = snap.elem_tips;
        self.tip_slots = snap.tip_slots;
        self.disabled = snap.disabled;
        for (scope, name, binding) in snap.bindings {
            if let Some(info) = self.scopes.get_mut(scope).and_then(|s| s.get_mut(&name)) {
                info.binding = Binding::Qubits(binding);
            }
        }
    }

    fn collect_register_bindings(&self) -> Vec<(usize, String, QubitBinding)> {
        let mut out = Vec::new();
        for (i, scope) in self.scopes.iter().enumerate() {
            for (name, info) in scope {
                if let Binding::Qubits(q) = &info.binding {
                    out.push((i, name.clone(), q.clone()));
                }
            }
        }
        out
    }

    // ---- constant expressions ----

    /// Evaluate `expr` over literals, `pi`, and const symbols. Returns
    /// `Ok(None)` when any leaf is non-constant; division by zero and
    /// integer overflow are diagnostics.
    pub fn eval_const_expr(&self, expr: &Expr) -> Result<Option<Num>, Diagnostic> {
        eval_const(expr, &|name| match self.lookup(name) {
            Some(SymbolInfo {
                binding: Binding::Const(v),
                ..
            }) => Some(*v),
            _ => None,
        })
    }
}

pub struct QubitStateSnapshot {
    elem_tips: HashMap<(ValueId, i64), ValueId>,
    tip_slots: HashMap<ValueId, QubitSlot>,
    disabled: HashSet<ValueId>,
    bindings: Vec<(usize, String, QubitBinding)>,
}

/// Constant folding over the expression grammar, parameterized by the const
/// symbol environment.
pub fn eval_const(
    expr: &Expr,
    env: &dyn Fn(&str) -> Option<Num>,
) -> Result<Option<Num>, Diagnostic> {
    let loc = expr.loc;
    match &expr.kind {
        ExprKind::IntLit(v) => Ok(Some(Num::Int(*v))),
        ExprKind::FloatLit(v) => Ok(Some(Num::Float(*v))),
        ExprKind::Ident(name) => {
            if name == "pi" {
                Ok(Some(Num::Float(std::f64::consts::PI)))
            } else {
                Ok(env(name))
            }
        }
        ExprKind::Unary(op, inner) => {
            let Some(v) = eval_const(inner, env)? else {
                return Ok(None);
            };
            Ok(Some(match (op, v) {
                (UnOp::Neg, Num::Int(x)) => Num::Int(x.checked_neg().ok_or_else(|| {
                    Diagnostic::error("constant integer overflow", loc)
                })?),
                (UnOp::Neg, Num::Float(x)) => Num::Float(-x),
                (UnOp::Not, Num::Int(x)) => Num::Int((x == 0) as i64),
                (UnOp::Not, Num::Float(x)) => Num::Int((x == 0.0) as i64),
            }))
        }
        ExprKind::Binary(op, lhs, rhs) => {
            let Some(a) = eval_const(lhs, env)? else {
                return Ok(None);
            };
            let Some(b) = eval_const(rhs, env)? else {
                return Ok(None);
            };
            apply_const_binop(*op, a, b, loc).map(Some)
        }
        ExprKind::Index(..) | ExprKind::Call { .. } => Ok(None),
    }
}

fn apply_const_binop(op: BinOp, a: Num, b: Num, loc: SourceLocation) -> Result<Num, Diagnostic> {
    use Num::{Float, Int};
    let overflow = || Diagnostic::error("constant integer overflow", loc);
    let div_zero = || Diagnostic::error("division by zero in constant expression", loc);
    match (a, b) {
        (Int(x), Int(y)) => Ok(match op {
            BinOp::Add => Int(x.checked_add(y).ok_or_else(overflow)?),
            BinOp::Sub => Int(x.checked_sub(y).ok_or_else(overflow)?),
            BinOp::Mul => Int(x.checked_mul(y).ok_or_else(overflow)?),
            BinOp::Div => {
                if y == 0 {
                    return Err(div_zero());
                }
                Int(x.checked_div(y).ok_or_else(overflow)?)
            }
            BinOp::Rem => {
                if y == 0 {
                    return Err(div_zero());
                }
                Int(x.checked_rem(y).ok_or_else(overflow)?)
            }
            BinOp::Eq => Int((x == y) as i64),
            BinOp::Ne => Int((x != y) as i64),
            BinOp::Lt => Int((x < y) as i64),
            BinOp::Le => Int((x <= y) as i64),
            BinOp::Gt => Int((x > y) as i64),
            BinOp::Ge => Int((x >= y) as i64),
            BinOp::And => Int((x != 0 && y != 0) as i64),
            BinOp::Or => Int((x != 0 || y != 0) as i64),
        }),
        _ => {
            let (x, y) = (a.as_f64(), b.as_f64());
            Ok(match op {
                BinOp::Add => Float(x + y),
                BinOp::Sub => Float(x - y),
                BinOp::Mul => Float(x * y),
                BinOp::Div => {
                    if y == 0.0 {
                        return Err(div_zero());
                    }
                    Float(x / y)
                }
                BinOp::Rem => {
                    if y == 0.0 {
                        return Err(div_zero());
                    }
                    Float(x % y)
                }
                BinOp::Eq => Int((x == y) as i64),
                BinOp::Ne => Int((x != y) as i64),
                BinOp::Lt => Int((x < y) as i64),
                BinOp::Le => Int((x <= y) as i64),
                BinOp::Gt => Int((x > y) as i64),
                BinOp::Ge => Int((x >= y) as i64),
                BinOp::And => Int((x != 0.0 && y != 0.0) as i64),
                BinOp::Or => Int((x != 0.0 || y != 0.0) as i64),
            })
        }
    }
}

/// Fold an expression that must be a compile-time constant integer.
pub fn expect_const_int(
    table: &SymbolTable,
    expr: &Expr,
    what: &str,
) -> Result<i64, Diagnostic> {
    match table.eval_const_expr(expr)? {
        Some(Num::Int(v)) => Ok(v),
        Some(Num::Float(_)) => Err(Diagnostic::error(
            format!("{what} must be an integer"),
            expr.loc,
        )),
        None => Err(Diagnostic::error(
            format!("{what} must be a compile-time constant"),
            expr.loc,
        )),
    }
}
