//! Abstract syntax tree for the extended OpenQASM 3 subset.

use crate::diag::SourceLocation;

#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub version: Option<String>,
    pub includes: Vec<String>,
    pub stmts: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub loc: SourceLocation,
}

/// Scalar classical type, after typedef desugaring (`int` -> `int[32]`, etc).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarKind {
    Bit,
    Int,
    Float,
    Bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScalarType {
    pub kind: ScalarKind,
    pub width: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Declarator {
    pub name: String,
    /// Array size expression for `bit[20] x` style declarations.
    pub size: Option<Expr>,
    pub init: Option<Expr>,
    pub loc: SourceLocation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QubitDeclarator {
    pub name: String,
    pub size: Option<Expr>,
    pub loc: SourceLocation,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Modifier {
    /// `ctrl @` with its control qubit argument taken from the head of the call's qubit args.
    Ctrl,
    /// `inv @`
    Inv,
    /// `pow(k) @`
    Pow(Expr),
}

/// A qubit-position argument of a gate or subroutine call.
#[derive(Debug, Clone, PartialEq)]
pub enum QubitArg {
    /// Bare register or scalar-qubit name.
    Whole(String, SourceLocation),
    /// `q[expr]`
    Indexed(String, Expr, SourceLocation),
}

impl QubitArg {
    pub fn loc(&self) -> SourceLocation {
        match self {
            QubitArg::Whole(_, l) | QubitArg::Indexed(_, _, l) => *l,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AliasSource {
    /// `reg[start : (step :)? stop]`, inclusive of `stop`.
    Slice {
        reg: String,
        start: Expr,
        step: Option<Expr>,
        stop: Expr,
    },
    /// `reg1 || reg2`
    Concat(String, String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub ty: ScalarType,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QubitParam {
    pub name: String,
    pub size: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    ConstDecl {
        name: String,
        value: Expr,
    },
    QubitDecl(Vec<QubitDeclarator>),
    BitDecl {
        size: Option<Expr>,
        decls: Vec<Declarator>,
    },
    ClassicalDecl {
        ty: ScalarType,
        decls: Vec<Declarator>,
    },
    AliasDecl {
        name: String,
        source: AliasSource,
    },
    SubroutineDef {
        name: String,
        params: Vec<Param>,
        qubit_params: Vec<QubitParam>,
        return_type: Option<ScalarType>,
        body: Vec<Stmt>,
    },
    ExternDecl {
        name: String,
        params: Vec<ScalarType>,
        return_type: Option<ScalarType>,
    },
    GateCall {
        name: String,
        modifiers: Vec<Modifier>,
        params: Vec<Expr>,
        qubit_args: Vec<QubitArg>,
    },
    Measure {
        target: Option<LValue>,
        qubit: QubitArg,
    },
    Reset(QubitArg),
    Assignment {
        target: LValue,
        value: Expr,
    },
    CompoundAssignment {
        target: LValue,
        op: BinOp,
        value: Expr,
    },
    If {
        cond: Expr,
        then_body: Vec<Stmt>,
        else_body: Vec<Stmt>,
    },
    ForRange {
        var: String,
        start: Expr,
        step: Option<Expr>,
        stop: Expr,
        body: Vec<Stmt>,
    },
    ForCStyle {
        init: Box<Stmt>,
        cond: Expr,
        iter: Box<Stmt>,
        body: Vec<Stmt>,
    },
    While {
        cond: Expr,
        body: Vec<Stmt>,
    },
    ComputeAction {
        compute_block: Vec<Stmt>,
        action_block: Vec<Stmt>,
    },
    Return(Option<Expr>),
    Print(Vec<PrintArg>),
    ExpressionStatement(Expr),
}

#[derive(Debug, Clone, PartialEq)]
pub enum PrintArg {
    Str(String),
    Expr(Expr),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LValue {
    pub name: String,
    pub index: Option<Box<Expr>>,
    pub loc: SourceLocation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub loc: SourceLocation,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    IntLit(i64),
    FloatLit(f64),
    Ident(String),
    /// `name[expr]` in expression position (classical array element).
    Index(String, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Unary(UnOp, Box<Expr>),
    /// Call in expression position (extern or classical-result subroutine
    /// with optional trailing qubit args, e.g. `compute(theta) qq`).
    Call {
        name: String,
        params: Vec<Expr>,
        qubit_args: Vec<QubitArg>,
    },
}

impl Expr {
    pub fn int(v: i64, loc: SourceLocation) -> Self {
        Expr {
            kind: ExprKind::IntLit(v),
            loc,
        }
    }
}
