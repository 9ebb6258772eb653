use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
    Lint,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::Lint => "lint",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub span: Span,
    pub message: String,
}

impl Diagnostic {
    pub fn error(span: Span, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Error, span, message: message.into() }
    }

    pub fn warning(span: Span, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Warning, span, message: message.into() }
    }

    pub fn lint(span: Span, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Lint, span, message: message.into() }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.span, self.severity, self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnOp {
    Neg,
    Not,
    BitNot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Pow,
    Shl,
    Shr,
    BitAnd,
    BitOr,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    pub fn is_comparison(self) -> bool {
        matches!(self, BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge)
    }

    pub fn is_logical(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Int(i64),
    Real(f64),
    Bool(bool),
    Var(String, Span),
    Index(String, Box<Expr>, Span),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(String, Vec<Expr>, Span),
}

impl Expr {
    /// First source position inside the expression, if any.
    pub fn span(&self) -> Option<Span> {
        match self {
            Expr::Var(_, s) | Expr::Index(_, _, s) | Expr::Call(_, _, s) => Some(*s),
            Expr::Unary(_, e) => e.span(),
            Expr::Binary(_, a, b) => a.span().or_else(|| b.span()),
            _ => None,
        }
    }
}

/// Which elements of a register an operand names. Slice bounds are inclusive.
#[derive(Debug, Clone, PartialEq)]
pub enum Selector {
    All,
    Index(Expr),
    Slice(Option<Expr>, Option<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Operand {
    pub name: String,
    pub sel: Selector,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Modifier {
    Ctrl(Expr),
    NegCtrl(Expr),
    Inv,
    Pow(Expr),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateCall {
    pub name: String,
    pub modifiers: Vec<Modifier>,
    pub params: Vec<Expr>,
    pub operands: Vec<Operand>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateDef {
    pub name: String,
    pub params: Vec<String>,
    pub qargs: Vec<String>,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassicalType {
    Int,
    Angle,
    Float,
    Bool,
}

impl fmt::Display for ClassicalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassicalType::Int => "int",
            ClassicalType::Angle => "angle",
            ClassicalType::Float => "float",
            ClassicalType::Bool => "bool",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssignOp {
    Set,
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq)]
pub enum QInitData {
    Register(String, Span),
    Literal(Vec<bool>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    QubitDecl { name: String, size: usize },
    /// `init` holds the literal after zero-padding.
    BitDecl { name: String, size: usize, init: Option<Vec<bool>>, init_expr: Option<Expr> },
    ClassicalDecl { ty: ClassicalType, name: String, init: Option<Expr> },
    GateDef(GateDef),
    Gate(GateCall),
    Measure { src: Operand, dst: Option<Operand> },
    Reset(Operand),
    Barrier,
    Assign { name: String, index: Option<Expr>, op: AssignOp, value: Expr },
    If { cond: Expr, then_body: Vec<Stmt>, else_body: Vec<Stmt> },
    For { var: String, start: Expr, step: Option<Expr>, end: Expr, body: Vec<Stmt> },
    While { cond: Expr, body: Vec<Stmt> },
    Mem { size: usize },
    Load { target: Operand, addr: Expr },
    Store { addr: Expr, source: Operand },
    MReset { addr: Option<Expr> },
    QramDecl { name: String, addr_len: usize, word_len: usize },
    QInit { name: String, data: QInitData },
    /// `alias` marks the `ldqram name addr bus` spelling.
    QLoad { name: String, bus: Operand, addr: Operand, alias: bool },
    BufferDecl { name: String, capacity: usize },
    BufferWrite { name: String, qubit: Operand, flag: Option<Operand> },
    BufferRead { name: String, qubit: Operand, flag: Option<Operand> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Program {
    pub version: Option<String>,
    pub body: Vec<Stmt>,
    /// Warnings and lints raised while parsing.
    pub diagnostics: Vec<Diagnostic>,
}

impl Program {
    pub fn warnings(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.severity == Severity::Warning)
    }

    /// Visits every statement, depth first, including gate bodies.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Stmt)) {
        fn go<'a>(stmts: &'a [Stmt], f: &mut impl FnMut(&'a Stmt)) {
            for s in stmts {
                f(s);
                match &s.kind {
                    StmtKind::If { then_body, else_body, .. } => {
                        go(then_body, f);
                        go(else_body, f);
                    }
                    StmtKind::For { body, .. } | StmtKind::While { body, .. } => go(body, f),
                    StmtKind::GateDef(g) => go(&g.body, f),
                    _ => {}
                }
            }
        }
        go(&self.body, f)
    }
}
