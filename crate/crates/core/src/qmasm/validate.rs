use std::collections::HashMap;

use super::ast::*;
use super::gates::builtin_shape;
use super::parser::const_int;

/// Largest QRAM address length accepted by the validator.
pub const MAX_QRAM_ADDR_LEN: usize = 20;

const MATH_FUNCS: &[&str] = &["sin", "cos", "tan", "arcsin", "arccos", "arctan", "exp", "ln", "sqrt"];

#[derive(Debug, Clone, PartialEq)]
enum Sym {
    Qubits(usize),
    Bits(usize),
    Classical(ClassicalType),
    Gate { params: usize, qubits: usize },
    Qram { addr_len: usize, word_len: usize },
    Buffer,
}

impl Sym {
    fn describe(&self) -> &'static str {
        match self {
            Sym::Qubits(_) => "qubit register",
            Sym::Bits(_) => "bit register",
            Sym::Classical(_) => "classical variable",
            Sym::Gate { .. } => "gate",
            Sym::Qram { .. } => "qram device",
            Sym::Buffer => "buffer device",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Ty {
    Int,
    Real,
    Bool,
    Bits(usize),
    Unknown,
}

impl Ty {
    fn numeric(self) -> bool {
        matches!(self, Ty::Int | Ty::Real | Ty::Bits(_) | Ty::Unknown)
    }

    fn name(self) -> String {
        match self {
            Ty::Int => "int".into(),
            Ty::Real => "angle".into(),
            Ty::Bool => "bool".into(),
            Ty::Bits(n) => format!("bit[{n}]"),
            Ty::Unknown => "unknown".into(),
        }
    }
}

struct Validator {
    scopes: Vec<HashMap<String, Sym>>,
    /// Set while checking a gate body: its qubit arguments.
    gate_qargs: Option<Vec<String>>,
    mem: Option<usize>,
    mem_used: bool,
    diags: Vec<Diagnostic>,
}

/// Static checks over a parsed program. Returns located diagnostics; the program is not changed.
pub fn validate(program: &Program) -> Vec<Diagnostic> {
    let mut v = Validator {
        scopes: vec![HashMap::new()],
        gate_qargs: None,
        mem: None,
        mem_used: false,
        diags: Vec::new(),
    };
    v.block(&program.body);
    v.diags
}

impl Validator {
    fn error(&mut self, span: Span, msg: impl Into<String>) {
        self.diags.push(Diagnostic::error(span, msg));
    }

    fn lookup(&self, name: &str) -> Option<&Sym> {
        self.scopes.iter().rev().find_map(|s| s.get(name))
    }

    fn declare(&mut self, span: Span, name: &str, sym: Sym) {
        if matches!(sym, Sym::Gate { .. }) && builtin_shape(name).is_some() {
            self.error(span, format!("`{name}` is a built-in gate name"));
            return;
        }
        if let Some(prev) = self.scopes.last().unwrap().get(name) {
            let what = prev.describe();
            self.error(span, format!("`{name}` already declared as {what}"));
            return;
        }
        self.scopes.last_mut().unwrap().insert(name.to_string(), sym);
    }

    fn scoped(&mut self, body: &[Stmt], extra: Vec<(String, Sym)>) {
        self.scopes.push(extra.into_iter().collect());
        self.block(body);
        self.scopes.pop();
    }

    fn block(&mut self, body: &[Stmt]) {
        for s in body {
            self.stmt(s);
        }
    }

    fn nested(&self) -> bool {
        self.scopes.len() > 1
    }

    fn stmt(&mut self, s: &Stmt) {
        let span = s.span;
        if self.gate_qargs.is_some()
            && !matches!(s.kind, StmtKind::Gate(_) | StmtKind::ClassicalDecl { .. } | StmtKind::Barrier)
        {
            self.error(span, "only gate calls and classical declarations are allowed in a gate body");
            return;
        }
        match &s.kind {
            StmtKind::QubitDecl { name, size } => {
                if self.nested() {
                    self.error(span, "qubit declarations must be global");
                }
                if *size == 0 {
                    self.error(span, format!("register `{name}` has size 0"));
                }
                self.declare(span, name, Sym::Qubits(*size));
            }
            StmtKind::BitDecl { name, size, init_expr, .. } => {
                if let Some(e) = init_expr {
                    self.expr(e, span);
                }
                self.declare(span, name, Sym::Bits(*size));
            }
            StmtKind::ClassicalDecl { ty, name, init } => {
                if let Some(e) = init {
                    let t = self.expr(e, span);
                    self.check_assignable(span, name, Some(*ty), t);
                }
                self.declare(span, name, Sym::Classical(*ty));
            }
            StmtKind::GateDef(g) => {
                if self.nested() {
                    self.error(span, "gate definitions must be global");
                }
                let mut scope: Vec<(String, Sym)> =
                    g.params.iter().map(|p| (p.clone(), Sym::Classical(ClassicalType::Angle))).collect();
                for (i, q) in g.qargs.iter().enumerate() {
                    if g.qargs[..i].contains(q) || g.params.contains(q) {
                        self.error(span, format!("duplicate argument `{q}` in gate `{}`", g.name));
                    }
                    scope.push((q.clone(), Sym::Qubits(1)));
                }
                // body sees only its own arguments and other gates
                let gates: Vec<(String, Sym)> = self.scopes[0]
                    .iter()
                    .filter(|(_, s)| matches!(s, Sym::Gate { .. }))
                    .map(|(k, s)| (k.clone(), s.clone()))
                    .collect();
                let saved = std::mem::replace(&mut self.scopes, vec![gates.into_iter().collect()]);
                self.gate_qargs = Some(g.qargs.clone());
                self.scoped(&g.body, scope);
                self.gate_qargs = None;
                self.scopes = saved;
                self.declare(span, &g.name, Sym::Gate { params: g.params.len(), qubits: g.qargs.len() });
            }
            StmtKind::Gate(call) => self.gate_call(call),
            StmtKind::Measure { src, dst } => {
                let w = self.qubit_operand(src);
                if let Some(d) = dst {
                    let bw = self.bit_operand(d);
                    if let (Some(a), Some(b)) = (w, bw) {
                        if a != b {
                            self.error(d.span, format!("measuring {a} qubit(s) into {b} bit(s)"));
                        }
                    }
                }
            }
            StmtKind::Reset(q) => {
                self.qubit_operand(q);
            }
            StmtKind::Barrier => {}
            StmtKind::Assign { name, index, value, .. } => {
                let t = self.expr(value, span);
                match self.lookup(name).cloned() {
                    None => self.error(span, format!("unknown identifier `{name}`")),
                    Some(Sym::Bits(n)) => {
                        if let Some(i) = index {
                            self.index_expr(i, span, n, name);
                        }
                        if t == Ty::Real || t == Ty::Bool && index.is_none() && n > 1 {
                            self.error(span, format!("cannot assign {} to bit register `{name}`", t.name()));
                        }
                    }
                    Some(Sym::Classical(ty)) => {
                        if index.is_some() {
                            self.error(span, format!("`{name}` is not indexable"));
                        }
                        self.check_assignable(span, name, Some(ty), t);
                    }
                    Some(other) => {
                        let what = other.describe();
                        self.error(span, format!("cannot assign to {what} `{name}`"));
                    }
                }
            }
            StmtKind::If { cond, then_body, else_body } => {
                self.condition(cond, span);
                self.scoped(then_body, Vec::new());
                self.scoped(else_body, Vec::new());
            }
            StmtKind::For { var, start, step, end, body } => {
                for e in [Some(start), step.as_ref(), Some(end)].into_iter().flatten() {
                    let t = self.expr(e, span);
                    if !matches!(t, Ty::Int | Ty::Bits(_) | Ty::Unknown) {
                        self.error(span, format!("loop bound has type {}, expected int", t.name()));
                    }
                }
                if let Some(st) = step.as_ref().and_then(const_int) {
                    if st == 0 {
                        self.error(span, "loop step is zero");
                    }
                }
                self.scoped(body, vec![(var.clone(), Sym::Classical(ClassicalType::Int))]);
            }
            StmtKind::While { cond, body } => {
                self.condition(cond, span);
                self.scoped(body, Vec::new());
            }
            StmtKind::Mem { size } => {
                if self.nested() {
                    self.error(span, "`mem` must be global");
                }
                if self.mem.is_some() {
                    self.error(span, "`mem` declared more than once");
                } else if self.mem_used {
                    self.error(span, "`mem` must precede every ld/st/mreset");
                }
                if *size == 0 {
                    self.error(span, "`mem` size must be at least 1");
                }
                self.mem.get_or_insert(*size);
            }
            StmtKind::Load { target, addr } => self.memory_access(span, "ld", target, addr),
            StmtKind::Store { addr, source } => self.memory_access(span, "st", source, addr),
            StmtKind::MReset { addr } => {
                self.mem_used = true;
                let Some(size) = self.mem else {
                    self.error(span, "`mreset` without a prior `mem` declaration");
                    return;
                };
                if let Some(a) = addr {
                    self.int_expr(a, span, "memory address");
                    if let Some(c) = const_int(a) {
                        if c < 0 || c as usize >= size {
                            self.error(span, format!("address {c} outside memory of size {size}"));
                        }
                    }
                }
            }
            StmtKind::QramDecl { name, addr_len, word_len } => {
                if self.nested() {
                    self.error(span, "`qram` must be global");
                }
                if *addr_len == 0 || *word_len == 0 {
                    self.error(span, "qram address and word lengths must be at least 1");
                }
                if *addr_len > MAX_QRAM_ADDR_LEN {
                    self.error(span, format!("qram address length {addr_len} exceeds {MAX_QRAM_ADDR_LEN}"));
                }
                self.declare(span, name, Sym::Qram { addr_len: *addr_len, word_len: *word_len });
            }
            StmtKind::QInit { name, data } => {
                let Some((n, w)) = self.qram(span, name) else { return };
                let len = match data {
                    QInitData::Literal(v) => Some(v.len()),
                    QInitData::Register(r, rs) => match self.lookup(r) {
                        Some(Sym::Bits(k)) => Some(*k),
                        Some(other) => {
                            let what = other.describe();
                            self.error(*rs, format!("`{r}` is a {what}, expected bit register"));
                            None
                        }
                        None => {
                            self.error(*rs, format!("unknown identifier `{r}`"));
                            None
                        }
                    },
                };
                let expected = (1usize << n.min(MAX_QRAM_ADDR_LEN)) * w;
                if let Some(l) = len {
                    if l != expected {
                        self.error(span, format!("qinit data has {l} bits, qram `{name}` expects {expected}"));
                    }
                }
            }
            StmtKind::QLoad { name, bus, addr, .. } => {
                let dims = self.qram(span, name);
                let bw = self.qubit_operand(bus);
                let aw = self.qubit_operand(addr);
                if let Some((n, w)) = dims {
                    if let Some(b) = bw.filter(|&b| b != w) {
                        self.error(bus.span, format!("bus `{}` has {b} qubit(s), qram `{name}` word length is {w}", bus.name));
                    }
                    if let Some(a) = aw.filter(|&a| a != n) {
                        self.error(addr.span, format!("address `{}` has {a} qubit(s), qram `{name}` address length is {n}", addr.name));
                    }
                }
            }
            StmtKind::BufferDecl { name, capacity } => {
                if self.nested() {
                    self.error(span, "`qbuffer` must be global");
                }
                if *capacity == 0 {
                    self.error(span, "buffer capacity must be at least 1");
                }
                self.declare(span, name, Sym::Buffer);
            }
            StmtKind::BufferWrite { name, qubit, flag } | StmtKind::BufferRead { name, qubit, flag } => {
                match self.lookup(name) {
                    Some(Sym::Buffer) => {}
                    Some(other) => {
                        let what = other.describe();
                        self.error(span, format!("`{name}` is a {what}, expected buffer device"));
                    }
                    None => self.error(span, format!("unknown identifier `{name}`")),
                }
                if let Some(w) = self.qubit_operand(qubit).filter(|&w| w != 1) {
                    self.error(qubit.span, format!("buffer access takes one qubit, got {w}"));
                }
                if let Some(f) = flag {
                    if let Some(w) = self.bit_operand(f).filter(|&w| w != 1) {
                        self.error(f.span, format!("status flag takes one bit, got {w}"));
                    }
                }
            }
        }
    }

    fn qram(&mut self, span: Span, name: &str) -> Option<(usize, usize)> {
        match self.lookup(name) {
            Some(Sym::Qram { addr_len, word_len }) => Some((*addr_len, *word_len)),
            Some(other) => {
                let what = other.describe();
                self.error(span, format!("`{name}` is a {what}, expected qram device"));
                None
            }
            None => {
                self.error(span, format!("unknown identifier `{name}`"));
                None
            }
        }
    }

    fn memory_access(&mut self, span: Span, op: &str, reg: &Operand, addr: &Expr) {
        self.mem_used = true;
        let w = self.qubit_operand(reg);
        self.int_expr(addr, span, "memory address");
        let Some(size) = self.mem else {
            self.error(span, format!("`{op}` without a prior `mem` declaration"));
            return;
        };
        if let (Some(a), Some(w)) = (const_int(addr), w) {
            if a < 0 || a as usize + w > size {
                self.error(span, format!("span [{a},{}) exceeds size {size}", a + w as i64));
            }
        }
    }

    fn check_assignable(&mut self, span: Span, name: &str, ty: Option<ClassicalType>, t: Ty) {
        let ok = match ty {
            Some(ClassicalType::Int) => matches!(t, Ty::Int | Ty::Bits(_) | Ty::Unknown),
            Some(ClassicalType::Angle | ClassicalType::Float) => t.numeric(),
            Some(ClassicalType::Bool) => matches!(t, Ty::Bool | Ty::Bits(1) | Ty::Unknown),
            None => true,
        };
        if !ok {
            let ty = ty.unwrap();
            self.error(span, format!("cannot assign {} to {ty} `{name}`", t.name()));
        }
    }

    fn condition(&mut self, e: &Expr, span: Span) {
        let t = self.expr(e, span);
        if t == Ty::Real {
            self.error(e.span().unwrap_or(span), "condition has type angle, expected bool or int");
        }
    }

    fn int_expr(&mut self, e: &Expr, span: Span, what: &str) {
        let t = self.expr(e, span);
        if !matches!(t, Ty::Int | Ty::Bits(_) | Ty::Unknown) {
            self.error(e.span().unwrap_or(span), format!("{what} has type {}, expected int", t.name()));
        }
    }

    fn index_expr(&mut self, e: &Expr, span: Span, size: usize, name: &str) {
        self.int_expr(e, span, "index");
        if let Some(i) = const_int(e) {
            if i < 0 || i as usize >= size {
                self.error(e.span().unwrap_or(span), format!("index {i} out of range for `{name}` of size {size}"));
            }
        }
    }

    /// Static width of a register operand when its bounds are constant.
    fn selector_width(&mut self, op: &Operand, size: usize) -> Option<usize> {
        match &op.sel {
            Selector::All => Some(size),
            Selector::Index(i) => {
                self.index_expr(i, op.span, size, &op.name);
                Some(1)
            }
            Selector::Slice(lo, hi) => {
                for e in [lo, hi].into_iter().flatten() {
                    self.int_expr(e, op.span, "slice bound");
                }
                let lo_v = match lo {
                    Some(e) => const_int(e)?,
                    None => 0,
                };
                let hi_v = match hi {
                    Some(e) => const_int(e)?,
                    None => size as i64 - 1,
                };
                if lo_v < 0 || hi_v < lo_v || hi_v as usize >= size {
                    self.error(op.span, format!("slice [{lo_v}:{hi_v}] out of range for `{}` of size {size}", op.name));
                    return None;
                }
                Some((hi_v - lo_v + 1) as usize)
            }
        }
    }

    fn qubit_operand(&mut self, op: &Operand) -> Option<usize> {
        if let Some(qargs) = &self.gate_qargs {
            if !qargs.contains(&op.name) {
                self.error(op.span, format!("`{}` is not an argument of the enclosing gate", op.name));
                return None;
            }
            if op.sel != Selector::All {
                self.error(op.span, "gate arguments cannot be indexed");
            }
            return Some(1);
        }
        match self.lookup(&op.name).cloned() {
            Some(Sym::Qubits(n)) => self.selector_width(op, n),
            Some(other) => {
                let what = other.describe();
                self.error(op.span, format!("`{}` is a {what}, expected qubits", op.name));
                None
            }
            None => {
                self.error(op.span, format!("unknown identifier `{}`", op.name));
                None
            }
        }
    }

    fn bit_operand(&mut self, op: &Operand) -> Option<usize> {
        match self.lookup(&op.name).cloned() {
            Some(Sym::Bits(n)) => self.selector_width(op, n),
            Some(other) => {
                let what = other.describe();
                self.error(op.span, format!("`{}` is a {what}, expected bits", op.name));
                None
            }
            None => {
                self.error(op.span, format!("unknown identifier `{}`", op.name));
                None
            }
        }
    }

    fn gate_call(&mut self, call: &GateCall) {
        let span = call.span;
        let shape = match builtin_shape(&call.name) {
            Some(s) => Some(s),
            None => match self.lookup(&call.name) {
                Some(Sym::Gate { params, qubits }) => Some((*params, *qubits)),
                Some(other) => {
                    let what = other.describe();
                    self.error(span, format!("`{}` is a {what}, not a gate", call.name));
                    None
                }
                None => {
                    self.error(span, format!("unknown gate `{}`", call.name));
                    None
                }
            },
        };
        let mut controls = 0usize;
        for m in &call.modifiers {
            match m {
                Modifier::Ctrl(e) | Modifier::NegCtrl(e) => match const_int(e) {
                    Some(k) if k >= 1 => controls += k as usize,
                    _ => self.error(span, "control count must be a positive integer constant"),
                },
                Modifier::Pow(e) => {
                    self.int_expr(e, span, "pow exponent");
                }
                Modifier::Inv => {}
            }
        }
        for p in &call.params {
            let t = self.expr(p, span);
            if !t.numeric() {
                self.error(span, format!("gate parameter has type {}", t.name()));
            }
        }
        let widths: Vec<Option<usize>> = call.operands.iter().map(|o| self.qubit_operand(o)).collect();
        if let Some((np, nq)) = shape {
            if call.params.len() != np {
                self.error(span, format!("gate `{}` takes {np} parameter(s), got {}", call.name, call.params.len()));
            }
            if call.operands.len() != nq + controls {
                self.error(
                    span,
                    format!("gate `{}` takes {} qubit operand(s), got {}", call.name, nq + controls, call.operands.len()),
                );
            }
        }
        let mut broadcast = None;
        for (o, w) in call.operands.iter().zip(widths) {
            match (w, broadcast) {
                (Some(1), _) => {}
                (Some(w), None) => broadcast = Some(w),
                (Some(w), Some(b)) if w != b => {
                    self.error(o.span, format!("broadcast width mismatch: `{}` has {w} qubits, expected {b}", o.name));
                }
                _ => {}
            }
        }
    }

    fn expr(&mut self, e: &Expr, span: Span) -> Ty {
        match e {
            Expr::Int(_) => Ty::Int,
            Expr::Real(_) => Ty::Real,
            Expr::Bool(_) => Ty::Bool,
            Expr::Var(name, s) => match self.lookup(name).cloned() {
                Some(Sym::Classical(ClassicalType::Int)) => Ty::Int,
                Some(Sym::Classical(ClassicalType::Bool)) => Ty::Bool,
                Some(Sym::Classical(_)) => Ty::Real,
                Some(Sym::Bits(n)) => Ty::Bits(n),
                Some(other) => {
                    let what = other.describe();
                    self.error(*s, format!("{what} `{name}` used in a classical expression"));
                    Ty::Unknown
                }
                None => {
                    self.error(*s, format!("unknown identifier `{name}`"));
                    Ty::Unknown
                }
            },
            Expr::Index(name, idx, s) => match self.lookup(name).cloned() {
                Some(Sym::Bits(n)) => {
                    self.index_expr(idx, *s, n, name);
                    Ty::Bits(1)
                }
                Some(Sym::Qubits(_)) => {
                    self.error(*s, format!("qubit register `{name}` used in a classical expression"));
                    Ty::Unknown
                }
                Some(_) => {
                    self.error(*s, format!("`{name}` is not indexable"));
                    Ty::Unknown
                }
                None => {
                    self.error(*s, format!("unknown identifier `{name}`"));
                    Ty::Unknown
                }
            },
            Expr::Unary(op, a) => {
                let t = self.expr(a, span);
                match op {
                    UnOp::Neg => {
                        if t == Ty::Bool {
                            self.error(e.span().unwrap_or(span), "cannot negate a bool");
                        }
                        if t == Ty::Real {
                            Ty::Real
                        } else {
                            Ty::Int
                        }
                    }
                    UnOp::Not => Ty::Bool,
                    UnOp::BitNot => {
                        if t == Ty::Real || t == Ty::Bool {
                            self.error(e.span().unwrap_or(span), format!("`~` applied to {}", t.name()));
                        }
                        t
                    }
                }
            }
            Expr::Binary(op, a, b) => {
                let (ta, tb) = (self.expr(a, span), self.expr(b, span));
                let at = e.span().unwrap_or(span);
                if op.is_logical() {
                    for t in [ta, tb] {
                        if t == Ty::Real {
                            self.error(at, "logical operator applied to angle");
                        }
                    }
                    return Ty::Bool;
                }
                if op.is_comparison() {
                    let mismatch = match (ta, tb) {
                        (Ty::Unknown, _) | (_, Ty::Unknown) => false,
                        (Ty::Bool, Ty::Bool) => false,
                        (Ty::Bool, t) | (t, Ty::Bool) => t != Ty::Bits(1),
                        (Ty::Bits(m), Ty::Bits(n)) => m != n,
                        _ => false,
                    };
                    if mismatch {
                        self.error(at, format!("comparison between {} and {}", ta.name(), tb.name()));
                    }
                    return Ty::Bool;
                }
                if ta == Ty::Bool || tb == Ty::Bool {
                    self.error(at, "arithmetic on bool");
                }
                if matches!(op, BinOp::Shl | BinOp::Shr | BinOp::BitAnd | BinOp::BitOr | BinOp::Mod)
                    && (ta == Ty::Real || tb == Ty::Real)
                {
                    self.error(at, "integer operator applied to angle");
                }
                if ta == Ty::Real || tb == Ty::Real || (*op == BinOp::Pow && const_int(b).is_some_and(|v| v < 0)) {
                    Ty::Real
                } else {
                    Ty::Int
                }
            }
            Expr::Call(name, args, s) => {
                for a in args {
                    self.expr(a, span);
                }
                if !MATH_FUNCS.contains(&name.as_str()) {
                    self.error(*s, format!("unknown function `{name}`"));
                } else if args.len() != 1 {
                    self.error(*s, format!("`{name}` takes one argument"));
                }
                Ty::Real
            }
        }
    }
}
