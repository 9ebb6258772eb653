use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use crate::error::{Error, Result};

/// OpenQASM 3 features outside the supported subset, keyed by leading keyword.
const UNSUPPORTED: &[(&str, &str)] = &[
    ("def", "subroutines"),
    ("extern", "extern functions"),
    ("return", "subroutines"),
    ("defcal", "pulse-level calibration"),
    ("defcalgrammar", "pulse-level calibration"),
    ("cal", "pulse-level calibration"),
    ("box", "timing boxes"),
    ("delay", "timing instructions"),
    ("duration", "timing types"),
    ("stretch", "timing types"),
    ("array", "classical arrays"),
    ("complex", "complex types"),
    ("let", "register aliases"),
    ("input", "program inputs"),
    ("output", "program outputs"),
    ("switch", "switch statements"),
    ("break", "loop control"),
    ("continue", "loop control"),
    ("opaque", "opaque gates"),
];

const RESERVED: &[&str] = &[
    "OPENQASM", "include", "qubit", "qreg", "bit", "creg", "int", "uint", "angle", "float", "bool", "const", "gate",
    "measure", "reset", "barrier", "if", "else", "for", "in", "while", "mem", "ld", "st", "mreset", "qram", "qinit",
    "qld", "ldqram", "qbuffer", "bwrite", "bread", "ctrl", "negctrl", "inv", "pow", "pi", "true", "false",
];

/// Parses source text into a [`Program`]; padding warnings and alias lints are attached to it.
pub fn parse_program(src: &str) -> Result<Program> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0, diags: Vec::new() };
    let mut prog = Program::default();
    if p.is_ident("OPENQASM") {
        p.bump();
        let v = match p.bump().tok {
            Tok::Int(v) => v.to_string(),
            Tok::Real(v) => v.to_string(),
            other => return Err(p.err_at(p.pos - 1, format!("expected version number, found {other}"))),
        };
        p.expect(";")?;
        prog.version = Some(v);
    }
    while p.peek().tok != Tok::Eof {
        if let Some(s) = p.statement(false)? {
            prog.body.push(s);
        }
    }
    prog.diagnostics = p.diags;
    Ok(prog)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    diags: Vec<Diagnostic>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn span(&self) -> Span {
        let t = self.peek();
        Span { line: t.line, col: t.col }
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err_at(&self, idx: usize, message: String) -> Error {
        let t = &self.toks[idx];
        Error::Parse { line: t.line, col: t.col, message }
    }

    fn unexpected(&self, wanted: &str) -> Error {
        self.err_at(self.pos, format!("expected {wanted}, found {}", self.peek().tok))
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(&self.peek().tok, Tok::Punct(q) if *q == p)
    }

    fn is_ident(&self, s: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(i) if i == s)
    }

    fn eat(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &str) -> Result<()> {
        if self.eat(p) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{p}`")))
        }
    }

    fn ident(&mut self) -> Result<String> {
        match &self.peek().tok {
            Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    fn const_size(&mut self, what: &str) -> Result<usize> {
        let at = self.pos;
        let e = self.expr()?;
        match const_int(&e) {
            Some(v) if v >= 0 => Ok(v as usize),
            Some(v) => Err(self.err_at(at, format!("{what} must be non-negative, found {v}"))),
            None => Err(self.err_at(at, format!("{what} must be a constant integer"))),
        }
    }

    fn block(&mut self) -> Result<Vec<Stmt>> {
        if self.eat("{") {
            let mut body = Vec::new();
            while !self.is_punct("}") {
                if self.peek().tok == Tok::Eof {
                    return Err(self.unexpected("`}`"));
                }
                if let Some(s) = self.statement(true)? {
                    body.push(s);
                }
            }
            self.bump();
            Ok(body)
        } else {
            Ok(self.statement(true)?.into_iter().collect())
        }
    }

    fn statement(&mut self, nested: bool) -> Result<Option<Stmt>> {
        let span = self.span();
        let kw = match &self.peek().tok {
            Tok::Ident(s) => s.clone(),
            Tok::Punct(";") => {
                self.bump();
                return Ok(None);
            }
            _ => return Err(self.unexpected("statement")),
        };
        if let Some((_, feature)) = UNSUPPORTED.iter().find(|(k, _)| *k == kw) {
            return Err(self.err_at(self.pos, format!("unsupported feature: {feature} (`{kw}`)")));
        }
        let kind = match kw.as_str() {
            "include" => {
                self.bump();
                match self.bump().tok {
                    Tok::Str(_) => {}
                    _ => return Err(self.err_at(self.pos - 1, "expected file name string".into())),
                }
                self.expect(";")?;
                return Ok(None);
            }
            "OPENQASM" => return Err(self.err_at(self.pos, "version header must come first".into())),
            "qubit" => {
                self.bump();
                let size = if self.eat("[") {
                    let n = self.const_size("register size")?;
                    self.expect("]")?;
                    n
                } else {
                    1
                };
                let name = self.ident()?;
                self.expect(";")?;
                StmtKind::QubitDecl { name, size }
            }
            "qreg" | "creg" => {
                self.bump();
                let name = self.ident()?;
                let size = if self.eat("[") {
                    let n = self.const_size("register size")?;
                    self.expect("]")?;
                    n
                } else {
                    1
                };
                self.expect(";")?;
                if kw == "qreg" {
                    StmtKind::QubitDecl { name, size }
                } else {
                    StmtKind::BitDecl { name, size, init: None, init_expr: None }
                }
            }
            "bit" => {
                self.bump();
                let size = if self.eat("[") {
                    let n = self.const_size("register size")?;
                    self.expect("]")?;
                    n
                } else {
                    1
                };
                let name = self.ident()?;
                let (mut init, mut init_expr) = (None, None);
                if self.eat("=") {
                    let at = self.span();
                    if self.is_punct("[") || matches!(self.peek().tok, Tok::Str(_)) {
                        let mut bits = self.bit_literal()?;
                        if bits.len() > size {
                            return Err(Error::Parse {
                                line: at.line,
                                col: at.col,
                                message: format!("literal has {} elements, `{name}` holds {size}", bits.len()),
                            });
                        }
                        if bits.len() < size {
                            self.diags.push(Diagnostic::warning(
                                at,
                                format!(
                                    "literal has {} elements, `{name}` holds {size}; zero-padded on the right",
                                    bits.len()
                                ),
                            ));
                            bits.resize(size, false);
                        }
                        init = Some(bits);
                    } else {
                        init_expr = Some(self.expr()?);
                    }
                }
                self.expect(";")?;
                StmtKind::BitDecl { name, size, init, init_expr }
            }
            "const" => {
                self.bump();
                return self.classical_decl(span);
            }
            "int" | "uint" | "angle" | "float" | "bool" => return self.classical_decl(span),
            "gate" => {
                if nested {
                    return Err(self.err_at(self.pos, "gate definitions must be global".into()));
                }
                self.bump();
                let name = self.ident()?;
                let mut params = Vec::new();
                if self.eat("(") {
                    while !self.eat(")") {
                        params.push(self.ident()?);
                        if !self.is_punct(")") {
                            self.expect(",")?;
                        }
                    }
                }
                let mut qargs = Vec::new();
                while !self.is_punct("{") {
                    qargs.push(self.ident()?);
                    self.eat(",");
                }
                if qargs.is_empty() {
                    return Err(self.unexpected("qubit argument"));
                }
                let body = self.block()?;
                StmtKind::GateDef(GateDef { name, params, qargs, body })
            }
            "measure" => {
                self.bump();
                let src = self.operand()?;
                let dst = if self.eat("->") { Some(self.operand()?) } else { None };
                self.expect(";")?;
                StmtKind::Measure { src, dst }
            }
            "reset" => {
                self.bump();
                let q = self.operand()?;
                self.expect(";")?;
                StmtKind::Reset(q)
            }
            "barrier" => {
                self.bump();
                while !self.eat(";") {
                    self.operand()?;
                    self.eat(",");
                }
                StmtKind::Barrier
            }
            "if" => {
                self.bump();
                self.expect("(")?;
                let cond = self.expr()?;
                self.expect(")")?;
                let then_body = self.block()?;
                let else_body = if self.is_ident("else") {
                    self.bump();
                    self.block()?
                } else {
                    Vec::new()
                };
                StmtKind::If { cond, then_body, else_body }
            }
            "for" => {
                self.bump();
                if matches!(&self.peek().tok, Tok::Ident(t) if t == "int" || t == "uint") {
                    self.bump();
                }
                let var = self.ident()?;
                if !self.is_ident("in") {
                    return Err(self.unexpected("`in`"));
                }
                self.bump();
                if self.is_punct("{") {
                    return Err(self.err_at(self.pos, "unsupported feature: set iteration".into()));
                }
                self.expect("[")?;
                let start = self.expr()?;
                self.expect(":")?;
                let mid = self.expr()?;
                let (step, end) = if self.eat(":") { (Some(mid), self.expr()?) } else { (None, mid) };
                self.expect("]")?;
                let body = self.block()?;
                StmtKind::For { var, start, step, end, body }
            }
            "while" => {
                self.bump();
                self.expect("(")?;
                let cond = self.expr()?;
                self.expect(")")?;
                let body = self.block()?;
                StmtKind::While { cond, body }
            }
            "mem" => {
                self.bump();
                let size = self.const_size("memory size")?;
                self.expect(";")?;
                StmtKind::Mem { size }
            }
            "ld" => {
                self.bump();
                let target = self.operand()?;
                self.expect("=")?;
                self.expect("[")?;
                let addr = self.expr()?;
                self.expect("]")?;
                self.expect(";")?;
                StmtKind::Load { target, addr }
            }
            "st" => {
                self.bump();
                self.expect("[")?;
                let addr = self.expr()?;
                self.expect("]")?;
                self.expect("=")?;
                let source = self.operand()?;
                self.expect(";")?;
                StmtKind::Store { addr, source }
            }
            "mreset" => {
                self.bump();
                let addr = if self.eat(";") {
                    None
                } else {
                    let bracket = self.eat("[");
                    let e = self.expr()?;
                    if bracket {
                        self.expect("]")?;
                    }
                    self.expect(";")?;
                    Some(e)
                };
                StmtKind::MReset { addr }
            }
            "qram" => {
                self.bump();
                let name = self.ident()?;
                self.expect("[")?;
                let addr_len = self.const_size("address length")?;
                self.expect(",")?;
                let word_len = self.const_size("word length")?;
                self.expect("]")?;
                self.expect(";")?;
                StmtKind::QramDecl { name, addr_len, word_len }
            }
            "qinit" => {
                self.bump();
                let name = self.ident()?;
                let data = if self.is_punct("[") && matches!(self.peek_at(1), Tok::Ident(_)) {
                    self.bump();
                    let s = self.span();
                    let r = self.ident()?;
                    self.expect("]")?;
                    QInitData::Register(r, s)
                } else if self.is_punct("[") || matches!(self.peek().tok, Tok::Str(_)) {
                    QInitData::Literal(self.bit_literal()?)
                } else {
                    let s = self.span();
                    QInitData::Register(self.ident()?, s)
                };
                self.expect(";")?;
                StmtKind::QInit { name, data }
            }
            "qld" => {
                self.bump();
                let name = self.ident()?;
                self.expect("(")?;
                let bus = self.operand()?;
                self.expect(")")?;
                self.expect("[")?;
                let addr = self.operand()?;
                self.expect("]")?;
                self.expect(";")?;
                StmtKind::QLoad { name, bus, addr, alias: false }
            }
            "ldqram" => {
                self.bump();
                let name = self.ident()?;
                let addr = self.operand()?;
                self.eat(",");
                let bus = self.operand()?;
                self.expect(";")?;
                self.diags.push(Diagnostic::lint(
                    span,
                    format!(
                        "`ldqram {name} {a} {b}` is an alias; canonical form is `qld {name}({b})[{a}]`",
                        a = addr.name,
                        b = bus.name
                    ),
                ));
                StmtKind::QLoad { name, bus, addr, alias: true }
            }
            "qbuffer" => {
                self.bump();
                let name = self.ident()?;
                self.expect("[")?;
                let capacity = self.const_size("buffer capacity")?;
                self.expect("]")?;
                self.expect(";")?;
                StmtKind::BufferDecl { name, capacity }
            }
            "bwrite" | "bread" => {
                self.bump();
                let name = self.ident()?;
                let qubit = self.operand()?;
                let flag = if self.eat("->") { Some(self.operand()?) } else { None };
                self.expect(";")?;
                if kw == "bwrite" {
                    StmtKind::BufferWrite { name, qubit, flag }
                } else {
                    StmtKind::BufferRead { name, qubit, flag }
                }
            }
            "ctrl" | "negctrl" | "inv" | "pow" => StmtKind::Gate(self.gate_call()?),
            "else" => return Err(self.err_at(self.pos, "`else` without `if`".into())),
            _ => {
                let assign_next = matches!(self.peek_at(1), Tok::Punct("=" | "+=" | "-=" | "*=" | "/=" | "["));
                if assign_next {
                    self.assignment()?
                } else {
                    StmtKind::Gate(self.gate_call()?)
                }
            }
        };
        Ok(Some(Stmt { kind, span }))
    }

    fn classical_decl(&mut self, span: Span) -> Result<Option<Stmt>> {
        let kw = match self.bump().tok {
            Tok::Ident(s) => s,
            _ => unreachable!(),
        };
        let ty = match kw.as_str() {
            "int" | "uint" => ClassicalType::Int,
            "angle" => ClassicalType::Angle,
            "float" => ClassicalType::Float,
            "bool" => ClassicalType::Bool,
            "bit" => return Err(self.err_at(self.pos - 1, "constant bit registers are not supported".into())),
            _ => return Err(self.err_at(self.pos - 1, format!("expected classical type, found `{kw}`"))),
        };
        if self.eat("[") {
            self.const_size("type width")?;
            self.expect("]")?;
        }
        let name = self.ident()?;
        let init = if self.eat("=") { Some(self.expr()?) } else { None };
        self.expect(";")?;
        Ok(Some(Stmt { kind: StmtKind::ClassicalDecl { ty, name, init }, span }))
    }

    fn assignment(&mut self) -> Result<StmtKind> {
        let name = self.ident()?;
        let index = if self.eat("[") {
            let e = self.expr()?;
            self.expect("]")?;
            Some(e)
        } else {
            None
        };
        let op = match self.bump().tok {
            Tok::Punct("=") => AssignOp::Set,
            Tok::Punct("+=") => AssignOp::Add,
            Tok::Punct("-=") => AssignOp::Sub,
            Tok::Punct("*=") => AssignOp::Mul,
            Tok::Punct("/=") => AssignOp::Div,
            other => return Err(self.err_at(self.pos - 1, format!("expected assignment, found {other}"))),
        };
        if op == AssignOp::Set && self.is_ident("measure") {
            self.bump();
            let src = self.operand()?;
            self.expect(";")?;
            let dst = Operand {
                name,
                sel: index.map_or(Selector::All, Selector::Index),
                span: src.span,
            };
            return Ok(StmtKind::Measure { src, dst: Some(dst) });
        }
        let value = self.expr()?;
        self.expect(";")?;
        Ok(StmtKind::Assign { name, index, op, value })
    }

    fn gate_call(&mut self) -> Result<GateCall> {
        let span = self.span();
        let mut modifiers = Vec::new();
        loop {
            let m = match &self.peek().tok {
                Tok::Ident(s) if s == "ctrl" || s == "negctrl" || s == "inv" || s == "pow" => s.clone(),
                _ => break,
            };
            self.bump();
            let arg = if m != "inv" && self.eat("(") {
                let e = self.expr()?;
                self.expect(")")?;
                Some(e)
            } else {
                None
            };
            modifiers.push(match m.as_str() {
                "ctrl" => Modifier::Ctrl(arg.unwrap_or(Expr::Int(1))),
                "negctrl" => Modifier::NegCtrl(arg.unwrap_or(Expr::Int(1))),
                "inv" => Modifier::Inv,
                _ => Modifier::Pow(arg.ok_or_else(|| self.unexpected("`(` after `pow`"))?),
            });
            self.expect("@")?;
        }
        let name = match &self.peek().tok {
            Tok::Ident(s) if !RESERVED.contains(&s.as_str()) || s == "measure" => s.clone(),
            _ => return Err(self.unexpected("gate name")),
        };
        self.bump();
        let mut params = Vec::new();
        if self.eat("(") {
            while !self.eat(")") {
                params.push(self.expr()?);
                if !self.is_punct(")") {
                    self.expect(",")?;
                }
            }
        }
        let mut operands = Vec::new();
        let mut comma = true;
        while !self.eat(";") {
            // without a comma the next operand must stay on the same line
            let same_line = self.pos > 0 && self.toks[self.pos - 1].line == self.peek().line;
            if !matches!(self.peek().tok, Tok::Ident(_)) || !(comma || same_line) {
                return Err(self.unexpected("qubit operand or `;`"));
            }
            operands.push(self.operand()?);
            comma = self.eat(",");
        }
        if operands.is_empty() {
            return Err(self.err_at(self.pos - 1, format!("gate `{name}` has no operands")));
        }
        Ok(GateCall { name, modifiers, params, operands, span })
    }

    fn operand(&mut self) -> Result<Operand> {
        let span = self.span();
        let name = self.ident()?;
        let sel = if self.eat("[") {
            let sel = if self.eat(":") {
                let hi = if self.is_punct("]") { None } else { Some(self.expr()?) };
                Selector::Slice(None, hi)
            } else {
                let lo = self.expr()?;
                if self.eat(":") {
                    let hi = if self.is_punct("]") { None } else { Some(self.expr()?) };
                    Selector::Slice(Some(lo), hi)
                } else {
                    Selector::Index(lo)
                }
            };
            self.expect("]")?;
            sel
        } else {
            Selector::All
        };
        Ok(Operand { name, sel, span })
    }

    fn bit_literal(&mut self) -> Result<Vec<bool>> {
        if let Tok::Str(s) = &self.peek().tok {
            let s = s.clone();
            let at = self.pos;
            self.bump();
            // written most significant first
            return s
                .chars()
                .rev()
                .filter(|c| *c != '_')
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(self.err_at(at, format!("invalid bit `{c}` in string literal"))),
                })
                .collect();
        }
        self.expect("[")?;
        let mut bits = Vec::new();
        while !self.eat("]") {
            match self.bump().tok {
                Tok::Int(0) => bits.push(false),
                Tok::Int(1) => bits.push(true),
                Tok::Ident(s) if s == "false" => bits.push(false),
                Tok::Ident(s) if s == "true" => bits.push(true),
                other => return Err(self.err_at(self.pos - 1, format!("expected bit value, found {other}"))),
            }
            if !self.is_punct("]") {
                self.expect(",")?;
            }
        }
        Ok(bits)
    }

    fn expr(&mut self) -> Result<Expr> {
        self.binary(0)
    }

    fn binary(&mut self, level: usize) -> Result<Expr> {
        const LEVELS: &[&[(&str, BinOp)]] = &[
            &[("||", BinOp::Or)],
            &[("&&", BinOp::And)],
            &[("|", BinOp::BitOr)],
            &[("&", BinOp::BitAnd)],
            &[("==", BinOp::Eq), ("!=", BinOp::Ne)],
            &[("<", BinOp::Lt), ("<=", BinOp::Le), (">", BinOp::Gt), (">=", BinOp::Ge)],
            &[("<<", BinOp::Shl), (">>", BinOp::Shr)],
            &[("+", BinOp::Add), ("-", BinOp::Sub)],
            &[("*", BinOp::Mul), ("/", BinOp::Div), ("%", BinOp::Mod)],
        ];
        if level == LEVELS.len() {
            return self.unary();
        }
        let mut lhs = self.binary(level + 1)?;
        'outer: loop {
            for (p, op) in LEVELS[level] {
                if self.eat(p) {
                    let rhs = self.binary(level + 1)?;
                    lhs = Expr::Binary(*op, Box::new(lhs), Box::new(rhs));
                    continue 'outer;
                }
            }
            return Ok(lhs);
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        let op = if self.eat("-") {
            Some(UnOp::Neg)
        } else if self.eat("!") {
            Some(UnOp::Not)
        } else if self.eat("~") {
            Some(UnOp::BitNot)
        } else {
            self.eat("+");
            None
        };
        match op {
            Some(op) => Ok(Expr::Unary(op, Box::new(self.unary()?))),
            None => {
                let base = self.primary()?;
                // `^` is exponentiation here, as in the angle arithmetic of gate bodies
                if self.eat("**") || self.eat("^") {
                    let exp = self.unary()?;
                    Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exp)))
                } else {
                    Ok(base)
                }
            }
        }
    }

    fn primary(&mut self) -> Result<Expr> {
        let span = self.span();
        match self.peek().tok.clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(Expr::Int(v))
            }
            Tok::Real(v) => {
                self.bump();
                Ok(Expr::Real(v))
            }
            Tok::Punct("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect(")")?;
                Ok(e)
            }
            Tok::Ident(s) => {
                self.bump();
                match s.as_str() {
                    "pi" | "π" => return Ok(Expr::Real(std::f64::consts::PI)),
                    "tau" | "τ" => return Ok(Expr::Real(std::f64::consts::TAU)),
                    "euler" | "ℇ" => return Ok(Expr::Real(std::f64::consts::E)),
                    "true" => return Ok(Expr::Bool(true)),
                    "false" => return Ok(Expr::Bool(false)),
                    _ => {}
                }
                if RESERVED.contains(&s.as_str()) {
                    return Err(self.err_at(self.pos - 1, format!("unexpected keyword `{s}` in expression")));
                }
                if self.eat("[") {
                    let idx = self.expr()?;
                    self.expect("]")?;
                    Ok(Expr::Index(s, Box::new(idx), span))
                } else if self.eat("(") {
                    let mut args = Vec::new();
                    while !self.eat(")") {
                        args.push(self.expr()?);
                        if !self.is_punct(")") {
                            self.expect(",")?;
                        }
                    }
                    Ok(Expr::Call(s, args, span))
                } else {
                    Ok(Expr::Var(s, span))
                }
            }
            _ => Err(self.unexpected("expression")),
        }
    }
}

/// Integer value of an expression built from integer literals only.
pub fn const_int(e: &Expr) -> Option<i64> {
    match e {
        Expr::Int(v) => Some(*v),
        Expr::Unary(UnOp::Neg, a) => const_int(a).map(|v| -v),
        Expr::Binary(op, a, b) => {
            let (a, b) = (const_int(a)?, const_int(b)?);
            match op {
                BinOp::Add => a.checked_add(b),
                BinOp::Sub => a.checked_sub(b),
                BinOp::Mul => a.checked_mul(b),
                BinOp::Div if b != 0 => Some(a.div_euclid(b)),
                BinOp::Mod if b != 0 => Some(a.rem_euclid(b)),
                BinOp::Pow if (0..64).contains(&b) => a.checked_pow(b as u32),
                BinOp::Shl if (0..63).contains(&b) => a.checked_shl(b as u32),
                BinOp::Shr if (0..63).contains(&b) => Some(a >> b),
                _ => None,
            }
        }
        _ => None,
    }
}
