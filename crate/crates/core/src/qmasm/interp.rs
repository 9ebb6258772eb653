use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use rand::SeedableRng;
use rayon::prelude::*;

use super::ast::*;
use super::gates::{builtin_gate, builtin_shape};
use super::trace::{replay_trace, TraceOp};
use super::validate::validate;
use crate::error::{Error, Result};
use crate::memdev::{dump_cells, BufferDevice, BufferStatus, OccupiedPolicy, RaqmDevice};
use crate::metrics::PlatformRecord;
use crate::qram::{build_router_program, Backend, Coupling, DataKind, Direction, QramDevice, QramMode, RouterAncillas, RouterLayout};
use crate::scalar::Scalar;
use crate::statevec::{GateSpec, StateVector, DEFAULT_MAX_QUBITS};
use crate::SimRng;

const MAX_GATE_DEPTH: usize = 64;

/// Operand qubits of one broadcast instance and the gates it expands to.
type Expansion<T> = Vec<(Vec<usize>, Vec<GateSpec<T>>)>;

/// Durations (seconds) and per-operation fidelities for the timeline.
///
/// The resulting fidelity estimate is a heuristic: the product of operation
/// fidelities times `exp(-t_idle / t_storage)` for every stored interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingProfile {
    pub gate_time: f64,
    pub gate_fidelity: f64,
    pub measure_time: f64,
    /// Addressing time of one RAQM access.
    pub t_addr: f64,
    /// Efficiency-rescaled read/write time `τ/η` of one cell.
    pub t_rw: f64,
    pub rw_fidelity: f64,
    pub t_storage: f64,
    /// Duration of one router level of a QRAM query.
    pub qram_stage_time: f64,
    pub qram_stage_fidelity: f64,
}

impl Default for TimingProfile {
    fn default() -> Self {
        TimingProfile {
            gate_time: 40e-9,
            gate_fidelity: 0.999,
            measure_time: 40e-9,
            t_addr: 0.0,
            t_rw: 1e-6 / 0.994,
            rw_fidelity: 0.994,
            t_storage: 34e-3,
            qram_stage_time: 1e-6,
            qram_stage_fidelity: 0.999,
        }
    }
}

impl TimingProfile {
    /// Memory timings taken from a platform record; the rest keeps the defaults.
    pub fn from_platform(r: &PlatformRecord<f64>) -> Self {
        TimingProfile {
            t_addr: r.t_addr,
            t_rw: r.tau_rw / r.eta,
            rw_fidelity: r.eta,
            t_storage: r.t_storage,
            gate_time: r.t_op.unwrap_or(40e-9),
            ..Default::default()
        }
    }

    pub fn raqm_access(&self) -> f64 {
        self.t_addr + self.t_rw
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub shots: usize,
    /// Forced measurement outcomes, keyed by (bit register, index).
    pub post_select: BTreeMap<(String, usize), bool>,
    pub backend: Backend,
    pub timing: Option<TimingProfile>,
    pub max_qubits: usize,
    /// Iteration cap per loop statement.
    pub loop_limit: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            shots: 1,
            post_select: BTreeMap::new(),
            backend: Backend::Functional,
            timing: None,
            max_qubits: DEFAULT_MAX_QUBITS,
            loop_limit: 1_000_000,
        }
    }
}

impl RunConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn post_select(mut self, bit: &str, index: usize, value: bool) -> Self {
        self.post_select.insert((bit.to_string(), index), value);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClassicalValue {
    Bits(Vec<bool>),
    Int(i64),
    Real(f64),
    Bool(bool),
}

impl fmt::Display for ClassicalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassicalValue::Bits(b) => {
                for &bit in b.iter().rev() {
                    f.write_str(if bit { "1" } else { "0" })?;
                }
                Ok(())
            }
            ClassicalValue::Int(v) => write!(f, "{v}"),
            ClassicalValue::Real(v) => write!(f, "{v}"),
            ClassicalValue::Bool(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureRecord {
    pub qubit: usize,
    pub target: Option<(String, usize)>,
    pub outcome: u8,
    pub probability: f64,
    pub forced: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ShotStatus {
    Completed,
    Aborted(Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShotRecord {
    pub seed: u64,
    pub measurements: Vec<MeasureRecord>,
    pub status: ShotStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimedOp {
    pub t_start: f64,
    pub op: String,
    pub duration: f64,
}

#[derive(Debug, Clone)]
pub struct RunResult<T: Scalar> {
    /// Final classical values in declaration order.
    pub classical: Vec<(String, ClassicalValue)>,
    pub final_state: StateVector<T>,
    pub memory_dump: String,
    pub timeline: Vec<TimedOp>,
    pub fidelity_estimate: Option<f64>,
    pub shot_log: Vec<ShotRecord>,
    pub warnings: Vec<Diagnostic>,
    pub trace: Vec<TraceOp<T>>,
    /// Qubit indices of each declared register, then devices.
    pub registers: Vec<(String, Vec<usize>)>,
    pub memory_cells: Vec<usize>,
}

impl<T: Scalar> RunResult<T> {
    pub fn completed(&self) -> bool {
        self.shot_log.iter().all(|s| s.status == ShotStatus::Completed)
    }

    pub fn error(&self) -> Option<&Error> {
        self.shot_log.iter().find_map(|s| match &s.status {
            ShotStatus::Aborted(e) => Some(e),
            ShotStatus::Completed => None,
        })
    }

    pub fn value(&self, name: &str) -> Option<&ClassicalValue> {
        self.classical.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn bits(&self, name: &str) -> Option<&[bool]> {
        match self.value(name)? {
            ClassicalValue::Bits(b) => Some(b),
            _ => None,
        }
    }

    pub fn register(&self, name: &str) -> Option<&[usize]> {
        self.registers.iter().find(|(n, _)| n == name).map(|(_, q)| q.as_slice())
    }

    /// Fidelity between the final state and a replay of the recorded trace.
    pub fn oracle_fidelity(&self, max_qubits: usize) -> Result<T> {
        let mut replay = replay_trace(self.final_state.num_qubits(), &self.trace, max_qubits)?;
        for (q, l) in self.final_state.labels().iter().enumerate() {
            replay.set_label(q, l.clone());
        }
        self.final_state.fidelity(&replay)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Value {
    Int(i64),
    Real(f64),
    Bool(bool),
}

impl Value {
    fn int(self) -> Result<i64> {
        match self {
            Value::Int(v) => Ok(v),
            Value::Bool(b) => Ok(b as i64),
            Value::Real(v) => Err(Error::Runtime(format!("expected an integer, found angle {v}"))),
        }
    }

    fn real(self) -> Result<f64> {
        match self {
            Value::Int(v) => Ok(v as f64),
            Value::Real(v) => Ok(v),
            Value::Bool(_) => Err(Error::Runtime("expected a number, found bool".into())),
        }
    }

    fn truthy(self) -> Result<bool> {
        match self {
            Value::Bool(b) => Ok(b),
            Value::Int(v) => Ok(v != 0),
            Value::Real(_) => Err(Error::Runtime("angle used as a condition".into())),
        }
    }

    fn coerce(self, ty: ClassicalType) -> Result<Value> {
        Ok(match ty {
            ClassicalType::Int => Value::Int(self.int()?),
            ClassicalType::Angle | ClassicalType::Float => Value::Real(self.real()?),
            ClassicalType::Bool => Value::Bool(self.truthy()?),
        })
    }
}

fn bits_to_int(b: &[bool]) -> Result<i64> {
    if b.len() > 63 && b[63..].iter().any(|&x| x) {
        return Err(Error::Runtime("bit register too wide for an integer".into()));
    }
    Ok(b.iter().take(63).enumerate().fold(0i64, |v, (i, &x)| v | ((x as i64) << i)))
}

fn int_to_bits(v: i64, n: usize) -> Vec<bool> {
    (0..n).map(|i| i < 64 && (v >> i) & 1 == 1).collect()
}

struct Layout {
    registers: Vec<(String, Vec<usize>)>,
    mem: Option<Vec<usize>>,
    buffers: HashMap<String, Vec<usize>>,
    qram_circuit: HashMap<String, (Vec<usize>, RouterAncillas)>,
    labels: Vec<String>,
}

fn allocate(program: &Program, cfg: &RunConfig) -> Result<Layout> {
    let mut labels: Vec<String> = Vec::new();
    let take = |labels: &mut Vec<String>, prefix: &str, k: usize| -> Vec<usize> {
        let start = labels.len();
        labels.extend((0..k).map(|i| format!("{prefix}[{i}]")));
        (start..start + k).collect()
    };
    let mut layout = Layout {
        registers: Vec::new(),
        mem: None,
        buffers: HashMap::new(),
        qram_circuit: HashMap::new(),
        labels: Vec::new(),
    };
    let mut qrams = Vec::new();
    let mut total = 0usize;
    for s in &program.body {
        match &s.kind {
            StmtKind::QubitDecl { size, .. } => total += size,
            StmtKind::Mem { size } => total += size,
            StmtKind::BufferDecl { capacity, .. } => total += capacity,
            StmtKind::QramDecl { addr_len, word_len, .. } if cfg.backend == Backend::Circuit => {
                let cells = 1usize.checked_shl(*addr_len as u32).unwrap_or(usize::MAX);
                total = total.saturating_add(cells.saturating_mul(*word_len + 1)).saturating_add(addr_len.saturating_sub(1));
            }
            _ => {}
        }
    }
    if total > cfg.max_qubits {
        return Err(Error::Resource(format!(
            "program needs {total} qubits, qubit budget is {}",
            cfg.max_qubits
        )));
    }
    for s in &program.body {
        match &s.kind {
            StmtKind::QubitDecl { name, size } => {
                let q = take(&mut labels, name, *size);
                layout.registers.push((name.clone(), q));
            }
            StmtKind::QramDecl { name, addr_len, word_len } => qrams.push((name.clone(), *addr_len, *word_len)),
            _ => {}
        }
    }
    for s in &program.body {
        match &s.kind {
            StmtKind::Mem { size } => layout.mem = Some(take(&mut labels, "mem", *size)),
            StmtKind::BufferDecl { name, capacity } => {
                let q = take(&mut labels, name, *capacity);
                layout.buffers.insert(name.clone(), q);
            }
            _ => {}
        }
    }
    if cfg.backend == Backend::Circuit {
        for (name, n, w) in qrams {
            let cells = 1usize << n;
            let memory = take(&mut labels, &format!("{name}.mem"), cells * w);
            let routers = take(&mut labels, &format!("{name}.router"), cells - 1);
            let channels = take(&mut labels, &format!("{name}.chan"), n);
            layout.qram_circuit.insert(name, (memory, RouterAncillas { routers, channels }));
        }
    }
    layout.labels = labels;
    Ok(layout)
}

/// Resolves `caux0`, `caux[0]` or a one-bit `caux` to a declared bit.
pub fn resolve_bit_key(program: &Program, key: &str) -> Result<(String, usize)> {
    let mut regs = HashMap::new();
    program.walk(&mut |s| {
        if let StmtKind::BitDecl { name, size, .. } = &s.kind {
            regs.insert(name.clone(), *size);
        }
    });
    let check = |name: &str, idx: usize| -> Option<(String, usize)> {
        regs.get(name).filter(|&&n| idx < n).map(|_| (name.to_string(), idx))
    };
    let key = key.trim();
    let found = if let Some(open) = key.find('[') {
        let idx = key[open + 1..].strip_suffix(']').and_then(|i| i.trim().parse().ok());
        idx.and_then(|i| check(&key[..open], i))
    } else if let Some(r) = check(key, 0).filter(|_| regs.get(key) == Some(&1)) {
        Some(r)
    } else {
        let split = key.trim_end_matches(|c: char| c.is_ascii_digit()).len();
        if split < key.len() && split > 0 {
            key[split..].parse().ok().and_then(|i| check(&key[..split], i))
        } else {
            None
        }
    };
    found.ok_or_else(|| Error::Argument(format!("`{key}` does not name a declared bit")))
}

struct GateCtx {
    locals: HashMap<String, Value>,
    qargs: HashMap<String, usize>,
}

struct Machine<'c, T: Scalar> {
    cfg: &'c RunConfig,
    state: StateVector<T>,
    labels: Vec<String>,
    qregs: HashMap<String, Vec<usize>>,
    bits: HashMap<String, Vec<bool>>,
    vars: HashMap<String, (ClassicalType, Value)>,
    order: Vec<String>,
    gates: HashMap<String, GateDef>,
    raqm: Option<RaqmDevice>,
    qrams: HashMap<String, QramDevice>,
    buffers: HashMap<String, BufferDevice>,
    circuit: HashMap<String, (Vec<usize>, RouterAncillas)>,
    rng: SimRng,
    trace: Vec<TraceOp<T>>,
    timeline: Vec<TimedOp>,
    clock: f64,
    fidelity: f64,
    stored_since: HashMap<usize, f64>,
    measurements: Vec<MeasureRecord>,
}

/// Runs one shot with `config.seed`. A runtime failure ends the shot early and is
/// reported in `shot_log`; configuration and budget problems are returned as errors.
pub fn execute<T: Scalar>(program: &Program, config: &RunConfig) -> Result<RunResult<T>> {
    if let Some(d) = validate(program).into_iter().find(|d| d.is_error()) {
        return Err(Error::State(format!("program failed validation: {d}")));
    }
    execute_validated(program, config)
}

fn execute_validated<T: Scalar>(program: &Program, config: &RunConfig) -> Result<RunResult<T>> {
    for (name, idx) in config.post_select.keys() {
        resolve_bit_key(program, &format!("{name}[{idx}]"))?;
    }
    let layout = allocate(program, config)?;
    let mut state = StateVector::basis_with_budget(layout.labels.len(), 0, config.max_qubits)?;
    for (q, l) in layout.labels.iter().enumerate() {
        state.set_label(q, l.clone());
    }
    let mut m = Machine {
        cfg: config,
        state,
        labels: layout.labels.clone(),
        qregs: layout.registers.iter().cloned().collect(),
        bits: HashMap::new(),
        vars: HashMap::new(),
        order: Vec::new(),
        gates: HashMap::new(),
        raqm: layout
            .mem
            .clone()
            .map(|cells| RaqmDevice::new(cells).with_policy(OccupiedPolicy::Swap)),
        qrams: HashMap::new(),
        buffers: layout.buffers.iter().map(|(k, v)| (k.clone(), BufferDevice::new(v.clone()))).collect(),
        circuit: layout.qram_circuit.clone(),
        rng: SimRng::seed_from_u64(config.seed),
        trace: Vec::new(),
        timeline: Vec::new(),
        clock: 0.0,
        fidelity: 1.0,
        stored_since: HashMap::new(),
        measurements: Vec::new(),
    };
    let status = match m.block(&program.body) {
        Ok(()) => ShotStatus::Completed,
        Err(e) => ShotStatus::Aborted(e),
    };
    m.finish(program, layout, status)
}

impl<'c, T: Scalar> Machine<'c, T> {
    fn finish(mut self, program: &Program, layout: Layout, status: ShotStatus) -> Result<RunResult<T>> {
        let end = self.clock;
        let decay: f64 = match self.cfg.timing {
            Some(t) => self.stored_since.values().map(|&s| (-(end - s) / t.t_storage).exp()).product(),
            None => 1.0,
        };
        self.fidelity *= decay;
        let mut dump = String::new();
        if let Some(r) = &self.raqm {
            dump.push_str("# mem\n");
            dump.push_str(&r.dump(&self.state)?);
        }
        let mut names: Vec<&String> = self.buffers.keys().collect();
        names.sort();
        for name in names {
            dump.push_str(&format!("# qbuffer {name}\n"));
            dump.push_str(&self.buffers[name].dump(&self.state)?);
        }
        let mut qnames: Vec<&String> = self.circuit.keys().collect();
        qnames.sort();
        for name in qnames {
            dump.push_str(&format!("# qram {name}\n"));
            dump.push_str(&dump_cells(&self.state, &self.circuit[name].0, |_| "data")?);
        }
        let classical = self
            .order
            .iter()
            .map(|n| {
                let v = match self.bits.get(n) {
                    Some(b) => ClassicalValue::Bits(b.clone()),
                    None => match self.vars[n].1 {
                        Value::Int(v) => ClassicalValue::Int(v),
                        Value::Real(v) => ClassicalValue::Real(v),
                        Value::Bool(v) => ClassicalValue::Bool(v),
                    },
                };
                (n.clone(), v)
            })
            .collect();
        let mut registers = layout.registers;
        if let Some(m) = &layout.mem {
            registers.push(("mem".into(), m.clone()));
        }
        let mut bufs: Vec<_> = layout.buffers.into_iter().collect();
        bufs.sort();
        registers.extend(bufs);
        Ok(RunResult {
            classical,
            final_state: self.state,
            memory_dump: dump,
            timeline: self.timeline,
            fidelity_estimate: self.cfg.timing.map(|_| self.fidelity),
            shot_log: vec![ShotRecord { seed: self.cfg.seed, measurements: self.measurements, status }],
            warnings: program.diagnostics.clone(),
            trace: self.trace,
            registers,
            memory_cells: layout.mem.unwrap_or_default(),
        })
    }

    fn tick(&mut self, op: impl Into<String>, duration: impl Fn(&TimingProfile) -> f64, fid: impl Fn(&TimingProfile) -> f64) {
        if let Some(t) = self.cfg.timing {
            let d = duration(&t);
            self.timeline.push(TimedOp { t_start: self.clock, op: op.into(), duration: d });
            self.clock += d;
            self.fidelity *= fid(&t);
        }
    }

    fn idle_decay(&mut self, cell: usize) {
        if let (Some(t), Some(since)) = (self.cfg.timing, self.stored_since.remove(&cell)) {
            self.fidelity *= (-(self.clock - since) / t.t_storage).exp();
        }
    }

    fn label_list(&self, qs: &[usize]) -> String {
        qs.iter().map(|&q| self.labels[q].as_str()).collect::<Vec<_>>().join(",")
    }

    fn apply(&mut self, g: GateSpec<T>) -> Result<()> {
        self.state.apply_gate(&g)?;
        self.trace.push(TraceOp::Gate(g));
        Ok(())
    }

    fn block(&mut self, body: &[Stmt]) -> Result<()> {
        for s in body {
            self.stmt(s).map_err(|e| match e {
                Error::Runtime(msg) if !msg.starts_with("line ") => {
                    Error::Runtime(format!("line {}: {msg}", s.span.line))
                }
                other => other,
            })?;
        }
        Ok(())
    }

    fn declare_classical(&mut self, name: &str) {
        if !self.order.iter().any(|n| n == name) {
            self.order.push(name.to_string());
        }
    }

    fn stmt(&mut self, s: &Stmt) -> Result<()> {
        match &s.kind {
            StmtKind::QubitDecl { .. }
            | StmtKind::Mem { .. }
            | StmtKind::BufferDecl { .. }
            | StmtKind::Barrier => {}
            StmtKind::BitDecl { name, size, init, init_expr } => {
                let bits = match (init, init_expr) {
                    (Some(b), _) => b.clone(),
                    (None, Some(e)) => int_to_bits(self.eval(e, None)?.int()?, *size),
                    _ => vec![false; *size],
                };
                self.bits.insert(name.clone(), bits);
                self.declare_classical(name);
            }
            StmtKind::ClassicalDecl { ty, name, init } => {
                let v = match init {
                    Some(e) => self.eval(e, None)?,
                    None => Value::Int(0),
                };
                self.vars.insert(name.clone(), (*ty, v.coerce(*ty)?));
                self.declare_classical(name);
            }
            StmtKind::GateDef(g) => {
                self.gates.insert(g.name.clone(), g.clone());
            }
            StmtKind::Gate(call) => self.gate_statement(call)?,
            StmtKind::Measure { src, dst } => {
                let qs = self.qubits(src)?;
                let targets = match dst {
                    Some(d) => self.bit_targets(d)?.into_iter().map(Some).collect(),
                    None => vec![None; qs.len()],
                };
                if targets.len() != qs.len() {
                    return Err(Error::Runtime(format!(
                        "measuring {} qubit(s) into {} bit(s)",
                        qs.len(),
                        targets.len()
                    )));
                }
                for (q, t) in qs.into_iter().zip(targets) {
                    self.measure(q, t)?;
                }
            }
            StmtKind::Reset(op) => {
                for q in self.qubits(op)? {
                    let outcome = self.state.reset_qubit(q, &mut self.rng)?;
                    self.trace.push(TraceOp::Reset { qubit: q, outcome });
                    let l = format!("reset {}", self.labels[q]);
                    self.tick(l, |t| t.measure_time, |t| t.gate_fidelity);
                }
            }
            StmtKind::Assign { name, index, op, value } => self.assign(name, index.as_ref(), *op, value)?,
            StmtKind::If { cond, then_body, else_body } => {
                if self.eval(cond, None)?.truthy()? {
                    self.block(then_body)?;
                } else {
                    self.block(else_body)?;
                }
            }
            StmtKind::For { var, start, step, end, body } => {
                let a = self.eval(start, None)?.int()?;
                let b = self.eval(end, None)?.int()?;
                let st = match step {
                    Some(e) => self.eval(e, None)?.int()?,
                    None => 1,
                };
                if st == 0 {
                    return Err(Error::Runtime("loop step is zero".into()));
                }
                let saved = self.vars.remove(var);
                let mut i = a;
                let mut count = 0u64;
                while (st > 0 && i <= b) || (st < 0 && i >= b) {
                    count += 1;
                    if count > self.cfg.loop_limit {
                        return Err(Error::Runtime(format!("loop exceeded {} iterations", self.cfg.loop_limit)));
                    }
                    self.vars.insert(var.clone(), (ClassicalType::Int, Value::Int(i)));
                    self.block(body)?;
                    i += st;
                }
                self.vars.remove(var);
                if let Some(v) = saved {
                    self.vars.insert(var.clone(), v);
                }
            }
            StmtKind::While { cond, body } => {
                let mut count = 0u64;
                while self.eval(cond, None)?.truthy()? {
                    count += 1;
                    if count > self.cfg.loop_limit {
                        return Err(Error::Runtime(format!("loop exceeded {} iterations", self.cfg.loop_limit)));
                    }
                    self.block(body)?;
                }
            }
            StmtKind::Load { target, addr } => {
                let qs = self.qubits(target)?;
                let a = self.eval(addr, None)?.int()?;
                for (k, q) in qs.into_iter().enumerate() {
                    let raqm = self.raqm.as_mut().ok_or_else(|| Error::Configuration("no `mem` declared".into()))?;
                    let at = a + k as i64;
                    let (_, cell) = raqm.resolve(at)?;
                    raqm.load(&mut self.state, at, q)?;
                    self.trace.push(TraceOp::Gate(GateSpec::swap(q, cell)));
                    self.idle_decay(cell);
                    let l = format!("ld {} = [{at}]", self.labels[q]);
                    self.tick(l, |t| t.raqm_access(), |t| t.rw_fidelity);
                }
            }
            StmtKind::Store { addr, source } => {
                let qs = self.qubits(source)?;
                let a = self.eval(addr, None)?.int()?;
                for (k, q) in qs.into_iter().enumerate() {
                    let raqm = self.raqm.as_mut().ok_or_else(|| Error::Configuration("no `mem` declared".into()))?;
                    let at = a + k as i64;
                    let (_, cell) = raqm.resolve(at)?;
                    raqm.store(&mut self.state, at, q)?;
                    self.trace.push(TraceOp::Gate(GateSpec::swap(q, cell)));
                    self.idle_decay(cell);
                    let l = format!("st [{at}] = {}", self.labels[q]);
                    self.tick(l, |t| t.raqm_access(), |t| t.rw_fidelity);
                    self.stored_since.insert(cell, self.clock);
                }
            }
            StmtKind::MReset { addr } => {
                let a = match addr {
                    Some(e) => Some(self.eval(e, None)?.int()?),
                    None => None,
                };
                let raqm = self.raqm.as_mut().ok_or_else(|| Error::Configuration("no `mem` declared".into()))?;
                let cells: Vec<usize> = match a {
                    Some(a) => vec![raqm.resolve(a)?.1],
                    None => raqm.cell_qubits().to_vec(),
                };
                let outcomes = raqm.reset(&mut self.state, a, &mut self.rng)?;
                for (cell, outcome) in cells.into_iter().zip(outcomes) {
                    self.trace.push(TraceOp::Reset { qubit: cell, outcome });
                    self.stored_since.remove(&cell);
                    let l = format!("mreset {}", self.labels[cell]);
                    self.tick(l, |t| t.raqm_access(), |t| t.rw_fidelity);
                }
            }
            StmtKind::QramDecl { name, addr_len, word_len } => {
                let mut dev = QramDevice::new(*addr_len, *word_len)?.with_max_qubits(self.cfg.max_qubits);
                if let Some((memory, anc)) = self.circuit.get(name) {
                    dev = dev.with_memory(memory.clone())?.with_circuit(anc.clone())?;
                }
                self.qrams.insert(name.clone(), dev);
            }
            StmtKind::QInit { name, data } => {
                let x = match data {
                    QInitData::Literal(v) => v.clone(),
                    QInitData::Register(r, _) => self
                        .bits
                        .get(r)
                        .cloned()
                        .ok_or_else(|| Error::Runtime(format!("bit register `{r}` is not initialized")))?,
                };
                let dev = self.qrams.get_mut(name).ok_or_else(|| Error::Runtime(format!("unknown qram `{name}`")))?;
                let old = dev.data().map(|d| d.to_vec()).unwrap_or_else(|| vec![false; x.len()]);
                dev.qinit_load(&x)?;
                if let Some(mem) = dev.memory_qubits().map(|m| m.to_vec()) {
                    for (k, q) in mem.into_iter().enumerate() {
                        if old[k] != x[k] {
                            self.apply(GateSpec::x(q))?;
                        }
                    }
                }
            }
            StmtKind::QLoad { name, bus, addr, .. } => self.qload(name, bus, addr)?,
            StmtKind::BufferWrite { name, qubit, flag } => {
                let q = self.single_qubit(qubit)?;
                let buf = self.buffers.get_mut(name).ok_or_else(|| Error::Runtime(format!("unknown buffer `{name}`")))?;
                let status = buf.write(&mut self.state, q)?;
                if status == BufferStatus::WriteStored {
                    let cell = buf.cell_qubits()[buf.queue().last().expect("stored")];
                    self.trace.push(TraceOp::Gate(GateSpec::swap(q, cell)));
                    let l = format!("bwrite {name} {}", self.labels[q]);
                    self.tick(l, |t| t.raqm_access(), |t| t.rw_fidelity);
                    self.stored_since.insert(cell, self.clock);
                }
                self.set_flag(flag.as_ref(), status)?;
            }
            StmtKind::BufferRead { name, qubit, flag } => {
                let q = self.single_qubit(qubit)?;
                let buf = self.buffers.get_mut(name).ok_or_else(|| Error::Runtime(format!("unknown buffer `{name}`")))?;
                let front = buf.queue().next().map(|c| buf.cell_qubits()[c]);
                let status = buf.read(&mut self.state, q)?;
                if let (BufferStatus::ReadSuccess, Some(cell)) = (status, front) {
                    self.trace.push(TraceOp::Gate(GateSpec::swap(q, cell)));
                    self.idle_decay(cell);
                    let l = format!("bread {name} {}", self.labels[q]);
                    self.tick(l, |t| t.raqm_access(), |t| t.rw_fidelity);
                }
                self.set_flag(flag.as_ref(), status)?;
            }
        }
        Ok(())
    }

    fn set_flag(&mut self, flag: Option<&Operand>, status: BufferStatus) -> Result<()> {
        if let Some(f) = flag {
            for (name, i) in self.bit_targets(f)? {
                self.bits.get_mut(&name).expect("resolved")[i] = status.sf_bit() == 1;
            }
        }
        Ok(())
    }

    fn qload(&mut self, name: &str, bus: &Operand, addr: &Operand) -> Result<()> {
        let bus_q = self.qubits(bus)?;
        let addr_q = self.qubits(addr)?;
        let dev = self.qrams.get(name).ok_or_else(|| Error::Runtime(format!("unknown qram `{name}`")))?;
        let n = dev.addr_len();
        match dev.backend() {
            Backend::Functional => {
                let data = dev.data().ok_or_else(|| Error::State(format!("qram `{name}` has no data; use qinit")))?;
                let w = dev.word_len();
                // the same query as explicit multi-controlled X gates, for the trace
                let mut lowered = Vec::new();
                for j in 0..dev.cells() {
                    let (pos, neg): (Vec<usize>, Vec<usize>) = (0..n).map(|b| addr_q[b]).partition(|&q| {
                        let b = addr_q.iter().position(|&a| a == q).unwrap();
                        (j >> b) & 1 == 1
                    });
                    for i in 0..w {
                        if data[j * w + i] {
                            lowered.push(GateSpec::x(bus_q[i]).controlled(&pos).neg_controlled(&neg));
                        }
                    }
                }
                dev.oracle_query(&mut self.state, &addr_q, &bus_q)?;
                self.trace.extend(lowered.into_iter().map(TraceOp::Gate));
            }
            Backend::Circuit => {
                let (memory, anc) = self.circuit[name].clone();
                let layout = RouterLayout {
                    addr: addr_q.clone(),
                    bus: bus_q.clone(),
                    memory,
                    routers: anc.routers,
                    channels: anc.channels,
                };
                let mode = QramMode::new(Direction::Read, DataKind::Classical, Coupling::Cnot);
                for g in build_router_program::<T>(dev, mode, &layout)? {
                    self.apply(g)?;
                }
            }
        }
        let l = format!("qld {name}({})[{}]", self.label_list(&bus_q), self.label_list(&addr_q));
        self.tick(l, |t| n as f64 * t.qram_stage_time, |t| t.qram_stage_fidelity.powi(n as i32));
        Ok(())
    }

    fn measure(&mut self, q: usize, target: Option<(String, usize)>) -> Result<()> {
        let forced = target.as_ref().and_then(|t| self.cfg.post_select.get(t)).copied();
        let (outcome, p) = match forced {
            Some(v) => {
                let o = v as u8;
                (o, self.state.measure_forced(q, o)?)
            }
            None => self.state.measure(q, &mut self.rng)?,
        };
        self.trace.push(TraceOp::Measure { qubit: q, outcome });
        let text = match &target {
            Some((n, i)) => format!("measure {} -> {n}[{i}]", self.labels[q]),
            None => format!("measure {}", self.labels[q]),
        };
        if let Some((n, i)) = &target {
            self.bits.get_mut(n).ok_or_else(|| Error::Runtime(format!("unknown bit register `{n}`")))?[*i] =
                outcome == 1;
        }
        self.measurements.push(MeasureRecord {
            qubit: q,
            target,
            outcome,
            probability: p.to_f64().unwrap_or(f64::NAN),
            forced: forced.is_some(),
        });
        self.tick(text, |t| t.measure_time, |t| t.gate_fidelity);
        Ok(())
    }

    fn assign(&mut self, name: &str, index: Option<&Expr>, op: AssignOp, value: &Expr) -> Result<()> {
        let v = self.eval(value, None)?;
        if let Some(bits) = self.bits.get(name) {
            let n = bits.len();
            match index {
                Some(i) => {
                    let i = self.eval(i, None)?.int()?;
                    if i < 0 || i as usize >= n {
                        return Err(Error::Runtime(format!("index {i} out of range for `{name}` of size {n}")));
                    }
                    let cur = self.bits[name][i as usize] as i64;
                    let nv = combine(op, Value::Int(cur), v)?.int()?;
                    self.bits.get_mut(name).unwrap()[i as usize] = nv & 1 == 1;
                }
                None => {
                    let cur = bits_to_int(bits)?;
                    let nv = combine(op, Value::Int(cur), v)?.int()?;
                    self.bits.insert(name.to_string(), int_to_bits(nv, n));
                }
            }
            return Ok(());
        }
        let (ty, cur) = *self
            .vars
            .get(name)
            .ok_or_else(|| Error::Runtime(format!("unknown identifier `{name}`")))?;
        let nv = combine(op, cur, v)?.coerce(ty)?;
        self.vars.insert(name.to_string(), (ty, nv));
        Ok(())
    }

    fn eval(&self, e: &Expr, ctx: Option<&GateCtx>) -> Result<Value> {
        Ok(match e {
            Expr::Int(v) => Value::Int(*v),
            Expr::Real(v) => Value::Real(*v),
            Expr::Bool(v) => Value::Bool(*v),
            Expr::Var(name, _) => {
                if let Some(ctx) = ctx {
                    *ctx.locals
                        .get(name)
                        .ok_or_else(|| Error::Runtime(format!("unknown identifier `{name}` in gate body")))?
                } else if let Some((_, v)) = self.vars.get(name) {
                    *v
                } else if let Some(b) = self.bits.get(name) {
                    Value::Int(bits_to_int(b)?)
                } else {
                    return Err(Error::Runtime(format!("unknown identifier `{name}`")));
                }
            }
            Expr::Index(name, idx, _) => {
                let i = self.eval(idx, ctx)?.int()?;
                let b = self.bits.get(name).ok_or_else(|| Error::Runtime(format!("`{name}` is not a bit register")))?;
                if i < 0 || i as usize >= b.len() {
                    return Err(Error::Runtime(format!("index {i} out of range for `{name}` of size {}", b.len())));
                }
                Value::Int(b[i as usize] as i64)
            }
            Expr::Unary(op, a) => {
                let v = self.eval(a, ctx)?;
                match (op, v) {
                    (UnOp::Neg, Value::Int(x)) => Value::Int(x.checked_neg().ok_or_else(overflow)?),
                    (UnOp::Neg, Value::Real(x)) => Value::Real(-x),
                    (UnOp::Not, v) => Value::Bool(!v.truthy()?),
                    (UnOp::BitNot, v) => Value::Int(!v.int()?),
                    (UnOp::Neg, Value::Bool(_)) => return Err(Error::Runtime("cannot negate a bool".into())),
                }
            }
            Expr::Binary(op, a, b) => {
                if op.is_logical() {
                    let l = self.eval(a, ctx)?.truthy()?;
                    let r = match op {
                        BinOp::And if !l => false,
                        BinOp::Or if l => true,
                        _ => self.eval(b, ctx)?.truthy()?,
                    };
                    return Ok(Value::Bool(r));
                }
                let (l, r) = (self.eval(a, ctx)?, self.eval(b, ctx)?);
                binary(*op, l, r)?
            }
            Expr::Call(name, args, _) => {
                let x = self.eval(&args[0], ctx)?.real()?;
                Value::Real(match name.as_str() {
                    "sin" => x.sin(),
                    "cos" => x.cos(),
                    "tan" => x.tan(),
                    "arcsin" => x.asin(),
                    "arccos" => x.acos(),
                    "arctan" => x.atan(),
                    "exp" => x.exp(),
                    "ln" => x.ln(),
                    "sqrt" => x.sqrt(),
                    _ => return Err(Error::Runtime(format!("unknown function `{name}`"))),
                })
            }
        })
    }

    fn select(&self, name: &str, sel: &Selector, size: usize) -> Result<Vec<usize>> {
        let idx = |e: &Expr| -> Result<i64> { self.eval(e, None)?.int() };
        let out_of_range = |i: i64| Error::Runtime(format!("index {i} out of range for `{name}` of size {size}"));
        match sel {
            Selector::All => Ok((0..size).collect()),
            Selector::Index(e) => {
                let i = idx(e)?;
                if i < 0 || i as usize >= size {
                    return Err(out_of_range(i));
                }
                Ok(vec![i as usize])
            }
            Selector::Slice(lo, hi) => {
                let lo = lo.as_ref().map(idx).transpose()?.unwrap_or(0);
                let hi = hi.as_ref().map(idx).transpose()?.unwrap_or(size as i64 - 1);
                for i in [lo, hi] {
                    if i < 0 || i as usize >= size {
                        return Err(out_of_range(i));
                    }
                }
                Ok((lo as usize..=hi as usize).collect())
            }
        }
    }

    fn qubits(&self, op: &Operand) -> Result<Vec<usize>> {
        let reg = self
            .qregs
            .get(&op.name)
            .ok_or_else(|| Error::Runtime(format!("unknown qubit register `{}`", op.name)))?;
        Ok(self.select(&op.name, &op.sel, reg.len())?.into_iter().map(|i| reg[i]).collect())
    }

    fn single_qubit(&self, op: &Operand) -> Result<usize> {
        match self.qubits(op)?.as_slice() {
            [q] => Ok(*q),
            qs => Err(Error::Runtime(format!("expected one qubit, `{}` selects {}", op.name, qs.len()))),
        }
    }

    fn bit_targets(&self, op: &Operand) -> Result<Vec<(String, usize)>> {
        let b = self
            .bits
            .get(&op.name)
            .ok_or_else(|| Error::Runtime(format!("unknown bit register `{}`", op.name)))?;
        Ok(self.select(&op.name, &op.sel, b.len())?.into_iter().map(|i| (op.name.clone(), i)).collect())
    }

    fn gate_statement(&mut self, call: &GateCall) -> Result<()> {
        let groups: Vec<Vec<usize>> = call.operands.iter().map(|o| self.qubits(o)).collect::<Result<_>>()?;
        for (qs, gates) in self.expand(call, &groups, None, 0)? {
            let k = gates.len();
            for g in gates {
                self.apply(g)?;
            }
            let l = format!("{} {}", call.name, self.label_list(&qs));
            self.tick(l, |t| k as f64 * t.gate_time, |t| t.gate_fidelity.powi(k as i32));
        }
        Ok(())
    }

    /// Expands a call over broadcast operand groups into primitive gates, one list per instance.
    fn expand(
        &self,
        call: &GateCall,
        groups: &[Vec<usize>],
        ctx: Option<&GateCtx>,
        depth: usize,
    ) -> Result<Expansion<T>> {
        if depth > MAX_GATE_DEPTH {
            return Err(Error::Runtime(format!("gate `{}` nested deeper than {MAX_GATE_DEPTH}", call.name)));
        }
        let width = groups.iter().map(Vec::len).max().unwrap_or(0);
        if let Some(g) = groups.iter().find(|g| g.len() != 1 && g.len() != width) {
            return Err(Error::Runtime(format!("broadcast width mismatch: {} vs {width}", g.len())));
        }
        let mut ctrl_kinds = Vec::new();
        let mut power = 1i64;
        for m in &call.modifiers {
            match m {
                Modifier::Ctrl(e) | Modifier::NegCtrl(e) => {
                    let k = self.eval(e, ctx)?.int()?;
                    if k < 1 {
                        return Err(Error::Runtime("control count must be positive".into()));
                    }
                    ctrl_kinds.extend(std::iter::repeat_n(matches!(m, Modifier::Ctrl(_)), k as usize));
                }
                Modifier::Inv => power = -power,
                Modifier::Pow(e) => {
                    let v = self.eval(e, ctx)?;
                    let k = v.int().map_err(|_| Error::Runtime("unsupported feature: non-integer pow".into()))?;
                    power = power.checked_mul(k).ok_or_else(overflow)?;
                }
            }
        }
        let params: Vec<f64> = call.params.iter().map(|p| self.eval(p, ctx)?.real()).collect::<Result<_>>()?;
        let nc = ctrl_kinds.len();
        let mut out = Vec::with_capacity(width);
        for k in 0..width {
            let qs: Vec<usize> = groups.iter().map(|g| if g.len() == 1 { g[0] } else { g[k] }).collect();
            if qs.len() < nc {
                return Err(Error::Runtime(format!("gate `{}` is missing control operands", call.name)));
            }
            let (ctrl_qs, targets) = qs.split_at(nc);
            let base = self.base_gates(&call.name, &params, targets, depth)?;
            let mut gates = Vec::new();
            let reps = power.unsigned_abs();
            for _ in 0..reps {
                if power > 0 {
                    gates.extend(base.iter().cloned());
                } else {
                    gates.extend(base.iter().rev().map(GateSpec::inverse));
                }
            }
            let pos: Vec<usize> = ctrl_qs.iter().zip(&ctrl_kinds).filter(|(_, &p)| p).map(|(q, _)| *q).collect();
            let neg: Vec<usize> = ctrl_qs.iter().zip(&ctrl_kinds).filter(|(_, &p)| !p).map(|(q, _)| *q).collect();
            let gates = gates.into_iter().map(|g| g.controlled(&pos).neg_controlled(&neg)).collect();
            out.push((qs, gates));
        }
        Ok(out)
    }

    fn base_gates(&self, name: &str, params: &[f64], targets: &[usize], depth: usize) -> Result<Vec<GateSpec<T>>> {
        if let Some((np, nq)) = builtin_shape(name) {
            if params.len() != np || targets.len() != nq {
                return Err(Error::Runtime(format!("gate `{name}` expects {np} parameter(s) and {nq} qubit(s)")));
            }
            let p: Vec<T> = params.iter().map(|&x| T::lit(x)).collect();
            return Ok(builtin_gate(name, &p, targets).into_iter().collect());
        }
        let def = self.gates.get(name).ok_or_else(|| Error::Runtime(format!("unknown gate `{name}`")))?;
        if params.len() != def.params.len() || targets.len() != def.qargs.len() {
            return Err(Error::Runtime(format!(
                "gate `{name}` expects {} parameter(s) and {} qubit(s)",
                def.params.len(),
                def.qargs.len()
            )));
        }
        let mut ctx = GateCtx {
            locals: def.params.iter().cloned().zip(params.iter().map(|&x| Value::Real(x))).collect(),
            qargs: def.qargs.iter().cloned().zip(targets.iter().copied()).collect(),
        };
        let mut out = Vec::new();
        for s in &def.body {
            match &s.kind {
                StmtKind::ClassicalDecl { ty, name: var, init } => {
                    let v = match init {
                        Some(e) => self.eval(e, Some(&ctx))?.coerce(*ty)?,
                        None => Value::Int(0).coerce(*ty)?,
                    };
                    ctx.locals.insert(var.clone(), v);
                }
                StmtKind::Gate(call) => {
                    let groups: Vec<Vec<usize>> = call
                        .operands
                        .iter()
                        .map(|o| {
                            ctx.qargs
                                .get(&o.name)
                                .map(|&q| vec![q])
                                .ok_or_else(|| Error::Runtime(format!("`{}` is not a gate argument", o.name)))
                        })
                        .collect::<Result<_>>()?;
                    for (_, g) in self.expand(call, &groups, Some(&ctx), depth + 1)? {
                        out.extend(g);
                    }
                }
                StmtKind::Barrier => {}
                _ => return Err(Error::Runtime(format!("unsupported statement in gate `{name}`"))),
            }
        }
        Ok(out)
    }
}

fn overflow() -> Error {
    Error::Runtime("integer overflow".into())
}

fn combine(op: AssignOp, cur: Value, v: Value) -> Result<Value> {
    match op {
        AssignOp::Set => Ok(v),
        AssignOp::Add => binary(BinOp::Add, cur, v),
        AssignOp::Sub => binary(BinOp::Sub, cur, v),
        AssignOp::Mul => binary(BinOp::Mul, cur, v),
        AssignOp::Div => binary(BinOp::Div, cur, v),
    }
}

fn binary(op: BinOp, l: Value, r: Value) -> Result<Value> {
    if op.is_comparison() {
        let ord = match (l, r) {
            (Value::Bool(a), Value::Bool(b)) => a.partial_cmp(&b),
            (Value::Real(_), _) | (_, Value::Real(_)) => l.real()?.partial_cmp(&r.real()?),
            _ => l.int()?.partial_cmp(&r.int()?),
        };
        let ord = ord.ok_or_else(|| Error::Runtime("comparison with NaN".into()))?;
        use std::cmp::Ordering::*;
        return Ok(Value::Bool(match op {
            BinOp::Eq => ord == Equal,
            BinOp::Ne => ord != Equal,
            BinOp::Lt => ord == Less,
            BinOp::Le => ord != Greater,
            BinOp::Gt => ord == Greater,
            _ => ord != Less,
        }));
    }
    if let (Value::Int(_) | Value::Bool(_), Value::Int(_) | Value::Bool(_)) = (l, r) {
        let (a, b) = (l.int()?, r.int()?);
        let v = match op {
            BinOp::Add => a.checked_add(b),
            BinOp::Sub => a.checked_sub(b),
            BinOp::Mul => a.checked_mul(b),
            BinOp::Div | BinOp::Mod if b == 0 => return Err(Error::Runtime("division by zero".into())),
            BinOp::Div => a.checked_div(b),
            BinOp::Mod => a.checked_rem(b),
            BinOp::Pow if b < 0 => return Ok(Value::Real((a as f64).powi(b as i32))),
            BinOp::Pow => u32::try_from(b).ok().and_then(|b| a.checked_pow(b)),
            BinOp::Shl => u32::try_from(b).ok().and_then(|b| a.checked_shl(b)),
            BinOp::Shr => u32::try_from(b).ok().and_then(|b| a.checked_shr(b)),
            BinOp::BitAnd => Some(a & b),
            BinOp::BitOr => Some(a | b),
            _ => unreachable!("comparisons and logic handled above"),
        };
        return v.map(Value::Int).ok_or_else(overflow);
    }
    let (a, b) = (l.real()?, r.real()?);
    Ok(Value::Real(match op {
        BinOp::Add => a + b,
        BinOp::Sub => a - b,
        BinOp::Mul => a * b,
        BinOp::Div => a / b,
        BinOp::Pow => a.powf(b),
        _ => return Err(Error::Runtime("integer operator applied to angle".into())),
    }))
}

/// Aggregated outcome of many seeded shots.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotSummary {
    pub shots: usize,
    /// Counts keyed by the measured bit registers, `name=bits` joined by spaces.
    pub counts: BTreeMap<String, usize>,
    pub aborted: Vec<(u64, Error)>,
}

impl fmt::Display for ShotSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.counts {
            writeln!(f, "{k}\t{v}")?;
        }
        if !self.aborted.is_empty() {
            writeln!(f, "aborted\t{}", self.aborted.len())?;
        }
        Ok(())
    }
}

/// Registers written by measurements or buffer flags, in declaration order.
pub fn measured_registers(program: &Program) -> Vec<String> {
    let mut written = HashSet::new();
    let mut order = Vec::new();
    program.walk(&mut |s| match &s.kind {
        StmtKind::BitDecl { name, .. } => order.push(name.clone()),
        StmtKind::Measure { dst: Some(d), .. } => {
            written.insert(d.name.clone());
        }
        StmtKind::BufferWrite { flag: Some(f), .. } | StmtKind::BufferRead { flag: Some(f), .. } => {
            written.insert(f.name.clone());
        }
        _ => {}
    });
    order.into_iter().filter(|n| written.contains(n)).collect()
}

/// Runs `config.shots` shots with seeds `seed, seed+1, …` in parallel.
pub fn run_shots<T: Scalar>(program: &Program, config: &RunConfig) -> Result<ShotSummary> {
    if config.shots == 0 {
        return Err(Error::Argument("shots must be at least 1".into()));
    }
    if let Some(d) = validate(program).into_iter().find(|d| d.is_error()) {
        return Err(Error::State(format!("program failed validation: {d}")));
    }
    let keys = measured_registers(program);
    let results: Vec<Result<(u64, std::result::Result<String, Error>)>> = (0..config.shots as u64)
        .into_par_iter()
        .map(|k| {
            let cfg = RunConfig { seed: config.seed.wrapping_add(k), timing: None, ..config.clone() };
            let r = execute_validated::<T>(program, &cfg)?;
            let outcome = match r.error() {
                Some(e) => Err(e.clone()),
                None => Ok(keys
                    .iter()
                    .map(|n| format!("{n}={}", r.value(n).expect("declared")))
                    .collect::<Vec<_>>()
                    .join(" ")),
            };
            Ok((cfg.seed, outcome))
        })
        .collect();
    let mut summary = ShotSummary { shots: config.shots, counts: BTreeMap::new(), aborted: Vec::new() };
    for r in results {
        match r?.1 {
            Ok(key) => *summary.counts.entry(key).or_insert(0) += 1,
            Err(e) => summary.aborted.push((0, e)),
        }
    }
    Ok(summary)
}

/// Which sections [`format_report`] includes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReportOptions {
    pub dump_state: bool,
    pub dump_memory: bool,
    pub timeline: bool,
}

/// Text report: `name=value` lines, then the optional memory, timeline and state sections.
pub fn format_report<T: Scalar>(r: &RunResult<T>, opts: ReportOptions) -> String {
    let mut out = String::new();
    for (n, v) in &r.classical {
        out.push_str(&format!("{n}={v}\n"));
    }
    if (opts.dump_memory || opts.dump_state) && !r.memory_dump.is_empty() {
        out.push_str(&r.memory_dump);
    }
    if opts.timeline {
        out.push_str("# timeline\n");
        for t in &r.timeline {
            out.push_str(&format!("{:.6e}\t{}\t{:.6e}\n", t.t_start, t.op, t.duration));
        }
        if let Some(f) = r.fidelity_estimate {
            out.push_str(&format!("fidelity-estimate (heuristic)\t{f:.9}\n"));
        }
    }
    if opts.dump_state {
        out.push_str("# state\n");
        out.push_str(&r.final_state.dump());
    }
    out
}
