//! Assembly language for programs that use quantum memory devices.
//!
//! The language is an OpenQASM 3 subset extended with RAQM access (`mem`, `ld`,
//! `st`, `mreset`), QRAM queries (`qram`, `qinit`, `qld`) and a FIFO buffer
//! (`qbuffer`, `bwrite`, `bread`).

pub mod ast;
pub mod gates;
pub mod interp;
pub mod lexer;
pub mod parser;
pub mod trace;
pub mod validate;

pub use ast::{Diagnostic, Program, Severity, Span};
pub use interp::{
    execute, format_report, measured_registers, resolve_bit_key, run_shots, ClassicalValue, MeasureRecord,
    ReportOptions, RunConfig, RunResult, ShotRecord, ShotStatus, ShotSummary, TimedOp, TimingProfile,
};
pub use parser::parse_program;
pub use trace::{flatten_gates, replay_trace, TraceOp};
pub use validate::validate;
