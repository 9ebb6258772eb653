use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use qmem_core::metrics::{self, Verdict};
use qmem_core::qmasm::{self, ReportOptions, RunConfig, ShotStatus, TimingProfile};
use qmem_core::qram::{run_check, Backend, QramMode};
use qmem_core::Error;

#[derive(Parser)]
#[command(name = "qmem", version, about = "Quantum memory device simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a program and print its classical results.
    Run {
        program: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        shots: usize,
        /// Force a measured bit, e.g. `caux0=1` or `caux[0]=1`. Repeatable.
        #[arg(long = "post-select", value_name = "BIT=VAL")]
        post_select: Vec<String>,
        #[arg(long, default_value = "functional", value_parser = ["functional", "circuit"])]
        backend: String,
        #[arg(long = "dump-state")]
        dump_state: bool,
        #[arg(long = "dump-memory")]
        dump_memory: bool,
        /// Print the timed operation list and the fidelity estimate.
        #[arg(long)]
        timeline: bool,
    },
    /// Compute device metrics for a platform dataset.
    Metrics {
        dataset: PathBuf,
        /// Compare against the printed values stored in the notes column.
        #[arg(long = "check-paper")]
        check_paper: bool,
        /// Write the storage-ratio scatter data to this path.
        #[arg(long, value_name = "PATH")]
        fig2: Option<PathBuf>,
    },
    /// Cross-check the functional and circuit QRAM backends.
    QramCheck {
        #[arg(long = "addr-bits", default_value_t = 2)]
        addr_bits: usize,
        /// Comma-separated mode names such as `read-classical-cnot`, or `all`.
        #[arg(long, default_value = "all")]
        modes: String,
        #[arg(long, default_value_t = 50)]
        seeds: u64,
    },
}

/// 1 for problems with the input (diagnostics, budget, failed checks),
/// 2 for failures while running or reading files.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Runtime(_) | Error::Io(_) | Error::PostSelection { .. } | Error::Address { .. } | Error::Policy(_) => 2,
        _ => 1,
    }
}

fn fail(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(exit_code(&e))
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { program, seed, shots, post_select, backend, dump_state, dump_memory, timeline } => {
            let opts = ReportOptions { dump_state, dump_memory, timeline };
            cmd_run(&program, seed, shots, &post_select, &backend, opts)
        }
        Command::Metrics { dataset, check_paper, fig2 } => cmd_metrics(&dataset, check_paper, fig2.as_deref()),
        Command::QramCheck { addr_bits, modes, seeds } => cmd_qram_check(addr_bits, &modes, seeds),
    }
}

fn cmd_run(path: &Path, seed: u64, shots: usize, post: &[String], backend: &str, opts: ReportOptions) -> ExitCode {
    let src = match read(path) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let program = match qmasm::parse_program(&src) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let diagnostics = qmasm::validate(&program);
    for d in program.diagnostics.iter().chain(&diagnostics) {
        eprintln!("{}:{d}", path.display());
    }
    if diagnostics.iter().any(|d| d.is_error()) {
        return ExitCode::from(1);
    }
    let mut config = RunConfig {
        seed,
        shots,
        backend: backend.parse().unwrap_or(Backend::Functional),
        timing: opts.timeline.then(TimingProfile::default),
        ..RunConfig::default()
    };
    for item in post {
        let Some((key, val)) = item.split_once('=') else {
            return fail(Error::Argument(format!("--post-select expects BIT=VAL, got `{item}`")));
        };
        let value = match val.trim() {
            "0" => false,
            "1" => true,
            other => return fail(Error::Argument(format!("post-select value must be 0 or 1, got `{other}`"))),
        };
        match qmasm::resolve_bit_key(&program, key) {
            Ok(k) => {
                config.post_select.insert(k, value);
            }
            Err(e) => return fail(e),
        }
    }
    if shots != 1 {
        return match qmasm::run_shots::<f64>(&program, &config) {
            Ok(summary) => {
                print!("{summary}");
                match summary.aborted.first() {
                    Some((_, e)) => {
                        eprintln!("error: {} shot(s) aborted, first: {e}", summary.aborted.len());
                        ExitCode::from(exit_code(e))
                    }
                    None => ExitCode::SUCCESS,
                }
            }
            Err(e) => fail(e),
        };
    }
    let result = match qmasm::execute::<f64>(&program, &config) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    print!("{}", qmasm::format_report(&result, opts));
    match result.oracle_fidelity(config.max_qubits) {
        Ok(f) => println!("oracle-fidelity\t{f:.12}"),
        Err(e) => eprintln!("warning: oracle replay failed: {e}"),
    }
    match &result.shot_log[0].status {
        ShotStatus::Completed => ExitCode::SUCCESS,
        ShotStatus::Aborted(e) => fail(e.clone()),
    }
}

fn cmd_metrics(path: &Path, check_paper: bool, fig2: Option<&Path>) -> ExitCode {
    let data = match metrics::load_platform_dataset::<f64>(path) {
        Ok(d) => d,
        Err(e) => return fail(e),
    };
    for w in &data.warnings {
        eprintln!("warning: {w}");
    }
    if !data.rejected.is_empty() {
        for r in &data.rejected {
            eprintln!("{}: {r}", path.display());
        }
        return ExitCode::from(1);
    }
    match metrics::metrics_table_csv(&data.records) {
        Ok(csv) => print!("{csv}"),
        Err(e) => return fail(e),
    }
    if let Some(out) = fig2 {
        let points = match metrics::emit_fig2_points(&data.records) {
            Ok(p) => p,
            Err(e) => return fail(e),
        };
        if let Err(e) = std::fs::write(out, metrics::fig2_csv(&points)) {
            return fail(Error::Io(format!("{}: {e}", out.display())));
        }
        for p in points.iter().filter(|p| p.clamped) {
            eprintln!("fig2: `{}` plotted at the clamp value", p.name);
        }
    }
    if check_paper {
        let lines = metrics::check_records(&data.records);
        println!("# check");
        for l in &lines {
            println!("{l}");
        }
        if lines.iter().any(|l| l.verdict == Verdict::Fail) {
            return ExitCode::from(1);
        }
    }
    ExitCode::SUCCESS
}

fn cmd_qram_check(addr_bits: usize, modes: &str, seeds: u64) -> ExitCode {
    let modes: Vec<QramMode> = if modes.trim() == "all" {
        QramMode::all().to_vec()
    } else {
        match modes.split(',').map(str::parse).collect::<Result<_, _>>() {
            Ok(m) => m,
            Err(e) => return fail(e),
        }
    };
    if seeds == 0 {
        return fail(Error::Argument("--seeds must be at least 1".into()));
    }
    let jobs: Vec<(QramMode, u64)> = modes.iter().flat_map(|&m| (0..seeds).map(move |s| (m, s))).collect();
    let lines: Result<Vec<_>, Error> = jobs.par_iter().map(|&(m, s)| run_check(addr_bits, m, s)).collect();
    let lines = match lines {
        Ok(l) => l,
        Err(e) => return fail(e),
    };
    println!("addr_bits\tmode\tseed\tfidelity\tpattern\texpected\tverdict");
    for l in &lines {
        println!("{l}");
    }
    let failed = lines.iter().filter(|l| !l.pass()).count();
    println!("# {} checks, {failed} failed", lines.len());
    if failed > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
