use std::path::PathBuf;
use std::process::{Command, Output};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn qmem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmem")).args(args).current_dir(root()).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("qmem-cli-{}-{name}", std::process::id()));
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn run_amplitude_qft_with_post_selection() {
    let o = qmem(&["run", "programs/qft_amplitude.qmasm", "--seed", "7", "--post-select", "caux0=1", "--dump-state"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("caux="), "{out}");
    assert!(out.lines().any(|l| l.starts_with("caux=") && l.ends_with('1')));
    assert!(out.contains("# mem\n0\t"));
    assert!(out.contains("\n3\toccupied"));
    assert!(out.contains("# state"));
    assert!(out.contains("oracle-fidelity\t1.000000000"), "{out}");
    assert!(stderr(&o).contains("zero-padded"));
}

#[test]
fn shots_are_deterministic() {
    let args = ["run", "programs/bell_store.qmasm", "--shots", "100", "--seed", "1"];
    let (a, b) = (qmem(&args), qmem(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    let total: usize = stdout(&a)
        .lines()
        .map(|l| {
            let (k, v) = l.split_once('\t').unwrap();
            assert!(k == "c=00" || k == "c=11", "{l}");
            v.parse::<usize>().unwrap()
        })
        .sum();
    assert_eq!(total, 100);
}

#[test]
fn buffer_demo_flags() {
    let o = qmem(&["run", "programs/buffer_demo.qmasm", "--dump-memory"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("w=100\nrd=011\nm=01\n"), "{out}");
    assert!(out.contains("# qbuffer fifo"));
}

#[test]
fn timeline_reports_fidelity_estimate() {
    let o = qmem(&["run", "programs/bell_store.qmasm", "--timeline"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("# timeline\n"));
    assert!(out.contains("st [1] = q[1]"));
    let f: f64 = out
        .lines()
        .find_map(|l| l.strip_prefix("fidelity-estimate (heuristic)\t"))
        .unwrap()
        .parse()
        .unwrap();
    assert!(f > 0.9 && f < 1.0);
}

#[test]
fn exit_codes() {
    assert_eq!(qmem(&["run", "missing.qmasm"]).status.code(), Some(2));

    let bad = scratch("bad.qmasm", "qubit q;\nst [0] = q;\n");
    let o = qmem(&["run", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("without a prior `mem`"));

    let syntax = scratch("syntax.qmasm", "qubit q\nh q;\n");
    assert_eq!(qmem(&["run", syntax.to_str().unwrap()]).status.code(), Some(1));

    let runtime = scratch("runtime.qmasm", "qubit q;\nmem 2;\nint a = 5;\nst [a] = q;\n");
    let o = qmem(&["run", runtime.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("address"));

    let o = qmem(&["run", "programs/bell_store.qmasm", "--post-select", "nope=1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn metrics_regression_and_fig2() {
    let out_path = std::env::temp_dir().join(format!("qmem-cli-{}-fig2.csv", std::process::id()));
    let o = qmem(&["metrics", "data/table1.csv", "--check-paper", "--fig2", out_path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("name,t_storage_s"));
    let check: Vec<&str> = out.split("# check\n").nth(1).unwrap().lines().collect();
    assert!(!check.is_empty() && check.iter().all(|l| l.ends_with("PASS") || l.ends_with("SKIP")));
    let fig2 = std::fs::read_to_string(&out_path).unwrap();
    assert!(fig2.lines().any(|l| l.starts_with("Transmon,") && l.ends_with(",true")));
    assert!(fig2.lines().any(|l| l.starts_with("\"MW (3D)\",") || l.starts_with("MW (3D),")));
}

#[test]
fn metrics_raqm_table() {
    let o = qmem(&["metrics", "data/table3_raqm.csv", "--check-paper"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn metrics_rejects_bad_rows() {
    let p = scratch(
        "bad.csv",
        "name,t_storage_s,tau_rw_s,eta,t_op_s,t_addr_s,n_cells,n_parallel,notes\nx,1ms,1us,2,,,1,1,\n",
    );
    let o = qmem(&["metrics", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("eta"));
}

#[test]
fn qram_check_all_modes() {
    let o = qmem(&["qram-check", "--addr-bits", "2", "--modes", "all", "--seeds", "50"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.ends_with("\tPASS")).count(), 400);
    assert!(out.contains("# 400 checks, 0 failed"));
}

#[test]
fn qram_check_three_address_bits() {
    let o = qmem(&["qram-check", "--addr-bits", "3", "--modes", "read-classical-cnot", "--seeds", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn qram_check_budget() {
    let o = qmem(&["qram-check", "--addr-bits", "5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("budget"));
}
