use std::path::Path;

use super::{qmd_metrics, PlatformRecord};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Required dataset columns, in order.
pub const HEADER: [&str; 9] = [
    "name", "t_storage_s", "tau_rw_s", "eta", "t_op_s", "t_addr_s", "n_cells", "n_parallel", "notes",
];

/// A row that parsed but violates a record invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct RowDiagnostic {
    /// 1-based line number in the file.
    pub row: usize,
    pub field: String,
    pub message: String,
}

impl std::fmt::Display for RowDiagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "row {}: field `{}`: {}", self.row, self.field, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    pub records: Vec<PlatformRecord<T>>,
    pub rejected: Vec<RowDiagnostic>,
    pub warnings: Vec<String>,
}

/// Parses a time with an optional unit suffix (`s`, `ms`, `us`, `µs`, `ns`,
/// `ps`, `min`, `h`) into seconds.
pub fn parse_time(text: &str) -> std::result::Result<f64, String> {
    let t = text.trim();
    const UNITS: [(&str, f64); 8] = [
        ("min", 60.0),
        ("ms", 1e-3),
        ("us", 1e-6),
        ("µs", 1e-6),
        ("ns", 1e-9),
        ("ps", 1e-12),
        ("h", 3600.0),
        ("s", 1.0),
    ];
    let (num, scale) = UNITS
        .iter()
        .find_map(|(suffix, scale)| t.strip_suffix(suffix).map(|n| (n.trim_end(), *scale)))
        .unwrap_or((t, 1.0));
    let v: f64 = num.parse().map_err(|_| format!("`{text}` is not a number"))?;
    if scale == 1.0 {
        Ok(v)
    } else if scale < 1.0 {
        // dividing by the exact reciprocal keeps e.g. 34ms == 0.034
        Ok(v / (1.0 / scale).round())
    } else {
        Ok(v * scale)
    }
}

fn parse_count(text: &str, default: u64) -> std::result::Result<u64, String> {
    let t = text.trim();
    if t.is_empty() {
        return Ok(default);
    }
    t.parse().map_err(|_| format!("`{text}` is not a nonnegative integer"))
}

/// Parses dataset text. Malformed values are hard errors; rows that parse but
/// violate an invariant are collected in `rejected`.
pub fn parse_platform_dataset<T: Scalar>(text: &str) -> Result<Dataset<T>> {
    let mut out = Dataset { records: Vec::new(), rejected: Vec::new(), warnings: Vec::new() };
    if text.trim().is_empty() {
        out.warnings.push("dataset is empty".into());
        return Ok(out);
    }
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| Error::Dataset { row: 1, field: "header".into(), message: e.to_string() })?;
    let got: Vec<&str> = header.iter().collect();
    if got != HEADER {
        return Err(Error::Dataset {
            row: 1,
            field: "header".into(),
            message: format!("expected `{}`, found `{}`", HEADER.join(","), got.join(",")),
        });
    }
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let row = e.position().map(|p| p.line() as usize).unwrap_or(0);
            Error::Dataset { row, field: "row".into(), message: e.to_string() }
        })?;
        let row = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let field = |i: usize| rec.get(i).unwrap_or("");
        let bad = |i: usize, message: String| Error::Dataset { row, field: HEADER[i].into(), message };
        let time = |i: usize| parse_time(field(i)).map(T::lit).map_err(|m| bad(i, m));
        let name = field(0).to_string();
        if name.is_empty() {
            return Err(bad(0, "name is empty".into()));
        }
        let t_op = if field(4).is_empty() { None } else { Some(time(4)?) };
        let t_addr = if field(5).is_empty() { T::zero() } else { time(5)? };
        let eta: f64 = field(3).parse().map_err(|_| bad(3, format!("`{}` is not a number", field(3))))?;
        let record = PlatformRecord {
            name,
            t_storage: time(1)?,
            tau_rw: time(2)?,
            eta: T::lit(eta),
            t_op,
            t_addr,
            n_cells: parse_count(field(6), 1).map_err(|m| bad(6, m))?,
            n_parallel: parse_count(field(7), 1).map_err(|m| bad(7, m))?,
            notes: field(8).to_string(),
        };
        match record.validate() {
            Ok(()) => out.records.push(record),
            Err((f, message)) => out.rejected.push(RowDiagnostic { row, field: f.into(), message }),
        }
    }
    if out.records.is_empty() && out.rejected.is_empty() {
        out.warnings.push("dataset has no rows".into());
    }
    Ok(out)
}

pub fn load_platform_dataset<T: Scalar>(path: impl AsRef<Path>) -> Result<Dataset<T>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_platform_dataset(&text)
}

fn fmt_opt<T: Scalar>(v: Option<T>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

/// Input columns followed by `t_rw_s,alpha_in,alpha_ex,alpha_qmd,beta,gamma`.
pub fn metrics_table_csv<T: Scalar>(records: &[PlatformRecord<T>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = HEADER.to_vec();
    header.extend(["t_rw_s", "alpha_in", "alpha_ex", "alpha_qmd", "beta", "gamma"]);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(&header).map_err(io)?;
    for r in records {
        let m = qmd_metrics(r)?;
        w.write_record([
            r.name.clone(),
            format!("{:e}", r.t_storage),
            format!("{:e}", r.tau_rw),
            format!("{}", r.eta),
            fmt_opt(r.t_op),
            format!("{:e}", r.t_addr),
            r.n_cells.to_string(),
            r.n_parallel.to_string(),
            r.notes.clone(),
            format!("{:e}", m.t_rw),
            format!("{:e}", m.alpha_in),
            fmt_opt(m.alpha_ex),
            format!("{:e}", m.alpha_qmd),
            fmt_opt(m.beta),
            format!("{:e}", m.gamma),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEAD: &str = "name,t_storage_s,tau_rw_s,eta,t_op_s,t_addr_s,n_cells,n_parallel,notes\n";

    #[test]
    fn units_normalize_to_seconds() {
        assert_eq!(parse_time("34ms").unwrap(), 0.034);
        assert_eq!(parse_time("557us").unwrap(), 557e-6);
        assert_eq!(parse_time("40 ns").unwrap(), 40e-9);
        assert_eq!(parse_time("1.5e-3").unwrap(), 1.5e-3);
        assert_eq!(parse_time("2min").unwrap(), 120.0);
        assert!(parse_time("fast").is_err());
    }

    #[test]
    fn parses_and_rejects() {
        let text = format!("{HEAD}a,1e-3,1e-6,0.9,,,,,x\nb,1e-3,1e-6,1.2,,,,,bad eta\n");
        let d = parse_platform_dataset::<f64>(&text).unwrap();
        assert_eq!(d.records.len(), 1);
        assert_eq!(d.records[0].t_op, None);
        assert_eq!(d.records[0].n_cells, 1);
        assert_eq!(d.rejected.len(), 1);
        assert_eq!(d.rejected[0].row, 3);
        assert_eq!(d.rejected[0].field, "eta");
    }

    #[test]
    fn malformed_value_is_error_with_location() {
        let text = format!("{HEAD}a,1e-3,oops,0.9,,,,,\n");
        match parse_platform_dataset::<f64>(&text) {
            Err(Error::Dataset { row, field, .. }) => {
                assert_eq!(row, 2);
                assert_eq!(field, "tau_rw_s");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_and_bad_header() {
        let d = parse_platform_dataset::<f64>("").unwrap();
        assert!(d.records.is_empty());
        assert_eq!(d.warnings.len(), 1);
        assert!(parse_platform_dataset::<f64>("name,t\n").is_err());
    }

    #[test]
    fn table_has_metric_columns() {
        let d = parse_platform_dataset::<f64>(&format!("{HEAD}a,1e-3,1e-6,1,1e-6,,4,2,\"n, quoted\"\n")).unwrap();
        let csv = metrics_table_csv(&d.records).unwrap();
        let mut lines = csv.lines();
        assert!(lines.next().unwrap().ends_with("t_rw_s,alpha_in,alpha_ex,alpha_qmd,beta,gamma"));
        let row = lines.next().unwrap();
        assert!(row.contains("\"n, quoted\""));
        let tail: Vec<f64> = row.rsplitn(7, ',').take(6).map(|v| v.parse().unwrap()).collect();
        let expect = [2e-3, 1.0, 1e3, 998.0, 1e3, 1e-6];
        for (g, e) in tail.iter().zip(expect) {
            assert!((g - e).abs() <= 1e-12 * e, "{row}");
        }
    }
}
