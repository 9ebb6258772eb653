//! Comparison of computed metrics against printed values kept in the
//! dataset `notes` column (`expect alpha_in=1.39e4 alpha_ex=8.44e5; ...`).

use regex::Regex;

use super::{alpha_ex, alpha_in, qmd_metrics, PlatformRecord};
use crate::scalar::Scalar;

/// Marker excluding a row from the comparison.
pub const NON_RECOMPUTABLE: &str = "non-recomputable";

#[derive(Debug, Clone, PartialEq)]
pub enum ExpectedValue {
    /// A printed number and one unit of its last printed digit.
    Number { value: f64, unit: f64, text: String },
    /// Printed as `<0`.
    Negative,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expectation {
    pub metric: String,
    pub expected: ExpectedValue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionLine {
    pub name: String,
    pub metric: String,
    pub printed: String,
    pub computed: Option<f64>,
    pub verdict: Verdict,
}

impl std::fmt::Display for RegressionLine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let computed = self.computed.map(|v| format!("{v:.6e}")).unwrap_or_else(|| "-".into());
        let verdict = match self.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Skip => "SKIP",
        };
        write!(f, "{}\t{}\t{}\t{}\t{}", self.name, self.metric, self.printed, computed, verdict)
    }
}

/// Unit of the last printed digit of a decimal literal such as `1.39e4`.
fn last_digit_unit(text: &str) -> Option<f64> {
    let lower = text.to_ascii_lowercase();
    let (mantissa, exp) = match lower.split_once('e') {
        Some((m, e)) => (m, e.parse::<i32>().ok()?),
        None => (lower.as_str(), 0),
    };
    let decimals = mantissa.split_once('.').map(|(_, d)| d.len() as i32).unwrap_or(0);
    Some(10f64.powi(exp - decimals))
}

/// Extracts `metric=value` pairs following `expect` in the notes.
pub fn parse_expectations(notes: &str) -> Vec<Expectation> {
    let block = Regex::new(r"expect\s+([^;]*)").expect("valid regex");
    let pair = Regex::new(r"(alpha_in|alpha_ex|alpha|beta|gamma)=(<0|[-+]?[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)")
        .expect("valid regex");
    let mut out = Vec::new();
    for b in block.captures_iter(notes) {
        for c in pair.captures_iter(&b[1]) {
            let text = c[2].to_string();
            let expected = if text == "<0" {
                ExpectedValue::Negative
            } else {
                match (text.parse::<f64>(), last_digit_unit(&text)) {
                    (Ok(value), Some(unit)) => ExpectedValue::Number { value, unit, text },
                    _ => continue,
                }
            };
            out.push(Expectation { metric: c[1].to_string(), expected });
        }
    }
    out
}

fn compute<T: Scalar>(rec: &PlatformRecord<T>, metric: &str) -> Option<f64> {
    let v = match metric {
        "alpha_in" => alpha_in(rec).ok()?,
        "alpha_ex" => alpha_ex(rec).ok()?,
        "alpha" => qmd_metrics(rec).ok()?.alpha_qmd,
        "beta" => qmd_metrics(rec).ok()?.beta?,
        "gamma" => qmd_metrics(rec).ok()?.gamma,
        _ => return None,
    };
    v.to_f64()
}

/// One line per printed value; rows marked non-recomputable are skipped.
pub fn check_records<T: Scalar>(records: &[PlatformRecord<T>]) -> Vec<RegressionLine> {
    let mut lines = Vec::new();
    for rec in records {
        let skip = rec.notes.contains(NON_RECOMPUTABLE);
        for e in parse_expectations(&rec.notes) {
            let computed = if skip { None } else { compute(rec, &e.metric) };
            let (printed, verdict) = match (&e.expected, computed, skip) {
                (ExpectedValue::Negative, _, true) => ("<0".to_string(), Verdict::Skip),
                (ExpectedValue::Number { text, .. }, _, true) => (text.clone(), Verdict::Skip),
                (ExpectedValue::Negative, Some(v), false) => ("<0".to_string(), if v < 0.0 { Verdict::Pass } else { Verdict::Fail }),
                (ExpectedValue::Number { value, unit, text }, Some(v), false) => {
                    // small slack for the decimal representation of the printed value
                    let ok = (v - value).abs() <= unit * (1.0 + 1e-9);
                    (text.clone(), if ok { Verdict::Pass } else { Verdict::Fail })
                }
                (ExpectedValue::Negative, None, false) => ("<0".to_string(), Verdict::Fail),
                (ExpectedValue::Number { text, .. }, None, false) => (text.clone(), Verdict::Fail),
            };
            lines.push(RegressionLine { name: rec.name.clone(), metric: e.metric.clone(), printed, computed, verdict });
        }
    }
    lines
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digit_units() {
        assert_eq!(last_digit_unit("1.39e4"), Some(100.0));
        assert_eq!(last_digit_unit("415"), Some(1.0));
        assert!((last_digit_unit("0.037").unwrap() - 1e-3).abs() < 1e-18);
        assert!((last_digit_unit("2.16e-2").unwrap() - 1e-4).abs() < 1e-18);
        assert_eq!(last_digit_unit("2.0e3"), Some(100.0));
    }

    #[test]
    fn expectations_from_notes() {
        let e = parse_expectations("src=x; expect alpha_in=1.39e4 alpha_ex=<0; other=1");
        assert_eq!(e.len(), 2);
        assert_eq!(e[0].metric, "alpha_in");
        assert_eq!(e[1].expected, ExpectedValue::Negative);
        assert!(parse_expectations("no expectations here").is_empty());
    }

    #[test]
    fn pass_fail_skip() {
        let mut rec = PlatformRecord::new("t", 557e-6, 40e-9, 0.998);
        rec.notes = "expect alpha_in=1.39e4".into();
        assert_eq!(check_records(&[rec.clone()])[0].verdict, Verdict::Pass);
        rec.notes = "expect alpha_in=1.37e4".into();
        assert_eq!(check_records(&[rec.clone()])[0].verdict, Verdict::Fail);
        rec.notes = "non-recomputable; expect alpha_in=1.37e4".into();
        assert_eq!(check_records(&[rec])[0].verdict, Verdict::Skip);
    }
}
