use regex::Regex;

use super::{alpha_ex, alpha_in, PlatformRecord};
use crate::error::Result;
use crate::scalar::Scalar;

/// Plot value substituted for negative or missing external ratios.
pub const CLAMP_VALUE: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct Fig2Point<T> {
    pub name: String,
    pub alpha_in: T,
    pub alpha_ex_plotted: T,
    pub clamped: bool,
}

fn link_target(notes: &str) -> Option<String> {
    let re = Regex::new(r"external-link-of=([^;]+)").expect("valid regex");
    re.captures(notes).map(|c| c[1].trim().to_string())
}

/// One point per record. A record whose notes carry `external-link-of=<name>`
/// supplies the external ratio of `<name>` and is not plotted itself.
/// Negative or missing external ratios are plotted at 0.5 and flagged.
pub fn emit_fig2_points<T: Scalar>(records: &[PlatformRecord<T>]) -> Result<Vec<Fig2Point<T>>> {
    let mut points = Vec::new();
    for rec in records.iter().filter(|r| link_target(&r.notes).is_none()) {
        let link = records
            .iter()
            .find(|r| link_target(&r.notes).as_deref() == Some(rec.name.as_str()));
        let ex = match (link, rec.t_op) {
            (Some(l), _) => Some(alpha_ex(l)?),
            (None, Some(_)) => Some(alpha_ex(rec)?),
            (None, None) => None,
        };
        let (plotted, clamped) = match ex {
            Some(v) if v > T::zero() => (v, false),
            _ => (T::lit(CLAMP_VALUE), true),
        };
        points.push(Fig2Point { name: rec.name.clone(), alpha_in: alpha_in(rec)?, alpha_ex_plotted: plotted, clamped });
    }
    Ok(points)
}

/// `name,alpha_in,alpha_ex_plotted,clamped`, followed by two rows giving the
/// endpoints of the `α_in = α_ex` reference line.
pub fn fig2_csv<T: Scalar>(points: &[Fig2Point<T>]) -> String {
    let mut out = String::from("name,alpha_in,alpha_ex_plotted,clamped\n");
    for p in points {
        let name = if p.name.contains([',', '"']) { format!("\"{}\"", p.name.replace('"', "\"\"")) } else { p.name.clone() };
        out.push_str(&format!("{name},{:e},{:e},{}\n", p.alpha_in, p.alpha_ex_plotted, p.clamped));
    }
    let values = points.iter().flat_map(|p| [p.alpha_in, p.alpha_ex_plotted]);
    let lo = values.clone().fold(T::lit(CLAMP_VALUE), T::min);
    let hi = values.fold(T::lit(CLAMP_VALUE), T::max);
    for v in [lo, hi] {
        out.push_str(&format!("reference alpha_in=alpha_ex,{v:e},{v:e},false\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clamps_and_links() {
        let recs: Vec<PlatformRecord<f64>> = vec![
            PlatformRecord::new("sc", 557e-6, 40e-9, 0.998),
            PlatformRecord::new("neg", 200e-9, 58e-9, 0.3742).with_t_op(40e-9),
            PlatformRecord::new("base", 800e-6, 25e-6, 0.6),
            PlatformRecord { notes: "external-link-of=base".into(), ..PlatformRecord::new("link", 800e-6, 26e-6, 0.5964).with_t_op(40e-9) },
        ];
        let pts = emit_fig2_points(&recs).unwrap();
        assert_eq!(pts.len(), 3);
        assert!(pts[0].clamped && pts[0].alpha_ex_plotted == 0.5);
        assert!(pts[1].clamped && pts[1].alpha_ex_plotted == 0.5);
        assert!(!pts[2].clamped);
        assert!((pts[2].alpha_ex_plotted - 1.063e4).abs() < 10.0);
        let csv = fig2_csv(&pts);
        assert_eq!(csv.lines().count(), 6);
        assert!(csv.lines().last().unwrap().starts_with("reference alpha_in=alpha_ex,"));
    }
}
