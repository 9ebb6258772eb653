//! Storage ratios, latency and addressability of memory platforms.

mod dataset;
mod fig2;
mod regression;

pub use dataset::{
    load_platform_dataset, metrics_table_csv, parse_platform_dataset, parse_time, Dataset, RowDiagnostic, HEADER,
};
pub use fig2::{emit_fig2_points, fig2_csv, Fig2Point, CLAMP_VALUE};
pub use regression::{check_records, parse_expectations, Expectation, ExpectedValue, RegressionLine, Verdict};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Parameters of one physical platform. Times are in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct PlatformRecord<T> {
    pub name: String,
    pub t_storage: T,
    /// Raw gate or pulse time τ.
    pub tau_rw: T,
    /// RW efficiency (or fidelity) η in (0, 1].
    pub eta: T,
    /// External operation time; `None` when not applicable.
    pub t_op: Option<T>,
    pub t_addr: T,
    pub n_cells: u64,
    pub n_parallel: u64,
    pub notes: String,
}

impl<T: Scalar> PlatformRecord<T> {
    /// Record with `T_addr = 0`, `N = n = 1` and no external operation time.
    pub fn new(name: impl Into<String>, t_storage: T, tau_rw: T, eta: T) -> Self {
        PlatformRecord {
            name: name.into(),
            t_storage,
            tau_rw,
            eta,
            t_op: None,
            t_addr: T::zero(),
            n_cells: 1,
            n_parallel: 1,
            notes: String::new(),
        }
    }

    pub fn with_t_op(mut self, t_op: T) -> Self {
        self.t_op = Some(t_op);
        self
    }

    pub fn with_t_addr(mut self, t_addr: T) -> Self {
        self.t_addr = t_addr;
        self
    }

    pub fn with_cells(mut self, n_cells: u64, n_parallel: u64) -> Self {
        self.n_cells = n_cells;
        self.n_parallel = n_parallel;
        self
    }

    /// Checks the record invariants, naming the first offending field.
    pub fn validate(&self) -> std::result::Result<(), (&'static str, String)> {
        let times = [("t_storage_s", Some(self.t_storage)), ("tau_rw_s", Some(self.tau_rw)), ("t_op_s", self.t_op), ("t_addr_s", Some(self.t_addr))];
        for (field, v) in times {
            if let Some(v) = v {
                if !(v >= T::zero()) || !v.is_finite() {
                    return Err((field, format!("time must be finite and >= 0, got {v}")));
                }
            }
        }
        if !(self.eta > T::zero() && self.eta <= T::one()) {
            return Err(("eta", format!("eta must lie in (0, 1], got {}", self.eta)));
        }
        if self.n_cells < 1 {
            return Err(("n_cells", "N must be at least 1".into()));
        }
        if self.n_parallel < 1 || self.n_parallel > self.n_cells {
            return Err(("n_parallel", format!("n must lie in [1, N={}], got {}", self.n_cells, self.n_parallel)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsResult<T> {
    /// Device RW time `T_addr + τ/η`.
    pub t_rw: T,
    pub alpha_in: T,
    /// `None` when the record has no external operation time.
    pub alpha_ex: Option<T>,
    pub alpha_qmd: T,
    pub beta: Option<T>,
    pub gamma: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BufferMetrics<T> {
    pub alpha_ex_qb: T,
    pub beta_qb: T,
    pub recommended_capacity: u64,
}

fn check_eta<T: Scalar>(eta: T) -> Result<()> {
    if !(eta > T::zero() && eta <= T::one()) {
        return Err(Error::Argument(format!("eta must lie in (0, 1], got {eta}")));
    }
    Ok(())
}

/// `τ/η`.
pub fn rw_time<T: Scalar>(tau: T, eta: T) -> Result<T> {
    check_eta(eta)?;
    if !(tau >= T::zero()) {
        return Err(Error::Argument(format!("tau must be >= 0, got {tau}")));
    }
    Ok(tau / eta)
}

fn record_checked<T: Scalar>(rec: &PlatformRecord<T>) -> Result<()> {
    rec.validate()
        .map_err(|(field, msg)| Error::Argument(format!("record `{}` field {field}: {msg}", rec.name)))
}

/// `T_storage / (τ/η)`.
pub fn alpha_in<T: Scalar>(rec: &PlatformRecord<T>) -> Result<T> {
    record_checked(rec)?;
    Ok(rec.t_storage / rw_time(rec.tau_rw, rec.eta)?)
}

/// `(T_storage − 2τ/η)·η / T_op`.
pub fn alpha_ex<T: Scalar>(rec: &PlatformRecord<T>) -> Result<T> {
    record_checked(rec)?;
    let t_op = match rec.t_op {
        Some(t) if t > T::zero() => t,
        _ => {
            return Err(Error::Argument(format!(
                "record `{}`: alpha_ex undefined without a positive T_op",
                rec.name
            )))
        }
    };
    let t_rw = rw_time(rec.tau_rw, rec.eta)?;
    Ok((rec.t_storage - T::lit(2.0) * t_rw) * rec.eta / t_op)
}

/// `(α_in, α_ex)` with `T_RW = τ/η`.
pub fn storage_ratios<T: Scalar>(rec: &PlatformRecord<T>) -> Result<(T, T)> {
    Ok((alpha_in(rec)?, alpha_ex(rec)?))
}

/// Device-level metrics with `T_RW = T_addr + τ/η`.
pub fn qmd_metrics<T: Scalar>(rec: &PlatformRecord<T>) -> Result<MetricsResult<T>> {
    record_checked(rec)?;
    let t_rw = rec.t_addr + rw_time(rec.tau_rw, rec.eta)?;
    if !(t_rw > T::zero()) || !(rec.t_storage > T::zero()) {
        return Err(Error::Argument(format!(
            "record `{}`: storage and RW times must be positive",
            rec.name
        )));
    }
    let alpha_ex = match rec.t_op {
        Some(t) if t > T::zero() => Some(alpha_ex(rec)?),
        _ => None,
    };
    let beta = rec.t_op.filter(|t| *t > T::zero()).map(|t_op| (t_rw / rec.eta) / t_op);
    let n_cells = T::from_u64(rec.n_cells).expect("cell count fits");
    let n_par = T::from_u64(rec.n_parallel).expect("parallel count fits");
    Ok(MetricsResult {
        t_rw,
        alpha_in: alpha_in(rec)?,
        alpha_ex,
        alpha_qmd: rec.t_storage / t_rw,
        beta,
        gamma: t_rw * n_cells / (rec.t_storage * n_par),
    })
}

/// Buffer ratios for generation period `t_g` and consumption period `t_c`.
pub fn buffer_cache_metrics<T: Scalar>(t_storage: T, t_rw: T, eta: T, t_g: T, t_c: T) -> Result<BufferMetrics<T>> {
    if !(t_g > T::zero() && t_c > T::zero()) {
        return Err(Error::Argument("generation and consumption times must be positive".into()));
    }
    check_eta(eta)?;
    let capacity = (t_g / t_c).round().to_u64().unwrap_or(1).max(1);
    Ok(BufferMetrics {
        alpha_ex_qb: t_storage * eta / t_g.max(t_c),
        beta_qb: (t_rw / eta) / t_g.min(t_c),
        recommended_capacity: capacity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rw_time_examples() {
        assert_relative_eq!(rw_time(40e-9, 0.998).unwrap(), 4.008e-8, max_relative = 1e-3);
        assert_eq!(rw_time(1.0, 1.0).unwrap(), 1.0);
        assert_relative_eq!(rw_time(1.04e-6, 0.02f64.sqrt()).unwrap(), 7.35e-6, max_relative = 1e-3);
        assert!(rw_time(1.0, 1.2).is_err());
        assert!(rw_time(1.0, 0.0).is_err());
    }

    #[test]
    fn storage_ratio_examples() {
        let transmon = PlatformRecord::new("transmon", 557e-6, 40e-9, 0.998);
        assert_relative_eq!(alpha_in(&transmon).unwrap(), 1.39e4, max_relative = 5e-3);
        assert!(alpha_ex(&transmon).is_err());

        let mw = PlatformRecord::new("mw3d", 34e-3, 1000e-9, 0.994).with_t_op(40e-9);
        let (ai, ae) = storage_ratios(&mw).unwrap();
        assert_relative_eq!(ai, 3.38e4, max_relative = 5e-3);
        assert_relative_eq!(ae, 8.44e5, max_relative = 5e-3);

        let edge = PlatformRecord::<f64>::new("edge", 2.0 * 3e-6 / 0.7, 3e-6, 0.7).with_t_op(1e-9);
        assert!(alpha_ex(&edge).unwrap().abs() < 1e-9);
    }

    #[test]
    fn qmd_fields_and_na() {
        let rec = PlatformRecord::new("r", 1e-3, 1e-6, 1.0).with_t_addr(1e-6).with_cells(10, 2);
        let m = qmd_metrics(&rec).unwrap();
        assert_relative_eq!(m.t_rw, 2e-6);
        assert_relative_eq!(m.alpha_qmd, 500.0);
        assert_relative_eq!(m.gamma, 2e-6 * 10.0 / (1e-3 * 2.0));
        assert!(m.alpha_ex.is_none() && m.beta.is_none());
        let m = qmd_metrics(&rec.clone().with_t_op(1e-6)).unwrap();
        assert_relative_eq!(m.beta.unwrap(), 2.0);
    }

    #[test]
    fn buffer_examples() {
        let b = buffer_cache_metrics(1.0, 1e-6, 1.0, 1e-3, 1e-4).unwrap();
        assert_relative_eq!(b.alpha_ex_qb, 1000.0, max_relative = 1e-12);
        assert_relative_eq!(b.beta_qb, 0.01, max_relative = 1e-12);
        assert_eq!(b.recommended_capacity, 10);
        assert_eq!(buffer_cache_metrics(1.0, 1e-6, 1.0, 1e-3, 1e-3).unwrap().recommended_capacity, 1);
        let full = buffer_cache_metrics(1.0, 1e-6, 1.0, 1e-2, 1e-3).unwrap();
        let half = buffer_cache_metrics(1.0, 1e-6, 0.5, 1e-2, 1e-3).unwrap();
        assert_relative_eq!(half.alpha_ex_qb, full.alpha_ex_qb / 2.0, max_relative = 1e-12);
        assert!(buffer_cache_metrics(1.0, 1e-6, 1.0, 0.0, 1e-3).is_err());
    }

    #[test]
    fn validation_names_field() {
        let mut rec = PlatformRecord::new("r", 1.0, 1.0, 1.2);
        assert_eq!(rec.validate().unwrap_err().0, "eta");
        rec.eta = 1.0;
        rec.n_parallel = 3;
        assert_eq!(rec.validate().unwrap_err().0, "n_parallel");
    }
}
