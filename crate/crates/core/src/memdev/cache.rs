use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default admission threshold on `α_ex,QC / β_QM`.
pub const DEFAULT_CACHE_THRESHOLD: f64 = 2.0;

/// Admits a cache when `alpha_ex_qc / beta_qm > r_threshold` (strict).
pub fn cache_admit<T: Scalar>(alpha_ex_qc: T, beta_qm: T, r_threshold: T) -> Result<bool> {
    if !(beta_qm > T::zero()) {
        return Err(Error::Argument(format!("beta_qm must be positive, got {beta_qm}")));
    }
    Ok(alpha_ex_qc / beta_qm > r_threshold)
}

/// `T_storage,QC·η_QC / (T_RW,QM/η_QM)`: the admission ratio from raw device
/// times, with the shared operation time cancelled.
pub fn cache_ratio<T: Scalar>(t_storage_qc: T, eta_qc: T, t_rw_qm: T, eta_qm: T) -> Result<T> {
    if !(t_rw_qm > T::zero()) || !(eta_qm > T::zero()) {
        return Err(Error::Argument("main-memory RW time and efficiency must be positive".into()));
    }
    Ok(t_storage_qc * eta_qc / (t_rw_qm / eta_qm))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn admission_examples() {
        assert!(cache_admit(4.0, 1.0, 2.0).unwrap());
        assert!(!cache_admit(2.0, 1.0, 2.0).unwrap());
        assert!(cache_admit(1.0, 0.0, 2.0).is_err());
        assert!(cache_admit(1.0, -1.0, 2.0).is_err());
    }

    #[test]
    fn admission_from_device_times() {
        let t_op = 40e-9;
        let alpha_ex_qc: f64 = 100e-6 * 1.0 / t_op;
        let beta_qm: f64 = (10e-6 / 1.0) / t_op;
        assert!((beta_qm - 250.0).abs() < 1e-9);
        assert!((alpha_ex_qc / beta_qm - 10.0).abs() < 1e-9);
        assert!(cache_admit(alpha_ex_qc, beta_qm, DEFAULT_CACHE_THRESHOLD).unwrap());
        let r = cache_ratio(100e-6, 1.0, 10e-6, 1.0).unwrap();
        assert!((r - 10.0f64).abs() < 1e-12);
    }
}
