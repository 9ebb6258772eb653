//! Memory device models acting on qubits of a shared [`StateVector`].

mod buffer;
mod cache;
mod raqm;

pub use buffer::{BufferDevice, BufferStatus};
pub use cache::{cache_admit, cache_ratio, DEFAULT_CACHE_THRESHOLD};
pub use raqm::{CellStatus, OccupiedPolicy, RaqmDevice, RaqmTiming, TimelineEntry};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::statevec::{GateSpec, StateVector};

/// Purity threshold above which a cell is reported as unentangled.
pub const UNENTANGLED_PURITY: f64 = 1.0 - 1e-9;

/// Read/write of a single memory cell: a SWAP between bus and cell.
pub fn qmc_swap<T: Scalar>(state: &mut StateVector<T>, bus: usize, cell: usize) -> Result<()> {
    if bus == cell {
        return Err(Error::Argument(format!("bus and cell are the same qubit ({bus})")));
    }
    state.apply_gate(&GateSpec::swap(bus, cell))
}

/// Formats a single-qubit state as `(a0, a1)`.
pub fn format_qubit_state<T: Scalar>(v: &[Complex<T>; 2]) -> String {
    let f = |z: &Complex<T>| {
        let re = z.re.to_f64().unwrap_or(0.0);
        let im = z.im.to_f64().unwrap_or(0.0);
        let clean = |x: f64| if x.abs() < 5e-13 { 0.0 } else { x };
        format!("{:.6}{:+.6}i", clean(re), clean(im))
    };
    format!("({}, {})", f(&v[0]), f(&v[1]))
}

/// Purity of one qubit, 1 for a single-qubit register.
pub fn cell_purity<T: Scalar>(state: &StateVector<T>, qubit: usize) -> Result<T> {
    if state.num_qubits() == 1 {
        return Ok(T::one());
    }
    state.reduced_purity(&[qubit])
}

/// One memory-dump line per cell: `addr\tstatus\tpurity\tstate-or-entangled`.
pub fn dump_cells<T: Scalar>(
    state: &StateVector<T>,
    cells: &[usize],
    status: impl Fn(usize) -> &'static str,
) -> Result<String> {
    let mut out = String::new();
    for (addr, &q) in cells.iter().enumerate() {
        let purity = cell_purity(state, q)?;
        let shown = match state.single_qubit_state(q, T::lit(1e-9))? {
            Some(v) => format_qubit_state(&v),
            None => "entangled".to_string(),
        };
        out.push_str(&format!("{addr}\t{}\t{:.9}\t{shown}\n", status(addr), purity));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    type Sv = StateVector<f64>;

    #[test]
    fn swap_moves_entanglement_to_cell() {
        // qubits: e=0, bus=1, cell=2
        let mut s = Sv::basis(3, 0).unwrap();
        s.apply_gate(&GateSpec::h(0)).unwrap();
        s.apply_gate(&GateSpec::cnot(0, 1)).unwrap();
        qmc_swap(&mut s, 1, 2).unwrap();
        assert!((s.reduced_purity(&[2]).unwrap() - 0.5).abs() < 1e-9);
        assert!((s.reduced_purity(&[1]).unwrap() - 1.0).abs() < 1e-9);
        assert!(s.prob_one(1).unwrap() < 1e-15);
        assert!(qmc_swap(&mut s, 1, 1).is_err());
    }

    #[test]
    fn swap_twice_is_identity() {
        let mut rng = crate::rng_from_seed(3);
        let s0 = Sv::random(3, &mut rng);
        let mut s = s0.clone();
        qmc_swap(&mut s, 0, 2).unwrap();
        qmc_swap(&mut s, 0, 2).unwrap();
        assert!((s.fidelity(&s0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dump_marks_entangled_cells() {
        let mut s = Sv::basis(2, 0).unwrap();
        s.apply_gate(&GateSpec::h(0)).unwrap();
        s.apply_gate(&GateSpec::cnot(0, 1)).unwrap();
        let d = dump_cells(&s, &[1], |_| "occupied").unwrap();
        assert_eq!(d, "0\toccupied\t0.500000000\tentangled\n");
        let p = Sv::basis(1, 1).unwrap();
        let d = dump_cells(&p, &[0], |_| "occupied").unwrap();
        assert_eq!(d, "0\toccupied\t1.000000000\t(0.000000+0.000000i, 1.000000+0.000000i)\n");
    }
}
