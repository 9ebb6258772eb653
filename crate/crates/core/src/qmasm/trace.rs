use crate::error::Result;
use crate::scalar::Scalar;
use crate::statevec::{GateSpec, StateVector};

/// One step of an executed program, with memory and QRAM operations lowered to gates.
#[derive(Debug, Clone, PartialEq)]
pub enum TraceOp<T> {
    Gate(GateSpec<T>),
    Measure { qubit: usize, outcome: u8 },
    /// Measure-and-flip back to |0⟩ with the recorded outcome.
    Reset { qubit: usize, outcome: u8 },
}

/// Replays a trace on `|0…0⟩`, forcing every recorded outcome.
pub fn replay_trace<T: Scalar>(num_qubits: usize, trace: &[TraceOp<T>], max_qubits: usize) -> Result<StateVector<T>> {
    let mut s = StateVector::basis_with_budget(num_qubits, 0, max_qubits)?;
    for op in trace {
        match op {
            TraceOp::Gate(g) => s.apply_gate(g)?,
            TraceOp::Measure { qubit, outcome } => {
                s.measure_forced(*qubit, *outcome)?;
            }
            TraceOp::Reset { qubit, outcome } => {
                s.measure_forced(*qubit, *outcome)?;
                if *outcome == 1 {
                    s.apply_gate(&GateSpec::x(*qubit))?;
                }
            }
        }
    }
    Ok(s)
}

/// Gates only, in order; measurements and resets are dropped.
pub fn flatten_gates<T: Scalar>(trace: &[TraceOp<T>]) -> Vec<GateSpec<T>> {
    trace
        .iter()
        .filter_map(|op| match op {
            TraceOp::Gate(g) => Some(g.clone()),
            _ => None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forced_outcomes_follow_trace() {
        let t: Vec<TraceOp<f64>> = vec![
            TraceOp::Gate(GateSpec::h(0)),
            TraceOp::Gate(GateSpec::cnot(0, 1)),
            TraceOp::Measure { qubit: 0, outcome: 1 },
            TraceOp::Reset { qubit: 1, outcome: 1 },
        ];
        let s = replay_trace(2, &t, 24).unwrap();
        let want = StateVector::basis(2, 0b01).unwrap();
        assert!((s.fidelity(&want).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(flatten_gates(&t).len(), 2);
    }
}
