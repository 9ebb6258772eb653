use std::collections::VecDeque;

use super::{dump_cells, qmc_swap};
use crate::error::Result;
use crate::scalar::Scalar;
use crate::statevec::StateVector;

/// Outcome of a buffer access together with its S/F bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BufferStatus {
    ReadSuccess,
    ReadUnderflow,
    WriteStored,
    WriteOverflow,
}

impl BufferStatus {
    /// The S/F output bit: read success 1, underflow 0, write stored 0, overflow 1.
    pub fn sf_bit(self) -> u8 {
        match self {
            BufferStatus::ReadSuccess => 1,
            BufferStatus::ReadUnderflow => 0,
            BufferStatus::WriteStored => 0,
            BufferStatus::WriteOverflow => 1,
        }
    }
}

/// FIFO store of single-qubit states.
#[derive(Debug, Clone)]
pub struct BufferDevice {
    cell_qubits: Vec<usize>,
    fifo: VecDeque<usize>,
}

impl BufferDevice {
    pub fn new(cell_qubits: Vec<usize>) -> Self {
        BufferDevice { cell_qubits, fifo: VecDeque::new() }
    }

    pub fn capacity(&self) -> usize {
        self.cell_qubits.len()
    }

    pub fn cell_qubits(&self) -> &[usize] {
        &self.cell_qubits
    }

    /// Occupied cell indices, oldest first.
    pub fn queue(&self) -> impl Iterator<Item = usize> + '_ {
        self.fifo.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.fifo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fifo.is_empty()
    }

    /// Swaps the bus into the lowest free cell, or signals overflow.
    pub fn write<T: Scalar>(&mut self, state: &mut StateVector<T>, bus: usize) -> Result<BufferStatus> {
        if self.fifo.len() >= self.capacity() {
            return Ok(BufferStatus::WriteOverflow);
        }
        let free = (0..self.capacity())
            .find(|c| !self.fifo.contains(c))
            .expect("a free cell exists below capacity");
        qmc_swap(state, bus, self.cell_qubits[free])?;
        self.fifo.push_back(free);
        Ok(BufferStatus::WriteStored)
    }

    /// Swaps the oldest stored state onto the bus, or signals underflow.
    pub fn read<T: Scalar>(&mut self, state: &mut StateVector<T>, bus: usize) -> Result<BufferStatus> {
        let Some(cell) = self.fifo.pop_front() else {
            return Ok(BufferStatus::ReadUnderflow);
        };
        qmc_swap(state, bus, self.cell_qubits[cell])?;
        Ok(BufferStatus::ReadSuccess)
    }

    pub fn dump<T: Scalar>(&self, state: &StateVector<T>) -> Result<String> {
        dump_cells(state, &self.cell_qubits, |c| {
            if self.fifo.contains(&c) {
                "occupied"
            } else {
                "reset"
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevec::GateSpec;

    type Sv = StateVector<f64>;

    #[test]
    fn sf_bits() {
        assert_eq!(BufferStatus::ReadSuccess.sf_bit(), 1);
        assert_eq!(BufferStatus::ReadUnderflow.sf_bit(), 0);
        assert_eq!(BufferStatus::WriteStored.sf_bit(), 0);
        assert_eq!(BufferStatus::WriteOverflow.sf_bit(), 1);
    }

    #[test]
    fn write_one_then_overflow() {
        // bus 0, cells 1 and 2
        let mut b = BufferDevice::new(vec![1, 2]);
        let mut s = Sv::basis(3, 0).unwrap();
        s.apply_gate(&GateSpec::x(0)).unwrap();
        assert_eq!(b.write(&mut s, 0).unwrap(), BufferStatus::WriteStored);
        assert_eq!(s, Sv::basis(3, 0b010).unwrap());
        s.apply_gate(&GateSpec::h(0)).unwrap();
        assert_eq!(b.write(&mut s, 0).unwrap(), BufferStatus::WriteStored);
        assert_eq!(b.queue().collect::<Vec<_>>(), vec![0, 1]);
        s.apply_gate(&GateSpec::x(0)).unwrap();
        let before = s.clone();
        assert_eq!(b.write(&mut s, 0).unwrap(), BufferStatus::WriteOverflow);
        assert_eq!(s, before);
    }

    #[test]
    fn read_empty_underflows() {
        let mut b = BufferDevice::new(vec![1]);
        let mut s = Sv::basis(2, 0).unwrap();
        assert_eq!(b.read(&mut s, 0).unwrap(), BufferStatus::ReadUnderflow);
        assert_eq!(s, Sv::basis(2, 0).unwrap());
    }
}
