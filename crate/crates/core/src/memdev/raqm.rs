use rand::Rng;

use super::{dump_cells, qmc_swap};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::statevec::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellStatus {
    Reset,
    Occupied,
}

impl CellStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CellStatus::Reset => "reset",
            CellStatus::Occupied => "occupied",
        }
    }
}

/// What a store does when the target cell is flagged occupied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OccupiedPolicy {
    /// Refuse with a policy error.
    #[default]
    Error,
    /// Swap anyway; the bus receives the old contents.
    Swap,
}

/// Durations, in seconds, used for the device timeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RaqmTiming {
    pub t_addr: f64,
    pub t_rw_qmc: f64,
    pub t_storage: f64,
}

impl RaqmTiming {
    /// Duration of one addressed read or write.
    pub fn access_time(&self) -> f64 {
        self.t_addr + self.t_rw_qmc
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimelineEntry {
    pub op: String,
    pub duration: f64,
}

/// Random-access memory: an array of single-qubit cells with classical addressing.
#[derive(Debug, Clone)]
pub struct RaqmDevice {
    cell_qubits: Vec<usize>,
    status: Vec<CellStatus>,
    timing: Option<RaqmTiming>,
    policy: OccupiedPolicy,
    timeline: Vec<TimelineEntry>,
}

impl RaqmDevice {
    pub fn new(cell_qubits: Vec<usize>) -> Self {
        let n = cell_qubits.len();
        RaqmDevice {
            cell_qubits,
            status: vec![CellStatus::Reset; n],
            timing: None,
            policy: OccupiedPolicy::default(),
            timeline: Vec::new(),
        }
    }

    pub fn with_policy(mut self, policy: OccupiedPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_timing(mut self, timing: RaqmTiming) -> Self {
        self.timing = Some(timing);
        self
    }

    pub fn capacity(&self) -> usize {
        self.cell_qubits.len()
    }

    pub fn cell_qubits(&self) -> &[usize] {
        &self.cell_qubits
    }

    pub fn timing(&self) -> Option<&RaqmTiming> {
        self.timing.as_ref()
    }

    pub fn policy(&self) -> OccupiedPolicy {
        self.policy
    }

    pub fn timeline(&self) -> &[TimelineEntry] {
        &self.timeline
    }

    pub fn status(&self, addr: usize) -> CellStatus {
        self.status[addr]
    }

    /// Validates `addr` and returns it with its cell qubit.
    pub fn resolve(&self, addr: i64) -> Result<(usize, usize)> {
        if addr < 0 || addr as usize >= self.capacity() {
            return Err(Error::Address { addr, size: self.capacity() });
        }
        Ok((addr as usize, self.cell_qubits[addr as usize]))
    }

    fn record(&mut self, op: String) {
        if let Some(t) = self.timing {
            self.timeline.push(TimelineEntry { op, duration: t.access_time() });
        }
    }

    /// Writes the bus state into cell `addr`.
    pub fn store<T: Scalar>(&mut self, state: &mut StateVector<T>, addr: i64, bus: usize) -> Result<()> {
        let (a, cell) = self.resolve(addr)?;
        if self.status[a] == CellStatus::Occupied && self.policy == OccupiedPolicy::Error {
            return Err(Error::Policy(format!("store to occupied cell {a}")));
        }
        qmc_swap(state, bus, cell)?;
        self.status[a] = CellStatus::Occupied;
        self.record(format!("st [{a}]"));
        Ok(())
    }

    /// Moves the contents of cell `addr` onto the bus.
    pub fn load<T: Scalar>(&mut self, state: &mut StateVector<T>, addr: i64, bus: usize) -> Result<()> {
        let (a, cell) = self.resolve(addr)?;
        qmc_swap(state, bus, cell)?;
        self.status[a] = CellStatus::Reset;
        self.record(format!("ld [{a}]"));
        Ok(())
    }

    /// Measures and clears one cell, or every cell when `addr` is `None`.
    /// Returns the discarded outcomes.
    pub fn reset<T: Scalar, R: Rng + ?Sized>(
        &mut self,
        state: &mut StateVector<T>,
        addr: Option<i64>,
        rng: &mut R,
    ) -> Result<Vec<u8>> {
        let targets: Vec<usize> = match addr {
            Some(a) => vec![self.resolve(a)?.0],
            None => (0..self.capacity()).collect(),
        };
        let mut outcomes = Vec::with_capacity(targets.len());
        for a in targets {
            outcomes.push(state.reset_qubit(self.cell_qubits[a], rng)?);
            self.status[a] = CellStatus::Reset;
            self.record(format!("mreset [{a}]"));
        }
        Ok(outcomes)
    }

    /// Memory dump of every cell.
    pub fn dump<T: Scalar>(&self, state: &StateVector<T>) -> Result<String> {
        dump_cells(state, &self.cell_qubits, |a| self.status[a].as_str())
    }
}
