//! Bucket-brigade QRAM: coherent addressing of a memory array.
//!
//! The functional backend applies each mode as an exact basis permutation.
//! The circuit backend runs an explicit router-tree gate sequence over
//! ancilla routers and per-depth channel qubits.

mod check;
mod circuit;
mod mode;
mod profile;

pub use check::{generic_input, run_check, CheckLine};
pub use circuit::{build_router_program, RouterLayout};
pub use mode::{Coupling, DataKind, Direction, Pattern, QramMode};
pub use profile::{entanglement_profile, EntanglementProfile, ENTANGLED_MAX, PRODUCT_MIN};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::statevec::{gather, GateSpec, StateVector, DEFAULT_MAX_QUBITS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    #[default]
    Functional,
    Circuit,
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "functional" => Ok(Backend::Functional),
            "circuit" => Ok(Backend::Circuit),
            other => Err(Error::Argument(format!("unknown backend `{other}`"))),
        }
    }
}

/// Router and channel ancillas used by the circuit backend.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RouterAncillas {
    /// Level-order router tree, `2^n - 1` qubits.
    pub routers: Vec<usize>,
    /// One channel qubit per depth `1..=n`.
    pub channels: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct QramDevice {
    addr_len: usize,
    word_len: usize,
    data: Option<Vec<bool>>,
    memory_qubits: Option<Vec<usize>>,
    ancillas: Option<RouterAncillas>,
    backend: Backend,
    max_qubits: usize,
}

impl QramDevice {
    pub fn new(addr_len: usize, word_len: usize) -> Result<Self> {
        if addr_len == 0 || word_len == 0 {
            return Err(Error::Argument("address and word lengths must be at least 1".into()));
        }
        if addr_len >= usize::BITS as usize - 1 {
            return Err(Error::Resource(format!("address length {addr_len} too large")));
        }
        Ok(QramDevice {
            addr_len,
            word_len,
            data: None,
            memory_qubits: None,
            ancillas: None,
            backend: Backend::Functional,
            max_qubits: DEFAULT_MAX_QUBITS,
        })
    }

    /// Places the memory array on the given qubits (`2^n · w` of them).
    pub fn with_memory(mut self, qubits: Vec<usize>) -> Result<Self> {
        if qubits.len() != self.cells() * self.word_len {
            return Err(Error::Argument(format!(
                "memory needs {} qubits, got {}",
                self.cells() * self.word_len,
                qubits.len()
            )));
        }
        self.memory_qubits = Some(qubits);
        Ok(self)
    }

    /// Switches to the circuit backend over the given ancillas.
    pub fn with_circuit(mut self, ancillas: RouterAncillas) -> Result<Self> {
        if ancillas.routers.len() != self.cells() - 1 || ancillas.channels.len() != self.addr_len {
            return Err(Error::Argument(format!(
                "circuit backend needs {} routers and {} channels",
                self.cells() - 1,
                self.addr_len
            )));
        }
        self.ancillas = Some(ancillas);
        self.backend = Backend::Circuit;
        Ok(self)
    }

    pub fn with_max_qubits(mut self, max_qubits: usize) -> Self {
        self.max_qubits = max_qubits;
        self
    }

    pub fn addr_len(&self) -> usize {
        self.addr_len
    }

    pub fn word_len(&self) -> usize {
        self.word_len
    }

    /// Number of addressable cells, `2^n`.
    pub fn cells(&self) -> usize {
        1 << self.addr_len
    }

    pub fn data(&self) -> Option<&[bool]> {
        self.data.as_deref()
    }

    pub fn memory_qubits(&self) -> Option<&[usize]> {
        self.memory_qubits.as_deref()
    }

    pub fn ancillas(&self) -> Option<&RouterAncillas> {
        self.ancillas.as_ref()
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn max_qubits(&self) -> usize {
        self.max_qubits
    }

    /// Memory qubit holding bit `i` of word `j`.
    pub fn cell(&self, j: usize, i: usize) -> Option<usize> {
        self.memory_qubits.as_ref().map(|m| m[j * self.word_len + i])
    }

    /// Stores classical data `x` (word `j` bit `i` at `x[j·w + i]`).
    pub fn qinit_load(&mut self, x: &[bool]) -> Result<()> {
        let expected = self.cells() * self.word_len;
        if x.len() != expected {
            return Err(Error::Argument(format!(
                "classical data has length {}, expected {expected}",
                x.len()
            )));
        }
        self.data = Some(x.to_vec());
        Ok(())
    }

    /// Writes the loaded data into materialized memory assumed to be |0…0⟩.
    pub fn materialize_data<T: Scalar>(&self, state: &mut StateVector<T>) -> Result<()> {
        let data = self.data.as_ref().ok_or_else(|| Error::State("no classical data loaded".into()))?;
        let mem = self
            .memory_qubits
            .as_ref()
            .ok_or_else(|| Error::Configuration("memory qubits are not materialized".into()))?;
        for (&bit, &q) in data.iter().zip(mem) {
            if bit {
                state.apply_gate(&GateSpec::x(q))?;
            }
        }
        Ok(())
    }

    fn check_registers(&self, n: usize, addr: &[usize], bus: &[usize], with_memory: bool) -> Result<()> {
        if addr.len() != self.addr_len {
            return Err(Error::Argument(format!(
                "address register has {} qubits, device expects {}",
                addr.len(),
                self.addr_len
            )));
        }
        if bus.len() != self.word_len {
            return Err(Error::Argument(format!(
                "bus register has {} qubits, device expects {}",
                bus.len(),
                self.word_len
            )));
        }
        let mut seen = vec![false; n];
        let mem: &[usize] = match (&self.memory_qubits, with_memory) {
            (Some(m), true) => m,
            _ => &[],
        };
        for &q in addr.iter().chain(bus).chain(mem) {
            if q >= n {
                return Err(Error::Argument(format!("qubit index {q} out of range for {n} qubits")));
            }
            if seen[q] {
                return Err(Error::Argument(format!("qubit {q} overlaps between address, bus and memory")));
            }
            seen[q] = true;
        }
        Ok(())
    }

    /// `Σ_j c_j|j⟩|b⟩ → Σ_j c_j|j⟩|b ⊕ x_j⟩` from the classical data.
    pub fn oracle_query<T: Scalar>(&self, state: &mut StateVector<T>, addr: &[usize], bus: &[usize]) -> Result<()> {
        let data = self.data.as_ref().ok_or_else(|| Error::State("no classical data loaded".into()))?;
        self.check_registers(state.num_qubits(), addr, bus, false)?;
        let w = self.word_len;
        let masks: Vec<usize> = (0..self.cells())
            .map(|j| {
                (0..w)
                    .filter(|&i| data[j * w + i])
                    .fold(0usize, |m, i| m | (1 << bus[i]))
            })
            .collect();
        state.permute_basis(|idx| idx ^ masks[gather(idx, addr)]);
        Ok(())
    }

    /// Applies one of the eight modes with the device's backend.
    pub fn apply_mode<T: Scalar>(
        &self,
        state: &mut StateVector<T>,
        mode: QramMode,
        addr: &[usize],
        bus: &[usize],
    ) -> Result<()> {
        if mode.needs_memory() && self.memory_qubits.is_none() {
            return Err(Error::Configuration(format!(
                "mode {mode} requires materialized memory qubits"
            )));
        }
        match self.backend {
            Backend::Functional => self.apply_functional(state, mode, addr, bus),
            Backend::Circuit => {
                let anc = self.ancillas.as_ref().ok_or_else(|| {
                    Error::Configuration("circuit backend without router ancillas".into())
                })?;
                let memory = self.memory_qubits.clone().ok_or_else(|| {
                    Error::Configuration("circuit backend requires materialized memory".into())
                })?;
                let layout = RouterLayout {
                    addr: addr.to_vec(),
                    bus: bus.to_vec(),
                    memory,
                    routers: anc.routers.clone(),
                    channels: anc.channels.clone(),
                };
                let program = build_router_program::<T>(self, mode, &layout)?;
                state.apply_all(&program)
            }
        }
    }

    fn apply_functional<T: Scalar>(
        &self,
        state: &mut StateVector<T>,
        mode: QramMode,
        addr: &[usize],
        bus: &[usize],
    ) -> Result<()> {
        let Some(mem) = self.memory_qubits.as_ref() else {
            // classical-data CNOT read without memory qubits: the data is the memory
            return self.oracle_query(state, addr, bus);
        };
        self.check_registers(state.num_qubits(), addr, bus, true)?;
        let w = self.word_len;
        state.permute_basis(|idx| {
            let j = gather(idx, addr);
            let mut out = idx;
            for (i, &b) in bus.iter().enumerate() {
                let (bb, cb) = (1usize << b, 1usize << mem[j * w + i]);
                match (mode.direction, mode.coupling) {
                    (Direction::Read, Coupling::Cnot) => {
                        if out & cb != 0 {
                            out ^= bb;
                        }
                    }
                    (Direction::Write, Coupling::Cnot) => {
                        if out & bb != 0 {
                            out ^= cb;
                        }
                    }
                    (_, Coupling::Swap) => {
                        if (out & bb != 0) != (out & cb != 0) {
                            out ^= bb | cb;
                        }
                    }
                }
            }
            out
        });
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    type Sv = StateVector<f64>;

    fn bits(v: &[u8]) -> Vec<bool> {
        v.iter().map(|&b| b == 1).collect()
    }

    #[test]
    fn qinit_length_checked() {
        let mut d = QramDevice::new(2, 1).unwrap();
        assert!(d.qinit_load(&bits(&[1, 0, 0, 1])).is_ok());
        assert!(matches!(d.qinit_load(&bits(&[1, 0, 0])), Err(Error::Argument(m)) if m.contains("expected 4")));
    }

    #[test]
    fn materialized_memory_holds_data() {
        // memory cells 0..4 are qubits 0..4: x=[1,0,0,1] gives |1001⟩ with cell 0 as LSB
        let mut d = QramDevice::new(2, 1).unwrap().with_memory(vec![0, 1, 2, 3]).unwrap();
        d.qinit_load(&bits(&[1, 0, 0, 1])).unwrap();
        let mut s = Sv::basis(4, 0).unwrap();
        d.materialize_data(&mut s).unwrap();
        assert_eq!(s, Sv::basis(4, 0b1001).unwrap());
    }

    #[test]
    fn oracle_on_bell_like_address() {
        // addr q0,q1; bus q2
        let mut d = QramDevice::new(2, 1).unwrap();
        d.qinit_load(&bits(&[1, 0, 0, 1])).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![Complex::new(0.0, 0.0); 8];
        amps[0b000] = Complex::new(h, 0.0);
        amps[0b011] = Complex::new(h, 0.0);
        let mut s = Sv::from_amplitudes(amps).unwrap();
        d.oracle_query(&mut s, &[0, 1], &[2]).unwrap();
        assert!((s.amplitude(0b100).re - h).abs() < 1e-15);
        assert!((s.amplitude(0b111).re - h).abs() < 1e-15);
    }

    #[test]
    fn oracle_errors() {
        let d = QramDevice::new(2, 1).unwrap();
        let mut s = Sv::basis(3, 0).unwrap();
        assert!(matches!(d.oracle_query(&mut s, &[0, 1], &[2]), Err(Error::State(_))));
        let mut d = d;
        d.qinit_load(&[false; 4]).unwrap();
        assert!(matches!(d.oracle_query(&mut s, &[0, 1], &[1]), Err(Error::Argument(_))));
        assert!(matches!(d.oracle_query(&mut s, &[0], &[2]), Err(Error::Argument(_))));
    }

    #[test]
    fn quantum_mode_without_memory_is_configuration_error() {
        let mut d = QramDevice::new(1, 1).unwrap();
        d.qinit_load(&[false, true]).unwrap();
        let mut s = Sv::basis(2, 0).unwrap();
        let mode = "read-quantum-swap".parse().unwrap();
        assert!(matches!(d.apply_mode(&mut s, mode, &[0], &[1]), Err(Error::Configuration(_))));
    }
}
