//! Backend cross-check and pattern classification on generic inputs.

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{entanglement_profile, DataKind, Direction, Pattern, QramDevice, QramMode, RouterAncillas, RouterLayout};
use crate::error::Result;
use crate::statevec::StateVector;

/// Fidelity floor for backend agreement and ancilla restoration.
pub const CHECK_TOLERANCE: f64 = 1e-9;

/// One `qram-check` report line.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub addr_len: usize,
    pub mode: QramMode,
    pub seed: u64,
    pub fidelity: f64,
    pub ancilla_purity: f64,
    pub pattern: Pattern,
    pub expected: Pattern,
}

impl CheckLine {
    pub fn ancillas_restored(&self) -> bool {
        self.ancilla_purity >= 1.0 - CHECK_TOLERANCE
    }

    pub fn pass(&self) -> bool {
        self.fidelity >= 1.0 - CHECK_TOLERANCE && self.ancillas_restored() && self.pattern == self.expected
    }
}

impl std::fmt::Display for CheckLine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}\t{}\t{}\t{:.12}\t{}\t{}\t{}",
            self.addr_len,
            self.mode,
            self.seed,
            self.fidelity,
            self.pattern,
            self.expected,
            if self.pass() { "PASS" } else { "FAIL" }
        )
    }
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex<f64> {
    Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn random_qubit<R: Rng + ?Sized>(rng: &mut R) -> [Complex<f64>; 2] {
    let (a, b) = (gaussian(rng), gaussian(rng));
    let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
    [a / norm, b / norm]
}

/// Random data with at least one 0 and one 1.
fn non_constant_bits<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<bool> {
    loop {
        let x: Vec<bool> = (0..len).map(|_| rng.random()).collect();
        if x.iter().any(|&b| b) && x.iter().any(|&b| !b) {
            return x;
        }
    }
}

/// Generic mode input on the compact layout (address `0..n`, bus `n`,
/// memory `n+1..n+1+2^n`), together with the classical data used.
///
/// Reads take a random address superposition with the bus in |0⟩ and memory
/// holding non-constant data (classical) or random product states (quantum).
/// Writes take `Σ c_j|j⟩|d_j⟩` with memory in |0…0⟩, where the bus word `d_j`
/// is non-constant classical data or a random qubit state.
pub fn generic_input<R: Rng + ?Sized>(addr_len: usize, mode: QramMode, rng: &mut R) -> (StateVector<f64>, Vec<bool>) {
    let cells = 1usize << addr_len;
    let k = addr_len + 1 + cells;
    let bus_bit = 1usize << addr_len;
    let mem_shift = addr_len + 1;
    let x = non_constant_bits(cells, rng);
    let zero = Complex::new(0.0, 0.0);
    let mut amps = vec![zero; 1 << k];
    match mode.direction {
        Direction::Read => {
            let c: Vec<Complex<f64>> = (0..cells).map(|_| gaussian(rng)).collect();
            let mem: Vec<[Complex<f64>; 2]> = match mode.data_kind {
                DataKind::Classical => x
                    .iter()
                    .map(|&b| if b { [zero, Complex::new(1.0, 0.0)] } else { [Complex::new(1.0, 0.0), zero] })
                    .collect(),
                DataKind::Quantum => (0..cells).map(|_| random_qubit(rng)).collect(),
            };
            for (j, cj) in c.iter().enumerate() {
                for m in 0..1usize << cells {
                    let amp = (0..cells).fold(*cj, |acc, t| acc * mem[t][(m >> t) & 1]);
                    amps[j | (m << mem_shift)] = amp;
                }
            }
        }
        Direction::Write => {
            for j in 0..cells {
                let cj = gaussian(rng);
                let word = match mode.data_kind {
                    DataKind::Classical => {
                        if x[j] {
                            [zero, Complex::new(1.0, 0.0)]
                        } else {
                            [Complex::new(1.0, 0.0), zero]
                        }
                    }
                    DataKind::Quantum => random_qubit(rng),
                };
                amps[j] = cj * word[0];
                amps[j | bus_bit] = cj * word[1];
            }
        }
    }
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    (StateVector::from_amplitudes(amps).expect("normalized input"), x)
}

/// Runs one mode on both backends from the same generic input.
pub fn run_check(addr_len: usize, mode: QramMode, seed: u64) -> Result<CheckLine> {
    let layout = RouterLayout::standard(addr_len, 1);
    let base = QramDevice::new(addr_len, 1)?;
    if layout.total_qubits() > base.max_qubits() {
        return Err(crate::Error::Resource(format!(
            "router circuit for {addr_len} address bits needs {} qubits, qubit budget is {}",
            layout.total_qubits(),
            base.max_qubits()
        )));
    }
    let mut rng = crate::rng_from_seed(seed ^ ((mode.index() as u64) << 48) ^ ((addr_len as u64) << 56));
    let (input, x) = generic_input(addr_len, mode, &mut rng);

    let mut functional = base.clone().with_memory(layout.memory.clone())?;
    functional.qinit_load(&x)?;
    let mut compact = input.clone();
    functional.apply_mode(&mut compact, mode, &layout.addr, &layout.bus)?;

    let ancillas = RouterAncillas { routers: layout.routers.clone(), channels: layout.channels.clone() };
    let mut circuit = base.with_memory(layout.memory.clone())?.with_circuit(ancillas)?;
    circuit.qinit_load(&x)?;
    let extra = layout.routers.len() + layout.channels.len();
    let mut full = input.pad_zero_qubits(extra)?;
    circuit.apply_mode(&mut full, mode, &layout.addr, &layout.bus)?;

    // The compact state occupies the low qubits; ancillas sit above it, so
    // the overlap with (compact ⊗ |0…0⟩) only involves the first 2^k entries.
    let low = compact.dim();
    let overlap = full.amplitudes()[..low]
        .iter()
        .zip(compact.amplitudes())
        .fold(Complex::new(0.0, 0.0), |acc, (a, b)| acc + a.conj() * b);
    let fidelity = overlap.norm_sqr();

    let anc = layout.ancilla_qubits();
    let p_zero: f64 = full.amplitudes()[..low].iter().map(|a| a.norm_sqr()).sum();
    // Only a state concentrated on the all-zero ancilla branch is worth the
    // full purity computation.
    let ancilla_purity = if p_zero >= 1.0 - CHECK_TOLERANCE { full.reduced_purity(&anc)? } else { p_zero };

    let profile = entanglement_profile(&compact, &functional, &layout.addr, &layout.bus)?;
    Ok(CheckLine {
        addr_len,
        mode,
        seed,
        fidelity,
        ancilla_purity,
        pattern: profile.classify(),
        expected: mode.expected_pattern(),
    })
}
